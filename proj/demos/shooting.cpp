// Shoots for the self-similar profile in the repelling band and shows
// how the normalized ratios a_{n+1}/a_n * k_1^{1/3} settle to 1.

#include <cmath>
#include <cstdio>

#include "dyadic/io.hpp"
#include "dyadic/selfsimilar.hpp"

int main() {
    using namespace dyadic;

    ModelParams p;  // delta1 = delta2 = 1
    const ShootResult sr = shoot_selfsimilar(p, 40);

    std::printf("self-similar shooting (delta1 = delta2 = 1):\n");
    std::printf("  a_1 root        = %s\n", format_double(sr.root).c_str());
    std::printf("  bracket width   = %.3e (relative %.3e)\n", sr.bracket_width,
                sr.bracket_width / sr.root);
    std::printf("  plateau constant= %s\n", format_double(*sr.sequence.k41_constant).c_str());

    std::printf("\n%4s %22s %22s\n", "n", "a_n", "ratio * k_1^{1/3}");
    const double k13 = std::exp2(1.0 / 3.0);
    for (std::size_t n = 1; n + 1 < sr.sequence.values.size() && n <= 12; ++n)
        std::printf("%4zu %22.15e %22.15f\n", n, sr.sequence.values[n],
                    sr.sequence.values[n + 1] / sr.sequence.values[n] * k13);
    return 0;
}
