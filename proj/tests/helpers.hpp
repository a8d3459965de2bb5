// shared fixtures for the test suites
#pragma once

#include <random>

#include "vortexpair/domain.hpp"

namespace vptest {

using vortexpair::Domain;
using vortexpair::Field;

inline Field random_field(const Domain& d, unsigned seed, double density = 1.0,
                          double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(lo, hi);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Field f(d, 0.0, lo >= 0.0);
    for (double& v : f.values)
        if (coin(rng) < density) v = val(rng);
    return f;
}

// indicator of the disc |x - c| < r sampled at cell centers
inline Field disc_patch(const Domain& d, double cx, double cy, double r,
                        double value = 1.0) {
    Field f(d, 0.0, true);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const double ddx = d.x_center(i) - cx;
            const double ddy = d.y_center(j) - cy;
            if (ddx * ddx + ddy * ddy < r * r) f.at(i, j) = value;
        }
    return f;
}

// C2 compactly supported bump, amplitude a at the center
inline Field smooth_bump(const Domain& d, double cx, double cy, double r,
                         double a = 1.0) {
    Field f(d, 0.0, true);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            const double ddx = d.x_center(i) - cx;
            const double ddy = d.y_center(j) - cy;
            const double q = (ddx * ddx + ddy * ddy) / (r * r);
            if (q < 1.0) f.at(i, j) = a * (1.0 - q) * (1.0 - q) * (1.0 - q);
        }
    return f;
}

// long double pairwise summation, independent of the library reductions
inline long double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0L;
    if (n == 1) return v[0];
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

} // namespace vptest
