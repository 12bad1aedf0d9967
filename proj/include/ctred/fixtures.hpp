#pragma once

#include <cmath>

#include "lti.hpp"

// Example systems as printed in the literature (2-4 decimals).
namespace ctred::fixtures {

inline StateSpace make(std::initializer_list<std::initializer_list<double>> A,
                       std::initializer_list<double> B, std::initializer_list<double> C) {
    Index n = static_cast<Index>(A.size());
    Matrix a(n, n), b(n, 1), c(1, n);
    Index i = 0;
    for (auto& row : A) {
        Index j = 0;
        for (double v : row) a(i, j++) = v;
        ++i;
    }
    i = 0;
    for (double v : B) b(i++, 0) = v;
    i = 0;
    for (double v : C) c(0, i++) = v;
    return make_system(a, b, c, Matrix::Zero(1, 1));
}

/// Stable-reduction example: plant.
inline StateSpace table1_plant() {
    return make({{-6.00, -13.84, -11.95}, {1, 0, 0}, {0, 1, 0}}, {1, 0, 0}, {-1.74, -7.63, -8.37});
}

/// Stable-reduction example: controller with one antistable mode.
inline StateSpace table1_controller() {
    return make({{-2.1541, -0.0104, 0}, {-0.0104, -2.1731, 0}, {0, 0, 0.2}}, {0, 1.2815, 0.5},
                {-0.8097, -1.2368, 0.5});
}

/// Unstable-reduction example: plant.
inline StateSpace unstable_plant() {
    return make({{-5.86, -9.50, 0.56}, {1, 0, 0}, {0, 1, 0}}, {1, 0, 0}, {-7.18, -25.61, -8.41});
}

/// Unstable-reduction example: modal controller diag(1.37, -0.37, 0.34).
inline StateSpace unstable_controller() {
    return make({{1.37, 0, 0}, {0, -0.37, 0}, {0, 0, 0.34}}, {0.19, 0.04, 0.04}, {3.79, 4.14, -1.57});
}

/// The reduced controller keeping the first two modes.
inline StateSpace unstable_reduced() { return make({{1.37, 0}, {0, -0.37}}, {0.19, 0.04}, {3.79, 4.14}); }

/// Base controller of the scaling experiment.
inline StateSpace scaling_base() {
    return make({{1.5, -1, -0.21}, {3.00, -0.43, -1.00}, {2.00, -0.07, -5.00}}, {0.18, 0.97, 1.2}, {1.00, 2.00, 3.00});
}

/// First-order added component (-1, sqrt(eps), sqrt(eps), 0).
inline StateSpace scaling_delta(double eps) {
    double s = std::sqrt(eps);
    return make({{-1}}, {s}, {s});
}

/// Fixed antistable part of the random-instance recipe.
inline StateSpace appendix_antistable() { return make({{0.2}}, {0.5}, {0.5}); }

}  // namespace ctred::fixtures
