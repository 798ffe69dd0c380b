#pragma once

#include <functional>

namespace hetcache {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;     // Kronrod-minus-Gauss estimate summed over subintervals
    int subdivisions = 0;   // number of interval splits performed
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration on [a, b].
///
/// The interval with the largest error estimate is bisected until the total
/// estimate is below max(abs_tol, rel_tol * |value|). Throws NumericalFailure
/// with the achieved estimate when `max_subdivisions` splits are not enough.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, int max_subdivisions);

} // namespace hetcache
