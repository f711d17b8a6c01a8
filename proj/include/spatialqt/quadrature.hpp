#pragma once

#include <complex>
#include <functional>

namespace spatialqt {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct QuadratureResult {
    std::complex<double> value;
    double error_estimate = 0.0;
    int intervals = 0;
    int evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of a complex-valued
/// function over [lo, hi]. The interval with the largest error estimate is
/// bisected until the summed estimate drops below
/// max(abs_tol, rel_tol * |integral|).
///
/// Throws NumericalError when max_intervals is exhausted first, or when the
/// integrand returns a non-finite value.
QuadratureResult integrate(const std::function<std::complex<double>(double)>& f,
                           double lo, double hi, const QuadratureOptions& options = {});

}  // namespace spatialqt
