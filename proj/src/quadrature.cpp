#include "spatialqt/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "spatialqt/error.hpp"

namespace spatialqt {
namespace {

// Kronrod nodes on [0, 1]; odd entries (1, 3, 5) coincide with Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment {
    double lo;
    double hi;
    std::complex<double> value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment rule(const std::function<std::complex<double>(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const std::complex<double> fc = f(center);
    std::complex<double> kronrod = fc * kKronrodWeights[7];
    std::complex<double> gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kNodes[j];
        const std::complex<double> pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    if (!std::isfinite(kronrod.real()) || !std::isfinite(kronrod.imag())) {
        std::ostringstream msg;
        msg << "integrand is not finite on [" << lo << ", " << hi << "]";
        throw NumericalError(msg.str());
    }
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<std::complex<double>(double)>& f,
                           double lo, double hi, const QuadratureOptions& options) {
    QuadratureResult result;
    if (lo == hi) return result;
    if (!(std::isfinite(lo) && std::isfinite(hi))) {
        throw NumericalError("integration limits must be finite");
    }

    std::priority_queue<Segment> segments;
    Segment first = rule(f, lo, hi);
    std::complex<double> total = first.value;
    double error = first.error;
    segments.push(first);
    int evaluations = 15;

    while (error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
        if (static_cast<int>(segments.size()) >= options.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << lo << ", " << hi << "] did not converge: error estimate "
                << error << " after " << segments.size() << " intervals";
            throw NumericalError(msg.str());
        }
        Segment worst = segments.top();
        segments.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            throw NumericalError("adaptive quadrature: interval can no longer be bisected");
        }
        Segment left = rule(f, worst.lo, mid);
        Segment right = rule(f, mid, worst.hi);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        segments.push(left);
        segments.push(right);
    }

    // Re-sum to shed the drift from incremental updates.
    std::complex<double> sum = 0.0;
    double err = 0.0;
    const auto count = static_cast<int>(segments.size());
    while (!segments.empty()) {
        sum += segments.top().value;
        err += segments.top().error;
        segments.pop();
    }
    result.value = sum;
    result.error_estimate = err;
    result.intervals = count;
    result.evaluations = evaluations;
    return result;
}

}  // namespace spatialqt
