#include "spatialqt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "spatialqt/error.hpp"

namespace spatialqt {
namespace {

std::array<Complex, 2> kernels(double x, double b, const SlitGeometry& geom, const OpticalParams& opt,
                               const OpticsOptions& options) {
    const DetectorSlit slit{x, b};
    return {overlap_r(SlitIndex::Plus, slit, geom, opt, options),
            overlap_r(SlitIndex::Minus, slit, geom, opt, options)};
}

// Linear interpolation of the half-maximum crossing between samples i and j.
double crossing(const FringePattern& p, std::size_t i, std::size_t j, double level) {
    const double r0 = p.rate[i], r1 = p.rate[j];
    if (r0 == r1) return p.signal_x[i];
    return p.signal_x[i] + (level - r0) * (p.signal_x[j] - p.signal_x[i]) / (r1 - r0);
}

}  // namespace

FringePattern fringe_pattern(const DensityMatrix& rho, double idler_x, const FringeScan& scan, double b,
                             const SlitGeometry& geom, const OpticalParams& opt, const OpticsOptions& options) {
    if (scan.points < 2 || !(scan.to > scan.from)) throw ValidationError("scan: need from < to and at least 2 points");
    if (std::abs(scan.from) > options.window || std::abs(scan.to) > options.window) {
        throw ValidationError("scan: range exceeds the detection window");
    }
    if (std::abs(idler_x) > options.window) throw ValidationError("idler_x: outside the detection window");

    const auto idler = kernels(idler_x, b, geom, opt, options);
    const Matrix4c& m = rho.matrix();

    FringePattern out;
    out.idler_x = idler_x;
    out.signal_x.reserve(scan.points);
    out.rate.reserve(scan.points);
    for (int n = 0; n < scan.points; ++n) {
        const double x = scan.from + (scan.to - scan.from) * n / (scan.points - 1);
        const auto signal = kernels(x, b, geom, opt, options);
        Vector4c v;
        for (int s = 0; s < 2; ++s) {
            for (int i = 0; i < 2; ++i) v(2 * s + i) = signal[s] * idler[i];
        }
        // v^T rho conj(v)
        const Complex rate = v.transpose() * m * v.conjugate();
        out.signal_x.push_back(x);
        out.rate.push_back(rate.real());
    }
    return out;
}

FringeFeatures analyze_fringe(const FringePattern& p, double half_period) {
    const std::size_t n = p.rate.size();
    if (n < 3) throw ValidationError("pattern: need at least 3 samples");
    const auto top = static_cast<std::size_t>(std::max_element(p.rate.begin(), p.rate.end()) - p.rate.begin());

    FringeFeatures f;
    f.peak_x = p.signal_x[top];
    f.peak_rate = p.rate[top];
    if (top > 0 && top + 1 < n) {
        const double y0 = p.rate[top - 1], y1 = p.rate[top], y2 = p.rate[top + 1];
        const double curvature = y0 - 2.0 * y1 + y2;
        if (curvature < 0.0) {
            const double shift = 0.5 * (y0 - y2) / curvature;
            const double h = p.signal_x[top + 1] - p.signal_x[top];
            f.peak_x += shift * h;
            f.peak_rate = y1 - 0.25 * (y0 - y2) * shift;
        }
    }

    const double half = 0.5 * p.rate[top];
    std::size_t lo = top, hi = top;
    while (lo > 0 && p.rate[lo] > half) --lo;
    while (hi + 1 < n && p.rate[hi] > half) ++hi;
    const double left = p.rate[lo] > half ? p.signal_x.front() : crossing(p, lo, lo + 1, half);
    const double right = p.rate[hi] > half ? p.signal_x.back() : crossing(p, hi - 1, hi, half);
    f.fwhm = right - left;

    double minimum = p.rate[top];
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(p.signal_x[i] - f.peak_x) <= half_period) minimum = std::min(minimum, p.rate[i]);
    }
    minimum = std::max(minimum, 0.0);
    f.visibility = (f.peak_rate - minimum) / (f.peak_rate + minimum);
    return f;
}

std::string fringe_csv(const std::vector<FringePattern>& patterns) {
    std::ostringstream out;
    out << std::setprecision(17) << "idler_x,signal_x,rate\n";
    for (const auto& p : patterns) {
        for (std::size_t i = 0; i < p.rate.size(); ++i) {
            out << p.idler_x << ',' << p.signal_x[i] << ',' << p.rate[i] << '\n';
        }
    }
    return out.str();
}

std::string histogram_csv(const DensityMatrix& measured, const DensityMatrix& decomposed,
                          const DensityMatrix& predicted) {
    std::ostringstream out;
    out << std::setprecision(17) << "panel,row,col,value\n";
    const std::array<std::pair<const char*, const DensityMatrix*>, 3> panels = {
        {{"measured", &measured}, {"decomposed", &decomposed}, {"predicted", &predicted}}};
    for (const auto& [name, rho] : panels) {
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) {
                out << name << ',' << kBasisLabels[j] << ',' << kBasisLabels[k] << ',' << (*rho)(j, k).real() << '\n';
            }
        }
    }
    return out.str();
}

}  // namespace spatialqt
