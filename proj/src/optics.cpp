#include "spatialqt/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spatialqt/error.hpp"

namespace spatialqt {
namespace {

constexpr Complex kI{0.0, 1.0};

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

void require_finite(const Complex& value, const char* what) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw NumericalError(std::string(what) + " produced a non-finite amplitude");
    }
}

void check_window(double x, const OpticsOptions& options, const char* field) {
    if (!(std::abs(x) <= options.window)) {
        std::ostringstream msg;
        msg << field << " = " << x << " m lies outside the configured window |x| <= " << options.window
            << " m";
        throw ValidationError(msg.str());
    }
}

// exp(-i pi/4) / sqrt(i) normalization shared by g and r.
Complex inverse_sqrt_i() { return std::exp(Complex(0.0, -std::numbers::pi / 4.0)); }

// Int_{-1}^{1} exp(i (y + a t)^2 / (4 alpha)) dt
Complex aperture_integral(double y, double a, double alpha, const QuadratureOptions& quad) {
    const double scale = 1.0 / (4.0 * alpha);
    auto integrand = [&](double t) {
        const double u = y + a * t;
        return std::exp(kI * (u * u * scale));
    };
    return integrate(integrand, -1.0, 1.0, quad).value;
}

}  // namespace

void SlitGeometry::validate() const {
    if (slit_count != 2) {
        throw ValidationError("geometry.slit_count: only double slits (2) are supported");
    }
    if (!(a > 0.0)) throw ValidationError("geometry.a: slit half-width must be positive");
    if (!(d > 2.0 * a)) throw ValidationError("geometry.d: slit spacing must exceed the slit width 2a");
    if (!(z_a > 0.0)) throw ValidationError("geometry.z_A: aperture plane must be positive");
}

double OpticalParams::k_pump() const { return 2.0 * std::numbers::pi / lambda_pump; }
double OpticalParams::k_down() const { return 2.0 * std::numbers::pi / lambda_down; }

void OpticalParams::validate(const SlitGeometry& geom) const {
    if (!(lambda_pump > 0.0)) throw ValidationError("optics.lambda_pump: must be positive");
    if (!(lambda_down > 0.0)) throw ValidationError("optics.lambda_down: must be positive");
    if (!(z > geom.z_a)) throw ValidationError("optics.z: detection plane must lie beyond z_A");
}

double slit_center(SlitIndex slit, const SlitGeometry& geom) {
    return slit == SlitIndex::Plus ? 0.5 * geom.d : -0.5 * geom.d;
}

double propagation_scale(const SlitGeometry& geom, const OpticalParams& opt) {
    return (opt.z - geom.z_a) / (2.0 * opt.k_down());
}

double plan_spacing(const SlitGeometry& geom, const OpticalParams& opt) {
    return 2.0 * std::numbers::pi * propagation_scale(geom, opt) / geom.d;
}

double detection_plane_for_spacing(const SlitGeometry& geom, double lambda_down, double delta) {
    const double k = 2.0 * std::numbers::pi / lambda_down;
    const double alpha = delta * geom.d / (2.0 * std::numbers::pi);
    return geom.z_a + 2.0 * k * alpha;
}

Complex propagate_slit_mode(SlitIndex slit, const SlitGeometry& geom, const OpticalParams& opt,
                            double x, const OpticsOptions& options) {
    geom.validate();
    opt.validate(geom);
    check_window(x, options, "x");
    const double alpha = propagation_scale(geom, opt);
    const double y = x - slit_center(slit, geom);
    const Complex prefactor = 0.5 * std::sqrt(geom.a / (2.0 * std::numbers::pi * alpha)) * inverse_sqrt_i();
    const Complex value = prefactor * aperture_integral(y, geom.a, alpha, options.quadrature);
    require_finite(value, "propagate_slit_mode");
    return value;
}

Complex overlap_r(SlitIndex slit, const DetectorSlit& detector, const SlitGeometry& geom,
                  const OpticalParams& opt, const OpticsOptions& options) {
    geom.validate();
    opt.validate(geom);
    if (!(detector.b > 0.0)) throw ValidationError("detector.b: half-width must be positive");
    check_window(detector.x, options, "detector.x");
    const double alpha = propagation_scale(geom, opt);
    const double y0 = detector.x - slit_center(slit, geom);

    // Outer integral over the detector aperture x = x_k + b u; the inner
    // tolerance is tightened so its error stays below the outer budget.
    QuadratureOptions inner = options.quadrature;
    inner.abs_tol *= 0.1;
    inner.rel_tol *= 0.1;
    auto outer = [&](double u) { return aperture_integral(y0 + detector.b * u, geom.a, alpha, inner); };
    const Complex value = 0.25 * integrate(outer, -1.0, 1.0, options.quadrature).value;
    require_finite(value, "overlap_r");
    return value;
}

Complex overlap_r_closed_form(SlitIndex slit, const DetectorSlit& detector, const SlitGeometry& geom,
                              const OpticalParams& opt) {
    const double alpha = propagation_scale(geom, opt);
    const double y = detector.x - slit_center(slit, geom);
    const double envelope = sinc(geom.a * y / (2.0 * alpha)) * sinc(detector.b * y / (2.0 * alpha));
    return std::exp(kI * (y * y / (4.0 * alpha))) * envelope;
}

double fstate_overlap(const DetectorSlit& slit0, const DetectorSlit& slit1, const SlitGeometry& geom,
                      const OpticalParams& opt, const OpticsOptions& options) {
    geom.validate();
    opt.validate(geom);
    if (!(slit0.b > 0.0) || !(slit1.b > 0.0)) {
        throw ValidationError("detector.b: half-width must be positive");
    }
    const double lo = std::max(slit0.x - slit0.b, slit1.x - slit1.b);
    const double hi = std::min(slit0.x + slit0.b, slit1.x + slit1.b);
    if (hi <= lo) return 0.0;

    const double alpha = propagation_scale(geom, opt);
    const double tilt0 = slit0.x / (2.0 * alpha);
    const double tilt1 = slit1.x / (2.0 * alpha);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    auto integrand = [&](double t) {
        const double x = mid + half * t;
        return std::exp(kI * (tilt1 * (x - slit1.x) - tilt0 * (x - slit0.x)));
    };
    const Complex inner = half * integrate(integrand, -1.0, 1.0, options.quadrature).value;
    return std::abs(inner) / (2.0 * std::sqrt(slit0.b * slit1.b));
}

}  // namespace spatialqt
