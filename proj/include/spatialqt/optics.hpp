#pragma once

#include <complex>

#include "spatialqt/quadrature.hpp"

namespace spatialqt {

using Complex = std::complex<double>;

/// Double-slit aperture at the plane z_A. Lengths in metres.
struct SlitGeometry {
    int slit_count = 2;
    double d = 0.18e-3;    ///< centre-to-centre spacing
    double a = 0.045e-3;   ///< slit half-width
    double z_a = 0.200;    ///< aperture plane

    void validate() const;
};

/// Wavelengths and detection plane. The propagation scale alpha is always
/// derived from (z, z_A, k_down), never stored.
struct OpticalParams {
    double lambda_pump = 413e-9;
    double lambda_down = 826e-9;
    double z = 0.0;  ///< detection plane; see detection_plane_for_spacing()

    double k_pump() const;
    double k_down() const;
    void validate(const SlitGeometry& geom) const;
};

/// Transverse position and half-width of a slit in the detection plane.
struct DetectorSlit {
    double x = 0.0;
    double b = 0.05e-3;
};

/// Logical slit index; |+> is the slit centred at +d/2, |-> at -d/2.
enum class SlitIndex { Plus, Minus };

struct OpticsOptions {
    QuadratureOptions quadrature{};
    double window = 5e-3;  ///< |x| bound for detection-plane positions
};

double slit_center(SlitIndex slit, const SlitGeometry& geom);

/// alpha = (z - z_A) / (2 k) with k the down-converted wavenumber [m^2].
double propagation_scale(const SlitGeometry& geom, const OpticalParams& opt);

/// Detector-slit spacing at which the two source slits arrive with a relative
/// phase of pi: Delta = 2 pi alpha / d.
double plan_spacing(const SlitGeometry& geom, const OpticalParams& opt);

/// Inverse of plan_spacing(): the detection plane z giving spacing `delta`.
double detection_plane_for_spacing(const SlitGeometry& geom, double lambda_down, double delta);

/// Position-space amplitude <x|g_l> of the slit-l mode after free propagation
/// from z_A to z (global phase exp(-ik(z - z_A)) dropped).
///
/// The q-space Fresnel integral is carried out analytically over the Gaussian
/// chirp, leaving the finite aperture integral
///   g_l(x) = 1/2 sqrt(a / (2 pi i alpha)) * Int_{-1}^{1} exp(i (x - c_l + a t)^2 / (4 alpha)) dt,
/// which is evaluated by adaptive Gauss-Kronrod quadrature. Units m^-1/2.
Complex propagate_slit_mode(SlitIndex slit, const SlitGeometry& geom, const OpticalParams& opt,
                            double x, const OpticsOptions& options = {});

/// Kernel r_l coupling source slit l to a detector slit: the propagated mode
/// integrated over the detector aperture, normalized by 2b sqrt(a/(2 pi i alpha))
/// so that it is dimensionless and tends to the closed form below.
Complex overlap_r(SlitIndex slit, const DetectorSlit& detector, const SlitGeometry& geom,
                  const OpticalParams& opt, const OpticsOptions& options = {});

/// Far-field approximation of overlap_r:
///   exp(i y^2 / 4 alpha) sinc(a y / 2 alpha) sinc(b y / 2 alpha),  y = x - c_l.
Complex overlap_r_closed_form(SlitIndex slit, const DetectorSlit& detector, const SlitGeometry& geom,
                              const OpticalParams& opt);

/// |<f(x0)|f(x1)>| for the post-selected states behind two detector slits.
/// f(x_k) is the top-hat of half-width b_k at x_k carrying the local Fresnel
/// tilt exp(i x_k (x - x_k) / (2 alpha)).
double fstate_overlap(const DetectorSlit& slit0, const DetectorSlit& slit1, const SlitGeometry& geom,
                      const OpticalParams& opt, const OpticsOptions& options = {});

}  // namespace spatialqt
