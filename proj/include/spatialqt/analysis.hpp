#pragma once

#include <string>
#include <vector>

#include "spatialqt/optics.hpp"
#include "spatialqt/state.hpp"

namespace spatialqt {

struct FringeScan {
    double from = -3e-3;
    double to = 3e-3;
    int points = 241;
};

struct FringePattern {
    double idler_x = 0.0;
    std::vector<double> signal_x;
    std::vector<double> rate;  ///< coincidence rate, arbitrary units
};

/// Coincidence rate sum_jk rho_jk v_j conj(v_k) with v = r(x_s) (x) r(x_i),
/// scanned over the signal detector with the idler detector held at idler_x.
/// Both detectors have half-width b. Throws ValidationError when the scan or
/// the idler position leaves the configured window.
FringePattern fringe_pattern(const DensityMatrix& rho, double idler_x, const FringeScan& scan, double b,
                             const SlitGeometry& geom, const OpticalParams& opt, const OpticsOptions& options = {});

struct FringeFeatures {
    double peak_x = 0.0;     ///< parabola-refined position of the global maximum
    double peak_rate = 0.0;
    double fwhm = 0.0;       ///< full width at half maximum of the peak
    double visibility = 0.0; ///< (max - min) / (max + min) within one half period of the peak
};

/// `half_period` is the distance from a maximum to the neighbouring minimum,
/// i.e. the plan spacing.
FringeFeatures analyze_fringe(const FringePattern& pattern, double half_period);

/// Columns idler_x,signal_x,rate.
std::string fringe_csv(const std::vector<FringePattern>& patterns);

/// Real parts of the three matrices in long format: panel,row,col,value.
std::string histogram_csv(const DensityMatrix& measured, const DensityMatrix& decomposed,
                          const DensityMatrix& predicted);

}  // namespace spatialqt
