#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatialqt/optics.hpp"
#include "spatialqt/state.hpp"

namespace spatialqt {

using Matrix2c = Eigen::Matrix2cd;

enum class Basis { X, Y, Z };

char basis_char(Basis b);
Basis parse_basis(char c);

struct BasisSetting {
    Basis signal = Basis::Z;
    Basis idler = Basis::Z;

    std::string label() const;  ///< e.g. "XZ"
    static BasisSetting parse(const std::string& label);

    auto operator<=>(const BasisSetting&) const = default;
};

/// The nine settings in row-major order XX, XY, XZ, YX, ..., ZZ.
std::array<BasisSetting, 9> all_settings();

/// Detector outcome within a setting: k = 0 or 1 per mode. In the Z basis
/// outcome 0 is slit + and outcome 1 is slit -.
struct Outcome {
    int signal = 0;
    int idler = 0;
    int index() const { return 2 * signal + idler; }
};

/// Detector-slit positions in the detection plane for each basis.
struct SlitPlan {
    double delta = 1.376e-3;
    double detector_half_width = 0.05e-3;
    std::array<double, 2> x_positions{0.0, 1.376e-3};
    std::array<double, 2> y_positions{-0.688e-3, 0.688e-3};
    std::array<double, 2> z_positions{-100e-6, 100e-6};  ///< image plane, informational

    /// X plan (0, delta), Y plan (-delta/2, delta/2), Z plan (-100 um, +100 um).
    static SlitPlan standard(double delta, double detector_half_width);

    const std::array<double, 2>& positions(Basis b) const;
    /// Throws PlanningError unless |x1 - x0| > 4b for X and Y.
    void validate() const;
};

/// 2x2 map from source slits (columns +, -) to detector-slit outcomes (rows 0, 1).
struct EffectiveTransform {
    Basis basis = Basis::Z;
    Matrix2c matrix = Matrix2c::Identity();  ///< orthonormalized transform used by the model
    Matrix2c raw = Matrix2c::Identity();     ///< r_l(x_k) as computed
    double raw_condition_number = 1.0;
    double raw_row_overlap = 0.0;  ///< |<u0|u1>| of the normalized raw rows

    /// theta with cos(theta) = |U_{0,+}|.
    double mixing_angle() const;
};

/// Builds the effective transform for one basis. Z is exactly the identity.
/// For X and Y the rows r(x_k) = (r_+(x_k), r_-(x_k)) are normalized and then
/// symmetrically (Loewdin) orthonormalized: U = (V V^dag)^{-1/2} V.
/// Throws PlanningError for a singular or degenerate plan.
EffectiveTransform effective_transform(Basis basis, const SlitPlan& plan, const SlitGeometry& geom,
                                       const OpticalParams& opt, const OpticsOptions& options = {});

/// Number of real parameters of a 4x4 Hermitian matrix.
inline constexpr int kParameterCount = 16;
/// Number of (setting, outcome) probabilities in a full measurement.
inline constexpr int kProbabilityCount = 36;

using ParameterVector = Eigen::Matrix<double, kParameterCount, 1>;
using DesignMatrix = Eigen::Matrix<double, kProbabilityCount, kParameterCount>;

/// Off-diagonal pairs (j < k) in parameter order.
inline constexpr std::array<std::array<int, 2>, 6> kOffDiagonalPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// rho -> (rho_00..rho_33, Re rho_01, Im rho_01, Re rho_02, ...).
ParameterVector to_parameters(const Matrix4c& rho);
Matrix4c from_parameters(const ParameterVector& params);

/// Precomputed transforms for X, Y and Z, shared by probability evaluation,
/// simulation and inversion.
class MeasurementModel {
public:
    MeasurementModel(const SlitPlan& plan, const SlitGeometry& geom, const OpticalParams& opt,
                     const OpticsOptions& options = {});
    /// Direct construction from transforms (tests, idealized plans).
    MeasurementModel(const EffectiveTransform& x, const EffectiveTransform& y);

    const EffectiveTransform& transform(Basis b) const;
    Eigen::Matrix4cd local_transform(const BasisSetting& setting) const;  ///< U_s (x) U_i

    /// Diagonal of (U_s (x) U_i) rho (U_s (x) U_i)^dag, outcome order (0,0),(0,1),(1,0),(1,1).
    std::array<double, 4> probabilities(const Matrix4c& rho, const BasisSetting& setting) const;

    /// Row 4*setting_index + outcome_index maps the 16 parameters to that probability.
    const DesignMatrix& design_matrix() const { return design_; }
    /// sigma_max / sigma_min of the design matrix.
    double condition_number() const { return condition_number_; }

private:
    void build_design();

    EffectiveTransform x_;
    EffectiveTransform y_;
    EffectiveTransform z_;
    DesignMatrix design_;
    double condition_number_ = 0.0;
};

double coincidence_probability(const DensityMatrix& rho, const BasisSetting& setting, const MeasurementModel& model,
                               const Outcome& outcome);

enum class NoiseModel { Multinomial, Poisson };

NoiseModel parse_noise_model(const std::string& name);
std::string to_string(NoiseModel noise);

struct CountsRecord {
    BasisSetting setting;
    std::array<std::uint64_t, 4> counts{};  ///< outcome order (0,0),(0,1),(1,0),(1,1)
    std::uint64_t total = 0;                ///< counts requested for the setting
    std::uint64_t seed = 0;

    std::uint64_t observed() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

/// Draws coincidence counts for each setting from the exact probabilities.
/// Every setting gets its own generator seeded from (seed, setting), so the
/// output depends only on the arguments.
std::vector<CountsRecord> simulate_counts(const DensityMatrix& rho, const std::vector<BasisSetting>& settings,
                                          const MeasurementModel& model, std::uint64_t total_per_setting,
                                          std::uint64_t seed, NoiseModel noise = NoiseModel::Multinomial);

/// Same, from explicit per-setting probabilities (used by the bootstrap).
CountsRecord sample_counts(const BasisSetting& setting, const std::array<double, 4>& probabilities,
                           std::uint64_t total, std::uint64_t seed, NoiseModel noise);

}  // namespace spatialqt
