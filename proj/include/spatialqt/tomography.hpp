#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatialqt/measurement.hpp"
#include "spatialqt/state.hpp"

namespace spatialqt {

/// Per-setting outcome frequencies (counts divided by the setting's total).
using SettingFrequencies = std::map<BasisSetting, std::array<double, 4>>;

/// Throws InsufficientDataError for a setting with no counts.
SettingFrequencies normalized_frequencies(const std::vector<CountsRecord>& records);
SettingFrequencies exact_frequencies(const DensityMatrix& rho, const MeasurementModel& model);
std::vector<BasisSetting> missing_settings(const SettingFrequencies& freqs);

/// Z(x)Z counts normalized to (rho_++++, rho_+-+-, rho_-+-+, rho_----).
std::array<double, 4> reconstruct_diagonals(const CountsRecord& counts_zz);

/// Off-diagonal elements rho_jk (j < k) in kOffDiagonalPairs order.
using OffDiagonals = std::array<Complex, 6>;

/// Closed-form, exactly determined inversion. Each single-flip element is
/// solved from outcome 0 of the X- and Y-family settings with the other
/// qubit in Z; for a transform row (cos t, sin t e^{i chi}) this reduces to
///   Re rho_{++,-+} = (p_{0+}^{(x,z)} - rho_{++++} cos^2 t_x - rho_{-+-+} sin^2 t_x) / sin 2t_x
/// and its Y analogue for the imaginary part. The two double-flip elements
/// come from outcome (0,0) of XX, XY, YX, YY.
/// Throws IllConditionedPlanError when a system is singular (sin 2t ~ 0).
OffDiagonals invert_offdiagonal(const SettingFrequencies& freqs, const MeasurementModel& model,
                                const std::array<double, 4>& diagonals);

/// Least-squares solve of all 36 frequencies for the 16 real parameters.
ParameterVector least_squares_parameters(const SettingFrequencies& freqs, const MeasurementModel& model);

struct SchwarzViolation {
    int row = 0;
    int col = 0;
    double modulus = 0.0;  ///< |rho_jk|
    double bound = 0.0;    ///< sqrt(rho_jj rho_kk)
};

/// Pairs j < k with |rho_jk|^2 > rho_jj rho_kk + 1e-12.
std::vector<SchwarzViolation> schwarz_check(const Matrix4c& rho);

struct TomographyResult {
    DensityMatrix rho = DensityMatrix::maximally_mixed();
    std::vector<SchwarzViolation> schwarz_violations;
    std::array<double, 4> eigenvalues{};  ///< descending
    double condition_number = 0.0;
    double hermiticity_defect = 0.0;  ///< max |m_jk - conj(m_kj)| before hermitization
    std::optional<Eigen::Matrix4d> error_real;
    std::optional<Eigen::Matrix4d> error_imag;

    bool physical(double tol = 1e-12) const { return eigenvalues[3] >= -tol; }
};

/// Builds the Hermitian matrix from its 16 real parameters and runs the
/// diagnostics. A trace within 1e-6 of one is renormalized; larger deviations
/// throw InconsistentInputError.
TomographyResult assemble(const std::array<double, 4>& diagonals, const OffDiagonals& offdiagonals);

/// Same for a full (possibly slightly non-Hermitian) matrix; the asymmetry is
/// kept in hermiticity_defect.
TomographyResult assemble_matrix(const Matrix4c& m);

enum class InversionMethod { ClosedForm, LeastSquares };

/// Counts for all nine settings -> result. Lists missing settings in the
/// InsufficientDataError message.
TomographyResult reconstruct(const std::vector<CountsRecord>& records, const MeasurementModel& model,
                             InversionMethod method = InversionMethod::LeastSquares);
TomographyResult reconstruct(const SettingFrequencies& freqs, const MeasurementModel& model,
                             InversionMethod method = InversionMethod::LeastSquares);

/// Nearest unit-trace positive semidefinite matrix in Frobenius norm: the
/// spectrum is projected onto the probability simplex.
DensityMatrix project_physical(const DensityMatrix& rho);

/// Euclidean projection of `values` onto {p : p >= 0, sum p = 1}.
std::array<double, 4> project_to_simplex(const std::array<double, 4>& values);

/// (tr sqrt(sqrt(a) b sqrt(a)))^2. Both inputs must be physical; otherwise
/// ValidationError (project them with project_physical first).
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double purity(const DensityMatrix& rho);

struct Decomposition {
    std::array<double, 2> weights{1.0, 0.0};
    std::array<PureState2Q, 2> components{PureState2Q({1.0, 0.0, 0.0, 0.0}), PureState2Q({1.0, 0.0, 0.0, 0.0})};
    double residual = 0.0;  ///< Frobenius distance input <-> recomposition
    bool ambiguous = false; ///< top-two eigenvalues closer than 1e-9

    double dominant_weight() const { return std::max(weights[0], weights[1]); }
    DensityMatrix recomposed() const;
};

/// Top-two eigenpairs of the physical projection, weights renormalized.
Decomposition decompose_two_component(const DensityMatrix& rho);

/// Two-component pure mixture whose second component is the state in the
/// support of the rank-2 truncation closest to `reference`; its weight is the
/// largest admissible one, 1 / <psi| rho^+ |psi>, which leaves a pure
/// remainder as the first component. Recovers the generating weights of a
/// mixture of two non-orthogonal states.
Decomposition decompose_with_reference(const DensityMatrix& rho, const PureState2Q& reference);

struct BootstrapErrors {
    Eigen::Matrix4d real = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d imag = Eigen::Matrix4d::Zero();
    int resamples = 0;
};

/// Parametric bootstrap: counts are redrawn from the least-squares fitted
/// probabilities and re-inverted. Resample i uses a seed derived from
/// (seed, i) only, so results do not depend on evaluation order.
BootstrapErrors bootstrap_errors(const std::vector<CountsRecord>& records, const MeasurementModel& model,
                                 int resamples, std::uint64_t seed, NoiseModel noise = NoiseModel::Multinomial);

/// Derives the i-th independent stream seed from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Terminal rendering in the printed-matrix layout ("0.083 + 0.004i").
std::string pretty_matrix(const Matrix4c& rho, int precision = 3);

}  // namespace spatialqt
