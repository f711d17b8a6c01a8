#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "spatialqt/optics.hpp"

namespace spatialqt {

using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

/// Two-qubit slit basis, fixed order: index = 2 * signal + idler with + -> 0, - -> 1.
inline constexpr std::array<std::string_view, 4> kBasisLabels = {"++", "+-", "-+", "--"};

enum class PumpKind { Focused, Broad, Custom };

/// Transverse pump amplitude W(xi; z_A) at the aperture plane.
struct PumpProfile {
    PumpKind kind = PumpKind::Focused;
    double width = 20e-6;  ///< 1/e^2 intensity radius for the Gaussian built-ins [m]
    std::function<Complex(double)> custom;

    static PumpProfile focused(double width);
    static PumpProfile broad(double width);
    static PumpProfile from_function(std::function<Complex(double)> amplitude);

    Complex amplitude(double x) const;
};

/// Normalized pure state over {|++>, |+->, |-+>, |-->}.
class PureState2Q {
public:
    /// Throws ValidationError unless the norm is 1 within 1e-12.
    explicit PureState2Q(const std::array<Complex, 4>& coeffs);

    /// Scales `coeffs` to unit norm; throws ValidationError on a zero vector.
    static PureState2Q normalized(const std::array<Complex, 4>& coeffs);

    const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
    const std::array<Complex, 4>& coefficients() const { return coeffs_; }
    Vector4c vector() const;

    /// Same ray, global phase fixed so the largest-modulus coefficient (first
    /// one on ties) is real and positive.
    PureState2Q with_canonical_phase() const;

    friend bool operator==(const PureState2Q&, const PureState2Q&) = default;

private:
    std::array<Complex, 4> coeffs_;
};

/// 4x4 Hermitian, unit-trace matrix. Positivity is a diagnostic, not an
/// invariant: reconstructed matrices can have negative eigenvalues.
class DensityMatrix {
public:
    /// Throws ValidationError unless Hermitian and trace 1 within `tol`.
    explicit DensityMatrix(const Matrix4c& m, double tol = 1e-12);

    static DensityMatrix projector(const PureState2Q& state);
    static DensityMatrix maximally_mixed();

    const Matrix4c& matrix() const { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }

    /// Eigenvalues in descending order.
    std::array<double, 4> eigenvalues() const;
    bool is_physical(double tol = 1e-12) const;

private:
    Matrix4c m_;
};

/// Coefficient at (l, m) proportional to W[(l+m)d/2; z_A] exp(i k d^2 (m-l)^2 / (8 z_A)),
/// k the pump wavenumber, normalized and phase-canonicalized.
PureState2Q generate_pure_state(const PumpProfile& pump, const SlitGeometry& geom, const OpticalParams& opt);

/// phi = k_pump d^2 / (8 z_A).
double arm_phase(const SlitGeometry& geom, const OpticalParams& opt);

/// sum_i w_i |psi_i><psi_i|. Weights must be non-negative and sum to 1 within 1e-9.
DensityMatrix mix_states(std::span<const double> weights, std::span<const PureState2Q> states);

double frobenius_distance(const DensityMatrix& lhs, const DensityMatrix& rhs);

}  // namespace spatialqt
