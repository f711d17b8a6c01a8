#include "spatialqt/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spatialqt/error.hpp"

namespace spatialqt {
namespace {

double gaussian(double x, double width) { return std::exp(-(x * x) / (width * width)); }

// Logical slit value l in {+1/2, -1/2} for a basis bit.
double slit_value(int bit) { return bit == 0 ? 0.5 : -0.5; }

}  // namespace

PumpProfile PumpProfile::focused(double width) {
    if (!(width > 0.0)) throw ValidationError("pump.width: must be positive");
    return {PumpKind::Focused, width, {}};
}

PumpProfile PumpProfile::broad(double width) {
    if (!(width > 0.0)) throw ValidationError("pump.width: must be positive");
    return {PumpKind::Broad, width, {}};
}

PumpProfile PumpProfile::from_function(std::function<Complex(double)> amplitude) {
    if (!amplitude) throw ValidationError("pump: custom profile requires a callable");
    return {PumpKind::Custom, 0.0, std::move(amplitude)};
}

Complex PumpProfile::amplitude(double x) const {
    switch (kind) {
        case PumpKind::Focused:
        case PumpKind::Broad:
            return gaussian(x, width);
        case PumpKind::Custom:
            return custom(x);
    }
    return 0.0;
}

PureState2Q::PureState2Q(const std::array<Complex, 4>& coeffs) : coeffs_(coeffs) {
    double norm2 = 0.0;
    for (const auto& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw ValidationError("state.coefficients: non-finite amplitude");
        }
        norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "state.coefficients: norm^2 = " << norm2 << " differs from 1";
        throw ValidationError(msg.str());
    }
}

PureState2Q PureState2Q::normalized(const std::array<Complex, 4>& coeffs) {
    double norm2 = 0.0;
    for (const auto& c : coeffs) norm2 += std::norm(c);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw ValidationError("state.coefficients: cannot normalize a zero or non-finite vector");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::array<Complex, 4> out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = coeffs[i] * inv;
    return PureState2Q(out);
}

Vector4c PureState2Q::vector() const { return Vector4c(coeffs_[0], coeffs_[1], coeffs_[2], coeffs_[3]); }

PureState2Q PureState2Q::with_canonical_phase() const {
    double largest = 0.0;
    for (const auto& c : coeffs_) largest = std::max(largest, std::abs(c));
    std::size_t pivot = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (std::abs(coeffs_[i]) >= largest * (1.0 - 1e-12)) {
            pivot = i;
            break;
        }
    }
    if (coeffs_[pivot].imag() == 0.0 && coeffs_[pivot].real() > 0.0) return *this;
    const Complex rotation = std::conj(coeffs_[pivot]) / std::abs(coeffs_[pivot]);
    std::array<Complex, 4> out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = coeffs_[i] * rotation;
    out[pivot] = std::abs(coeffs_[pivot]);
    return PureState2Q::normalized(out);
}

DensityMatrix::DensityMatrix(const Matrix4c& m, double tol) : m_(m) {
    if (!m_.allFinite()) throw ValidationError("rho: non-finite entry");
    const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        std::ostringstream msg;
        msg << "rho: not Hermitian (max |rho_jk - conj(rho_kj)| = " << asym << ")";
        throw ValidationError(msg.str());
    }
    const Complex trace = m_.trace();
    if (std::abs(trace - 1.0) > tol) {
        std::ostringstream msg;
        msg << "rho: trace " << trace.real() << " differs from 1";
        throw ValidationError(msg.str());
    }
    // Store the exactly Hermitian part.
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

DensityMatrix DensityMatrix::projector(const PureState2Q& state) {
    const Vector4c v = state.vector();
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Matrix4c::Identity() * 0.25); }

std::array<double, 4> DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(m_, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev(3), ev(2), ev(1), ev(0)};
}

bool DensityMatrix::is_physical(double tol) const { return eigenvalues()[3] >= -tol; }

PureState2Q generate_pure_state(const PumpProfile& pump, const SlitGeometry& geom, const OpticalParams& opt) {
    geom.validate();
    const double phase_scale = opt.k_pump() * geom.d * geom.d / (8.0 * geom.z_a);
    std::array<Complex, 4> coeffs;
    bool any = false;
    for (int ls = 0; ls < 2; ++ls) {
        for (int li = 0; li < 2; ++li) {
            const double l = slit_value(ls);
            const double m = slit_value(li);
            const Complex w = pump.amplitude((l + m) * geom.d / 2.0);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
                throw ValidationError("pump: profile is not finite on the slit supports");
            }
            coeffs[2 * ls + li] = w * std::exp(Complex(0.0, phase_scale * (m - l) * (m - l)));
            any = any || std::abs(coeffs[2 * ls + li]) > 0.0;
        }
    }
    if (!any) {
        throw DegeneratePumpError("pump vanishes at every slit-pair midpoint; no state is produced");
    }
    return PureState2Q::normalized(coeffs).with_canonical_phase();
}

double arm_phase(const SlitGeometry& geom, const OpticalParams& opt) {
    return opt.k_pump() * geom.d * geom.d / (8.0 * geom.z_a);
}

DensityMatrix mix_states(std::span<const double> weights, std::span<const PureState2Q> states) {
    if (weights.size() != states.size()) {
        throw ValidationError("mixture: weights and states have different lengths");
    }
    if (weights.empty()) throw ValidationError("mixture: no components");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ValidationError("mixture.weights: must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "mixture.weights: sum " << sum << " differs from 1";
        throw ValidationError(msg.str());
    }
    Matrix4c rho = Matrix4c::Zero();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const Vector4c v = states[i].vector();
        rho += weights[i] * (v * v.adjoint());
    }
    // Absorb the <= 1e-9 weight-sum slack so the trace invariant holds tightly.
    rho /= rho.trace().real();
    return DensityMatrix(rho);
}

double frobenius_distance(const DensityMatrix& lhs, const DensityMatrix& rhs) {
    return (lhs.matrix() - rhs.matrix()).norm();
}

}  // namespace spatialqt
