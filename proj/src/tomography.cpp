#include "spatialqt/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "spatialqt/error.hpp"

namespace spatialqt {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSchwarzSlack = 1e-12;
constexpr double kTraceTolerance = 1e-6;
constexpr double kSingularThreshold = 1e-8;

int pair_index(int j, int k) {
    for (int n = 0; n < 6; ++n) {
        if (kOffDiagonalPairs[n][0] == j && kOffDiagonalPairs[n][1] == k) return n;
    }
    return -1;
}

struct Equation {
    BasisSetting setting;
    Outcome outcome;
};

struct InversionGroup {
    std::vector<int> pairs;  // indices into kOffDiagonalPairs
    std::vector<Equation> equations;
};

// Groups solved in order; later groups use the elements found by earlier ones.
std::vector<InversionGroup> inversion_groups() {
    using B = Basis;
    return {
        {{pair_index(0, 2)}, {{{B::X, B::Z}, {0, 0}}, {{B::Y, B::Z}, {0, 0}}}},
        {{pair_index(1, 3)}, {{{B::X, B::Z}, {0, 1}}, {{B::Y, B::Z}, {0, 1}}}},
        {{pair_index(0, 1)}, {{{B::Z, B::X}, {0, 0}}, {{B::Z, B::Y}, {0, 0}}}},
        {{pair_index(2, 3)}, {{{B::Z, B::X}, {1, 0}}, {{B::Z, B::Y}, {1, 0}}}},
        {{pair_index(0, 3), pair_index(1, 2)},
         {{{B::X, B::X}, {0, 0}}, {{B::X, B::Y}, {0, 0}}, {{B::Y, B::X}, {0, 0}}, {{B::Y, B::Y}, {0, 0}}}},
    };
}

const std::array<double, 4>& frequencies_for(const SettingFrequencies& freqs, const BasisSetting& s) {
    const auto it = freqs.find(s);
    if (it == freqs.end()) throw InsufficientDataError("missing setting " + s.label());
    return it->second;
}

std::string join_labels(const std::vector<BasisSetting>& settings) {
    std::string out;
    for (const auto& s : settings) {
        if (!out.empty()) out += ", ";
        out += s.label();
    }
    return out;
}

Eigen::SelfAdjointEigenSolver<Matrix4c> eigensolve(const Matrix4c& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix4c>(m);
}

Matrix4c hermitian_part(const Matrix4c& m) { return 0.5 * (m + m.adjoint()); }

// Eigenvalues at rounding level would otherwise contribute sqrt(1e-16) ~ 1e-8.
double clip_floor(const Eigen::Vector4d& ev) { return 1e-14 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300); }

// sqrt of a positive semidefinite Hermitian matrix (negative and rounding-level eigenvalues clipped).
Matrix4c psd_sqrt(const Matrix4c& m) {
    const auto solver = eigensolve(m);
    const Eigen::Vector4d& ev = solver.eigenvalues();
    const double floor = clip_floor(ev);
    const Eigen::Vector4d roots = ev.unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

PureState2Q state_from_vector(const Vector4c& v) {
    return PureState2Q::normalized({v(0), v(1), v(2), v(3)}).with_canonical_phase();
}

}  // namespace

SettingFrequencies normalized_frequencies(const std::vector<CountsRecord>& records) {
    SettingFrequencies out;
    for (const auto& rec : records) {
        const auto n = rec.observed();
        if (n == 0) throw InsufficientDataError("setting " + rec.setting.label() + " recorded no coincidences");
        std::array<double, 4> f{};
        for (int i = 0; i < 4; ++i) f[i] = static_cast<double>(rec.counts[i]) / static_cast<double>(n);
        if (!out.emplace(rec.setting, f).second) {
            throw InconsistentInputError("setting " + rec.setting.label() + " appears more than once");
        }
    }
    return out;
}

SettingFrequencies exact_frequencies(const DensityMatrix& rho, const MeasurementModel& model) {
    SettingFrequencies out;
    for (const auto& s : all_settings()) out[s] = model.probabilities(rho.matrix(), s);
    return out;
}

std::vector<BasisSetting> missing_settings(const SettingFrequencies& freqs) {
    std::vector<BasisSetting> out;
    for (const auto& s : all_settings())
        if (!freqs.contains(s)) out.push_back(s);
    return out;
}

std::array<double, 4> reconstruct_diagonals(const CountsRecord& counts_zz) {
    if (counts_zz.setting != BasisSetting{Basis::Z, Basis::Z}) {
        throw ValidationError("diagonals: expected the ZZ setting, got " + counts_zz.setting.label());
    }
    const auto n = counts_zz.observed();
    if (n == 0) throw InsufficientDataError("diagonals: ZZ setting recorded no coincidences");
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = static_cast<double>(counts_zz.counts[i]) / static_cast<double>(n);
    return out;
}

OffDiagonals invert_offdiagonal(const SettingFrequencies& freqs, const MeasurementModel& model,
                                const std::array<double, 4>& diagonals) {
    OffDiagonals solved{};
    std::array<bool, 6> known{};

    for (const auto& group : inversion_groups()) {
        const int unknowns = 2 * static_cast<int>(group.pairs.size());
        const int rows = static_cast<int>(group.equations.size());
        MatrixXd a = MatrixXd::Zero(rows, unknowns);
        VectorXd rhs(rows);

        for (int e = 0; e < rows; ++e) {
            const auto& eq = group.equations[e];
            const Eigen::RowVector4cd t = model.local_transform(eq.setting).row(eq.outcome.index());
            double p = frequencies_for(freqs, eq.setting)[eq.outcome.index()];
            for (int i = 0; i < 4; ++i) p -= std::norm(t(i)) * diagonals[i];
            for (int n = 0; n < 6; ++n) {
                const auto [j, k] = kOffDiagonalPairs[n];
                const Complex w = t(j) * std::conj(t(k));
                const auto slot = std::find(group.pairs.begin(), group.pairs.end(), n);
                if (slot != group.pairs.end()) {
                    const int u = 2 * static_cast<int>(slot - group.pairs.begin());
                    a(e, u) = 2.0 * w.real();
                    a(e, u + 1) = -2.0 * w.imag();
                } else if (known[n]) {
                    p -= 2.0 * (w * solved[n]).real();
                }
            }
            rhs(e) = p;
        }

        Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > kSingularThreshold)) {
            std::ostringstream msg;
            msg << "inversion for element " << kBasisLabels[kOffDiagonalPairs[group.pairs[0]][0]] << ","
                << kBasisLabels[kOffDiagonalPairs[group.pairs[0]][1]]
                << " is ill-conditioned (smallest singular value " << sv(sv.size() - 1)
                << "; mixing angle near 0 or pi/2)";
            throw IllConditionedPlanError(msg.str());
        }
        const VectorXd x = svd.solve(rhs);
        for (std::size_t g = 0; g < group.pairs.size(); ++g) {
            solved[group.pairs[g]] = Complex(x(2 * g), x(2 * g + 1));
            known[group.pairs[g]] = true;
        }
    }
    return solved;
}

ParameterVector least_squares_parameters(const SettingFrequencies& freqs, const MeasurementModel& model) {
    const auto missing = missing_settings(freqs);
    if (!missing.empty()) throw InsufficientDataError("missing settings: " + join_labels(missing));
    Eigen::Matrix<double, kProbabilityCount, 1> y;
    const auto settings = all_settings();
    for (int s = 0; s < 9; ++s) {
        const auto& f = frequencies_for(freqs, settings[s]);
        for (int o = 0; o < 4; ++o) y(4 * s + o) = f[o];
    }
    return model.design_matrix().colPivHouseholderQr().solve(y);
}

std::vector<SchwarzViolation> schwarz_check(const Matrix4c& rho) {
    std::vector<SchwarzViolation> out;
    for (const auto& [j, k] : kOffDiagonalPairs) {
        const double diag = rho(j, j).real() * rho(k, k).real();
        const double mod2 = std::norm(rho(j, k));
        if (mod2 > diag + kSchwarzSlack) {
            out.push_back({j, k, std::sqrt(mod2), std::sqrt(std::max(0.0, diag))});
        }
    }
    return out;
}

TomographyResult assemble_matrix(const Matrix4c& m) {
    if (!m.allFinite()) throw InconsistentInputError("reconstructed matrix has non-finite entries");
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    Matrix4c h = hermitian_part(m);
    const double trace = h.trace().real();
    if (std::abs(trace - 1.0) > kTraceTolerance) {
        std::ostringstream msg;
        msg << "reconstructed trace " << trace << " deviates from 1 by more than " << kTraceTolerance;
        throw InconsistentInputError(msg.str());
    }
    h /= trace;

    TomographyResult result;
    result.rho = DensityMatrix(h);
    result.hermiticity_defect = defect;
    result.schwarz_violations = schwarz_check(result.rho.matrix());
    result.eigenvalues = result.rho.eigenvalues();
    return result;
}

TomographyResult assemble(const std::array<double, 4>& diagonals, const OffDiagonals& offdiagonals) {
    ParameterVector p;
    for (int i = 0; i < 4; ++i) p(i) = diagonals[i];
    for (int n = 0; n < 6; ++n) {
        p(4 + 2 * n) = offdiagonals[n].real();
        p(5 + 2 * n) = offdiagonals[n].imag();
    }
    return assemble_matrix(from_parameters(p));
}

TomographyResult reconstruct(const SettingFrequencies& freqs, const MeasurementModel& model,
                             InversionMethod method) {
    const auto missing = missing_settings(freqs);
    if (!missing.empty()) throw InsufficientDataError("missing settings: " + join_labels(missing));

    TomographyResult result;
    if (method == InversionMethod::ClosedForm) {
        const auto& zz = frequencies_for(freqs, {Basis::Z, Basis::Z});
        result = assemble(zz, invert_offdiagonal(freqs, model, zz));
    } else {
        result = assemble_matrix(from_parameters(least_squares_parameters(freqs, model)));
    }
    result.condition_number = model.condition_number();
    return result;
}

TomographyResult reconstruct(const std::vector<CountsRecord>& records, const MeasurementModel& model,
                             InversionMethod method) {
    return reconstruct(normalized_frequencies(records), model, method);
}

std::array<double, 4> project_to_simplex(const std::array<double, 4>& values) {
    std::array<double, 4> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double shift = 0.0;
    for (int j = 0; j < 4; ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / (j + 1);
        if (sorted[j] - candidate > 0.0) shift = candidate;
    }
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) out[i] = std::max(values[i] - shift, 0.0);
    return out;
}

DensityMatrix project_physical(const DensityMatrix& rho) {
    const auto solver = eigensolve(rho.matrix());
    const auto& ev = solver.eigenvalues();
    if (ev.minCoeff() >= 0.0) return rho;

    const auto p = project_to_simplex({ev(0), ev(1), ev(2), ev(3)});
    const Eigen::Vector4d weights(p[0], p[1], p[2], p[3]);
    Matrix4c out = solver.eigenvectors() * weights.asDiagonal() * solver.eigenvectors().adjoint();
    out = hermitian_part(out);
    out /= out.trace().real();
    return DensityMatrix(out);
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    constexpr double tol = 1e-9;
    if (!a.is_physical(tol) || !b.is_physical(tol)) {
        throw ValidationError("fidelity: input has negative eigenvalues; apply project_physical first");
    }
    const Matrix4c root = psd_sqrt(a.matrix());
    const Matrix4c inner = hermitian_part(root * b.matrix() * root);
    const Eigen::Vector4d ev = Eigen::SelfAdjointEigenSolver<Matrix4c>(inner, Eigen::EigenvaluesOnly).eigenvalues();
    const double floor = clip_floor(ev);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
    return std::clamp(sum * sum, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

DensityMatrix Decomposition::recomposed() const {
    return mix_states(std::span<const double>(weights), std::span<const PureState2Q>(components));
}

Decomposition decompose_two_component(const DensityMatrix& rho) {
    const DensityMatrix physical = project_physical(rho);
    const auto solver = eigensolve(physical.matrix());
    const auto& ev = solver.eigenvalues();
    const double top = std::max(0.0, ev(3));
    const double second = std::max(0.0, ev(2));

    Decomposition out;
    out.weights = {top / (top + second), second / (top + second)};
    out.components = {state_from_vector(solver.eigenvectors().col(3)),
                      state_from_vector(solver.eigenvectors().col(2))};
    out.ambiguous = (top - second) < 1e-9;
    out.residual = frobenius_distance(rho, out.recomposed());
    return out;
}

Decomposition decompose_with_reference(const DensityMatrix& rho, const PureState2Q& reference) {
    const DensityMatrix physical = project_physical(rho);
    const auto solver = eigensolve(physical.matrix());
    const auto& ev = solver.eigenvalues();
    const double l1 = std::max(0.0, ev(3));
    const double l2 = std::max(0.0, ev(2));
    const Vector4c e1 = solver.eigenvectors().col(3);
    const Vector4c e2 = solver.eigenvectors().col(2);
    const double norm = l1 + l2;

    Decomposition out;
    out.ambiguous = (l1 - l2) < 1e-9;
    if (l2 / norm < 1e-12) {
        out.weights = {1.0, 0.0};
        out.components = {state_from_vector(e1), reference.with_canonical_phase()};
        out.residual = frobenius_distance(rho, out.recomposed());
        return out;
    }

    const Vector4c ref = reference.vector();
    const Complex c1 = e1.dot(ref);
    const Complex c2 = e2.dot(ref);
    const double support = std::sqrt(std::norm(c1) + std::norm(c2));
    if (!(support > 1e-9)) {
        throw ValidationError("decomposition: reference state is orthogonal to the support of rho");
    }
    const Vector4c psi = (c1 * e1 + c2 * e2) / support;
    const double inverse_weight = (std::norm(c1) / l1 + std::norm(c2) / l2) * norm / (support * support);
    const double b = std::min(1.0, 1.0 / inverse_weight);

    Matrix4c rank2 = (l1 / norm) * e1 * e1.adjoint() + (l2 / norm) * e2 * e2.adjoint();
    const Matrix4c remainder = hermitian_part(rank2 - b * psi * psi.adjoint());
    const Eigen::SelfAdjointEigenSolver<Matrix4c> rem(remainder);

    out.weights = {1.0 - b, b};
    out.components = {state_from_vector(rem.eigenvectors().col(3)), state_from_vector(psi)};
    out.residual = frobenius_distance(rho, out.recomposed());
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over base + golden-ratio stride
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

BootstrapErrors bootstrap_errors(const std::vector<CountsRecord>& records, const MeasurementModel& model,
                                 int resamples, std::uint64_t seed, NoiseModel noise) {
    if (resamples < 2) throw ValidationError("bootstrap.resamples: need at least 2");
    const auto freqs = normalized_frequencies(records);
    const ParameterVector fitted = least_squares_parameters(freqs, model);
    const Eigen::Matrix<double, kProbabilityCount, 1> probs = model.design_matrix() * fitted;

    std::map<BasisSetting, std::uint64_t> totals;
    for (const auto& rec : records) totals[rec.setting] = rec.observed();

    const auto settings = all_settings();
    std::vector<ParameterVector> samples(resamples);
    for (int r = 0; r < resamples; ++r) {
        const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(r));
        SettingFrequencies resampled;
        for (int s = 0; s < 9; ++s) {
            const std::array<double, 4> p{probs(4 * s), probs(4 * s + 1), probs(4 * s + 2), probs(4 * s + 3)};
            const auto rec = sample_counts(settings[s], p, totals.at(settings[s]), stream, noise);
            resampled[settings[s]] = normalized_frequencies({rec}).begin()->second;
        }
        samples[r] = least_squares_parameters(resampled, model);
    }

    ParameterVector mean = ParameterVector::Zero();
    for (const auto& s : samples) mean += s;
    mean /= resamples;
    ParameterVector var = ParameterVector::Zero();
    for (const auto& s : samples) var += (s - mean).cwiseAbs2();
    var /= (resamples - 1);
    const ParameterVector sd = var.cwiseSqrt();

    BootstrapErrors out;
    out.resamples = resamples;
    for (int i = 0; i < 4; ++i) out.real(i, i) = sd(i);
    for (int n = 0; n < 6; ++n) {
        const auto [j, k] = kOffDiagonalPairs[n];
        out.real(j, k) = out.real(k, j) = sd(4 + 2 * n);
        out.imag(j, k) = out.imag(k, j) = sd(5 + 2 * n);
    }
    return out;
}

std::string pretty_matrix(const Matrix4c& rho, int precision) {
    auto format_entry = [precision](const Complex& c, bool diagonal) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(precision);
        if (diagonal) {
            os << c.real();
        } else {
            os << c.real() << (c.imag() < 0.0 ? " - " : " + ") << std::abs(c.imag()) << "i";
        }
        return os.str();
    };
    std::array<std::array<std::string, 4>, 4> cells;
    std::array<std::size_t, 4> width{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            cells[r][c] = format_entry(rho(r, c), r == c);
            width[c] = std::max(width[c], cells[r][c].size());
        }
    std::ostringstream os;
    for (int r = 0; r < 4; ++r) {
        os << "[ ";
        for (int c = 0; c < 4; ++c) {
            os << std::setw(static_cast<int>(width[c])) << cells[r][c] << (c < 3 ? "   " : " ]\n");
        }
    }
    return os.str();
}

}  // namespace spatialqt
