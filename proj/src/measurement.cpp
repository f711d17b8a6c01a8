#include "spatialqt/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "spatialqt/error.hpp"

namespace spatialqt {
namespace {

int setting_index(const BasisSetting& s) {
    return 3 * static_cast<int>(s.signal) + static_cast<int>(s.idler);
}

std::mt19937_64 make_engine(std::uint64_t seed, const BasisSetting& setting) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(setting_index(setting))};
    return std::mt19937_64(seq);
}

Matrix4c parameter_basis(int p) {
    Matrix4c e = Matrix4c::Zero();
    if (p < 4) {
        e(p, p) = 1.0;
        return e;
    }
    const int pair = (p - 4) / 2;
    const auto [j, k] = kOffDiagonalPairs[pair];
    if ((p - 4) % 2 == 0) {
        e(j, k) = 1.0;
        e(k, j) = 1.0;
    } else {
        e(j, k) = Complex(0.0, 1.0);
        e(k, j) = Complex(0.0, -1.0);
    }
    return e;
}

}  // namespace

char basis_char(Basis b) {
    switch (b) {
        case Basis::X: return 'X';
        case Basis::Y: return 'Y';
        case Basis::Z: return 'Z';
    }
    return '?';
}

Basis parse_basis(char c) {
    switch (c) {
        case 'X': case 'x': return Basis::X;
        case 'Y': case 'y': return Basis::Y;
        case 'Z': case 'z': return Basis::Z;
        default: break;
    }
    throw ValidationError(std::string("setting: unknown basis '") + c + "'");
}

std::string BasisSetting::label() const { return {basis_char(signal), basis_char(idler)}; }

BasisSetting BasisSetting::parse(const std::string& label) {
    if (label.size() != 2) throw ValidationError("setting: expected two basis letters, got '" + label + "'");
    return {parse_basis(label[0]), parse_basis(label[1])};
}

std::array<BasisSetting, 9> all_settings() {
    std::array<BasisSetting, 9> out;
    constexpr std::array<Basis, 3> bases = {Basis::X, Basis::Y, Basis::Z};
    for (int s = 0; s < 3; ++s)
        for (int i = 0; i < 3; ++i) out[3 * s + i] = {bases[s], bases[i]};
    return out;
}

SlitPlan SlitPlan::standard(double delta, double detector_half_width) {
    SlitPlan plan;
    plan.delta = delta;
    plan.detector_half_width = detector_half_width;
    plan.x_positions = {0.0, delta};
    plan.y_positions = {-0.5 * delta, 0.5 * delta};
    plan.z_positions = {-100e-6, 100e-6};
    return plan;
}

const std::array<double, 2>& SlitPlan::positions(Basis b) const {
    switch (b) {
        case Basis::X: return x_positions;
        case Basis::Y: return y_positions;
        case Basis::Z: return z_positions;
    }
    return z_positions;
}

void SlitPlan::validate() const {
    if (!(detector_half_width > 0.0)) throw PlanningError("plan.detector_half_width: must be positive");
    for (Basis b : {Basis::X, Basis::Y}) {
        const auto& p = positions(b);
        if (!(std::abs(p[1] - p[0]) > 4.0 * detector_half_width)) {
            std::ostringstream msg;
            msg << "plan." << static_cast<char>(std::tolower(basis_char(b)))
                << "_positions: detector slits must be more than 4b = " << 4.0 * detector_half_width
                << " m apart (got " << std::abs(p[1] - p[0]) << " m)";
            throw PlanningError(msg.str());
        }
    }
}

double EffectiveTransform::mixing_angle() const { return std::acos(std::min(1.0, std::abs(matrix(0, 0)))); }

EffectiveTransform effective_transform(Basis basis, const SlitPlan& plan, const SlitGeometry& geom,
                                       const OpticalParams& opt, const OpticsOptions& options) {
    EffectiveTransform out;
    out.basis = basis;
    if (basis == Basis::Z) return out;

    plan.validate();
    const auto& pos = plan.positions(basis);
    Matrix2c raw;
    for (int k = 0; k < 2; ++k) {
        const DetectorSlit slit{pos[k], plan.detector_half_width};
        raw(k, 0) = overlap_r(SlitIndex::Plus, slit, geom, opt, options);
        raw(k, 1) = overlap_r(SlitIndex::Minus, slit, geom, opt, options);
    }
    out.raw = raw;

    Matrix2c rows = raw;
    for (int k = 0; k < 2; ++k) {
        const double n = rows.row(k).norm();
        if (!(n > 1e-12)) throw PlanningError("plan: detector slit receives no light from either source slit");
        rows.row(k) /= n;
    }
    Eigen::JacobiSVD<Matrix2c> svd(rows, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (!(sv(1) > 1e-8 * sv(0))) {
        throw PlanningError(std::string("plan: effective transform for basis ") + basis_char(basis) +
                            " is singular");
    }
    out.raw_condition_number = sv(0) / sv(1);
    out.raw_row_overlap = std::abs(rows.row(0).dot(rows.row(1)));
    out.matrix = svd.matrixU() * svd.matrixV().adjoint();
    return out;
}

ParameterVector to_parameters(const Matrix4c& rho) {
    ParameterVector p;
    for (int i = 0; i < 4; ++i) p(i) = rho(i, i).real();
    for (int n = 0; n < 6; ++n) {
        const auto [j, k] = kOffDiagonalPairs[n];
        p(4 + 2 * n) = rho(j, k).real();
        p(5 + 2 * n) = rho(j, k).imag();
    }
    return p;
}

Matrix4c from_parameters(const ParameterVector& params) {
    Matrix4c rho = Matrix4c::Zero();
    for (int i = 0; i < 4; ++i) rho(i, i) = params(i);
    for (int n = 0; n < 6; ++n) {
        const auto [j, k] = kOffDiagonalPairs[n];
        rho(j, k) = Complex(params(4 + 2 * n), params(5 + 2 * n));
        rho(k, j) = std::conj(rho(j, k));
    }
    return rho;
}

MeasurementModel::MeasurementModel(const SlitPlan& plan, const SlitGeometry& geom, const OpticalParams& opt,
                                   const OpticsOptions& options)
    : x_(effective_transform(Basis::X, plan, geom, opt, options)),
      y_(effective_transform(Basis::Y, plan, geom, opt, options)) {
    build_design();
}

MeasurementModel::MeasurementModel(const EffectiveTransform& x, const EffectiveTransform& y) : x_(x), y_(y) {
    x_.basis = Basis::X;
    y_.basis = Basis::Y;
    build_design();
}

const EffectiveTransform& MeasurementModel::transform(Basis b) const {
    switch (b) {
        case Basis::X: return x_;
        case Basis::Y: return y_;
        case Basis::Z: return z_;
    }
    return z_;
}

Eigen::Matrix4cd MeasurementModel::local_transform(const BasisSetting& setting) const {
    const Matrix2c& us = transform(setting.signal).matrix;
    const Matrix2c& ui = transform(setting.idler).matrix;
    Matrix4c t;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) t(2 * a + c, 2 * b + d) = us(a, b) * ui(c, d);
    return t;
}

std::array<double, 4> MeasurementModel::probabilities(const Matrix4c& rho, const BasisSetting& setting) const {
    const Matrix4c t = local_transform(setting);
    const Matrix4c rotated = t * rho * t.adjoint();
    return {rotated(0, 0).real(), rotated(1, 1).real(), rotated(2, 2).real(), rotated(3, 3).real()};
}

void MeasurementModel::build_design() {
    const auto settings = all_settings();
    for (int p = 0; p < kParameterCount; ++p) {
        const Matrix4c e = parameter_basis(p);
        for (int s = 0; s < 9; ++s) {
            const auto probs = probabilities(e, settings[s]);
            for (int o = 0; o < 4; ++o) design_(4 * s + o, p) = probs[o];
        }
    }
    Eigen::JacobiSVD<DesignMatrix> svd(design_);
    const auto& sv = svd.singularValues();
    condition_number_ = sv(kParameterCount - 1) > 0.0 ? sv(0) / sv(kParameterCount - 1)
                                                       : std::numeric_limits<double>::infinity();
}

double coincidence_probability(const DensityMatrix& rho, const BasisSetting& setting, const MeasurementModel& model,
                               const Outcome& outcome) {
    if (outcome.signal < 0 || outcome.signal > 1 || outcome.idler < 0 || outcome.idler > 1) {
        throw ValidationError("outcome: detector indices must be 0 or 1");
    }
    return model.probabilities(rho.matrix(), setting)[outcome.index()];
}

NoiseModel parse_noise_model(const std::string& name) {
    if (name == "multinomial") return NoiseModel::Multinomial;
    if (name == "poisson") return NoiseModel::Poisson;
    throw ValidationError("noise: expected 'multinomial' or 'poisson', got '" + name + "'");
}

std::string to_string(NoiseModel noise) { return noise == NoiseModel::Poisson ? "poisson" : "multinomial"; }

CountsRecord sample_counts(const BasisSetting& setting, const std::array<double, 4>& probabilities,
                           std::uint64_t total, std::uint64_t seed, NoiseModel noise) {
    if (total == 0) throw ValidationError("counts: total per setting must be positive");
    std::array<double, 4> p{};
    double mass = 0.0;
    for (int i = 0; i < 4; ++i) {
        p[i] = std::max(0.0, probabilities[i]);
        mass += p[i];
    }
    if (!(mass > 0.0)) throw ValidationError("counts: outcome probabilities vanish for setting " + setting.label());
    for (auto& v : p) v /= mass;

    CountsRecord rec;
    rec.setting = setting;
    rec.total = total;
    rec.seed = seed;
    auto engine = make_engine(seed, setting);
    if (noise == NoiseModel::Multinomial) {
        std::uint64_t remaining = total;
        double rest = 1.0;
        for (int i = 0; i < 3; ++i) {
            if (remaining == 0 || rest <= 0.0) break;
            const double q = std::clamp(p[i] / rest, 0.0, 1.0);
            std::binomial_distribution<std::uint64_t> draw(remaining, q);
            rec.counts[i] = draw(engine);
            remaining -= rec.counts[i];
            rest -= p[i];
        }
        rec.counts[3] = remaining;
    } else {
        for (int i = 0; i < 4; ++i) {
            const double mean = static_cast<double>(total) * p[i];
            if (mean <= 0.0) continue;
            std::poisson_distribution<std::uint64_t> draw(mean);
            rec.counts[i] = draw(engine);
        }
    }
    return rec;
}

std::vector<CountsRecord> simulate_counts(const DensityMatrix& rho, const std::vector<BasisSetting>& settings,
                                          const MeasurementModel& model, std::uint64_t total_per_setting,
                                          std::uint64_t seed, NoiseModel noise) {
    std::vector<CountsRecord> out;
    out.reserve(settings.size());
    for (const auto& s : settings) {
        out.push_back(sample_counts(s, model.probabilities(rho.matrix(), s), total_per_setting, seed, noise));
    }
    return out;
}

}  // namespace spatialqt
