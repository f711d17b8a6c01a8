// Acceptance checks. One line per criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "spatialqt/commands.hpp"
#include "spatialqt/io.hpp"
#include "test_support.hpp"

using namespace spatialqt;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        o.pass = false;
        o.detail += " (over time budget)";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

const MeasurementModel& model() {
    static const MeasurementModel m = build_model(default_config());
    return m;
}

// 1. Printed ZZ coincidences normalize to the printed diagonal.
Outcome diagonal_reproduction() {
    const auto records = io::counts_from_csv(io::read_text(data_path("zz_counts.csv")));
    const auto diag = reconstruct_diagonals(records.at(0));
    const Matrix4c printed = experimental_rho();
    OffDiagonals off{};
    for (int n = 0; n < 6; ++n) off[n] = printed(kOffDiagonalPairs[n][0], kOffDiagonalPairs[n][1]);
    const auto r = assemble(diag, off);
    bool exact = true;
    for (int i = 0; i < 4; ++i) exact = exact && r.rho(i, i).real() == printed(i, i).real();
    return {exact, fmt("diagonal = (%.3f, %.3f, %.3f, %.3f)", r.rho(0, 0).real(), r.rho(1, 1).real(),
                       r.rho(2, 2).real(), r.rho(3, 3).real())};
}

// 2. Exact probabilities invert back to the input.
Outcome noiseless_round_trip() {
    std::mt19937_64 rng(2024);
    std::vector<Matrix4c> inputs{experimental_rho()};
    for (int i = 0; i < 100; ++i) inputs.push_back(random_density(rng));
    double worst_closed = 0.0, worst_lsq = 0.0;
    for (const auto& m : inputs) {
        const DensityMatrix rho(m, 1e-9);
        const auto freqs = exact_frequencies(rho, model());
        const auto a = reconstruct(freqs, model(), InversionMethod::ClosedForm);
        const auto b = reconstruct(freqs, model(), InversionMethod::LeastSquares);
        worst_closed = std::max(worst_closed, (a.rho.matrix() - m).cwiseAbs().maxCoeff());
        worst_lsq = std::max(worst_lsq, (b.rho.matrix() - m).cwiseAbs().maxCoeff());
    }
    return {worst_closed <= 1e-9 && worst_lsq <= 1e-9,
            fmt("101 states, max entry error closed-form %.2e, least-squares %.2e (tol 1e-9)", worst_closed,
                worst_lsq)};
}

// 3. Only the (++,--) pair breaks the Schwarz bound.
Outcome schwarz_diagnostic() {
    const auto v = schwarz_check(experimental_rho());
    if (v.size() != 1) return {false, fmt("%zu violations flagged", v.size())};
    const bool ok = v[0].row == 0 && v[0].col == 3 && std::abs(v[0].modulus - 0.143) < 5e-4 &&
                    std::abs(v[0].bound - 0.034) < 5e-4;
    return {ok, fmt("(%s,%s) |rho| = %.4f vs bound %.4f", std::string(kBasisLabels[v[0].row]).c_str(),
                    std::string(kBasisLabels[v[0].col]).c_str(), v[0].modulus, v[0].bound)};
}

// 4. Printed two-component form against the printed matrix.
Outcome decomposition_consistency() {
    constexpr double baseline = 0.268635186424;
    const std::array<PureState2Q, 2> states{to_state(printed_phi1()), to_state(printed_phi2())};
    const std::array<double, 2> weights{0.87, 0.13};
    const double d = frobenius_distance(mix_states(weights, states), DensityMatrix(experimental_rho(), 1e-9));
    return {std::abs(d - baseline) <= 1e-6, fmt("Frobenius distance %.12f (baseline %.12f +- 1e-6)", d, baseline)};
}

// 5. Dominant weight of the simulated mixture across seeds.
Outcome mixture_weight_recovery() {
    const auto config = default_config();
    const auto states = generate_states(config);
    const auto settings = all_settings();
    const std::vector<BasisSetting> all(settings.begin(), settings.end());
    double worst = 0.0, mean = 0.0, spectral_mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto counts = simulate_counts(states.mixture, all, model(), 100000, seed);
        const auto result = reconstruct(counts, model());
        const double w = decompose_with_reference(result.rho, states.arm2).dominant_weight();
        worst = std::max(worst, std::abs(w - config.weight_a));
        mean += w / 50;
        spectral_mean += decompose_two_component(result.rho).dominant_weight() / 50;
    }
    return {worst <= 0.05, fmt("mean %.4f, max |w - 0.87| = %.4f over 50 seeds (spectral split mean %.4f)", mean,
                               worst, spectral_mean)};
}

// 6. Fringe peaks follow the idler for the reconstructed state, not for |++>.
Outcome fringe_conditionality() {
    const auto config = default_config();
    const fs::path dir = fs::temp_directory_path() / "spatialqt_acceptance";
    fs::remove_all(dir);
    cmd_generate(config, dir);
    cmd_simulate(config, dir / "rho_the.json", dir);
    auto quick = config;
    quick.bootstrap_resamples = 0;
    cmd_reconstruct(quick, dir / "counts.csv", dir);
    const auto presets = idler_presets(config);
    const auto entangled = cmd_pattern(config, dir / "result.json", presets, dir / "entangled");
    io::write_json(dir / "product.json", io::state_to_json(PureState2Q({1.0, 0.0, 0.0, 0.0})));
    const auto product = cmd_pattern(config, dir / "product.json", presets, dir / "product");

    const double delta = config.plan_delta();
    const auto e0 = analyze_fringe(entangled[0], delta), e1 = analyze_fringe(entangled[1], delta);
    const auto p0 = analyze_fringe(product[0], delta), p1 = analyze_fringe(product[1], delta);
    const double e_shift = std::abs(e1.peak_x - e0.peak_x), p_shift = std::abs(p1.peak_x - p0.peak_x);
    const bool ok = e_shift > e0.fwhm / 4 && p_shift < p0.fwhm / 20;
    return {ok, fmt("entangled shift %.3f mm vs FWHM/4 %.3f mm; product shift %.2e mm vs FWHM/20 %.3f mm",
                    e_shift * 1e3, e0.fwhm * 250, p_shift * 1e3, p0.fwhm * 50)};
}

// 7. Adaptive quadrature against the momentum-space Riemann sums.
Outcome optics_oracles() {
    const auto c = default_config();
    const double alpha = propagation_scale(c.geometry, c.optics);
    const double b = c.detector_half_width;
    double worst_g = 0.0, worst_r = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double x = -3e-3 + 6e-3 * i / 49.0;
        for (auto slit : {SlitIndex::Plus, SlitIndex::Minus}) {
            const double centre = slit_center(slit, c.geometry);
            const Complex g = propagate_slit_mode(slit, c.geometry, c.optics, x);
            const Complex g_ref = riemann_mode(x, centre, c.geometry.a, alpha, 2'000'000);
            worst_g = std::max(worst_g, std::abs(g - g_ref) / std::abs(g_ref));
            const Complex r = overlap_r(slit, {x, b}, c.geometry, c.optics);
            const Complex r_ref = riemann_kernel(x, b, centre, c.geometry.a, alpha, 2'000'000);
            worst_r = std::max(worst_r, std::abs(r - r_ref) / std::abs(r_ref));
        }
    }
    const double overlap = fstate_overlap({0.0, b}, {c.plan_delta(), b}, c.geometry, c.optics);
    const bool ok = worst_g <= 1e-5 && worst_r <= 1e-5 && overlap < 0.05;
    return {ok, fmt("max rel. error g %.2e, r %.2e (tol 1e-5); f-state overlap at Delta %.3g (< 0.05)", worst_g,
                    worst_r, overlap)};
}

// 8. Reconstruction error falls as N^-1/2.
Outcome noise_scaling() {
    const auto states = generate_states(default_config());
    const auto settings = all_settings();
    const std::vector<BasisSetting> all(settings.begin(), settings.end());
    const std::array<double, 4> totals{1e3, 1e4, 1e5, 1e6};
    std::array<double, 4> err{};
    for (int k = 0; k < 4; ++k) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto counts = simulate_counts(states.mixture, all, model(), static_cast<std::uint64_t>(totals[k]),
                                                derive_seed(seed, k));
            const auto r = reconstruct(counts, model());
            // RMS over the 16 entries
            err[k] += (r.rho.matrix() - states.mixture.matrix()).norm() / 4.0 / 100;
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < 4; ++k) {
        const double x = std::log10(totals[k]), y = std::log10(err[k]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    return {std::abs(slope + 0.5) <= 0.05, fmt("slope %.4f (target -0.5 +- 0.05); rms error %.2e .. %.2e", slope,
                                               err[0], err[3])};
}

}  // namespace

int main() {
    run(1, "diagonal reproduction", 1, diagonal_reproduction);
    run(2, "noiseless round-trip", 10, noiseless_round_trip);
    run(3, "Schwarz diagnostic", 1, schwarz_diagnostic);
    run(4, "decomposition consistency", 1, decomposition_consistency);
    run(5, "mixture-weight recovery", 120, mixture_weight_recovery);
    run(6, "fringe conditionality", 30, fringe_conditionality);
    run(7, "optics oracle suite", 60, optics_oracles);
    run(8, "noise scaling", 300, noise_scaling);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
