#include "spatialqt/commands.hpp"

#include <array>

#include "spatialqt/error.hpp"
#include "spatialqt/io.hpp"

namespace spatialqt {
namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& path, const char* what) {
    if (!fs::exists(path)) throw ValidationError(std::string(what) + ": file not found: " + path.string());
}

io::json features_json(const FringePattern& p, double half_period) {
    const auto f = analyze_fringe(p, half_period);
    return {{"idler_x", p.idler_x}, {"peak_x", f.peak_x}, {"fwhm", f.fwhm}, {"visibility", f.visibility}};
}

}  // namespace

GeneratedStates generate_states(const ExperimentConfig& config) {
    config.validate();
    const auto arm1 = generate_pure_state(config.arm1.profile(), config.geometry, config.optics);
    const auto arm2 = generate_pure_state(config.arm2.profile(), config.geometry, config.optics);
    const std::array<double, 2> weights{config.weight_a, config.weight_b};
    const std::array<PureState2Q, 2> states{arm1, arm2};
    return {arm1, arm2, mix_states(weights, states)};
}

MeasurementModel build_model(const ExperimentConfig& config) {
    return MeasurementModel(config.plan(), config.geometry, config.optics, config.numerics);
}

GeneratedStates cmd_generate(const ExperimentConfig& config, const fs::path& out) {
    auto states = generate_states(config);
    io::write_json(out / "state_arm1.json", io::state_to_json(states.arm1));
    io::write_json(out / "state_arm2.json", io::state_to_json(states.arm2));
    io::write_json(out / "rho_the.json", io::density_to_json(states.mixture));
    return states;
}

std::vector<CountsRecord> cmd_simulate(const ExperimentConfig& config, const fs::path& state_file, const fs::path& out) {
    config.validate();
    require_file(state_file, "state");
    const DensityMatrix rho = io::load_density(state_file);
    const auto settings = all_settings();
    const auto records = simulate_counts(rho, {settings.begin(), settings.end()}, build_model(config),
                                         config.counts_per_setting, config.seed, config.noise);
    io::write_text(out / "counts.csv", io::counts_to_csv(records, config.seed));
    io::write_json(out / "counts.json", io::counts_to_json(records));
    return records;
}

TomographyResult cmd_reconstruct(const ExperimentConfig& config, const fs::path& counts_csv, const fs::path& out) {
    config.validate();
    require_file(counts_csv, "counts");
    const auto records = io::counts_from_csv(io::read_text(counts_csv));
    const auto model = build_model(config);
    TomographyResult result = reconstruct(records, model);
    if (config.bootstrap_resamples > 0) {
        const auto errors = bootstrap_errors(records, model, config.bootstrap_resamples,
                                             derive_seed(config.seed, 0xb007), config.noise);
        result.error_real = errors.real;
        result.error_imag = errors.imag;
    }
    io::write_json(out / "result.json", io::result_to_json(result));
    io::write_text(out / "result.txt", pretty_matrix(result.rho.matrix()));
    return result;
}

std::vector<double> idler_presets(const ExperimentConfig& config) { return {0.0, config.plan_delta()}; }

std::vector<FringePattern> cmd_pattern(const ExperimentConfig& config, const fs::path& state_file,
                                       const std::vector<double>& idler_positions, const fs::path& out) {
    config.validate();
    require_file(state_file, "state");
    const DensityMatrix rho = io::load_density(state_file);
    const FringeScan scan{config.pattern_from, config.pattern_to, config.pattern_points};
    std::vector<FringePattern> patterns;
    for (double idler : idler_positions) {
        patterns.push_back(fringe_pattern(rho, idler, scan, config.detector_half_width, config.geometry,
                                          config.optics, config.numerics));
    }
    io::write_text(out / "pattern.csv", fringe_csv(patterns));
    return patterns;
}

Decomposition cmd_histogram(const fs::path& result_json, const fs::path& predicted_file, const fs::path& reference_state,
                            const fs::path& out) {
    require_file(result_json, "result");
    require_file(predicted_file, "predicted");
    require_file(reference_state, "reference");
    const DensityMatrix measured = io::result_from_json(io::read_json(result_json)).rho;
    const DensityMatrix predicted = io::load_density(predicted_file);
    const auto reference = io::load_state_file(reference_state);
    const auto* pure = std::get_if<PureState2Q>(&reference);
    if (pure == nullptr) throw ValidationError("reference: expected a pure state file with \"coefficients\"");

    const Decomposition d = decompose_with_reference(measured, *pure);
    io::write_text(out / "histogram.csv", histogram_csv(measured, d.recomposed(), predicted));
    io::write_json(out / "decomposition.json", io::decomposition_to_json(d));
    return d;
}

PipelineSummary cmd_pipeline(const ExperimentConfig& config, const fs::path& out) {
    PipelineSummary s{cmd_generate(config, out), TomographyResult{}, {}, {}, {}};
    cmd_simulate(config, out / "rho_the.json", out);
    s.result = cmd_reconstruct(config, out / "counts.csv", out);
    s.decomposition = cmd_histogram(out / "result.json", out / "rho_the.json", out / "state_arm2.json", out);
    s.spectral = decompose_two_component(s.result.rho);
    s.fringes = cmd_pattern(config, out / "result.json", idler_presets(config), out);

    io::json fringes = io::json::array();
    for (const auto& p : s.fringes) fringes.push_back(features_json(p, config.plan_delta()));
    const io::json summary = {
        {"seed", config.seed},
        {"counts_per_setting", config.counts_per_setting},
        {"plan_delta", config.plan_delta()},
        {"condition_number", s.result.condition_number},
        {"physical", s.result.physical()},
        {"schwarz_violations", s.result.schwarz_violations.size()},
        {"distance_to_prediction", frobenius_distance(s.result.rho, s.states.mixture)},
        {"weights_reference", {s.decomposition.weights[0], s.decomposition.weights[1]}},
        {"weights_spectral", {s.spectral.weights[0], s.spectral.weights[1]}},
        {"fringes", fringes},
    };
    io::write_json(out / "summary.json", summary);
    return s;
}

}  // namespace spatialqt
