// Command-line front end: spatialqt <command> [options]
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spatialqt/commands.hpp"
#include "spatialqt/error.hpp"

namespace fs = std::filesystem;
using namespace spatialqt;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStrict = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> noise;
    std::optional<std::uint64_t> counts;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "YAML experiment configuration");
    cmd->add_option("--seed", o.seed, "random seed (overrides run.seed)");
    cmd->add_option("--out", o.out, "output directory (overrides run.output_dir)");
    cmd->add_option("--noise", o.noise, "multinomial or poisson");
    cmd->add_option("--counts", o.counts, "counts per setting");
}

ExperimentConfig resolve(const CommonOptions& o) {
    ExperimentConfig c = o.config_path.empty() ? default_config() : load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output_dir = *o.out;
    if (o.noise) {
        try {
            c.noise = parse_noise_model(*o.noise);
        } catch (const ValidationError&) {
            throw ValidationError("--noise: expected multinomial or poisson, got '" + *o.noise + "'");
        }
    }
    if (o.counts) c.counts_per_setting = *o.counts;
    c.validate();
    return c;
}

void print_result(const TomographyResult& r) {
    std::cout << pretty_matrix(r.rho.matrix());
    std::cout << "eigenvalues:";
    for (double e : r.eigenvalues) std::cout << ' ' << e;
    std::cout << "\ncondition number: " << r.condition_number << '\n';
    for (const auto& v : r.schwarz_violations) {
        std::cout << "schwarz violation (" << kBasisLabels[v.row] << ',' << kBasisLabels[v.col] << "): |rho| = "
                  << v.modulus << " > " << v.bound << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and tomography of spatially entangled photon pairs behind a double slit"};
    app.require_subcommand(1);

    CommonOptions common;
    bool strict = false;
    std::string state_file, counts_file, result_file, predicted_file, reference_file;
    std::vector<double> idlers;

    auto* generate = app.add_subcommand("generate", "write arm-1, arm-2 and mixed state files");
    add_common(generate, common);

    auto* simulate = app.add_subcommand("simulate", "draw coincidence counts for all nine settings");
    add_common(simulate, common);
    simulate->add_option("--state", state_file, "state JSON (pure or density)")->required();

    auto* rec = app.add_subcommand("reconstruct", "invert counts into a density matrix");
    add_common(rec, common);
    rec->add_option("--input", counts_file, "counts CSV")->required();
    rec->add_flag("--strict", strict, "exit nonzero when the Schwarz check fails");

    auto* pattern = app.add_subcommand("pattern", "fourth-order fringes with the idler detector held fixed");
    add_common(pattern, common);
    pattern->add_option("--state", state_file, "state or result JSON")->required();
    pattern->add_option("--idler", idlers, "idler positions [m]; default 0 and the plan spacing");

    auto* histogram = app.add_subcommand("histogram", "real parts of measured, decomposed and predicted matrices");
    add_common(histogram, common);
    histogram->add_option("--result", result_file, "reconstruction result JSON")->required();
    histogram->add_option("--predicted", predicted_file, "predicted state JSON")->required();
    histogram->add_option("--reference", reference_file, "pure reference state for the decomposition")->required();

    auto* pipeline = app.add_subcommand("pipeline", "generate, simulate, reconstruct and analyze in one run");
    add_common(pipeline, common);
    pipeline->add_flag("--strict", strict, "exit nonzero when the Schwarz check fails");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig config = resolve(common);
        const fs::path out = config.output_dir;

        if (generate->parsed()) {
            const auto s = cmd_generate(config, out);
            std::cout << "rho_the:\n" << pretty_matrix(s.mixture.matrix());
        } else if (simulate->parsed()) {
            const auto records = cmd_simulate(config, state_file, out);
            std::cout << "wrote " << records.size() << " settings to " << (out / "counts.csv").string() << '\n';
        } else if (rec->parsed()) {
            const auto r = cmd_reconstruct(config, counts_file, out);
            print_result(r);
            if (strict && !r.schwarz_violations.empty()) return kExitStrict;
        } else if (pattern->parsed()) {
            if (idlers.empty()) idlers = idler_presets(config);
            const auto patterns = cmd_pattern(config, state_file, idlers, out);
            for (const auto& p : patterns) {
                const auto f = analyze_fringe(p, config.plan_delta());
                std::cout << "idler " << p.idler_x << ": peak " << f.peak_x << ", fwhm " << f.fwhm << ", visibility "
                          << f.visibility << '\n';
            }
        } else if (histogram->parsed()) {
            const auto d = cmd_histogram(result_file, predicted_file, reference_file, out);
            std::cout << "weights " << d.weights[0] << ' ' << d.weights[1] << ", residual " << d.residual << '\n';
        } else if (pipeline->parsed()) {
            const auto s = cmd_pipeline(config, out);
            print_result(s.result);
            std::cout << "mixture weights " << s.decomposition.weights[0] << ' ' << s.decomposition.weights[1]
                      << " (spectral " << s.spectral.weights[0] << ' ' << s.spectral.weights[1] << ")\n";
            if (strict && !s.result.schwarz_violations.empty()) return kExitStrict;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
