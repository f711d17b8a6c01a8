#pragma once

#include <filesystem>
#include <vector>

#include "spatialqt/analysis.hpp"
#include "spatialqt/config.hpp"
#include "spatialqt/measurement.hpp"
#include "spatialqt/state.hpp"
#include "spatialqt/tomography.hpp"

// File-level operations behind the command line. Each writes its outputs into
// `out` and returns the in-memory results. Outputs depend only on the config
// (including its seed) and the input files.
namespace spatialqt {

struct GeneratedStates {
    PureState2Q arm1;
    PureState2Q arm2;
    DensityMatrix mixture;
};

GeneratedStates generate_states(const ExperimentConfig& config);
MeasurementModel build_model(const ExperimentConfig& config);

/// state_arm1.json, state_arm2.json, rho_the.json
GeneratedStates cmd_generate(const ExperimentConfig& config, const std::filesystem::path& out);

/// counts.csv, counts.json
std::vector<CountsRecord> cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& state_file,
                                       const std::filesystem::path& out);

/// result.json, result.txt. Bootstrap error bars when the config asks for them.
TomographyResult cmd_reconstruct(const ExperimentConfig& config, const std::filesystem::path& counts_csv,
                                 const std::filesystem::path& out);

/// Preset idler positions: 0 and the plan spacing.
std::vector<double> idler_presets(const ExperimentConfig& config);

/// pattern.csv
std::vector<FringePattern> cmd_pattern(const ExperimentConfig& config, const std::filesystem::path& state_file,
                                       const std::vector<double>& idler_positions, const std::filesystem::path& out);

/// histogram.csv and decomposition.json. The decomposed panel is the
/// two-component model guided by `reference_state` (the arm-2 state).
Decomposition cmd_histogram(const std::filesystem::path& result_json, const std::filesystem::path& predicted_file,
                            const std::filesystem::path& reference_state, const std::filesystem::path& out);

struct PipelineSummary {
    GeneratedStates states;
    TomographyResult result;
    Decomposition decomposition;
    Decomposition spectral;
    std::vector<FringePattern> fringes;
};

/// generate -> simulate -> reconstruct -> pattern -> histogram, plus summary.json.
PipelineSummary cmd_pipeline(const ExperimentConfig& config, const std::filesystem::path& out);

}  // namespace spatialqt
