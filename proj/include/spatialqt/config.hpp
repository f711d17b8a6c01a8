#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "spatialqt/measurement.hpp"
#include "spatialqt/optics.hpp"
#include "spatialqt/state.hpp"

namespace spatialqt {

struct PumpConfig {
    PumpKind kind = PumpKind::Focused;
    double width = 20e-6;

    PumpProfile profile() const;
    friend bool operator==(const PumpConfig&, const PumpConfig&) = default;
};

/// Everything a pipeline run depends on. Lengths in metres.
struct ExperimentConfig {
    SlitGeometry geometry{};
    OpticalParams optics{};
    PumpConfig arm1{PumpKind::Focused, 20e-6};
    PumpConfig arm2{PumpKind::Broad, 2e-3};
    double weight_a = 0.87;
    double weight_b = 0.13;

    std::optional<double> delta;  ///< unset: derived from the optics (2 pi alpha / d)
    double detector_half_width = 0.05e-3;
    std::optional<std::array<double, 2>> x_positions;
    std::optional<std::array<double, 2>> y_positions;

    std::uint64_t counts_per_setting = 100000;
    NoiseModel noise = NoiseModel::Multinomial;
    int bootstrap_resamples = 200;

    OpticsOptions numerics{};

    double pattern_from = -3e-3;
    double pattern_to = 3e-3;
    int pattern_points = 241;

    std::uint64_t seed = 1;
    std::string output_dir = "out";

    double plan_delta() const;
    SlitPlan plan() const;
    /// Throws ValidationError naming the offending field.
    void validate() const;

    friend bool operator==(const ExperimentConfig& lhs, const ExperimentConfig& rhs);
};

/// Experimental defaults; z is placed so the detector spacing is 1.376 mm.
ExperimentConfig default_config();

/// Parses YAML on top of the defaults. Unknown keys, wrong types and invalid
/// values throw ValidationError carrying the field name and line number.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Complete, commented YAML with shortest round-trip numbers; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ExperimentConfig& config);

}  // namespace spatialqt
