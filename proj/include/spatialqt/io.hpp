#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include "spatialqt/measurement.hpp"
#include "spatialqt/state.hpp"
#include "spatialqt/tomography.hpp"

namespace spatialqt::io {

using json = nlohmann::json;

// Complex numbers are [re, im] pairs; the basis order is always ++, +-, -+, --.

json state_to_json(const PureState2Q& state);
PureState2Q state_from_json(const json& j);

json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

/// A state file holds either "coefficients" (pure) or "rho" (mixed).
DensityMatrix load_density(const std::filesystem::path& path);
std::variant<PureState2Q, DensityMatrix> load_state_file(const std::filesystem::path& path);

/// Columns: setting,k_s,k_i,count,seed,total; preceded by "# seed=<n>".
std::string counts_to_csv(const std::vector<CountsRecord>& records, std::uint64_t seed);
std::vector<CountsRecord> counts_from_csv(const std::string& text);
json counts_to_json(const std::vector<CountsRecord>& records);
std::vector<CountsRecord> counts_from_json(const json& j);

json result_to_json(const TomographyResult& result);
/// Reads the "rho" block (and diagnostics when present) back.
TomographyResult result_from_json(const json& j);

json decomposition_to_json(const Decomposition& d);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace spatialqt::io
