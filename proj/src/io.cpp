#include "spatialqt/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "spatialqt/error.hpp"

namespace spatialqt::io {
namespace {

json complex_to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError(where + ": expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Matrix4c& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

Matrix4c matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) throw ValidationError(where + ": expected a 4x4 matrix");
    Matrix4c m;
    for (int r = 0; r < 4; ++r) {
        if (!j[r].is_array() || j[r].size() != 4) throw ValidationError(where + ": expected a 4x4 matrix");
        for (int c = 0; c < 4; ++c) {
            m(r, c) = complex_from_json(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return m;
}

json real_matrix_to_json(const Eigen::Matrix4d& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::Matrix4d real_matrix_from_json(const json& j) {
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

json basis_json() {
    json b = json::array();
    for (auto label : kBasisLabels) b.push_back(std::string(label));
    return b;
}

void check_basis(const json& j) {
    if (j.contains("basis") && j["basis"] != basis_json()) {
        throw ValidationError("basis: expected [\"++\", \"+-\", \"-+\", \"--\"]");
    }
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size() || text.starts_with('-')) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(where + ": expected a non-negative integer, got '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

json state_to_json(const PureState2Q& state) {
    json coeffs = json::array();
    for (const auto& c : state.coefficients()) coeffs.push_back(complex_to_json(c));
    return {{"basis", basis_json()}, {"coefficients", coeffs}};
}

PureState2Q state_from_json(const json& j) {
    check_basis(j);
    if (!j.contains("coefficients") || !j["coefficients"].is_array() || j["coefficients"].size() != 4) {
        throw ValidationError("coefficients: expected four [re, im] pairs");
    }
    std::array<Complex, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = complex_from_json(j["coefficients"][i], "coefficients[" + std::to_string(i) + "]");
    return PureState2Q(c);
}

json density_to_json(const DensityMatrix& rho) { return {{"basis", basis_json()}, {"rho", matrix_to_json(rho.matrix())}}; }

DensityMatrix density_from_json(const json& j) {
    check_basis(j);
    if (!j.contains("rho")) throw ValidationError("rho: missing");
    // Printed matrices carry ~1e-3 rounding; accept them and hermitize.
    return DensityMatrix(matrix_from_json(j["rho"], "rho"), 1e-9);
}

std::variant<PureState2Q, DensityMatrix> load_state_file(const std::filesystem::path& path) {
    const json j = read_json(path);
    if (j.contains("coefficients")) return state_from_json(j);
    if (j.contains("rho")) return density_from_json(j);
    throw ValidationError(path.string() + ": neither \"coefficients\" nor \"rho\" present");
}

DensityMatrix load_density(const std::filesystem::path& path) {
    auto state = load_state_file(path);
    if (auto* pure = std::get_if<PureState2Q>(&state)) return DensityMatrix::projector(*pure);
    return std::get<DensityMatrix>(state);
}

std::string counts_to_csv(const std::vector<CountsRecord>& records, std::uint64_t seed) {
    std::ostringstream os;
    os << "# seed=" << seed << "\n";
    os << "setting,k_s,k_i,count,seed,total\n";
    for (const auto& rec : records) {
        for (int o = 0; o < 4; ++o) {
            os << rec.setting.label() << ',' << o / 2 << ',' << o % 2 << ',' << rec.counts[o] << ',' << rec.seed << ','
               << rec.total << '\n';
        }
    }
    return os.str();
}

std::vector<CountsRecord> counts_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::map<BasisSetting, CountsRecord> records;
    std::map<BasisSetting, std::array<bool, 4>> seen;
    std::vector<BasisSetting> order;

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.starts_with('#')) continue;
        const std::string where = "counts line " + std::to_string(line_no);
        if (!header_seen) {
            if (line != "setting,k_s,k_i,count,seed,total") {
                throw ValidationError(where + ": expected header 'setting,k_s,k_i,count,seed,total'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 6) throw ValidationError(where + ": expected 6 columns");
        const auto setting = BasisSetting::parse(fields[0]);
        const auto ks = parse_unsigned(fields[1], where + " k_s");
        const auto ki = parse_unsigned(fields[2], where + " k_i");
        if (ks > 1 || ki > 1) throw ValidationError(where + ": k_s and k_i must be 0 or 1");
        const int o = static_cast<int>(2 * ks + ki);

        auto [it, inserted] = records.try_emplace(setting);
        if (inserted) {
            it->second.setting = setting;
            order.push_back(setting);
        }
        auto& flags = seen[setting];
        if (flags[o]) throw ValidationError(where + ": duplicate outcome for setting " + setting.label());
        flags[o] = true;
        it->second.counts[o] = parse_unsigned(fields[3], where + " count");
        it->second.seed = parse_unsigned(fields[4], where + " seed");
        it->second.total = parse_unsigned(fields[5], where + " total");
    }
    if (!header_seen) throw ValidationError("counts: missing header line");

    std::vector<CountsRecord> out;
    for (const auto& s : order) {
        const auto& flags = seen[s];
        for (int o = 0; o < 4; ++o) {
            if (!flags[o]) {
                throw InsufficientDataError("counts: setting " + s.label() + " is missing outcome k_s=" +
                                            std::to_string(o / 2) + ", k_i=" + std::to_string(o % 2));
            }
        }
        out.push_back(records[s]);
    }
    return out;
}

json counts_to_json(const std::vector<CountsRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) {
        arr.push_back({{"setting", rec.setting.label()},
                       {"counts", rec.counts},
                       {"seed", rec.seed},
                       {"total", rec.total}});
    }
    return arr;
}

std::vector<CountsRecord> counts_from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("counts: expected an array of records");
    std::vector<CountsRecord> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& item = j[i];
        CountsRecord rec;
        try {
            rec.setting = BasisSetting::parse(item.at("setting").get<std::string>());
            rec.counts = item.at("counts").get<std::array<std::uint64_t, 4>>();
            rec.seed = item.at("seed").get<std::uint64_t>();
            rec.total = item.at("total").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw ValidationError("counts[" + std::to_string(i) + "]: " + e.what());
        }
        out.push_back(rec);
    }
    return out;
}

json result_to_json(const TomographyResult& result) {
    json violations = json::array();
    for (const auto& v : result.schwarz_violations) {
        violations.push_back({{"row", std::string(kBasisLabels[v.row])},
                              {"col", std::string(kBasisLabels[v.col])},
                              {"modulus", v.modulus},
                              {"bound", v.bound}});
    }
    json diagnostics = {{"physical", result.physical()},
                        {"eigenvalues", result.eigenvalues},
                        {"condition_number", result.condition_number},
                        {"hermiticity_defect", result.hermiticity_defect},
                        {"schwarz_violations", violations}};
    if (result.error_real) diagnostics["error_real"] = real_matrix_to_json(*result.error_real);
    if (result.error_imag) diagnostics["error_imag"] = real_matrix_to_json(*result.error_imag);
    return {{"basis", basis_json()}, {"rho", matrix_to_json(result.rho.matrix())}, {"diagnostics", diagnostics}};
}

TomographyResult result_from_json(const json& j) {
    check_basis(j);
    if (!j.contains("rho")) throw ValidationError("result: missing \"rho\"");
    TomographyResult result = assemble_matrix(matrix_from_json(j["rho"], "rho"));
    if (j.contains("diagnostics")) {
        const auto& d = j["diagnostics"];
        if (d.contains("condition_number")) result.condition_number = d["condition_number"].get<double>();
        if (d.contains("error_real")) result.error_real = real_matrix_from_json(d["error_real"]);
        if (d.contains("error_imag")) result.error_imag = real_matrix_from_json(d["error_imag"]);
    }
    return result;
}

json decomposition_to_json(const Decomposition& d) {
    return {{"weights", d.weights},
            {"components", json::array({state_to_json(d.components[0]), state_to_json(d.components[1])})},
            {"residual", d.residual},
            {"ambiguous", d.ambiguous}};
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace spatialqt::io
