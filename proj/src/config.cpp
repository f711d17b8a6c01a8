#include "spatialqt/config.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "spatialqt/error.hpp"
#include "spatialqt/io.hpp"

namespace spatialqt {
namespace {

bool same_options(const OpticsOptions& a, const OpticsOptions& b) {
    return a.window == b.window && a.quadrature.abs_tol == b.quadrature.abs_tol &&
           a.quadrature.rel_tol == b.quadrature.rel_tol && a.quadrature.max_intervals == b.quadrature.max_intervals;
}

std::string pump_kind_name(PumpKind kind) {
    switch (kind) {
        case PumpKind::Focused: return "focused";
        case PumpKind::Broad: return "broad";
        case PumpKind::Custom: return "custom";
    }
    return "custom";
}

// Walks the document, remembering the line of every field so that semantic
// validation errors can point back into the file.
class Reader {
public:
    explicit Reader(std::map<std::string, int>& lines) : lines_(lines) {}

    void expect_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
        if (!node.IsMap()) fail(path, node, "expected a mapping");
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            const std::string full = path.empty() ? key : path + "." + key;
            lines_[full] = kv.first.Mark().line + 1;
            if (!allowed.contains(key)) fail(full, kv.first, "unknown key");
        }
    }

    template <typename T>
    void read(const YAML::Node& parent, const std::string& path, const std::string& key, T& out) {
        const YAML::Node node = parent[key];
        if (!node) return;
        const std::string full = path + "." + key;
        try {
            out = node.as<T>();
        } catch (const YAML::BadConversion&) {
            fail(full, node, "wrong type");
        }
    }

    [[noreturn]] void fail(const std::string& field, const YAML::Node& node, const std::string& what) {
        std::ostringstream msg;
        msg << field << " (line " << node.Mark().line + 1 << "): " << what;
        throw ValidationError(msg.str());
    }

private:
    std::map<std::string, int>& lines_;
};

PumpKind parse_pump_kind(const std::string& name, const std::string& field) {
    if (name == "focused") return PumpKind::Focused;
    if (name == "broad") return PumpKind::Broad;
    throw ValidationError(field + ": expected 'focused' or 'broad', got '" + name + "'");
}

// Shortest text that reads back to the same double.
std::string shortest(double v) {
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), r.ptr};
}

}  // namespace

PumpProfile PumpConfig::profile() const {
    return kind == PumpKind::Broad ? PumpProfile::broad(width) : PumpProfile::focused(width);
}

double ExperimentConfig::plan_delta() const { return delta ? *delta : plan_spacing(geometry, optics); }

SlitPlan ExperimentConfig::plan() const {
    SlitPlan plan = SlitPlan::standard(plan_delta(), detector_half_width);
    if (x_positions) plan.x_positions = *x_positions;
    if (y_positions) plan.y_positions = *y_positions;
    return plan;
}

void ExperimentConfig::validate() const {
    geometry.validate();
    optics.validate(geometry);
    for (const auto& [arm, pump] : {std::pair{"pump.arm1", arm1}, std::pair{"pump.arm2", arm2}}) {
        if (!(pump.width > 0.0)) throw ValidationError(std::string(arm) + ".width: must be positive");
        if (pump.kind == PumpKind::Focused && !(pump.width < geometry.d)) {
            throw ValidationError(std::string(arm) + ".width: a focused pump must be narrower than d");
        }
        if (pump.kind == PumpKind::Broad && !(pump.width >= 10.0 * geometry.d)) {
            throw ValidationError(std::string(arm) + ".width: a broad pump must be at least 10 d wide");
        }
    }
    if (!(weight_a >= 0.0)) throw ValidationError("mixture.A: must be non-negative");
    if (!(weight_b >= 0.0)) throw ValidationError("mixture.B: must be non-negative");
    if (std::abs(weight_a + weight_b - 1.0) > 1e-9) throw ValidationError("mixture.B: A + B must equal 1");
    if (delta && !(*delta > 0.0)) throw ValidationError("plan.delta: must be positive");
    if (!(detector_half_width > 0.0)) throw ValidationError("plan.detector_half_width: must be positive");
    if (counts_per_setting == 0) throw ValidationError("measurement.counts_per_setting: must be positive");
    if (bootstrap_resamples != 0 && bootstrap_resamples < 2) {
        throw ValidationError("tomography.bootstrap_resamples: use 0 to disable or at least 2");
    }
    if (!(numerics.quadrature.abs_tol > 0.0)) throw ValidationError("quadrature.abs_tol: must be positive");
    if (!(numerics.quadrature.rel_tol >= 0.0)) throw ValidationError("quadrature.rel_tol: must be non-negative");
    if (numerics.quadrature.max_intervals < 1) throw ValidationError("quadrature.max_intervals: must be positive");
    if (!(numerics.window > 0.0)) throw ValidationError("quadrature.window: must be positive");
    if (!(pattern_to > pattern_from)) throw ValidationError("pattern.to: must exceed pattern.from");
    if (pattern_points < 3) throw ValidationError("pattern.points: need at least 3");

    const SlitPlan p = plan();
    try {
        p.validate();
    } catch (const PlanningError& e) {
        throw ValidationError(e.what());
    }
    for (Basis b : {Basis::X, Basis::Y}) {
        for (double x : p.positions(b)) {
            if (std::abs(x) > numerics.window) {
                throw ValidationError(std::string("plan.") + (b == Basis::X ? "x" : "y") +
                                      "_positions: detector slit lies outside quadrature.window");
            }
        }
    }
}

bool operator==(const ExperimentConfig& lhs, const ExperimentConfig& rhs) {
    auto geom_eq = [](const SlitGeometry& a, const SlitGeometry& b) {
        return a.slit_count == b.slit_count && a.d == b.d && a.a == b.a && a.z_a == b.z_a;
    };
    auto optics_eq = [](const OpticalParams& a, const OpticalParams& b) {
        return a.lambda_pump == b.lambda_pump && a.lambda_down == b.lambda_down && a.z == b.z;
    };
    return geom_eq(lhs.geometry, rhs.geometry) && optics_eq(lhs.optics, rhs.optics) && lhs.arm1 == rhs.arm1 &&
           lhs.arm2 == rhs.arm2 && lhs.weight_a == rhs.weight_a && lhs.weight_b == rhs.weight_b &&
           lhs.delta == rhs.delta && lhs.detector_half_width == rhs.detector_half_width &&
           lhs.x_positions == rhs.x_positions && lhs.y_positions == rhs.y_positions &&
           lhs.counts_per_setting == rhs.counts_per_setting && lhs.noise == rhs.noise &&
           lhs.bootstrap_resamples == rhs.bootstrap_resamples && same_options(lhs.numerics, rhs.numerics) &&
           lhs.pattern_from == rhs.pattern_from && lhs.pattern_to == rhs.pattern_to &&
           lhs.pattern_points == rhs.pattern_points && lhs.seed == rhs.seed && lhs.output_dir == rhs.output_dir;
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.optics.z = detection_plane_for_spacing(c.geometry, c.optics.lambda_down, 1.376e-3);
    return c;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
    ExperimentConfig c = default_config();
    std::map<std::string, int> lines;
    Reader r(lines);

    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ValidationError(std::string("config (line ") + std::to_string(e.mark.line + 1) + "): " + e.msg);
    }
    if (root.IsNull()) return c;
    r.expect_keys(root, "", {"geometry", "optics", "pump", "mixture", "plan", "measurement", "tomography",
                             "quadrature", "pattern", "run"});

    if (const auto g = root["geometry"]) {
        r.expect_keys(g, "geometry", {"slit_count", "d", "a", "z_A"});
        r.read(g, "geometry", "slit_count", c.geometry.slit_count);
        r.read(g, "geometry", "d", c.geometry.d);
        r.read(g, "geometry", "a", c.geometry.a);
        r.read(g, "geometry", "z_A", c.geometry.z_a);
    }
    if (const auto o = root["optics"]) {
        r.expect_keys(o, "optics", {"lambda_pump", "lambda_down", "z"});
        r.read(o, "optics", "lambda_pump", c.optics.lambda_pump);
        r.read(o, "optics", "lambda_down", c.optics.lambda_down);
        r.read(o, "optics", "z", c.optics.z);
    }
    if (const auto p = root["pump"]) {
        r.expect_keys(p, "pump", {"arm1", "arm2"});
        for (auto [name, target] : {std::pair{"arm1", &c.arm1}, std::pair{"arm2", &c.arm2}}) {
            const auto arm = p[name];
            if (!arm) continue;
            const std::string path = std::string("pump.") + name;
            r.expect_keys(arm, path, {"kind", "width"});
            std::string kind = pump_kind_name(target->kind);
            r.read(arm, path, "kind", kind);
            try {
                target->kind = parse_pump_kind(kind, path + ".kind");
            } catch (const ValidationError&) {
                r.fail(path + ".kind", arm["kind"], "expected 'focused' or 'broad'");
            }
            r.read(arm, path, "width", target->width);
        }
    }
    if (const auto m = root["mixture"]) {
        r.expect_keys(m, "mixture", {"A", "B"});
        r.read(m, "mixture", "A", c.weight_a);
        r.read(m, "mixture", "B", c.weight_b);
    }
    if (const auto p = root["plan"]) {
        r.expect_keys(p, "plan", {"delta", "detector_half_width", "x_positions", "y_positions"});
        if (p["delta"]) {
            double v = 0.0;
            r.read(p, "plan", "delta", v);
            c.delta = v;
        }
        r.read(p, "plan", "detector_half_width", c.detector_half_width);
        for (auto [name, target] : {std::pair{"x_positions", &c.x_positions}, std::pair{"y_positions", &c.y_positions}}) {
            if (!p[name]) continue;
            std::vector<double> v;
            r.read(p, "plan", name, v);
            if (v.size() != 2) r.fail(std::string("plan.") + name, p[name], "expected two positions");
            *target = std::array<double, 2>{v[0], v[1]};
        }
    }
    if (const auto m = root["measurement"]) {
        r.expect_keys(m, "measurement", {"counts_per_setting", "noise"});
        r.read(m, "measurement", "counts_per_setting", c.counts_per_setting);
        if (m["noise"]) {
            std::string noise;
            r.read(m, "measurement", "noise", noise);
            try {
                c.noise = parse_noise_model(noise);
            } catch (const ValidationError&) {
                r.fail("measurement.noise", m["noise"], "expected 'multinomial' or 'poisson'");
            }
        }
    }
    if (const auto t = root["tomography"]) {
        r.expect_keys(t, "tomography", {"bootstrap_resamples"});
        r.read(t, "tomography", "bootstrap_resamples", c.bootstrap_resamples);
    }
    if (const auto q = root["quadrature"]) {
        r.expect_keys(q, "quadrature", {"abs_tol", "rel_tol", "max_intervals", "window"});
        r.read(q, "quadrature", "abs_tol", c.numerics.quadrature.abs_tol);
        r.read(q, "quadrature", "rel_tol", c.numerics.quadrature.rel_tol);
        r.read(q, "quadrature", "max_intervals", c.numerics.quadrature.max_intervals);
        r.read(q, "quadrature", "window", c.numerics.window);
    }
    if (const auto p = root["pattern"]) {
        r.expect_keys(p, "pattern", {"from", "to", "points"});
        r.read(p, "pattern", "from", c.pattern_from);
        r.read(p, "pattern", "to", c.pattern_to);
        r.read(p, "pattern", "points", c.pattern_points);
    }
    if (const auto run = root["run"]) {
        r.expect_keys(run, "run", {"seed", "output_dir"});
        r.read(run, "run", "seed", c.seed);
        r.read(run, "run", "output_dir", c.output_dir);
    }

    try {
        c.validate();
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        const std::string field = what.substr(0, what.find(':'));
        const auto it = lines.find(field);
        if (it != lines.end()) {
            throw ValidationError(field + " (line " + std::to_string(it->second) + ")" + what.substr(field.size()));
        }
        throw;
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(io::read_text(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string to_yaml(const ExperimentConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;

    out << YAML::Key << "geometry" << YAML::Comment("double-slit aperture, metres") << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "slit_count" << YAML::Value << c.geometry.slit_count;
    out << YAML::Key << "d" << YAML::Value << shortest(c.geometry.d) << YAML::Comment("centre spacing, experiment: 0.18 mm");
    out << YAML::Key << "a" << YAML::Value << shortest(c.geometry.a) << YAML::Comment("half-width, experiment: 2a = 0.09 mm");
    out << YAML::Key << "z_A" << YAML::Value << shortest(c.geometry.z_a) << YAML::Comment("crystal to slits, experiment: 200 mm");
    out << YAML::EndMap;

    out << YAML::Key << "optics" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "lambda_pump" << YAML::Value << shortest(c.optics.lambda_pump) << YAML::Comment("krypton laser, 413 nm");
    out << YAML::Key << "lambda_down" << YAML::Value << shortest(c.optics.lambda_down) << YAML::Comment("filters at 826 nm");
    out << YAML::Key << "z" << YAML::Value << shortest(c.optics.z)
        << YAML::Comment("detection plane, not measured; placed so 2 pi alpha / d = 1.376 mm");
    out << YAML::EndMap;

    out << YAML::Key << "pump" << YAML::Comment("Gaussian 1/e^2 radius at z_A") << YAML::Value << YAML::BeginMap;
    for (const auto& [name, pump] : {std::pair{"arm1", c.arm1}, std::pair{"arm2", c.arm2}}) {
        out << YAML::Key << name << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "kind" << YAML::Value << pump_kind_name(pump.kind);
        out << YAML::Key << "width" << YAML::Value << shortest(pump.width);
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "mixture" << YAML::Comment("arm probabilities") << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "A" << YAML::Value << shortest(c.weight_a);
    out << YAML::Key << "B" << YAML::Value << shortest(c.weight_b);
    out << YAML::EndMap;

    out << YAML::Key << "plan" << YAML::Value << YAML::BeginMap;
    if (c.delta) out << YAML::Key << "delta" << YAML::Value << shortest(*c.delta);
    out << YAML::Key << "detector_half_width" << YAML::Value << shortest(c.detector_half_width)
        << YAML::Comment("detector slits 0.1 mm wide");
    if (c.x_positions) {
        out << YAML::Key << "x_positions" << YAML::Value << YAML::Flow << YAML::BeginSeq << shortest((*c.x_positions)[0])
            << shortest((*c.x_positions)[1]) << YAML::EndSeq;
    }
    if (c.y_positions) {
        out << YAML::Key << "y_positions" << YAML::Value << YAML::Flow << YAML::BeginSeq << shortest((*c.y_positions)[0])
            << shortest((*c.y_positions)[1]) << YAML::EndSeq;
    }
    out << YAML::EndMap;

    out << YAML::Key << "measurement" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "counts_per_setting" << YAML::Value << c.counts_per_setting
        << YAML::Comment("not reported experimentally");
    out << YAML::Key << "noise" << YAML::Value << to_string(c.noise);
    out << YAML::EndMap;

    out << YAML::Key << "tomography" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "bootstrap_resamples" << YAML::Value << c.bootstrap_resamples;
    out << YAML::EndMap;

    out << YAML::Key << "quadrature" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "abs_tol" << YAML::Value << shortest(c.numerics.quadrature.abs_tol);
    out << YAML::Key << "rel_tol" << YAML::Value << shortest(c.numerics.quadrature.rel_tol);
    out << YAML::Key << "max_intervals" << YAML::Value << c.numerics.quadrature.max_intervals;
    out << YAML::Key << "window" << YAML::Value << shortest(c.numerics.window);
    out << YAML::EndMap;

    out << YAML::Key << "pattern" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "from" << YAML::Value << shortest(c.pattern_from);
    out << YAML::Key << "to" << YAML::Value << shortest(c.pattern_to);
    out << YAML::Key << "points" << YAML::Value << c.pattern_points;
    out << YAML::EndMap;

    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << c.seed;
    out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace spatialqt
