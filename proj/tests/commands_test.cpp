#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "spatialqt/commands.hpp"
#include "spatialqt/error.hpp"
#include "spatialqt/io.hpp"
#include "test_support.hpp"

using namespace spatialqt;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "spatialqt_commands_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig quick_config() {
    auto c = default_config();
    c.bootstrap_resamples = 20;
    c.pattern_points = 41;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPATIALQT_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Generate, WritesStatesAndPhysicalMixture) {
    const auto dir = fresh_dir("generate");
    const auto c = quick_config();
    const auto s = cmd_generate(c, dir);
    for (auto name : {"state_arm1.json", "state_arm2.json", "rho_the.json"}) EXPECT_TRUE(fs::exists(dir / name));
    const auto rho = io::load_density(dir / "rho_the.json");
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_TRUE(schwarz_check(rho.matrix()).empty());
    const auto arm2 = std::get<PureState2Q>(io::load_state_file(dir / "state_arm2.json"));
    EXPECT_NEAR(std::arg(arm2[1] / arm2[0]), arm_phase(c.geometry, c.optics), 1e-12);
}

TEST(Generate, PureMixtureIsTheArmOneProjector) {
    auto c = quick_config();
    c.weight_a = 1.0;
    c.weight_b = 0.0;
    const auto s = generate_states(c);
    EXPECT_LT(frobenius_distance(s.mixture, DensityMatrix::projector(s.arm1)), 1e-15);
}

TEST(Simulate, DeterministicRowsAndSeedHeader) {
    const auto c = quick_config();
    const auto a = fresh_dir("sim_a");
    const auto b = fresh_dir("sim_b");
    cmd_generate(c, a);
    cmd_simulate(c, a / "rho_the.json", a);
    cmd_simulate(c, a / "rho_the.json", b);
    const auto text = io::read_text(a / "counts.csv");
    EXPECT_EQ(text, io::read_text(b / "counts.csv"));
    EXPECT_TRUE(text.starts_with("# seed=1\n"));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2 + 9 * 4);
    EXPECT_THROW(cmd_simulate(c, a / "missing.json", a), ValidationError);
}

TEST(Reconstruct, NoiselessAndTruncatedInputs) {
    const auto dir = fresh_dir("reconstruct");
    auto c = quick_config();
    const auto states = cmd_generate(c, dir);
    cmd_simulate(c, dir / "rho_the.json", dir);
    const auto r = cmd_reconstruct(c, dir / "counts.csv", dir);
    EXPECT_LT(frobenius_distance(r.rho, states.mixture), 0.02);
    EXPECT_TRUE(r.error_real.has_value());
    EXPECT_TRUE(fs::exists(dir / "result.txt"));

    // Drop the last setting.
    auto text = io::read_text(dir / "counts.csv");
    text = text.substr(0, text.find("ZZ,"));
    io::write_text(dir / "truncated.csv", text);
    try {
        cmd_reconstruct(c, dir / "truncated.csv", dir / "t");
        FAIL();
    } catch (const InsufficientDataError& e) {
        EXPECT_STREQ(e.what(), "missing settings: ZZ");
    }
}

TEST(Reconstruct, ExactCountsAreRecovered) {
    // A state whose probabilities times 10^6 are integers is recovered exactly.
    const auto dir = fresh_dir("exact");
    auto c = quick_config();
    c.bootstrap_resamples = 0;
    const auto model = build_model(c);
    std::vector<CountsRecord> records;
    const auto rho = DensityMatrix::maximally_mixed();
    for (const auto& s : all_settings()) {
        const auto p = model.probabilities(rho.matrix(), s);
        CountsRecord rec{s, {}, 1000000, 0};
        for (int o = 0; o < 4; ++o) rec.counts[o] = static_cast<std::uint64_t>(std::llround(p[o] * 1e6));
        records.push_back(rec);
    }
    io::write_text(dir / "counts.csv", io::counts_to_csv(records, 0));
    const auto r = cmd_reconstruct(c, dir / "counts.csv", dir);
    EXPECT_LT((r.rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Histogram, PanelsFromFiles) {
    const auto dir = fresh_dir("histogram");
    const auto c = quick_config();
    cmd_generate(c, dir);
    io::write_json(dir / "result.json", io::result_to_json(assemble_matrix(experimental_rho())));
    cmd_histogram(dir / "result.json", dir / "rho_the.json", dir / "state_arm2.json", dir);
    const auto text = io::read_text(dir / "histogram.csv");
    EXPECT_NE(text.find("measured,+-,-+,0.444"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "decomposition.json"));
    EXPECT_THROW(cmd_histogram(dir / "result.json", dir / "rho_the.json", dir / "rho_the.json", dir),
                 ValidationError);

    // Identical inputs give identical panels.
    io::write_json(dir / "same.json", io::result_to_json(assemble_matrix(io::load_density(dir / "rho_the.json").matrix())));
    cmd_histogram(dir / "same.json", dir / "rho_the.json", dir / "state_arm2.json", dir / "same");
    const auto same = io::read_text(dir / "same" / "histogram.csv");
    std::array<std::vector<std::string>, 3> panels;
    std::istringstream is(same);
    std::string line;
    std::getline(is, line);
    int n = 0;
    while (std::getline(is, line)) panels[n++ / 16].push_back(line.substr(line.find(',')));
    EXPECT_EQ(panels[0], panels[2]);
}

TEST(Pipeline, ByteIdenticalReruns) {
    const auto c = quick_config();
    const auto a = fresh_dir("pipe_a");
    const auto b = fresh_dir("pipe_b");
    cmd_pipeline(c, a);
    cmd_pipeline(c, b);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        ++files;
        EXPECT_EQ(io::read_text(entry.path()), io::read_text(b / entry.path().filename())) << entry.path();
    }
    EXPECT_EQ(files, 11u);
}

TEST(Cli, ExitCodes) {
    const auto dir = fresh_dir("cli");
    EXPECT_EQ(run_cli("generate --out " + dir.string()), 0);
    EXPECT_EQ(run_cli("simulate --state " + (dir / "rho_the.json").string() + " --out " + dir.string() +
                      " --counts 2000 --seed 5"),
              0);
    EXPECT_EQ(run_cli("reconstruct --input " + (dir / "counts.csv").string() + " --out " + dir.string()), 0);
    EXPECT_EQ(run_cli("simulate --state " + (dir / "nope.json").string() + " --out " + dir.string()), 2);
    EXPECT_EQ(run_cli("generate --noise gaussian --out " + dir.string()), 2);

    std::ofstream(dir / "bad.yaml") << "geometry:\n  spacing: 1\n";
    EXPECT_EQ(run_cli("generate --config " + (dir / "bad.yaml").string()), 2);

    // A Schwarz-violating input survives reconstruction; --strict turns that into a failure.
    io::write_json(dir / "unphysical.json",
                   io::density_to_json(DensityMatrix([] {
                       Matrix4c m = Matrix4c::Identity() / 4.0;
                       m(0, 3) = m(3, 0) = 0.27;  // |rho_03| > 0.25
                       return m;
                   }())));
    EXPECT_EQ(run_cli("simulate --state " + (dir / "unphysical.json").string() + " --out " + dir.string() +
                      " --counts 1000000 --seed 2"),
              0);
    EXPECT_EQ(run_cli("reconstruct --input " + (dir / "counts.csv").string() + " --out " + dir.string()), 0);
    EXPECT_EQ(run_cli("reconstruct --strict --input " + (dir / "counts.csv").string() + " --out " + dir.string()), 3);
}
