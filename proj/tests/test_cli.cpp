#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "biphoton/cli.hpp"
#include "test_support.hpp"

using namespace biphoton;
namespace cli = biphoton::cli;

namespace {

const std::string kScenarios = BIPHOTON_SCENARIO_DIR;

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("biphoton_test_" + name);
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto p = temp_file(name);
    std::ofstream(p) << content;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(cli::RunOptions opt) {
    std::ostringstream out, err;
    const int code = cli::cmd_run(opt, out, err);
    return {code, out.str(), err.str()};
}

json run_json(const std::string& scenario) {
    cli::RunOptions opt;
    opt.scenario_path = kScenarios + "/" + scenario;
    const RunResult r = run(opt);
    EXPECT_EQ(r.code, 0) << r.err;
    return json::parse(r.out);
}

} // namespace

TEST(CliRun, FourModeScenario) {
    const json j = run_json("entangled_four_mode.json");
    EXPECT_NEAR(j["joint"][0][0].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["joint"][1][1].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["joint"][0][1].get<double>(), 0.0, 1e-12);
    EXPECT_NEAR(j["joint"][1][0].get<double>(), 0.0, 1e-12);
    EXPECT_NEAR(j["p1"][0].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["p1_bar"][1].get<double>(), 0.5, 1e-12);
    EXPECT_GE(j["joint"][0][1].get<double>(), 0.0);
}

TEST(CliRun, BlockingLossScenario) {
    const json j = run_json("lossy_diag.json");
    EXPECT_NEAR(j["loss_decomposition"]["p0"].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["p1_bar"][1].get<double>(), 0.0, 1e-12);
    EXPECT_NEAR(j["p1_bar_via_gram"][0].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["mimic_product"]["p0"].get<double>(), 0.5, 1e-12);
    EXPECT_LE(j["mimic_product"]["max_bucket_deviation"].get<double>(), 1e-10);
    EXPECT_LE(j["mimic_holography"]["max_joint_deviation"].get<double>(), 1e-10);
    EXPECT_EQ(j["modes"]["m_primed"].get<int>(), 4);
    EXPECT_EQ(j["modes"]["window_primed"].get<int>(), 2);
}

TEST(CliRun, LosslessReferenceScenario) {
    const json j = run_json("lossless_reference.json");
    for (std::size_t q = 0; q < 3; ++q)
        EXPECT_NEAR(j["p1"][q].get<double>(), j["p1_bar"][q].get<double>(), 1e-10);
    EXPECT_NEAR(j["loss_decomposition"]["p0"].get<double>(), 0.0, 1e-12);
}

TEST(CliRun, HolographyScenario) {
    const json j = run_json("holography_mimic.json");
    EXPECT_EQ(j["mimic_holography"]["terms"].get<int>(), 2);
    EXPECT_LE(j["mimic_holography"]["max_joint_deviation"].get<double>(), 1e-10);
    EXPECT_LE(j["mimic_product"]["max_bucket_deviation"].get<double>(), 1e-10);
}

TEST(CliRun, NonUnitaryDeclaredUnitaryIsPhysicsError) {
    const std::string path = write_temp("nonunitary.json", R"({
      "modes": {"m_unprimed": 2, "m_primed": 2},
      "state": {"type": "pure", "amplitudes": [[[1,0],[0,0]],[[0,0],[0,0]]]},
      "object1": {"type": "identity"},
      "object2": {"type": "unitary", "matrix": [[[1,0],[0,0]],[[0,0],[0.5,0]]]}
    })");
    cli::RunOptions opt;
    opt.scenario_path = path;
    const RunResult r = run(opt);
    EXPECT_EQ(r.code, cli::kPhysicsError);
    EXPECT_NE(r.err.find("not unitary"), std::string::npos);
}

TEST(CliRun, SchemaErrorsNameThePath) {
    struct Case {
        const char* body;
        const char* path;
    };
    const Case cases[] = {
        {R"({"state": {}})", "/modes"},
        {R"({"modes": {"m_unprimed": 2, "m_primed": 2}, "state": {"type": "pure", "amplitudes": [[[1,0],[0,0]]]},
             "object1": {"type": "identity"}, "object2": {"type": "identity"}})",
         "/state/amplitudes"},
        {R"({"modes": {"m_unprimed": 2, "m_primed": 2}, "state": {"type": "pure", "amplitudes": [[[1,0],[0,0]],[[0,0],"x"]]},
             "object1": {"type": "identity"}, "object2": {"type": "identity"}})",
         "/state/amplitudes/1/1"},
        {R"({"modes": {"m_unprimed": 2, "m_primed": 2}, "state": {"type": "diagonal", "phi": [[1,0],[0,0]]},
             "object1": {"type": "mirror"}, "object2": {"type": "identity"}})",
         "/object1/type"},
        {R"({"modes": {"m_unprimed": 2, "m_primed": 2}, "state": {"type": "diagonal", "phi": [[1,0],[0,0]]},
             "object1": {"type": "identity"}, "object2": {"type": "identity"}, "analyses": ["everything"]})",
         "/analyses/0"},
        {R"({"modes": {"m_unprimed": 2, "m_primed": 2, "window_primed": 3}, "state": {"type": "diagonal", "phi": [[1,0],[0,0]]},
             "object1": {"type": "identity"}, "object2": {"type": "identity"}})",
         "/modes/window_primed"},
        {"{not json", "/"},
    };
    int k = 0;
    for (const auto& c : cases) {
        cli::RunOptions opt;
        opt.scenario_path = write_temp("schema" + std::to_string(k++) + ".json", c.body);
        const RunResult r = run(opt);
        EXPECT_EQ(r.code, cli::kSchemaError) << c.body;
        EXPECT_NE(r.err.find(c.path), std::string::npos) << r.err;
    }
}

TEST(CliRun, MissingFileIsSchemaError) {
    cli::RunOptions opt;
    opt.scenario_path = "/nonexistent/scenario.json";
    EXPECT_EQ(run(opt).code, cli::kSchemaError);
}

TEST(CliRun, HolographyMimicRefusesLossyReference) {
    const std::string path = write_temp("lossy_ref.json", R"({
      "modes": {"m_unprimed": 2, "m_primed": 2},
      "state": {"type": "diagonal", "phi": [[0.6,0],[0.8,0]]},
      "object1": {"type": "lossy", "matrix": [[[0.5,0],[0,0]],[[0,0],[1,0]]]},
      "object2": {"type": "identity"},
      "analyses": ["mimic_holography"]
    })");
    cli::RunOptions opt;
    opt.scenario_path = path;
    EXPECT_EQ(run(opt).code, cli::kPhysicsError);
}

TEST(CliRun, CsvFormat) {
    cli::RunOptions opt;
    opt.scenario_path = kScenarios + "/entangled_four_mode.json";
    opt.format = "csv";
    const RunResult r = run(opt);
    ASSERT_EQ(r.code, 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "statistic,q,q_primed,value");
    EXPECT_NE(r.out.find("\njoint,1,1,0.5"), std::string::npos);
    EXPECT_NE(r.out.find("\np1,2,,0.5"), std::string::npos);
    EXPECT_NE(r.out.find("\nloss_decomposition.p0,,,0\n"), std::string::npos);
    // 17 significant digits, '.' separator.
    EXPECT_EQ(fmt::format("{:.17g}", 0.1), "0.10000000000000001");
}

TEST(CliRun, OutputRoundTripsAsExpectedValues) {
    for (const char* name : {"entangled_four_mode.json", "lossless_reference.json", "lossy_diag.json", "holography_mimic.json"}) {
        const std::string first = temp_file(std::string("first_") + name).string();
        const std::string second = temp_file(std::string("second_") + name).string();
        cli::RunOptions opt;
        opt.scenario_path = kScenarios + "/" + name;
        opt.out_path = first;
        ASSERT_EQ(run(opt).code, 0);
        opt.out_path = second;
        opt.expect_path = first;
        const RunResult r = run(opt);
        EXPECT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(slurp(first), slurp(second));
    }
}

TEST(CliRun, ExpectMismatchFails) {
    const std::string expected = write_temp("wrong_expect.json", R"({"joint": [[1, 0], [0, 0]]})");
    cli::RunOptions opt;
    opt.scenario_path = kScenarios + "/entangled_four_mode.json";
    opt.out_path = temp_file("mismatch_out.json").string();
    opt.expect_path = expected;
    EXPECT_EQ(run(opt).code, cli::kFailure);
}

TEST(CliVerify, SmallRunPassesAndIsByteIdentical) {
    cli::VerifyOptions opt;
    opt.trials = 6;
    opt.dim_min = 2;
    opt.dim_max = 3;
    opt.seed = 5;
    std::ostringstream a, b, err;
    EXPECT_EQ(cli::cmd_verify(opt, a, err), 0) << a.str();
    EXPECT_EQ(cli::cmd_verify(opt, b, err), 0);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find("EXPECTED-FAIL"), std::string::npos);
    EXPECT_NE(a.str().find("splitmix64"), std::string::npos);
}

TEST(CliVerify, ForcedTinyToleranceFails) {
    cli::VerifyOptions opt;
    opt.trials = 4;
    opt.dim_min = 2;
    opt.dim_max = 3;
    opt.tol = 1e-16;
    opt.json_path = temp_file("verify.json").string();
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_verify(opt, out, err), cli::kFailure);
    EXPECT_NE(out.str().find("FAIL"), std::string::npos);
    EXPECT_NE(out.str().find("failures"), std::string::npos);
    EXPECT_NE(out.str().find("EXPECTED-FAIL"), std::string::npos);
    const json reports = read_json_file(*opt.json_path);
    ASSERT_EQ(reports.size(), 4u);
    bool replayable = false;
    for (const auto& r : reports)
        for (const auto& f : r["failures"])
            replayable = replayable || f["scenario"].contains("object2");
    EXPECT_TRUE(replayable);
}

TEST(CliVerify, DimRangeParsing) {
    EXPECT_EQ(cli::parse_dim_range("2..6"), (std::pair<std::size_t, std::size_t>{2, 6}));
    EXPECT_EQ(cli::parse_dim_range("3"), (std::pair<std::size_t, std::size_t>{3, 3}));
    EXPECT_THROW(cli::parse_dim_range("a..b"), SchemaError);
}

TEST(CliVerify, SeedFromEnvironment) {
    ::setenv("BIPHOTON_SEED", "1234", 1);
    EXPECT_EQ(cli::default_seed(), 1234u);
    ::setenv("BIPHOTON_SEED", "12x", 1);
    EXPECT_EQ(cli::default_seed(), cli::kDefaultSeed);
    ::unsetenv("BIPHOTON_SEED");
    EXPECT_EQ(cli::default_seed(), cli::kDefaultSeed);
}

TEST(CliDemo, PrintsTablesAndWritesJson) {
    std::ostringstream out, err;
    const std::string path = temp_file("demo.json").string();
    EXPECT_EQ(cli::cmd_demo(out, err, path), 0);
    EXPECT_NE(out.str().find("joint distributions differ by 0.500000"), std::string::npos);
    const json j = read_json_file(path);
    EXPECT_NEAR(j["joint"][0][0].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["flipped"]["joint"][0][1].get<double>(), 0.5, 1e-12);
}
