#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biphoton/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = biphoton::cli;

    CLI::App app{"Two-photon imaging simulator: detection statistics, mimic states and theorem sweeps"};
    app.require_subcommand(1);

    cli::RunOptions run;
    std::string out_path, expect_path;
    auto* run_cmd = app.add_subcommand("run", "Evaluate the analyses requested by a scenario file");
    run_cmd->add_option("file", run.scenario_path, "Scenario JSON")->required();
    run_cmd->add_option("--out", out_path, "Write results here instead of stdout");
    run_cmd->add_option("--format", run.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    run_cmd->add_option("--expect", expect_path, "Compare against a previous JSON result (exit 1 on mismatch)");

    cli::VerifyOptions verify;
    std::string dims = "2..6";
    double tol = 0.0;
    std::string verify_json;
    std::optional<std::uint64_t> seed;
    auto* verify_cmd = app.add_subcommand("verify", "Randomized sweeps of the equivalence and mimic claims");
    verify_cmd->add_option("--trials", verify.trials, "Scenarios in the main sweep")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--dims", dims, "Mode-count range A..B");
    verify_cmd->add_option("--seed", seed, "Base seed (default $BIPHOTON_SEED or 42)");
    auto* tol_opt = verify_cmd->add_option("--tol", tol, "Override every sweep tolerance");
    verify_cmd->add_option("--json", verify_json, "Also write the sweep reports as JSON");

    std::string demo_json;
    auto* demo_cmd = app.add_subcommand("demo", "Four-mode entangled-state demonstration");
    demo_cmd->add_option("--json", demo_json, "Also write the demonstration report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kSchemaError;
    }

    if (*run_cmd) {
        if (!out_path.empty())
            run.out_path = out_path;
        if (!expect_path.empty())
            run.expect_path = expect_path;
        run.seed = cli::default_seed();
        return cli::cmd_run(run, std::cout, std::cerr);
    }
    if (*verify_cmd) {
        try {
            std::tie(verify.dim_min, verify.dim_max) = cli::parse_dim_range(dims);
        } catch (const biphoton::SchemaError& e) {
            std::cerr << e.what() << '\n';
            return cli::kSchemaError;
        }
        verify.seed = seed.value_or(cli::default_seed());
        if (*tol_opt)
            verify.tol = tol;
        if (!verify_json.empty())
            verify.json_path = verify_json;
        return cli::cmd_verify(verify, std::cout, std::cerr);
    }
    return cli::cmd_demo(std::cout, std::cerr, demo_json.empty() ? std::nullopt : std::optional<std::string>(demo_json));
}
