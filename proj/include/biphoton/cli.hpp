#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "biphoton/detection.hpp"
#include "biphoton/mimicry.hpp"
#include "biphoton/scenario.hpp"
#include "biphoton/verify.hpp"

namespace biphoton::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kSchemaError = 2, kPhysicsError = 3 };

inline constexpr std::uint64_t kDefaultSeed = 42;

/// BIPHOTON_SEED if set and numeric, otherwise the built-in default.
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("BIPHOTON_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size())
                return v;
        } catch (const std::exception&) {
        }
    }
    return kDefaultSeed;
}

namespace detail {

template <class State>
json analyse(const Scenario& sc, const State& state) {
    const auto evolved = apply_objects(state, sc.object1, sc.object2);
    const DetectionReport report = clamped(loss_decomposition(evolved));
    json out{{"modes", modes_to_json(evolved.modes())}, {"state_type", sc.state_type}};
    for (Analysis a : sc.analyses) {
        switch (a) {
        case Analysis::joint:
            out["joint"] = real_matrix_to_json(report.joint);
            break;
        case Analysis::marginal:
            out["p1"] = real_vector_to_json(clamp_small_negatives(marginal_ignoring_primed(state, sc.object1)));
            break;
        case Analysis::bucket:
            out["p1_bar"] = real_vector_to_json(report.p1_bar);
            if (sc.diagonal)
                out["p1_bar_via_gram"] = real_vector_to_json(
                    clamp_small_negatives(bucket_via_gram(*sc.diagonal, gram_matrix(sc.object2), sc.object1)));
            break;
        case Analysis::loss_decomposition:
            out["loss_decomposition"] = json{{"p1", real_vector_to_json(report.p1)},
                                             {"p1_bar", real_vector_to_json(report.p1_bar)},
                                             {"p1_noclick", real_vector_to_json(report.p1_noclick)},
                                             {"p0", report.p0}};
            break;
        case Analysis::mimic_holography: {
            const ClassicalEnsemble mimic = holography_mimic(state, sc.object1);
            const RMatrix joint_mimic =
                clamp_small_negatives(RMatrix(joint_distribution(apply_objects(density_from_ensemble(mimic), sc.object1, sc.object2))));
            const RMatrix joint_raw = joint_distribution(evolved);
            out["mimic_holography"] = json{{"terms", mimic.terms().size()},
                                           {"joint", real_matrix_to_json(joint_mimic)},
                                           {"max_joint_deviation", max_abs(RMatrix(joint_mimic - joint_raw))}};
            break;
        }
        case Analysis::mimic_product: {
            const ProductMimic mimic = lossy_product_mimic(state, sc.object2, sc.spare_mode);
            const RVector bucket_mimic = bucket_marginal(apply_objects(density_from_ensemble(mimic.ensemble), sc.object1, sc.object2));
            const RVector bucket_raw = bucket_marginal(evolved);
            out["mimic_product"] = json{{"p0", mimic.p0},
                                        {"spare_mode", mimic.spare_mode + 1},
                                        {"physically_accessible", mimic.physically_accessible},
                                        {"p1_bar", real_vector_to_json(clamp_small_negatives(bucket_mimic))},
                                        {"max_bucket_deviation", (bucket_mimic - bucket_raw).cwiseAbs().maxCoeff()}};
            break;
        }
        }
    }
    return out;
}

inline void flatten_csv(const std::string& name, const json& value, std::ostream& os) {
    auto num = [](const json& v) -> std::string {
        if (v.is_boolean())
            return v.get<bool>() ? "1" : "0";
        if (v.is_number_integer())
            return std::to_string(v.get<std::int64_t>());
        return fmt::format("{:.17g}", v.get<double>());
    };
    if (value.is_object()) {
        for (const auto& [key, v] : value.items())
            flatten_csv(name.empty() ? key : name + "." + key, v, os);
    } else if (value.is_array()) {
        for (std::size_t q = 0; q < value.size(); ++q) {
            if (value[q].is_array()) {
                for (std::size_t qp = 0; qp < value[q].size(); ++qp)
                    os << name << ',' << q + 1 << ',' << qp + 1 << ',' << num(value[q][qp]) << '\n';
            } else {
                os << name << ',' << q + 1 << ",," << num(value[q]) << '\n';
            }
        }
    } else if (value.is_number() || value.is_boolean()) {
        os << name << ",,," << num(value) << '\n';
    } else if (value.is_string()) {
        os << name << ",,," << value.get<std::string>() << '\n';
    }
}

} // namespace detail

/// Evaluates every requested analysis of a loaded scenario.
inline json run_scenario(const Scenario& sc) {
    return std::visit([&](const auto& state) { return detail::analyse(sc, state); }, sc.state);
}

/// CSV with header `statistic,q,q_primed,value`; indices are 1-based mode numbers.
inline std::string results_to_csv(const json& results) {
    std::ostringstream os;
    os << "statistic,q,q_primed,value\n";
    detail::flatten_csv("", results, os);
    return os.str();
}

struct RunOptions {
    std::string scenario_path;
    std::optional<std::string> out_path;
    std::string format = "json";
    std::optional<std::string> expect_path;
    std::uint64_t seed = kDefaultSeed;
};

inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.format != "json" && opt.format != "csv") {
        err << "error: unknown format '" << opt.format << "' (json, csv)\n";
        return kSchemaError;
    }
    json results;
    try {
        results = run_scenario(load_scenario(opt.scenario_path, opt.seed));
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kSchemaError;
    } catch (const DimensionError& e) {
        err << "schema error: " << e.what() << '\n';
        return kSchemaError;
    } catch (const Error& e) {
        err << "physics validation error: " << e.what() << '\n';
        return kPhysicsError;
    }

    const std::string text = opt.format == "json" ? results.dump(2) + "\n" : results_to_csv(results);
    if (opt.out_path) {
        std::ofstream f(*opt.out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write '" << *opt.out_path << "'\n";
            return kFailure;
        }
        f << text;
    } else {
        out << text;
    }

    if (opt.expect_path) {
        json expected;
        try {
            expected = read_json_file(*opt.expect_path);
        } catch (const SchemaError& e) {
            err << "schema error: " << e.what() << '\n';
            return kSchemaError;
        }
        if (expected != results) {
            const json patch = json::diff(expected, results);
            err << "mismatch against " << *opt.expect_path << ": " << patch.dump() << '\n';
            return kFailure;
        }
        err << "matches " << *opt.expect_path << '\n';
    }
    return kOk;
}

struct VerifyOptions {
    std::size_t trials = 200;
    std::size_t dim_min = 2;
    std::size_t dim_max = 6;
    std::uint64_t seed = kDefaultSeed;
    std::optional<double> tol; ///< overrides every sweep's own tolerance
    std::optional<std::string> json_path;
};

/// Runs the four sweeps. The unitary-reference sweep uses `trials` scenarios; the two mimic
/// sweeps use trials/2; the oracle sweep uses trials/2 per mode pair up to 4x4.
inline std::vector<SweepReport> run_sweeps(const VerifyOptions& opt) {
    const std::size_t half = std::max<std::size_t>(1, opt.trials / 2);
    auto cfg = [&](std::size_t trials, double own_tol) {
        return SweepConfig{trials, opt.dim_min, opt.dim_max, opt.seed, opt.tol.value_or(own_tol)};
    };
    std::vector<SweepReport> reports;
    reports.push_back(sweep_unitary_reference(cfg(opt.trials, tol::kCrossPath)));
    reports.push_back(sweep_holography_mimic(cfg(half, tol::kCrossPath)));
    reports.push_back(sweep_product_mimic(cfg(half, tol::kCrossPath)));
    reports.push_back(sweep_oracle_agreement(cfg(half, tol::kExact)));
    return reports;
}

inline void print_sweep_table(const std::vector<SweepReport>& reports, std::uint64_t seed, std::ostream& os) {
    os << fmt::format("seed {} ({})\n\n", seed, kTrialSeedRule);
    os << fmt::format("{:<18} {:>9} {:>12} {:>9} {:>12} {:>8} {:>7}\n", "sweep", "evaluated", "max dev", "tol",
                      "loss resid", "failures", "status");
    for (const auto& r : reports)
        os << fmt::format("{:<18} {:>9} {:>12.3e} {:>9.0e} {:>12.3e} {:>8} {:>7}\n", r.name, r.evaluated,
                          r.max_deviation, r.config.tol, r.max_loss_residual, r.failures.size(),
                          r.passed() ? "PASS" : "FAIL");
    os << "\ncontrols (precondition deliberately broken)\n";
    for (const auto& r : reports)
        for (const auto& c : r.controls)
            os << fmt::format("  {:<18} {:<40} deviation {:.3e} (threshold {:.1e}) {}\n", r.name, c.name, c.deviation,
                              c.threshold, c.as_expected ? "EXPECTED-FAIL" : "UNEXPECTED");
    bool any_failure = false;
    for (const auto& r : reports)
        for (const auto& f : r.failures) {
            if (!any_failure)
                os << "\nfailures\n";
            any_failure = true;
            os << fmt::format("  {:<18} trial {:>5} {:<36} deviation {:.3e}\n", r.name, f.trial, f.what, f.deviation);
        }
}

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<SweepReport> reports;
    try {
        reports = run_sweeps(opt);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kSchemaError;
    }
    print_sweep_table(reports, opt.seed, out);
    if (opt.json_path) {
        json all = json::array();
        for (const auto& r : reports)
            all.push_back(to_json(r));
        std::ofstream f(*opt.json_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write '" << *opt.json_path << "'\n";
            return kFailure;
        }
        f << all.dump(2) << '\n';
    }
    bool ok = true;
    for (const auto& r : reports) {
        ok = ok && r.passed();
        for (const auto& c : r.controls)
            ok = ok && c.as_expected;
    }
    return ok ? kOk : kFailure;
}

inline int cmd_demo(std::ostream& out, std::ostream& err, const std::optional<std::string>& json_path = {}) {
    try {
        const DemonstrationReport r = run_demonstration();
        out << r.summary;
        if (json_path) {
            std::ofstream f(*json_path, std::ios::binary);
            if (!f) {
                err << "error: cannot write '" << *json_path << "'\n";
                return kFailure;
            }
            f << to_json(r).dump(2) << '\n';
        }
        return kOk;
    } catch (const DemonstrationFailure& e) {
        err << e.what() << '\n';
        return kFailure;
    }
}

/// Parses "A..B" (or a single "A").
inline std::pair<std::size_t, std::size_t> parse_dim_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = std::stoul(text);
            return {v, v};
        }
        return {std::stoul(text.substr(0, dots)), std::stoul(text.substr(dots + 2))};
    } catch (const std::exception&) {
        throw SchemaError("--dims", "expected A..B, got '" + text + "'");
    }
}

} // namespace biphoton::cli
