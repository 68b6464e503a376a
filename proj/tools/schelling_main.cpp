#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "schelling/errors.hpp"
#include "schelling/io.hpp"

namespace fs = std::filesystem;
using namespace schelling;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitComputation = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    bool allow_n4 = false;
};

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

int enumeration_cap(const CommonArgs& args) { return args.allow_n4 ? 4 : 3; }

int cmd_simulate(const CommonArgs& args, std::optional<uint64_t> seed_override,
                 long long snapshot_every) {
    RunConfig config = load_run_config(args.config_path);
    if (seed_override) config.seed = *seed_override;
    config.validate();

    fs::path out = prepare_out_dir(args.out_dir);
    TorusGrid grid = config.grid();
    SchedulerSpec spec = config.build_scheduler();

    RunHooks hooks;
    if (snapshot_every > 0) {
        fs::create_directories(out / "snapshots");
        hooks.snapshot_every = snapshot_every;
        hooks.on_snapshot = [&](long long step, const Configuration& c) {
            char name[32];
            std::snprintf(name, sizeof(name), "step_%08lld.ppm", step);
            write_ppm(out / "snapshots" / name, grid, c);
        };
    }

    RunResult result = run(config, grid, spec, hooks);

    nlohmann::ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["run_config"] = run_config_to_json(config);
    write_manifest(out, "simulate", manifest);
    write_trace_jsonl(out / "trace.jsonl", result.trace);
    write_json(out / "summary.json", summary_to_json(result.summary));

    std::cout << "simulate: " << config.steps << " steps, mean potential "
              << result.summary.mean_potential << ", mean bichromatic edges "
              << result.summary.mean_bichromatic << "\n";
    std::cout << "outputs written to " << out.string() << "\n";
    return kExitOk;
}

int cmd_exact(const CommonArgs& args, const std::string& betas_text) {
    RunConfig config = load_run_config(args.config_path);
    std::vector<double> betas =
        betas_text.empty() ? std::vector<double>{config.beta} : parse_beta_list(betas_text);

    fs::path out = prepare_out_dir(args.out_dir);
    TorusGrid grid = config.grid();
    SchedulerSpec spec = config.build_scheduler();
    StateSpace space = enumerate(grid, config.red_count, spec, enumeration_cap(args));

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (double beta : betas) {
        ModelParams params = config.params();
        params.beta = beta;
        StationaryDistribution dist = stationary(build_matrix(space, spec, params));
        std::vector<double> mass = project_to_configs(space, dist);

        nlohmann::ordered_json row;
        row["beta"] = beta;
        row["residual"] = dist.residual;
        row["num_states"] = space.num_states();
        nlohmann::ordered_json configs = nlohmann::ordered_json::array();
        for (std::size_t ci = 0; ci < space.num_configs(); ++ci) {
            nlohmann::ordered_json c;
            c["config"] = configuration_to_string(space.config_at(ci));
            c["mask"] = space.config_masks[ci];
            c["probability"] = mass[ci];
            configs.push_back(c);
        }
        row["configs"] = configs;
        rows.push_back(row);
        std::cout << "exact: beta " << beta << " solved, residual " << dist.residual << "\n";
    }

    nlohmann::ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["betas"] = betas;
    manifest["run_config"] = run_config_to_json(config);
    write_manifest(out, "exact", manifest);
    nlohmann::ordered_json doc;
    doc["rows"] = rows;
    write_json(out / "exact.json", doc);
    std::cout << "outputs written to " << out.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& betas_text) {
    RunConfig config = load_run_config(args.config_path);
    std::vector<double> betas =
        betas_text.empty() ? std::vector<double>{config.beta} : parse_beta_list(betas_text);

    fs::path out = prepare_out_dir(args.out_dir);
    TorusGrid grid = config.grid();
    SchedulerSpec spec = config.build_scheduler();
    std::vector<BetaSweepEntry> table =
        beta_sweep(grid, config.red_count, spec, config.params(), betas, 5, enumeration_cap(args));

    nlohmann::ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["betas"] = betas;
    manifest["run_config"] = run_config_to_json(config);
    write_manifest(out, "sweep", manifest);
    write_json(out / "sweep.json", sweep_to_json(table, grid));
    write_text(out / "sweep.csv", sweep_to_csv(table, 5));
    for (const auto& entry : table)
        std::cout << "sweep: beta " << entry.beta << " mass on Q " << entry.mass_on_q << "\n";
    std::cout << "outputs written to " << out.string() << "\n";
    return kExitOk;
}

int cmd_stable(const CommonArgs& args) {
    RunConfig config = load_run_config(args.config_path);
    fs::path out = prepare_out_dir(args.out_dir);
    TorusGrid grid = config.grid();
    SchedulerSpec spec = config.build_scheduler();

    auto violations = spec.validate();
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << to_string(v.kind) << ": " << v.message << "\n";
        return kExitValidation;
    }

    StateSpace space = enumerate(grid, config.red_count, spec, enumeration_cap(args));
    StableReport report = stable_report(space, spec, config.params());

    nlohmann::ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["run_config"] = run_config_to_json(config);
    write_manifest(out, "stable", manifest);
    write_json(out / "stable.json", stable_report_to_json(report, space, config.r));

    std::cout << "stable: " << report.stable_states.size() << " states over "
              << report.stable_config_masks.size() << " configurations, min resistance "
              << report.min_total_resistance << "\n";
    std::cout << "subset of max-segregated: " << (report.subset_of_max_segregated ? "yes" : "no")
              << "\n";
    std::cout << "outputs written to " << out.string() << "\n";
    return kExitOk;
}

int cmd_minseg(int n, int red, int cap, const std::string& out_dir) {
    TorusGrid grid(n);
    MaxSegregatedSet result = max_segregated(grid, red, cap);
    std::cout << "minimum bichromatic edges: " << result.min_bichromatic_edges << "\n";
    std::cout << "argmin configurations: " << result.config_masks.size() << "\n";
    if (!out_dir.empty()) {
        fs::path out = prepare_out_dir(out_dir);
        nlohmann::ordered_json manifest;
        manifest["n"] = n;
        manifest["red_count"] = red;
        manifest["cap"] = cap;
        write_manifest(out, "minseg", manifest);
        nlohmann::ordered_json j;
        j["min_bichromatic_edges"] = result.min_bichromatic_edges;
        j["argmin_count"] = result.config_masks.size();
        nlohmann::ordered_json configs = nlohmann::ordered_json::array();
        for (uint32_t mask : result.config_masks)
            configs.push_back(configuration_to_string(configuration_from_mask(grid, mask)));
        j["argmin_configurations"] = configs;
        write_json(out / "minseg.json", j);
        std::cout << "outputs written to " << out.string() << "\n";
    }
    return kExitOk;
}

int cmd_validate_scheduler(int n, const std::string& file) {
    TorusGrid grid(n);
    SchedulerSpec spec = load_scheduler_file(grid, file);
    auto violations = spec.validate();
    if (violations.empty()) {
        std::cout << "scheduler ok: " << spec.num_pairs() << " pairs\n";
        return kExitOk;
    }
    for (const auto& v : violations)
        std::cerr << to_string(v.kind) << ": " << v.message << "\n";
    std::cerr << violations.size() << " violation(s)\n";
    return kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schelling segregation on a torus: simulation, exact chain analysis, "
                 "and stochastic stability"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string betas_text;
    long long snapshot_every = 0;
    std::optional<uint64_t> seed_override;

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run from a JSON config");
    simulate->add_option("--config", common.config_path, "run config JSON")->required();
    simulate->add_option("--seed", seed_override, "override the config seed");
    simulate->add_option("--out", common.out_dir, "output directory");
    simulate->add_option("--snapshot-every", snapshot_every, "write a PPM every k steps");

    auto* exact_cmd = app.add_subcommand("exact", "exact stationary distribution per beta");
    exact_cmd->add_option("--config", common.config_path, "run config JSON")->required();
    exact_cmd->add_option("--betas", betas_text, "list '1,2,4' or geometric(a,b,k)");
    exact_cmd->add_option("--out", common.out_dir, "output directory");
    exact_cmd->add_flag("--allow-n4", common.allow_n4, "lift the enumeration cap to 4x4");

    auto* sweep = app.add_subcommand("sweep", "mass on the max-segregated set across betas");
    sweep->add_option("--config", common.config_path, "run config JSON")->required();
    sweep->add_option("--betas", betas_text, "list '1,2,4' or geometric(a,b,k)");
    sweep->add_option("--out", common.out_dir, "output directory");
    sweep->add_flag("--allow-n4", common.allow_n4, "lift the enumeration cap to 4x4");

    auto* stable = app.add_subcommand("stable", "stochastically stable states");
    stable->add_option("--config", common.config_path, "run config JSON")->required();
    stable->add_option("--out", common.out_dir, "output directory");
    stable->add_flag("--allow-n4", common.allow_n4, "lift the enumeration cap to 4x4");

    int n = 3, red = 0, cap = 4;
    std::string minseg_out;
    auto* minseg = app.add_subcommand("minseg", "exhaustive minimum bichromatic edge count");
    minseg->add_option("--n", n, "torus side")->required();
    minseg->add_option("--red", red, "number of +1 agents")->required();
    minseg->add_option("--cap", cap, "exhaustion cap on the torus side");
    minseg->add_option("--out", minseg_out, "optional output directory");

    std::string sched_file;
    int sched_n = 3;
    auto* validate = app.add_subcommand("validate-scheduler", "check a custom scheduler file");
    validate->add_option("--n", sched_n, "torus side")->required();
    validate->add_option("--file", sched_file, "scheduler file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(common, seed_override, snapshot_every);
        if (exact_cmd->parsed()) return cmd_exact(common, betas_text);
        if (sweep->parsed()) return cmd_sweep(common, betas_text);
        if (stable->parsed()) return cmd_stable(common);
        if (minseg->parsed()) return cmd_minseg(n, red, cap, minseg_out);
        if (validate->parsed()) return cmd_validate_scheduler(sched_n, sched_file);
    } catch (const TooLargeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const NoConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const UnreachableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
