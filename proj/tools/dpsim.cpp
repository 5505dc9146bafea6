// Command-line front end: run comparison scenarios, refit exported series.

#include "dpsim/config.hpp"
#include "dpsim/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

struct RunOptions
{
    std::vector<std::string> scenarios{"all"};
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<int> ticks;
    std::string out;
    std::string config_file;
    std::vector<std::string> settings;
    bool emit_svg = false;
    bool emit_cost_ledger = false;
};

struct FitOptions
{
    std::string csv;
    std::string column = "dualpath_ms";
    int degree = 1;
};

int run(const RunOptions& opt)
{
    using namespace dpsim;

    std::vector<harness::ScenarioId> ids;
    for (const auto& name : opt.scenarios) {
        if (name == "all") {
            ids.assign(std::begin(harness::kAllScenarios), std::end(harness::kAllScenarios));
            continue;
        }
        const auto id = harness::parse_scenario(name);
        if (!id) {
            std::cerr << "dpsim: unknown scenario '" << name << "' (expected S1..S5, R1..R4 or all)\n";
            return kUsageError;
        }
        if (std::find(ids.begin(), ids.end(), *id) == ids.end())
            ids.push_back(*id);
    }

    sim::SimConfig cfg;
    try {
        if (!opt.config_file.empty())
            load_config_file(cfg, opt.config_file);
        for (const auto& s : opt.settings)
            apply_assignment(cfg, s);
    } catch (const ValidationError& e) {
        std::cerr << "dpsim: " << e.what() << "\n";
        return kUsageError;
    } catch (const IoError& e) {
        std::cerr << "dpsim: " << e.what() << "\n";
        return kUsageError;
    }
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.reps)
        cfg.reps = *opt.reps;
    if (opt.ticks)
        cfg.ticks = *opt.ticks;

    std::string out = opt.out;
    if (out.empty()) {
        const char* env = std::getenv("DPSIM_OUT");
        out = env && *env ? env : "results";
    }

    try {
        cfg.validate();
        for (auto id : ids)
            harness::scenario_spec(id).schedule(cfg); // schedule errors surface before any run

        std::ofstream ledger;
        if (opt.emit_cost_ledger) {
            std::filesystem::create_directories(out);
            ledger.open(std::filesystem::path(out) / "cost_ledger.txt", std::ios::binary | std::ios::trunc);
            if (!ledger)
                throw IoError("cannot write cost ledger in " + out);
        }

        std::vector<harness::ScenarioSeries> results;
        for (auto id : ids) {
            const auto t0 = std::chrono::steady_clock::now();
            std::cerr << "running " << harness::to_string(id) << " (" << harness::scenario_spec(id).title << ")..."
                      << std::flush;
            results.push_back(harness::run_scenario(harness::scenario_spec(id), cfg, ledger ? &ledger : nullptr));
            const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::fprintf(stderr, " %.1fs\n", secs);
        }
        harness::export_report(results, out, opt.emit_svg);

        for (const auto& s : results) {
            const auto n = static_cast<double>(s.ticks.size());
            std::printf("%s crowds_mean_ms=%.3f dualpath_mean_ms=%.3f mean_improvement=%.4f\n",
                        std::string(harness::to_string(s.id)).c_str(),
                        std::accumulate(s.crowds.begin(), s.crowds.end(), 0.0) / n,
                        std::accumulate(s.dualpath.begin(), s.dualpath.end(), 0.0) / n,
                        std::accumulate(s.improvement.begin(), s.improvement.end(), 0.0) / n);
        }
    } catch (const std::exception& e) {
        std::cerr << "dpsim: " << e.what() << "\n";
        return kRunError;
    }
    return 0;
}

int fit(const FitOptions& opt)
{
    using namespace dpsim;
    try {
        std::string column = opt.column;
        if (column == "crowds" || column == "dualpath")
            column += "_ms";
        const auto table = harness::read_csv(opt.csv);
        const auto& y = table.column(column);
        const auto& x = table.column("tick");
        const auto f = fit_polynomial(x, y, opt.degree);
        std::printf("column: %s, degree %d, %zu points\n", column.c_str(), opt.degree, y.size());
        std::printf("coefficients (highest power first):");
        for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it)
            std::printf(" %.15g", *it == 0.0 ? 0.0 : *it);
        std::printf("\nequation: %s\nr2: %.6f\n", f.describe(6).c_str(), f.r2);
    } catch (const std::exception& e) {
        std::cerr << "dpsim: " << e.what() << "\n";
        return kRunError;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-Path vs Crowds delay simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "run scenarios and write CSV reports");
    run_cmd->add_option("--scenario", run_opt.scenarios, "S1..S5, R1..R4 or all (repeatable)");
    run_cmd->add_option("--seed", run_opt.seed, "root random seed");
    run_cmd->add_option("--reps", run_opt.reps, "transactions averaged per tick");
    run_cmd->add_option("--ticks", run_opt.ticks, "points on the time axis");
    run_cmd->add_option("--out", run_opt.out, "output directory (default $DPSIM_OUT or ./results)");
    run_cmd->add_option("--config", run_opt.config_file, "key=value defaults file");
    std::string keys;
    for (const auto& k : dpsim::setting_keys())
        keys += (keys.empty() ? "" : ", ") + k;
    run_cmd->add_option("--set", run_opt.settings, "override a setting, key=value (repeatable). Keys: " + keys);
    run_cmd->add_flag("--emit-svg", run_opt.emit_svg, "also write one SVG chart per scenario");
    run_cmd->add_flag("--emit-cost-ledger", run_opt.emit_cost_ledger,
                      "write every cost term to cost_ledger.txt (large)");

    FitOptions fit_opt;
    auto* fit_cmd = app.add_subcommand("fit", "least-squares polynomial over an exported CSV column");
    fit_cmd->add_option("csv", fit_opt.csv, "scenario CSV")->required();
    fit_cmd->add_option("--column", fit_opt.column, "crowds_ms, dualpath_ms or improvement");
    fit_cmd->add_option("--degree", fit_opt.degree, "polynomial degree")->check(CLI::Range(0, 8));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    if (*run_cmd)
        return run(run_opt);
    return fit(fit_opt);
}
