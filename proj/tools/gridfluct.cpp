// Command-line front end: synchronous state, variance routes, comparisons, sweeps and
// Monte Carlo estimates for a stochastically disturbed power network.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridfluct/errors.hpp"
#include "gridfluct/io.hpp"
#include "gridfluct/monte_carlo.hpp"
#include "gridfluct/swing.hpp"

namespace {

using namespace gridfluct;

struct Common {
    std::string format = "csv";
    std::string output = "-";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-o,--output", c.output, "Output file ('-' for stdout)");
}

LinearizedSystem linearized(const PowerNetwork& net) { return linearize(net, solve_synchronous_state(net)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary frequency and phase-angle fluctuations of stochastically disturbed power networks"};
    app.require_subcommand(1);

    Common common;
    std::string network_path;
    std::string method = "numeric";
    std::string sweep_path;
    std::string mc_path;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;

    auto* solve = app.add_subcommand("solve", "Synchronous state and per-line security margins");
    solve->add_option("network", network_path, "Network file")->required();
    add_common(solve, common);

    auto* variance = app.add_subcommand("variance", "Stationary covariance by one route");
    variance->add_option("network", network_path, "Network file")->required();
    variance->add_option("--method", method, "numeric, uniform, closed or first-order")
        ->check(CLI::IsMember({"numeric", "uniform", "closed", "first-order"}));
    add_common(variance, common);

    auto* compare = app.add_subcommand("compare", "All applicable routes and their discrepancy to the numeric route");
    compare->add_option("network", network_path, "Network file")->required();
    add_common(compare, common);

    auto* sweep = app.add_subcommand("sweep", "Evaluate routes over a parameter grid");
    sweep->add_option("--spec", sweep_path, "Sweep file")->required();
    sweep->add_option("--threads", threads, "Worker threads (default: GRIDFLUCT_THREADS or all cores)");
    add_common(sweep, common);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the stationary covariance");
    simulate->add_option("network", network_path, "Network file")->required();
    simulate->add_option("--mc-config", mc_path, "Simulation settings file")->required();
    simulate->add_option("--seed", seed, "Master seed (overrides the settings file)");
    simulate->add_option("--threads", threads, "Worker threads (default: GRIDFLUCT_THREADS or all cores)");
    add_common(simulate, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const bool json = common.format == "json";
    try {
        if (*solve) {
            const PowerNetwork net = load_network(network_path);
            const SynchronousState st = solve_synchronous_state(net);
            const SecurityReport sec = security_check(st, net);
            write_output(common.output, json ? state_to_json(net, st, sec) : state_to_csv(net, st, sec));
            if (!sec.secure) {
                std::cerr << "warning: synchronous state violates the security condition |angle difference| < pi/2\n";
            }
        } else if (*variance) {
            const PowerNetwork net = load_network(network_path);
            const CovarianceReport rep = run_variance(linearized(net), parse_method(method));
            write_output(common.output, json ? report_to_json(rep, &net) : report_to_csv(rep));
        } else if (*compare) {
            const PowerNetwork net = load_network(network_path);
            const Comparison cmp = run_compare(linearized(net));
            write_output(common.output, json ? comparison_to_json(cmp) : comparison_to_csv(cmp));
            for (const auto& s : cmp.skipped) std::cerr << "skipped " << s << '\n';
        } else if (*sweep) {
            const std::string dir = std::filesystem::path(sweep_path).parent_path().string();
            const SweepSpec spec = parse_sweep(read_file(sweep_path), dir.empty() ? "." : dir, sweep_path);
            const SweepTable table = run_sweep(spec, threads);
            write_output(common.output, json ? sweep_to_json(table) : sweep_to_csv(table));
        } else if (*simulate) {
            const PowerNetwork net = load_network(network_path);
            SimConfig cfg = parse_sim_config(read_file(mc_path), mc_path);
            if (seed) cfg.master_seed = *seed;
            const CovarianceReport rep = simulate_covariance(linearized(net), cfg, threads);
            write_output(common.output, json ? report_to_json(rep, &net) : report_to_csv(rep));
        }
    } catch (const AssumptionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
