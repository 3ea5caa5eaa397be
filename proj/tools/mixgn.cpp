// mixgn: ground states and Gagliardo-Nirenberg constants for
// -Δu + (-Δ)^s u = |u|^{p-2}u on a periodic box.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mixgn/cli.hpp"

namespace {

void add_common(CLI::App* sub, mixgn::cli::RunConfig& cfg)
{
    sub->add_option("--dim", cfg.params.N, "spatial dimension N")->capture_default_str();
    sub->add_option("--s", cfg.params.s, "fractional order s in (0,1)")->capture_default_str();
    sub->add_option("--p", cfg.params.p, "nonlinearity exponent p")->capture_default_str();
    sub->add_option("--grid", cfg.grid.n, "samples per axis (power of two)")->capture_default_str();
    sub->add_option("--box", cfg.grid.half_width, "box half-width L")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--report", cfg.report, "JSON report path (stdout if omitted)");
    sub->add_flag("--no-timestamp", "omit timestamps and wall time from reports")->each([&cfg](const std::string&) {
        cfg.timestamp = false;
    });
}

void add_solver(CLI::App* sub, mixgn::cli::RunConfig& cfg)
{
    sub->add_option("--tol", cfg.solver.tol, "relative stopping tolerance")->capture_default_str();
    sub->add_option("--max-iter", cfg.solver.max_iter, "iteration cap")->capture_default_str();
    sub->add_option("--gamma", cfg.solver.gamma, "stabilizer exponent (default (p-1)/(p-2))");
    sub->add_flag("--dealias", cfg.solver.dealias, "2/3-rule truncation of the nonlinear term");
}

} // namespace

int main(int argc, char** argv)
{
    mixgn::cli::RunConfig cfg;
    CLI::App app{"Ground states and Gagliardo-Nirenberg best constants for the mixed local/nonlocal equation"};
    app.set_version_flag("--version", mixgn::cli::kVersion);
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "compute a ground state and report the best constant");
    add_common(solve, cfg);
    add_solver(solve, cfg);
    solve->add_option("--out", cfg.out, "output field file (FLD1)");
    solve->add_option("--samples", cfg.samples, "random fields for Weinstein sampling (0 = skip)")
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify", "check identities on a stored field");
    add_common(verify, cfg);
    verify->add_option("--in", cfg.in, "input field file (FLD1)")->required();

    auto* sweep = app.add_subcommand("sweep", "solve over a range of p or s and write CSV");
    add_common(sweep, cfg);
    add_solver(sweep, cfg);
    sweep->add_option("--axis", cfg.axis, "sweep axis: p or s")->capture_default_str();
    sweep->add_option("--from", cfg.from, "first value")->required();
    sweep->add_option("--to", cfg.to, "last value")->required();
    sweep->add_option("--steps", cfg.steps, "number of points")->required();
    sweep->add_option("--out", cfg.out, "CSV path (stdout if omitted)");

    auto* oracle = app.add_subcommand("oracle", "closed-form and derivative oracles");
    add_common(oracle, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        mixgn::cli::emit_error(std::cerr, "usage", e.what(), mixgn::cli::kParameterError);
        return mixgn::cli::kParameterError;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "oracle") {
        // Oracle grid large enough for the |xi|^{2s} lattice-sum error to fall below 1e-5.
        if (oracle->get_option("--grid")->count() == 0) {
            cfg.grid.n = 128;
        }
        if (oracle->get_option("--box")->count() == 0) {
            cfg.grid.half_width = 32.0;
        }
    }
    return mixgn::cli::run(cfg, std::cout, std::cerr);
}
