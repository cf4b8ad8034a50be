// elastic_reflect: simulation and transform analytics for one-dimensional
// diffusions reflected at a local-time-dependent boundary.
//
// Subcommands: phi, laplace, simulate, converge, compare, liquidate.
// Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elastic_reflect/config.hpp"
#include "elastic_reflect/estimator.hpp"
#include "elastic_reflect/laplace.hpp"
#include "elastic_reflect/liquidation.hpp"
#include "elastic_reflect/model.hpp"
#include "elastic_reflect/phi_solver.hpp"
#include "elastic_reflect/simulator.hpp"

namespace er = elastic_reflect;
using nlohmann::json;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw er::IoError("cannot open output file: " + path);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    auto out = open_output(path);
    out << text;
    if (!out) throw er::IoError("write failed: " + path);
}

std::string stem_of(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path;
    }
    return path.substr(0, dot);
}

struct Cli {
    std::string config_path;
    std::vector<std::string> overrides;
    unsigned threads = 0;
    std::string out_override;

    unsigned effective_threads() const {
        if (threads > 0) return threads;
        if (const char* env = std::getenv("ELASTIC_REFLECT_THREADS")) {
            const long v = std::atol(env);
            if (v > 0) return static_cast<unsigned>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }

    er::RunConfig load() const {
        json doc = er::load_config_file(config_path);
        for (const auto& o : overrides) er::apply_override(doc, o);
        er::RunConfig cfg = er::parse_config(doc);
        if (!out_override.empty()) cfg.output.path = out_override;
        return cfg;
    }
};

int cmd_phi(const Cli& cli) {
    auto cfg = cli.load();
    const auto model = er::validate_model(cfg.model);
    const auto& grid = cfg.phi_grid;
    model.require_in_domain(grid.lo, "phi_grid.lo");
    model.require_in_domain(grid.hi, "phi_grid.hi");

    er::LogDerivativeSolver solver(model, cfg.query.lambda);
    solver.prepare(grid.lo, grid.hi);

    std::string out = "x,u\n";
    for (long i = 0; i < grid.n; ++i) {
        const double x =
            grid.lo + (grid.hi - grid.lo) * static_cast<double>(i) /
                          static_cast<double>(grid.n - 1);
        out += fmt17(x) + "," + fmt17(solver.value(x)) + "\n";
    }
    write_text(cfg.output.path, out);
    return 0;
}

int cmd_laplace(const Cli& cli) {
    auto cfg = cli.load();
    const auto model = er::validate_model(cfg.model);
    er::LaplaceQuery q{model, cfg.boundary, cfg.query.lambda, cfg.query.ell,
                       cfg.query.eps};

    struct Row {
        std::optional<double> eps;
        er::LaplaceResult res;
    };
    std::vector<Row> rows;
    er::LaplaceQuery q_limit = q;
    q_limit.eps.reset();
    rows.push_back({std::nullopt, er::limit_lt(q_limit)});
    if (q.eps) {
        rows.push_back({q.eps, er::discrete_lt(q)});
        rows.push_back({q.eps, er::discrete_lt_product(q)});
    }

    if (cfg.output.format == "json") {
        json j = json::array();
        for (const auto& r : rows) {
            json row = {{"lambda", q.lambda},
                        {"ell", q.ell},
                        {"route", er::route_name(r.res.route)},
                        {"value", r.res.value},
                        {"quadrature_error", r.res.quadrature_error}};
            if (r.eps) row["eps"] = *r.eps;
            j.push_back(row);
        }
        write_text(cfg.output.path, j.dump(2) + "\n");
    } else {
        std::string out = "lambda,ell,eps,route,value,quadrature_error\n";
        for (const auto& r : rows) {
            out += fmt17(q.lambda) + "," + fmt17(q.ell) + ",";
            out += r.eps ? fmt17(*r.eps) : std::string();
            out += std::string(",") + er::route_name(r.res.route) + "," +
                   fmt17(r.res.value) + "," + fmt17(r.res.quadrature_error) + "\n";
        }
        write_text(cfg.output.path, out);
    }
    return 0;
}

int cmd_simulate(const Cli& cli) {
    auto cfg = cli.load();
    if (cfg.output.path.empty()) {
        throw er::ValidationError("output.path is required for simulate");
    }
    const auto model = er::validate_model(cfg.model);
    const auto path = er::simulate_reflected_path(model, cfg.boundary, cfg.scheme);

    std::string out = "t,x,l\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        out += fmt17(path.times[i]) + "," + fmt17(path.x_values[i]) + "," +
               fmt17(path.l_values[i]) + "\n";
    }
    write_text(cfg.output.path, out);

    json ledger = {{"eps", cfg.scheme.eps},
                   {"h", cfg.scheme.effective_step(model.spec.sigma0)},
                   {"T", cfg.scheme.T},
                   {"seed", cfg.scheme.seed},
                   {"path_index", cfg.scheme.path_index},
                   {"jump_times", path.jump_times},
                   {"aborted", path.aborted},
                   {"abort_reason", path.abort_reason}};
    write_text(stem_of(cfg.output.path) + ".jumps.json", ledger.dump(2) + "\n");
    return 0;
}

json report_to_json(const er::ConvergenceReport& report) {
    json rungs = json::array();
    for (const auto& r : report.rungs) {
        rungs.push_back({{"eps", r.eps},
                         {"mc_mean", r.mc_mean},
                         {"mc_se", r.mc_se},
                         {"analytic_discrete", r.analytic_discrete},
                         {"analytic_limit", r.analytic_limit},
                         {"ks_to_next", r.ks_to_next},
                         {"ucp_sup_median", r.ucp_sup_median},
                         {"max_jumps_in_window", r.max_jumps_in_window}});
    }
    return {{"lambda", report.lambda},
            {"ell", report.ell},
            {"horizon", report.horizon},
            {"rungs", rungs}};
}

int cmd_converge(const Cli& cli) {
    auto cfg = cli.load();
    if (cfg.ladder.empty()) {
        throw er::ValidationError("ladder: an eps ladder is required for converge");
    }
    const auto model = er::validate_model(cfg.model);
    er::ConvergenceOptions opts;
    opts.T = cfg.scheme.T;
    opts.scheme = cfg.scheme;
    opts.n_threads = cli.effective_threads();
    const auto report =
        er::convergence_study(model, cfg.boundary, cfg.query.lambda, cfg.query.ell,
                              cfg.ladder, cfg.mc.n_paths, cfg.mc.seed, opts);

    const std::string stem =
        cfg.output.path.empty() ? "convergence_report" : stem_of(cfg.output.path);
    write_text(stem + ".json", report_to_json(report).dump(2) + "\n");

    std::string csv =
        "eps,mc_mean,mc_se,analytic_discrete,analytic_limit,ks_to_next,"
        "ucp_sup_median,max_jumps_in_window\n";
    for (const auto& r : report.rungs) {
        csv += fmt17(r.eps) + "," + fmt17(r.mc_mean) + "," + fmt17(r.mc_se) + "," +
               fmt17(r.analytic_discrete) + "," + fmt17(r.analytic_limit) + "," +
               fmt17(r.ks_to_next) + "," + fmt17(r.ucp_sup_median) + "," +
               std::to_string(r.max_jumps_in_window) + "\n";
    }
    write_text(stem + ".csv", csv);
    return 0;
}

int cmd_compare(const Cli& cli) {
    auto cfg = cli.load();
    const auto model = er::validate_model(cfg.model);
    const double h = cfg.scheme.effective_step(model.spec.sigma0);
    const long violations = er::pathwise_comparison_check(
        model, cfg.boundary, cfg.scheme.eps, h, cfg.scheme.T, cfg.mc.n_paths,
        cfg.mc.seed, cli.effective_threads());
    json j = {{"violations", violations}, {"n_paths", cfg.mc.n_paths},
              {"eps", cfg.scheme.eps},    {"h", h},
              {"T", cfg.scheme.T},        {"seed", cfg.mc.seed}};
    write_text(cfg.output.path, j.dump(2) + "\n");
    return 0;
}

int cmd_liquidate(const Cli& cli) {
    auto cfg = cli.load();
    if (!cfg.has_impact) {
        throw er::ValidationError("impact: an impact function is required for "
                                  "liquidate");
    }
    const auto model = er::validate_model(cfg.model);
    er::LiquidationProblem problem{model, cfg.impact, cfg.query.delta,
                                   cfg.query.theta, cfg.boundary};
    const double continuous = er::continuous_proceeds(problem);

    std::vector<double> ladder = cfg.ladder;
    if (ladder.empty() && cfg.query.eps) ladder.push_back(*cfg.query.eps);

    json blocks = json::array();
    for (double eps : ladder) {
        const double discrete = er::discrete_proceeds(problem, eps);
        const double gap = discrete - continuous;
        blocks.push_back({{"eps", eps},
                          {"discrete", discrete},
                          {"gap", gap},
                          {"gap_over_eps", gap / eps}});
    }
    json j = {{"continuous", continuous},
              {"delta", cfg.query.delta},
              {"theta", cfg.query.theta},
              {"blocks", blocks}};
    write_text(cfg.output.path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elastic-boundary reflected diffusion toolkit"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON experiment manifest")
        ->required();
    app.add_option("--set", cli.overrides,
                   "Override a config field: --set a.b.c=value (repeatable)");
    app.add_option("--threads", cli.threads,
                   "Worker threads (default: ELASTIC_REFLECT_THREADS or all cores); "
                   "results do not depend on this");
    app.add_option("--out", cli.out_override, "Override output.path");

    auto* phi = app.add_subcommand("phi", "Eigenfunction log-derivative on a grid");
    auto* laplace = app.add_subcommand("laplace", "Inverse-local-time transforms");
    auto* simulate = app.add_subcommand("simulate", "Sample one reflected path");
    auto* converge = app.add_subcommand("converge", "Eps-ladder convergence study");
    auto* compare = app.add_subcommand("compare", "Pathwise comparison bounds");
    auto* liquidate = app.add_subcommand("liquidate", "Liquidation proceeds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (phi->parsed()) return cmd_phi(cli);
        if (laplace->parsed()) return cmd_laplace(cli);
        if (simulate->parsed()) return cmd_simulate(cli);
        if (converge->parsed()) return cmd_converge(cli);
        if (compare->parsed()) return cmd_compare(cli);
        if (liquidate->parsed()) return cmd_liquidate(cli);
    } catch (const er::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const er::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const er::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
