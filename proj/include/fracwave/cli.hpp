#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "caputo_ops.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "kernel_coeffs.hpp"
#include "soe.hpp"
#include "solver.hpp"

namespace fracwave::cli {

enum ExitCode : int { ok = 0, validation_failure = 1, numerical_failure = 2 };

namespace detail {

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw domain_error("cannot write '" + path + "'");
    }
    f << text;
}

inline std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

struct Args {
    std::string config;
    std::string example;
    std::string scheme;
    std::string alpha;
    std::string N;
    std::string M;
    std::string r;
    std::string eps;
    std::string out;
    bool full = false;
    bool no_timing = false;
    // coeffs check
    std::size_t kmax = 2000;
    double tau = 1e-2;
    // soe check
    double gamma = 0.5;
    double delta = 1e-4;
    double T = 1.0;
    // operator scan
    double mu = 5.0;
};

/// Config file first, then any flags given on the command line.
inline ExperimentConfig build_config(const Args& a) {
    ExperimentConfig cfg;
    if (!a.config.empty()) {
        cfg = load_config(a.config, cfg);
    }
    auto set = [&](const char* key, const std::string& v) {
        if (!v.empty()) {
            set_config_value(cfg, key, v);
        }
    };
    set("example", a.example);
    set("scheme", a.scheme);
    set("alpha", a.alpha);
    set("N", a.N);
    set("M", a.M);
    set("r", a.r);
    set("eps", a.eps);
    set("out", a.out);
    if (a.full) {
        cfg.full = true;
    }
    if (a.no_timing) {
        cfg.timing = false;
    }
    return cfg;
}

inline void require_single(const ExperimentConfig& cfg) {
    fracwave::detail::require(cfg.alphas.size() == 1, "solve takes a single alpha");
    fracwave::detail::require(cfg.Ns.size() <= 1 && cfg.Ms.size() <= 1, "solve takes a single N and M");
}

inline int run_solve(const Args& a, std::ostream& out) {
    ExperimentConfig cfg = build_config(a);
    require_single(cfg);
    SolveOptions opt;
    opt.scheme = cfg.scheme;
    opt.N = cfg.Ns.empty() ? 64 : cfg.Ns[0];
    opt.M = cfg.Ms.empty() ? 64 : cfg.Ms[0];
    opt.r = cfg.r;
    opt.soe_epsilon = cfg.epsilon;
    opt.store_field = false;
    const auto problem = make_example(cfg.example, cfg.alphas[0]);
    const auto res = solve(problem, opt);

    std::string csv = "k,t,error,uhat_error,l2,h1,inf\n";
    for (std::size_t k = 0; k <= res.N; ++k) {
        const auto& n = res.level_norms[k];
        csv += std::to_string(k) + "," + fmt("%.10g", res.times[k]) + "," + (res.errors.empty() ? std::string() : fmt("%.6e", res.errors[k])) + "," +
               (res.uhat_errors.empty() ? std::string() : fmt("%.6e", res.uhat_errors[k])) + "," +
               fmt("%.6e", n.l2) + "," + fmt("%.6e", n.h1_semi) + "," + fmt("%.6e", n.inf) + "\n";
    }
    write_output(cfg.out, csv, out);
    if (!cfg.out.empty()) {
        out << "scheme=" << to_string(res.scheme) << " N=" << res.N << " M=" << res.M
            << " E=" << fmt("%.5e", example_error(cfg.example, res)) << " n_exp=" << res.n_exp
            << " seconds=" << fmt("%.3f", res.timings.total) << "\n";
    }
    return ok;
}

inline int run_convergence_cmd(const Args& a, std::ostream& out) {
    const ExperimentConfig cfg = build_config(a);
    const auto rep = run_convergence(cfg);
    write_output(cfg.out, rep.to_csv(), out);
    if (!cfg.out.empty()) {
        out << rep.to_table();
    }
    return ok;
}

inline int run_coeffs_check(const Args& a, std::ostream& out) {
    std::vector<double> grid;
    if (a.alpha.empty()) {
        for (int i = 1; i <= 19; ++i) {
            grid.push_back(1.0 + 0.05 * i);
        }
    } else {
        grid = fracwave::detail::parse_list<double>(a.alpha, "alpha");
    }
    const auto rep = check_coefficient_properties(a.kmax, grid, a.tau);
    std::string text = "tables=" + std::to_string(rep.tables_checked) + " kmax=" + std::to_string(rep.k_max) +
                       " tau=" + fmt("%g", rep.tau) + "\n";
    auto verdict = [](bool b) { return b ? "pass" : "FAIL"; };
    text += std::string("decreasing: ") + verdict(rep.decreasing) + "\n";
    text += std::string("lower_bound: ") + verdict(rep.lower_bound) + "\n";
    text += std::string("positive_combination: ") + verdict(rep.positive_combination) + "\n";
    text += std::string("running_sum: ") + verdict(rep.running_sum) + " (max ratio " +
            fmt("%.4f", rep.max_sum_ratio) + ")\n";
    for (const auto& v : rep.violations) {
        text += "violation " + v.property + " k=" + std::to_string(v.k) + " alpha=" + fmt("%g", v.alpha) +
                " margin=" + fmt("%.3e", v.margin) + "\n";
    }
    write_output(a.out, text, out);
    return rep.all_pass() ? ok : numerical_failure;
}

inline int run_soe_check(const Args& a, std::ostream& out) {
    const double eps = a.eps.empty() ? 1e-12 : fracwave::detail::parse_scalar(a.eps, "eps");
    const auto soe = build_soe(a.gamma, eps, a.delta, a.T);
    // Fresh grid, staggered against the construction grid.
    auto grid = fracwave::detail::geometric_grid(a.delta, a.T, 10001);
    std::vector<long double> mids;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        mids.push_back(std::sqrt(grid[i] * grid[i + 1]));
    }
    mids.push_back(a.delta);
    mids.push_back(a.T);
    const long double err = soe_max_error(soe, mids);
    std::string text = "N_exp=" + std::to_string(soe.size()) + " nodes_per_panel=" +
                       std::to_string(soe.nodes_per_panel) + " max_error=" + fmt("%.3e", static_cast<double>(err)) +
                       "\n";
    write_output(a.out, text, out);
    return err <= eps ? ok : numerical_failure;
}

inline int run_operator_scan(const Args& a, std::ostream& out) {
    const double alpha = a.alpha.empty() ? 1.5 : fracwave::detail::parse_scalar(a.alpha, "alpha");
    const auto Ns = a.N.empty() ? std::vector<std::size_t>{64, 128, 256, 512}
                                : fracwave::detail::parse_list<std::size_t>(a.N, "N");
    const auto rows = truncation_error_scan(a.mu, alpha, Ns);
    std::string csv = "N,max_error,order\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.N) + "," + fmt("%.6e", r.max_error) + "," +
               (std::isnan(r.order) ? std::string() : fmt("%.4f", r.order)) + "\n";
    }
    write_output(a.out, csv, out);
    return ok;
}

}  // namespace detail

/// Entry point of the command-line tool.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Solver kit for the time-fractional wave equation"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    detail::Args a;

    auto add_run_flags = [&](CLI::App* s) {
        s->add_option("--config", a.config, "key=value config file");
        s->add_option("--example", a.example, "ex51 | ex52");
        s->add_option("--scheme", a.scheme, "h3n3-direct | h3n3-fast | h3n3-graded | h3n3-graded-fast | l2c");
        s->add_option("--alpha", a.alpha, "alpha value(s), comma separated");
        s->add_option("--N", a.N, "time steps, comma separated");
        s->add_option("--M", a.M, "space steps, comma separated");
        s->add_option("--r", a.r, "grading exponent");
        s->add_option("--eps", a.eps, "SOE tolerance");
        s->add_flag("--full", a.full, "full-scale profile (M=5000, N up to 1280)");
        s->add_flag("--no-timing", a.no_timing, "leave the seconds column empty");
        s->add_option("--out", a.out, "output path");
    };

    auto* solve_cmd = app.add_subcommand("solve", "single run, per-level CSV");
    add_run_flags(solve_cmd);
    auto* conv_cmd = app.add_subcommand("convergence", "error/order sweep, CSV report");
    add_run_flags(conv_cmd);

    auto* coeffs_cmd = app.add_subcommand("coeffs", "convolution weights");
    coeffs_cmd->require_subcommand(1);
    auto* coeffs_check = coeffs_cmd->add_subcommand("check", "weight inequality scan");
    coeffs_check->add_option("--kmax", a.kmax, "largest level");
    coeffs_check->add_option("--tau", a.tau, "time step");
    coeffs_check->add_option("--alpha", a.alpha, "alpha grid, comma separated");
    coeffs_check->add_option("--out", a.out, "output path");

    auto* soe_cmd = app.add_subcommand("soe", "sum-of-exponentials kernel");
    soe_cmd->require_subcommand(1);
    auto* soe_check = soe_cmd->add_subcommand("check", "build and verify an approximation");
    soe_check->add_option("--gamma", a.gamma, "kernel exponent in (0,1)");
    soe_check->add_option("--eps", a.eps, "absolute tolerance");
    soe_check->add_option("--delta", a.delta, "lower end of the window");
    soe_check->add_option("--T", a.T, "upper end of the window");
    soe_check->add_option("--out", a.out, "output path");

    auto* op_cmd = app.add_subcommand("operator", "discrete Caputo operator");
    op_cmd->require_subcommand(1);
    auto* op_scan = op_cmd->add_subcommand("scan", "truncation error of t^mu under refinement");
    op_scan->add_option("--alpha", a.alpha, "alpha");
    op_scan->add_option("--mu", a.mu, "power of the test function");
    op_scan->add_option("--N", a.N, "step counts, comma separated");
    op_scan->add_option("--out", a.out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : validation_failure;
    }

    try {
        if (solve_cmd->parsed()) {
            return detail::run_solve(a, out);
        }
        if (conv_cmd->parsed()) {
            return detail::run_convergence_cmd(a, out);
        }
        if (coeffs_check->parsed()) {
            return detail::run_coeffs_check(a, out);
        }
        if (soe_check->parsed()) {
            return detail::run_soe_check(a, out);
        }
        if (op_scan->parsed()) {
            return detail::run_operator_scan(a, out);
        }
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return validation_failure;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    }
    err << app.help();
    return validation_failure;
}

}  // namespace fracwave::cli
