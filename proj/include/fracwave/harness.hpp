#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "problem.hpp"
#include "solver.hpp"

namespace fracwave {

#ifndef FRACWAVE_BUILD_ID
#define FRACWAVE_BUILD_ID "dev"
#endif

struct ExperimentConfig {
    std::string example = "ex51";
    Scheme scheme = Scheme::h3n3_fast;
    std::vector<double> alphas{1.5};
    std::vector<std::size_t> Ns;
    std::vector<std::size_t> Ms;
    double r = 1.0;
    double epsilon = 1e-12;
    bool full = false;
    bool timing = true;
    std::string out;

    /// Fills unset N/M lists from the desk or full profile.
    void apply_profile() {
        const bool ex51 = example == "ex51";
        if (Ms.empty()) {
            Ms = {full ? std::size_t{5000} : std::size_t{2000}};
        }
        if (Ns.empty()) {
            if (ex51) {
                Ns = full ? std::vector<std::size_t>{160, 320, 640, 1280} : std::vector<std::size_t>{160, 320, 640};
            } else {
                Ns = {32, 64, 128, 256};
            }
        }
    }

    /// True when N is refined (M fixed); otherwise M is refined.
    bool refines_N() const { return Ns.size() > 1 || Ms.size() <= 1; }

    void validate() const {
        detail::require(example == "ex51" || example == "ex52", "example must be ex51 or ex52");
        detail::require(!alphas.empty(), "alpha list is empty");
        for (double a : alphas) {
            derive_sigma(a);
        }
        detail::require(!Ns.empty() && !Ms.empty(), "N and M lists must be nonempty");
        for (std::size_t n : Ns) {
            detail::require(n >= 2, "every N must be >= 2");
        }
        for (std::size_t m : Ms) {
            detail::require(m >= 2, "every M must be >= 2");
        }
        detail::require(epsilon > 0.0, "eps must be positive");
        detail::require(r >= 1.0, "r must be >= 1");
        if (!is_graded(scheme)) {
            detail::require(r == 1.0, "r applies to graded schemes only");
        }
        auto doubling = [](const std::vector<std::size_t>& v) {
            for (std::size_t i = 1; i < v.size(); ++i) {
                if (v[i] != 2 * v[i - 1]) {
                    return false;
                }
            }
            return true;
        };
        detail::require(doubling(refines_N() ? Ns : Ms), "refinement list must double at each entry");
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        try {
            if constexpr (std::is_same_v<T, double>) {
                out.push_back(std::stod(item, &used));
            } else {
                const long long v = std::stoll(item, &used);
                if (v < 0) {
                    throw domain_error("negative value for " + key);
                }
                out.push_back(static_cast<T>(v));
            }
        } catch (const std::logic_error&) {
            throw domain_error("bad value '" + item + "' for " + key);
        }
        if (used != item.size()) {
            throw domain_error("bad value '" + item + "' for " + key);
        }
    }
    return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw domain_error("bad boolean '" + v + "' for " + key);
}

inline double parse_scalar(const std::string& v, const std::string& key) {
    const auto xs = parse_list<double>(v, key);
    require(xs.size() == 1, key + " takes a single value");
    return xs[0];
}

}  // namespace detail

/// Applies one key=value setting.
inline void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "example") {
        cfg.example = value;
    } else if (key == "scheme") {
        cfg.scheme = parse_scheme(value);
    } else if (key == "alpha") {
        cfg.alphas = detail::parse_list<double>(value, key);
    } else if (key == "N") {
        cfg.Ns = detail::parse_list<std::size_t>(value, key);
    } else if (key == "M") {
        cfg.Ms = detail::parse_list<std::size_t>(value, key);
    } else if (key == "r") {
        cfg.r = detail::parse_scalar(value, key);
    } else if (key == "eps") {
        cfg.epsilon = detail::parse_scalar(value, key);
    } else if (key == "full") {
        cfg.full = detail::parse_bool(value, key);
    } else if (key == "timing") {
        cfg.timing = detail::parse_bool(value, key);
    } else if (key == "out") {
        cfg.out = value;
    } else {
        throw domain_error("unknown config key '" + key + "'");
    }
}

/// Flat key=value text; '#' starts a comment.
inline ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg = {}) {
    std::stringstream ss{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw domain_error("config line " + std::to_string(lineno) + ": expected key=value");
        }
        set_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) {
        throw domain_error("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(cfg));
}

struct ConvergenceRow {
    double alpha = 0.0;
    std::size_t N = 0;
    std::size_t M = 0;
    std::string scheme;
    double E = 0.0;
    std::optional<double> order;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::string example;
    std::string scheme;
    double epsilon = 0.0;
    double r = 1.0;
    std::string build_id = FRACWAVE_BUILD_ID;
    bool timing = true;
    std::vector<ConvergenceRow> rows;

    std::string to_csv() const {
        std::string s = "alpha,N,M,scheme,E,order,seconds\n";
        char buf[256];
        for (const auto& r : rows) {
            std::string order = r.order ? fmt("%.4f", *r.order) : "";
            std::string secs = timing ? fmt("%.3f", r.seconds) : "";
            std::snprintf(buf, sizeof buf, "%g,%zu,%zu,%s,%.5e,%s,%s\n", r.alpha, r.N, r.M, r.scheme.c_str(), r.E,
                          order.c_str(), secs.c_str());
            s += buf;
        }
        return s;
    }

    /// Aligned plain-text table.
    std::string to_table() const {
        std::string s;
        char buf[256];
        std::snprintf(buf, sizeof buf, "# example=%s scheme=%s eps=%g r=%g build=%s\n", example.c_str(),
                      scheme.c_str(), epsilon, this->r, build_id.c_str());
        s += buf;
        std::snprintf(buf, sizeof buf, "%6s %7s %6s %12s %8s %9s\n", "alpha", "N", "M", "E", "order", "seconds");
        s += buf;
        for (const auto& r : rows) {
            const std::string order = r.order ? fmt("%.4f", *r.order) : "";
            const std::string secs = timing ? fmt("%.2f", r.seconds) : "";
            std::snprintf(buf, sizeof buf, "%6g %7zu %6zu %12.3e %8s %9s\n", r.alpha, r.N, r.M, r.E, order.c_str(),
                          secs.c_str());
            s += buf;
        }
        return s;
    }

private:
    static std::string fmt(const char* f, double v) {
        char b[64];
        std::snprintf(b, sizeof b, f, v);
        return b;
    }
};

/// Worker count: FRACWAVE_THREADS if set, else the hardware count.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACWAVE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) {
            n = static_cast<unsigned>(v);
        }
    }
    return n;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                (void)w;
                for (std::size_t i = next++; i < count && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

inline ProblemSpec make_example(const std::string& id, double alpha) {
    if (id == "ex51") {
        return example_51(alpha);
    }
    if (id == "ex52") {
        return example_52(alpha);
    }
    throw domain_error("unknown example '" + id + "'");
}

/// Error norm per example: levels 0..N for ex51, 1..N for ex52.
inline double example_error(const std::string& id, const SolveResult& res) {
    return res.max_error(id == "ex52" ? 1 : 0);
}

/// Runs every (alpha, N, M) cell and assembles rows in config order.
inline ConvergenceReport run_convergence(ExperimentConfig cfg) {
    cfg.apply_profile();
    cfg.validate();
    const bool byN = cfg.refines_N();
    const auto& outer = byN ? cfg.Ms : cfg.Ns;
    const auto& inner = byN ? cfg.Ns : cfg.Ms;

    ConvergenceReport rep;
    rep.example = cfg.example;
    rep.scheme = to_string(cfg.scheme);
    rep.epsilon = cfg.epsilon;
    rep.r = cfg.r;
    rep.timing = cfg.timing;
    for (double a : cfg.alphas) {
        for (std::size_t o : outer) {
            for (std::size_t i : inner) {
                ConvergenceRow row;
                row.alpha = a;
                row.N = byN ? i : o;
                row.M = byN ? o : i;
                row.scheme = rep.scheme;
                rep.rows.push_back(row);
            }
        }
    }

    parallel_for(rep.rows.size(), worker_count(), [&](std::size_t idx) {
        auto& row = rep.rows[idx];
        SolveOptions opt;
        opt.scheme = cfg.scheme;
        opt.N = row.N;
        opt.M = row.M;
        opt.r = cfg.r;
        opt.soe_epsilon = cfg.epsilon;
        opt.store_field = false;
        const auto res = solve(make_example(cfg.example, row.alpha), opt);
        row.E = example_error(cfg.example, res);
        row.seconds = res.timings.total;
    });

    for (std::size_t idx = 0; idx < rep.rows.size(); ++idx) {
        if (idx % inner.size() != 0) {
            rep.rows[idx].order = std::log2(rep.rows[idx - 1].E / rep.rows[idx].E);
        }
    }
    return rep;
}

inline ConvergenceReport run_example_51(ExperimentConfig cfg) {
    cfg.example = "ex51";
    return run_convergence(std::move(cfg));
}

inline ConvergenceReport run_example_52(ExperimentConfig cfg) {
    cfg.example = "ex52";
    return run_convergence(std::move(cfg));
}

}  // namespace fracwave
