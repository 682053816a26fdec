#pragma once

// Batch experiment drivers behind the CLI subcommands: simulate a config
// over its (n, route) grid, calibrate universal constants on the ball,
// fit decay rates, and compare simulation against the first-order
// prediction.

#include <chrono>
#include <optional>
#include <sstream>

#include "randpoly/config.hpp"
#include "randpoly/estimators.hpp"
#include "randpoly/report.hpp"

namespace randpoly {

namespace detail {
inline double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace detail

struct SimulateOutcome {
    std::vector<ResultRecord> records;
    bool partial = false;
    std::string error;
};

inline Estimate run_route(const ExperimentConfig& cfg, const Density& den, Route route, int n,
                          const SeedSpec& seed, int threads) {
    switch (route) {
        case Route::direct:
            return deficit_direct(cfg.body, den, cfg.j, n, cfg.reps, seed, threads);
        case Route::support:
            return deficit_support_route(cfg.body, den, n, cfg.reps, seed, threads);
        case Route::projection:
            return deficit_projection(cfg.body, den, cfg.j, n, cfg.reps, cfg.y_samples, seed,
                                      threads);
    }
    throw std::logic_error("run_route: unreachable");
}

// Runs every (n, route) cell of the config. Each cell owns a disjoint
// stream block, so reruns with the same master seed reproduce the deficit
// columns bit for bit regardless of thread count.
inline SimulateOutcome run_simulate(const ExperimentConfig& cfg, int threads,
                                    const CalibrationStore* store = nullptr) {
    SimulateOutcome out;
    const int d = dim(cfg.body);
    const Density den = make_density(cfg.body, cfg.density);

    std::optional<double> c_jd;
    if (cfg.j == d)
        c_jd = schuett_werner_constant(d);
    else if (store) {
        if (const auto e = store->lookup(cfg.j, d)) c_jd = e->c;
    }
    std::optional<double> pred_coef;
    if (c_jd && rolling_radius(cfg.body)) {
        const LimitIntegral I = limit_integral(cfg.body, den, cfg.j);
        pred_coef = *c_jd * I.value;
    }

    std::uint64_t cell = 0;
    for (int n : cfg.n_grid) {
        for (Route route : cfg.routes) {
            const SeedSpec seed = with_stream_base({cfg.master_seed, 0}, cell << 32);
            ++cell;
            const auto t0 = std::chrono::steady_clock::now();
            ResultRecord r;
            r.experiment_id = cfg.experiment_id;
            r.body_kind = kind_name(cfg.body);
            r.d = d;
            r.j = cfg.j;
            r.density_kind = density_kind_name(cfg.density);
            r.n = n;
            r.route = route_name(route);
            r.reps = cfg.reps;
            r.master_seed = cfg.master_seed;
            r.git_or_build_id = build_id();
            try {
                const Estimate est = run_route(cfg, den, route, n, seed, threads);
                r.deficit_mean = est.mean;
                r.deficit_stderr = est.se;
            } catch (const numeric_error& e) {
                out.partial = true;
                out.error = e.what();
                return out;
            }
            if (pred_coef) r.predicted = *pred_coef * std::pow(n, -2.0 / (d - 1.0));
            r.wall_time_s = detail::elapsed_s(t0);
            out.records.push_back(std::move(r));
        }
    }
    return out;
}

inline std::string render_table(const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    os << "  n      route       deficit_mean    deficit_stderr  predicted\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "  %-6d %-11s %-15.8g %-15.3g %s\n", r.n, r.route.c_str(),
                      r.deficit_mean, r.deficit_stderr,
                      r.predicted ? detail::fmt_double(*r.predicted).c_str() : "-");
        os << buf;
    }
    return os.str();
}

inline CalibrationEntry run_calibrate(int j, int d, std::span<const int> n_grid, int reps,
                                      std::uint64_t master_seed, int threads,
                                      CalibrationStore* store) {
    const Calibration cal = calibrate_c(j, d, n_grid, reps, SeedSpec{master_seed, 0}, threads);
    CalibrationEntry e;
    e.j = j;
    e.d = d;
    e.c = cal.c;
    e.se = cal.se;
    e.n_grid = cal.n_grid;
    e.reps = reps;
    e.timestamp = utc_timestamp();
    if (store) {
        store->put(e);
        store->save();
    }
    return e;
}

struct RateOutcome {
    RateFit fit;
    double band_lo = 0.0;
    double band_hi = 0.0;
    bool pass = false;
    Route route = Route::support;
};

// Fits the decay exponent of the deficit across the n grid and checks it
// against the admissible band for the body class: bodies with a rolling
// ball decay like n^{-2/(d-1)}, polytopes like n^{-1/(d-1)}.
inline RateOutcome run_rate(const ExperimentConfig& cfg, int threads) {
    if (cfg.n_grid.size() < 4)
        throw validation_error("rate: n_grid needs >= 4 values");
    const int d = dim(cfg.body);
    const Density den = make_density(cfg.body, cfg.density);
    RateOutcome out;
    out.route = cfg.routes.front();

    std::vector<std::pair<int, Estimate>> pairs;
    std::uint64_t cell = 0;
    for (int n : cfg.n_grid) {
        const SeedSpec seed = with_stream_base({cfg.master_seed, 0}, cell++ << 32);
        pairs.emplace_back(n, run_route(cfg, den, out.route, n, seed, threads));
    }
    out.fit = fit_rate(pairs);
    const double base = rolling_radius(cfg.body) ? -2.0 / (d - 1) : -1.0 / (d - 1);
    out.band_lo = base - 0.2 / (d - 1) * (rolling_radius(cfg.body) ? 1.0 : 1.0) - (rolling_radius(cfg.body) ? 0.0 : 0.0);
    out.band_lo = base * 1.1;
    out.band_hi = base * 0.9;
    out.pass = out.fit.exponent >= out.band_lo && out.fit.exponent <= out.band_hi;
    return out;
}

struct PredictOutcome {
    double c = 0.0;
    double c_se = 0.0;
    LimitIntegral integral;
    double predicted = 0.0;
    // per matching CSV row: (n, simulated mean, simulated/predicted)
    std::vector<std::tuple<int, double, double>> comparisons;
};

inline PredictOutcome run_predict(const Body& body, const DensitySpec& density, int j, int n,
                                  const CalibrationStore* store,
                                  const std::vector<ResultRecord>& existing = {}) {
    const int d = dim(body);
    if (!rolling_radius(body))
        throw unsupported_error(
            "predict: body has no rolling ball; the first-order deficit law does not apply "
            "(only the general rate bounds hold)");
    PredictOutcome out;
    if (j == d) {
        out.c = schuett_werner_constant(d);
    } else {
        if (!store) throw std::invalid_argument("predict: calibration store required for j < d");
        const auto e = store->lookup(j, d);
        if (!e)
            throw std::invalid_argument("predict: no calibration for (j,d) = (" +
                                        std::to_string(j) + "," + std::to_string(d) +
                                        "); run the calibrate subcommand first");
        out.c = e->c;
        out.c_se = e->se;
    }
    const Density den = make_density(body, density);
    out.integral = limit_integral(body, den, j);
    out.predicted = out.c * out.integral.value * std::pow(n, -2.0 / (d - 1.0));
    for (const auto& r : existing) {
        if (r.body_kind != kind_name(body) || r.d != d || r.j != j) continue;
        if (r.density_kind != density_kind_name(density)) continue;
        const double pred_n = out.c * out.integral.value * std::pow(r.n, -2.0 / (d - 1.0));
        out.comparisons.emplace_back(r.n, r.deficit_mean, r.deficit_mean / pred_n);
    }
    return out;
}

}  // namespace randpoly
