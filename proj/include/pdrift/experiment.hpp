#ifndef PDRIFT_EXPERIMENT_HPP
#define PDRIFT_EXPERIMENT_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdrift/io.hpp"
#include "pdrift/local_time.hpp"
#include "pdrift/posterior.hpp"
#include "pdrift/prior.hpp"
#include "pdrift/sde.hpp"

namespace pdrift {

inline constexpr const char* version_string = "pdrift 1.0.0";

/// Raised on invalid configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Drift descriptor: named registry entry or explicit coefficients.
struct DriftDescriptor {
    std::string name = "zero";          // zero | sin | rough | coeffs
    double amplitude = 1.0;
    std::size_t modes = 16;             // rough only
    std::vector<double> coeffs;         // coeffs only

    DriftSpec make(int p) const {
        if (name == "zero") return DriftSpec::zero();
        if (name == "sin") return DriftSpec::sine(amplitude);
        if (name == "rough") return DriftSpec::rough(p, amplitude, modes);
        if (name == "coeffs") return DriftSpec(FourierCoeffs(coeffs));
        throw ConfigError("unknown drift name: " + name);
    }
};

struct ExperimentConfig {
    DriftDescriptor drift;
    PriorSpec prior;
    std::vector<double> T_grid{250.0, 1000.0, 4000.0};
    double dt = 1e-3;
    std::size_t M = 256;
    std::size_t replicates = 50;
    std::uint64_t seed = 1;
    std::string output_dir = ".";

    void validate() const {
        try {
            prior.validate();
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        if (T_grid.empty()) throw ConfigError("T_grid must be non-empty");
        for (std::size_t i = 0; i < T_grid.size(); ++i) {
            if (T_grid[i] <= 0.0) throw ConfigError("T_grid entries must be positive");
            if (i > 0 && T_grid[i] <= T_grid[i - 1])
                throw ConfigError("T_grid must be strictly increasing");
        }
        if (dt <= 0.0) throw ConfigError("dt must be positive");
        if (M < 4 || (M & (M - 1)) != 0) throw ConfigError("M must be a power of two >= 4");
        if (replicates < 1) throw ConfigError("replicates >= 1 required");
    }
};

inline nlohmann::json drift_to_json(const DriftDescriptor& d) {
    nlohmann::json j{{"name", d.name}};
    if (d.name == "sin" || d.name == "rough") j["amplitude"] = d.amplitude;
    if (d.name == "rough") j["modes"] = d.modes;
    if (d.name == "coeffs") j["coeffs"] = d.coeffs;
    return j;
}

inline DriftDescriptor drift_from_json(const nlohmann::json& j) {
    DriftDescriptor d;
    d.name = j.value("name", std::string("zero"));
    d.amplitude = j.value("amplitude", 1.0);
    d.modes = j.value("modes", std::size_t{16});
    if (j.contains("coeffs")) {
        d.coeffs = j.at("coeffs").get<std::vector<double>>();
        d.name = "coeffs";
    }
    return d;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return nlohmann::json{
        {"drift", drift_to_json(cfg.drift)},
        {"prior", {{"p", cfg.prior.p}, {"eta", cfg.prior.eta},
                   {"kappa", cfg.prior.kappa}, {"N", cfg.prior.N}}},
        {"T_grid", cfg.T_grid},
        {"dt", cfg.dt},
        {"M", cfg.M},
        {"replicates", cfg.replicates},
        {"seed", cfg.seed}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("drift")) cfg.drift = drift_from_json(j.at("drift"));
        if (j.contains("prior")) {
            const auto& p = j.at("prior");
            cfg.prior.p = p.value("p", cfg.prior.p);
            cfg.prior.eta = p.value("eta", cfg.prior.eta);
            cfg.prior.kappa = p.value("kappa", cfg.prior.kappa);
            cfg.prior.N = p.value("N", cfg.prior.N);
        }
        if (j.contains("T_grid")) cfg.T_grid = j.at("T_grid").get<std::vector<double>>();
        cfg.dt = j.value("dt", cfg.dt);
        cfg.M = j.value("M", cfg.M);
        cfg.replicates = j.value("replicates", cfg.replicates);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config: " + file);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return config_from_json(j);
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
};

/// OLS of y on x; stderr from residual variance (needs >= 3 points for a
/// nonzero estimate).
inline SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fit_slope: need matched n >= 2");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
    }
    return fit;
}

/// Log-log OLS of per-T medians against T.
inline SlopeFit fit_loglog_medians(const std::vector<double>& t_grid,
                                   const std::vector<std::vector<double>>& samples) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (samples[i].empty()) continue;
        lx.push_back(std::log(t_grid[i]));
        ly.push_back(std::log(median(samples[i])));
    }
    return fit_slope(lx, ly);
}

/// Coefficient-space norm of (a - b0) with b0 padded/truncated to match a;
/// excess b0 modes count as truncation error.
inline double coeff_error_norm(const FourierCoeffs& a, const FourierCoeffs& b0, double s) {
    const std::size_t n = std::max(a.size(), b0.size());
    auto diff = FourierCoeffs::zeros(n);
    for (std::size_t k = 0; k < n; ++k)
        diff.c[k] = (k < a.size() ? a.c[k] : 0.0) - (k < b0.size() ? b0.c[k] : 0.0);
    return sobolev_norm(diff, s);
}

namespace detail {

inline void write_summary(const ExperimentConfig& cfg, const std::string& experiment,
                          nlohmann::json results, std::size_t failures,
                          const std::string& out_dir) {
    nlohmann::json summary{
        {"experiment", experiment},
        {"version", version_string},
        {"config", config_to_json(cfg)},
        {"failures", failures},
        {"results", std::move(results)}};
    std::ofstream out(out_dir + "/summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json in " + out_dir);
    out << summary.dump(2) << '\n';
}

}  // namespace detail

struct ExperimentResult {
    nlohmann::json summary;
    std::size_t failures = 0;
};

/// Simulate -> local time -> assemble -> solve for every (T, replicate);
/// record L2 and H^p errors of the posterior mean against the truth and the
/// posterior trace; fit log-log slopes on per-T medians.
/// rows.csv is deterministic; wall times go to timings.csv separately.
inline ExperimentResult run_contraction(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const DriftSpec truth = cfg.drift.make(cfg.prior.p);

    std::ofstream rows(cfg.output_dir + "/rows.csv");
    std::ofstream timings(cfg.output_dir + "/timings.csv");
    rows << "T,replicate,status,l2_error,hp_error,trace\n";
    timings << "T,replicate,wall_ms\n";

    std::vector<std::vector<double>> l2(cfg.T_grid.size()), hp(cfg.T_grid.size()),
        tr(cfg.T_grid.size());
    std::size_t failures = 0;
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
        const double horizon = cfg.T_grid[ti];
        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                RngStream rng(cfg.seed, ti, rep);
                const SamplePath path = simulate(truth, horizon, cfg.dt, rng);
                const LocalTimeField lt = estimate_local_time(path, cfg.M);
                const ChiField chi = chi_field(path, cfg.M);
                const PosteriorGaussian post = compute_posterior(cfg.prior, lt, chi);
                const double e2 = coeff_error_norm(post.mean, truth.coeffs, 0.0);
                const double ep = coeff_error_norm(post.mean, truth.coeffs,
                                                   static_cast<double>(cfg.prior.p));
                const double trace = covariance_trace(post);
                l2[ti].push_back(e2);
                hp[ti].push_back(ep);
                tr[ti].push_back(trace);
                rows << fmt17(horizon) << ',' << rep << ",ok," << fmt17(e2) << ','
                     << fmt17(ep) << ',' << fmt17(trace) << '\n';
            } catch (const std::exception& e) {
                ++failures;
                rows << fmt17(horizon) << ',' << rep << ",failed,,,\n";
            }
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
            timings << fmt17(horizon) << ',' << rep << ',' << ms << '\n';
        }
    }

    const SlopeFit f2 = fit_loglog_medians(cfg.T_grid, l2);
    const SlopeFit fp = fit_loglog_medians(cfg.T_grid, hp);
    const SlopeFit ft = fit_loglog_medians(cfg.T_grid, tr);
    nlohmann::json results;
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
        results["medians"].push_back({{"T", cfg.T_grid[ti]},
                                      {"l2_error", l2[ti].empty() ? 0.0 : median(l2[ti])},
                                      {"hp_error", hp[ti].empty() ? 0.0 : median(hp[ti])},
                                      {"trace", tr[ti].empty() ? 0.0 : median(tr[ti])}});
    }
    results["l2_slope"] = f2.slope;
    results["l2_slope_stderr"] = f2.stderr_slope;
    results["hp_slope"] = fp.slope;
    results["trace_slope"] = ft.slope;
    results["trace_slope_stderr"] = ft.stderr_slope;
    detail::write_summary(cfg, "contraction", results, failures, cfg.output_dir);
    return {std::move(results), failures};
}

/// Sup-distance between L/T and rho per (T, replicate), at grid M and, as a
/// stability diagnostic, at 2M.
inline ExperimentResult run_lln(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const DriftSpec drift = cfg.drift.make(cfg.prior.p);
    const StationaryLaw law = stationary_density(drift, cfg.M);
    const StationaryLaw law2 = stationary_density(drift, 2 * cfg.M);

    std::ofstream rows(cfg.output_dir + "/rows.csv");
    rows << "T,replicate,status,sup_error,sup_error_2M\n";
    std::vector<std::vector<double>> sup(cfg.T_grid.size()), sup2(cfg.T_grid.size());
    std::size_t failures = 0;
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
        const double horizon = cfg.T_grid[ti];
        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
            try {
                RngStream rng(cfg.seed, ti, rep);
                const SamplePath path = simulate(drift, horizon, cfg.dt, rng);
                const LocalTimeField lt = estimate_local_time(path, cfg.M);
                const LocalTimeField ltf = estimate_local_time(path, 2 * cfg.M);
                double s = 0.0, sf = 0.0;
                for (std::size_t j = 0; j < cfg.M; ++j)
                    s = std::max(s, std::abs(lt.values[j] / horizon - law.rho[j]));
                for (std::size_t j = 0; j < 2 * cfg.M; ++j)
                    sf = std::max(sf, std::abs(ltf.values[j] / horizon - law2.rho[j]));
                sup[ti].push_back(s);
                sup2[ti].push_back(sf);
                rows << fmt17(horizon) << ',' << rep << ",ok," << fmt17(s) << ','
                     << fmt17(sf) << '\n';
            } catch (const std::exception&) {
                ++failures;
                rows << fmt17(horizon) << ',' << rep << ",failed,,\n";
            }
        }
    }

    nlohmann::json results;
    bool decreasing = true;
    double prev = 0.0;
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
        const double med = sup[ti].empty() ? 0.0 : median(sup[ti]);
        const double med2 = sup2[ti].empty() ? 0.0 : median(sup2[ti]);
        if (ti > 0 && med >= prev) decreasing = false;
        prev = med;
        results["medians"].push_back(
            {{"T", cfg.T_grid[ti]}, {"sup_error", med}, {"sup_error_2M", med2}});
    }
    results["median_decreasing"] = decreasing;
    detail::write_summary(cfg, "lln", results, failures, cfg.output_dir);
    return {std::move(results), failures};
}

/// H^s norms of L/T - rho for s in {0, 0.25, 0.4}; log-log slope against T
/// targets -1/2, and the sqrt(T)-scaled norm should be trendless.
inline ExperimentResult run_fluctuation(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const DriftSpec drift = cfg.drift.make(cfg.prior.p);
    const StationaryLaw law = stationary_density(drift, cfg.M);
    const std::vector<double> orders{0.0, 0.25, 0.4};
    const std::size_t n_modes = std::min<std::size_t>(cfg.prior.N, cfg.M / 2 - 1);

    std::ofstream rows(cfg.output_dir + "/rows.csv");
    rows << "T,replicate,status,h0,h025,h04\n";
    std::vector<std::array<std::vector<double>, 3>> norms(cfg.T_grid.size());
    std::size_t failures = 0;
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
        const double horizon = cfg.T_grid[ti];
        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
            try {
                RngStream rng(cfg.seed, ti, rep);
                const SamplePath path = simulate(drift, horizon, cfg.dt, rng);
                const LocalTimeField lt = estimate_local_time(path, cfg.M);
                const GridFunction fluct = fluctuation_field(lt, law);
                const FourierCoeffs fc = analyze(fluct, n_modes);
                double h[3];
                for (std::size_t si = 0; si < orders.size(); ++si) {
                    // unscaled norm ||L/T - rho||_{H^s}
                    h[si] = sobolev_norm(fc, orders[si]) / std::sqrt(horizon);
                    norms[ti][si].push_back(h[si]);
                }
                rows << fmt17(horizon) << ',' << rep << ",ok," << fmt17(h[0]) << ','
                     << fmt17(h[1]) << ',' << fmt17(h[2]) << '\n';
            } catch (const std::exception&) {
                ++failures;
                rows << fmt17(horizon) << ',' << rep << ",failed,,,\n";
            }
        }
    }

    nlohmann::json results;
    const char* keys[3] = {"h0", "h025", "h04"};
    for (std::size_t si = 0; si < orders.size(); ++si) {
        std::vector<std::vector<double>> per_t(cfg.T_grid.size());
        for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) per_t[ti] = norms[ti][si];
        const SlopeFit fit = fit_loglog_medians(cfg.T_grid, per_t);
        results["slopes"][keys[si]] = fit.slope;
        results["slopes_stderr"][keys[si]] = fit.stderr_slope;
        // slope of the sqrt(T)-scaled norm; -1/2 scaling means no trend here
        results["scaled_slopes"][keys[si]] = fit.slope + 0.5;
    }
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti)
        results["medians"].push_back({{"T", cfg.T_grid[ti]},
                                      {"h0", median(norms[ti][0])},
                                      {"h025", median(norms[ti][1])},
                                      {"h04", median(norms[ti][2])}});
    detail::write_summary(cfg, "fluctuation", results, failures, cfg.output_dir);
    return {std::move(results), failures};
}

/// Posterior-ball and pointwise-band coverage diagnostics.  Reports
/// frequencies only; the theory proves contraction, not coverage.
inline ExperimentResult run_coverage(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const DriftSpec truth = cfg.drift.make(cfg.prior.p);
    constexpr std::size_t n_draws = 500;
    constexpr std::size_t n_points = 8;

    std::ofstream rows(cfg.output_dir + "/rows.csv");
    rows << "T,replicate,status,ball_cover,pointwise_cover_frac\n";
    std::size_t failures = 0;
    nlohmann::json results;
    for (std::size_t ti = 0; ti < cfg.T_grid.size(); ++ti) {
        const double horizon = cfg.T_grid[ti];
        std::size_t balls = 0, done = 0;
        double pointwise_sum = 0.0;
        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
            try {
                RngStream rng(cfg.seed, ti, rep);
                const SamplePath path = simulate(truth, horizon, cfg.dt, rng);
                const LocalTimeField lt = estimate_local_time(path, cfg.M);
                const ChiField chi = chi_field(path, cfg.M);
                const PosteriorGaussian post = compute_posterior(cfg.prior, lt, chi);

                std::vector<double> radii;
                std::array<std::vector<double>, n_points> point_vals;
                for (std::size_t d = 0; d < n_draws; ++d) {
                    const FourierCoeffs draw = sample_posterior_coeffs(post, rng);
                    radii.push_back(coeff_error_norm(draw, post.mean, 0.0));
                    for (std::size_t q = 0; q < n_points; ++q)
                        point_vals[q].push_back(
                            draw.eval(static_cast<double>(q) / n_points));
                }
                std::sort(radii.begin(), radii.end());
                const double radius = radii[static_cast<std::size_t>(0.95 * n_draws) - 1];
                const bool ball = coeff_error_norm(post.mean, truth.coeffs, 0.0) <= radius;

                std::size_t covered = 0;
                for (std::size_t q = 0; q < n_points; ++q) {
                    auto& pv = point_vals[q];
                    std::sort(pv.begin(), pv.end());
                    const double lo = pv[static_cast<std::size_t>(0.025 * n_draws)];
                    const double hi = pv[static_cast<std::size_t>(0.975 * n_draws) - 1];
                    const double b0 = truth.eval(static_cast<double>(q) / n_points);
                    if (b0 >= lo && b0 <= hi) ++covered;
                }
                const double frac = static_cast<double>(covered) / n_points;
                balls += ball ? 1 : 0;
                pointwise_sum += frac;
                ++done;
                rows << fmt17(horizon) << ',' << rep << ",ok," << (ball ? 1 : 0) << ','
                     << fmt17(frac) << '\n';
            } catch (const std::exception&) {
                ++failures;
                rows << fmt17(horizon) << ',' << rep << ",failed,,\n";
            }
        }
        results["per_T"].push_back(
            {{"T", horizon},
             {"ball_coverage", done ? static_cast<double>(balls) / done : 0.0},
             {"pointwise_coverage", done ? pointwise_sum / done : 0.0},
             {"replicates_ok", done}});
    }
    detail::write_summary(cfg, "coverage", results, failures, cfg.output_dir);
    return {std::move(results), failures};
}

}  // namespace pdrift

#endif
