#ifndef PDRIFT_SDE_HPP
#define PDRIFT_SDE_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdrift/fourier.hpp"
#include "pdrift/rng.hpp"

namespace pdrift {

/// A 1-periodic, zero-mean, C^1 drift function, held as a finite Fourier
/// series.  Named drifts come from a small registry.
struct DriftSpec {
    FourierCoeffs coeffs;

    DriftSpec() : coeffs(FourierCoeffs::zeros(2)) {}
    explicit DriftSpec(FourierCoeffs c) : coeffs(std::move(c)) {}

    double eval(double x) const { return coeffs.eval(x); }

    static DriftSpec zero() { return DriftSpec(FourierCoeffs::zeros(2)); }

    /// amplitude * sin(2 pi x) = (amplitude / sqrt 2) * phi_1
    static DriftSpec sine(double amplitude = 1.0) {
        auto c = FourierCoeffs::zeros(2);
        c.c[0] = amplitude / std::numbers::sqrt2;
        return DriftSpec(c);
    }

    /// Coefficients c_k = amplitude * ceil(k/2)^{-(p + 0.51)}: just inside
    /// the Sobolev ball of order p, useful for stressing smoothness
    /// hypotheses.
    static DriftSpec rough(int p, double amplitude, std::size_t n_modes) {
        auto c = FourierCoeffs::zeros(n_modes);
        for (std::size_t k = 1; k <= n_modes; ++k) {
            const double m = static_cast<double>((k + 1) / 2);
            c.c[k - 1] = amplitude * std::pow(m, -(static_cast<double>(p) + 0.51));
        }
        return DriftSpec(c);
    }
};

/// Uniformly time-stepped realization of the SDE on [0, T], on the real line
/// (not wrapped); wrapping happens only in local-time binning.
struct SamplePath {
    double dt = 0.0;
    std::vector<double> x;  // x_0 .. x_n

    double horizon() const { return dt * static_cast<double>(x.size() - 1); }
    std::size_t steps() const { return x.size() - 1; }
};

/// Euler-Maruyama with fixed step:
///   x_{i+1} = x_i + b(x_i) dt + sqrt(dt) xi_i,  x_0 = 0.
/// `noise_on = false` zeroes the Brownian increments (testing hook).
inline SamplePath simulate(const DriftSpec& drift, double horizon, double dt,
                           RngStream& rng, bool noise_on = true) {
    if (horizon <= 0.0 || dt <= 0.0 || dt > horizon)
        throw std::invalid_argument("simulate: need 0 < dt <= T");
    const double n_real = std::llround(horizon / dt);
    if (n_real > 1e9) throw std::invalid_argument("simulate: T/dt exceeds index range");
    const std::size_t n = static_cast<std::size_t>(std::llround(horizon / dt));
    SamplePath path;
    path.dt = dt;
    path.x.resize(n + 1);
    path.x[0] = 0.0;
    const double sqdt = std::sqrt(dt);
    double xi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = drift.eval(xi - std::floor(xi));
        if (!std::isfinite(b))
            throw std::runtime_error("simulate: drift evaluated to a non-finite value at x = " +
                                     std::to_string(xi));
        xi += b * dt + (noise_on ? sqdt * rng.normal() : 0.0);
        path.x[i + 1] = xi;
    }
    return path;
}

inline SamplePath simulate(const DriftSpec& drift, double horizon, double dt,
                           std::uint64_t seed, bool noise_on = true) {
    RngStream rng(seed);
    return simulate(drift, horizon, dt, rng, noise_on);
}

/// The simple estimator X_T / T.
inline double estimate_mean_drift(const SamplePath& path) {
    const double horizon = path.horizon();
    if (horizon <= 0.0) throw std::invalid_argument("estimate_mean_drift: empty path");
    return path.x.back() / horizon;
}

/// First-passage times on the discrete grid: tau_k is the first index after
/// tau_{k-1} at which the path has moved a full unit from its previous
/// anchor.  Empty if the path never winds.
inline std::vector<double> winding_times(const SamplePath& path) {
    std::vector<double> taus;
    double anchor = path.x.empty() ? 0.0 : path.x.front();
    for (std::size_t i = 1; i < path.x.size(); ++i) {
        if (std::abs(path.x[i] - anchor) >= 1.0) {
            taus.push_back(static_cast<double>(i) * path.dt);
            anchor = path.x[i];
        }
    }
    return taus;
}

/// Left-point Ito sum sum_i f(x_i)(x_{i+1} - x_i); f is periodic so the
/// unwrapped evaluation point is immaterial.
inline double ito_integral(const SamplePath& path, const FourierCoeffs& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < path.x.size(); ++i) {
        const double xi = path.x[i];
        acc += f.eval(xi - std::floor(xi)) * (path.x[i + 1] - xi);
    }
    return acc;
}

}  // namespace pdrift

#endif
