#ifndef PDRIFT_LOCAL_TIME_HPP
#define PDRIFT_LOCAL_TIME_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pdrift/fourier.hpp"
#include "pdrift/sde.hpp"

namespace pdrift {

/// Histogram estimate of the periodic local time: L_j is the occupation
/// density of the wrapped path on the bin [j/M, (j+1)/M).  Units: time per
/// unit space.  Satisfies (1/M) sum_j L_j = T by construction.
struct LocalTimeField {
    std::size_t M = 0;
    std::vector<double> values;
    double horizon = 0.0;
};

/// Periodized signed crossing indicator, integer-valued, sampled at bin
/// centers (j + 1/2)/M.
struct ChiField {
    std::size_t M = 0;
    std::vector<int> values;
};

/// Invariant density rho, scale derivative s' and total speed-measure mass
/// m[0,1] on the grid x_j = j/M.
struct StationaryLaw {
    std::size_t M = 0;
    std::vector<double> rho;
    std::vector<double> s_prime;
    double m_mass = 0.0;
};

inline double bin_center(std::size_t j, std::size_t M) {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(M);
}

inline void check_grid(std::size_t M) {
    if (M < 4) throw std::invalid_argument("grid size must be >= 4");
}

/// Left-point in-bin assignment of each time step; intra-step bin crossings
/// are ignored.
inline LocalTimeField estimate_local_time(const SamplePath& path, std::size_t M) {
    check_grid(M);
    LocalTimeField lt;
    lt.M = M;
    lt.horizon = path.horizon();
    lt.values.assign(M, 0.0);
    const double weight = static_cast<double>(M) * path.dt;
    for (std::size_t i = 0; i + 1 < path.x.size(); ++i) {
        const double xi = path.x[i];
        double frac = xi - std::floor(xi);
        if (frac >= 1.0) frac = 0.0;
        std::size_t j = static_cast<std::size_t>(frac * static_cast<double>(M));
        if (j >= M) j = M - 1;
        lt.values[j] += weight;
    }
    return lt;
}

/// Closed form for the periodized signed indicator:
///   chi(x) = floor(X_T - x) - floor(X_0 - x),
/// evaluated at bin centers to dodge the measure-zero integer-offset points.
inline ChiField chi_field(const SamplePath& path, std::size_t M) {
    check_grid(M);
    ChiField chi;
    chi.M = M;
    chi.values.resize(M);
    const double x0 = path.x.front();
    const double xT = path.x.back();
    for (std::size_t j = 0; j < M; ++j) {
        const double c = bin_center(j, M);
        chi.values[j] = static_cast<int>(std::floor(xT - c) - std::floor(x0 - c));
    }
    return chi;
}

/// rho(x) = C exp(2 B(x)) with B the exact antiderivative of the drift and C
/// fixed by grid-mean normalization; s' = exp(-2B); m[0,1] the grid mean of
/// 1/s'.  The identity rho * s' * m_mass = 1 then holds pointwise.
inline StationaryLaw stationary_density(const DriftSpec& drift, std::size_t M) {
    check_grid(M);
    StationaryLaw law;
    law.M = M;
    law.rho.resize(M);
    law.s_prime.resize(M);
    double total = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        const double b2 = 2.0 * drift.coeffs.antiderivative(static_cast<double>(j) / static_cast<double>(M));
        law.rho[j] = std::exp(b2);
        law.s_prime[j] = std::exp(-b2);
        total += law.rho[j];
    }
    law.m_mass = total / static_cast<double>(M);
    for (std::size_t j = 0; j < M; ++j) law.rho[j] /= law.m_mass;
    return law;
}

/// sqrt(T) (L_j / T - rho_j), the normalized local-time fluctuation.
inline GridFunction fluctuation_field(const LocalTimeField& lt, const StationaryLaw& law) {
    if (lt.M != law.M) throw std::invalid_argument("fluctuation_field: grid size mismatch");
    const double horizon = lt.horizon;
    std::vector<double> out(lt.M);
    const double root_t = std::sqrt(horizon);
    for (std::size_t j = 0; j < lt.M; ++j)
        out[j] = root_t * (lt.values[j] / horizon - law.rho[j]);
    return GridFunction(std::move(out));
}

}  // namespace pdrift

#endif
