#ifndef PDRIFT_PRIOR_HPP
#define PDRIFT_PRIOR_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "pdrift/fourier.hpp"
#include "pdrift/rng.hpp"

namespace pdrift {

/// Hyper-parameters of the centred Gaussian prior with precision operator
/// eta ((-Delta)^p + kappa I), plus the shared Galerkin truncation level N.
struct PriorSpec {
    int p = 2;
    double eta = 1.0;
    double kappa = 1.0;
    std::size_t N = 64;

    PriorSpec() = default;
    PriorSpec(int p_, double eta_, double kappa_, std::size_t n)
        : p(p_), eta(eta_), kappa(kappa_), N(n) {
        validate();
    }
    void validate() const {
        if (p < 2) throw std::invalid_argument("PriorSpec: p >= 2 required (drift must be C^1)");
        if (eta <= 0.0) throw std::invalid_argument("PriorSpec: eta > 0 required");
        if (kappa <= 0.0) throw std::invalid_argument("PriorSpec: kappa > 0 required");
        if (N < 2) throw std::invalid_argument("PriorSpec: N >= 2 required");
    }
};

namespace detail {
inline double int_pow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}
}  // namespace detail

/// Prior precision of mode k: eta (4 pi^2 ceil(k/2)^2)^p + eta kappa.
inline double prior_precision(const PriorSpec& spec, std::size_t k) {
    if (k < 1) throw std::invalid_argument("prior_precision: k >= 1 required");
    const double m = static_cast<double>((k + 1) / 2);
    return spec.eta * detail::int_pow(two_pi * two_pi * m * m, spec.p) + spec.eta * spec.kappa;
}

/// Covariance eigenvalue lambda_k = 1 / (eta (4 pi^2 ceil(k/2)^2)^p + eta kappa).
inline double eigenvalue(const PriorSpec& spec, std::size_t k) {
    return 1.0 / prior_precision(spec, k);
}

/// Karhunen-Loeve draw: c_k = sqrt(lambda_k) Z_k, k = 1..N.
inline FourierCoeffs sample_prior(const PriorSpec& spec, RngStream& rng) {
    auto c = FourierCoeffs::zeros(spec.N);
    for (std::size_t k = 1; k <= spec.N; ++k)
        c.c[k - 1] = std::sqrt(eigenvalue(spec, k)) * rng.normal();
    return c;
}

inline FourierCoeffs sample_prior(const PriorSpec& spec, std::uint64_t seed) {
    RngStream rng(seed);
    return sample_prior(spec, rng);
}

/// Cameron-Martin norm (sum_k c_k^2 / lambda_k)^{1/2}.
inline double rkhs_norm(const FourierCoeffs& c, const PriorSpec& spec) {
    if (c.size() > spec.N)
        throw std::invalid_argument("rkhs_norm: coefficient dimension exceeds truncation N");
    double acc = 0.0;
    for (std::size_t k = 1; k <= c.size(); ++k)
        acc += c.c[k - 1] * c.c[k - 1] * prior_precision(spec, k);
    return std::sqrt(acc);
}

}  // namespace pdrift

#endif
