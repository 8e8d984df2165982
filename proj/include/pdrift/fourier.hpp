#ifndef PDRIFT_FOURIER_HPP
#define PDRIFT_FOURIER_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pdrift {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A zero-mean function on the circle, stored as coefficients against the
/// real orthonormal basis
///   phi_{2m-1}(x) = sqrt(2) sin(2 pi m x),  phi_{2m}(x) = sqrt(2) cos(2 pi m x).
/// The constant mode is structurally absent.
struct FourierCoeffs {
    std::vector<double> c;

    FourierCoeffs() = default;
    explicit FourierCoeffs(std::vector<double> coeffs) : c(std::move(coeffs)) {
        if (c.size() < 2)
            throw std::invalid_argument("FourierCoeffs: need at least 2 coefficients");
    }
    static FourierCoeffs zeros(std::size_t n) {
        return FourierCoeffs(std::vector<double>(n < 2 ? 2 : n, 0.0));
    }
    /// Unit weight on basis function k (1-based).
    static FourierCoeffs unit(std::size_t k, std::size_t n) {
        if (k < 1 || k > n) throw std::invalid_argument("FourierCoeffs::unit: bad index");
        auto f = zeros(n);
        f.c[k - 1] = 1.0;
        return f;
    }

    std::size_t size() const { return c.size(); }

    /// Pointwise evaluation of sum_k c_k phi_k(x).  Exact periodicity: only
    /// the fractional part of x matters.
    double eval(double x) const {
        const double root2 = std::numbers::sqrt2;
        double s = 0.0;
        for (std::size_t m = 1; 2 * m - 1 <= c.size(); ++m) {
            const double a = c[2 * m - 2];                      // sin weight
            const double b = (2 * m <= c.size()) ? c[2 * m - 1] : 0.0;  // cos weight
            if (a == 0.0 && b == 0.0) continue;
            const double ang = two_pi * static_cast<double>(m) * x;
            s += root2 * (a * std::sin(ang) + b * std::cos(ang));
        }
        return s;
    }

    /// Exact antiderivative with B(0) = 0; periodic since the function has
    /// zero mean.
    double antiderivative(double x) const {
        const double root2 = std::numbers::sqrt2;
        double s = 0.0;
        for (std::size_t m = 1; 2 * m - 1 <= c.size(); ++m) {
            const double a = c[2 * m - 2];
            const double b = (2 * m <= c.size()) ? c[2 * m - 1] : 0.0;
            if (a == 0.0 && b == 0.0) continue;
            const double w = two_pi * static_cast<double>(m);
            s += root2 * (a * (1.0 - std::cos(w * x)) + b * std::sin(w * x)) / w;
        }
        return s;
    }
};

/// Real values sampled on the uniform grid x_j = j/M, j = 0..M-1.
struct GridFunction {
    std::vector<double> v;

    GridFunction() = default;
    explicit GridFunction(std::vector<double> values) : v(std::move(values)) {
        const std::size_t m = v.size();
        if (m < 4 || (m & (m - 1)) != 0)
            throw std::invalid_argument("GridFunction: grid size must be a power of two >= 4");
    }
    std::size_t size() const { return v.size(); }
};

/// phi_k(x) for k >= 1; the constant mode k = 0 is excluded.
inline double basis_eval(std::size_t k, double x) {
    if (k == 0) throw std::invalid_argument("basis_eval: k = 0 (constant mode) excluded");
    const double m = static_cast<double>((k + 1) / 2);
    const double ang = two_pi * m * x;
    return std::numbers::sqrt2 * (k % 2 == 1 ? std::sin(ang) : std::cos(ang));
}

/// First derivative of phi_k at x.
inline double basis_deriv(std::size_t k, double x) {
    if (k == 0) throw std::invalid_argument("basis_deriv: k = 0 (constant mode) excluded");
    const double m = static_cast<double>((k + 1) / 2);
    const double w = two_pi * m;
    const double ang = w * x;
    // (sqrt2 sin)' = w sqrt2 cos,  (sqrt2 cos)' = -w sqrt2 sin
    return std::numbers::sqrt2 * (k % 2 == 1 ? w * std::cos(ang) : -w * std::sin(ang));
}

inline GridFunction synthesize(const FourierCoeffs& f, std::size_t grid_size) {
    if (grid_size < 2 * f.size())
        throw std::invalid_argument("synthesize: grid size must be >= 2N (aliasing)");
    std::vector<double> out(grid_size, 0.0);
    for (std::size_t j = 0; j < grid_size; ++j)
        out[j] = f.eval(static_cast<double>(j) / static_cast<double>(grid_size));
    return GridFunction(std::move(out));
}

/// Rectangle-rule L2 projection onto the first N basis functions; exact for
/// trigonometric polynomials below the Nyquist frequency.
inline FourierCoeffs analyze(const GridFunction& g, std::size_t n_modes) {
    const std::size_t m = g.size();
    if (n_modes > m / 2 - 1)
        throw std::invalid_argument("analyze: truncation too large for grid (need N <= M/2 - 1)");
    std::vector<double> c(n_modes < 2 ? 2 : n_modes, 0.0);
    for (std::size_t k = 1; k <= n_modes; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            s += g.v[j] * basis_eval(k, static_cast<double>(j) / static_cast<double>(m));
        c[k - 1] = s / static_cast<double>(m);
    }
    return FourierCoeffs(std::move(c));
}

/// d/dx in coefficient space, applied `order` times.  On the pair
/// (a, b) = (c_{2m-1}, c_{2m}) one application maps (a, b) -> (-wb, wa)
/// with w = 2 pi m.
inline FourierCoeffs differentiate(const FourierCoeffs& f, unsigned order) {
    FourierCoeffs out = f;
    for (unsigned it = 0; it < order; ++it) {
        for (std::size_t m = 1; 2 * m - 1 <= out.c.size(); ++m) {
            const double w = two_pi * static_cast<double>(m);
            const double a = out.c[2 * m - 2];
            const double b = (2 * m <= out.c.size()) ? out.c[2 * m - 1] : 0.0;
            out.c[2 * m - 2] = -w * b;
            if (2 * m <= out.c.size()) out.c[2 * m - 1] = w * a;
        }
    }
    return out;
}

/// Sobolev norm with weight (2 pi ceil(k/2))^{2s} per mode, so that
/// sobolev_norm(f, 1) equals the L2 norm of the derivative exactly.
inline double sobolev_norm(const FourierCoeffs& f, double s) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= f.c.size(); ++k) {
        const double w = two_pi * static_cast<double>((k + 1) / 2);
        acc += std::pow(w, 2.0 * s) * f.c[k - 1] * f.c[k - 1];
    }
    return std::sqrt(acc);
}

inline double l2_norm(const FourierCoeffs& f) { return sobolev_norm(f, 0.0); }

}  // namespace pdrift

#endif
