#pragma once

// Spectral seminorms, pointwise norms, and geometric operations on Fields.
//
// Frequencies are xi_k = (pi/L) * k~ with k~ the signed wrapped index. Sums are
// weighted so they approximate the continuum integrals directly:
//   physical:  h^3 * sum_j f(u_j)
//   spectral:  (h^3 / n^3) * sum_k M(xi_k) |c_k|^2
// The seminorms use the multiplier form |u|^2_{D^{s,2}} = int |xi|^{2s} |u^(xi)|^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mixgn/fft.hpp"
#include "mixgn/functionals.hpp"
#include "mixgn/grid.hpp"

namespace mixgn {

inline void require_fractional_order(double s)
{
    if (!(s > 0.0 && s < 1.0)) {
        throw ParameterError(detail::concat("s must lie in (0, 1) (got s = ", s, ")"));
    }
}

/// Mixed symbol K(xi) = |xi|^2 + |xi|^{2s} as a function of |xi|^2.
inline double mixed_symbol(double xi_squared, double s) { return xi_squared + std::pow(xi_squared, s); }

/// Regularized zero-mode value K(pi / L).
inline double zero_mode_symbol(const GridSpec& grid, double s)
{
    const double xi = grid.xi_min();
    return mixed_symbol(xi * xi, s);
}

/// Spectral quadrature weight h^3 / n^3 of one Fourier mode.
inline double mode_weight(const GridSpec& grid) { return grid.cell_volume() / static_cast<double>(grid.size()); }

/// (h^3/n^3) sum_k M(|xi_k|^2) |c_k|^2 over the full spectrum.
template <class Multiplier>
double spectral_quadratic(const Spectrum& spec, Multiplier&& multiplier)
{
    double acc = 0.0;
    for_each_mode(spec.grid, [&](std::size_t i, double xi2, double w) {
        acc += w * multiplier(xi2) * std::norm(spec.coefficients[i]);
    });
    return mode_weight(spec.grid) * acc;
}

/// Bilinear form (h^3/n^3) sum_k M(|xi_k|^2) Re(c_k conj(d_k)).
template <class Multiplier>
double spectral_bilinear(const Spectrum& lhs, const Spectrum& rhs, Multiplier&& multiplier)
{
    double acc = 0.0;
    for_each_mode(lhs.grid, [&](std::size_t i, double xi2, double w) {
        acc += w * multiplier(xi2) * std::real(lhs.coefficients[i] * std::conj(rhs.coefficients[i]));
    });
    return mode_weight(lhs.grid) * acc;
}

inline double d12_multiplier(double xi2) { return xi2; }

inline auto ds2_multiplier(double s)
{
    return [s](double xi2) { return xi2 > 0.0 ? std::pow(xi2, s) : 0.0; };
}

inline double seminorm_d12(const Spectrum& spec) { return spectral_quadratic(spec, d12_multiplier); }

inline double seminorm_ds2(const Spectrum& spec, double s)
{
    require_fractional_order(s);
    return spectral_quadratic(spec, ds2_multiplier(s));
}

/// a = |u|^2_{D^{1,2}}.
inline double seminorm_d12(const Field& u) { return seminorm_d12(forward(u)); }

/// b = |u|^2_{D^{s,2}}, multiplier convention; the zero mode contributes 0.
inline double seminorm_ds2(const Field& u, double s)
{
    require_fractional_order(s);
    return seminorm_ds2(forward(u), s);
}

/// Physical-space L^2 inner product h^3 sum_j u_j v_j.
inline double l2_inner(std::span<const double> u, std::span<const double> v, const GridSpec& grid)
{
    return grid.cell_volume() * std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
}

/// m = h^3 sum_j |u_j|^p.
inline double lp_norm(const Field& u, double p)
{
    if (!(p >= 1.0)) {
        throw ParameterError(detail::concat("L^p exponent must be >= 1 (got p = ", p, ")"));
    }
    double acc = 0.0;
    if (p == 2.0) {
        for (double v : u.values()) {
            acc += v * v;
        }
    } else {
        for (double v : u.values()) {
            acc += std::pow(std::abs(v), p);
        }
    }
    return u.grid().cell_volume() * acc;
}

inline NormTriple norm_triple(const Field& u, const Params& params)
{
    const Spectrum spec = forward(u);
    return {seminorm_d12(spec), seminorm_ds2(spec, params.s), lp_norm(u, params.p)};
}

/// Multiplies every mode by K(xi); the zero mode uses the regularized K0.
inline Spectrum apply_K(Spectrum spec, double s)
{
    require_fractional_order(s);
    const double k0 = zero_mode_symbol(spec.grid, s);
    for_each_mode(spec.grid, [&](std::size_t i, double xi2, double) {
        spec.coefficients[i] *= xi2 > 0.0 ? mixed_symbol(xi2, s) : k0;
    });
    return spec;
}

/// Divides every mode by K(xi); the zero mode uses the regularized K0.
inline Spectrum apply_K_inverse(Spectrum spec, double s)
{
    require_fractional_order(s);
    const double k0 = zero_mode_symbol(spec.grid, s);
    for_each_mode(spec.grid, [&](std::size_t i, double xi2, double) {
        spec.coefficients[i] /= xi2 > 0.0 ? mixed_symbol(xi2, s) : k0;
    });
    return spec;
}

/// <K u, u> with the same regularized multiplier as apply_K.
inline double mixed_energy(const Spectrum& spec, double s)
{
    const double k0 = zero_mode_symbol(spec.grid, s);
    return spectral_quadratic(spec, [&](double xi2) { return xi2 > 0.0 ? mixed_symbol(xi2, s) : k0; });
}

using Point3 = std::array<double, 3>;

/// Periodic minimal-image displacement on [-L, L).
inline double minimal_image(double d, double half_width)
{
    const double period = 2.0 * half_width;
    return d - period * std::round(d / period);
}

inline Field synth_gaussian(const GridSpec& grid, double amplitude, double width, const Point3& center = {0, 0, 0})
{
    validate(grid);
    detail::require_positive(width, "Gaussian width");
    for (double c : center) {
        if (!(c >= -grid.half_width && c < grid.half_width)) {
            throw ParameterError(detail::concat("Gaussian center coordinate ", c, " lies outside [-L, L)"));
        }
    }
    Field u(grid);
    const int n = grid.n;
    const double inv = 1.0 / (2.0 * width * width);
    std::vector<std::array<double, 3>> d2(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int axis = 0; axis < 3; ++axis) {
            const double d = minimal_image(grid.coordinate(j) - center[axis], grid.half_width);
            d2[j][axis] = d * d;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                u.at(i, j, k) = amplitude * std::exp(-(d2[i][0] + d2[j][1] + d2[k][2]) * inv);
            }
        }
    }
    return u;
}

/// v(x) = lambda1 * u(lambda2 * x) by periodic trilinear interpolation.
/// lambda2 == 1 is pure amplitude scaling.
inline Field dilate(const Field& u, double lambda1, double lambda2)
{
    detail::require_positive(lambda2, "lambda2");
    if (lambda2 == 1.0) {
        return lambda1 * u;
    }
    const GridSpec& g = u.grid();
    const int n = g.n;
    const double h = g.spacing();
    struct Stencil {
        int lo;
        int hi;
        double frac;
    };
    std::vector<Stencil> st(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double q = (lambda2 * g.coordinate(j) + g.half_width) / h;
        const double fl = std::floor(q);
        const double frac = q - fl;
        int lo = static_cast<int>(static_cast<std::int64_t>(fl) % n);
        if (lo < 0) {
            lo += n;
        }
        st[j] = {lo, (lo + 1) % n, frac};
    }
    Field v(g);
    for (int i = 0; i < n; ++i) {
        const auto& sx = st[i];
        for (int j = 0; j < n; ++j) {
            const auto& sy = st[j];
            for (int k = 0; k < n; ++k) {
                const auto& sz = st[k];
                auto lerp_z = [&](int a, int b) {
                    return (1.0 - sz.frac) * u.at(a, b, sz.lo) + sz.frac * u.at(a, b, sz.hi);
                };
                const double c00 = lerp_z(sx.lo, sy.lo);
                const double c01 = lerp_z(sx.lo, sy.hi);
                const double c10 = lerp_z(sx.hi, sy.lo);
                const double c11 = lerp_z(sx.hi, sy.hi);
                const double c0 = (1.0 - sy.frac) * c00 + sy.frac * c01;
                const double c1 = (1.0 - sy.frac) * c10 + sy.frac * c11;
                v.at(i, j, k) = lambda1 * ((1.0 - sx.frac) * c0 + sx.frac * c1);
            }
        }
    }
    return v;
}

/// Discrete symmetric decreasing rearrangement: |u| values sorted descending
/// are placed on grid points ordered by distance from the origin, ties broken
/// by lexicographic index.
inline Field rearrange_radial(const Field& u)
{
    const GridSpec& g = u.grid();
    const int n = g.n;
    const int c = n / 2; // x = 0
    std::vector<std::int64_t> dist2(u.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const std::int64_t di = i - c;
                const std::int64_t dj = j - c;
                const std::int64_t dk = k - c;
                dist2[u.index(i, j, k)] = di * di + dj * dj + dk * dk;
            }
        }
    }
    std::vector<std::size_t> order(u.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return dist2[x] < dist2[y]; });

    std::vector<double> mags(u.size());
    std::transform(u.values().begin(), u.values().end(), mags.begin(), [](double v) { return std::abs(v); });
    std::sort(mags.begin(), mags.end(), std::greater<>());

    Field v(g);
    for (std::size_t r = 0; r < order.size(); ++r) {
        v.values()[order[r]] = mags[r];
    }
    return v;
}

} // namespace mixgn
