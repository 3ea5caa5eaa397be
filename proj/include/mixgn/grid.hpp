#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mixgn/errors.hpp"
#include "mixgn/functionals.hpp"

namespace mixgn {

/// Uniform periodic grid on [-L, L)^dim with n samples per axis.
struct GridSpec {
    int dim = 3;
    int n = 64;
    double half_width = 10.0;

    [[nodiscard]] double spacing() const { return 2.0 * half_width / n; }
    [[nodiscard]] std::size_t size() const
    {
        const auto nn = static_cast<std::size_t>(n);
        return nn * nn * nn;
    }
    /// Quadrature weight h^dim of one physical sample.
    [[nodiscard]] double cell_volume() const
    {
        const double h = spacing();
        return h * h * h;
    }
    /// Coordinate of sample index j along any axis.
    [[nodiscard]] double coordinate(int j) const { return -half_width + spacing() * j; }
    /// Smallest nonzero resolved frequency pi / L.
    [[nodiscard]] double xi_min() const { return M_PI / half_width; }

    /// Number of complex coefficients in the half (r2c) spectrum.
    [[nodiscard]] std::size_t spectrum_size() const
    {
        const auto nn = static_cast<std::size_t>(n);
        return nn * nn * (nn / 2 + 1);
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline void validate(const GridSpec& grid)
{
    using detail::concat;
    if (grid.dim != 3) {
        throw ParameterError(concat("grid dimension must be 3 (got dim = ", grid.dim, ")"));
    }
    if (grid.n < 8 || !is_power_of_two(grid.n)) {
        throw ParameterError(concat("grid size n must be a power of two >= 8 (got n = ", grid.n, ")"));
    }
    if (!(grid.half_width > 0.0) || !std::isfinite(grid.half_width)) {
        throw ParameterError(concat("box half-width L must be > 0 (got L = ", grid.half_width, ")"));
    }
}

/// Real samples of a function on a GridSpec, row-major (x slowest, z fastest).
class Field {
public:
    Field() = default;

    explicit Field(GridSpec grid) : grid_(grid)
    {
        validate(grid_);
        values_.assign(grid_.size(), 0.0);
    }

    Field(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
    {
        validate(grid_);
        if (values_.size() != grid_.size()) {
            throw ParameterError(detail::concat("field length ", values_.size(), " does not match n^3 = ",
                                                grid_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw ParameterError("field values must be finite");
            }
        }
    }

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    [[nodiscard]] std::size_t index(int i, int j, int k) const
    {
        const auto n = static_cast<std::size_t>(grid_.n);
        return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(k);
    }
    [[nodiscard]] double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
    double& at(int i, int j, int k) { return values_[index(i, j, k)]; }

    Field& operator*=(double c)
    {
        for (double& v : values_) {
            v *= c;
        }
        return *this;
    }
    friend Field operator*(double c, Field u) { return u *= c; }

    Field& operator+=(const Field& other)
    {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            values_[i] += other.values_[i];
        }
        return *this;
    }

private:
    GridSpec grid_{};
    std::vector<double> values_;
};

/// Half (r2c) discrete Fourier spectrum of a real Field: index layout
/// [kx][ky][kz] with kz in [0, n/2]. The remaining coefficients follow from
/// Hermitian symmetry.
struct Spectrum {
    GridSpec grid{};
    std::vector<std::complex<double>> coefficients;

    [[nodiscard]] std::size_t index(int kx, int ky, int kz) const
    {
        const auto n = static_cast<std::size_t>(grid.n);
        const auto nz = n / 2 + 1;
        return (static_cast<std::size_t>(kx) * n + static_cast<std::size_t>(ky)) * nz + static_cast<std::size_t>(kz);
    }
};

/// Signed wrapped index in {-n/2, ..., n/2 - 1}.
inline int wrapped_index(int k, int n) { return k < n / 2 ? k : k - n; }

/// Calls fn(flat_index, xi_squared, pair_weight) for every stored coefficient.
/// pair_weight is 2 for coefficients whose conjugate partner is not stored.
template <class Fn>
void for_each_mode(const GridSpec& grid, Fn&& fn)
{
    const int n = grid.n;
    const int nz = n / 2 + 1;
    const double dk = grid.xi_min();
    std::size_t idx = 0;
    for (int kx = 0; kx < n; ++kx) {
        const double fx = dk * wrapped_index(kx, n);
        for (int ky = 0; ky < n; ++ky) {
            const double fy = dk * wrapped_index(ky, n);
            const double fxy = fx * fx + fy * fy;
            for (int kz = 0; kz < nz; ++kz, ++idx) {
                const double fz = dk * wrapped_index(kz, n);
                const double weight = (kz == 0 || kz == n / 2) ? 1.0 : 2.0;
                fn(idx, fxy + fz * fz, weight);
            }
        }
    }
}

} // namespace mixgn
