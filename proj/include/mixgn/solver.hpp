#pragma once

// Ground states of -Δu + (-Δ)^s u = |u|^{p-2} u on the periodic box by a
// stabilized spectral fixed-point iteration
//
//     u_{k+1}^ = M_k^gamma K^{-1} F[|u_k|^{p-2} u_k],
//     M_k      = <K u_k, u_k> / <|u_k|^{p-2} u_k, u_k>,
//
// plus the Nehari and Pohozaev manifold projections.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mixgn/field_core.hpp"
#include "mixgn/functionals.hpp"
#include "mixgn/verifier.hpp"

namespace mixgn {

struct SolverConfig {
    double tol = 1e-8;
    int max_iter = 500;
    /// Stabilizer exponent; (p-1)/(p-2) when unset.
    std::optional<double> gamma;
    /// 2/3-rule truncation of the nonlinear term (even integer p only).
    bool dealias = false;
    /// Initial Gaussian, used when `initial` is empty.
    GaussianBump init{2.0, 1.0, {0.0, 0.0, 0.0}};
    std::optional<Field> initial;

    [[nodiscard]] double stabilizer_exponent(const Params& params) const
    {
        return gamma.value_or((params.p - 1.0) / (params.p - 2.0));
    }
};

inline void validate(const SolverConfig& cfg)
{
    if (!(cfg.tol > 0.0)) {
        throw ParameterError(detail::concat("tol must be > 0 (got ", cfg.tol, ")"));
    }
    if (cfg.max_iter < 1) {
        throw ParameterError(detail::concat("max_iter must be >= 1 (got ", cfg.max_iter, ")"));
    }
    if (cfg.gamma && !(*cfg.gamma > 0.0)) {
        throw ParameterError(detail::concat("gamma must be > 0 (got ", *cfg.gamma, ")"));
    }
}

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;   ///< relative equation residual of each iterate
    std::vector<double> stabilizer_history; ///< M_k of each iterate
    std::vector<double> change_history;     ///< relative L2 change of each update
    std::vector<double> min_value_history;  ///< min_j u_j of each iterate
    NormTriple final_triple;
    double energy_c = 0.0;
    IdentityReport identity_report;
    double best_constant = 0.0;        ///< from the L^p mass of the solution
    double best_constant_from_c = 0.0; ///< from the energy level
    bool converged = false;
    double wall_time = 0.0;
};

struct SolveResult {
    Field field;
    SolveReport report;
};

namespace detail {

inline bool is_even_integer(double p) { return p == std::floor(p) && std::fmod(p, 2.0) == 0.0; }

/// Zeroes every mode with |k~| > n/3 along some axis.
inline void truncate_two_thirds(Spectrum& spec)
{
    const int n = spec.grid.n;
    const int cut = n / 3;
    const int nz = n / 2 + 1;
    for (int kx = 0; kx < n; ++kx) {
        for (int ky = 0; ky < n; ++ky) {
            for (int kz = 0; kz < nz; ++kz) {
                if (std::abs(wrapped_index(kx, n)) > cut || std::abs(wrapped_index(ky, n)) > cut ||
                    std::abs(wrapped_index(kz, n)) > cut) {
                    spec.coefficients[spec.index(kx, ky, kz)] = 0.0;
                }
            }
        }
    }
}

inline double relative_l2_change(const Field& next, const Field& prev)
{
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
        const double d = next.values()[i] - prev.values()[i];
        diff += d * d;
        norm += next.values()[i] * next.values()[i];
    }
    return norm > 0.0 ? std::sqrt(diff / norm) : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// One application of the stabilized map to u; also returns M and the
/// equation residual of u itself.
struct IterationStep {
    Field next;
    double stabilizer = 0.0;
    double residual = 0.0;
};

inline IterationStep petviashvili_step(const Field& u, const Params& params, double gamma, bool dealias)
{
    const double s = params.s;
    Spectrum u_hat = forward(u);
    Field source = u;
    if (dealias) {
        detail::truncate_two_thirds(u_hat);
        source = inverse(u_hat);
    }
    const Field nu = nonlinearity(source, params.p);
    Spectrum n_hat = forward(nu);
    if (dealias) {
        detail::truncate_two_thirds(n_hat);
    }
    const double mass = l2_inner(nu.values(), source.values(), u.grid());
    if (!(mass > 0.0)) {
        throw DegenerateInputError("iteration reached the zero field");
    }
    IterationStep step;
    step.stabilizer = mixed_energy(u_hat, s) / mass;
    step.residual = spectral_equation_residual(u_hat, n_hat, s);
    Spectrum next = apply_K_inverse(std::move(n_hat), s);
    const double factor = std::pow(step.stabilizer, gamma);
    for (auto& c : next.coefficients) {
        c *= factor;
    }
    step.next = inverse(next);
    return step;
}

inline SolveResult petviashvili_solve(const Params& params, const GridSpec& grid, const SolverConfig& cfg = {})
{
    validate(params);
    validate(grid);
    validate(cfg);
    if (params.N != grid.dim) {
        throw ParameterError(detail::concat("field solves need N = ", grid.dim, " (got N = ", params.N, ")"));
    }
    if (cfg.dealias && !detail::is_even_integer(params.p)) {
        throw ParameterError(detail::concat("dealiasing needs an even integer p (got p = ", params.p, ")"));
    }
    const auto start = std::chrono::steady_clock::now();
    const double gamma = cfg.stabilizer_exponent(params);

    Field u = cfg.initial ? *cfg.initial : synth_gaussian(grid, cfg.init.amplitude, cfg.init.width, cfg.init.center);
    if (u.grid() != grid) {
        throw ParameterError("initial field grid does not match the solve grid");
    }
    if (!(lp_norm(u, params.p) > 0.0)) {
        throw DegenerateInputError("initial field is zero");
    }

    SolveReport report;
    double last_change = std::numeric_limits<double>::infinity();
    for (int k = 0;; ++k) {
        IterationStep step = petviashvili_step(u, params, gamma, cfg.dealias);
        report.residual_history.push_back(step.residual);
        report.stabilizer_history.push_back(step.stabilizer);
        report.min_value_history.push_back(*std::min_element(u.values().begin(), u.values().end()));
        if (last_change <= cfg.tol && std::abs(step.stabilizer - 1.0) <= cfg.tol && step.residual <= cfg.tol) {
            report.converged = true;
            break;
        }
        if (k == cfg.max_iter) {
            break;
        }
        last_change = detail::relative_l2_change(step.next, u);
        report.change_history.push_back(last_change);
        u = std::move(step.next);
        report.iterations = k + 1;
    }

    report.final_triple = norm_triple(u, params);
    report.energy_c = energy_I(report.final_triple, params);
    report.identity_report = check_identities(report.final_triple, params, &u);
    report.best_constant = best_constant_from_Q(report.final_triple.m, params);
    if (report.energy_c > 0.0) {
        report.best_constant_from_c = best_constant_from_c(report.energy_c, params);
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(u), std::move(report)};
}

/// Unique t > 0 with g1'(t) = 0 for g1(t) = C1 t^{N-2} + C2 t^{N-2s} - C3 t^N.
/// Bracketed by doubling/halving from t = 1, bisected, then Newton-polished.
inline double fibering_root(double C1, double C2, double C3, const Params& params)
{
    if (!(C3 > 0.0)) {
        throw DegenerateInputError(detail::concat("fibering map has no critical point for C3 <= 0 (got C3 = ", C3,
                                                  ")"));
    }
    if (!(C1 >= 0.0 && C2 >= 0.0)) {
        throw ParameterError(detail::concat("fibering coefficients must be >= 0 (got C1 = ", C1, ", C2 = ", C2, ")"));
    }
    if (!(C1 + C2 > 0.0)) {
        throw DegenerateInputError("fibering map critical point collapses to t = 0 when C1 + C2 = 0");
    }
    const double N = params.N;
    const double s = params.s;
    // g1'(t) = t^{N-3} h(t); h is decreasing from its positive value at 0.
    auto h = [&](double t) {
        return C1 * (N - 2.0) + C2 * (N - 2.0 * s) * std::pow(t, 2.0 - 2.0 * s) - C3 * N * t * t;
    };
    auto dh = [&](double t) {
        return C2 * (N - 2.0 * s) * (2.0 - 2.0 * s) * std::pow(t, 1.0 - 2.0 * s) - 2.0 * C3 * N * t;
    };
    double lo = 1.0;
    double hi = 1.0;
    if (h(1.0) > 0.0) {
        while (h(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        while (h(lo) <= 0.0) {
            hi = lo;
            lo *= 0.5;
        }
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 3; ++i) {
        const double d = dh(t);
        if (d == 0.0) {
            break;
        }
        const double candidate = t - h(t) / d;
        if (!(candidate > lo * (1.0 - 1e-12) && candidate < hi * (1.0 + 1e-12))) {
            break;
        }
        t = candidate;
    }
    return t;
}

struct BuildQResult {
    Field field;
    Lambdas lambdas;
    NormTriple predicted; ///< scale_triple of the input triple
    NormTriple measured;  ///< norm_triple of the output field
};

/// Q = lambda1 u(lambda2 x) with (lambda1, lambda2) from q_lambdas.
inline BuildQResult build_Q(const Field& u, const Params& params)
{
    require_field_params(u, params);
    const NormTriple t = norm_triple(u, params);
    BuildQResult r;
    r.lambdas = q_lambdas(t, params);
    r.predicted = scale_triple(t, r.lambdas.lambda1, r.lambdas.lambda2, params);
    r.field = dilate(u, r.lambdas.lambda1, r.lambdas.lambda2);
    r.measured = norm_triple(r.field, params);
    return r;
}

/// t_u * u with t_u the unique amplitude putting u on the Nehari manifold.
inline Field nehari_project(const Field& u, const Params& params)
{
    require_field_params(u, params);
    const NormTriple t = norm_triple(u, params);
    if (!(t.m > 0.0)) {
        throw DegenerateInputError("Nehari projection undefined for the zero field");
    }
    return nehari_t(t, params) * u;
}

struct PohozaevProjection {
    double dilation = 1.0;
    Field field;
};

/// u(x / t) with t the maximizer of t -> I(u(x/t)).
inline PohozaevProjection pohozaev_project(const Field& u, const Params& params)
{
    require_field_params(u, params);
    const NormTriple t = norm_triple(u, params);
    if (!(t.m > 0.0)) {
        throw DegenerateInputError("Pohozaev projection undefined for zero L^p mass");
    }
    const auto C = g2_coefficients(t, params);
    PohozaevProjection r;
    r.dilation = fibering_root(C[0], C[1], C[2], params);
    r.field = dilate(u, 1.0, 1.0 / r.dilation);
    return r;
}

} // namespace mixgn
