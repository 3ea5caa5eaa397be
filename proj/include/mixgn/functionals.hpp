#pragma once

// Scalar algebra over the norm triple (a, b, m):
//   a = |u|^2_{D^{1,2}},  b = |u|^2_{D^{s,2}},  m = |u|^p_{L^p}.
// Everything here is dimension-generic (N >= 3) and touches no grid.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "mixgn/errors.hpp"

namespace mixgn {

struct Params {
    int N = 3;
    double s = 0.5;
    double p = 4.0;

    /// Fractional critical exponent 2N/(N-2s).
    [[nodiscard]] double two_s_star() const { return 2.0 * N / (N - 2.0 * s); }
    /// Sobolev critical exponent 2N/(N-2).
    [[nodiscard]] double two_star() const { return 2.0 * N / (N - 2.0); }
};

struct NormTriple {
    double a = 0.0;
    double b = 0.0;
    double m = 0.0;
};

struct ExponentBundle {
    double alpha = 0.0;
    double beta = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    double r_a = 0.0;
    double r_b = 0.0;
    double K = 0.0;
    double two_s_star = 0.0;
    double two_star = 0.0;
};

namespace detail {

template <class... Ts>
[[nodiscard]] std::string concat(const Ts&... parts)
{
    std::ostringstream os;
    os.precision(17);
    (os << ... << parts);
    return os.str();
}

inline void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParameterError(concat(name, " must be > 0 (got ", value, ")"));
    }
}

inline void require_mass(double m, const char* what)
{
    if (!(m > 0.0)) {
        throw DegenerateInputError(concat(what, " undefined for zero L^p mass (m = ", m, ")"));
    }
}

} // namespace detail

/// Throws ParameterError naming the first violated bound of
/// N >= 3, 0 < s < 1, 2*_s < p < 2*.
inline void validate(const Params& params)
{
    using detail::concat;
    if (params.N < 3) {
        throw ParameterError(concat("dimension N must be >= 3 (got N = ", params.N, ")"));
    }
    if (!(params.s > 0.0 && params.s < 1.0)) {
        throw ParameterError(concat("s must lie in (0, 1) (got s = ", params.s, ")"));
    }
    const double lo = params.two_s_star();
    const double hi = params.two_star();
    if (!(params.p > lo)) {
        throw ParameterError(concat("p must exceed 2*_s = ", lo, " (got p = ", params.p, ")"));
    }
    if (!(params.p < hi)) {
        throw ParameterError(concat("p must be below 2* = ", hi, " (got p = ", params.p, ")"));
    }
}

inline bool admissible(const Params& params) noexcept
{
    try {
        validate(params);
        return true;
    } catch (const ParameterError&) {
        return false;
    }
}

inline ExponentBundle exponents(const Params& params)
{
    validate(params);
    const double N = params.N;
    const double s = params.s;
    const double p = params.p;
    ExponentBundle e;
    e.alpha = (2.0 * N - p * (N - 2.0)) / (2.0 * (1.0 - s));
    e.beta = (p * (N - 2.0 * s) - 2.0 * N) / (2.0 * (1.0 - s));
    e.A1 = e.alpha / 2.0;
    e.A2 = e.beta / 2.0;
    e.r_a = (p * (N - 2.0 * s) - 2.0 * N) / (2.0 * p * (1.0 - s));
    e.r_b = (2.0 * N - p * (N - 2.0)) / (2.0 * p * (1.0 - s));
    e.K = std::pow(e.r_b, e.A1) * std::pow(e.r_a, e.A2);
    e.two_s_star = params.two_s_star();
    e.two_star = params.two_star();
    return e;
}

/// Ratio a/b that a ground state must satisfy: (p(N-2s)-2N)/(2N-p(N-2)).
inline double ground_state_ratio(const Params& params)
{
    const double N = params.N;
    return (params.p * (N - 2.0 * params.s) - 2.0 * N) / (2.0 * N - params.p * (N - 2.0));
}

/// W = b^{A1} a^{A2} / m. Invariant under amplitude scaling and dilation.
inline double weinstein(const NormTriple& t, const Params& params)
{
    detail::require_mass(t.m, "Weinstein functional");
    const auto e = exponents(params);
    return std::pow(t.b, e.A1) * std::pow(t.a, e.A2) / t.m;
}

inline double energy_I(const NormTriple& t, const Params& params)
{
    return 0.5 * (t.a + t.b) - t.m / params.p;
}

inline double pohozaev_P(const NormTriple& t, const Params& params)
{
    const double N = params.N;
    return 0.5 * (N - 2.0) * t.a + 0.5 * (N - 2.0 * params.s) * t.b - N * t.m / params.p;
}

/// Phi(u) = <I'(u), u> = a + b - m.
inline double nehari_phi(const NormTriple& t) { return t.a + t.b - t.m; }

/// <Phi'(u), u> = 2(a+b) - p m; equals (2-p)(a+b) on the Nehari set.
inline double nehari_phi_derivative(const NormTriple& t, const Params& params)
{
    return 2.0 * (t.a + t.b) - params.p * t.m;
}

/// Triple of v(x) = lambda1 * u(lambda2 * x).
inline NormTriple scale_triple(const NormTriple& t, double lambda1, double lambda2, const Params& params)
{
    detail::require_positive(lambda2, "lambda2");
    const double N = params.N;
    const double l1sq = lambda1 * lambda1;
    return {l1sq * std::pow(lambda2, 2.0 - N) * t.a,
            l1sq * std::pow(lambda2, 2.0 * params.s - N) * t.b,
            std::pow(std::abs(lambda1), params.p) * std::pow(lambda2, -N) * t.m};
}

/// Triple of u(x / dilation).
inline NormTriple dilation_triple(const NormTriple& t, double dilation, const Params& params)
{
    detail::require_positive(dilation, "dilation");
    const double N = params.N;
    return {std::pow(dilation, N - 2.0) * t.a,
            std::pow(dilation, N - 2.0 * params.s) * t.b,
            std::pow(dilation, N) * t.m};
}

/// Triple of tau * u (pure amplitude scaling).
inline NormTriple amplitude_triple(const NormTriple& t, double tau, const Params& params)
{
    return {tau * tau * t.a, tau * tau * t.b, std::pow(std::abs(tau), params.p) * t.m};
}

struct Lambdas {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};

/// (lambda1, lambda2) with scale_triple(t, lambda1, lambda2) having a = b = 1.
/// Solves the two normalization constraints directly.
inline Lambdas rescale_unit_lambdas(const NormTriple& t, const Params& params)
{
    if (!(t.a > 0.0) || !(t.b > 0.0)) {
        throw DegenerateInputError(
            detail::concat("unit rescaling needs a > 0 and b > 0 (got a = ", t.a, ", b = ", t.b, ")"));
    }
    const double N = params.N;
    const double s = params.s;
    Lambdas l;
    l.lambda2 = std::pow(t.b / t.a, 1.0 / (2.0 - 2.0 * s));
    l.lambda1 = std::pow(t.b, (N - 2.0) / (4.0 * (1.0 - s))) * std::pow(t.a, -(N - 2.0 * s) / (4.0 * (1.0 - s)));
    return l;
}

/// Rescaling that turns a Weinstein critical point into a solution of
/// -Δu + (-Δ)^s u = |u|^{p-2}u. For any positive triple the image triple is
/// on the Nehari set and has a/b and a/m equal to the ground-state ratios.
inline Lambdas q_lambdas(const NormTriple& t, const Params& params)
{
    if (!(t.a > 0.0) || !(t.b > 0.0) || !(t.m > 0.0)) {
        throw DegenerateInputError(detail::concat("q_lambdas needs a strictly positive triple (got a = ", t.a,
                                                  ", b = ", t.b, ", m = ", t.m, ")"));
    }
    const double N = params.N;
    const double s = params.s;
    const double p = params.p;
    const double upper = p * (N - 2.0 * s) - 2.0 * N;
    Lambdas l;
    l.lambda2 = std::pow(ground_state_ratio(params) * (t.b / t.a), 1.0 / (2.0 - 2.0 * s));
    l.lambda1 = std::pow(l.lambda2, 2.0 / (p - 2.0)) *
                std::pow((2.0 * p * (1.0 - s) / upper) * (t.a / t.m), 1.0 / (p - 2.0));
    return l;
}

/// Amplitude t_u > 0 with t_u * u on the Nehari manifold.
inline double nehari_t(const NormTriple& t, const Params& params)
{
    detail::require_mass(t.m, "Nehari projection");
    return std::pow((t.a + t.b) / t.m, 1.0 / (params.p - 2.0));
}

struct AmplitudeFibering {
    double f1 = 0.0;       ///< I(tau u)
    double f1_prime = 0.0; ///< tau (a+b) - tau^{p-1} m
    double f2 = 0.0;       ///< tau^{p-2} m
};

inline AmplitudeFibering amplitude_fibering(double tau, const NormTriple& t, const Params& params)
{
    detail::require_positive(tau, "tau");
    const double p = params.p;
    const double e2 = t.a + t.b;
    return {0.5 * tau * tau * e2 - std::pow(tau, p) * t.m / p,
            tau * e2 - std::pow(tau, p - 1.0) * t.m,
            std::pow(tau, p - 2.0) * t.m};
}

struct FiberingValue {
    double g = 0.0;
    double g_prime = 0.0;
    double g_second = 0.0;
};

/// g1(t) = C1 t^{N-2} + C2 t^{N-2s} - C3 t^N and its first two derivatives.
inline FiberingValue fibering_g(double t, double C1, double C2, double C3, const Params& params)
{
    detail::require_positive(t, "t");
    const double N = params.N;
    const double e2s = N - 2.0 * params.s;
    FiberingValue v;
    v.g = C1 * std::pow(t, N - 2.0) + C2 * std::pow(t, e2s) - C3 * std::pow(t, N);
    v.g_prime = C1 * (N - 2.0) * std::pow(t, N - 3.0) + C2 * e2s * std::pow(t, e2s - 1.0) -
                C3 * N * std::pow(t, N - 1.0);
    v.g_second = C1 * (N - 2.0) * (N - 3.0) * std::pow(t, N - 4.0) +
                 C2 * e2s * (e2s - 1.0) * std::pow(t, e2s - 2.0) - C3 * N * (N - 1.0) * std::pow(t, N - 2.0);
    return v;
}

/// Coefficients of g2(t) = I(u(x/t)): (a/2, b/2, m/p).
inline std::array<double, 3> g2_coefficients(const NormTriple& t, const Params& params)
{
    return {0.5 * t.a, 0.5 * t.b, t.m / params.p};
}

struct G3G4 {
    double g3 = 0.0;
    double g4 = 0.0;
};

/// Weights of a and b in J(u) - P(u)/N - J(u(x/t)) + t^N P(u)/N.
/// Both vanish at t = 1 and are positive elsewhere.
inline G3G4 g3_g4(double t, int N, double s)
{
    detail::require_positive(t, "t");
    const double n = N;
    return {1.0 / n + (n - 2.0) / (2.0 * n) * std::pow(t, n) - 0.5 * std::pow(t, n - 2.0),
            s / n + (n - 2.0 * s) / (2.0 * n) * std::pow(t, n) - 0.5 * std::pow(t, n - 2.0 * s)};
}

using Matrix3 = std::array<std::array<double, 3>, 3>;

inline double det3(const Matrix3& M)
{
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

/// Coefficient matrix of the (energy level, Pohozaev, <P'(u),u>) system in
/// the unknowns (a, b, m).
inline Matrix3 pohozaev_system_matrix(const Params& params)
{
    const double N = params.N;
    const double s = params.s;
    const double p = params.p;
    return Matrix3{{{0.5, 0.5, -1.0 / p},
                    {0.5 * (N - 2.0), 0.5 * (N - 2.0 * s), -N / p},
                    {N - 2.0, N - 2.0 * s, -N}}};
}

struct CramerResult {
    // Direct 3x3 expansion.
    double detD = 0.0;
    double detD1 = 0.0;
    double detD2 = 0.0;
    double detD3 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    // Closed forms.
    double detD_closed = 0.0;
    double detD1_closed = 0.0;
    double detD2_closed = 0.0;
    double x1_closed = 0.0;
    double x2_closed = 0.0;
};

/// Solves the Pohozaev-manifold system with right-hand side (k, 0, 0) by
/// Cramer's rule, both by expanding determinants and by the closed forms.
inline CramerResult cramer_dets(const Params& params, double k)
{
    validate(params);
    if (!(k >= 0.0)) {
        throw ParameterError(detail::concat("k must be >= 0 (got k = ", k, ")"));
    }
    const Matrix3 D = pohozaev_system_matrix(params);
    auto replaced = [&](int col) {
        Matrix3 Dc = D;
        Dc[0][col] = k;
        Dc[1][col] = 0.0;
        Dc[2][col] = 0.0;
        return Dc;
    };
    CramerResult r;
    r.detD = det3(D);
    r.detD1 = det3(replaced(0));
    r.detD2 = det3(replaced(1));
    r.detD3 = det3(replaced(2));
    r.x1 = r.detD1 / r.detD;
    r.x2 = r.detD2 / r.detD;
    r.x3 = r.detD3 / r.detD + 0.0; // no negative zero

    const double N = params.N;
    const double s = params.s;
    const double p = params.p;
    r.detD_closed = -N * (p - 2.0) * (1.0 - s) / (2.0 * p);
    r.detD1_closed = -k * N * (p - 2.0) * (N - 2.0 * s) / (2.0 * p);
    r.detD2_closed = k * N * (p - 2.0) * (N - 2.0) / (2.0 * p);
    r.x1_closed = k * (N - 2.0 * s) / (1.0 - s);
    r.x2_closed = -k * (N - 2.0) / (1.0 - s);
    return r;
}

struct AuxJ {
    double J = 0.0;
    double dJdz = 0.0;
};

/// J(z, v) = I(v(e^{-z} x)) and its z-derivative, which is the Pohozaev
/// functional of the dilated function.
inline AuxJ aux_J(double z, const NormTriple& t, const Params& params)
{
    const double N = params.N;
    const double s = params.s;
    AuxJ r;
    r.J = 0.5 * std::exp((N - 2.0) * z) * t.a + 0.5 * std::exp((N - 2.0 * s) * z) * t.b -
          std::exp(N * z) * t.m / params.p;
    r.dJdz = pohozaev_P(dilation_triple(t, std::exp(z), params), params);
    return r;
}

/// C_{N,p,s} from the L^p mass m of the optimizer: C^{-1} = K m^{(p-2)/2}.
inline double best_constant_from_Q(double m, const Params& params)
{
    detail::require_mass(m, "best constant");
    const auto e = exponents(params);
    return 1.0 / (e.K * std::pow(m, (params.p - 2.0) / 2.0));
}

/// C_{N,p,s} from the ground-state level c: C^{-1} = K [2pc/(p-2)]^{(p-2)/2}.
inline double best_constant_from_c(double c, const Params& params)
{
    detail::require_positive(c, "ground-state energy c");
    const auto e = exponents(params);
    const double p = params.p;
    return 1.0 / (e.K * std::pow(2.0 * p * c / (p - 2.0), (p - 2.0) / 2.0));
}

} // namespace mixgn
