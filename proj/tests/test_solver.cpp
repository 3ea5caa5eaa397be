#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mixgn/solver.hpp"
#include "test_support.hpp"

using namespace mixgn;
using mixgn::testing::rel_err;

namespace {

const Params kBase{3, 0.5, 4.0};
const GridSpec kGrid{3, 64, 12.0};

const SolveResult& base_solution()
{
    static const SolveResult r = petviashvili_solve(kBase, kGrid);
    return r;
}

double max_abs(const Field& u)
{
    double m = 0.0;
    for (double v : u.values()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double max_abs_diff(const Field& u, const Field& v)
{
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        m = std::max(m, std::abs(u.values()[i] - v.values()[i]));
    }
    return m;
}

} // namespace

TEST(SolverConfig, Validation)
{
    SolverConfig cfg;
    EXPECT_NO_THROW(validate(cfg));
    EXPECT_DOUBLE_EQ(cfg.stabilizer_exponent(kBase), 1.5);
    cfg.tol = 0.0;
    EXPECT_THROW(validate(cfg), ParameterError);
    cfg = {};
    cfg.max_iter = 0;
    EXPECT_THROW(validate(cfg), ParameterError);
    cfg = {};
    cfg.gamma = -1.0;
    EXPECT_THROW(validate(cfg), ParameterError);
}

TEST(Solver, RejectsBadInputs)
{
    EXPECT_THROW(petviashvili_solve({4, 0.5, 3.0}, kGrid), ParameterError);
    EXPECT_THROW(petviashvili_solve({3, 0.5, 3.0}, kGrid), ParameterError);

    SolverConfig dealias;
    dealias.dealias = true;
    EXPECT_THROW(petviashvili_solve({3, 0.5, 3.5}, kGrid, dealias), ParameterError);

    SolverConfig zero;
    zero.initial = Field(kGrid);
    EXPECT_THROW(petviashvili_solve(kBase, kGrid, zero), DegenerateInputError);

    SolverConfig mismatch;
    mismatch.initial = Field(GridSpec{3, 32, 12.0});
    EXPECT_THROW(petviashvili_solve(kBase, kGrid, mismatch), ParameterError);
}

TEST(Solver, ConvergesAtBaseParameters)
{
    const SolveReport& rep = base_solution().report;
    ASSERT_TRUE(rep.converged);
    EXPECT_LE(rep.iterations, 500);
    EXPECT_EQ(rep.residual_history.size(), static_cast<std::size_t>(rep.iterations) + 1);
    EXPECT_EQ(rep.change_history.size(), static_cast<std::size_t>(rep.iterations));
    EXPECT_LE(rep.residual_history.back(), 1e-8);
    EXPECT_LE(std::abs(rep.stabilizer_history.back() - 1.0), 1e-8);
    EXPECT_LE(rep.change_history.back(), 1e-8);
    ASSERT_TRUE(rep.identity_report.equation_residual.has_value());
    EXPECT_LE(*rep.identity_report.equation_residual, 1e-6);
    ASSERT_TRUE(rep.identity_report.discrete_nehari_residual.has_value());
    EXPECT_LE(*rep.identity_report.discrete_nehari_residual, 1e-8);
    EXPECT_GT(rep.wall_time, 0.0);
}

TEST(Solver, ReportIsSelfConsistent)
{
    const SolveResult& r = base_solution();
    const SolveReport& rep = r.report;
    const NormTriple t = norm_triple(r.field, kBase);
    EXPECT_EQ(t.a, rep.final_triple.a);
    EXPECT_EQ(t.b, rep.final_triple.b);
    EXPECT_EQ(t.m, rep.final_triple.m);
    EXPECT_DOUBLE_EQ(rep.energy_c, energy_I(t, kBase));
    EXPECT_DOUBLE_EQ(rep.best_constant, best_constant_from_Q(t.m, kBase));
    EXPECT_DOUBLE_EQ(rep.best_constant_from_c, best_constant_from_c(rep.energy_c, kBase));
    EXPECT_GT(rep.energy_c, 0.0);
    EXPECT_LE(rel_err(rep.best_constant, rep.best_constant_from_c), 2e-2);
}

TEST(Solver, EquationResidualFromIndependentOperators)
{
    // -Δu + (-Δ)^s u - |u|^2 u assembled mode by mode without apply_K.
    const Field& u = base_solution().field;
    const Spectrum u_hat = forward(u);
    Field cube(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u.values()[i];
        cube.values()[i] = v * v * v;
    }
    const Spectrum n_hat = forward(cube);
    const double k0 = std::pow(M_PI / 12.0, 2.0) + M_PI / 12.0;
    double num = 0.0;
    double den = 0.0;
    for_each_mode(u.grid(), [&](std::size_t i, double xi2, double w) {
        const double sym = xi2 > 0.0 ? xi2 + std::sqrt(xi2) : k0;
        num += w * std::norm(sym * u_hat.coefficients[i] - n_hat.coefficients[i]);
        den += w * std::norm(n_hat.coefficients[i]);
    });
    EXPECT_LE(std::sqrt(num / den), 1e-6);
}

TEST(Solver, ResidualDecaysGeometrically)
{
    const auto& hist = base_solution().report.residual_history;
    ASSERT_GT(hist.size(), 30u);
    EXPECT_GT(hist.front(), 0.1);
    for (std::size_t k = 10; k + 10 < hist.size(); ++k) {
        EXPECT_LT(hist[k + 10], hist[k]) << "k=" << k;
    }
}

TEST(Solver, FixedPointOfTheMap)
{
    const Field& u = base_solution().field;
    const IterationStep step = petviashvili_step(u, kBase, 1.5, false);
    EXPECT_LE(detail::relative_l2_change(step.next, u), 1e-8);
    EXPECT_LE(std::abs(step.stabilizer - 1.0), 1e-8);
}

TEST(Solver, StabilizerIsOneOnDiscreteNehariSet)
{
    const Field u = synth_gaussian(kGrid, 2.0, 1.0);
    const Spectrum spec = forward(u);
    const double m = lp_norm(u, 4.0);
    const double t = std::sqrt(mixed_energy(spec, 0.5) / m);
    const IterationStep step = petviashvili_step(t * u, kBase, 1.5, false);
    EXPECT_NEAR(step.stabilizer, 1.0, 1e-13);
}

TEST(Solver, SolutionIsEvenAndPeaksAtOrigin)
{
    const Field& u = base_solution().field;
    const int n = kGrid.n;
    const int c = n / 2;
    double asym = 0.0;
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            for (int k = 1; k < n; ++k) {
                asym = std::max(asym, std::abs(u.at(i, j, k) - u.at(2 * c - i, 2 * c - j, 2 * c - k)));
            }
        }
    }
    EXPECT_LE(asym, 1e-10 * max_abs(u));
    EXPECT_DOUBLE_EQ(u.at(c, c, c), max_abs(u));
}

TEST(Solver, UndershootIsBounded)
{
    const SolveReport& rep = base_solution().report;
    const double peak = max_abs(base_solution().field);
    for (double mn : rep.min_value_history) {
        EXPECT_GE(mn, -0.01 * peak);
    }
    EXPECT_LT(rep.min_value_history.back(), 0.0);
}

TEST(Solver, IndependentOfInitialGuess)
{
    SolverConfig cfg;
    cfg.init = {1.2, 1.8, {0.0, 0.0, 0.0}};
    const SolveResult other = petviashvili_solve(kBase, kGrid, cfg);
    ASSERT_TRUE(other.report.converged);
    const NormTriple& a = base_solution().report.final_triple;
    const NormTriple& b = other.report.final_triple;
    EXPECT_LE(rel_err(a.a, b.a), 1e-6);
    EXPECT_LE(rel_err(a.b, b.b), 1e-6);
    EXPECT_LE(rel_err(a.m, b.m), 1e-6);
}

TEST(Solver, TranslationByGridShift)
{
    SolverConfig cfg;
    cfg.init = {2.0, 1.0, {1.5, -0.75, 0.375}};
    const SolveResult shifted = petviashvili_solve(kBase, kGrid, cfg);
    ASSERT_TRUE(shifted.report.converged);
    const NormTriple& a = base_solution().report.final_triple;
    const NormTriple& b = shifted.report.final_triple;
    EXPECT_LE(rel_err(a.a, b.a), 1e-6);
    EXPECT_LE(rel_err(a.m, b.m), 1e-6);
}

TEST(Solver, ForcedNonConvergenceIsReported)
{
    SolverConfig cfg;
    cfg.max_iter = 1;
    const SolveResult r = petviashvili_solve(kBase, kGrid, cfg);
    EXPECT_FALSE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 1);
    EXPECT_EQ(r.report.residual_history.size(), 2u);
}

TEST(Solver, DealiasedRunConverges)
{
    SolverConfig cfg;
    cfg.dealias = true;
    const SolveResult r = petviashvili_solve(kBase, GridSpec{3, 32, 12.0}, cfg);
    EXPECT_TRUE(r.report.converged);
    EXPECT_LE(std::abs(r.report.stabilizer_history.back() - 1.0), 1e-8);
}

TEST(Solver, OtherParameters)
{
    for (const Params prm : {Params{3, 0.3, 3.5}, Params{3, 0.75, 5.0}}) {
        const SolveResult r = petviashvili_solve(prm, GridSpec{3, 32, 12.0});
        EXPECT_TRUE(r.report.converged) << "s=" << prm.s << " p=" << prm.p;
        EXPECT_LE(*r.report.identity_report.equation_residual, 1e-6);
    }
}

TEST(FiberingRoot, FactorizationExamples)
{
    EXPECT_NEAR(fibering_root(1, 1, 1, kBase), 1.0, 1e-15);
    EXPECT_NEAR(fibering_root(1, 0, 1, kBase), 1.0 / std::sqrt(3.0), 1e-15);
    // 5 + 4 t - 9 t^2 = (1 - t)(5 + 9 t).
    EXPECT_NEAR(fibering_root(5, 2, 3, kBase), 1.0, 1e-15);
    EXPECT_THROW(fibering_root(1, 1, -1, kBase), DegenerateInputError);
    EXPECT_THROW(fibering_root(-1, 1, 1, kBase), ParameterError);
}

TEST(BuildQ, AlgebraAndFieldAgree)
{
    const SolveResult& r = base_solution();
    const BuildQResult q = build_Q(r.field, kBase);
    const Lambdas expected = q_lambdas(r.report.final_triple, kBase);
    EXPECT_EQ(q.lambdas.lambda1, expected.lambda1);
    EXPECT_EQ(q.lambdas.lambda2, expected.lambda2);
    EXPECT_LE(std::abs(nehari_phi(q.predicted)) / q.predicted.m, 1e-12);
    // Trilinear resampling of a peaked profile at h = 0.375.
    EXPECT_LE(rel_err(q.measured.a, q.predicted.a), 5e-2) << "lambda2 = " << q.lambdas.lambda2;
    EXPECT_LE(rel_err(q.measured.b, q.predicted.b), 5e-2);
    EXPECT_LE(rel_err(q.measured.m, q.predicted.m), 5e-2);
}

TEST(BuildQ, UnitDilationIsExact)
{
    // Choose p so that the Gaussian's own a/b equals the ground-state ratio,
    // then lambda2 = 1 up to rounding and no interpolation happens.
    const Field u = synth_gaussian(kGrid, 1.0, 1.1);
    const Spectrum spec = forward(u);
    const double r = seminorm_d12(spec) / seminorm_ds2(spec, 0.5);
    const Params prm{3, 0.5, 6.0 * (1.0 + r) / (2.0 + r)};
    ASSERT_LE(rel_err(ground_state_ratio(prm), r), 1e-14);
    const BuildQResult q = build_Q(u, prm);
    EXPECT_NEAR(q.lambdas.lambda2, 1.0, 1e-14);
    EXPECT_LE(rel_err(q.measured.a, q.predicted.a), 1e-12);
    EXPECT_LE(rel_err(q.measured.b, q.predicted.b), 1e-12);
    EXPECT_LE(rel_err(q.measured.m, q.predicted.m), 1e-12);
    EXPECT_LE(std::abs(nehari_phi(q.measured)) / q.measured.m, 1e-12);
}

TEST(BuildQ, DegenerateInput)
{
    EXPECT_THROW(build_Q(Field(kGrid), kBase), DegenerateInputError);
}

TEST(NehariProject, Examples)
{
    const Field u = synth_gaussian(kGrid, 0.7, 1.3, {1.0, 0.0, 0.0});
    const Field v = nehari_project(u, kBase);
    const NormTriple t = norm_triple(v, kBase);
    EXPECT_LE(std::abs(nehari_phi(t)) / t.m, 1e-12);

    const Field w = nehari_project(v, kBase);
    EXPECT_LE(max_abs_diff(w, v), 1e-13 * max_abs(v));
    EXPECT_THROW(nehari_project(Field(kGrid), kBase), DegenerateInputError);
}

TEST(PohozaevProject, Examples)
{
    const Field u = synth_gaussian(kGrid, 1.5, 1.2);
    const NormTriple t = norm_triple(u, kBase);
    const PohozaevProjection proj = pohozaev_project(u, kBase);
    EXPECT_GT(proj.dilation, 0.0);
    const NormTriple predicted = dilation_triple(t, proj.dilation, kBase);
    EXPECT_LE(std::abs(pohozaev_P(predicted, kBase)) / (3.0 * predicted.m / 4.0), 1e-12);
    const NormTriple measured = norm_triple(proj.field, kBase);
    EXPECT_LE(std::abs(pohozaev_P(measured, kBase)) / (3.0 * measured.m / 4.0), 5e-2);
    EXPECT_THROW(pohozaev_project(Field(kGrid), kBase), DegenerateInputError);
}

TEST(PohozaevProject, RootIsOneOnConsistentTriples)
{
    const auto e = exponents(kBase);
    const NormTriple t{e.r_a * 3.0, e.r_b * 3.0, 3.0};
    const auto C = g2_coefficients(t, kBase);
    EXPECT_NEAR(fibering_root(C[0], C[1], C[2], kBase), 1.0, 1e-14);
}

TEST(PohozaevProject, AmplitudeRescaledRoot)
{
    const NormTriple t{0.8, 1.7, 2.2};
    for (double c : {0.5, 2.0, 3.0}) {
        const auto C = g2_coefficients(amplitude_triple(t, c, kBase), kBase);
        const auto D = g2_coefficients(t, kBase);
        EXPECT_LE(rel_err(fibering_root(C[0], C[1], C[2], kBase), fibering_root(D[0], D[1], c * c * D[2], kBase)),
                  1e-13);
    }
}
