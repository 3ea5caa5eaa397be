#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixgn/solver.hpp"
#include "mixgn/verifier.hpp"
#include "test_support.hpp"

using namespace mixgn;
using mixgn::testing::random_params;
using mixgn::testing::random_triple;
using mixgn::testing::rel_err;

namespace {

const Params kBase{3, 0.5, 4.0};
const GridSpec kGrid{3, 64, 12.0};

const SolveResult& ground_state()
{
    static const SolveResult r = petviashvili_solve(kBase, kGrid);
    return r;
}

Field random_field(const GridSpec& grid, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return synth_mixture(grid, random_mixture(grid, rng));
}

Field plus(Field u, const Field& v)
{
    u += v;
    return u;
}

} // namespace

TEST(CheckIdentities, SyntheticTriplesAreExact)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Params prm = random_params(rng, 3);
        const auto e = exponents(prm);
        const double m = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
        const IdentityReport r = check_identities({e.r_a * m, e.r_b * m, m}, prm);
        ASSERT_LE(r.nehari_residual, 1e-13);
        ASSERT_LE(r.pohozaev_residual, 1e-13);
        ASSERT_LE(r.ratio_15_d12, 1e-13);
        ASSERT_LE(r.ratio_15_lp, 1e-13);
        ASSERT_LE(r.identity_16_residual, 1e-13);
        ASSERT_LE(r.c_consistency, 1e-13);
        ASSERT_LE(r.energy_form_residual, 1e-13);
        ASSERT_FALSE(r.equation_residual.has_value());
        ASSERT_TRUE(within_tolerances(r, published_tolerances(kGrid)).passed);
    }
}

TEST(CheckIdentities, RandomTriplesViolateThem)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        const Params prm = random_params(rng, 3);
        const IdentityReport r = check_identities(random_triple(rng), prm);
        EXPECT_GT(r.nehari_residual, 0.0);
        EXPECT_GT(r.pohozaev_residual, 0.0);
        EXPECT_GT(r.ratio_15_d12, 0.0);
        EXPECT_GE(r.c_consistency, 0.0);
    }
    EXPECT_THROW(check_identities({0, 1, 1}, kBase), DegenerateInputError);
    EXPECT_THROW(check_identities({1, 1, 0}, kBase), DegenerateInputError);
}

TEST(CheckIdentities, VerdictListsEveryFailure)
{
    IdentityReport r;
    r.nehari_residual = 1.0;
    r.pohozaev_residual = 1.0;
    r.equation_residual = 1.0;
    const ToleranceVerdict v = within_tolerances(r, published_tolerances(kGrid));
    EXPECT_FALSE(v.passed);
    EXPECT_EQ(v.failures.size(), 3u);
    r.nehari_residual = NAN;
    r.pohozaev_residual = 0.0;
    r.equation_residual.reset();
    EXPECT_FALSE(within_tolerances(r, published_tolerances(kGrid)).passed);
}

TEST(CheckIdentities, GroundStateReport)
{
    const SolveReport& rep = ground_state().report;
    const IdentityReport& r = rep.identity_report;
    EXPECT_LE(*r.equation_residual, 1e-6);
    EXPECT_LE(r.c_consistency, 2e-2);
    EXPECT_LE(*r.discrete_nehari_residual, 1e-8);
    EXPECT_LE(r.nehari_residual, 1e-2);
    EXPECT_LE(r.pohozaev_residual, 5e-2);
}

TEST(Nonlinearity, FastPathMatchesPower)
{
    const Field u = random_field(GridSpec{3, 16, 6.0}, 3);
    const Field n4 = nonlinearity(u, 4.0);
    const Field n35 = nonlinearity(u, 3.5);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u.values()[i];
        ASSERT_NEAR(n4.values()[i], std::pow(std::abs(v), 2.0) * v, 1e-14 * std::abs(v) * (1 + v * v));
        ASSERT_NEAR(n35.values()[i], std::pow(std::abs(v), 1.5) * v, 1e-14 * std::abs(v) * (1 + v * v));
    }
}

TEST(EquationResidual, GaussianIsNotASolution)
{
    const Field g = synth_gaussian(kGrid, 1.0, 1.0);
    EXPECT_GT(equation_residual(g, kBase), 0.1);
    EXPECT_THROW(equation_residual(Field(kGrid), kBase), DegenerateInputError);
    EXPECT_THROW(equation_residual(g, {4, 0.5, 3.0}), ParameterError);
}

TEST(RandomMixture, RespectsGeneratorRanges)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 500; ++i) {
        const auto bumps = random_mixture(kGrid, rng);
        ASSERT_GE(bumps.size(), 1u);
        ASSERT_LE(bumps.size(), 5u);
        for (const auto& b : bumps) {
            ASSERT_GE(b.width, 0.5 * 0.7 - 1e-12);
            ASSERT_LE(b.width, 2.0 * 1.4 + 1e-12);
            ASSERT_GE(b.amplitude, -2.0);
            ASSERT_LE(b.amplitude, 2.0);
            for (double c : b.center) {
                ASSERT_LE(std::abs(c), 0.5 * 1.4 * kGrid.half_width + 1e-12);
            }
        }
    }
}

TEST(GnSample, IncludingReferenceGivesExactlyOne)
{
    const Field& q = ground_state().field;
    const NormTriple t = norm_triple(q, kBase);
    const GnSampleResult r = gn_sample(t, kBase, kGrid, 1, 5, &q);
    EXPECT_EQ(r.ratios.front(), 1.0);
    EXPECT_EQ(r.min_ratio, 1.0);
}

TEST(GnSample, GroundStateBeatsRandomFields)
{
    const GnSampleResult r = gn_sample(ground_state().report.final_triple, kBase, kGrid, 2024, 100);
    EXPECT_EQ(r.ratios.size(), 100u);
    EXPECT_GE(r.min_ratio, 1.0 - 1e-3);
}

TEST(GnSample, MonotoneInCountAndDeterministic)
{
    const NormTriple ref{1.0, 1.0, 1.0};
    const GnSampleResult small = gn_sample(ref, kBase, GridSpec{3, 32, 12.0}, 77, 5);
    const GnSampleResult large = gn_sample(ref, kBase, GridSpec{3, 32, 12.0}, 77, 12);
    const GnSampleResult again = gn_sample(ref, kBase, GridSpec{3, 32, 12.0}, 77, 12);
    for (std::size_t i = 0; i < small.ratios.size(); ++i) {
        EXPECT_EQ(small.ratios[i], large.ratios[i]);
    }
    EXPECT_LE(large.min_ratio, small.min_ratio);
    EXPECT_EQ(large.ratios, again.ratios);
    EXPECT_THROW(gn_sample(ref, kBase, kGrid, 1, 0), ParameterError);
}

TEST(Holder, IndicatorIsEqualityCase)
{
    const GridSpec g{3, 32, 4.0};
    Field u(g);
    for (int i = 4; i < 12; ++i) {
        for (int j = 10; j < 20; ++j) {
            for (int k = 0; k < 7; ++k) {
                u.at(i, j, k) = -1.0;
            }
        }
    }
    const Params prm{3, 0.5, 4.0};
    for (double t : {3.0, 3.5, 4.0, 5.0, 6.0}) {
        const HolderResult r = holder_check(u, prm, t);
        EXPECT_LE(std::abs(r.slack), 1e-12 * r.rhs) << "t=" << t;
        EXPECT_LE(std::abs(r.theta_s + r.theta_1 - 1.0), 1e-15);
    }
}

TEST(Holder, EndpointExponents)
{
    const Params prm{3, 0.3, 4.0};
    const Field u = random_field(GridSpec{3, 32, 8.0}, 4);
    const HolderResult lo = holder_check(u, prm, prm.two_s_star());
    EXPECT_NEAR(lo.theta_s, 1.0, 1e-15);
    EXPECT_NEAR(lo.theta_1, 0.0, 1e-15);
    EXPECT_LE(std::abs(lo.slack), 1e-12 * lo.rhs);
    const HolderResult hi = holder_check(u, prm, prm.two_star());
    EXPECT_NEAR(hi.theta_s, 0.0, 1e-15);
    EXPECT_NEAR(hi.theta_1, 1.0, 1e-15);
    EXPECT_THROW(holder_check(u, prm, 2.0), ParameterError);
    EXPECT_THROW(holder_check(u, prm, 6.5), ParameterError);
}

TEST(Holder, RandomFieldsHaveNonNegativeSlack)
{
    const GridSpec g{3, 32, 8.0};
    std::mt19937_64 rng(12);
    for (int i = 0; i < 20; ++i) {
        const Params prm = random_params(rng, 3);
        const Field u = synth_mixture(g, random_mixture(g, rng));
        for (int k = 0; k <= 4; ++k) {
            const double t = prm.two_s_star() + (prm.two_star() - prm.two_s_star()) * k / 4.0;
            const HolderResult r = holder_check(u, prm, t);
            ASSERT_GE(r.slack, -1e-12 * r.rhs);
            // Exponent bookkeeping: t = theta_s 2*_s + theta_1 2*.
            ASSERT_NEAR(r.theta_s * prm.two_s_star() + r.theta_1 * prm.two_star(), t, 1e-12 * t);
        }
    }
}

TEST(GaussianOracle, MeasuredErrors)
{
    const auto rows = gaussian_oracle(kBase, GridSpec{3, 64, 10.0});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_LE(rows[0].rel_error, 1e-5);
    EXPECT_LE(rows[2].rel_error, 1e-5);
    EXPECT_LE(rows[3].rel_error, 1e-5);
    // Lattice error of the |xi| cone at the origin; see the field_core tests.
    EXPECT_GT(rows[1].rel_error, 1e-4);
    EXPECT_LE(rows[1].rel_error, 5e-4);

    for (const auto& row : gaussian_oracle(kBase, GridSpec{3, 128, 32.0})) {
        EXPECT_LE(row.rel_error, 1e-5) << row.name;
    }
    EXPECT_THROW(gaussian_oracle(kBase, GridSpec{3, 32, 10.0}), ParameterError);
    EXPECT_THROW(gaussian_oracle(kBase, GridSpec{3, 64, 6.0}), ParameterError);
}

TEST(GaussianOracle, ClosedFormForOtherOrders)
{
    const auto rows = gaussian_oracle({3, 0.9, 4.0}, GridSpec{3, 128, 20.0});
    EXPECT_NEAR(rows[1].expected, 2.0 * M_PI * std::tgamma(2.4), 1e-12);
    EXPECT_LE(rows[1].rel_error, 1e-4);
}

TEST(GaussianOracle, DoublingTheBoxAtFixedSpacing)
{
    const auto small = gaussian_oracle(kBase, GridSpec{3, 64, 10.0});
    const auto large = gaussian_oracle(kBase, GridSpec{3, 128, 20.0});
    for (std::size_t i = 0; i < small.size(); ++i) {
        EXPECT_LE(large[i].rel_error, 2.0 * small[i].rel_error + 1e-12) << small[i].name;
    }
}

TEST(GaussianOracle, RefinementAtFixedBox)
{
    const auto coarse = gaussian_oracle(kBase, GridSpec{3, 64, 16.0});
    const auto fine = gaussian_oracle(kBase, GridSpec{3, 128, 16.0});
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        // The b error is a lattice effect that does not depend on n; it only
        // moves in the last digits.
        EXPECT_TRUE(fine[i].rel_error <= coarse[i].rel_error * (1.0 + 1e-9) || fine[i].rel_error <= 1e-6)
            << coarse[i].name << ": " << coarse[i].rel_error << " -> " << fine[i].rel_error;
    }
}

TEST(Derivatives, GateauxMatchesSymmetricDifference)
{
    const GridSpec g{3, 32, 8.0};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Field u = plus(random_field(g, seed), synth_gaussian(g, 1.0, 1.5));
        const Field phi = random_field(g, 100 + seed);
        const double analytic = weinstein_gateaux(u, phi, kBase);
        const double eps = 1e-3 * l2_norm(u) / l2_norm(phi);
        const double fd = weinstein_symmetric_difference(u, phi, eps, kBase);
        const double scale = weinstein(norm_triple(u, kBase), kBase) * l2_norm(phi) / l2_norm(u);
        EXPECT_LE(std::abs(fd - analytic) / std::max(std::abs(analytic), scale), 1e-5);
    }
}

TEST(Derivatives, AmplitudeDirectionIsNeutral)
{
    const Field u = plus(random_field(GridSpec{3, 32, 8.0}, 8), synth_gaussian(GridSpec{3, 32, 8.0}, 1.0, 1.0));
    const double W = weinstein(norm_triple(u, kBase), kBase);
    EXPECT_LE(std::abs(weinstein_gateaux(u, u, kBase)), 1e-12 * W);
}

TEST(Derivatives, ReportOnRandomField)
{
    const GridSpec g{3, 32, 8.0};
    const Field u = plus(random_field(g, 21), synth_gaussian(g, 1.0, 1.2));
    const DerivativeReport r = derivative_checks(u, kBase, 5);
    EXPECT_LE(r.djdz_max_rel_error, 1e-6);
    EXPECT_LE(r.gateaux_rel_error, 1e-5);
    EXPECT_GT(r.fd_order_ratio, 3.0);
    EXPECT_LT(r.fd_order_ratio, 5.0);
    EXPECT_GT(r.criticality, 1e-3);

    const DerivativeReport again = derivative_checks(u, kBase, 5);
    EXPECT_EQ(r.gateaux_rel_error, again.gateaux_rel_error);
    EXPECT_EQ(r.criticality, again.criticality);
    EXPECT_THROW(derivative_checks(Field(g), kBase, 5), DegenerateInputError);
}

TEST(Derivatives, DjdzAtZeroIsPohozaev)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const Params prm = random_params(rng);
        const NormTriple t = random_triple(rng);
        EXPECT_EQ(aux_J(0.0, t, prm).dJdz, pohozaev_P(t, prm));
    }
}
