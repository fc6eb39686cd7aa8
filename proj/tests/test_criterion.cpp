#include "steerscan/criterion.hpp"
#include "steerscan/families.hpp"

#include "support/oracles.hpp"
#include "support/random_states.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace steerscan;
namespace st = steerscan::testing;
using steerscan::testing::Rng;

namespace {

BlochForm zero_form(int da, int db)
{
    return {da, db, RVector::Zero(da * da - 1), RVector::Zero(db * db - 1),
            RMatrix::Zero(da * da - 1, db * db - 1)};
}

BlochForm singlet_form()
{
    return bloch_decompose(DensityMatrix(st::singlet_projector(), 2, 2));
}

const std::pair<int, int> kDimPairs[] = {{2, 2}, {2, 3}, {3, 3}};

} // namespace

TEST(BuildT1, ZeroFormHasSingleEntry)
{
    const RMatrix m = augmented_correlation(zero_form(2, 2), 2.0, 3.0);
    ASSERT_EQ(m.rows(), 4);
    ASSERT_EQ(m.cols(), 4);
    EXPECT_EQ(m(0, 0), 6.0);
    EXPECT_EQ(m.cwiseAbs().sum(), 6.0);
}

TEST(BuildT1, Example1WithZeroParameters)
{
    const double p = 0.4;
    const RMatrix m = augmented_correlation(bloch_decompose(example1_state(p)), 0.0, 0.0);
    RMatrix expected = RMatrix::Zero(4, 4);
    expected.block(1, 1, 3, 3) = -(p / 2.0) * RMatrix::Identity(3, 3);
    EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildT1, Singlet)
{
    const RMatrix m = augmented_correlation(singlet_form(), 1.0, 1.0);
    RMatrix expected = RMatrix::Zero(4, 4);
    expected(0, 0) = 1.0;
    expected.block(1, 1, 3, 3) = -0.5 * RMatrix::Identity(3, 3);
    EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildT1, RejectsNegativeParameters)
{
    EXPECT_THROW(augmented_correlation(zero_form(2, 2), -1.0, 1.0), InvalidParameter);
    EXPECT_THROW(augmented_correlation(zero_form(2, 2), 1.0, std::nan("")), InvalidParameter);
}

TEST(BuildT2, UnitWeightsReduceToT1)
{
    const BlochForm b = bloch_decompose(example2_state(0.7));
    EXPECT_EQ(weighted_correlation(b, 3.0, 5.0, 1.0, 1.0), augmented_correlation(b, 3.0, 5.0));
}

TEST(BuildT2, ZeroWeights)
{
    const RMatrix m = weighted_correlation(singlet_form(), 1.0, 1.0, 0.0, 0.0);
    EXPECT_EQ(m(0, 0), 1.0);
    EXPECT_EQ(m.cwiseAbs().sum(), 1.0);
}

TEST(BuildT2, Example1EntrywiseAtPointSix)
{
    const BlochForm b = bloch_decompose(example1_state(0.6));
    const double x = 64.8, y = 38.7, g = 0.02, h = 0.02;
    const RMatrix m = weighted_correlation(b, x, y, g, h);
    ASSERT_EQ(m.rows(), 4);
    EXPECT_NEAR(m(0, 0), x * y, 1e-12);
    for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(m(0, 1 + j), x * h * b.s(j), 1e-15);
        EXPECT_NEAR(m(1 + j, 0), y * g * b.r(j), 1e-15);
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(m(1 + j, 1 + k), g * h * b.t(j, k), 1e-15);
        }
    }
    EXPECT_NEAR(m(1, 0), 38.7 * 0.02 * 0.4 / std::sqrt(2.0), 1e-14);
}

TEST(BuildVec, SingletonVectorsEqualT1)
{
    const BlochForm b = bloch_decompose(example2_state(0.3));
    const RMatrix v = vector_correlation(b, RVector::Constant(1, 2.5), RVector::Constant(1, 4.0));
    EXPECT_LT((v - augmented_correlation(b, 2.5, 4.0)).cwiseAbs().maxCoeff(), 1e-15);
    const RMatrix w = vector_correlation(b, RVector::Constant(1, 2.5), RVector::Constant(1, 4.0),
                                         RVector::Ones(1), RVector::Ones(1));
    EXPECT_LT((w - v).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildVec, PythagoreanPairMatchesScalarNorm)
{
    const BlochForm b = bloch_decompose(example1_state(0.7));
    RVector alpha(2);
    alpha << 3.0, 4.0;
    const RMatrix v = vector_correlation(b, alpha, RVector::Constant(1, 2.0));
    EXPECT_EQ(v.rows(), 5);
    EXPECT_NEAR(trace_norm(v), trace_norm(augmented_correlation(b, 5.0, 2.0)), 1e-12);
}

TEST(BuildVec, RejectsEmptyOrNegative)
{
    const BlochForm b = singlet_form();
    EXPECT_THROW(vector_correlation(b, RVector(0), RVector::Ones(1)), InvalidParameter);
    EXPECT_THROW(vector_correlation(b, RVector::Constant(1, -1.0), RVector::Ones(1)),
                 InvalidParameter);
}

TEST(TraceNorm, Examples)
{
    RMatrix d = RMatrix::Zero(3, 3);
    d.diagonal() << 1.0, -2.0, 3.0;
    EXPECT_NEAR(trace_norm(d), 6.0, 1e-14);
    RMatrix nil(2, 2);
    nil << 0, 1, 0, 0;
    EXPECT_NEAR(trace_norm(nil), 1.0, 1e-15);
    const RMatrix s = augmented_correlation(singlet_form(), 1.0, 1.0);
    EXPECT_NEAR(trace_norm(s), 2.5, 1e-14);
    EXPECT_NEAR(st::trace_norm_via_gram(s), 2.5, 1e-14);
}

TEST(TraceNorm, RejectsNonFinite)
{
    RMatrix m = RMatrix::Zero(2, 2);
    m(1, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(trace_norm(m), InvalidParameter);
}

TEST(TraceNorm, MatchesGramOracle)
{
    Rng rng(21);
    std::uniform_int_distribution<int> size(1, 9);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        RMatrix m(size(rng), size(rng));
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = normal(rng);
        }
        EXPECT_NEAR(trace_norm(m), st::trace_norm_via_gram(m), 1e-10);
    }
}

TEST(Bound, Examples)
{
    EXPECT_NEAR(unsteerable_bound(2, 2, ScalarParams{0.0, 0.0}), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(unsteerable_bound(2, 2, WeightedParams{4.0, 7.0, 1.0, 1.0}),
                     unsteerable_bound(2, 2, ScalarParams{4.0, 7.0}));
    EXPECT_NEAR(unsteerable_bound(2, 2, ScalarParams{64.8, 38.7}),
                std::sqrt(64.8 * 64.8 + 1.5) * std::sqrt(38.7 * 38.7 + 0.5), 1e-9);
}

TEST(Bound, AsymmetricDimensionFactors)
{
    // d_A - 1/d_A on Alice's side, 1 - 1/d_B on Bob's side
    EXPECT_NEAR(unsteerable_bound(3, 2, ScalarParams{1.0, 2.0}),
                std::sqrt(1.0 + 3.0 - 1.0 / 3.0) * std::sqrt(4.0 + 0.5), 1e-14);
    EXPECT_NEAR(unsteerable_bound(2, 3, WeightedParams{1.0, 2.0, 0.5, 3.0}),
                std::sqrt(1.0 + 0.25 * 1.5) * std::sqrt(4.0 + 9.0 * (2.0 / 3.0)), 1e-14);
}

TEST(Evaluate, SingletWithZeroParameters)
{
    const DensityMatrix rho(st::singlet_projector(), 2, 2);
    const CriterionReport rep = evaluate(rho, ScalarParams{0.0, 0.0}, Direction::AliceToBob);
    EXPECT_NEAR(rep.lhs, 1.5, 1e-14);
    EXPECT_NEAR(rep.rhs, std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(rep.violation, 1.5 - std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(rep.violation, 0.6340, 1e-4);
    EXPECT_TRUE(rep.steerable);
}

TEST(Evaluate, MaximallyMixedNeverViolates)
{
    const DensityMatrix rho(CMatrix::Identity(4, 4) / 4.0, 2, 2);
    for (auto dir : {Direction::AliceToBob, Direction::BobToAlice}) {
        for (double x : {0.0, 1.0, 50.0}) {
            for (double y : {0.0, 2.0, 80.0}) {
                const CriterionReport rep = evaluate(rho, ScalarParams{x, y}, dir);
                EXPECT_NEAR(rep.lhs, x * y, 1e-9 * (1.0 + x * y));
                EXPECT_LT(rep.violation, 0.0);
                EXPECT_FALSE(rep.steerable);
            }
        }
    }
}

TEST(Evaluate, Example1AroundKnownThreshold)
{
    const ScalarParams params{64.8, 38.7};
    EXPECT_GT(evaluate(example1_state(0.56), params, Direction::AliceToBob).violation, 0.0);
    EXPECT_LT(evaluate(example1_state(0.55), params, Direction::AliceToBob).violation, 0.0);
    EXPECT_TRUE(evaluate(example1_state(0.56), params, Direction::AliceToBob).steerable);
}

TEST(Evaluate, ReportFieldsAreConsistent)
{
    const CriterionReport rep =
        evaluate(example2_state(0.7), WeightedParams{98, 55, 0.1, 0.1}, Direction::BobToAlice);
    EXPECT_EQ(rep.direction, Direction::BobToAlice);
    EXPECT_GE(rep.lhs, 0.0);
    EXPECT_GE(rep.rhs, 0.0);
    EXPECT_EQ(rep.steerable, rep.violation > kDefaultMargin);
    EXPECT_EQ(std::string(variant_label(rep.params)), "T2");
}

TEST(Evaluate, MarginControlsCertification)
{
    const DensityMatrix rho(st::singlet_projector(), 2, 2);
    EXPECT_FALSE(evaluate(rho, ScalarParams{}, Direction::AliceToBob, 1.0).steerable);
    EXPECT_TRUE(evaluate(rho, ScalarParams{}, Direction::AliceToBob, 0.5).steerable);
}

TEST(Evaluate, RejectsNegativeParameters)
{
    EXPECT_THROW(evaluate(example1_state(0.5), ScalarParams{-1.0, 0.0}, Direction::AliceToBob),
                 InvalidParameter);
}

TEST(CriterionProperties, ReductionChain)
{
    Rng rng(31);
    for (auto [da, db] : kDimPairs) {
        for (int k = 0; k < 20; ++k) {
            const DensityMatrix rho = st::random_state(da, db, rng);
            const RVector v = st::random_nonneg_vector(2, rng);
            for (auto dir : {Direction::AliceToBob, Direction::BobToAlice}) {
                const auto t1 = evaluate(rho, ScalarParams{v(0), v(1)}, dir);
                const auto t2 = evaluate(rho, WeightedParams{v(0), v(1), 1.0, 1.0}, dir);
                EXPECT_EQ(t1.lhs, t2.lhs);
                EXPECT_EQ(t1.rhs, t2.rhs);
                EXPECT_EQ(t1.violation, t2.violation);
            }
            const BlochForm b = bloch_decompose(rho);
            const auto plain = evaluate(rho, ScalarParams{0.0, 0.0}, Direction::AliceToBob);
            EXPECT_NEAR(plain.lhs, st::trace_norm_via_gram(b.t), 1e-10);
            EXPECT_NEAR(plain.rhs, std::sqrt((da - 1.0 / da) * (1.0 - 1.0 / db)), 1e-14);
        }
    }
}

TEST(CriterionProperties, NormInvariance)
{
    Rng rng(32);
    std::uniform_int_distribution<Eigen::Index> len(1, 4);
    for (auto [da, db] : kDimPairs) {
        for (int k = 0; k < 50; ++k) {
            const BlochForm b = bloch_decompose(st::random_state(da, db, rng));
            const RVector alpha = st::random_nonneg_vector(len(rng), rng);
            const RVector beta = st::random_nonneg_vector(len(rng), rng);
            const RVector eta = st::random_nonneg_vector(len(rng), rng);
            const RVector gamma = st::random_nonneg_vector(len(rng), rng);
            const double scale = 1.0 + alpha.norm() * beta.norm();
            EXPECT_NEAR(trace_norm(vector_correlation(b, alpha, beta)),
                        trace_norm(augmented_correlation(b, alpha.norm(), beta.norm())),
                        1e-9 * scale);
            EXPECT_NEAR(trace_norm(vector_correlation(b, alpha, beta, eta, gamma)),
                        trace_norm(weighted_correlation(b, alpha.norm(), beta.norm(), eta.norm(),
                                                        gamma.norm())),
                        1e-9 * (scale + eta.norm() * gamma.norm()));
            EXPECT_NEAR(unsteerable_bound(da, db, VectorParams{alpha, beta, eta, gamma}),
                        unsteerable_bound(da, db, WeightedParams{alpha.norm(), beta.norm(),
                                                                 eta.norm(), gamma.norm()}),
                        1e-14 * unsteerable_bound(da, db, VectorParams{alpha, beta, eta, gamma}));
        }
    }
}

TEST(CriterionProperties, SeparableStatesNeverViolate)
{
    Rng rng(33);
    for (auto [da, db] : kDimPairs) {
        for (int k = 0; k < 100; ++k) {
            const DensityMatrix rho = st::random_separable_state(da, db, rng);
            const DirectedEvaluator ab(rho, Direction::AliceToBob);
            const DirectedEvaluator ba(rho, Direction::BobToAlice);
            for (int j = 0; j < 10; ++j) {
                const RVector v = st::random_nonneg_vector(4, rng);
                const WeightedParams params{v(0), v(1), v(2), v(3)};
                ASSERT_LE(ab.violation(params), 1e-9);
                ASSERT_LE(ba.violation(params), 1e-9);
                ASSERT_LE(ab.violation(ScalarParams{v(0), v(1)}), 1e-9);
            }
        }
    }
}

TEST(CriterionProperties, SwapSymmetricStatesGiveEqualDirections)
{
    for (const DensityMatrix& rho :
         {DensityMatrix(st::singlet_projector(), 2, 2), werner_state(3, 0.8),
          isotropic_state(3, 0.6), werner_state(2, 0.9)}) {
        for (double x : {0.0, 1.3, 40.0}) {
            const auto ab = evaluate(rho, ScalarParams{x, x}, Direction::AliceToBob);
            const auto ba = evaluate(rho, ScalarParams{x, x}, Direction::BobToAlice);
            EXPECT_NEAR(ab.violation, ba.violation, 1e-12);
            EXPECT_NEAR(ab.lhs, ba.lhs, 1e-9);
        }
    }
}

TEST(CriterionProperties, BobToAliceIsAliceToBobOnSwappedState)
{
    Rng rng(34);
    for (auto [da, db] : kDimPairs) {
        for (int k = 0; k < 20; ++k) {
            const DensityMatrix rho = st::random_state(da, db, rng);
            const RVector v = st::random_nonneg_vector(4, rng);
            const WeightedParams params{v(0), v(1), v(2), v(3)};
            const auto ba = evaluate(rho, params, Direction::BobToAlice);
            const auto ab = evaluate(swap_parties(rho), exchange_party_params(params),
                                     Direction::AliceToBob);
            EXPECT_EQ(ba.violation, ab.violation);
        }
    }
}

TEST(DirectedEvaluator, OrientedFormPutsSteeringPartyFirst)
{
    const DensityMatrix rho = example1_state(0.3);
    const DirectedEvaluator ba(rho, Direction::BobToAlice);
    EXPECT_LT(ba.oriented().r.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(ba.oriented().s(0), 0.7 / std::sqrt(2.0), 1e-14);
    EXPECT_STREQ(to_string(ba.direction()), "B->A");
}
