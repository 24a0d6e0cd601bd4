#include "pentatrope/automaton.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "pentatrope/sampling.hpp"

namespace pentatrope {
namespace {

using IState = TropicalState<std::int64_t>;

// Straight-line transcription of the automaton with explicit modular indices, used as an oracle.
IState phi_oracle(const IState& s) {
    const auto n = static_cast<std::int64_t>(s.size());
    auto at = [&](const std::vector<std::int64_t>& v, std::int64_t i) { return v[static_cast<std::size_t>(((i % n) + n) % n)]; };
    auto m = [&](std::int64_t i) { return std::max<std::int64_t>(0, at(s.x, i) + at(s.y, i)); };
    std::vector<std::int64_t> x(s.size()), y(s.size());
    for (std::int64_t i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = at(s.x, i) + m(i - 1) - m(i + 1);
        y[static_cast<std::size_t>(i)] = at(s.y, i + 1) + m(i + 2) - m(i);
    }
    return IState(x, y);
}

TEST(StepPhi, HandExamples) {
    // Frozen from an independent scalar evaluation.
    EXPECT_EQ(step_phi(IState({1, 0, 0, 0, 0}, {0, 0, 0, 0, 0})), IState({1, 1, 0, 0, -1}, {-1, 0, 0, 1, 0}));
    EXPECT_EQ(step_phi(IState({3, -1, 4, -1, -5}, {-2, 6, -5, 3, 5})), IState({-2, 0, 7, -1, -4}, {5, -8, 3, 4, 3}));
}

TEST(StepPhi, MatchesOracleOnRandomIntegerStates) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto s = random_integer_state(5 + static_cast<std::size_t>(trial % 5), rng, 20);
        EXPECT_EQ(step_phi(s), phi_oracle(s));
    }
}

TEST(StepPhi, AgreesWithPresentations) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {5u, 6u, 9u}) {
        const auto comps = automaton_presentations(n);
        ASSERT_EQ(comps.size(), 2 * n);
        for (const auto& p : comps) {
            EXPECT_EQ(p.component_count(), 4u);
            EXPECT_EQ(p.lipschitz_constant(), 5.0);
        }
        for (int trial = 0; trial < 200; ++trial) {
            const auto s = random_integer_state(n, rng, 50);
            const auto out = step_phi(s);
            const auto flat = s.flat();
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_EQ(eval_maxplus<std::int64_t>(comps[i], flat), out.x[i]);
                EXPECT_EQ(eval_maxplus<std::int64_t>(comps[n + i], flat), out.y[i]);
            }
        }
    }
}

TEST(StepPhi, ShiftOnB_n) {
    const IState s({-1, -1, -1, -1, -1}, {0, 0, 0, 0, 0});
    EXPECT_TRUE(in_B_n(s));
    EXPECT_EQ(iterate<std::int64_t>([](const IState& v) { return step_phi(v); }, s, 5), s);

    const IState t({-4, -3, -7, -5, -6}, {1, 2, 3, 0, -1});
    EXPECT_EQ(step_phi(t), IState(t.x, {2, 3, 0, -1, 1}));
}

TEST(StepPhi, ConservesBlockSums) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        auto s = random_integer_state(7, rng, 100);
        const auto sx = std::accumulate(s.x.begin(), s.x.end(), std::int64_t{0});
        const auto sy = std::accumulate(s.y.begin(), s.y.end(), std::int64_t{0});
        for (int l = 0; l < 20; ++l) {
            s = step_phi(s);
            ASSERT_EQ(std::accumulate(s.x.begin(), s.x.end(), std::int64_t{0}), sx);
            ASSERT_EQ(std::accumulate(s.y.begin(), s.y.end(), std::int64_t{0}), sy);
        }
    }
}

TEST(StepPhiT, WithinLogT4OfPhi) {
    std::mt19937_64 rng(4);
    for (double tv : {2.0, 10.0, 100.0}) {
        const SemiringParam t(tv);
        const double bound = std::log(4.0) / t.log_base();
        for (int trial = 0; trial < 500; ++trial) {
            const auto s = random_real_state(5, rng, 10.0);
            EXPECT_LE(sup_distance(step_phi_t(t, s), step_phi(s)), bound + 1e-12);
        }
    }
}

TEST(StepPhiT, ConvergesToPhi) {
    const TropicalState<double> s({0.5, -1.25, 2.0, 0.0, 3.5}, {-0.75, 1.0, -2.5, 0.25, -3.0});
    double previous = INFINITY;
    for (int k = 1; k <= 6; ++k) {
        const SemiringParam t(std::pow(10.0, k));
        const double envelope = std::log(4.0) / t.log_base();
        const double gap = sup_distance(step_phi_t(t, s), step_phi(s));
        EXPECT_LE(gap, envelope + 1e-12);
        EXPECT_LT(envelope, previous);
        previous = envelope;
    }
}

TEST(InBn, Boundary) {
    EXPECT_TRUE(in_B_n(IState({-1, -1, -1, -1, -1}, {0, 0, 0, 0, 0})));
    EXPECT_TRUE(in_B_n(IState({0, 0, 0, 0, 0}, {0, 0, 0, 0, 0})));
    EXPECT_TRUE(in_B_n(IState({1, -5, -5, -5, -5}, {-1, -3, -2, -9, -4})));
    EXPECT_FALSE(in_B_n(IState({1, -5, -5, -5, -5}, {0, -3, -2, -9, -4})));
}

TEST(DetectPeriod, OnB_n) {
    EXPECT_EQ(detect_period(IState({-1, -1, -1, -1, -1}, {0, 0, 0, 0, 0})), 1u);
    EXPECT_EQ(detect_period(IState({-9, -9, -9, -9, -9, -9}, {1, 2, 1, 2, 1, 2})), 2u);
    EXPECT_EQ(detect_period(IState({-9, -9, -9, -9, -9, -9}, {1, 2, 3, 1, 2, 3})), 3u);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial % 3);
        const auto s = random_rational_B_n_point(n, rng);
        const auto k = detect_period(s);
        ASSERT_TRUE(k.has_value());
        EXPECT_EQ(n % *k, 0u);
        const auto d = random_B_n_point(n, rng, 4.0);
        EXPECT_EQ(detect_period(d), n);
    }
}

TEST(DetectPeriod, GenericStatesUsuallyAperiodic) {
    std::mt19937_64 rng(6);
    int aperiodic = 0;
    for (int trial = 0; trial < 100; ++trial) {
        if (!detect_period(random_integer_state(5, rng, 1000), 10).has_value()) {
            ++aperiodic;
        }
    }
    EXPECT_GE(aperiodic, 80);
}

TEST(Lift, PositiveAndRoundTrip) {
    const SemiringParam two(2);
    const TropicalState<double> zero(std::vector<double>(5, 0.0), std::vector<double>(5, 0.0));
    const auto ones = lift_positive(two, zero);
    EXPECT_EQ(ones.z(), std::vector<double>(5, 1.0));
    const TropicalState<double> s({1, 0, -2.5, 3, 0.5}, {-1, 2, 0, 0.25, -3});
    const auto z = lift_positive(two, s);
    EXPECT_DOUBLE_EQ(z.z()[0], 2.0);
    const auto back = log_t_state(two, z);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(back.x[i], s.x[i], 1e-12 * std::max(1.0, std::abs(s.x[i])));
        EXPECT_NEAR(back.y[i], s.y[i], 1e-12 * std::max(1.0, std::abs(s.y[i])));
    }
}

TEST(Lift, OverflowGuard) {
    const TropicalState<double> big({2000, 0, 0, 0, 0}, {0, 0, 0, 0, 0});
    EXPECT_THROW(lift_positive(SemiringParam(2), big), range_error);
    EXPECT_NO_THROW(lift_log(SemiringParam(2), big));
}

TEST(Lift, B_nMapsToUnitProducts) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_B_n_point(6, rng, 3.0);
        for (double tv : {2.0, 10.0}) {
            const auto p = lift_positive(SemiringParam(tv), s);
            for (double zi : p.z()) {
                for (double wj : p.w()) {
                    EXPECT_GT(zi * wj, 0.0);
                    EXPECT_LE(zi * wj, 1.0 + 1e-12);
                }
            }
            const auto q = lift_quasiperiodic(SemiringParam(tv), s, Block::w);
            for (double zi : q.z) {
                for (double wj : q.w) {
                    EXPECT_GE(zi * wj, -1.0 - 1e-12);
                    EXPECT_LT(zi * wj, 0.0);
                }
            }
            EXPECT_EQ(sign_conjugate(q, Block::w), p.as_signed());
        }
    }
}

TEST(ShiftOnBn, ExactShiftAndPeriodOnRationalPoints) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial % 3);
        const auto s = random_rational_B_n_point(n, rng);
        ASSERT_TRUE(in_B_n(s));
        auto cur = s;
        for (std::size_t l = 1; l <= n; ++l) {
            cur = step_phi(cur);
            ASSERT_EQ(cur.x, s.x);
            for (std::size_t i = 0; i < n; ++i) {
                ASSERT_EQ(cur.y[i], s.y[(i + l) % n]);
            }
        }
        EXPECT_EQ(cur, s);
    }
}

TEST(IteratedDeviation, IteratedDeviationBound) {
    std::mt19937_64 rng(9);
    for (double tv : {2.0, 10.0, 100.0}) {
        const SemiringParam t(tv);
        for (int trial = 0; trial < 100; ++trial) {
            auto a = random_real_state(5, rng, 10.0);
            auto b = a;
            for (unsigned l = 1; l <= 12; ++l) {
                a = step_phi(a);
                b = step_phi_t(t, b);
                EXPECT_LE(sup_distance(a, b), p_number(l, 5.0) * std::log(4.0) / t.log_base() + 1e-9);
            }
        }
    }
}

}  // namespace
}  // namespace pentatrope
