#include "pentatrope/invariants.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "pentatrope/sampling.hpp"

namespace pentatrope {
namespace {

using IState = TropicalState<std::int64_t>;

// Brute force over all (big, small) bitmask pairs, applying the consecutiveness rules literally.
std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> brute_force_admissible(std::size_t n,
                                                                                                std::size_t k) {
    auto mod = [n](std::ptrdiff_t v) { return static_cast<std::size_t>((v % static_cast<std::ptrdiff_t>(n) + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n)); };
    std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
    for (std::uint32_t bm = 0; bm < (1u << n); ++bm) {
        for (std::uint32_t sm = 0; sm < (1u << n); ++sm) {
            std::vector<std::size_t> big, small;
            for (std::size_t i = 0; i < n; ++i) {
                if (bm >> i & 1u) big.push_back(i);
                if (sm >> i & 1u) small.push_back(i);
            }
            if (big.size() + small.size() != k) continue;
            bool ok = true;
            for (std::size_t a : big) {
                for (std::size_t b : big) {
                    if (a == b) continue;
                    for (std::ptrdiff_t d = -2; d <= 2; ++d) {
                        if (mod(static_cast<std::ptrdiff_t>(a) + d) == b) ok = false;
                    }
                }
                for (std::size_t j : small) {
                    for (std::ptrdiff_t d = -1; d <= 2; ++d) {
                        if (mod(static_cast<std::ptrdiff_t>(a) + d) == j) ok = false;
                    }
                }
            }
            for (std::size_t a : small) {
                if (sm >> mod(static_cast<std::ptrdiff_t>(a) + 1) & 1u) ok = false;
            }
            if (ok) out.insert({big, small});
        }
    }
    return out;
}

double rel_drift(double now, double start) { return std::abs(now - start) / std::abs(start); }

TEST(EnumerateAdmissible, SingleFactors) {
    const auto mons = enumerate_admissible(5, 1, Family::O);
    ASSERT_EQ(mons.size(), 10u);
    int big = 0;
    for (const auto& m : mons) {
        EXPECT_EQ(m.weight(), 1u);
        big += static_cast<int>(m.big_indices.size());
    }
    EXPECT_EQ(big, 5);
}

TEST(EnumerateAdmissible, MatchesBruteForce) {
    for (std::size_t n = 5; n <= 8; ++n) {
        for (std::size_t k = 1; k <= n / 2; ++k) {
            const auto mons = enumerate_admissible(n, k, Family::E);
            const auto expected = brute_force_admissible(n, k);
            ASSERT_EQ(mons.size(), expected.size()) << "n=" << n << " k=" << k;
            std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> got;
            for (const auto& m : mons) {
                EXPECT_EQ(m.kind, Family::E);
                got.insert({m.big_indices, m.small_indices});
            }
            EXPECT_EQ(got, expected);
            EXPECT_TRUE(std::is_sorted(mons.begin(), mons.end(), [](const auto& a, const auto& b) {
                return std::tie(a.big_indices, a.small_indices) < std::tie(b.big_indices, b.small_indices);
            }));
        }
    }
}

TEST(EnumerateAdmissible, RangeChecks) {
    EXPECT_THROW(enumerate_admissible(5, 0, Family::O), domain_error);
    EXPECT_THROW(enumerate_admissible(5, 3, Family::O), domain_error);
    EXPECT_THROW(enumerate_admissible(5, 5, Family::O), domain_error);
    EXPECT_THROW(enumerate_admissible(4, 1, Family::O), domain_error);
}

TEST(EvalInvariants, AllOnesValues) {
    const SignedState ones(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0));
    const SignConvention unsigned_conv{false, false, EBlock::shifted};
    EXPECT_EQ(eval_O_k(ones, 5), 1.0);
    EXPECT_EQ(eval_E_k(ones, 5), 1.0);
    EXPECT_EQ(eval_O_k(ones, 1, unsigned_conv), 10.0);
    EXPECT_EQ(eval_O_k(ones, 1), 0.0);
    EXPECT_EQ(eval_E_k(ones, 1), 0.0);
}

TEST(EvalInvariants, ShiftedEBlockUsesNextZ) {
    // n = 5, k = 1: E_1 = sum_i W_i - sum_j w_j, W_i = w_i z_{i+1} w_{i+1}.
    const SignedState s({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1});
    EXPECT_DOUBLE_EQ(eval_E_k(s, 1), (2 + 3 + 4 + 5 + 1) - 5.0);
    EXPECT_DOUBLE_EQ(eval_E_k(s, 1, SignConvention{true, true, EBlock::literal}), (1 + 2 + 3 + 4 + 5) - 5.0);
}

TEST(Conservation, SignedConventionConservedAlongT) {
    std::mt19937_64 rng(1);
    for (std::size_t n = 5; n <= 8; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto orb = orbit_T(random_quasiperiodic_state(n, rng), 20);
            ASSERT_TRUE(orb.complete());
            for (std::size_t k : invariant_weights(n)) {
                const double o0 = eval_O_k(orb.states.front(), k);
                const double e0 = eval_E_k(orb.states.front(), k);
                for (std::size_t m = 1; m < orb.states.size(); ++m) {
                    EXPECT_LE(rel_drift(eval_O_k(orb.states[m], k), o0), 1e-9 * static_cast<double>(m));
                    EXPECT_LE(rel_drift(eval_E_k(orb.states[m], k), e0), 1e-9 * static_cast<double>(m));
                }
            }
        }
    }
}

TEST(Conservation, HoldsOnMixedSignStatesToo) {
    // Generic signed data, not of quasi-periodic type; drift measured against the monomial scale.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int used = 0;
    while (used < 40) {
        std::vector<double> z(7), w(7);
        for (auto& v : z) v = u(rng);
        for (auto& v : w) v = u(rng);
        const auto orb = orbit_T(SignedState(z, w), 5);
        if (!orb.complete()) continue;
        bool tame = true;
        for (const auto& st : orb.states) {
            for (std::size_t i = 0; i < 7; ++i) {
                tame = tame && std::abs(st.z[i]) < 1e3 && std::abs(st.w[i]) < 1e3 && std::abs(1 - st.z[i] * st.w[i]) > 0.05;
            }
        }
        if (!tame) continue;
        ++used;
        for (std::size_t k : invariant_weights(7)) {
            const double o0 = eval_O_k(orb.states.front(), k);
            const double e0 = eval_E_k(orb.states.front(), k);
            for (const auto& st : orb.states) {
                EXPECT_NEAR(eval_O_k(st, k), o0, 1e-9 * std::max(1.0, std::abs(o0)));
                EXPECT_NEAR(eval_E_k(st, k), e0, 1e-9 * std::max(1.0, std::abs(e0)));
            }
        }
    }
}

TEST(ResolveSignConvention, SelectsSignedShiftedForEveryN) {
    for (std::size_t n = 5; n <= 8; ++n) {
        const auto res = resolve_sign_convention(n);
        EXPECT_EQ(res.convention, (SignConvention{true, true, EBlock::shifted})) << "n=" << n;
        for (const auto& c : res.candidates) {
            const bool selected = c.is_signed && c.block == EBlock::shifted;
            EXPECT_EQ(c.conserved, selected);
            if (!selected) {
                EXPECT_GT(c.max_relative_drift, 1e-3) << "n=" << n;
            }
        }
    }
}

TEST(ResolveSignConvention, DeterministicGivenSeed) {
    const auto a = resolve_sign_convention(6, 99);
    const auto b = resolve_sign_convention(6, 99);
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
        EXPECT_EQ(a.candidates[i].max_relative_drift, b.candidates[i].max_relative_drift);
    }
}

TEST(ResolveSignConvention, ImpossibleToleranceIsAConfigurationError) {
    EXPECT_THROW(resolve_sign_convention(5, default_oracle_seed, 5, 5, -1.0), configuration_error);
}

TEST(Tropical, ZeroState) {
    const IState zero(std::vector<std::int64_t>(7, 0), std::vector<std::int64_t>(7, 0));
    for (std::size_t k : invariant_weights(7)) {
        EXPECT_EQ(tropical_O_k(zero, k), 0);
        EXPECT_EQ(tropical_E_k(zero, k), 0);
        if (k != 7) {
            const auto pair = tropical_E_pm(zero, k);
            EXPECT_EQ(pair.plus.value_or(0), 0);
            EXPECT_EQ(pair.minus.value_or(0), 0);
        }
    }
}

TEST(Tropical, HandExample) {
    const IState s({1, 0, 0, 0, 0}, {0, 0, 0, 0, 0});
    EXPECT_EQ(tropical_O_k(s, 1), 1);
    EXPECT_EQ(tropical_O_k(s, 5), 1);
    EXPECT_EQ(tropical_E_k(s, 5), 0);
}

TEST(Tropical, EmptyParityIsReported) {
    // n = 6, k = 3: only z_0 z_2 z_4 and z_1 z_3 z_5 are admissible (odd sign).
    const IState s({1, 2, 3, 4, 5, 6}, {0, 0, 0, 0, 0, 0});
    const auto pair = tropical_E_pm(s, 3);
    EXPECT_FALSE(pair.plus.has_value());
    ASSERT_TRUE(pair.minus.has_value());
    EXPECT_TRUE(pair.separated());
}

TEST(Tropical, ExactConservationAlongPhi) {
    std::mt19937_64 rng(3);
    for (std::size_t n = 5; n <= 7; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            auto s = random_integer_state(n, rng, 1000);
            std::vector<std::int64_t> o0, e0;
            for (std::size_t k : invariant_weights(n)) {
                o0.push_back(tropical_O_k(s, k));
                e0.push_back(tropical_E_k(s, k));
            }
            for (int l = 0; l < 30; ++l) {
                s = step_phi(s);
                std::size_t idx = 0;
                for (std::size_t k : invariant_weights(n)) {
                    ASSERT_EQ(tropical_O_k(s, k), o0[idx]) << "n=" << n << " k=" << k;
                    ASSERT_EQ(tropical_E_k(s, k), e0[idx]) << "n=" << n << " k=" << k;
                    ++idx;
                }
            }
        }
    }
}

TEST(Tropical, LiteralEBlockIsNotConserved) {
    std::mt19937_64 rng(4);
    int broken = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_integer_state(7, rng, 1000);
        const auto e0 = tropical_E_k(s, 1, EBlock::literal);
        for (int l = 0; l < 30; ++l) {
            s = step_phi(s);
            if (tropical_E_k(s, 1, EBlock::literal) != e0) {
                ++broken;
                break;
            }
        }
    }
    EXPECT_GT(broken, 0);
}

TEST(Rank, PredictedValues) {
    EXPECT_EQ(predicted_invariant_rank(5), 6u);
    EXPECT_EQ(predicted_polytope_dimension(5), 4u);
    EXPECT_EQ(predicted_polytope_dimension(6), 4u);
    EXPECT_EQ(predicted_polytope_dimension(7), 6u);
    for (std::size_t n = 5; n < 20; ++n) {
        EXPECT_EQ(2 * n - predicted_invariant_rank(n), predicted_polytope_dimension(n));
    }
}

TEST(Rank, ExactRankHelper) {
    EXPECT_EQ(exact_rank({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), 2u);
    EXPECT_EQ(exact_rank({{2, 4}, {1, 2}}), 1u);
    EXPECT_EQ(exact_rank({{0, 0}, {0, 0}}), 0u);
    EXPECT_EQ(exact_rank({{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}), 3u);
}

TEST(Rank, ZeroStateIsNotGeneric) {
    const IState zero(std::vector<std::int64_t>(5, 0), std::vector<std::int64_t>(5, 0));
    EXPECT_THROW(invariant_rank_at(zero), genericity_error);
}

TEST(Rank, GenericRankMatchesPrediction) {
    std::mt19937_64 rng(5);
    for (std::size_t n = 5; n <= 7; ++n) {
        int generic = 0, matched = 0;
        for (int trial = 0; trial < 100; ++trial) {
            auto s = random_integer_state(n, rng, 1000);
            for (int l = 0; l < 7; ++l) {
                s = step_phi(s);
            }
            try {
                const auto r = invariant_rank_at(s);
                ++generic;
                matched += r == predicted_invariant_rank(n) ? 1 : 0;
            } catch (const genericity_error&) {
            }
        }
        EXPECT_GE(generic, 80);
        EXPECT_GE(matched, generic * 95 / 100) << "n=" << n;
    }
}

}  // namespace
}  // namespace pentatrope
