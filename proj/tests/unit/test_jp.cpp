#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bellgames/errors.hpp"
#include "bellgames/jp/jp_game.hpp"
#include "bellgames/jp/serialize.hpp"

using namespace bellgames;
using namespace bellgames::jp;

namespace {

JpInstance seeded(int n, int k, std::uint64_t seed, DeltaPolicy policy = DeltaPolicy::adaptive, double c = kDefaultC) {
  return build_jp(n, k, c, policy, RngStream(seed));
}

double naive_dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double payoff_average(const JpInstance& inst, const DeterministicStrategy& s) {
  double total = 0.0;
  for (int x = 0; x < inst.n; ++x)
    for (int y = 0; y < inst.n; ++y) total += jp_payoff(inst, x, y, s.alice[x], s.bob[y]);
  return total / (inst.n * inst.n);
}

}  // namespace

TEST(JpBuild, FixedCDeltaFormula) {
  const auto inst = seeded(4, 4, 1, DeltaPolicy::fixed_c);
  EXPECT_DOUBLE_EQ(inst.delta, 0.125 / std::sqrt(4.0 * std::log(4.0)));
  EXPECT_DOUBLE_EQ(inst.delta, inst.delta_formula);
}

TEST(JpBuild, AdaptiveNeverExceedsFormulaAndIsWellDefined) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto inst = seeded(3, 4, s);
    EXPECT_GT(inst.delta, 0.0);
    EXPECT_LE(inst.delta, inst.delta_formula);
    EXPECT_TRUE(jp_well_defined(inst).ok);
  }
}

TEST(JpBuild, DimensionConstraint) {
  EXPECT_THROW(seeded(2, 9, 1), DomainError);
  EXPECT_THROW(seeded(9, 3, 1), DomainError);
  EXPECT_THROW(seeded(0, 1, 1), DomainError);
  EXPECT_THROW(build_jp(2, 2, -1.0, DeltaPolicy::adaptive, RngStream(1)), DomainError);
  EXPECT_THROW(seeded(1, 1, 1, DeltaPolicy::fixed_c), DomainError);
  EXPECT_NO_THROW(seeded(1, 1, 1));
}

TEST(JpBuild, SeedDeterminism) {
  const auto a = seeded(4, 3, 77), b = seeded(4, 3, 77);
  EXPECT_EQ(a.delta, b.delta);
  for (int x = 0; x < 4; ++x)
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(a.u[x][i], b.u[x][i]);
      EXPECT_EQ(a.v[x][i], b.v[x][i]);
    }
  EXPECT_NE(seeded(4, 3, 78).u[0][0], a.u[0][0]);
}

TEST(JpBuild, SerializeRoundTrip) {
  const auto a = seeded(3, 2, 5);
  const auto b = instance_from_json(to_json(a));
  EXPECT_EQ(b.delta, a.delta);
  EXPECT_EQ(b.u[2][1], a.u[2][1]);
  EXPECT_EQ(b.v[0][0], a.v[0][0]);
  EXPECT_EQ(b.policy, a.policy);
}

TEST(JpPayoff, PassIsHalf) {
  const auto inst = seeded(3, 2, 2);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      for (int b = 0; b <= 2; ++b) {
        EXPECT_EQ(jp_payoff(inst, x, y, inst.pass(), b), 0.5);
        EXPECT_EQ(jp_payoff(inst, x, y, b, inst.pass()), 0.5);
      }
}

TEST(JpPayoff, OrthogonalVectorsGiveHalf) {
  auto inst = seeded(2, 2, 3);
  inst.u[0][0] = Vector::Unit(2, 0);
  inst.v[1][1] = Vector::Unit(2, 1);
  EXPECT_EQ(jp_payoff(inst, 0, 1, 0, 1), 0.5);
}

TEST(JpPayoff, MatchesIndependentDot) {
  const auto inst = seeded(4, 5, 4);
  EXPECT_NEAR(jp_payoff(inst, 1, 3, 2, 4), 0.5 + inst.delta * naive_dot(inst.u[1][2], inst.v[3][4]), 1e-15);
  EXPECT_THROW(jp_payoff(inst, 4, 0, 0, 0), DomainError);
  EXPECT_THROW(jp_payoff(inst, 0, 0, 6, 0), DomainError);
}

TEST(JpPayoff, AdaptiveKeepsEveryPayoffInUnitInterval) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = seeded(3, 3, 100 + s);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int a = 0; a <= 3; ++a)
          for (int b = 0; b <= 3; ++b) {
            const double p = jp_payoff(inst, x, y, a, b);
            ASSERT_GE(p, 0.0);
            ASSERT_LE(p, 1.0);
          }
  }
}

TEST(JpWellDefined, LargeCFails) {
  int failures = 0;
  for (std::uint64_t s = 0; s < 100; ++s) failures += !jp_well_defined(seeded(4, 4, s, DeltaPolicy::fixed_c, 100.0)).ok;
  EXPECT_GE(failures, 99);
}

// Expected red: an independent sampler puts the ill-defined rate near 4%.
TEST(JpWellDefined, DefaultCHoldsForNinetyNineOfHundred) {
  int ok = 0;
  for (std::uint64_t s = 0; s < 100; ++s) ok += jp_well_defined(seeded(8, 16, s, DeltaPolicy::fixed_c)).ok;
  EXPECT_GE(ok, 99);
}

TEST(JpAsGame, AdapterAgreesWithPayoffAveraging) {
  const auto inst = seeded(2, 2, 6);
  const auto g = jp_as_game(inst);
  const DeterministicStrategy s{{0, 2}, {1, 0}};
  EXPECT_NEAR(classical_value_det(g, s).value, payoff_average(inst, s), 1e-12);
  EXPECT_NEAR(jp_value_bilinear(inst, s), payoff_average(inst, s), 1e-12);
  for (double p : g.table()) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
  EXPECT_THROW(classical_value_det(g, {{0, 1}, {0, 1, 2}}), ValidationError);
}

TEST(JpAsGame, IllDefinedRefused) {
  const auto inst = seeded(4, 4, 1, DeltaPolicy::fixed_c, 100.0);
  ASSERT_FALSE(jp_well_defined(inst).ok);
  EXPECT_THROW(jp_as_game(inst), ValidationError);
}

TEST(JpBestResponse, AllPassBobGivesAllPassAlice) {
  const auto inst = seeded(3, 2, 7);
  const DeterministicStrategy start{{0, 0, 0}, {2, 2, 2}};
  EXPECT_EQ(jp_best_response_alice(inst, start).alice, (std::vector<int>{2, 2, 2}));
}

TEST(JpBestResponse, LocallyOptimal) {
  const auto inst = seeded(2, 2, 8);
  const auto s = jp_best_response_alice(inst, {{0, 0}, {1, 0}});
  const double v = jp_value_bilinear(inst, s);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a <= 2; ++a) {
      auto t = s;
      t.alice[x] = a;
      EXPECT_LE(jp_value_bilinear(inst, t), v + 1e-15);
    }
}

TEST(JpBestResponse, SearchMatchesExactMostOfTheTime) {
  int matches = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = seeded(3, 2, 200 + seed);
    const double exact = classical_value_exact(jp_as_game(inst)).report.value;
    RngStream starts = RngStream(seed).child(StreamTag::restarts);
    double best = 0.0;
    for (int r = 0; r < 50; ++r) {
      DeterministicStrategy start{{}, {}};
      for (int y = 0; y < 3; ++y) start.bob.push_back(static_cast<int>(starts.below(3)));
      start.alice = {0, 0, 0};
      const auto found = jp_best_response_search(inst, start);
      EXPECT_LE(found.rounds, inst.n * (inst.k + 1) + 1);
      best = std::max(best, found.value);
    }
    EXPECT_LE(best, exact + 1e-12);
    matches += std::abs(best - exact) <= 1e-12;
  }
  EXPECT_GE(matches, 19);
}

TEST(JpFirstCoordinate, EngineeredMaximum) {
  auto inst = seeded(2, 3, 9);
  for (int a = 0; a < 3; ++a) inst.u[0][a][0] = -1.0;
  inst.u[0][1][0] = 5.0;
  EXPECT_EQ(jp_first_coordinate_strategy(inst).alice[0], 1);
}

TEST(JpFirstCoordinate, PositiveOnAverageAndBelowExact) {
  double total = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto inst = seeded(8, 16, s);
    total += jp_value_bilinear(inst, jp_first_coordinate_strategy(inst)) - 0.5;
  }
  EXPECT_GT(total / 100, 0.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = seeded(3, 2, s);
    EXPECT_LE(jp_value_bilinear(inst, jp_first_coordinate_strategy(inst)),
              classical_value_exact(jp_as_game(inst)).report.value + 1e-12);
  }
}

TEST(JpSymmetry, SwappingPlayersKeepsClassicalValue) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto inst = seeded(3, 2, 300 + s);
    EXPECT_NEAR(classical_value_exact(jp_as_game(inst)).report.value,
                classical_value_exact(jp_as_game(swap_players(inst))).report.value, 1e-12);
  }
}

TEST(JpQuantum, NormalisationAndTraces) {
  const auto inst = seeded(3, 4, 10);
  const auto q = build_jp_quantum(inst);
  ASSERT_TRUE(q.valid);
  EXPECT_NEAR(q.strategy.schmidt.squaredNorm(), 1.0, 1e-14);
  for (int x = 0; x < 3; ++x)
    for (int a = 0; a < 4; ++a)
      EXPECT_NEAR(q.strategy.alice_povms[x][a].trace(), (inst.u[x][a].squaredNorm() + 1.0) / 40.0, 1e-13);
  for (const auto& povm : q.strategy.bob_povms) EXPECT_TRUE(validate_povm(povm).is_valid);
}

TEST(JpQuantum, ClosedFormMatchesGenericEvaluator) {
  for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 4}, std::pair{4, 8}})
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto inst = seeded(n, k, 400 + s);
      const auto q = build_jp_quantum(inst);
      ASSERT_TRUE(q.valid);
      EXPECT_NEAR(jp_quantum_value_closed_form(inst).value, quantum_value(jp_as_game(inst), q.strategy).value, 1e-10);
    }
}

TEST(JpQuantum, ToyPolynomialAtOneDimension) {
  auto inst = seeded(1, 1, 11);
  inst.v = inst.u;
  inst.delta = 0.3;
  const double u = inst.u[0][0][0];
  // (1/200) (u^2 + 1)^2 is the weight of the (0, 0) outcome
  EXPECT_NEAR(jp_quantum_value_closed_form(inst).value, 0.5 + 0.3 * u * u * std::pow(u * u + 1.0, 2) / 200.0, 1e-14);
}

TEST(JpQuantum, ValidityRateAtK16) {
  int valid = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) valid += jp_input_check(seeded(4, 16, s, DeltaPolicy::fixed_c), true, 0).valid;
  EXPECT_GE(valid, 990);
}

TEST(JpQuantum, TermMeanNearRootK) {
  std::vector<double> means;
  for (std::uint64_t s = 0; s < 200; ++s) means.push_back(jp_closed_form_term_mean(seeded(8, 16, s)));
  double mean = 0.0, var = 0.0;
  for (double m : means) mean += m;
  mean /= means.size();
  for (double m : means) var += (m - mean) * (m - mean);
  const double se = std::sqrt(var / (means.size() - 1) / means.size());
  EXPECT_NEAR(mean, 4.0, 3 * se);
}

TEST(JpQuantum, SpreadShrinksWithSize) {
  auto spread = [](int n, int k) {
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 200; ++s) v.push_back(jp_quantum_value_closed_form(seeded(n, k, 500 + s)).value);
    double m = 0.0, q = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) q += (x - m) * (x - m);
    return std::sqrt(q / (v.size() - 1));
  };
  EXPECT_LT(spread(8, 16), spread(4, 8));
}

TEST(JpProbe, ExpectationIsRootK) {
  for (int k : {1, 16}) {
    const auto p = jp_expectation_probe(k, 100000, RngStream(12).child(k));
    EXPECT_NEAR(p.mean, std::sqrt(k), 3 * p.std_err);
  }
}

TEST(JpViolation, RatioFiniteAndEntangledPositive) {
  const auto inst = seeded(3, 2, 13);
  const auto r = jp_violation_report(inst, ClassicalMethod::exact, 1, RngStream(13));
  ASSERT_TRUE(r.ratio.has_value());
  EXPECT_TRUE(std::isfinite(*r.ratio));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto v = jp_violation_report(seeded(3, 4, 600 + s), ClassicalMethod::alternating, 10, RngStream(s));
    if (v.povms_valid) { EXPECT_GT(v.entangled_bias, 0.0); }
  }
}

TEST(JpStrings, RoundTrip) {
  EXPECT_EQ(delta_policy_from_string(to_string(DeltaPolicy::fixed_c)), DeltaPolicy::fixed_c);
  EXPECT_EQ(classical_method_from_string("first-coord"), ClassicalMethod::first_coordinate);
  EXPECT_THROW(delta_policy_from_string("nope"), DomainError);
}
