#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>

#include "bellgames/coset/coset_game.hpp"
#include "bellgames/errors.hpp"

using namespace bellgames;
using namespace bellgames::coset;

namespace {

/// Codeword for parity function s by direct evaluation, one bit at a time.
BitString parity_codeword(int n, int s) {
  std::uint64_t bits = 0;
  for (int z = 0; z < n; ++z) {
    int parity = 0;
    for (int t = 0; t < 6; ++t) parity ^= ((z >> t) & 1) & ((s >> t) & 1);
    bits |= static_cast<std::uint64_t>(parity) << z;
  }
  return BitString(bits, n);
}

/// Value of a deterministic coset strategy by looping over every pair of 2^n
/// strings; no coset bookkeeping beyond the class lookup.
double naive_strategy_value(const CosetInstance& inst, const DeterministicStrategy& s) {
  const int n = inst.n();
  double total = 0.0;
  for (std::uint64_t x = 0; x < (1ull << n); x += 1) {
    const BitString bx(x, n);
    if (inst.position_in_coset(bx) != 0) continue;
    for (std::uint64_t y = 0; y < (1ull << n); ++y) {
      const BitString by(y, n);
      if (inst.position_in_coset(by) != 0) continue;
      const BitString a = inst.element(inst.coset_index(bx), s.alice[inst.coset_index(bx)]);
      const BitString b = inst.element(inst.coset_index(by), s.bob[inst.coset_index(by)]);
      total += 1.0 - static_cast<double>(std::popcount(a.bits() ^ b.bits())) / n;
    }
  }
  const double cosets = static_cast<double>(inst.coset_count());
  return total / (cosets * cosets);
}

}  // namespace

TEST(Hadamard, SmallCasesByHand) {
  const auto h2 = hadamard_subgroup(2);
  ASSERT_EQ(h2.size(), 2u);
  EXPECT_EQ(h2[0].to_binary(), "00");
  EXPECT_EQ(h2[1].to_binary(), "01");
  std::set<std::string> h4;
  for (const auto& w : hadamard_subgroup(4)) h4.insert(w.to_binary());
  EXPECT_EQ(h4, (std::set<std::string>{"0000", "0101", "0011", "0110"}));
}

TEST(Hadamard, MatchesParityEnumerationAndGroupLaws) {
  for (int n : {2, 4, 8, 16, 32, 64}) {
    const auto h = hadamard_subgroup(n);
    ASSERT_EQ(static_cast<int>(h.size()), n);
    std::set<std::uint64_t> words;
    for (int s = 0; s < n; ++s) {
      EXPECT_EQ(h[s], parity_codeword(n, s)) << n << ' ' << s;
      words.insert(h[s].bits());
    }
    EXPECT_TRUE(words.contains(0));
    for (const auto& a : h)
      for (const auto& b : h) {
        EXPECT_TRUE(words.contains((a ^ b).bits()));
        if (!(a == b)) { EXPECT_EQ(hamming_distance(a, b), n / 2); }
      }
  }
}

TEST(Hadamard, NonPowerOfTwoRejected) {
  EXPECT_THROW(hadamard_subgroup(6), DomainError);
  EXPECT_THROW(CosetInstance(12), DomainError);
}

TEST(Cosets, PartitionTheCube) {
  for (int n : {4, 8, 16}) {
    const CosetInstance inst(n);
    EXPECT_EQ(inst.coset_count(), (1ull << n) / n);
    std::vector<int> hits(1ull << n, 0);
    for (std::uint64_t c = 0; c < inst.coset_count(); ++c)
      for (int j = 0; j < n; ++j) {
        const BitString x = inst.element(c, j);
        ++hits[x.bits()];
        ASSERT_EQ(inst.coset_index(x), c);
        ASSERT_EQ(inst.position_in_coset(x), j);
      }
    for (int h : hits) ASSERT_EQ(h, 1);
  }
}

TEST(Cosets, ElementsWithinCosetHaveOrthogonalSigns) {
  const CosetInstance inst(8);
  for (std::uint64_t c : {0ull, 5ull, 31ull})
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        EXPECT_EQ(sign_vector(inst.element(c, i)).dot(sign_vector(inst.element(c, j))), i == j ? 8.0 : 0.0);
}

TEST(CosetPayoff, Examples) {
  const auto a = BitString::from_binary("0110");
  EXPECT_EQ(coset_payoff(a, a), 1.0);
  EXPECT_EQ(coset_payoff(a, BitString::from_binary("1001")), 0.0);
  EXPECT_THROW(coset_payoff(a, BitString::from_binary("011")), DimensionError);
}

TEST(CosetPayoff, EqualsHalfPlusHalfInnerProduct) {
  RngStream s(16);
  for (int t = 0; t < 100; ++t) {
    const BitString a(s.next_u64() & 0xffff, 16), b(s.next_u64() & 0xffff, 16);
    const double inner = sign_vector(a).dot(sign_vector(b)) / 16.0;
    EXPECT_NEAR(coset_payoff(a, b), 0.5 + inner / 2.0, 1e-15);
  }
}

TEST(CosetPayoff, InvariantUnderCommonCodewordShift) {
  const CosetInstance inst(8);
  for (std::uint64_t a = 0; a < 256; a += 7)
    for (std::uint64_t b = 0; b < 256; ++b)
      for (const auto& h : inst.codewords())
        ASSERT_EQ(coset_payoff(BitString(a, 8) ^ h, BitString(b, 8) ^ h), coset_payoff(BitString(a, 8), BitString(b, 8)));
}

TEST(CosetGame, ShapeAndDiagonal) {
  const CosetInstance inst(4);
  const auto g = coset_as_game(inst);
  EXPECT_EQ(g.shape(), (GameShape{4, 4, 4, 4}));
  for (int c = 0; c < 4; ++c)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(g.payoff(c, c, j, j), 1.0);
  EXPECT_THROW(coset_as_game(CosetInstance(16)), RefusedError);
}

TEST(WeightHeuristic, PositiveBias) {
  for (int n : {4, 8, 16}) EXPECT_GT(weight_heuristic_value(CosetInstance(n)).value, 0.5) << n;
}

TEST(WeightHeuristic, MatchesNaiveEnumeration) {
  for (int n : {4, 8}) {
    const CosetInstance inst(n);
    const auto s = weight_heuristic_strategy(inst);
    EXPECT_NEAR(weight_heuristic_value(inst).value, naive_strategy_value(inst, s), 1e-12);
    EXPECT_NEAR(coset_classical_value(inst, s), naive_strategy_value(inst, s), 1e-12);
    EXPECT_NEAR(classical_value_det(coset_as_game(inst), s).value, naive_strategy_value(inst, s), 1e-12);
  }
}

TEST(WeightHeuristic, ClassicalOptimumAtFour) {
  const CosetInstance inst(4);
  EXPECT_LE(weight_heuristic_value(inst).value, classical_value_exact(coset_as_game(inst)).report.value + 1e-12);
}

TEST(WeightHeuristic, ScaledBiasWithinFactorFour) {
  std::vector<double> scaled;
  for (int n : {8, 16, 32}) {
    WeightHeuristicOptions opt;
    opt.seed = 32;
    const double bias = weight_heuristic_value(CosetInstance(n), opt).value - 0.5;
    scaled.push_back(bias * n / std::log2(n));
  }
  EXPECT_LE(*std::max_element(scaled.begin(), scaled.end()), 4 * *std::min_element(scaled.begin(), scaled.end()));
}

TEST(WeightHeuristic, MaxWeightTieBreaksLexicographically) {
  const CosetInstance inst(4);
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c) {
    const int chosen = max_weight_position(inst, c);
    const BitString best = inst.element(c, chosen);
    for (int j = 0; j < 4; ++j) {
      const BitString other = inst.element(c, j);
      EXPECT_GE(best.weight(), other.weight());
      if (j != chosen && other.weight() == best.weight()) { EXPECT_TRUE(best.lex_less(other)); }
    }
  }
}

TEST(RandomizeMarginals, ValueUnchangedAndMarginalUniform) {
  const CosetInstance inst(4);
  const auto base = weight_heuristic_strategy(inst);
  const auto wrapped = randomize_marginals(inst, base);
  EXPECT_EQ(shared_shift_value(inst, wrapped), coset_classical_value(inst, base));
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c)
    for (bool alice : {true, false})
      for (double p : output_marginal(wrapped, alice, c)) EXPECT_EQ(p, 0.25);
  const auto twice = randomize_marginals(inst, wrapped);
  EXPECT_EQ(shared_shift_value(inst, twice), shared_shift_value(inst, wrapped));
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c)
    EXPECT_EQ(output_marginal(twice, true, c), output_marginal(wrapped, true, c));
}

TEST(CosetQuantum, DefaultParams) {
  const auto p = CosetStrategyParams::defaults(8);
  EXPECT_NEAR(p.alpha, 1 / std::sqrt(16.0), 1e-15);
  EXPECT_NEAR(p.gamma, 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(p.beta, 1.0);
}

TEST(CosetQuantum, GramSpectrumAndTraces) {
  const CosetInstance inst(8);
  const double beta = 0.7;
  Matrix gram(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      gram(i, j) = sign_vector(inst.element(3, i)).dot(sign_vector(inst.element(3, j))) + beta * beta;
  const Vector eig = eigenvalues_sym(gram);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(eig[i], 8.0, 1e-12);
  EXPECT_NEAR(eig[7], 8.0 * (1 + beta * beta), 1e-12);

  const auto params = CosetStrategyParams::from_gamma_sq(8, 0.4, beta);
  const auto q = build_coset_quantum(inst, params);
  EXPECT_NEAR(q.mu, 8.0 * (1 + beta * beta), 1e-15);
  for (const auto& povm : q.measured)
    for (const auto& m : povm) EXPECT_NEAR(m.trace(), (8.0 + beta * beta) / q.mu, 1e-12);
  for (const auto& r : q.remainder) EXPECT_GE(smallest_eigenvalue_sym(r), -1e-9);
  const auto folded = q.folded();
  for (const auto& povm : folded.alice_povms) EXPECT_TRUE(validate_povm(povm).is_valid);
}

TEST(CosetQuantum, RemainderProbabilityInUnitInterval) {
  for (int n : {4, 8, 32})
    for (double g : {0.1, 0.5, 0.9}) {
      const double r = remainder_probability(n, CosetStrategyParams::from_gamma_sq(n, g, 1.0));
      EXPECT_GE(r, -1e-9);
      EXPECT_LE(r, 1.0 + 1e-9);
    }
}

TEST(CosetQuantum, ReducedMatchesExact) {
  for (int n : {4, 8})
    for (auto [g, b] : {std::pair{0.5, 1.0}, std::pair{0.25, 2.0}, std::pair{0.8, 0.5}}) {
      const CosetInstance inst(n);
      const auto params = CosetStrategyParams::from_gamma_sq(n, g, b);
      EXPECT_NEAR(coset_quantum_value(inst, params, EvalMode::reduced).value,
                  coset_quantum_value(inst, params, EvalMode::exact).value, 1e-12);
    }
}

TEST(CosetQuantum, MonteCarloCoversReduced) {
  for (int n : {16, 32}) {
    const CosetInstance inst(n);
    const auto params = CosetStrategyParams::defaults(n);
    CosetValueOptions opt;
    opt.samples = 20000;
    opt.seed = 3;
    const auto mc = coset_quantum_value(inst, params, EvalMode::montecarlo, opt);
    ASSERT_TRUE(mc.half_width.has_value());
    EXPECT_NEAR(mc.value, coset_quantum_value(inst, params, EvalMode::reduced).value, *mc.half_width);
  }
}

TEST(CosetQuantum, DefaultValuesAboveFloor) {
  for (int n : {4, 8, 16, 32}) {
    const CosetInstance inst(n);
    EXPECT_GE(coset_quantum_value(inst, CosetStrategyParams::defaults(n), EvalMode::reduced).value,
              0.5 + 0.03 / std::sqrt(n));
  }
}

TEST(CosetQuantum, NoMeasuredWeightLeavesUniformGuess) {
  for (int n : {4, 8, 16}) {
    const CosetInstance inst(n);
    const auto params = CosetStrategyParams::from_gamma_sq(n, 1.0, 1.0);
    EXPECT_LE(std::abs(coset_quantum_value(inst, params, EvalMode::reduced).value - 0.5), 1.0 / n);
  }
}

TEST(CosetQuantum, ExactModeRefusedAboveEight) {
  EXPECT_THROW(coset_quantum_value(CosetInstance(16), CosetStrategyParams::defaults(16), EvalMode::exact), RefusedError);
}

TEST(CosetOptimize, AtLeastDefaultAndStable) {
  const CosetInstance inst(8);
  const auto best = optimize_coset_params(inst, default_param_grid());
  EXPECT_GE(best.report.value, coset_quantum_value(inst, CosetStrategyParams::defaults(8), EvalMode::reduced).value);
  const ParamGrid small{{0.5, 1.0, 2.0}, {0.25, 0.5, 0.75}};
  const auto a = optimize_coset_params(inst, small), b = optimize_coset_params(inst, small);
  EXPECT_EQ(a.report.value, b.report.value);
  EXPECT_EQ(a.params.beta, b.params.beta);
  EXPECT_THROW(optimize_coset_params(inst, ParamGrid{}), DomainError);
}

TEST(CosetOptimize, ScaledBiasWithinTwentyPercent) {
  std::vector<double> scaled;
  for (int n : {8, 16, 32}) {
    const auto best = optimize_coset_params(CosetInstance(n), default_param_grid());
    scaled.push_back(best.report.bias * std::sqrt(n));
  }
  double mean = 0.0;
  for (double s : scaled) mean += s / scaled.size();
  for (double s : scaled) EXPECT_LE(std::abs(s - mean), 0.2 * mean);
}

TEST(BitStrings, TextRoundTrip) {
  const auto b = BitString::from_binary("1101000");
  EXPECT_EQ(b.to_binary(), "1101000");
  EXPECT_EQ(b.bits(), 0b1011u);
  EXPECT_EQ(BitString::from_hex(b.to_hex(), 7), b);
  EXPECT_EQ(b.weight(), 3);
}
