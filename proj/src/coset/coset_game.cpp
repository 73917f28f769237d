#include "bellgames/coset/coset_game.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "bellgames/errors.hpp"
#include "bellgames/numerics/parallel.hpp"

namespace bellgames::coset {
namespace {

constexpr std::uint64_t kMaxListedCosets = std::uint64_t{1} << 20;
constexpr std::uint64_t kMaxEnumeratedCosets = std::uint64_t{1} << 16;

std::uint64_t mask_for(int n) { return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

void require_power_of_two(int n) {
  if (n < 2 || n > 64 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw DomainError("n must be a power of two in [2, 64], got " + std::to_string(n));
}

/// Heaviest element of x + H, ties to the lexicographically smallest.
BitString heaviest_in_coset(const CosetInstance& inst, const BitString& x) {
  BitString best = x ^ inst.codewords().front();
  for (const auto& h : inst.codewords()) {
    const BitString candidate = x ^ h;
    if (candidate.weight() > best.weight() || (candidate.weight() == best.weight() && candidate.lex_less(best)))
      best = candidate;
  }
  return best;
}

/// Probability of measured outcomes (a, b) whose XOR c has weight `weight`.
double measured_pair_prob(int n, const CosetStrategyParams& p, double mu, int weight) {
  const double overlap = p.alpha * (n - 2 * weight) + p.gamma * p.beta * p.beta;
  return overlap * overlap / (mu * mu);
}

}  // namespace

std::vector<BitString> hadamard_subgroup(int n) {
  require_power_of_two(n);
  std::vector<BitString> words;
  words.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    std::uint64_t bits = 0;
    for (int z = 0; z < n; ++z)
      if (std::popcount(static_cast<unsigned>(z & s)) % 2 == 1) bits |= std::uint64_t{1} << z;
    words.emplace_back(bits, n);
  }
  return words;
}

CosetInstance::CosetInstance(int n) : n_(n), log_n_(0), coset_count_(0) {
  require_power_of_two(n);
  log_n_ = std::countr_zero(static_cast<unsigned>(n));
  codewords_ = hadamard_subgroup(n);
  for (int z = 0; z < n; ++z)
    if (!std::has_single_bit(static_cast<unsigned>(z))) free_positions_.push_back(z);
  coset_count_ = std::uint64_t{1} << free_positions_.size();
}

BitString CosetInstance::coset_rep(std::uint64_t index) const {
  if (index >= coset_count_) throw DomainError("coset index out of range");
  std::uint64_t bits = 0;
  for (std::size_t t = 0; t < free_positions_.size(); ++t)
    if ((index >> t) & 1u) bits |= std::uint64_t{1} << free_positions_[t];
  return BitString(bits, n_);
}

int CosetInstance::position_in_coset(const BitString& x) const {
  if (x.length() != n_) throw DimensionError("bit string length differs from n");
  int s = 0;
  for (int t = 0; t < log_n_; ++t)
    if (x.bit(1 << t)) s |= 1 << t;
  return s;
}

std::uint64_t CosetInstance::coset_index(const BitString& x) const {
  const BitString rep = x ^ codewords_[static_cast<std::size_t>(position_in_coset(x))];
  std::uint64_t index = 0;
  for (std::size_t t = 0; t < free_positions_.size(); ++t)
    if (rep.bit(free_positions_[t])) index |= std::uint64_t{1} << t;
  return index;
}

BitString CosetInstance::element(std::uint64_t coset, int j) const {
  if (j < 0 || j >= n_) throw DomainError("coset position out of range");
  return coset_rep(coset) ^ codewords_[static_cast<std::size_t>(j)];
}

std::vector<BitString> CosetInstance::coset_reps() const {
  if (coset_count_ > kMaxListedCosets)
    throw RefusedError("listing " + std::to_string(coset_count_) + " coset representatives exceeds the limit");
  std::vector<BitString> reps;
  reps.reserve(coset_count_);
  for (std::uint64_t c = 0; c < coset_count_; ++c) reps.push_back(coset_rep(c));
  return reps;
}

double coset_payoff(const BitString& a, const BitString& b) {
  return 1.0 - static_cast<double>(hamming_distance(a, b)) / a.length();
}

Vector sign_vector(const BitString& x) {
  Vector w(x.length());
  for (int i = 0; i < x.length(); ++i) w[i] = x.bit(i) ? -1.0 : 1.0;
  return w;
}

TwoPlayerGame coset_as_game(const CosetInstance& inst) {
  if (inst.n() > 8) throw RefusedError("dense coset game table is limited to n <= 8");
  const int cosets = static_cast<int>(inst.coset_count());
  std::vector<BitString> elements;
  for (int c = 0; c < cosets; ++c)
    for (int j = 0; j < inst.n(); ++j) elements.push_back(inst.element(static_cast<std::uint64_t>(c), j));
  const int n = inst.n();
  return TwoPlayerGame::from_function(
      GameShape{cosets, cosets, n, n},
      [&](int x, int y, int a, int b) {
        return coset_payoff(elements[static_cast<std::size_t>(x * n + a)], elements[static_cast<std::size_t>(y * n + b)]);
      },
      "coset");
}

int max_weight_position(const CosetInstance& inst, std::uint64_t coset) {
  return inst.position_in_coset(heaviest_in_coset(inst, inst.coset_rep(coset)));
}

DeterministicStrategy weight_heuristic_strategy(const CosetInstance& inst) {
  if (inst.n() > 16) throw RefusedError("explicit coset strategies are limited to n <= 16");
  std::vector<int> map(inst.coset_count());
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c) map[c] = max_weight_position(inst, c);
  return DeterministicStrategy{map, map};
}

double coset_classical_value(const CosetInstance& inst, const DeterministicStrategy& strategy) {
  if (inst.n() > 16) throw RefusedError("explicit coset strategies are limited to n <= 16");
  const std::uint64_t cosets = inst.coset_count();
  if (strategy.alice.size() != cosets || strategy.bob.size() != cosets)
    throw ValidationError("coset strategy must assign a position to every coset");
  std::vector<std::uint64_t> alice_out(cosets), bob_out(cosets);
  for (std::uint64_t c = 0; c < cosets; ++c) {
    alice_out[c] = inst.element(c, strategy.alice[c]).bits();
    bob_out[c] = inst.element(c, strategy.bob[c]).bits();
  }
  const double n = inst.n();
  const double total = deterministic_sum(cosets, [&](std::size_t x) {
    std::uint64_t distance = 0;
    for (std::uint64_t y = 0; y < cosets; ++y) distance += static_cast<std::uint64_t>(std::popcount(alice_out[x] ^ bob_out[y]));
    return static_cast<double>(cosets) - static_cast<double>(distance) / n;
  }, 64);
  return total / (static_cast<double>(cosets) * static_cast<double>(cosets));
}

ValueReport weight_heuristic_value(const CosetInstance& inst, const WeightHeuristicOptions& options) {
  const int n = inst.n();
  if (n <= 16) {
    // count ones per position over the chosen elements; m_i = 1 - 2 ones_i / cosets
    std::vector<std::uint64_t> ones(static_cast<std::size_t>(n), 0);
    for (std::uint64_t c = 0; c < inst.coset_count(); ++c) {
      const BitString chosen = heaviest_in_coset(inst, inst.coset_rep(c));
      for (int i = 0; i < n; ++i)
        if (chosen.bit(i)) ++ones[static_cast<std::size_t>(i)];
    }
    double norm_sq = 0.0;
    const double count = static_cast<double>(inst.coset_count());
    for (auto o : ones) {
      const double m = 1.0 - 2.0 * static_cast<double>(o) / count;
      norm_sq += m * m;
    }
    return ValueReport::make(0.5 + norm_sq / (2.0 * n), "weight-heuristic-exact");
  }
  if (options.samples < 2) throw DomainError("weight heuristic Monte Carlo needs at least 2 samples");
  constexpr std::size_t block = 4096;
  const RngStream base = RngStream(options.seed).child(StreamTag::samples);
  const std::uint64_t mask = mask_for(n);
  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const Moments m = deterministic_reduce<Moments>(
      options.samples, block,
      [&](std::size_t begin, std::size_t end) {
        RngStream rng = base.child(begin / block);
        Moments local;
        for (std::size_t i = begin; i < end; ++i) {
          const BitString a = heaviest_in_coset(inst, BitString(rng.next_u64() & mask, n));
          const BitString b = heaviest_in_coset(inst, BitString(rng.next_u64() & mask, n));
          const double payoff = coset_payoff(a, b);
          local.sum += payoff;
          local.sum_sq += payoff * payoff;
        }
        return local;
      },
      [](Moments a, Moments b) { return Moments{a.sum + b.sum, a.sum_sq + b.sum_sq}; }, Moments{});
  const auto count = static_cast<double>(options.samples);
  const double mean = m.sum / count;
  const double variance = std::max(0.0, (m.sum_sq - count * mean * mean) / (count - 1.0));
  return ValueReport::make(mean, "weight-heuristic-montecarlo", 3.0 * std::sqrt(variance / count));
}

SharedShiftStrategy randomize_marginals(const CosetInstance& inst, const DeterministicStrategy& strategy) {
  return SharedShiftStrategy{strategy, std::vector<double>(static_cast<std::size_t>(inst.n()), 1.0 / inst.n())};
}

SharedShiftStrategy randomize_marginals(const CosetInstance& inst, const SharedShiftStrategy& strategy) {
  const auto n = static_cast<std::size_t>(inst.n());
  if (strategy.shift_weights.size() != n) throw DimensionError("shift distribution has the wrong size");
  std::vector<double> combined(n, 0.0);
  for (std::size_t r1 = 0; r1 < n; ++r1)
    for (std::size_t r2 = 0; r2 < n; ++r2) combined[r1 ^ r2] += strategy.shift_weights[r1] / static_cast<double>(n);
  return SharedShiftStrategy{strategy.base, combined};
}

double shared_shift_value(const CosetInstance& inst, const SharedShiftStrategy& strategy) {
  double value = 0.0;
  for (std::size_t r = 0; r < strategy.shift_weights.size(); ++r) {
    if (strategy.shift_weights[r] == 0.0) continue;
    DeterministicStrategy shifted = strategy.base;
    for (auto& j : shifted.alice) j ^= static_cast<int>(r);
    for (auto& j : shifted.bob) j ^= static_cast<int>(r);
    value += strategy.shift_weights[r] * coset_classical_value(inst, shifted);
  }
  return value;
}

std::vector<double> output_marginal(const SharedShiftStrategy& strategy, bool alice, std::uint64_t coset) {
  const auto& map = alice ? strategy.base.alice : strategy.base.bob;
  const int j = map.at(coset);
  std::vector<double> dist(strategy.shift_weights.size(), 0.0);
  for (std::size_t r = 0; r < strategy.shift_weights.size(); ++r)
    dist[static_cast<std::size_t>(j) ^ r] += strategy.shift_weights[r];
  return dist;
}

CosetStrategyParams CosetStrategyParams::defaults(int n) {
  return from_gamma_sq(n, 0.5, 1.0);
}

CosetStrategyParams CosetStrategyParams::from_gamma_sq(int n, double gamma_sq, double beta) {
  if (!(gamma_sq >= 0.0 && gamma_sq <= 1.0)) throw DomainError("gamma^2 must lie in [0, 1]");
  CosetStrategyParams p{std::sqrt((1.0 - gamma_sq) / n), std::sqrt(gamma_sq), beta};
  p.validate(n);
  return p;
}

void CosetStrategyParams::validate(int n) const {
  if (alpha < 0.0 || gamma < 0.0) throw DomainError("alpha and gamma must be nonnegative");
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  const double norm = n * alpha * alpha + gamma * gamma;
  if (std::abs(norm - 1.0) > 1e-12) throw DomainError("n alpha^2 + gamma^2 must equal 1, got " + std::to_string(norm));
}

double povm_normalisation(int n, double beta) { return n * (1.0 + beta * beta); }

QuantumStrategy CosetQuantumStrategy::folded() const {
  QuantumStrategy q;
  q.schmidt = schmidt;
  for (std::size_t c = 0; c < measured.size(); ++c) {
    std::vector<Matrix> povm;
    const double share = 1.0 / static_cast<double>(measured[c].size());
    for (const auto& m : measured[c]) povm.push_back(m + share * remainder[c]);
    q.alice_povms.push_back(povm);
    q.bob_povms.push_back(std::move(povm));
  }
  return q;
}

CosetQuantumStrategy build_coset_quantum(const CosetInstance& inst, const CosetStrategyParams& params) {
  const int n = inst.n();
  if (n > 8) throw RefusedError("explicit coset POVMs are limited to n <= 8");
  params.validate(n);
  CosetQuantumStrategy out;
  out.params = params;
  out.mu = povm_normalisation(n, params.beta);
  out.schmidt = Vector::Constant(n + 1, params.alpha);
  out.schmidt[n] = params.gamma;
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c) {
    std::vector<Matrix> elements;
    Matrix total = Matrix::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) {
      Vector tilde(n + 1);
      tilde.head(n) = sign_vector(inst.element(c, j));
      tilde[n] = params.beta;
      Matrix e = tilde * tilde.transpose() / out.mu;
      total += e;
      elements.push_back(std::move(e));
    }
    Matrix rest = symmetrized(Matrix::Identity(n + 1, n + 1) - total);
    const double floor = smallest_eigenvalue_sym(rest);
    if (floor < -kPovmTolerance)
      throw ValidationError("coset remainder is not PSD: min eigenvalue " + std::to_string(floor));
    out.measured.push_back(std::move(elements));
    out.remainder.push_back(std::move(rest));
  }
  return out;
}

double remainder_probability(int n, const CosetStrategyParams& params) {
  const double mu = povm_normalisation(n, params.beta);
  return 1.0 - n * (params.alpha * params.alpha * n + params.gamma * params.gamma * params.beta * params.beta) / mu;
}

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::exact:
      return "exact";
    case EvalMode::reduced:
      return "reduced";
    case EvalMode::montecarlo:
      return "mc";
  }
  return "unknown";
}

EvalMode eval_mode_from_string(const std::string& name) {
  if (name == "exact") return EvalMode::exact;
  if (name == "reduced") return EvalMode::reduced;
  if (name == "mc" || name == "montecarlo") return EvalMode::montecarlo;
  throw DomainError("unknown evaluation mode: " + name);
}

double difference_coset_value(const CosetInstance& inst, const CosetStrategyParams& params, std::uint64_t coset) {
  const int n = inst.n();
  const double mu = povm_normalisation(n, params.beta);
  const BitString rep = inst.coset_rep(coset);
  // every codeword is 0 at position 0, so the whole coset shares this sign
  const double sign = rep.bit(0) ? -1.0 : 1.0;
  const double uniform_payoff = 0.5 + sign / (2.0 * n);
  double acc = 0.0;
  for (const auto& h : inst.codewords()) {
    const int w = (rep ^ h).weight();
    acc += measured_pair_prob(n, params, mu, w) * ((1.0 - static_cast<double>(w) / n) - uniform_payoff);
  }
  return uniform_payoff + n * acc;
}

double coset_quantum_value_enumerated(const CosetInstance& inst, const CosetStrategyParams& params) {
  if (inst.coset_count() > kMaxListedCosets)
    throw RefusedError("enumerating " + std::to_string(inst.coset_count()) + " difference cosets exceeds the limit");
  params.validate(inst.n());
  const double total = deterministic_sum(inst.coset_count(),
                                         [&](std::size_t c) { return difference_coset_value(inst, params, c); });
  return total / static_cast<double>(inst.coset_count());
}

namespace {

/// Sums the per-element contribution over all of {0,1}^n grouped by
/// (weight, bit 0); equal to the difference-coset average since the cosets
/// partition the cube.
double class_counted_value(int n, const CosetStrategyParams& params) {
  const double mu = povm_normalisation(n, params.beta);
  // binom[w] = C(n-1, w)
  std::vector<double> binom(static_cast<std::size_t>(n), 1.0);
  for (int w = 1; w < n; ++w) binom[static_cast<std::size_t>(w)] = binom[static_cast<std::size_t>(w - 1)] * (n - w) / w;
  double acc = 0.0;
  for (int w = 0; w <= n; ++w) {
    const double p = measured_pair_prob(n, params, mu, w);
    for (int bit0 = 0; bit0 <= 1; ++bit0) {
      const int rest = w - bit0;
      if (rest < 0 || rest > n - 1) continue;
      const double uniform_payoff = 0.5 + (bit0 ? -1.0 : 1.0) / (2.0 * n);
      acc += binom[static_cast<std::size_t>(rest)] * p * ((1.0 - static_cast<double>(w) / n) - uniform_payoff);
    }
  }
  // half the cosets have sign +1, half -1, so the uniform payoffs average to 1/2
  return 0.5 + static_cast<double>(n) * n * std::ldexp(acc, -n);
}

}  // namespace

ValueReport coset_quantum_value(const CosetInstance& inst, const CosetStrategyParams& params, EvalMode mode,
                                const CosetValueOptions& options) {
  const int n = inst.n();
  params.validate(n);
  switch (mode) {
    case EvalMode::exact: {
      if (n > 8) {
        std::ostringstream os;
        os << "exact mode needs n <= 8; n = " << n << " would need " << static_cast<double>(inst.coset_count()) *
              static_cast<double>(inst.coset_count()) << " input pairs; use reduced mode";
        throw RefusedError(os.str());
      }
      auto report = quantum_value(coset_as_game(inst), build_coset_quantum(inst, params).folded());
      report.method = "coset-quantum-exact";
      return report;
    }
    case EvalMode::reduced: {
      const double value = inst.coset_count() <= kMaxEnumeratedCosets ? coset_quantum_value_enumerated(inst, params)
                                                                      : class_counted_value(n, params);
      return ValueReport::make(value, "coset-quantum-reduced");
    }
    case EvalMode::montecarlo: {
      if (options.samples < 2) throw DomainError("Monte Carlo mode needs at least 2 samples");
      constexpr std::size_t block = 4096;
      const RngStream base = RngStream(options.seed).child(StreamTag::samples);
      const std::uint64_t mask = mask_for(n);
      struct Moments {
        double sum = 0.0;
        double sum_sq = 0.0;
      };
      const Moments m = deterministic_reduce<Moments>(
          options.samples, block,
          [&](std::size_t begin, std::size_t end) {
            RngStream rng = base.child(begin / block);
            Moments local;
            for (std::size_t i = begin; i < end; ++i) {
              const double v = difference_coset_value(inst, params, inst.coset_index(BitString(rng.next_u64() & mask, n)));
              local.sum += v;
              local.sum_sq += v * v;
            }
            return local;
          },
          [](Moments a, Moments b) { return Moments{a.sum + b.sum, a.sum_sq + b.sum_sq}; }, Moments{});
      const auto count = static_cast<double>(options.samples);
      const double mean = m.sum / count;
      const double variance = std::max(0.0, (m.sum_sq - count * mean * mean) / (count - 1.0));
      return ValueReport::make(mean, "coset-quantum-montecarlo", 3.0 * std::sqrt(variance / count));
    }
  }
  throw DomainError("unknown evaluation mode");
}

ParamGrid default_param_grid() {
  ParamGrid grid;
  for (int i = 1; i <= 12; ++i) grid.betas.push_back(i / 4.0);
  for (int i = 1; i <= 19; ++i) grid.gamma_sqs.push_back(i / 20.0);
  return grid;
}

OptimizedParams optimize_coset_params(const CosetInstance& inst, const ParamGrid& grid) {
  if (grid.betas.empty() || grid.gamma_sqs.empty()) throw DomainError("parameter grid is empty");
  std::optional<OptimizedParams> best;
  for (double beta : grid.betas)
    for (double gamma_sq : grid.gamma_sqs) {
      const auto params = CosetStrategyParams::from_gamma_sq(inst.n(), gamma_sq, beta);
      auto report = coset_quantum_value(inst, params, EvalMode::reduced);
      if (!best || report.value > best->report.value) best = OptimizedParams{params, report};
    }
  best->report.method = "coset-quantum-optimized";
  return *best;
}

}  // namespace bellgames::coset
