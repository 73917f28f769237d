#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellgames/coset/bitstring.hpp"
#include "bellgames/game/game.hpp"
#include "bellgames/numerics/rng.hpp"

/// The Hadamard-coset game. For n a power of two, H is the subgroup of the n
/// Hadamard codewords in {0,1}^n. Each player receives a uniform coset of H and
/// outputs one of its n elements; outputs a, b win with probability
/// 1 - d(a, b) / n.
namespace bellgames::coset {

/// Codeword s has bit z equal to the parity of z AND s, for z, s < n.
std::vector<BitString> hadamard_subgroup(int n);

/// Cosets are indexed by their canonical representative: the unique element
/// that is zero at positions 1, 2, 4, ..., n/2. The remaining n - log2(n)
/// positions of the representative, read from low to high, form the index.
/// Element j of a coset is representative XOR codeword j.
class CosetInstance {
 public:
  /// n must be a power of two in [2, 64].
  explicit CosetInstance(int n);

  int n() const { return n_; }
  int log_n() const { return log_n_; }
  const std::vector<BitString>& codewords() const { return codewords_; }

  std::uint64_t coset_count() const { return coset_count_; }
  BitString coset_rep(std::uint64_t index) const;
  std::uint64_t coset_index(const BitString& x) const;
  int position_in_coset(const BitString& x) const;
  BitString element(std::uint64_t coset, int j) const;

  /// All representatives in index order; refuses above 2^20 cosets.
  std::vector<BitString> coset_reps() const;

 private:
  int n_;
  int log_n_;
  std::uint64_t coset_count_;
  std::vector<BitString> codewords_;
  std::vector<int> free_positions_;
};

/// 1 - d(a, b) / n.
double coset_payoff(const BitString& a, const BitString& b);

/// Entries (-1)^{x_i}; <w_a, w_b> = n - 2 d(a, b).
Vector sign_vector(const BitString& x);

/// Inputs are coset indices, outputs are positions within the coset.
/// Refuses above n = 8, where the dense table stops being practical.
TwoPlayerGame coset_as_game(const CosetInstance& inst);

/// Position of the heaviest element of a coset, ties to the lexicographically smallest.
int max_weight_position(const CosetInstance& inst, std::uint64_t coset);

/// Both players map each coset to max_weight_position. Needs n <= 16.
DeterministicStrategy weight_heuristic_strategy(const CosetInstance& inst);

/// Exact value of a deterministic coset strategy by the double loop over
/// coset pairs. Needs n <= 16.
double coset_classical_value(const CosetInstance& inst, const DeterministicStrategy& strategy);

struct WeightHeuristicOptions {
  /// Above n = 16 the value is estimated from this many random input pairs.
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0;
};

/// Value of the heaviest-element strategy. Exact for n <= 16 via the mean
/// sign vector m of the chosen elements (value = 1/2 + |m|^2 / (2n));
/// Monte Carlo with a three-standard-error half-width above that.
ValueReport weight_heuristic_value(const CosetInstance& inst, const WeightHeuristicOptions& options = {});

/// A deterministic strategy whose outputs are shifted by a shared random
/// codeword h_r: position j becomes j XOR r, with r drawn from shift_weights.
struct SharedShiftStrategy {
  DeterministicStrategy base;
  std::vector<double> shift_weights;  ///< probability of each r in [0, n)
};

SharedShiftStrategy randomize_marginals(const CosetInstance& inst, const DeterministicStrategy& strategy);
/// Wrapping again convolves the shift distribution with the uniform one.
SharedShiftStrategy randomize_marginals(const CosetInstance& inst, const SharedShiftStrategy& strategy);

double shared_shift_value(const CosetInstance& inst, const SharedShiftStrategy& strategy);
/// Output distribution over coset positions for one player's input.
std::vector<double> output_marginal(const SharedShiftStrategy& strategy, bool alice, std::uint64_t coset);

/// State sum_i lambda_i |i,i> with lambda = (alpha, ..., alpha, gamma) of
/// length n + 1, and measurement vectors (w_a; beta).
struct CosetStrategyParams {
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 1.0;

  /// (1/sqrt(2n), 1/sqrt(2), 1).
  static CosetStrategyParams defaults(int n);
  static CosetStrategyParams from_gamma_sq(int n, double gamma_sq, double beta);
  /// Throws DomainError unless n alpha^2 + gamma^2 = 1 (1e-12), alpha, gamma >= 0, beta >= 0.
  void validate(int n) const;
};

/// n (1 + beta^2), the top eigenvalue of the Gram matrix n I + beta^2 J of
/// the measurement vectors of one coset.
double povm_normalisation(int n, double beta);

struct CosetQuantumStrategy {
  CosetStrategyParams params;
  double mu = 0.0;
  Vector schmidt;
  /// measured[c][j] = |w~><w~| / mu for element j of coset c (same for both players).
  std::vector<std::vector<Matrix>> measured;
  /// I - sum_j measured[c][j]; its outcome is replaced by a uniform position.
  std::vector<Matrix> remainder;

  /// n-outcome POVMs with the remainder spread evenly: E_j = M_j + R / n.
  QuantumStrategy folded() const;
};

/// Explicit matrices; needs n <= 8.
CosetQuantumStrategy build_coset_quantum(const CosetInstance& inst, const CosetStrategyParams& params);

/// Probability that one player lands on the remainder outcome.
double remainder_probability(int n, const CosetStrategyParams& params);

enum class EvalMode { exact, reduced, montecarlo };
std::string to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& name);

struct CosetValueOptions {
  std::size_t samples = 100'000;
  std::uint64_t seed = 0;
};

/// Entangled value of the tunable strategy, including the uniform-output
/// remainder branches.
///   exact:      generic evaluator on coset_as_game (n <= 8)
///   reduced:    average over difference cosets z + H of the conditional
///               value, which depends only on that coset (n <= 64)
///   montecarlo: random difference cosets, three-standard-error half-width
ValueReport coset_quantum_value(const CosetInstance& inst, const CosetStrategyParams& params, EvalMode mode,
                                const CosetValueOptions& options = {});

/// Conditional value for input pairs whose XOR lies in the coset with the given index.
double difference_coset_value(const CosetInstance& inst, const CosetStrategyParams& params, std::uint64_t coset);

/// Reduced-mode value computed by enumerating every difference coset; for
/// cross-checking the class-counted path. Refuses above 2^20 cosets.
double coset_quantum_value_enumerated(const CosetInstance& inst, const CosetStrategyParams& params);

struct ParamGrid {
  std::vector<double> betas;
  std::vector<double> gamma_sqs;
};

/// beta in {0.25, 0.5, ..., 3}, gamma^2 in {0.05, 0.10, ..., 0.95}; contains the defaults.
ParamGrid default_param_grid();

struct OptimizedParams {
  CosetStrategyParams params;
  ValueReport report;
};

/// Reduced-mode scan over the grid (betas outer, gamma_sqs inner); the first
/// maximum wins.
OptimizedParams optimize_coset_params(const CosetInstance& inst, const ParamGrid& grid);

}  // namespace bellgames::coset
