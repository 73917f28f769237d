#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellgames/game/game.hpp"
#include "bellgames/numerics/linalg.hpp"
#include "bellgames/numerics/rng.hpp"

/// The random Gaussian-bases game.
///
/// Each player has n inputs and k + 1 outputs. Every input x of Alice carries
/// k independent standard Gaussian vectors u[x][0..k-1] in R^k (Bob: v[y][b]).
/// Output index k is the pass output. Outputs (a, b) below k win with
/// probability 1/2 + delta <u[x][a], v[y][b]>; a pass by either player wins
/// with probability exactly 1/2.
namespace bellgames::jp {

enum class DeltaPolicy {
  /// delta = c / sqrt(k ln n); the game may be ill defined for unlucky draws.
  fixed_c,
  /// delta = min(c / sqrt(k ln n), 1 / (2 max |<u, v>|)); always well defined.
  adaptive,
};

std::string to_string(DeltaPolicy policy);
DeltaPolicy delta_policy_from_string(const std::string& name);

inline constexpr double kDefaultC = 0.125;

struct JpInstance {
  int n = 0;
  int k = 0;
  double c = kDefaultC;
  double delta = 0.0;
  /// c / sqrt(k ln n), the value the fixed-c policy uses (infinite for n = 1).
  double delta_formula = 0.0;
  DeltaPolicy policy = DeltaPolicy::adaptive;
  std::uint64_t root_seed = 0;
  std::vector<std::uint64_t> stream_path;
  std::vector<std::vector<Vector>> u;  ///< u[x][a], x < n, a < k
  std::vector<std::vector<Vector>> v;  ///< v[y][b]

  int pass() const { return k; }
  int outputs() const { return k + 1; }
};

double delta_formula(int n, int k, double c);

/// Samples a fresh instance. Vector u[x][a] comes from the substream
/// stream / alice / x / a (Bob: stream / bob / y / b).
/// Requires sqrt(k) <= n <= 2^k and c > 0; fixed_c additionally needs n >= 2.
JpInstance build_jp(int n, int k, double c, DeltaPolicy policy, const RngStream& stream);

/// Largest |<u[x][a], v[y][b]>| over all n^2 k^2 pairs.
double max_abs_inner(const JpInstance& inst);

double jp_payoff(const JpInstance& inst, int x, int y, int a, int b);

struct WellDefined {
  bool ok = false;
  double max_abs = 0.0;  ///< max delta |<u, v>|
};
WellDefined jp_well_defined(const JpInstance& inst);

/// Dense (k+1)-output game. Throws ValidationError when the instance is not well defined.
TwoPlayerGame jp_as_game(const JpInstance& inst);

/// Value of a deterministic strategy through the bilinear form
/// 1/2 + delta / n^2 <sum_x u[x][a(x)], sum_y v[y][b(y)]> (passes skipped).
double jp_value_bilinear(const JpInstance& inst, const DeterministicStrategy& strategy);

/// Exact best response of Alice to Bob's map for the bilinear term: with
/// V = sum of Bob's non-pass vectors, a(x) = argmax_a <u[x][a], V> when that
/// maximum is positive, else pass.
DeterministicStrategy jp_best_response_alice(const JpInstance& inst, const DeterministicStrategy& current);
DeterministicStrategy jp_best_response_bob(const JpInstance& inst, const DeterministicStrategy& current);

struct ResponseSearch {
  DeterministicStrategy strategy;
  double value = 0.5;
  int rounds = 0;
  bool converged = false;
};

/// Alternates the two best responses from `start` until neither changes, for at
/// most n (k + 1) + 1 rounds; returns the best strategy visited.
ResponseSearch jp_best_response_search(const JpInstance& inst, DeterministicStrategy start);

/// Each player outputs the vector whose first coordinate is largest.
DeterministicStrategy jp_first_coordinate_strategy(const JpInstance& inst);

/// Instance with the roles of Alice and Bob exchanged.
JpInstance swap_players(const JpInstance& inst);

struct InputCheck {
  double gram_top_eigenvalue = 0.0;  ///< largest eigenvalue of Z Z^T
  double sigma_max = 0.0;            ///< largest singular value of Z
  double remainder_min_eigenvalue = 0.0;
  bool valid = false;
};

struct JpQuantumStrategy {
  QuantumStrategy strategy;
  std::vector<InputCheck> alice_checks;
  std::vector<InputCheck> bob_checks;
  bool valid = false;
  /// "alice:x" or "bob:y" for the first input whose remainder is not PSD.
  std::optional<std::string> offending_input;
};

/// State weights (1/sqrt(2k), ..., 1/sqrt(2k), 1/sqrt(2)); POVM elements
/// (1/10k) |u~><u~| with u~ = (u, 1), plus the remainder as the pass element.
JpQuantumStrategy build_jp_quantum(const JpInstance& inst);

/// Checks only the POVM of one input; avoids building the full strategy.
InputCheck jp_input_check(const JpInstance& inst, bool alice, int input);

/// 1/2 + delta / (100 k^2 n^2) sum_{x,y,a,b} s (s / sqrt(2k) + 1/sqrt(2))^2 with s = <u, v>.
ValueReport jp_quantum_value_closed_form(const JpInstance& inst);

/// Mean over all n^2 k^2 index tuples of s (s / sqrt(2k) + 1/sqrt(2))^2.
double jp_closed_form_term_mean(const JpInstance& inst);

struct ProbeMean {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo mean of s (s / sqrt(2k) + 1/sqrt(2))^2 for s = <u, v> over
/// independent standard Gaussian pairs in R^k. Requires k >= 1, samples >= 100.
ProbeMean jp_expectation_probe(int k, std::size_t samples, const RngStream& stream);

enum class ClassicalMethod { exact, alternating, first_coordinate };
std::string to_string(ClassicalMethod method);
ClassicalMethod classical_method_from_string(const std::string& name);

struct ViolationReport {
  double entangled_bias = 0.0;
  double classical_bias = 0.0;
  /// entangled / classical; empty when the classical bias is zero.
  std::optional<double> ratio;
  bool povms_valid = false;
  ClassicalMethod method = ClassicalMethod::alternating;
};

ViolationReport jp_violation_report(const JpInstance& inst, ClassicalMethod method, int restarts,
                                    const RngStream& stream);

}  // namespace bellgames::jp
