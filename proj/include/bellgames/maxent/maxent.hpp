#pragma once

#include <cstdint>
#include <vector>

#include "bellgames/coset/coset_game.hpp"
#include "bellgames/game/game.hpp"
#include "bellgames/numerics/linalg.hpp"
#include "bellgames/numerics/rng.hpp"

/// Strategies for the coset game that share the maximally entangled state
/// D^{-1/2} sum_i |i,i>, and the numerical audit of the first-level Fourier
/// weight bound that limits them.
///
/// Entropies are in bits throughout; the weight bound reads
/// sum_i D Tr(sigma_hat_i^2) <= 2 ln 2 * log2(n).
namespace bellgames::maxent {

using coset::BitString;
using coset::CosetInstance;

/// One player's measurements: for every coset, n PSD D x D matrices (one per
/// coset element, in position order) summing to the identity. Together the
/// cosets assign a matrix E_a to every a in {0,1}^n.
class PovmFamily {
 public:
  /// Throws ValidationError/DimensionError on wrong counts or sizes.
  PovmFamily(CosetInstance instance, std::vector<std::vector<Matrix>> by_coset);

  const CosetInstance& instance() const { return instance_; }
  int n() const { return instance_.n(); }
  Eigen::Index dimension() const { return dimension_; }
  const std::vector<std::vector<Matrix>>& by_coset() const { return by_coset_; }

  const Matrix& element(std::uint64_t coset, int position) const;
  const Matrix& element(const BitString& a) const;

  /// Largest max |sum_j E_j - I| over cosets.
  double completeness_defect() const;
  /// Tr(E_a) = D / n for every a.
  bool has_uniform_marginals(double tol = 1e-9) const;

 private:
  CosetInstance instance_;
  std::vector<std::vector<Matrix>> by_coset_;
  Eigen::Index dimension_ = 0;
};

struct MaxEntStrategy {
  PovmFamily alice;
  PovmFamily bob;
};

/// For each coset an independent random orthogonal basis of R^{nm} split into
/// n rank-m projectors. Alice's coset c uses stream / alice / c (Bob: bob).
PovmFamily random_projector_family(const CosetInstance& inst, int m, const RngStream& stream);
MaxEntStrategy random_projector_strategy(int n, int m, const RngStream& stream);

/// Same strategy read as a general Schmidt-form strategy with uniform weights.
QuantumStrategy as_quantum_strategy(const MaxEntStrategy& strategy);

/// The tunable coset strategy's folded POVMs viewed under the maximally
/// entangled state of dimension n + 1.
MaxEntStrategy to_maxent_strategy(const CosetInstance& inst, const coset::CosetQuantumStrategy& strategy);

/// Shared-randomness shift by a uniform codeword, realised inside the state:
/// dimension becomes n D with E'_a = sum_r |r><r| (x) E_{a + h_r}.
MaxEntStrategy randomize_marginals(const MaxEntStrategy& strategy);

struct FourierOps {
  int n = 0;
  Eigen::Index dimension = 0;
  /// ops[i] = (n / 2^n) (sum_{a_i = 0} E_a - sum_{a_i = 1} E_a)
  std::vector<Matrix> ops;
};

FourierOps fourier_ops(const PovmFamily& side);

/// Average over coset pairs of sum_{a,b} (1/D) Tr(E_a F_b) (1 - d(a, b) / n).
ValueReport maxent_value_direct(const MaxEntStrategy& strategy);
/// 1/2 + (1 / 2n) sum_i (1/D) Tr(E_i F_i).
ValueReport maxent_value_fourier(const FourierOps& alice, const FourierOps& bob);
/// (1 / 2n) (sum_i Tr(E_i^2) / D)^{1/2} (sum_i Tr(F_i^2) / D)^{1/2}.
double cs_bound(const FourierOps& alice, const FourierOps& bob);

struct SigmaEnsemble {
  int n = 0;
  Eigen::Index dimension = 0;
  /// sigma_hat[i] = 2^{-n} (sum_{a_i = 0} sigma_a - sum_{a_i = 1} sigma_a), sigma_a = (n / D) E_a
  std::vector<Matrix> sigma_hat;
  std::vector<Vector> eigenvalues;
};

/// Refuses (ValidationError) unless the family has uniform marginals, since
/// otherwise sigma_a is not a state.
SigmaEnsemble sigma_hats(const PovmFamily& side);

/// sum_i D Tr(sigma_hat_i^2).
double first_level_weight(const SigmaEnsemble& ensemble);

/// 2 ln 2 * log2(n).
double weight_bound(int n);

/// -sum eig log2 eig with 0 log 0 = 0. Throws ValidationError unless rho is
/// symmetric with unit trace (1e-9) and eigenvalues >= -1e-9.
double von_neumann_entropy(const Matrix& rho);

struct BitAudit {
  /// S(M) - (S(M | A_i = 0) + S(M | A_i = 1)) / 2, from the conditional states.
  double mutual_info_direct = 0.0;
  /// (1/D) sum_j (1 - H(1/2 + D lambda_j / 2)) over eigenvalues of sigma_hat_i.
  double mutual_info_spectral = 0.0;
  double identity_residual = 0.0;
  /// D Tr(sigma_hat_i^2) / (2 ln 2).
  double quadratic_lower = 0.0;
  double quadratic_slack = 0.0;
};

struct InfoAudit {
  double S_M = 0.0;
  double S_M_given_A = 0.0;
  double I_AM = 0.0;
  double bitwise_sum = 0.0;
  std::vector<BitAudit> per_bit;
};

/// Entropy bookkeeping for the classical-quantum state 2^{-n} sum_a |a><a| (x) sigma_a.
InfoAudit info_audit(const PovmFamily& side);

/// Every link of the chain for one strategy, each checked separately.
struct ChainReport {
  double value_direct = 0.0;
  double value_fourier = 0.0;
  double bias = 0.0;
  double cs_bound = 0.0;
  double weight_alice = 0.0;
  double weight_bob = 0.0;
  double weight_product_bound = 0.0;  ///< (1 / 2n) sqrt(weight_alice weight_bob)
  double bound_2ln2logn = 0.0;
  InfoAudit audit_alice;
  InfoAudit audit_bob;

  bool fourier_identity = false;
  bool bias_le_cs = false;
  bool cs_le_weights = false;
  bool weights_le_bound = false;
  bool bias_le_final = false;
  bool sigma_eigen_bounds = false;
  bool identity_residuals = false;
  bool quadratic_bounds = false;
  bool info_chain = false;

  bool all_links_pass() const;
};

ChainReport audit_strategy(const MaxEntStrategy& strategy);

}  // namespace bellgames::maxent
