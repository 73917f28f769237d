#include "bellgames/maxent/maxent.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "bellgames/errors.hpp"
#include "bellgames/numerics/entropy.hpp"
#include "bellgames/numerics/parallel.hpp"

namespace bellgames::maxent {
namespace {

constexpr double kLinkTolerance = 1e-10;
constexpr double kEntropyTolerance = 1e-9;
constexpr double kEigenSlack = 1e-12;

/// (n / 2^n) = 1 / number of cosets.
double coset_weight(const CosetInstance& inst) { return 1.0 / static_cast<double>(inst.coset_count()); }

void require_matching(const FourierOps& a, const FourierOps& b) {
  if (a.n != b.n || a.dimension != b.dimension || a.ops.size() != b.ops.size())
    throw DimensionError("Fourier operator families have mismatched n or dimension");
}

}  // namespace

PovmFamily::PovmFamily(CosetInstance instance, std::vector<std::vector<Matrix>> by_coset)
    : instance_(std::move(instance)), by_coset_(std::move(by_coset)) {
  if (by_coset_.size() != instance_.coset_count())
    throw ValidationError("POVM family needs one POVM per coset (" + std::to_string(instance_.coset_count()) + ")");
  dimension_ = by_coset_.front().empty() ? 0 : by_coset_.front().front().rows();
  if (dimension_ < 1) throw DimensionError("POVM family has empty matrices");
  for (const auto& povm : by_coset_) {
    if (static_cast<int>(povm.size()) != instance_.n())
      throw ValidationError("each coset POVM needs exactly n elements");
    for (const auto& e : povm)
      if (e.rows() != dimension_ || e.cols() != dimension_) throw DimensionError("POVM family dimension mismatch");
  }
}

const Matrix& PovmFamily::element(std::uint64_t coset, int position) const {
  return by_coset_.at(coset).at(static_cast<std::size_t>(position));
}

const Matrix& PovmFamily::element(const BitString& a) const {
  return element(instance_.coset_index(a), instance_.position_in_coset(a));
}

double PovmFamily::completeness_defect() const {
  double defect = 0.0;
  for (const auto& povm : by_coset_) {
    Matrix total = Matrix::Zero(dimension_, dimension_);
    for (const auto& e : povm) total += e;
    defect = std::max(defect, (total - Matrix::Identity(dimension_, dimension_)).cwiseAbs().maxCoeff());
  }
  return defect;
}

bool PovmFamily::has_uniform_marginals(double tol) const {
  const double target = static_cast<double>(dimension_) / n();
  for (const auto& povm : by_coset_)
    for (const auto& e : povm)
      if (std::abs(e.trace() - target) > tol) return false;
  return true;
}

PovmFamily random_projector_family(const CosetInstance& inst, int m, const RngStream& stream) {
  if (m < 1) throw DomainError("projector rank m must be >= 1");
  const int n = inst.n();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * m;
  std::vector<std::vector<Matrix>> by_coset;
  by_coset.reserve(inst.coset_count());
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c) {
    RngStream rng = stream.child(c);
    const Matrix q = random_orthogonal(static_cast<std::size_t>(dim), rng);
    std::vector<Matrix> povm;
    for (int j = 0; j < n; ++j) {
      const auto block = q.middleCols(static_cast<Eigen::Index>(j) * m, m);
      povm.push_back(symmetrized(block * block.transpose()));
    }
    by_coset.push_back(std::move(povm));
  }
  return PovmFamily(inst, std::move(by_coset));
}

MaxEntStrategy random_projector_strategy(int n, int m, const RngStream& stream) {
  const CosetInstance inst(n);
  return MaxEntStrategy{random_projector_family(inst, m, stream.child(StreamTag::alice)),
                        random_projector_family(inst, m, stream.child(StreamTag::bob))};
}

QuantumStrategy as_quantum_strategy(const MaxEntStrategy& strategy) {
  QuantumStrategy q;
  const Eigen::Index dim = strategy.alice.dimension();
  q.schmidt = Vector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  q.alice_povms = strategy.alice.by_coset();
  q.bob_povms = strategy.bob.by_coset();
  return q;
}

MaxEntStrategy to_maxent_strategy(const CosetInstance& inst, const coset::CosetQuantumStrategy& strategy) {
  const QuantumStrategy folded = strategy.folded();
  return MaxEntStrategy{PovmFamily(inst, folded.alice_povms), PovmFamily(inst, folded.bob_povms)};
}

MaxEntStrategy randomize_marginals(const MaxEntStrategy& strategy) {
  auto lift = [](const PovmFamily& side) {
    const int n = side.n();
    const Eigen::Index d = side.dimension();
    std::vector<std::vector<Matrix>> by_coset;
    for (const auto& povm : side.by_coset()) {
      std::vector<Matrix> lifted;
      for (int j = 0; j < n; ++j) {
        Matrix e = Matrix::Zero(n * d, n * d);
        // position j shifted by codeword r is position j xor r
        for (int r = 0; r < n; ++r) e.block(r * d, r * d, d, d) = povm[static_cast<std::size_t>(j ^ r)];
        lifted.push_back(std::move(e));
      }
      by_coset.push_back(std::move(lifted));
    }
    return PovmFamily(side.instance(), std::move(by_coset));
  };
  return MaxEntStrategy{lift(strategy.alice), lift(strategy.bob)};
}

FourierOps fourier_ops(const PovmFamily& side) {
  const auto& inst = side.instance();
  const int n = side.n();
  FourierOps out;
  out.n = n;
  out.dimension = side.dimension();
  out.ops.assign(static_cast<std::size_t>(n), Matrix::Zero(out.dimension, out.dimension));
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c)
    for (int j = 0; j < n; ++j) {
      const BitString a = inst.element(c, j);
      const Matrix& e = side.element(c, j);
      for (int i = 0; i < n; ++i) {
        if (a.bit(i))
          out.ops[static_cast<std::size_t>(i)] -= e;
        else
          out.ops[static_cast<std::size_t>(i)] += e;
      }
    }
  const double scale = coset_weight(inst);
  for (auto& op : out.ops) op = symmetrized(op * scale);
  return out;
}

ValueReport maxent_value_direct(const MaxEntStrategy& strategy) {
  const auto& inst = strategy.alice.instance();
  if (strategy.alice.dimension() != strategy.bob.dimension() || strategy.alice.n() != strategy.bob.n())
    throw DimensionError("players use different dimensions");
  const int n = inst.n();
  const double d = static_cast<double>(strategy.alice.dimension());
  const std::uint64_t cosets = inst.coset_count();
  const double total = deterministic_sum(cosets, [&](std::size_t ca) {
    double acc = 0.0;
    for (std::uint64_t cb = 0; cb < cosets; ++cb)
      for (int j = 0; j < n; ++j) {
        const BitString a = inst.element(ca, j);
        const Matrix& e = strategy.alice.element(ca, j);
        for (int l = 0; l < n; ++l) {
          const double payoff = coset::coset_payoff(a, inst.element(cb, l));
          acc += e.cwiseProduct(strategy.bob.element(cb, l)).sum() / d * payoff;
        }
      }
    return acc;
  }, 1);
  const double w = coset_weight(inst);
  return ValueReport::make(total * w * w, "maxent-direct");
}

ValueReport maxent_value_fourier(const FourierOps& alice, const FourierOps& bob) {
  require_matching(alice, bob);
  double acc = 0.0;
  for (std::size_t i = 0; i < alice.ops.size(); ++i)
    acc += alice.ops[i].cwiseProduct(bob.ops[i]).sum() / static_cast<double>(alice.dimension);
  return ValueReport::make(0.5 + acc / (2.0 * alice.n), "maxent-fourier");
}

double cs_bound(const FourierOps& alice, const FourierOps& bob) {
  require_matching(alice, bob);
  double ea = 0.0, fb = 0.0;
  for (std::size_t i = 0; i < alice.ops.size(); ++i) {
    ea += alice.ops[i].squaredNorm() / static_cast<double>(alice.dimension);
    fb += bob.ops[i].squaredNorm() / static_cast<double>(bob.dimension);
  }
  return std::sqrt(ea) * std::sqrt(fb) / (2.0 * alice.n);
}

SigmaEnsemble sigma_hats(const PovmFamily& side) {
  if (!side.has_uniform_marginals())
    throw ValidationError("sigma ensemble needs uniform marginals (Tr E_a = D/n); apply randomize_marginals first");
  const auto& inst = side.instance();
  const int n = side.n();
  const double d = static_cast<double>(side.dimension());
  SigmaEnsemble out;
  out.n = n;
  out.dimension = side.dimension();
  out.sigma_hat.assign(static_cast<std::size_t>(n), Matrix::Zero(out.dimension, out.dimension));
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c)
    for (int j = 0; j < n; ++j) {
      const BitString a = inst.element(c, j);
      const Matrix sigma = side.element(c, j) * (n / d);
      for (int i = 0; i < n; ++i) {
        if (a.bit(i))
          out.sigma_hat[static_cast<std::size_t>(i)] -= sigma;
        else
          out.sigma_hat[static_cast<std::size_t>(i)] += sigma;
      }
    }
  for (auto& s : out.sigma_hat) {
    s = symmetrized(s * std::ldexp(1.0, -n));
    out.eigenvalues.push_back(eigenvalues_sym(s));
  }
  return out;
}

double first_level_weight(const SigmaEnsemble& ensemble) {
  double total = 0.0;
  for (const auto& s : ensemble.sigma_hat) total += static_cast<double>(ensemble.dimension) * s.squaredNorm();
  return total;
}

double weight_bound(int n) { return 2.0 * std::numbers::ln2 * std::log2(static_cast<double>(n)); }

double von_neumann_entropy(const Matrix& rho) {
  const Vector eig = eigenvalues_sym(rho);
  const double trace = eig.sum();
  if (std::abs(trace - 1.0) > kEntropyTolerance)
    throw ValidationError("density matrix trace is " + std::to_string(trace) + ", expected 1");
  if (eig.minCoeff() < -kEntropyTolerance)
    throw ValidationError("density matrix has eigenvalue " + std::to_string(eig.minCoeff()));
  double s = 0.0;
  for (Eigen::Index j = 0; j < eig.size(); ++j)
    if (eig[j] > 0.0) s -= eig[j] * std::log2(eig[j]);
  return s;
}

InfoAudit info_audit(const PovmFamily& side) {
  const SigmaEnsemble ensemble = sigma_hats(side);
  const auto& inst = side.instance();
  const int n = side.n();
  const Eigen::Index dim = side.dimension();
  const double d = static_cast<double>(dim);

  InfoAudit audit;
  Matrix mixture = Matrix::Zero(dim, dim);
  std::vector<Matrix> given_zero(static_cast<std::size_t>(n), Matrix::Zero(dim, dim));
  std::vector<Matrix> given_one(static_cast<std::size_t>(n), Matrix::Zero(dim, dim));
  double entropy_sum = 0.0;
  for (std::uint64_t c = 0; c < inst.coset_count(); ++c)
    for (int j = 0; j < n; ++j) {
      const BitString a = inst.element(c, j);
      const Matrix sigma = side.element(c, j) * (n / d);
      entropy_sum += von_neumann_entropy(sigma);
      mixture += sigma;
      for (int i = 0; i < n; ++i) (a.bit(i) ? given_one : given_zero)[static_cast<std::size_t>(i)] += sigma;
    }
  audit.S_M = von_neumann_entropy(symmetrized(mixture * std::ldexp(1.0, -n)));
  audit.S_M_given_A = std::ldexp(entropy_sum, -n);
  audit.I_AM = audit.S_M - audit.S_M_given_A;

  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    BitAudit bit;
    const double s0 = von_neumann_entropy(symmetrized(given_zero[idx] * std::ldexp(1.0, 1 - n)));
    const double s1 = von_neumann_entropy(symmetrized(given_one[idx] * std::ldexp(1.0, 1 - n)));
    bit.mutual_info_direct = audit.S_M - 0.5 * (s0 + s1);

    double spectral = 0.0;
    for (Eigen::Index j = 0; j < ensemble.eigenvalues[idx].size(); ++j) {
      // round-off can push eigenvalues just past +-1/D
      const double lambda = std::clamp(ensemble.eigenvalues[idx][j], -1.0 / d, 1.0 / d);
      spectral += 1.0 - binary_entropy(std::clamp(0.5 + d * lambda / 2.0, 0.0, 1.0));
    }
    bit.mutual_info_spectral = spectral / d;
    bit.identity_residual = std::abs(bit.mutual_info_direct - bit.mutual_info_spectral);
    bit.quadratic_lower = d * ensemble.sigma_hat[idx].squaredNorm() / (2.0 * std::numbers::ln2);
    bit.quadratic_slack = bit.mutual_info_direct - bit.quadratic_lower;
    audit.bitwise_sum += bit.mutual_info_direct;
    audit.per_bit.push_back(bit);
  }
  return audit;
}

bool ChainReport::all_links_pass() const {
  return fourier_identity && bias_le_cs && cs_le_weights && weights_le_bound && bias_le_final && sigma_eigen_bounds &&
         identity_residuals && quadratic_bounds && info_chain;
}

ChainReport audit_strategy(const MaxEntStrategy& strategy) {
  ChainReport r;
  const int n = strategy.alice.n();
  const double d = static_cast<double>(strategy.alice.dimension());
  const FourierOps e = fourier_ops(strategy.alice);
  const FourierOps f = fourier_ops(strategy.bob);
  r.value_direct = maxent_value_direct(strategy).value;
  r.value_fourier = maxent_value_fourier(e, f).value;
  r.bias = std::abs(r.value_direct - 0.5);
  r.cs_bound = cs_bound(e, f);

  const SigmaEnsemble sa = sigma_hats(strategy.alice);
  const SigmaEnsemble sb = sigma_hats(strategy.bob);
  r.weight_alice = first_level_weight(sa);
  r.weight_bob = first_level_weight(sb);
  r.weight_product_bound = std::sqrt(r.weight_alice * r.weight_bob) / (2.0 * n);
  r.bound_2ln2logn = weight_bound(n);

  r.fourier_identity = std::abs(r.value_direct - r.value_fourier) <= kLinkTolerance;
  r.bias_le_cs = r.bias <= r.cs_bound + kLinkTolerance;
  r.cs_le_weights = r.cs_bound <= r.weight_product_bound + kLinkTolerance;
  r.weights_le_bound = r.weight_alice <= r.bound_2ln2logn + kEigenSlack && r.weight_bob <= r.bound_2ln2logn + kEigenSlack;
  r.bias_le_final = r.bias <= std::numbers::ln2 / n * std::log2(static_cast<double>(n)) + kLinkTolerance;

  r.sigma_eigen_bounds = true;
  for (const auto* ens : {&sa, &sb})
    for (const auto& eig : ens->eigenvalues)
      if (eig.minCoeff() < -1.0 / d - kEigenSlack || eig.maxCoeff() > 1.0 / d + kEigenSlack) r.sigma_eigen_bounds = false;

  r.audit_alice = info_audit(strategy.alice);
  r.audit_bob = info_audit(strategy.bob);
  r.identity_residuals = true;
  r.quadratic_bounds = true;
  r.info_chain = true;
  const double log_n = std::log2(static_cast<double>(n));
  for (const auto* audit : {&r.audit_alice, &r.audit_bob}) {
    for (const auto& bit : audit->per_bit) {
      if (bit.identity_residual > kEntropyTolerance) r.identity_residuals = false;
      if (bit.quadratic_slack < -kEntropyTolerance) r.quadratic_bounds = false;
    }
    if (audit->bitwise_sum > audit->I_AM + kEntropyTolerance || audit->I_AM > log_n + kEntropyTolerance)
      r.info_chain = false;
  }
  return r;
}

}  // namespace bellgames::maxent
