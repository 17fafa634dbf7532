#pragma once

// Entanglement charge of orthogonal pure ensembles and of bipartite states,
// nonlocality classification, Bell-basis utilities and two-qubit concurrence.
//
// Sign convention: positive charge is information nonlocality, negative
// charge is entanglement nonlocality.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "echarge/qstate.hpp"

namespace echarge {

namespace tol {
inline constexpr double orthogonality = 1e-9;
inline constexpr double exact_width = 1e-9;
inline constexpr double classify_band = 1e-9;
inline constexpr double maximally_entangled = 1e-9;
inline constexpr double bell_diagonal = 1e-10;
}  // namespace tol

enum class NonlocalityClass { Information, Entanglement, Neither, Indeterminate };

inline std::string_view to_string(NonlocalityClass c) {
  switch (c) {
    case NonlocalityClass::Information: return "information";
    case NonlocalityClass::Entanglement: return "entanglement";
    case NonlocalityClass::Neither: return "neither";
    case NonlocalityClass::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

/// Either an exact charge (lower == upper, exact flag set) or an interval.
struct ChargeValue {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;

  static ChargeValue exactly(double v) { return {v, v, true}; }
  static ChargeValue interval(double lo, double hi) { return {lo, hi, false}; }

  double value() const noexcept { return exact ? lower : 0.5 * (lower + upper); }
  double width() const noexcept { return upper - lower; }
};

inline NonlocalityClass classify(const ChargeValue& v) {
  constexpr double band = tol::classify_band;
  if (v.lower > band) return NonlocalityClass::Information;
  if (v.upper < -band) return NonlocalityClass::Entanglement;
  if (v.lower >= -band && v.upper <= band) return NonlocalityClass::Neither;
  return NonlocalityClass::Indeterminate;
}

inline NonlocalityClass classify(double exact_charge) {
  return classify(ChargeValue::exactly(exact_charge));
}

// ---------------------------------------------------------------------------
// Bell basis

/// Bell state |Phi_j>, j = 1..4:
///   Phi1 = (|00> - |11>)/sqrt2   Phi2 = (|00> + |11>)/sqrt2
///   Phi3 = (|01> + |10>)/sqrt2   Phi4 = (|01> - |10>)/sqrt2
inline Ket bell_state(int j) {
  const double h = 1.0 / std::sqrt(2.0);
  CVector v = CVector::Zero(4);
  switch (j) {
    case 1: v(0) = h; v(3) = -h; break;
    case 2: v(0) = h; v(3) = h; break;
    case 3: v(1) = h; v(2) = h; break;
    case 4: v(1) = h; v(2) = -h; break;
    default: invalid_input("bell_state: index must be 1..4");
  }
  return Ket(std::move(v), {2, 2});
}

/// Columns are |Phi_1> .. |Phi_4>.
inline Eigen::Matrix4cd bell_basis() {
  Eigen::Matrix4cd u;
  for (int j = 1; j <= 4; ++j) u.col(j - 1) = bell_state(j).amplitudes();
  return u;
}

inline DensityOperator bell_diagonal_state(const std::array<double, 4>& p) {
  const Eigen::Matrix4cd u = bell_basis();
  Eigen::Vector4cd w(p[0], p[1], p[2], p[3]);
  return DensityOperator(u * w.asDiagonal() * u.adjoint(), {2, 2});
}

struct BellBasisMatrix {
  Eigen::Matrix4cd matrix;
  bool is_bell_diagonal = false;

  double max_offdiagonal() const {
    double m = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) m = std::max(m, std::abs(matrix(i, j)));
    return m;
  }
  std::array<double, 4> diagonal() const {
    return {matrix(0, 0).real(), matrix(1, 1).real(), matrix(2, 2).real(),
            matrix(3, 3).real()};
  }
};

namespace detail {
inline void require_two_qubits(const DensityOperator& rho, const char* what) {
  if (rho.dims() != Dims{2, 2}) invalid_input(std::string(what) + ": dims must be (2,2)");
}
}  // namespace detail

inline BellBasisMatrix to_bell_basis(const DensityOperator& rho) {
  detail::require_two_qubits(rho, "to_bell_basis");
  const Eigen::Matrix4cd u = bell_basis();
  BellBasisMatrix out;
  out.matrix = u.adjoint() * rho.matrix() * u;
  out.is_bell_diagonal = out.max_offdiagonal() < tol::bell_diagonal;
  return out;
}

// ---------------------------------------------------------------------------
// Concurrence

inline double concurrence_bell_diagonal(const std::array<double, 4>& p) {
  double sum = 0.0;
  double pmax = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -1e-12) {
      invalid_input("concurrence_bell_diagonal: negative or non-finite probability");
    }
    sum += v;
    pmax = std::max(pmax, v);
  }
  if (std::abs(sum - 1.0) > tol::probability_sum) {
    invalid_input("concurrence_bell_diagonal: probabilities do not sum to 1");
  }
  return std::max(1.0, 2.0 * pmax) - 1.0;
}

/// Spin-flip concurrence of an arbitrary two-qubit state.
inline double concurrence_general(const DensityOperator& rho) {
  detail::require_two_qubits(rho, "concurrence_general");
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const CMatrix flipped = yy * rho.matrix().conjugate() * yy;

  // sqrt(rho) * flipped * sqrt(rho) is Hermitian PSD with the same spectrum
  // as rho * flipped.
  const auto eig = hermitian_eig(rho.matrix());
  Eigen::VectorXd root(4);
  for (int k = 0; k < 4; ++k) root(k) = std::sqrt(std::max(eig.eigenvalues[k], 0.0));
  const CMatrix sqrt_rho = eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.adjoint();
  CMatrix r = sqrt_rho * flipped * sqrt_rho;
  r = 0.5 * (r + r.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(r, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    numerical_failure("concurrence_general: eigensolver did not converge");
  }
  std::array<double, 4> lambda{};
  for (int k = 0; k < 4; ++k) lambda[k] = std::sqrt(std::max(solver.eigenvalues()(k), 0.0));
  std::sort(lambda.begin(), lambda.end(), std::greater<>{});
  return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Ensembles

struct EnsembleMember {
  double prob;
  Ket state;
};

/// Probability-weighted, mutually orthogonal pure states on A (x) B.
class OrthogonalPureEnsemble {
 public:
  OrthogonalPureEnsemble(std::vector<EnsembleMember> members, std::size_t dim_a,
                         std::size_t dim_b)
      : members_(std::move(members)), dim_a_(dim_a), dim_b_(dim_b) {
    if (dim_a == 0 || dim_b == 0) invalid_input("ensemble: zero subsystem dimension");
    if (members_.empty()) invalid_input("ensemble: no members");
    const auto d = static_cast<Eigen::Index>(dim_a * dim_b);
    double sum = 0.0;
    for (const auto& m : members_) {
      if (m.state.dim() != d) invalid_input("ensemble: member dimension does not match dims");
      if (!std::isfinite(m.prob) || m.prob < 0.0) {
        invalid_input("ensemble: probabilities must be finite and non-negative");
      }
      sum += m.prob;
    }
    if (std::abs(sum - 1.0) > tol::probability_sum) {
      invalid_input("ensemble: probabilities sum to " + std::to_string(sum));
    }
    for (std::size_t i = 0; i < members_.size(); ++i) {
      for (std::size_t j = i + 1; j < members_.size(); ++j) {
        const double overlap = std::abs(
            members_[i].state.amplitudes().dot(members_[j].state.amplitudes()));
        if (overlap >= tol::orthogonality) {
          invalid_input("ensemble: members " + std::to_string(i) + " and " +
                        std::to_string(j) + " are not orthogonal (overlap " +
                        std::to_string(overlap) + ")");
        }
      }
    }
  }

  const std::vector<EnsembleMember>& members() const noexcept { return members_; }
  std::size_t dim_a() const noexcept { return dim_a_; }
  std::size_t dim_b() const noexcept { return dim_b_; }
  Dims dims() const { return {dim_a_, dim_b_}; }

  DensityOperator density() const {
    const auto d = static_cast<Eigen::Index>(dim_a_ * dim_b_);
    CMatrix rho = CMatrix::Zero(d, d);
    for (const auto& m : members_) rho += m.prob * m.state.projector();
    return DensityOperator(std::move(rho), dims());
  }

 private:
  std::vector<EnsembleMember> members_;
  std::size_t dim_a_;
  std::size_t dim_b_;
};

namespace detail {

inline DensityOperator member_reduced_a(const Ket& ket, std::size_t dim_a,
                                        std::size_t dim_b) {
  return partial_trace(
      DensityOperator(ket.projector(), {dim_a, dim_b}), {0});
}

}  // namespace detail

/// Bounds on N for an orthogonal pure ensemble:
///   N <= S(A|B) = S(AB) - S(B)
///   N <= S(B|A) = S(AB) - S(A)
///   N >= sum_X p_X S(rho_X^A) - I(A;B)
struct ChargeBounds {
  double upper_ab = 0.0;
  double upper_ba = 0.0;
  double lower = 0.0;
  std::optional<double> exact;

  double upper() const noexcept { return std::min(upper_ab, upper_ba); }
  ChargeValue value() const {
    return exact ? ChargeValue::exactly(*exact) : ChargeValue::interval(lower, upper());
  }
};

inline ChargeBounds charge_bounds(const OrthogonalPureEnsemble& ens) {
  const DensityOperator rho = ens.density();
  const auto reduced = reduced_states(rho);
  const double s_ab = von_neumann_entropy(rho);
  const double s_a = von_neumann_entropy(reduced.a);
  const double s_b = von_neumann_entropy(reduced.b);

  double mean_member_entropy = 0.0;
  for (const auto& m : ens.members()) {
    if (m.prob == 0.0) continue;
    mean_member_entropy +=
        m.prob * von_neumann_entropy(detail::member_reduced_a(m.state, ens.dim_a(), ens.dim_b()));
  }

  ChargeBounds b;
  b.upper_ab = s_ab - s_b;
  b.upper_ba = s_ab - s_a;
  b.lower = mean_member_entropy - (s_a + s_b - s_ab);
  if (b.upper() - b.lower < tol::exact_width) b.exact = b.upper();
  return b;
}

inline bool is_maximally_entangled(const Ket& ket, std::size_t dim_a, std::size_t dim_b) {
  if (dim_a != dim_b) return false;
  const auto ra = detail::member_reduced_a(ket, dim_a, dim_b);
  const auto d = static_cast<Eigen::Index>(dim_a);
  const CMatrix target = CMatrix::Identity(d, d) / static_cast<double>(dim_a);
  return max_abs(ra.matrix() - target) < tol::maximally_entangled;
}

/// N = S(rho_AB) - log2 d for an ensemble of mutually orthogonal
/// maximally entangled d x d states.
inline double charge_max_entangled_ensemble(const OrthogonalPureEnsemble& ens) {
  if (ens.dim_a() != ens.dim_b()) {
    invalid_input("charge_max_entangled_ensemble: requires d_A == d_B");
  }
  for (std::size_t i = 0; i < ens.members().size(); ++i) {
    if (!is_maximally_entangled(ens.members()[i].state, ens.dim_a(), ens.dim_b())) {
      invalid_input("charge_max_entangled_ensemble: member " + std::to_string(i) +
                    " is not maximally entangled; use charge_bounds");
    }
  }
  return von_neumann_entropy(ens.density()) -
         std::log2(static_cast<double>(ens.dim_a()));
}

// ---------------------------------------------------------------------------
// State charge

struct ChargeResult {
  ChargeValue value;
  NonlocalityClass cls = NonlocalityClass::Neither;
  bool degenerate_spectrum = false;
};

/// Charge of a bipartite state, evaluated on its eigen-ensemble.
///
/// Pure states and states whose eigenbasis can be chosen maximally entangled
/// (including Bell-diagonal two-qubit states with degenerate weights) get an
/// exact value. Otherwise the bounds of the canonical eigen-ensemble are
/// returned, promoted to exact when they pinch. Degenerate spectra of
/// general states are not maximized over; degenerate_spectrum flags them.
inline ChargeResult state_charge(const DensityOperator& rho,
                                 const Bipartition& split = {}) {
  auto [part_a, part_b] = detail::split_parts(split, rho.subsystems());

  // Regroup into a (d_A, d_B) operator with A as the leading factor.
  std::vector<std::size_t> order = part_a;
  order.insert(order.end(), part_b.begin(), part_b.end());
  std::size_t dim_a = 1, dim_b = 1;
  for (auto i : part_a) dim_a *= rho.dims()[i];
  for (auto i : part_b) dim_b *= rho.dims()[i];

  CMatrix regrouped = rho.matrix();
  if (!std::is_sorted(order.begin(), order.end())) {
    const auto& dims = rho.dims();
    const std::size_t n = dims.size();
    const auto d = rho.dim();
    std::vector<std::size_t> perm(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < perm.size(); ++idx) {
      std::vector<std::size_t> digit(n);
      std::size_t rest = idx;
      for (std::size_t i = n; i-- > 0;) {
        digit[i] = rest % dims[i];
        rest /= dims[i];
      }
      std::size_t out = 0;
      for (auto i : order) out = out * dims[i] + digit[i];
      perm[idx] = out;
    }
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        regrouped(static_cast<Eigen::Index>(perm[r]), static_cast<Eigen::Index>(perm[c])) =
            rho.matrix()(r, c);
  }
  const DensityOperator ab(std::move(regrouped), {dim_a, dim_b});

  const auto eig = hermitian_eig(ab.matrix());
  const auto probs = clipped_spectrum(eig.eigenvalues);

  ChargeResult result;
  result.degenerate_spectrum = eig.has_degeneracy();

  auto finish = [&](ChargeValue v) {
    result.value = v;
    result.cls = classify(v);
    return result;
  };

  const auto top = static_cast<std::size_t>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
  if (probs[top] > 1.0 - tol::negative_eigenvalue) {
    const Ket psi = Ket::normalized(eig.vector(top), ab.dims());
    return finish(ChargeValue::exactly(
        -von_neumann_entropy(detail::member_reduced_a(psi, dim_a, dim_b))));
  }

  const double entropy = shannon_entropy_bits(probs);
  if (ab.dims() == Dims{2, 2} && to_bell_basis(ab).is_bell_diagonal) {
    return finish(ChargeValue::exactly(entropy - 1.0));
  }

  if (dim_a == dim_b) {
    bool all_me = true;
    for (std::size_t k = 0; k < probs.size() && all_me; ++k) {
      if (probs[k] <= 1e-12) continue;
      all_me = is_maximally_entangled(Ket::normalized(eig.vector(k), ab.dims()), dim_a, dim_b);
    }
    if (all_me) {
      return finish(ChargeValue::exactly(entropy - std::log2(static_cast<double>(dim_a))));
    }
  }

  std::vector<EnsembleMember> members;
  members.reserve(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    members.push_back({probs[k], Ket::normalized(eig.vector(k), ab.dims())});
  }
  const auto bounds = charge_bounds(OrthogonalPureEnsemble(std::move(members), dim_a, dim_b));
  return finish(bounds.value());
}

}  // namespace echarge
