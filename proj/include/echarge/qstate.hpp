#pragma once

// Dense quantum-state primitives: density operators, kets, partial traces,
// entropies, Hermitian eigendecomposition and Gibbs states.
//
// Tensor ordering: subsystem 0 is the leftmost Kronecker factor and the most
// significant digit of the computational-basis index. For two qubits the
// basis is |00>, |01>, |10>, |11> with index 2*a + b.
//
// All entropies are in bits.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "echarge/error.hpp"

namespace echarge {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double negative_eigenvalue = 1e-9;
inline constexpr double ket_norm = 1e-12;
inline constexpr double degeneracy = 1e-9;
inline constexpr double probability_sum = 1e-10;
}  // namespace tol

inline std::size_t dims_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>{});
}

inline double hermiticity_residual(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace detail {

inline void check_dims(const Dims& dims, Eigen::Index size, const char* what) {
  if (dims.empty()) invalid_input(std::string(what) + ": empty dims");
  for (auto d : dims) {
    if (d == 0) invalid_input(std::string(what) + ": zero subsystem dimension");
  }
  if (dims_product(dims) != static_cast<std::size_t>(size)) {
    invalid_input(std::string(what) + ": dims product " +
                  std::to_string(dims_product(dims)) +
                  " does not match dimension " + std::to_string(size));
  }
}

}  // namespace detail

/// Unit vector on a (possibly multipartite) Hilbert space.
class Ket {
 public:
  Ket(CVector amplitudes, Dims dims)
      : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    detail::check_dims(dims_, amplitudes_.size(), "Ket");
    const double norm = amplitudes_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > tol::ket_norm) {
      invalid_input("Ket: norm " + std::to_string(norm) + " differs from 1");
    }
  }

  static Ket normalized(const CVector& v, Dims dims) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      invalid_input("Ket: cannot normalize a zero or non-finite vector");
    }
    return Ket(v / norm, std::move(dims));
  }

  /// Computational-basis state |index>.
  static Ket basis(std::size_t index, Dims dims) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dims_product(dims)));
    if (index >= static_cast<std::size_t>(v.size())) {
      invalid_input("Ket: basis index out of range");
    }
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return Ket(std::move(v), std::move(dims));
  }

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  const Dims& dims() const noexcept { return dims_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

  CMatrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

 private:
  CVector amplitudes_;
  Dims dims_;
};

/// Hermitian, unit-trace, positive semidefinite matrix with subsystem dims.
///
/// Hermiticity and trace are checked on construction and the stored matrix
/// is symmetrized. Positivity is checked where eigenvalues are already
/// available (entropy evaluation), since it needs a full diagonalization.
class DensityOperator {
 public:
  DensityOperator(CMatrix matrix, Dims dims) : dims_(std::move(dims)) {
    if (matrix.rows() != matrix.cols()) {
      invalid_input("DensityOperator: matrix is not square");
    }
    detail::check_dims(dims_, matrix.rows(), "DensityOperator");
    if (!matrix.allFinite()) invalid_input("DensityOperator: non-finite entry");
    const double herm = hermiticity_residual(matrix);
    if (herm > tol::hermitian) {
      invalid_input("DensityOperator: not Hermitian (residual " +
                    std::to_string(herm) + ")");
    }
    const cplx tr = matrix.trace();
    if (std::abs(tr - 1.0) > tol::trace) {
      invalid_input("DensityOperator: trace " + std::to_string(tr.real()) +
                    " differs from 1");
    }
    matrix_ = 0.5 * (matrix + matrix.adjoint());
  }

  static DensityOperator from_ket(const Ket& ket) {
    return DensityOperator(ket.projector(), ket.dims());
  }

  static DensityOperator maximally_mixed(Dims dims) {
    const auto d = static_cast<Eigen::Index>(dims_product(dims));
    return DensityOperator(CMatrix::Identity(d, d) / static_cast<double>(d),
                           std::move(dims));
  }

  const CMatrix& matrix() const noexcept { return matrix_; }
  const Dims& dims() const noexcept { return dims_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  std::size_t subsystems() const noexcept { return dims_.size(); }

 private:
  CMatrix matrix_;
  Dims dims_;
};

inline DensityOperator tensor_product(const DensityOperator& a,
                                      const DensityOperator& b) {
  const auto da = a.dim();
  const auto db = b.dim();
  CMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityOperator(std::move(out), std::move(dims));
}

/// Eigenpairs of a Hermitian matrix.
///
/// Eigenvalues ascend; members of a degeneracy group may be out of order by
/// less than the grouping tolerance. Each eigenvector has its first
/// nonzero amplitude real and positive, and vectors inside a degeneracy group
/// are ordered lexicographically by (real, imag) amplitudes.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  CMatrix eigenvectors;  // column k pairs with eigenvalues[k]
  std::vector<std::vector<std::size_t>> degeneracy_groups;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  CVector vector(std::size_t k) const {
    return eigenvectors.col(static_cast<Eigen::Index>(k));
  }
  bool has_degeneracy() const noexcept {
    return std::any_of(degeneracy_groups.begin(), degeneracy_groups.end(),
                       [](const auto& g) { return g.size() > 1; });
  }
  CMatrix reconstruct() const {
    Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(
        eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
    return eigenvectors * lambda.asDiagonal() * eigenvectors.adjoint();
  }
};

namespace detail {

inline void fix_phase(Eigen::Ref<CVector> v) {
  const double threshold = 1e-12 * std::max(1.0, v.norm());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > threshold) {
      v *= std::conj(v(i)) / mag;
      v(i) = mag;
      return;
    }
  }
}

inline bool lex_less(const CVector& a, const CVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace detail

inline SpectralDecomposition hermitian_eig(const CMatrix& m) {
  if (m.rows() != m.cols()) invalid_input("hermitian_eig: matrix is not square");
  if (!m.allFinite()) invalid_input("hermitian_eig: non-finite entry");
  const double herm = hermiticity_residual(m);
  if (herm > tol::hermitian) {
    invalid_input("hermitian_eig: not Hermitian (residual " +
                  std::to_string(herm) + ")");
  }
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    numerical_failure("hermitian_eig: eigensolver did not converge");
  }

  const auto n = static_cast<std::size_t>(sym.rows());
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = solver.eigenvectors();
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = solver.eigenvalues()(static_cast<Eigen::Index>(k));
    detail::fix_phase(out.eigenvectors.col(static_cast<Eigen::Index>(k)));
  }
  if (n == 0) return out;

  double scale = 1.0;
  for (double v : out.eigenvalues) scale = std::max(scale, std::abs(v));
  const double gap = tol::degeneracy * scale;

  std::vector<std::size_t> current{0};
  for (std::size_t k = 1; k < n; ++k) {
    if (out.eigenvalues[k] - out.eigenvalues[k - 1] < gap) {
      current.push_back(k);
    } else {
      out.degeneracy_groups.push_back(current);
      current = {k};
    }
  }
  out.degeneracy_groups.push_back(current);

  // Deterministic order inside each degenerate group.
  for (const auto& group : out.degeneracy_groups) {
    if (group.size() < 2) continue;
    std::vector<std::pair<double, CVector>> members;
    members.reserve(group.size());
    for (auto k : group) members.emplace_back(out.eigenvalues[k], out.vector(k));
    std::stable_sort(members.begin(), members.end(),
                     [](const auto& a, const auto& b) {
                       return detail::lex_less(a.second, b.second);
                     });
    for (std::size_t i = 0; i < group.size(); ++i) {
      out.eigenvalues[group[i]] = members[i].first;
      out.eigenvectors.col(static_cast<Eigen::Index>(group[i])) =
          members[i].second;
    }
  }
  return out;
}

/// Keeps the listed subsystems (in their original order), tracing out the rest.
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     std::vector<std::size_t> keep) {
  const auto& dims = rho.dims();
  const std::size_t n = dims.size();
  if (keep.empty()) invalid_input("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    invalid_input("partial_trace: duplicate subsystem index");
  }
  if (keep.back() >= n) invalid_input("partial_trace: subsystem index out of range");
  if (keep.size() == n) {
    invalid_input("partial_trace: keep set must be a strict subset");
  }

  std::vector<std::size_t> stride(n);
  std::size_t s = 1;
  for (std::size_t i = n; i-- > 0;) {
    stride[i] = s;
    s *= dims[i];
  }

  std::vector<bool> kept(n, false);
  for (auto k : keep) kept[k] = true;
  std::vector<std::size_t> traced;
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept[i]) traced.push_back(i);
  }

  // Offsets of every multi-index over a subset of subsystems, in row-major
  // order of that subset.
  auto offsets = [&](const std::vector<std::size_t>& subset) {
    std::vector<std::size_t> out{0};
    for (auto sub : subset) {
      std::vector<std::size_t> next;
      next.reserve(out.size() * dims[sub]);
      for (auto base : out) {
        for (std::size_t v = 0; v < dims[sub]; ++v) {
          next.push_back(base + v * stride[sub]);
        }
      }
      out = std::move(next);
    }
    return out;
  };
  const auto keep_off = offsets(keep);
  const auto trace_off = offsets(traced);

  const auto dk = static_cast<Eigen::Index>(keep_off.size());
  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      cplx acc = 0.0;
      for (auto t : trace_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[a] + t),
                 static_cast<Eigen::Index>(keep_off[b] + t));
      }
      out(a, b) = acc;
    }
  }
  Dims out_dims;
  for (auto k : keep) out_dims.push_back(dims[k]);
  return DensityOperator(std::move(out), std::move(out_dims));
}

/// Shannon entropy in bits of a probability vector; 0 log 0 = 0.
inline double shannon_entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

/// Eigenvalues clipped to [0, 1] and renormalized; rejects eigenvalues
/// below -1e-9.
inline std::vector<double> clipped_spectrum(std::span<const double> eigenvalues) {
  std::vector<double> p(eigenvalues.begin(), eigenvalues.end());
  double sum = 0.0;
  for (double& v : p) {
    if (v < -tol::negative_eigenvalue) {
      invalid_input("density operator is not positive semidefinite (eigenvalue " +
                    std::to_string(v) + ")");
    }
    v = std::clamp(v, 0.0, 1.0);
    sum += v;
  }
  if (!(sum > 0.0)) numerical_failure("spectrum sums to zero after clipping");
  for (double& v : p) v /= sum;
  return p;
}

inline std::vector<double> density_spectrum(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix(),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    numerical_failure("eigensolver did not converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return clipped_spectrum(std::span<const double>(ev.data(), ev.size()));
}

inline double von_neumann_entropy(const DensityOperator& rho) {
  const auto p = density_spectrum(rho);
  return std::min(shannon_entropy_bits(p),
                  std::log2(static_cast<double>(rho.dim())));
}

inline std::vector<double> gibbs_probabilities(std::span<const double> scaled_energies) {
  if (scaled_energies.empty()) invalid_input("gibbs_probabilities: no energies");
  for (double e : scaled_energies) {
    if (!std::isfinite(e)) invalid_input("gibbs_probabilities: non-finite energy");
  }
  const double emin = *std::min_element(scaled_energies.begin(), scaled_energies.end());
  std::vector<double> p(scaled_energies.size());
  double z = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = std::exp(-(scaled_energies[j] - emin));
    z += p[j];
  }
  for (double& v : p) v /= z;
  return p;
}

/// e^{-beta H} / Z from an existing decomposition of H.
inline DensityOperator gibbs_state(const SpectralDecomposition& spectrum,
                                   double beta, Dims dims) {
  if (!std::isfinite(beta) || beta < 0.0) {
    invalid_input("gibbs_state: beta must be finite and non-negative");
  }
  std::vector<double> scaled(spectrum.eigenvalues.size());
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    scaled[k] = beta * spectrum.eigenvalues[k];
  }
  const auto p = gibbs_probabilities(scaled);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
      p.data(), static_cast<Eigen::Index>(p.size()));
  CMatrix rho = spectrum.eigenvectors * w.asDiagonal() *
                spectrum.eigenvectors.adjoint();
  return DensityOperator(std::move(rho), std::move(dims));
}

inline DensityOperator gibbs_state(const CMatrix& hamiltonian, double beta,
                                   Dims dims = {}) {
  if (dims.empty()) dims = {static_cast<std::size_t>(hamiltonian.rows())};
  if (!std::isfinite(beta) || beta < 0.0) {
    invalid_input("gibbs_state: beta must be finite and non-negative");
  }
  if (hermiticity_residual(hamiltonian) > tol::hermitian) {
    invalid_input("gibbs_state: Hamiltonian is not Hermitian");
  }
  if (beta == 0.0) return DensityOperator::maximally_mixed(std::move(dims));
  return gibbs_state(hermitian_eig(hamiltonian), beta, std::move(dims));
}

/// Split of a multipartite system into A (listed subsystems) and B (the rest).
struct Bipartition {
  std::vector<std::size_t> part_a{0};
};

namespace detail {

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_parts(const Bipartition& split, std::size_t n) {
  std::vector<std::size_t> a = split.part_a;
  std::sort(a.begin(), a.end());
  if (a.empty() || std::adjacent_find(a.begin(), a.end()) != a.end() ||
      a.back() >= n || a.size() >= n) {
    invalid_input("bipartition must name a nonempty strict subset of subsystems");
  }
  std::vector<std::size_t> b;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(a.begin(), a.end(), i)) b.push_back(i);
  }
  return {a, b};
}

}  // namespace detail

struct ReducedPair {
  DensityOperator a;
  DensityOperator b;
};

inline ReducedPair reduced_states(const DensityOperator& rho,
                                  const Bipartition& split = {}) {
  auto [a, b] = detail::split_parts(split, rho.subsystems());
  return {partial_trace(rho, a), partial_trace(rho, b)};
}

inline double mutual_information(const DensityOperator& rho,
                                 const Bipartition& split = {}) {
  const auto r = reduced_states(rho, split);
  return von_neumann_entropy(r.a) + von_neumann_entropy(r.b) -
         von_neumann_entropy(rho);
}

}  // namespace echarge
