#pragma once

// Heisenberg ring H = J sum_i s_i . s_{i+1 mod M} by exact diagonalization,
// and the thermal state of an adjacent qubit pair.
//
// Thermal quantities depend on J and T only through betaJ = J/kT. Internally
// the Hamiltonian is built with |J| = 1 and the sign of betaJ picks the
// ferromagnetic (betaJ < 0) or antiferromagnetic (betaJ > 0) branch.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "echarge/charge.hpp"
#include "echarge/qstate.hpp"
#include "echarge/thermal_xyz.hpp"

namespace echarge {

inline constexpr int kMinRingSites = 3;
inline constexpr int kMaxRingSites = 10;
inline constexpr double kMaxAbsBetaJ = 700.0;

struct RingModel {
  int sites = 4;
  double beta_j = 0.0;
};

inline void validate_ring_sites(int sites) {
  if (sites < kMinRingSites || sites > kMaxRingSites) {
    invalid_input("ring sites must be in [" + std::to_string(kMinRingSites) + ", " +
                  std::to_string(kMaxRingSites) + "], got " + std::to_string(sites));
  }
}

inline void validate_beta_j(double beta_j) {
  if (!std::isfinite(beta_j) || std::abs(beta_j) > kMaxAbsBetaJ) {
    invalid_input("betaJ must be finite with |betaJ| <= 700");
  }
}

inline void validate(const RingModel& m) {
  validate_ring_sites(m.sites);
  validate_beta_j(m.beta_j);
}

namespace detail {

// Qubit q sits at bit (M - 1 - q).
inline int bond_bit(int sites, int qubit) { return sites - 1 - qubit; }

}  // namespace detail

inline CMatrix ring_hamiltonian(int sites, double coupling = 1.0) {
  validate_ring_sites(sites);
  if (!std::isfinite(coupling)) invalid_input("ring coupling must be finite");
  const std::size_t dim = std::size_t{1} << sites;
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    for (int i = 0; i < sites; ++i) {
      const int bi = detail::bond_bit(sites, i);
      const int bj = detail::bond_bit(sites, (i + 1) % sites);
      const bool same = ((s >> bi) & 1U) == ((s >> bj) & 1U);
      const auto row = static_cast<Eigen::Index>(s);
      h(row, row) += same ? coupling : -coupling;
      if (!same) {
        const std::size_t flipped = s ^ ((std::size_t{1} << bi) | (std::size_t{1} << bj));
        h(static_cast<Eigen::Index>(flipped), row) += 2.0 * coupling;
      }
    }
  }
  return h;
}

inline Dims qubit_dims(int sites) { return Dims(static_cast<std::size_t>(sites), 2); }

/// Thermal state of qubits (0, 1) via the dense Gibbs state of the full ring.
inline DensityOperator adjacent_pair_state(const RingModel& model) {
  validate(model);
  const double sign = model.beta_j < 0.0 ? -1.0 : 1.0;
  const auto rho = gibbs_state(ring_hamiltonian(model.sites, sign),
                               std::abs(model.beta_j), qubit_dims(model.sites));
  return partial_trace(rho, {0, 1});
}

struct WernerParameters {
  double p_triplet = 0.0;
  double p_singlet = 0.0;
  double bell_offdiag_residual = 0.0;
  double triplet_spread = 0.0;
};

inline WernerParameters werner_parameters(const DensityOperator& pair) {
  const auto bell = to_bell_basis(pair);
  const auto d = bell.diagonal();
  WernerParameters w;
  w.p_singlet = d[3];
  w.p_triplet = (d[0] + d[1] + d[2]) / 3.0;
  w.bell_offdiag_residual = bell.max_offdiagonal();
  w.triplet_spread = std::max({d[0], d[1], d[2]}) - std::min({d[0], d[1], d[2]});
  return w;
}

struct PairThermalResult {
  double beta_j = 0.0;
  double p_triplet = 0.0;
  double p_singlet = 0.0;
  double entropy = 0.0;
  double charge = 0.0;
  double concurrence = 0.0;
  double bell_offdiag_residual = 0.0;
  double triplet_spread = 0.0;
  double translation_residual = 0.0;

  NonlocalityClass cls() const { return classify(charge); }
};

namespace detail {

inline PairThermalResult assemble_pair_result(double beta_j, const DensityOperator& pair01,
                                              const DensityOperator& pair12) {
  const auto w = werner_parameters(pair01);
  PairThermalResult r;
  r.beta_j = beta_j;
  r.p_triplet = w.p_triplet;
  r.p_singlet = w.p_singlet;
  r.bell_offdiag_residual = w.bell_offdiag_residual;
  r.triplet_spread = w.triplet_spread;
  r.translation_residual = max_abs(pair01.matrix() - pair12.matrix());
  r.entropy = von_neumann_entropy(pair01);
  // The Werner eigenbasis may be taken as the Bell basis, so N = S - 1.
  r.charge = r.entropy - 1.0;

  auto d = to_bell_basis(pair01).diagonal();
  double sum = 0.0;
  for (double& v : d) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double& v : d) v /= sum;
  r.concurrence = concurrence_bell_diagonal(d);
  return r;
}

}  // namespace detail

inline PairThermalResult ring_pair_charge(const RingModel& model) {
  validate(model);
  const double sign = model.beta_j < 0.0 ? -1.0 : 1.0;
  const auto rho = gibbs_state(ring_hamiltonian(model.sites, sign),
                               std::abs(model.beta_j), qubit_dims(model.sites));
  return detail::assemble_pair_result(model.beta_j, partial_trace(rho, {0, 1}),
                                      partial_trace(rho, {1, 2}));
}

/// Spectrum of the unit-coupling ring with the (0,1) and (1,2) pair
/// reductions of every eigenvector, built sector by sector in total sigma_z.
/// Pair states at any betaJ are then weighted sums of the stored 4x4 blocks.
class RingSpectrum {
 public:
  explicit RingSpectrum(int sites) : sites_(sites) {
    validate_ring_sites(sites);
    const std::size_t dim = std::size_t{1} << sites;
    const std::size_t rest_dim = dim >> 2;

    for (int n_up = 0; n_up <= sites; ++n_up) {
      std::vector<std::uint32_t> states;
      for (std::uint32_t s = 0; s < dim; ++s) {
        if (std::popcount(s) == n_up) states.push_back(s);
      }
      std::vector<std::int64_t> index(dim, -1);
      for (std::size_t k = 0; k < states.size(); ++k) index[states[k]] = static_cast<std::int64_t>(k);

      const auto sd = static_cast<Eigen::Index>(states.size());
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(sd, sd);
      for (Eigen::Index k = 0; k < sd; ++k) {
        const std::uint32_t s = states[static_cast<std::size_t>(k)];
        for (int i = 0; i < sites; ++i) {
          const int bi = detail::bond_bit(sites, i);
          const int bj = detail::bond_bit(sites, (i + 1) % sites);
          const bool same = ((s >> bi) & 1U) == ((s >> bj) & 1U);
          h(k, k) += same ? 1.0 : -1.0;
          if (!same) {
            const std::uint32_t f = s ^ ((1U << bi) | (1U << bj));
            h(index[f], k) += 2.0;
          }
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
      if (solver.info() != Eigen::Success) {
        numerical_failure("RingSpectrum: sector eigensolver did not converge");
      }

      std::vector<std::array<double, 4>> by_rest(rest_dim);
      for (Eigen::Index e = 0; e < sd; ++e) {
        energies_.push_back(solver.eigenvalues()(e));
        const auto v = solver.eigenvectors().col(e);
        pair01_.push_back(reduce(states, v, 0, by_rest));
        pair12_.push_back(reduce(states, v, 1, by_rest));
      }
    }
  }

  int sites() const noexcept { return sites_; }
  const std::vector<double>& energies() const noexcept { return energies_; }

  /// Pair state e^{-betaJ h} reduced to qubits (first, first + 1).
  DensityOperator pair_state(double beta_j, int first) const {
    const auto w = weights(beta_j);
    const auto& blocks = first == 0 ? pair01_ : pair12_;
    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * blocks[k];
    return DensityOperator(acc.cast<cplx>(), {2, 2});
  }

  PairThermalResult pair_result(double beta_j) const {
    validate_beta_j(beta_j);
    return detail::assemble_pair_result(beta_j, pair_state(beta_j, 0), pair_state(beta_j, 1));
  }

 private:
  std::vector<double> weights(double beta_j) const {
    std::vector<double> scaled(energies_.size());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = beta_j * energies_[k];
    return gibbs_probabilities(scaled);
  }

  Eigen::Matrix4d reduce(const std::vector<std::uint32_t>& states,
                         const Eigen::Ref<const Eigen::VectorXd>& v, int first,
                         std::vector<std::array<double, 4>>& by_rest) const {
    const int hi = detail::bond_bit(sites_, first);
    const int lo = hi - 1;
    const std::uint32_t low_mask = (1U << lo) - 1U;
    for (auto& a : by_rest) a = {0.0, 0.0, 0.0, 0.0};
    std::vector<std::uint32_t> touched;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const std::uint32_t s = states[k];
      const std::uint32_t ab = (((s >> hi) & 1U) << 1) | ((s >> lo) & 1U);
      const std::uint32_t rest = ((s >> (hi + 1)) << lo) | (s & low_mask);
      by_rest[rest][ab] = v(static_cast<Eigen::Index>(k));
      touched.push_back(rest);
    }
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (auto rest : touched) {
      const auto& a = by_rest[rest];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) += a[i] * a[j];
    }
    return r;
  }

  int sites_;
  std::vector<double> energies_;
  std::vector<Eigen::Matrix4d> pair01_;
  std::vector<Eigen::Matrix4d> pair12_;
};

/// One spectral decomposition reused across the whole betaJ grid.
inline std::vector<PairThermalResult> ring_sweep(int sites, double beta_j_from,
                                                 double beta_j_to, int steps) {
  validate_ring_sites(sites);
  const auto grid = uniform_grid(beta_j_from, beta_j_to, steps);
  validate_beta_j(grid.front());
  validate_beta_j(grid.back());
  const RingSpectrum spectrum(sites);
  std::vector<PairThermalResult> rows;
  rows.reserve(grid.size());
  for (double b : grid) rows.push_back(spectrum.pair_result(b));
  return rows;
}

}  // namespace echarge
