#pragma once

// Thermal states of the two-qubit XYZ Hamiltonian
//   H = J1 sx(x)sx + J2 sy(x)sy + J3 sz(x)sz,
// which is diagonal in the Bell basis. Points are parameterized by the
// dimensionless ratio J1/kT (k = 1).

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "echarge/bisection.hpp"
#include "echarge/charge.hpp"
#include "echarge/qstate.hpp"

namespace echarge {

struct XYZCouplings {
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;
};

enum class ModelKind { Ising, XX, Heisenberg, GeneralXYZ };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Ising: return "ising";
    case ModelKind::XX: return "xx";
    case ModelKind::Heisenberg: return "heisenberg";
    case ModelKind::GeneralXYZ: return "xyz";
  }
  return "unknown";
}

/// Model family plus couplings; the named families fix J2 and J3 from J1.
class ThermalModel {
 public:
  static ThermalModel ising(double j1 = 1.0) { return {ModelKind::Ising, {j1, 0.0, 0.0}}; }
  static ThermalModel xx(double j1 = 1.0) { return {ModelKind::XX, {j1, j1, 0.0}}; }
  static ThermalModel heisenberg(double j1 = 1.0) {
    return {ModelKind::Heisenberg, {j1, j1, j1}};
  }
  static ThermalModel xyz(XYZCouplings c) { return {ModelKind::GeneralXYZ, c}; }

  static ThermalModel of_kind(ModelKind kind, double j1 = 1.0) {
    switch (kind) {
      case ModelKind::Ising: return ising(j1);
      case ModelKind::XX: return xx(j1);
      case ModelKind::Heisenberg: return heisenberg(j1);
      case ModelKind::GeneralXYZ: break;
    }
    invalid_input("of_kind: GeneralXYZ needs explicit couplings");
  }

  ModelKind kind() const noexcept { return kind_; }
  const XYZCouplings& couplings() const noexcept { return c_; }

 private:
  ThermalModel(ModelKind kind, XYZCouplings c) : kind_(kind), c_(c) {
    if (!std::isfinite(c.j1) || !std::isfinite(c.j2) || !std::isfinite(c.j3)) {
      invalid_input("couplings must be finite");
    }
  }

  ModelKind kind_;
  XYZCouplings c_;
};

/// Energies of |Phi_1> .. |Phi_4>.
inline std::array<double, 4> bell_spectrum(const XYZCouplings& c) {
  return {-c.j1 + c.j2 + c.j3, c.j1 - c.j2 + c.j3, c.j1 + c.j2 - c.j3,
          -c.j1 - c.j2 - c.j3};
}

/// Explicit 4x4 matrix in the computational basis.
inline CMatrix xyz_hamiltonian(const XYZCouplings& c) {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  sz << 1, 0, 0, -1;
  auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
  };
  return c.j1 * kron(sx, sx) + c.j2 * kron(sy, sy) + c.j3 * kron(sz, sz);
}

struct ThermalPoint {
  double ratio = 0.0;  // J1/kT
  std::array<double, 4> probs{};
  double entropy = 0.0;
  double charge = 0.0;
  double concurrence = 0.0;

  NonlocalityClass cls() const { return classify(charge); }
};

namespace detail {

inline ThermalPoint thermal_point_from_scaled(double ratio,
                                              const std::array<double, 4>& scaled) {
  const auto p = gibbs_probabilities(scaled);
  ThermalPoint pt;
  pt.ratio = ratio;
  std::copy(p.begin(), p.end(), pt.probs.begin());
  pt.entropy = shannon_entropy_bits(pt.probs);
  // Bell-diagonal eigen-ensemble of maximally entangled states: N = S - 1,
  // also when weights are degenerate.
  pt.charge = pt.entropy - 1.0;
  pt.concurrence = concurrence_bell_diagonal(pt.probs);
  return pt;
}

}  // namespace detail

/// Thermal point at inverse temperature beta for arbitrary couplings.
inline ThermalPoint thermal_point_beta(const XYZCouplings& c, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    invalid_input("thermal_point_beta: beta must be finite and non-negative");
  }
  auto e = bell_spectrum(c);
  for (double& v : e) v *= beta;
  return detail::thermal_point_from_scaled(c.j1 * beta, e);
}

/// Thermal point at ratio = J1/kT.
inline ThermalPoint thermal_point(const ThermalModel& model, double ratio) {
  if (!std::isfinite(ratio)) invalid_input("thermal_point: ratio must be finite");
  const auto& c = model.couplings();
  if (c.j1 == 0.0) {
    invalid_input("thermal_point: ratio J1/kT is undefined for J1 = 0; use thermal_point_beta");
  }
  auto e = bell_spectrum(c);
  for (double& v : e) v *= ratio / c.j1;
  return detail::thermal_point_from_scaled(ratio, e);
}

/// Closed-form Ising charge N(x) = -2p1 log2(2p1) - 2p2 log2(2p2).
inline double ising_charge_closed_form(double x) {
  if (!std::isfinite(x)) invalid_input("ising_charge_closed_form: x must be finite");
  // 2p1 = e^x / (2cosh x), 2p2 = e^-x / (2cosh x), written without overflow.
  const double q1 = 1.0 / (1.0 + std::exp(-2.0 * x));
  const double q2 = 1.0 / (1.0 + std::exp(2.0 * x));
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(q1) + term(q2);
}

/// Inclusive uniform grid, symmetric under negation when from == -to.
inline std::vector<double> uniform_grid(double from, double to, int steps) {
  if (!std::isfinite(from) || !std::isfinite(to)) invalid_input("grid bounds must be finite");
  if (steps < 2) invalid_input("grid needs at least 2 steps");
  if (!(from < to)) invalid_input("grid requires from < to");
  std::vector<double> g(static_cast<std::size_t>(steps));
  const double n = steps - 1;
  for (int i = 0; i < steps; ++i) {
    g[static_cast<std::size_t>(i)] = (from * (n - i) + to * i) / n;
  }
  return g;
}

inline std::vector<ThermalPoint> sweep(const ThermalModel& model, double ratio_from,
                                       double ratio_to, int steps) {
  std::vector<ThermalPoint> rows;
  for (double r : uniform_grid(ratio_from, ratio_to, steps)) {
    rows.push_back(thermal_point(model, r));
  }
  return rows;
}

enum class TransitionQuantity { ChargeZero, ConcurrenceZero };

inline std::string_view to_string(TransitionQuantity q) {
  return q == TransitionQuantity::ChargeZero ? "charge-zero" : "concurrence-zero";
}

struct TransitionResult {
  TransitionQuantity quantity;
  double root;
  int iterations;
};

/// Root of N(ratio), or of the concurrence surrogate 2 max_j p_j - 1, in [a, b].
inline TransitionResult find_transition(const ThermalModel& model,
                                        TransitionQuantity quantity, double a, double b) {
  auto f = [&](double r) {
    const auto pt = thermal_point(model, r);
    if (quantity == TransitionQuantity::ChargeZero) return pt.charge;
    return 2.0 * *std::max_element(pt.probs.begin(), pt.probs.end()) - 1.0;
  };
  const auto res = bisect(f, a, b, 1e-10, 200);
  return {quantity, res.root, res.iterations};
}

}  // namespace echarge
