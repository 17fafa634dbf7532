#pragma once

// Command-line front end: point, sweep, transition, ring and bounds.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 no root.
// CSV floats use 12 significant digits, '.' decimal separator, '\n' rows.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "echarge/charge.hpp"
#include "echarge/ensemble_json.hpp"
#include "echarge/heisenberg_ring.hpp"
#include "echarge/thermal_xyz.hpp"

namespace echarge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitNoRoot = 4;

inline constexpr const char* kSweepHeader =
    "ratio,p1,p2,p3,p4,entropy_bits,charge,concurrence";
inline constexpr const char* kRingHeader =
    "beta_j,p_triplet,p_singlet,entropy_bits,charge,concurrence,"
    "bell_offdiag_residual,triplet_spread,translation_residual";

struct PointCommand {
  ThermalModel model;
  std::optional<double> ratio;  // named models
  std::optional<double> beta;   // xyz
};

struct SweepCommand {
  ThermalModel model;
  double from;
  double to;
  int steps;
  std::string out;
};

struct TransitionCommand {
  ThermalModel model;
  TransitionQuantity quantity;
  double a;
  double b;
};

struct RingCommand {
  int sites;
  std::vector<double> beta_j;  // grid, possibly a single point
  std::string out;
};

struct BoundsCommand {
  std::string input;
};

using Command =
    std::variant<PointCommand, SweepCommand, TransitionCommand, RingCommand, BoundsCommand>;

/// Thrown by parse_and_validate for --help; carries the formatted text.
struct HelpRequested {
  std::string text;
};

inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline void write_sweep_csv(std::ostream& os, const std::vector<ThermalPoint>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.ratio);
    for (double p : r.probs) os << ',' << format_number(p);
    os << ',' << format_number(r.entropy) << ',' << format_number(r.charge) << ','
       << format_number(r.concurrence) << '\n';
  }
}

inline void write_ring_csv(std::ostream& os, const std::vector<PairThermalResult>& rows) {
  os << kRingHeader << '\n';
  for (const auto& r : rows) {
    os << format_number(r.beta_j) << ',' << format_number(r.p_triplet) << ','
       << format_number(r.p_singlet) << ',' << format_number(r.entropy) << ','
       << format_number(r.charge) << ',' << format_number(r.concurrence) << ','
       << format_number(r.bell_offdiag_residual) << ',' << format_number(r.triplet_spread)
       << ',' << format_number(r.translation_residual) << '\n';
  }
}

namespace detail {

struct ModelFlags {
  std::string name;
  double j1 = 0.0, j2 = 0.0, j3 = 0.0;
  CLI::Option* j1_opt = nullptr;
  CLI::Option* j2_opt = nullptr;
  CLI::Option* j3_opt = nullptr;

  void attach(CLI::App* sub) {
    sub->add_option("--model", name, "ising | xx | heisenberg | xyz")
        ->required()
        ->check(CLI::IsMember({"ising", "xx", "heisenberg", "xyz"}));
    j1_opt = sub->add_option("--j1", j1, "J1 coupling (xyz only)");
    j2_opt = sub->add_option("--j2", j2, "J2 coupling (xyz only)");
    j3_opt = sub->add_option("--j3", j3, "J3 coupling (xyz only)");
  }

  ThermalModel resolve() const {
    const bool any_j = j1_opt->count() + j2_opt->count() + j3_opt->count() > 0;
    if (name != "xyz") {
      if (any_j) invalid_input("--j1/--j2/--j3 are only valid with --model xyz");
      if (name == "ising") return ThermalModel::ising();
      if (name == "xx") return ThermalModel::xx();
      return ThermalModel::heisenberg();
    }
    for (auto* o : {j1_opt, j2_opt, j3_opt}) {
      if (o->count() == 0) invalid_input(o->get_name() + " is required with --model xyz");
    }
    return ThermalModel::xyz({j1, j2, j3});
  }
};

inline void require(const CLI::Option* opt) {
  if (opt->count() == 0) invalid_input(opt->get_name() + " is required");
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return kExitInvalidInput;
    case ErrorKind::NumericalFailure: return kExitNumericalFailure;
    case ErrorKind::NoRoot: return kExitNoRoot;
  }
  return kExitNumericalFailure;
}

template <class F>
void with_output(const std::string& path, std::ostream& stdout_stream, F&& write) {
  if (path == "-") {
    write(stdout_stream);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) invalid_input("cannot open output file '" + path + "'");
  write(file);
  if (!file) invalid_input("failed writing output file '" + path + "'");
}

}  // namespace detail

/// Parses arguments (without the program name). Throws Error(InvalidInput)
/// naming the offending flag, or HelpRequested.
inline Command parse_and_validate(const std::vector<std::string>& args) {
  CLI::App app{"Entanglement charge of two-qubit thermal states and Heisenberg rings",
               "echarge"};
  app.require_subcommand(1, 1);

  auto* point = app.add_subcommand("point", "Evaluate one thermal point");
  detail::ModelFlags point_model;
  point_model.attach(point);
  double point_ratio = 0.0, point_beta = 0.0;
  auto* point_ratio_opt = point->add_option("--ratio", point_ratio, "J1/kT (named models)");
  auto* point_beta_opt = point->add_option("--beta", point_beta, "1/kT (xyz)");

  auto* sweep = app.add_subcommand("sweep", "Write a CSV over a uniform J1/kT grid");
  detail::ModelFlags sweep_model;
  sweep_model.attach(sweep);
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 0;
  std::string sweep_out = "-";
  sweep->add_option("--from", sweep_from, "first ratio")->required();
  sweep->add_option("--to", sweep_to, "last ratio")->required();
  sweep->add_option("--steps", sweep_steps, "grid points (>= 2)")->required();
  sweep->add_option("--out", sweep_out, "output CSV path, '-' for stdout");

  auto* transition = app.add_subcommand("transition", "Bisect for a nonlocality transition");
  detail::ModelFlags transition_model;
  transition_model.attach(transition);
  std::string quantity;
  std::vector<double> bracket;
  transition->add_option("--quantity", quantity, "charge-zero | concurrence-zero")
      ->required()
      ->check(CLI::IsMember({"charge-zero", "concurrence-zero"}));
  transition->add_option("--bracket", bracket, "bracket endpoints a b")
      ->required()
      ->expected(2);

  auto* ring = app.add_subcommand("ring", "Adjacent-pair thermal state of a Heisenberg ring");
  int ring_sites = 0;
  double ring_beta = 0.0, ring_from = 0.0, ring_to = 0.0;
  int ring_steps = 0;
  std::string ring_out = "-";
  ring->add_option("--sites", ring_sites, "number of qubits M (3..10)")->required();
  auto* ring_beta_opt = ring->add_option("--beta-j", ring_beta, "single J/kT point");
  auto* ring_from_opt = ring->add_option("--from", ring_from, "first J/kT");
  auto* ring_to_opt = ring->add_option("--to", ring_to, "last J/kT");
  auto* ring_steps_opt = ring->add_option("--steps", ring_steps, "grid points (>= 2)");
  ring->add_option("--out", ring_out, "output CSV path, '-' for stdout");

  auto* bounds = app.add_subcommand("bounds", "Charge bounds of an orthogonal pure ensemble");
  std::string bounds_input;
  bounds->add_option("--input", bounds_input, "ensemble JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested{os.str()};
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw HelpRequested{os.str()};
  } catch (const CLI::ParseError& e) {
    invalid_input(e.what());
  }

  if (point->parsed()) {
    PointCommand cmd{point_model.resolve(), std::nullopt, std::nullopt};
    if (cmd.model.kind() == ModelKind::GeneralXYZ) {
      detail::require(point_beta_opt);
      if (point_ratio_opt->count()) invalid_input("--ratio is not used with --model xyz; pass --beta");
      cmd.beta = point_beta;
    } else {
      detail::require(point_ratio_opt);
      if (point_beta_opt->count()) invalid_input("--beta is only valid with --model xyz");
      cmd.ratio = point_ratio;
    }
    return cmd;
  }
  if (sweep->parsed()) {
    SweepCommand cmd{sweep_model.resolve(), sweep_from, sweep_to, sweep_steps, sweep_out};
    uniform_grid(cmd.from, cmd.to, cmd.steps);
    if (cmd.model.couplings().j1 == 0.0) invalid_input("--j1 must be nonzero for a ratio sweep");
    return cmd;
  }
  if (transition->parsed()) {
    const auto q = quantity == "charge-zero" ? TransitionQuantity::ChargeZero
                                             : TransitionQuantity::ConcurrenceZero;
    TransitionCommand cmd{transition_model.resolve(), q, bracket.at(0), bracket.at(1)};
    if (!std::isfinite(cmd.a) || !std::isfinite(cmd.b) || !(cmd.a < cmd.b)) {
      invalid_input("--bracket must be finite with a < b");
    }
    if (cmd.model.couplings().j1 == 0.0) invalid_input("--j1 must be nonzero for a ratio transition");
    return cmd;
  }
  if (ring->parsed()) {
    validate_ring_sites(ring_sites);
    RingCommand cmd{ring_sites, {}, ring_out};
    const bool range = ring_from_opt->count() || ring_to_opt->count() || ring_steps_opt->count();
    if (ring_beta_opt->count() && range) {
      invalid_input("--beta-j cannot be combined with --from/--to/--steps");
    }
    if (ring_beta_opt->count()) {
      validate_beta_j(ring_beta);
      cmd.beta_j = {ring_beta};
    } else {
      if (!range) invalid_input("--beta-j or --from/--to/--steps is required");
      detail::require(ring_from_opt);
      detail::require(ring_to_opt);
      detail::require(ring_steps_opt);
      cmd.beta_j = uniform_grid(ring_from, ring_to, ring_steps);
      validate_beta_j(cmd.beta_j.front());
      validate_beta_j(cmd.beta_j.back());
    }
    return cmd;
  }
  return BoundsCommand{bounds_input};
}

inline nlohmann::ordered_json point_json(const ThermalPoint& pt) {
  nlohmann::ordered_json j;
  j["ratio"] = pt.ratio;
  j["p1"] = pt.probs[0];
  j["p2"] = pt.probs[1];
  j["p3"] = pt.probs[2];
  j["p4"] = pt.probs[3];
  j["entropy_bits"] = pt.entropy;
  j["charge"] = pt.charge;
  j["concurrence"] = pt.concurrence;
  j["class"] = std::string(to_string(pt.cls()));
  return j;
}

inline nlohmann::ordered_json bounds_json(const ChargeBounds& b) {
  nlohmann::ordered_json j;
  j["upper_ab"] = b.upper_ab;
  j["upper_ba"] = b.upper_ba;
  j["lower"] = b.lower;
  j["exact"] = b.exact ? nlohmann::ordered_json(*b.exact) : nlohmann::ordered_json(nullptr);
  j["class"] = std::string(to_string(classify(b.value())));
  return j;
}

/// Runs a parsed command. Library errors propagate as echarge::Error.
inline void run(const Command& command, std::ostream& out) {
  std::visit(
      [&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, PointCommand>) {
          const auto pt = cmd.beta ? thermal_point_beta(cmd.model.couplings(), *cmd.beta)
                                   : thermal_point(cmd.model, *cmd.ratio);
          out << point_json(pt).dump() << '\n';
        } else if constexpr (std::is_same_v<T, SweepCommand>) {
          const auto rows = sweep(cmd.model, cmd.from, cmd.to, cmd.steps);
          detail::with_output(cmd.out, out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
        } else if constexpr (std::is_same_v<T, TransitionCommand>) {
          const auto res = find_transition(cmd.model, cmd.quantity, cmd.a, cmd.b);
          nlohmann::ordered_json j;
          j["quantity"] = std::string(to_string(res.quantity));
          j["root"] = res.root;
          j["iterations"] = res.iterations;
          out << j.dump() << '\n';
        } else if constexpr (std::is_same_v<T, RingCommand>) {
          const RingSpectrum spectrum(cmd.sites);
          std::vector<PairThermalResult> rows;
          for (double b : cmd.beta_j) rows.push_back(spectrum.pair_result(b));
          detail::with_output(cmd.out, out, [&](std::ostream& os) { write_ring_csv(os, rows); });
        } else {
          out << bounds_json(charge_bounds(load_ensemble(cmd.input))).dump() << '\n';
        }
      },
      command);
}

/// Parse + run with exit-code mapping.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out,
                      std::ostream& err) {
  try {
    run(parse_and_validate(args), out);
    return kExitOk;
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const Error& e) {
    err << "echarge: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return detail::exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "echarge: numerical-failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

}  // namespace echarge::cli
