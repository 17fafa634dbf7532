#pragma once

// Ensemble file format:
//   {"dims": [dA, dB],
//    "members": [{"prob": p, "amplitudes": [[re, im], ...]}, ...]}
// with dA*dB amplitudes per member, ordered with subsystem A as the most
// significant index.

#include <fstream>
#include <string>

#include <json.hpp>

#include "echarge/charge.hpp"

namespace echarge {

inline OrthogonalPureEnsemble ensemble_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { invalid_input("ensemble JSON: " + what); };
  if (!j.is_object()) fail("top level must be an object");
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 2) {
    fail("'dims' must be an array [dA, dB]");
  }
  std::size_t dims[2];
  for (int i = 0; i < 2; ++i) {
    const auto& d = j["dims"][static_cast<std::size_t>(i)];
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      fail("'dims' entries must be positive integers");
    }
    dims[i] = d.get<std::size_t>();
  }
  if (!j.contains("members") || !j["members"].is_array() || j["members"].empty()) {
    fail("'members' must be a nonempty array");
  }
  const std::size_t d = dims[0] * dims[1];

  std::vector<EnsembleMember> members;
  for (std::size_t m = 0; m < j["members"].size(); ++m) {
    const auto& mem = j["members"][m];
    const std::string where = "member " + std::to_string(m);
    if (!mem.is_object()) fail(where + " must be an object");
    if (!mem.contains("prob") || !mem["prob"].is_number()) fail(where + ": 'prob' must be a number");
    if (!mem.contains("amplitudes") || !mem["amplitudes"].is_array()) {
      fail(where + ": 'amplitudes' must be an array");
    }
    const auto& amps = mem["amplitudes"];
    if (amps.size() != d) {
      fail(where + ": expected " + std::to_string(d) + " amplitudes, got " +
           std::to_string(amps.size()));
    }
    CVector v(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      const auto& a = amps[k];
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        fail(where + ": amplitude " + std::to_string(k) + " must be [re, im]");
      }
      v(static_cast<Eigen::Index>(k)) = cplx(a[0].get<double>(), a[1].get<double>());
    }
    members.push_back({mem["prob"].get<double>(), Ket(std::move(v), {dims[0], dims[1]})});
  }
  return OrthogonalPureEnsemble(std::move(members), dims[0], dims[1]);
}

inline OrthogonalPureEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid_input("cannot open ensemble file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    invalid_input("ensemble file '" + path + "' is not valid JSON: " + e.what());
  }
  return ensemble_from_json(j);
}

}  // namespace echarge
