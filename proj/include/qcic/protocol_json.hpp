#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcic/protocol.hpp"

namespace qcic {

// Protocol wire format. Matrices are flat row-major arrays of [re, im]
// pairs. Parse failures name the offending JSON path.

namespace detail_json {

using nlohmann::json;

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key, "missing");
  return *it;
}

inline int to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

inline double to_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

inline std::string to_str(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

inline ComplexMatrix to_matrix(const json& j, int dim, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of [re, im] pairs");
  if (static_cast<int>(j.size()) != dim * dim)
    throw ParseError(path, "expected " + std::to_string(dim * dim) + " entries, got " +
                               std::to_string(j.size()));
  ComplexMatrix m(dim, dim);
  for (size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string epath = path + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2) throw ParseError(epath, "expected [re, im]");
    m.entries[i] = cplx(to_double(e[0], epath + "[0]"), to_double(e[1], epath + "[1]"));
  }
  return m;
}

inline json matrix_to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (const cplx& e : m.entries) out.push_back(json::array({e.real(), e.imag()}));
  return out;
}

}  // namespace detail_json

inline nlohmann::json protocol_to_json(const ProtocolSpec& p) {
  using nlohmann::json;
  json j;
  j["registers"] = json::array();
  for (const auto& f : p.registers.factors)
    j["registers"].push_back({{"name", f.name}, {"dim", f.dim}});
  if (p.x_card != 2) j["x_card"] = p.x_card;
  if (p.y_card != 2) j["y_card"] = p.y_card;

  j["rounds"] = json::array();
  for (int i = 0; i < p.k(); ++i) {
    const Round& r = p.rounds[i];
    json jr;
    jr["sender"] = to_string(r.sender);
    json ju = json::object();
    const int coins = p.coins.round_card(i);
    for (size_t v = 0; v < r.unitaries.size(); ++v)
      for (int c = 0; c < static_cast<int>(r.unitaries[v].size()); ++c) {
        const std::string key =
            coins > 1 ? std::to_string(v) + "," + std::to_string(c) : std::to_string(v);
        ju[key] = detail_json::matrix_to_json(r.unitaries[v][c]);
      }
    jr["unitaries"] = std::move(ju);
    j["rounds"].push_back(std::move(jr));
  }

  json jc;
  switch (p.coins.mode) {
    case CoinMode::None: jc["mode"] = "none"; break;
    case CoinMode::Private: jc["mode"] = "private"; break;
    case CoinMode::OneShot: jc["mode"] = "oneshot"; break;
  }
  if (!p.coins.bits.empty()) jc["bits"] = p.coins.bits;
  if (!p.coins.dists.empty()) jc["dists"] = p.coins.dists;
  j["coin_model"] = std::move(jc);

  j["output_register"] = p.output_register;
  if (!p.output_stage.empty()) {
    json js = json::object();
    for (int y = 0; y < static_cast<int>(p.output_stage.size()); ++y)
      js[std::to_string(y)] = detail_json::matrix_to_json(p.output_stage[y]);
    j["output_stage"] = std::move(js);
  }
  j["memoryless"] = p.memoryless;
  return j;
}

inline ProtocolSpec protocol_from_json(const nlohmann::json& j) {
  using detail_json::member;
  using detail_json::to_int;
  using detail_json::to_str;
  using nlohmann::json;

  ProtocolSpec p;
  const json& regs = member(j, "registers", "$");
  if (!regs.is_array() || regs.empty()) throw ParseError("$.registers", "expected a nonempty array");
  for (size_t i = 0; i < regs.size(); ++i) {
    const std::string path = "$.registers[" + std::to_string(i) + "]";
    RegisterLayout::Factor f;
    f.name = to_str(member(regs[i], "name", path), path + ".name");
    f.dim = to_int(member(regs[i], "dim", path), path + ".dim");
    if (f.dim < 1) throw ParseError(path + ".dim", "dimension must be positive");
    p.registers.factors.push_back(std::move(f));
  }
  if (!p.registers.names_unique()) throw ParseError("$.registers", "duplicate register names");

  if (j.contains("x_card")) p.x_card = to_int(j["x_card"], "$.x_card");
  if (j.contains("y_card")) p.y_card = to_int(j["y_card"], "$.y_card");

  const json& jc = member(j, "coin_model", "$");
  const std::string mode = to_str(member(jc, "mode", "$.coin_model"), "$.coin_model.mode");
  if (mode == "none")
    p.coins.mode = CoinMode::None;
  else if (mode == "private")
    p.coins.mode = CoinMode::Private;
  else if (mode == "oneshot")
    p.coins.mode = CoinMode::OneShot;
  else
    throw ParseError("$.coin_model.mode", "expected none|private|oneshot, got '" + mode + "'");

  const json& rounds = member(j, "rounds", "$");
  if (!rounds.is_array()) throw ParseError("$.rounds", "expected an array");

  if (jc.contains("bits")) {
    const json& bits = jc["bits"];
    if (!bits.is_array()) throw ParseError("$.coin_model.bits", "expected an array");
    for (size_t i = 0; i < bits.size(); ++i)
      p.coins.bits.push_back(
          to_int(bits[i], "$.coin_model.bits[" + std::to_string(i) + "]"));
  } else if (p.coins.mode != CoinMode::None) {
    p.coins.bits.assign(rounds.size(), 0);
  }
  if (jc.contains("dists")) {
    const json& ds = jc["dists"];
    if (!ds.is_array()) throw ParseError("$.coin_model.dists", "expected an array");
    for (size_t i = 0; i < ds.size(); ++i) {
      std::vector<double> d;
      const std::string path = "$.coin_model.dists[" + std::to_string(i) + "]";
      if (!ds[i].is_array()) throw ParseError(path, "expected an array");
      for (size_t v = 0; v < ds[i].size(); ++v)
        d.push_back(detail_json::to_double(ds[i][v], path + "[" + std::to_string(v) + "]"));
      p.coins.dists.push_back(std::move(d));
    }
  }

  const int d = p.registers.total_dim();
  for (size_t i = 0; i < rounds.size(); ++i) {
    const std::string path = "$.rounds[" + std::to_string(i) + "]";
    Round r;
    const std::string sender = to_str(member(rounds[i], "sender", path), path + ".sender");
    if (sender == "alice")
      r.sender = Sender::Alice;
    else if (sender == "bob")
      r.sender = Sender::Bob;
    else
      throw ParseError(path + ".sender", "expected alice|bob, got '" + sender + "'");

    const int inputs = p.input_card(r.sender);
    const int coins = p.coins.round_card(static_cast<int>(i));
    r.unitaries.assign(inputs, std::vector<ComplexMatrix>(coins));
    std::vector<std::vector<bool>> seen(inputs, std::vector<bool>(coins, false));

    const json& ju = member(rounds[i], "unitaries", path);
    if (!ju.is_object()) throw ParseError(path + ".unitaries", "expected an object");
    for (auto it = ju.begin(); it != ju.end(); ++it) {
      const std::string kpath = path + ".unitaries." + it.key();
      int input = 0, coin = 0;
      const std::string& key = it.key();
      const size_t comma = key.find(',');
      try {
        if (comma == std::string::npos) {
          input = std::stoi(key);
        } else {
          input = std::stoi(key.substr(0, comma));
          coin = std::stoi(key.substr(comma + 1));
        }
      } catch (const std::exception&) {
        throw ParseError(kpath, "key must be '<input>' or '<input>,<coin>'");
      }
      if (input < 0 || input >= inputs) throw ParseError(kpath, "input value out of range");
      if (coin < 0 || coin >= coins) throw ParseError(kpath, "coin value out of range");
      r.unitaries[input][coin] = detail_json::to_matrix(*it, d, kpath);
      seen[input][coin] = true;
    }
    for (int v = 0; v < inputs; ++v)
      for (int c = 0; c < coins; ++c)
        if (!seen[v][c])
          throw ParseError(path + ".unitaries",
                           "missing unitary for input " + std::to_string(v) + ", coin " +
                               std::to_string(c));
    p.rounds.push_back(std::move(r));
  }

  p.output_register = to_str(member(j, "output_register", "$"), "$.output_register");
  if (j.contains("output_stage")) {
    const json& js = j["output_stage"];
    if (!js.is_object()) throw ParseError("$.output_stage", "expected an object");
    p.output_stage.assign(p.y_card, ComplexMatrix::identity(d));
    for (auto it = js.begin(); it != js.end(); ++it) {
      const std::string kpath = "$.output_stage." + it.key();
      int y = 0;
      try {
        y = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ParseError(kpath, "key must be a y value");
      }
      if (y < 0 || y >= p.y_card) throw ParseError(kpath, "y value out of range");
      p.output_stage[y] = detail_json::to_matrix(*it, d, kpath);
    }
  }
  const nlohmann::json& jm = member(j, "memoryless", "$");
  if (!jm.is_boolean()) throw ParseError("$.memoryless", "expected a boolean");
  p.memoryless = jm.get<bool>();
  return p;
}

inline ProtocolSpec load_protocol(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw IoError("cannot open " + filename);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(filename, e.what());
  }
  return protocol_from_json(j);
}

inline void save_protocol(const ProtocolSpec& p, const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw IoError("cannot open " + filename + " for writing");
  out << protocol_to_json(p).dump(1) << "\n";
}

}  // namespace qcic
