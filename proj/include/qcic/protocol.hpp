#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qcic/complex_matrix.hpp"
#include "qcic/states.hpp"

namespace qcic {

enum class Sender { Alice, Bob };

inline const char* to_string(Sender s) { return s == Sender::Alice ? "alice" : "bob"; }

// Joint distribution over the classical inputs (x, y), row-major in x.
struct InputDistribution {
  int x_card = 2;
  int y_card = 2;
  std::vector<double> probs;

  InputDistribution() = default;
  InputDistribution(int xc, int yc, std::vector<double> p)
      : x_card(xc), y_card(yc), probs(std::move(p)) {}

  double operator()(int x, int y) const { return probs[static_cast<size_t>(x) * y_card + y]; }

  double marginal_x(int x) const {
    double s = 0.0;
    for (int y = 0; y < y_card; ++y) s += (*this)(x, y);
    return s;
  }

  double marginal_y(int y) const {
    double s = 0.0;
    for (int x = 0; x < x_card; ++x) s += (*this)(x, y);
    return s;
  }

  void check_valid(double tol = 1e-12) const {
    if (static_cast<int>(probs.size()) != x_card * y_card)
      throw InvalidState("input distribution size mismatch");
    double total = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw InvalidState("negative input probability");
      total += p;
    }
    if (std::abs(total - 1.0) > tol) throw InvalidState("input probabilities do not sum to 1");
  }

  static InputDistribution uniform(int xc = 2, int yc = 2) {
    return InputDistribution(xc, yc,
                             std::vector<double>(static_cast<size_t>(xc) * yc, 1.0 / (xc * yc)));
  }
};

// The hard distribution for AND: uniform over {(0,0), (0,1), (1,0)}.
inline InputDistribution u0() {
  return InputDistribution(2, 2, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0});
}

enum class CoinMode { None, Private, OneShot };

// Private classical coins, declared per round for the round's sender.
// One-shot coins are read exactly once, by the round they belong to; the
// per-round representation enforces that structurally.
struct CoinModel {
  CoinMode mode = CoinMode::None;
  std::vector<int> bits;                   // fresh coin bits per round; empty = coin-free
  std::vector<std::vector<double>> dists;  // optional per-round distribution; empty = uniform

  int round_bits(int i) const {
    if (mode == CoinMode::None || bits.empty()) return 0;
    return bits[i];
  }

  int round_card(int i) const { return 1 << round_bits(i); }

  double prob(int i, int value) const {
    if (i < static_cast<int>(dists.size()) && !dists[i].empty()) return dists[i][value];
    return 1.0 / round_card(i);
  }

  int total_bits() const {
    if (mode == CoinMode::None) return 0;
    int t = 0;
    for (int b : bits) t += b;
    return t;
  }
};

struct Round {
  Sender sender = Sender::Alice;
  // unitaries[input][coin], each acting on the full register space
  std::vector<std::vector<ComplexMatrix>> unitaries;
};

// Two-party round-based protocol with classical inputs. The register set is
// fixed for the whole run; memoryless protocols send all of it every round.
// Bob's final processing before measurement (the output stage) is not a
// communication round and never enters the cost accounting.
struct ProtocolSpec {
  RegisterLayout registers;
  int x_card = 2;
  int y_card = 2;
  std::vector<Round> rounds;
  CoinModel coins;
  std::string output_register;
  std::vector<ComplexMatrix> output_stage;  // indexed by y; empty = measure directly
  bool memoryless = true;

  int k() const { return static_cast<int>(rounds.size()); }
  int dim() const { return registers.total_dim(); }

  int input_card(Sender s) const { return s == Sender::Alice ? x_card : y_card; }
};

struct Violation {
  enum Kind {
    NonUnitary,
    AlternationBroken,
    BadShape,
    MissingUnitary,
    BadCoinModel,
    BadOutput,
    CoinSpaceTooLarge,
  };
  Kind kind;
  int round = -1;  // -1 when not tied to a round
  std::string detail;
};

inline std::vector<Violation> validate(const ProtocolSpec& p) {
  std::vector<Violation> out;
  if (!p.registers.valid() || p.registers.size() == 0)
    out.push_back({Violation::BadShape, -1, "register layout invalid or empty"});
  if (p.x_card < 1 || p.y_card < 1)
    out.push_back({Violation::BadShape, -1, "input alphabets must be nonempty"});
  if (!p.rounds.empty() && p.k() % 2 == 0)
    out.push_back({Violation::BadShape, -1, "round count must be odd (Alice sends last)"});
  if (!p.output_register.empty() && p.registers.find(p.output_register) < 0)
    out.push_back({Violation::BadOutput, -1, "output register '" + p.output_register + "' not in layout"});

  if (p.coins.mode != CoinMode::None) {
    if (!p.coins.bits.empty() && static_cast<int>(p.coins.bits.size()) != p.k())
      out.push_back({Violation::BadCoinModel, -1, "coin bit declaration does not cover every round"});
    for (int b : p.coins.bits)
      if (b < 0) out.push_back({Violation::BadCoinModel, -1, "negative coin bit count"});
    if (p.coins.total_bits() > 12)
      out.push_back({Violation::CoinSpaceTooLarge, -1,
                     std::to_string(p.coins.total_bits()) + " coin bits exceed the 12-bit cap"});
    if (!p.coins.dists.empty()) {
      if (static_cast<int>(p.coins.dists.size()) != p.k())
        out.push_back({Violation::BadCoinModel, -1, "coin distributions do not cover every round"});
      for (int i = 0; i < std::min<int>(p.coins.dists.size(), p.k()); ++i) {
        if (p.coins.dists[i].empty()) continue;
        if (static_cast<int>(p.coins.dists[i].size()) != p.coins.round_card(i)) {
          out.push_back({Violation::BadCoinModel, i, "coin distribution arity mismatch"});
          continue;
        }
        double total = 0.0;
        bool neg = false;
        for (double v : p.coins.dists[i]) {
          neg |= v < 0.0;
          total += v;
        }
        if (neg || std::abs(total - 1.0) > 1e-12)
          out.push_back({Violation::BadCoinModel, i, "coin distribution is not a distribution"});
      }
    }
  }

  const int d = p.dim();
  for (int i = 0; i < p.k(); ++i) {
    const Round& r = p.rounds[i];
    const Sender expect = (i % 2 == 0) ? Sender::Alice : Sender::Bob;
    if (r.sender != expect)
      out.push_back({Violation::AlternationBroken, i,
                     std::string("round ") + std::to_string(i + 1) + " sent by " + to_string(r.sender)});
    const int want_inputs = p.input_card(r.sender);
    const int want_coins = p.coins.round_card(i);
    if (static_cast<int>(r.unitaries.size()) != want_inputs) {
      out.push_back({Violation::MissingUnitary, i, "expected one unitary family per input value"});
      continue;
    }
    for (int v = 0; v < want_inputs; ++v) {
      if (static_cast<int>(r.unitaries[v].size()) != want_coins) {
        out.push_back({Violation::MissingUnitary, i,
                       "input " + std::to_string(v) + " lacks a unitary per coin value"});
        continue;
      }
      for (int c = 0; c < want_coins; ++c) {
        const ComplexMatrix& u = r.unitaries[v][c];
        if (u.rows != d || u.cols != d) {
          out.push_back({Violation::BadShape, i,
                         "unitary for input " + std::to_string(v) + " is " + std::to_string(u.rows) +
                             "x" + std::to_string(u.cols) + ", register space is " + std::to_string(d)});
        } else if (!is_unitary(u, 1e-9)) {
          out.push_back({Violation::NonUnitary, i, "input " + std::to_string(v) + ", coin " +
                                                       std::to_string(c)});
        }
      }
    }
  }

  if (!p.output_stage.empty()) {
    if (static_cast<int>(p.output_stage.size()) != p.y_card)
      out.push_back({Violation::BadOutput, -1, "output stage must cover every y value"});
    else
      for (int y = 0; y < p.y_card; ++y) {
        const ComplexMatrix& u = p.output_stage[y];
        if (u.rows != d || u.cols != d)
          out.push_back({Violation::BadOutput, -1, "output stage for y=" + std::to_string(y) +
                                                       " has wrong dimension"});
        else if (!is_unitary(u, 1e-9))
          out.push_back({Violation::BadOutput, -1, "output stage for y=" + std::to_string(y) +
                                                       " is not unitary"});
      }
  }
  return out;
}

inline std::string describe(const std::vector<Violation>& vs) {
  std::string s;
  for (const Violation& v : vs) {
    if (!s.empty()) s += "; ";
    if (v.round >= 0) s += "round " + std::to_string(v.round + 1) + ": ";
    s += v.detail;
  }
  return s;
}

// Exhaustive per-label evolution record. Coins are always enumerated, never
// sampled, so every information quantity computed from a transcript is exact.
struct Transcript {
  struct Label {
    int x = 0;
    int y = 0;
    std::vector<int> coins;  // value per round
    double coin_prob = 1.0;
  };

  RegisterLayout layout;
  int x_card = 2;
  int y_card = 2;
  int output_card = 2;
  std::vector<Label> labels;
  std::vector<std::vector<PureState>> round_states;  // [round][label]
  std::vector<std::vector<double>> output_dist;      // [x * y_card + y][outcome]

  const std::vector<double>& output(int x, int y) const {
    return output_dist[static_cast<size_t>(x) * y_card + y];
  }
};

inline Transcript simulate(const ProtocolSpec& p, const InputDistribution& mu, int dim_cap = 256) {
  const std::vector<Violation> errs = validate(p);
  if (!errs.empty()) throw Error("simulate on invalid protocol: " + describe(errs));
  if (mu.x_card != p.x_card || mu.y_card != p.y_card)
    throw DimensionMismatch("input distribution alphabet does not match protocol");
  mu.check_valid();
  if (p.dim() > dim_cap)
    throw StateBlowup("register space dimension " + std::to_string(p.dim()) + " exceeds cap " +
                      std::to_string(dim_cap));

  const int k = p.k();
  Transcript tr;
  tr.layout = p.registers;
  tr.x_card = p.x_card;
  tr.y_card = p.y_card;

  // enumerate coin assignments
  std::vector<std::vector<int>> coin_values{{}};
  std::vector<double> coin_probs{1.0};
  for (int i = 0; i < k; ++i) {
    const int card = p.coins.round_card(i);
    std::vector<std::vector<int>> nv;
    std::vector<double> np;
    for (size_t a = 0; a < coin_values.size(); ++a)
      for (int c = 0; c < card; ++c) {
        std::vector<int> ext = coin_values[a];
        ext.push_back(c);
        nv.push_back(std::move(ext));
        np.push_back(coin_probs[a] * p.coins.prob(i, c));
      }
    coin_values = std::move(nv);
    coin_probs = std::move(np);
  }

  for (int x = 0; x < p.x_card; ++x)
    for (int y = 0; y < p.y_card; ++y)
      for (size_t a = 0; a < coin_values.size(); ++a)
        tr.labels.push_back({x, y, coin_values[a], coin_probs[a]});

  tr.round_states.assign(k, {});
  for (int i = 0; i < k; ++i) tr.round_states[i].reserve(tr.labels.size());

  const int out_factor = p.output_register.empty() ? -1 : p.registers.index_of(p.output_register);
  tr.output_card = out_factor >= 0 ? p.registers.factors[out_factor].dim : 1;
  tr.output_dist.assign(static_cast<size_t>(p.x_card) * p.y_card,
                        std::vector<double>(tr.output_card, 0.0));

  const std::vector<int> dims = p.registers.dims();
  const std::vector<int> strides_ = radix::strides(dims);

  for (const Transcript::Label& lab : tr.labels) {
    PureState state = PureState::zero(p.registers);
    for (int i = 0; i < k; ++i) {
      const Round& r = p.rounds[i];
      const int input = r.sender == Sender::Alice ? lab.x : lab.y;
      const ComplexMatrix& u = r.unitaries[input][lab.coins[i]];
      state.amplitudes = matvec(u, state.amplitudes);
      tr.round_states[i].push_back(state);
    }
    if (out_factor >= 0) {
      PureState final_state = state;
      if (!p.output_stage.empty())
        final_state.amplitudes = matvec(p.output_stage[lab.y], final_state.amplitudes);
      std::vector<double>& dist = tr.output_dist[static_cast<size_t>(lab.x) * p.y_card + lab.y];
      const int card = dims[out_factor];
      for (int g = 0; g < p.dim(); ++g) {
        const int v = (g / strides_[out_factor]) % card;
        dist[v] += lab.coin_prob * std::norm(final_state.amplitudes[g]);
      }
    }
  }
  return tr;
}

inline std::vector<double> output_distribution(const ProtocolSpec& p, int x, int y,
                                               int dim_cap = 256) {
  const Transcript tr = simulate(p, InputDistribution::uniform(p.x_card, p.y_card), dim_cap);
  return tr.output(x, y);
}

struct ErrorProbability {
  double distributional = 0.0;
  double worst_case = 0.0;
  std::vector<double> per_input;  // [x * y_card + y]
};

// f is a truth table over the input alphabet, row-major in x.
inline ErrorProbability error_probability(const ProtocolSpec& p, const std::vector<int>& f,
                                          const InputDistribution& mu, int dim_cap = 256) {
  if (static_cast<int>(f.size()) != p.x_card * p.y_card)
    throw DimensionMismatch("truth table size does not match input alphabet");
  const Transcript tr = simulate(p, mu, dim_cap);
  ErrorProbability out;
  out.per_input.resize(f.size());
  for (int x = 0; x < p.x_card; ++x)
    for (int y = 0; y < p.y_card; ++y) {
      const std::vector<double>& dist = tr.output(x, y);
      const int target = f[static_cast<size_t>(x) * p.y_card + y];
      double err = 1.0;
      if (target >= 0 && target < static_cast<int>(dist.size())) err -= dist[target];
      out.per_input[static_cast<size_t>(x) * p.y_card + y] = err;
      out.distributional += mu(x, y) * err;
      out.worst_case = std::max(out.worst_case, err);
    }
  return out;
}

// Total qubits exchanged: each round of a fixed-register protocol sends the
// whole register space.
inline double qcc(const ProtocolSpec& p) {
  if (p.rounds.empty()) return 0.0;
  return p.k() * std::log2(static_cast<double>(p.dim()));
}

}  // namespace qcic
