#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qcic/and_protocol.hpp"
#include "qcic/cic.hpp"
#include "qcic/csv.hpp"
#include "qcic/measures.hpp"
#include "qcic/protocol.hpp"

namespace qcic {

// Round-by-round witness of the lower-bound chain on a concrete protocol:
//   a_i: the CIC0 term of round i,
//   b_i: trace distance between the round state for sender inputs 0/1 with
//        the receiver input pinned to 0,
//   delta_i: trace distance between the two output-deciding branches.
struct LowerBoundAudit {
  int k = 0;
  double epsilon = 0.0;                      // worst error over the two AND-separating inputs
  std::array<double, 4> per_input_error{};   // indexed x*2 + y
  double distributional_error = 0.0;         // under u0
  std::vector<double> a, b, delta;           // index 0 = round 1
  double cic0_total = 0.0;
  double cic_u0 = 0.0;
};

enum class ClaimStatus { Pass, Fail, NotApplicable };

inline LowerBoundAudit audit(const ProtocolSpec& p, int dim_cap = 256) {
  if (p.x_card != 2 || p.y_card != 2)
    throw RequiresBinaryInputs("lower-bound audit needs binary inputs");
  if (!p.memoryless) throw RequiresMemoryless("lower-bound audit needs a memoryless protocol");
  if (p.coins.mode != CoinMode::None || p.coins.total_bits() > 0)
    throw RequiresMemoryless("lower-bound audit needs a coin-free protocol");

  const Transcript tr = simulate(p, u0(), dim_cap);
  auto label_of = [&](int x, int y) -> size_t {
    for (size_t i = 0; i < tr.labels.size(); ++i)
      if (tr.labels[i].x == x && tr.labels[i].y == y) return i;
    throw Error("transcript label lookup failed");
  };
  const size_t l00 = label_of(0, 0), l01 = label_of(0, 1), l10 = label_of(1, 0),
               l11 = label_of(1, 1);

  LowerBoundAudit aud;
  aud.k = p.k();
  aud.a.resize(aud.k);
  aud.b.resize(aud.k);
  aud.delta.resize(aud.k);

  const std::vector<std::string> regs = detail_cic::register_names(p);
  for (int i = 0; i < aud.k; ++i) {
    const bool alice = p.rounds[i].sender == Sender::Alice;
    // a_i: receiver input pinned to 0, sender input uniform
    CqEnsemble ens;
    ens.coord_names = {alice ? "x" : "y"};
    ens.coord_cards = {2};
    ens.layout = tr.layout;
    if (alice) {
      ens.branches.push_back({{0}, 0.5, tr.round_states[i][l00]});
      ens.branches.push_back({{1}, 0.5, tr.round_states[i][l10]});
    } else {
      ens.branches.push_back({{0}, 0.5, tr.round_states[i][l00]});
      ens.branches.push_back({{1}, 0.5, tr.round_states[i][l01]});
    }
    aud.a[i] = classical_conditional_mi(ens, {ens.coord_names[0]}, regs, {});

    if (alice) {
      aud.b[i] = trace_distance(tr.round_states[i][l10], tr.round_states[i][l00]);
      aud.delta[i] = trace_distance(tr.round_states[i][l01], tr.round_states[i][l11]);
    } else {
      aud.b[i] = trace_distance(tr.round_states[i][l01], tr.round_states[i][l00]);
      aud.delta[i] = trace_distance(tr.round_states[i][l10], tr.round_states[i][l11]);
    }
    aud.cic0_total += aud.a[i];
  }

  const std::vector<int> f = and_truth_table();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const std::vector<double>& dist = tr.output(x, y);
      const int target = f[static_cast<size_t>(x) * 2 + y];
      aud.per_input_error[static_cast<size_t>(x) * 2 + y] =
          1.0 - (target < static_cast<int>(dist.size()) ? dist[target] : 0.0);
    }
  const InputDistribution mu = u0();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      aud.distributional_error += mu(x, y) * aud.per_input_error[static_cast<size_t>(x) * 2 + y];

  // The two branches whose final trace distance delta_k controls: the inputs
  // with AND = 0 vs AND = 1 entering delta_k = D(psi_01, psi_11).
  aud.epsilon = std::max(aud.per_input_error[0 * 2 + 1], aud.per_input_error[1 * 2 + 1]);

  aud.cic_u0 = cic(p, mu, dim_cap).cic;
  return aud;
}

inline bool check_claim1(const LowerBoundAudit& aud, double tol = 1e-9) {
  return aud.delta[aud.k - 1] >= 1.0 - 2.0 * aud.epsilon - tol;
}

inline bool check_claim2(const LowerBoundAudit& aud, double tol = 1e-9) {
  double sum_b = 0.0;
  for (double v : aud.b) sum_b += v;
  if (aud.delta[aud.k - 1] > 2.0 * sum_b + tol) return false;
  // per-round triangle recursion, with b_0 = delta_0 = 0
  double prev_b = 0.0, prev_delta = 0.0;
  for (int i = 0; i < aud.k; ++i) {
    if (aud.delta[i] > prev_b + aud.b[i] + prev_delta + tol) return false;
    prev_b = aud.b[i];
    prev_delta = aud.delta[i];
  }
  return true;
}

inline ClaimStatus check_claim3(const LowerBoundAudit& aud, double tol = 1e-9) {
  for (double ai : aud.a)
    if (ai > 0.4) return ClaimStatus::NotApplicable;
  double sum_b = 0.0;
  for (double v : aud.b) sum_b += v;
  const double bound =
      2.0 * aud.k * std::sqrt(binary_entropy_inv(std::min(1.0, aud.cic0_total / aud.k)));
  if (sum_b > bound + tol) return ClaimStatus::Fail;
  for (int i = 0; i < aud.k; ++i)
    if (aud.b[i] > 2.0 * std::sqrt(binary_entropy_inv(std::min(1.0, aud.a[i]))) + tol)
      return ClaimStatus::Fail;
  return ClaimStatus::Pass;
}

// The two displayed lower bounds, checked separately: cic0 against
// gap^2 log2(k)/(8k) and cic against gap^2 log2(k)/(12k).
inline bool check_proposition_cic0(const LowerBoundAudit& aud, double tol = 1e-9) {
  // vacuous for epsilon >= 1/2 (the statement assumes epsilon < 1/2)
  const double gap = std::max(0.0, 1.0 - 2.0 * aud.epsilon);
  const double logk = std::log2(static_cast<double>(aud.k));
  return aud.cic0_total >= gap * gap * logk / (8.0 * aud.k) - tol;
}

inline bool check_proposition_cic(const LowerBoundAudit& aud, double tol = 1e-9) {
  const double gap = std::max(0.0, 1.0 - 2.0 * aud.epsilon);
  const double logk = std::log2(static_cast<double>(aud.k));
  return aud.cic_u0 >= gap * gap * logk / (12.0 * aud.k) - tol;
}

inline bool check_proposition(const LowerBoundAudit& aud, double tol = 1e-9) {
  return check_proposition_cic0(aud, tol) && check_proposition_cic(aud, tol);
}

// Midpoint concavity of f(x) = 2 sqrt(h2^{-1}(x)) on [0, 0.4], checked on a
// 20 x 20 grid of argument pairs.
inline bool check_concavity(double tol = 1e-9) {
  auto f = [](double x) { return 2.0 * std::sqrt(binary_entropy_inv(x)); };
  const int n = 20;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = 0.4 * i / (n - 1);
      const double y = 0.4 * j / (n - 1);
      if (f(0.5 * (x + y)) < 0.5 * (f(x) + f(y)) - tol) return false;
    }
  return true;
}

// sum h2(x_i) <= 3 S |log2(2n/S)| with S = sum x_i; the S = 0 case is 0 <= 0.
inline bool check_entropy_lemma(const std::vector<double>& xs, double tol = 1e-9) {
  double s = 0.0;
  for (double x : xs) {
    if (x < 0.0 || x > 1.0) throw OutOfRange("entropy lemma inputs must lie in [0,1]");
    s += x;
  }
  if (s == 0.0) return true;
  double h = 0.0;
  for (double x : xs) h += binary_entropy(x);
  const double bound = 3.0 * s * std::abs(std::log2(2.0 * xs.size() / s));
  return h <= bound + tol;
}

inline const char* to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::Pass: return "pass";
    case ClaimStatus::Fail: return "fail";
    default: return "na";
  }
}

// All applicable claims pass (NotApplicable is not a failure).
inline bool audit_passes(const LowerBoundAudit& aud, double tol = 1e-9) {
  return check_claim1(aud, tol) && check_claim2(aud, tol) &&
         check_claim3(aud, tol) != ClaimStatus::Fail && check_proposition(aud, tol);
}

inline std::string audit_to_csv(const LowerBoundAudit& aud, double tol = 1e-9) {
  CsvBuilder csv;
  csv.row({"i", "a_i", "b_i", "delta_i"});
  for (int i = 0; i < aud.k; ++i)
    csv.row({std::to_string(i + 1), format_g17(aud.a[i]), format_g17(aud.b[i]),
             format_g17(aud.delta[i])});
  csv.row({"claim1", check_claim1(aud, tol) ? "pass" : "fail"});
  csv.row({"claim2", check_claim2(aud, tol) ? "pass" : "fail"});
  csv.row({"claim3", to_string(check_claim3(aud, tol))});
  csv.row({"proposition", check_proposition(aud, tol) ? "pass" : "fail"});
  csv.row({"proposition_cic0_bound", check_proposition_cic0(aud, tol) ? "pass" : "fail"});
  csv.row({"proposition_cic_bound", check_proposition_cic(aud, tol) ? "pass" : "fail"});
  csv.row({"epsilon", format_g17(aud.epsilon)});
  csv.row({"epsilon_distributional", format_g17(aud.distributional_error)});
  csv.row({"cic0", format_g17(aud.cic0_total)});
  csv.row({"cic_u0", format_g17(aud.cic_u0)});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      csv.row({"error_" + std::to_string(x) + std::to_string(y),
               format_g17(aud.per_input_error[static_cast<size_t>(x) * 2 + y])});
  return csv.text;
}

}  // namespace qcic
