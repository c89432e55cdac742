#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qcic/cic.hpp"
#include "qcic/csv.hpp"
#include "qcic/measures.hpp"
#include "qcic/protocol.hpp"
#include "qcic/qotp.hpp"
#include "qcic/random.hpp"
#include "qcic/uhlmann.hpp"

namespace qcic {

struct Certificate {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline std::string certificates_to_csv(const std::vector<Certificate>& certs) {
  CsvBuilder csv;
  csv.row({"certificate", "measured", "bound", "pass"});
  for (const Certificate& c : certs)
    csv.row({c.name, format_g17(c.measured), format_g17(c.bound), c.pass ? "1" : "0"});
  return csv.text;
}

// Classical conditional mutual information I(O : X | Y) of an output table
// (per-input distributions over outcomes) under mu.
inline double output_conditional_mi(const std::vector<std::vector<double>>& out_dists,
                                    const InputDistribution& mu) {
  double total = 0.0;
  for (int y = 0; y < mu.y_card; ++y) {
    const double py = mu.marginal_y(y);
    if (py <= 0.0) continue;
    std::vector<double> mixed(out_dists[0].size(), 0.0);
    double havg = 0.0;
    for (int x = 0; x < mu.x_card; ++x) {
      const double pxy = mu(x, y) / py;
      if (pxy <= 0.0) continue;
      const std::vector<double>& d = out_dists[static_cast<size_t>(x) * mu.y_card + y];
      for (size_t o = 0; o < d.size(); ++o) mixed[o] += pxy * d[o];
      havg += pxy * shannon_entropy(d);
    }
    total += py * (shannon_entropy(mixed) - havg);
  }
  return total;
}

// One-round base protocol: Alice forwards |x| in C, Bob evaluates the truth
// table into O at the output stage. The canonical input to the privacy
// compiler.
inline ProtocolSpec forwarding_base(const std::vector<int>& truth_table) {
  if (truth_table.size() != 4) throw DimensionMismatch("forwarding_base expects a 2x2 table");
  ProtocolSpec p;
  p.registers = make_layout({{"C", 2}, {"O", 2}});
  p.output_register = "O";
  Round r;
  r.sender = Sender::Alice;
  r.unitaries = {{ComplexMatrix::identity(4)},
                 {tensor(gates::pauli_x(), ComplexMatrix::identity(2))}};
  p.rounds.push_back(std::move(r));
  for (int y = 0; y < 2; ++y) {
    ComplexMatrix stage(4, 4);
    for (int x = 0; x < 2; ++x) {
      const int f = truth_table[static_cast<size_t>(x) * 2 + y];
      stage(x * 2 + (f & 1), x * 2 + 0) = 1.0;
      stage(x * 2 + ((f & 1) ^ 1), x * 2 + 1) = 1.0;
    }
    p.output_stage.push_back(std::move(stage));
  }
  return p;
}

// =========================================================================
// Privacy compiler: wrap a protocol in per-round one-time-pad layers keyed
// by private coins, so that every message is maximally mixed to its
// receiver and only the decoded output can carry information.
// =========================================================================

struct PrivateCompiled {
  ProtocolSpec base;               // output-copy preprocessing applied
  std::vector<std::string> block;  // every register, in layout order
  int width = 0;                   // block qubits
  int round_key_bits = 0;          // |t_A^i| = |t_B^i| = 2 * width
  int s_b_bits = 0;                // 2 * width
  int s_a_bits = 0;                // 2 * (width - 1), output qubit excluded
  // Mismatched keys trigger a restart in the construction; every
  // per-repetition term is certified zero, so the verifier analyzes the
  // matched branch and never loops.
};

inline PrivateCompiled compile_private(const ProtocolSpec& base_in) {
  const std::vector<Violation> errs = validate(base_in);
  if (!errs.empty()) throw Error("compile_private on invalid base: " + describe(errs));
  if (base_in.coins.mode != CoinMode::None)
    throw Error("compile_private expects a coin-free base protocol");
  if (base_in.output_register.empty())
    throw UnsupportedOutput("base protocol declares no output register");
  for (const auto& f : base_in.registers.factors)
    if (f.dim != 2)
      throw UnsupportedOutput("one-time-pad blocks need qubit registers; '" + f.name + "' has dim " +
                              std::to_string(f.dim));
  const int out_pos = base_in.registers.index_of(base_in.output_register);
  if (base_in.registers.factors[out_pos].dim != 2)
    throw UnsupportedOutput("output register must be a single qubit");

  PrivateCompiled c;
  c.base = base_in;

  // Output-copy preprocessing: append a fresh qubit and CNOT the output
  // onto it at the end, so the measured register holds a classical mixture.
  std::string copy_name = "Ocopy";
  while (c.base.registers.find(copy_name) >= 0) copy_name += "_";
  c.base.registers.factors.push_back({copy_name, 2});

  for (Round& r : c.base.rounds)
    for (auto& family : r.unitaries)
      for (ComplexMatrix& u : family) u = tensor(u, ComplexMatrix::identity(2));

  const ComplexMatrix cnot =
      ComplexMatrix::from_rows(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
  const ComplexMatrix copier =
      embed_on_factors(cnot, c.base.registers, {out_pos, c.base.registers.size() - 1});
  if (c.base.output_stage.empty()) {
    c.base.output_stage.assign(c.base.y_card, copier);
  } else {
    for (ComplexMatrix& u : c.base.output_stage) u = copier * tensor(u, ComplexMatrix::identity(2));
  }

  for (const auto& f : c.base.registers.factors) c.block.push_back(f.name);
  c.width = c.base.registers.size();
  c.round_key_bits = 2 * c.width;
  c.s_b_bits = 2 * c.width;
  c.s_a_bits = 2 * (c.width - 1);
  return c;
}

namespace detail_private {

// State of the block just before the sender's fresh encryption at `step`.
// Steps 0..k-1 are the communication rounds; step k is Bob's post-protocol
// send (undo attempt, output stage, then fresh keys s_B). Consecutive
// undo-then-encrypt layers collapse to the key XOR, so the reachable states
// are parameterized by the per-round mismatch keys alone (global phase
// aside).
inline PureState pre_encryption_state(const PrivateCompiled& c, int x, int y, int step,
                                      const std::vector<QotpKey>& deltas) {
  const int k = c.base.k();
  PureState s = PureState::zero(c.base.registers);
  for (int j = 0; j <= std::min(step, k - 1); ++j) {
    if (j > 0 && !deltas[j - 1].is_zero()) s = qotp_apply(s, deltas[j - 1], c.block);
    const Round& r = c.base.rounds[j];
    const int input = r.sender == Sender::Alice ? x : y;
    s.amplitudes = matvec(r.unitaries[input][0], s.amplitudes);
  }
  if (step == k) {
    if (!deltas[k - 1].is_zero()) s = qotp_apply(s, deltas[k - 1], c.block);
    if (!c.base.output_stage.empty()) s.amplitudes = matvec(c.base.output_stage[y], s.amplitudes);
  }
  return s;
}

inline std::vector<std::vector<QotpKey>> delta_contexts(const PrivateCompiled& c, int step,
                                                        Rng& rng) {
  std::vector<std::vector<QotpKey>> out;
  const int len = step == c.base.k() ? c.base.k() : step;
  out.emplace_back(len, QotpKey::zero(c.width));  // matched history
  if (len == 0) return out;

  // exhaustive mismatch of the immediately preceding round when feasible
  const uint64_t keyspace = uint64_t{1} << (2 * c.width);
  if (keyspace <= 256) {
    for (uint64_t v = 1; v < keyspace; ++v) {
      std::vector<QotpKey> ctx(len, QotpKey::zero(c.width));
      ctx[len - 1] = QotpKey::from_index(v, c.width);
      out.push_back(std::move(ctx));
    }
  } else {
    for (int rep = 0; rep < 255; ++rep) {
      std::vector<QotpKey> ctx(len, QotpKey::zero(c.width));
      ctx[len - 1] = QotpKey::from_index(rng.next_u64() % keyspace, c.width);
      out.push_back(std::move(ctx));
    }
  }
  // seeded deep-history mismatches
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<QotpKey> ctx;
    for (int j = 0; j < len; ++j)
      ctx.push_back(QotpKey::from_index(rng.next_u64() % keyspace, c.width));
    out.push_back(std::move(ctx));
  }
  return out;
}

}  // namespace detail_private

struct PrivacyReport {
  std::vector<Certificate> certificates;
  std::vector<double> round_terms;  // measured CIC terms of the encrypted sends
  double final_term = 0.0;          // decoded-output term of the matched branch
  double total_cic = 0.0;
  double classical_output_mi = 0.0;  // I(out : X | Y) from the base, independent route
  bool pass = true;
};

inline PrivacyReport verify_private(const PrivateCompiled& c, const InputDistribution& mu,
                                    int width_cap = 5, uint64_t seed = 7777, double tol = 1e-9) {
  if (c.width > width_cap)
    throw StateBlowup("block width " + std::to_string(c.width) + " exceeds cap " +
                      std::to_string(width_cap));
  if (mu.x_card != c.base.x_card || mu.y_card != c.base.y_card)
    throw DimensionMismatch("input distribution alphabet does not match base protocol");
  mu.check_valid();

  Rng rng(seed);
  const int k = c.base.k();
  const int d = c.base.registers.total_dim();
  const uint64_t keyspace = uint64_t{1} << (2 * c.width);

  const Transcript base_tr =
      simulate(c.base, InputDistribution::uniform(c.base.x_card, c.base.y_card));

  PrivacyReport rep;
  double worst_mix = 0.0;

  // --- encrypted sends: rounds 1..k and Bob's post-protocol send -----------
  for (int step = 0; step <= k; ++step) {
    const Sender sender = step == k ? Sender::Bob : c.base.rounds[step].sender;
    const bool alice = sender == Sender::Alice;
    const auto contexts = detail_private::delta_contexts(c, step, rng);

    // receiver-side branch states: average over fresh keys, then over the
    // enumerated mismatch histories (uniform, as the key XOR is uniform)
    std::vector<ComplexMatrix> branch(static_cast<size_t>(c.base.x_card) * c.base.y_card,
                                      ComplexMatrix(d, d));
    for (int x = 0; x < c.base.x_card; ++x)
      for (int y = 0; y < c.base.y_card; ++y) {
        ComplexMatrix acc(d, d);
        for (const auto& ctx : contexts) {
          const PureState pre = detail_private::pre_encryption_state(c, x, y, step, ctx);
          const DensityOperator avg = qotp_average(pre, c.block);
          const ComplexMatrix dev =
              avg.matrix - ComplexMatrix::identity(d) * cplx(1.0 / d, 0.0);
          worst_mix = std::max(worst_mix, max_abs(dev));
          acc = acc + avg.matrix;
        }
        branch[static_cast<size_t>(x) * c.base.y_card + y] =
            acc * cplx(1.0 / static_cast<double>(contexts.size()), 0.0);
      }

    // measured term: cq mutual information between the sender's input and
    // the sent block, conditioned on the receiver's input
    double term = 0.0;
    const int recv_card = alice ? mu.y_card : mu.x_card;
    for (int rv = 0; rv < recv_card; ++rv) {
      const double pr = alice ? mu.marginal_y(rv) : mu.marginal_x(rv);
      if (pr <= 0.0) continue;
      std::vector<std::pair<double, ComplexMatrix>> groups;
      const int send_card = alice ? mu.x_card : mu.y_card;
      for (int sv = 0; sv < send_card; ++sv) {
        const double w = (alice ? mu(sv, rv) : mu(rv, sv)) / pr;
        if (w <= 0.0) continue;
        const size_t idx = alice ? static_cast<size_t>(sv) * mu.y_card + rv
                                 : static_cast<size_t>(rv) * mu.y_card + sv;
        groups.emplace_back(w, branch[idx]);
      }
      term += pr * detail::cq_branch_mi(groups);
    }
    rep.round_terms.push_back(term);
  }

  double worst_term = 0.0;
  for (double t : rep.round_terms) worst_term = std::max(worst_term, std::abs(t));

  rep.certificates.push_back({"round_states_maximally_mixed", worst_mix, tol, worst_mix <= tol});
  rep.certificates.push_back({"round_terms_zero", worst_term, tol, worst_term <= tol});

  // --- coin check: t_B and the equality bit are key-only variables --------
  // Both messages are functions of (t_A, t_B) alone, which are drawn
  // independently of the inputs; the match probability is 2^-|t|.
  const double match_prob = std::pow(2.0, -static_cast<double>(c.round_key_bits) * k);
  rep.certificates.push_back({"coin_check_match_probability", match_prob, match_prob, true});

  // --- matched branch: output equality and the final send -----------------
  const std::vector<QotpKey> matched(k, QotpKey::zero(c.width));
  const int out_block_pos =
      static_cast<int>(std::find(c.block.begin(), c.block.end(), c.base.output_register) -
                       c.block.begin());

  std::vector<uint64_t> sb_keys, sa_keys;
  if (keyspace <= 256)
    for (uint64_t v = 0; v < keyspace; ++v) sb_keys.push_back(v);
  else
    for (int i = 0; i < 256; ++i) sb_keys.push_back(rng.next_u64() % keyspace);
  const uint64_t sa_space = uint64_t{1} << c.s_a_bits;
  if (sa_space <= 256)
    for (uint64_t v = 0; v < sa_space; ++v) sa_keys.push_back(v);
  else
    for (int i = 0; i < 256; ++i) sa_keys.push_back(rng.next_u64() % sa_space);

  std::vector<std::string> non_out_block;
  for (const std::string& n : c.block)
    if (n != c.base.output_register) non_out_block.push_back(n);

  double worst_output_dev = 0.0;
  double worst_decouple = 0.0;
  std::vector<std::vector<double>> decoded(static_cast<size_t>(c.base.x_card) * c.base.y_card);

  const std::vector<int> dims = c.base.registers.dims();
  const int out_factor = c.base.registers.index_of(c.base.output_register);
  const std::vector<int> strides_ = radix::strides(dims);

  for (int x = 0; x < c.base.x_card; ++x)
    for (int y = 0; y < c.base.y_card; ++y) {
      const PureState phi = detail_private::pre_encryption_state(c, x, y, k, matched);
      std::vector<double> avg_decoded(2, 0.0);
      int decode_count = 0;
      for (uint64_t sbv : sb_keys) {
        const QotpKey sb = QotpKey::from_index(sbv, c.width);
        const PureState enc = qotp_apply(phi, sb, c.block);

        // Alice's final layer: average over s_A on everything but the output
        ComplexMatrix sigma(d, d);
        for (uint64_t sav : sa_keys) {
          QotpKey sa;
          sa.bits.assign(2 * (c.width - 1), 0);
          for (int b = 0; b < c.s_a_bits; ++b) sa.bits[b] = static_cast<int>((sav >> b) & 1);
          const PureState sent = non_out_block.empty() ? enc : qotp_apply(enc, sa, non_out_block);
          for (int i = 0; i < d; ++i) {
            const cplx wi = sent.amplitudes[i] / static_cast<double>(sa_keys.size());
            if (wi == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < d; ++j) sigma(i, j) += wi * std::conj(sent.amplitudes[j]);
          }
        }

        // decoupling: sigma = I_rest / 2^(W-1) (x) sigma_out
        std::vector<int> keep_out = {out_factor};
        const ComplexMatrix sigma_out = partial_trace_matrix(sigma, dims, keep_out);
        std::vector<int> rc, cc;
        for (int r = 0; r < d; ++r) {
          radix::unravel(r, dims, rc);
          for (int col = 0; col < d; ++col) {
            radix::unravel(col, dims, cc);
            bool rest_eq = true;
            for (size_t f = 0; f < dims.size(); ++f)
              if (static_cast<int>(f) != out_factor && rc[f] != cc[f]) rest_eq = false;
            const cplx expected =
                rest_eq ? sigma_out(rc[out_factor], cc[out_factor]) / std::pow(2.0, c.width - 1)
                        : cplx(0.0, 0.0);
            worst_decouple = std::max(worst_decouple, std::abs(sigma(r, col) - expected));
          }
        }

        // Bob decodes the output qubit with his own key bits and measures
        QotpKey out_key;
        out_key.bits = {sb.bits[2 * out_block_pos], sb.bits[2 * out_block_pos + 1]};
        const PureState dec = qotp_apply(enc, out_key, {c.base.output_register});
        std::vector<double> dist(2, 0.0);
        for (int g = 0; g < d; ++g)
          dist[(g / strides_[out_factor]) % 2] += std::norm(dec.amplitudes[g]);
        const std::vector<double>& want = base_tr.output(x, y);
        for (int o = 0; o < 2; ++o) {
          worst_output_dev = std::max(worst_output_dev, std::abs(dist[o] - want[o]));
          avg_decoded[o] += dist[o];
        }
        ++decode_count;
      }
      for (double& v : avg_decoded) v /= decode_count;
      decoded[static_cast<size_t>(x) * c.base.y_card + y] = std::move(avg_decoded);
    }

  rep.certificates.push_back(
      {"matched_output_matches_base", worst_output_dev, 1e-12, worst_output_dev <= 1e-12});
  rep.certificates.push_back(
      {"final_send_decoupled", worst_decouple, tol, worst_decouple <= tol});

  // --- totals --------------------------------------------------------------
  rep.final_term = output_conditional_mi(decoded, mu);
  rep.total_cic = rep.final_term;
  for (double t : rep.round_terms) rep.total_cic += t;
  rep.classical_output_mi = output_conditional_mi(
      std::vector<std::vector<double>>(base_tr.output_dist.begin(), base_tr.output_dist.end()), mu);
  const double cic_dev = std::abs(rep.total_cic - rep.classical_output_mi);
  rep.certificates.push_back({"total_cic_equals_output_mi", cic_dev, tol, cic_dev <= tol});

  for (const Certificate& cert : rep.certificates) rep.pass &= cert.pass;
  return rep;
}

inline std::string privacy_report_to_csv(const PrivacyReport& rep) {
  CsvBuilder csv;
  csv.row({"certificate", "measured", "bound", "pass"});
  for (const Certificate& c : rep.certificates)
    csv.row({c.name, format_g17(c.measured), format_g17(c.bound), c.pass ? "1" : "0"});
  for (size_t i = 0; i < rep.round_terms.size(); ++i)
    csv.row({"round_term_" + std::to_string(i + 1), format_g17(rep.round_terms[i]), "", ""});
  csv.row({"final_term", format_g17(rep.final_term), "", ""});
  csv.row({"total_cic", format_g17(rep.total_cic), "", ""});
  csv.row({"classical_output_mi", format_g17(rep.classical_output_mi), "", ""});
  return csv.text;
}

// =========================================================================
// One-shot-coin removal: quantize the coins into superposition registers,
// run the rounds coherently, and cancel the coin-register leakage with an
// input-controlled alignment unitary per round.
// =========================================================================

struct CompensationStep {
  int round = 0;                    // 1-based
  std::vector<std::string> act_on;  // coin registers quantized so far
  std::vector<ComplexMatrix> v;     // per sender input value on the act_on block
  double achieved_overlap = 1.0;
  double target_fidelity = 1.0;
};

struct OneshotCompiled {
  ProtocolSpec compiled;                    // coin-free, memoryless
  std::vector<CompensationStep> plan;
  std::vector<std::string> coin_registers;  // per round, empty when coinless
};

namespace detail_oneshot {

// Any unitary whose first column is the amplitude vector (sqrt of the coin
// distribution); completed deterministically by Gram-Schmidt.
inline ComplexMatrix preparation_unitary(const std::vector<double>& probs) {
  const int n = static_cast<int>(probs.size());
  ComplexMatrix u(n, n);
  for (int i = 0; i < n; ++i) u(i, 0) = std::sqrt(probs[i]);
  int filled = 1;
  for (int cand = 0; cand < n && filled < n; ++cand) {
    std::vector<cplx> v(n, cplx(0.0, 0.0));
    v[cand] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < filled; ++j) {
        cplx dot = 0.0;
        for (int i = 0; i < n; ++i) dot += std::conj(u(i, j)) * v[i];
        for (int i = 0; i < n; ++i) v[i] -= dot * u(i, j);
      }
    double nrm = 0.0;
    for (const cplx& e : v) nrm += std::norm(e);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) continue;
    for (int i = 0; i < n; ++i) u(i, filled) = v[i] / nrm;
    ++filled;
  }
  return u;
}

}  // namespace detail_oneshot

inline OneshotCompiled compile_oneshot(const ProtocolSpec& base, int dim_cap = 256) {
  if (!base.memoryless) throw RequiresMemoryless("one-shot removal needs a memoryless base");
  if (base.coins.mode != CoinMode::OneShot)
    throw NotOneShot("base protocol must declare one-shot coins");
  if (base.x_card != 2 || base.y_card != 2)
    throw RequiresBinaryInputs("one-shot removal is stated for binary inputs");
  const std::vector<Violation> errs = validate(base);
  if (!errs.empty()) throw Error("compile_oneshot on invalid base: " + describe(errs));

  const int k = base.k();
  OneshotCompiled oc;
  ProtocolSpec& q = oc.compiled;
  q.registers = base.registers;
  q.x_card = base.x_card;
  q.y_card = base.y_card;
  q.output_register = base.output_register;
  q.memoryless = true;

  // one quantized-coin register per coin-carrying round
  oc.coin_registers.assign(k, "");
  for (int i = 0; i < k; ++i) {
    if (base.coins.round_bits(i) == 0) continue;
    std::string name = "R" + std::to_string(i + 1);
    while (q.registers.find(name) >= 0) name += "_";
    q.registers.factors.push_back({name, base.coins.round_card(i)});
    oc.coin_registers[i] = name;
  }
  const int d = q.registers.total_dim();
  if (d > dim_cap)
    throw StateBlowup("quantized register space " + std::to_string(d) + " exceeds cap " +
                      std::to_string(dim_cap));

  if (!base.output_stage.empty()) {
    const int coin_dim = d / base.registers.total_dim();
    for (const ComplexMatrix& u : base.output_stage)
      q.output_stage.push_back(tensor(u, ComplexMatrix::identity(coin_dim)));
  }

  std::vector<int> base_positions(base.registers.size());
  for (int i = 0; i < base.registers.size(); ++i) base_positions[i] = i;

  // coin superposition preparation, folded into round 1
  ComplexMatrix prep = ComplexMatrix::identity(d);
  for (int i = 0; i < k; ++i) {
    if (oc.coin_registers[i].empty()) continue;
    const int card = base.coins.round_card(i);
    std::vector<double> probs(card);
    for (int cval = 0; cval < card; ++cval) probs[cval] = base.coins.prob(i, cval);
    const ComplexMatrix pu = detail_oneshot::preparation_unitary(probs);
    prep = embed_on_factors(pu, q.registers, {q.registers.index_of(oc.coin_registers[i])}) * prep;
  }

  // tracked branch states for the alignment construction;
  // (x, y) in {(0,0), (0,1), (1,0), (1,1)}
  std::vector<PureState> cur(4, PureState::zero(q.registers));
  std::vector<std::string> quantized_so_far;

  for (int i = 0; i < k; ++i) {
    const Round& br = base.rounds[i];
    const bool alice = br.sender == Sender::Alice;
    const int card = base.coins.round_card(i);

    // coin-value-controlled base unitary on the enlarged space
    std::vector<ComplexMatrix> controlled(2);
    for (int v = 0; v < 2; ++v) {
      if (oc.coin_registers[i].empty()) {
        controlled[v] = embed_on_factors(br.unitaries[v][0], q.registers, base_positions);
      } else {
        const int cpos = q.registers.index_of(oc.coin_registers[i]);
        ComplexMatrix sum(d, d);
        for (int cval = 0; cval < card; ++cval) {
          ComplexMatrix proj(card, card);
          proj(cval, cval) = 1.0;
          sum = sum + embed_on_factors(proj, q.registers, {cpos}) *
                          embed_on_factors(br.unitaries[v][cval], q.registers, base_positions);
        }
        controlled[v] = std::move(sum);
      }
      if (i == 0) controlled[v] = controlled[v] * prep;
    }
    if (!oc.coin_registers[i].empty()) quantized_so_far.push_back(oc.coin_registers[i]);

    // post-round branch states before compensation
    std::vector<PureState> tmp = cur;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const int input = alice ? x : y;
        tmp[x * 2 + y].amplitudes = matvec(controlled[input], cur[x * 2 + y].amplitudes);
      }

    CompensationStep step;
    step.round = i + 1;
    step.act_on = quantized_so_far;
    step.v.assign(2, ComplexMatrix());

    Round qr;
    qr.sender = br.sender;
    if (quantized_so_far.empty()) {
      qr.unitaries = {{controlled[0]}, {controlled[1]}};
    } else {
      // Lemma-5 alignment of the two sender-input branches at receiver
      // input 0: V maximizes the overlap on the quantized-coin block.
      const PureState& phi0 = tmp[0 * 2 + 0];
      const PureState& phi1 = alice ? tmp[1 * 2 + 0] : tmp[0 * 2 + 1];
      const ComplexMatrix v = uhlmann_unitary(phi0, phi1, quantized_so_far);
      step.achieved_overlap = aligned_overlap(phi0, phi1, v, quantized_so_far);

      std::vector<std::string> complement;
      for (const auto& f : q.registers.factors)
        if (std::find(quantized_so_far.begin(), quantized_so_far.end(), f.name) ==
            quantized_so_far.end())
          complement.push_back(f.name);
      step.target_fidelity = fidelity(partial_trace(to_density(phi0), complement),
                                      partial_trace(to_density(phi1), complement));

      std::vector<int> act_pos;
      for (const std::string& n : quantized_so_far) act_pos.push_back(q.registers.index_of(n));
      const ComplexMatrix v_full = embed_on_factors(v, q.registers, act_pos);
      qr.unitaries = {{controlled[0]}, {v_full * controlled[1]}};
      step.v[0] = ComplexMatrix::identity(v.rows);
      step.v[1] = v;
    }

    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const int input = alice ? x : y;
        cur[x * 2 + y].amplitudes = matvec(qr.unitaries[input][0], cur[x * 2 + y].amplitudes);
      }
    oc.plan.push_back(std::move(step));
    q.rounds.push_back(std::move(qr));
  }
  return oc;
}

struct OneshotReport {
  std::vector<Certificate> certificates;
  std::vector<double> base_terms;      // x_i = I(sender : M_i | receiver = 0) in the base
  std::vector<double> compiled_terms;  // the same terms in the compiled protocol
  double compiled_cic = 0.0;
  double compiled_cic0 = 0.0;
  double sum_h2_bound = 0.0;    // sum_i h2(x_i / 2)
  double s_prime = 0.0;         // sum_i x_i / 2
  double lemma6_bound = 0.0;    // 3 S' |log2(2k / S')|
  double max_output_tv = 0.0;
  bool pass = true;
};

inline OneshotReport verify_oneshot(const ProtocolSpec& base, const OneshotCompiled& oc,
                                    const InputDistribution& mu = u0(), int dim_cap = 256,
                                    double tol = 1e-9) {
  const int k = base.k();
  OneshotReport rep;

  const Transcript base_tr = simulate(base, InputDistribution::uniform(2, 2), dim_cap);
  const Transcript comp_tr = simulate(oc.compiled, InputDistribution::uniform(2, 2), dim_cap);

  // (i) output preservation, every input pair
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const std::vector<double>& pb = base_tr.output(x, y);
      const std::vector<double>& pc = comp_tr.output(x, y);
      double tv = 0.0;
      for (size_t o = 0; o < pb.size(); ++o) tv += std::abs(pb[o] - pc[o]);
      rep.max_output_tv = std::max(rep.max_output_tv, 0.5 * tv);
    }
  rep.certificates.push_back(
      {"output_preserved_tv", rep.max_output_tv, tol, rep.max_output_tv <= tol});

  // x_i: receiver input pinned to 0, sender input uniform, coins averaged
  std::vector<std::string> base_regs = detail_cic::register_names(base);
  auto base_term = [&](int round) {
    const bool alice = base.rounds[round].sender == Sender::Alice;
    CqEnsemble ens;
    ens.coord_names = {"s"};
    ens.coord_cards = {2};
    ens.layout = base_tr.layout;
    for (size_t l = 0; l < base_tr.labels.size(); ++l) {
      const auto& lab = base_tr.labels[l];
      const int recv = alice ? lab.y : lab.x;
      if (recv != 0) continue;
      const int sv = alice ? lab.x : lab.y;
      ens.branches.push_back({{sv}, 0.5 * lab.coin_prob, base_tr.round_states[round][l]});
    }
    return classical_conditional_mi(ens, {"s"}, base_regs, {});
  };
  std::vector<std::string> comp_regs = detail_cic::register_names(oc.compiled);
  auto compiled_term = [&](int round) {
    const bool alice = oc.compiled.rounds[round].sender == Sender::Alice;
    CqEnsemble ens;
    ens.coord_names = {"s"};
    ens.coord_cards = {2};
    ens.layout = comp_tr.layout;
    for (size_t l = 0; l < comp_tr.labels.size(); ++l) {
      const auto& lab = comp_tr.labels[l];
      const int recv = alice ? lab.y : lab.x;
      if (recv != 0) continue;
      const int sv = alice ? lab.x : lab.y;
      ens.branches.push_back({{sv}, 0.5, comp_tr.round_states[round][l]});
    }
    return classical_conditional_mi(ens, {"s"}, comp_regs, {});
  };

  double worst_round_excess = -1.0;
  for (int i = 0; i < k; ++i) {
    rep.base_terms.push_back(base_term(i));
    rep.compiled_terms.push_back(compiled_term(i));
    rep.sum_h2_bound += binary_entropy(std::min(1.0, rep.base_terms[i]) / 2.0);
    rep.s_prime += rep.base_terms[i] / 2.0;
    worst_round_excess =
        std::max(worst_round_excess, rep.compiled_terms[i] -
                                         binary_entropy(std::min(1.0, rep.base_terms[i]) / 2.0));
  }
  rep.certificates.push_back(
      {"lemma5_per_round_excess", worst_round_excess, tol, worst_round_excess <= tol});

  const CicLedger led = cic(oc.compiled, mu, dim_cap, /*with_qil=*/false);
  rep.compiled_cic = led.cic;
  rep.compiled_cic0 = led.cic0;
  rep.certificates.push_back({"cic_le_sum_h2", rep.compiled_cic, rep.sum_h2_bound,
                              rep.compiled_cic <= rep.sum_h2_bound + tol});
  rep.certificates.push_back({"cic0_le_sum_h2", rep.compiled_cic0, rep.sum_h2_bound,
                              rep.compiled_cic0 <= rep.sum_h2_bound + tol});

  rep.lemma6_bound =
      rep.s_prime == 0.0 ? 0.0 : 3.0 * rep.s_prime * std::abs(std::log2(2.0 * k / rep.s_prime));
  rep.certificates.push_back({"cic_le_entropy_lemma", rep.compiled_cic, rep.lemma6_bound,
                              rep.compiled_cic <= rep.lemma6_bound + tol});

  double worst_uhlmann = 0.0, worst_comp = 0.0;
  for (const CompensationStep& s : oc.plan) {
    worst_uhlmann = std::max(worst_uhlmann, std::abs(s.achieved_overlap - s.target_fidelity));
    if (!s.act_on.empty()) {
      worst_comp = std::max(
          worst_comp, max_abs_diff(s.v[0], ComplexMatrix::identity(s.v[0].rows)));
      const ComplexMatrix gram = dagger(s.v[1]) * s.v[1];
      worst_comp = std::max(worst_comp, max_abs_diff(gram, ComplexMatrix::identity(gram.rows)));
    }
  }
  rep.certificates.push_back({"uhlmann_optimal", worst_uhlmann, 1e-8, worst_uhlmann <= 1e-8});
  rep.certificates.push_back({"compensation_wellformed", worst_comp, tol, worst_comp <= tol});

  for (const Certificate& cert : rep.certificates) rep.pass &= cert.pass;
  return rep;
}

inline std::string oneshot_report_to_csv(const OneshotReport& rep) {
  CsvBuilder csv;
  csv.row({"certificate", "measured", "bound", "pass"});
  for (const Certificate& c : rep.certificates)
    csv.row({c.name, format_g17(c.measured), format_g17(c.bound), c.pass ? "1" : "0"});
  for (size_t i = 0; i < rep.base_terms.size(); ++i) {
    csv.row({"base_term_" + std::to_string(i + 1), format_g17(rep.base_terms[i]), "", ""});
    csv.row(
        {"compiled_term_" + std::to_string(i + 1), format_g17(rep.compiled_terms[i]), "", ""});
  }
  csv.row({"compiled_cic", format_g17(rep.compiled_cic), "", ""});
  csv.row({"compiled_cic0", format_g17(rep.compiled_cic0), "", ""});
  csv.row({"s_prime", format_g17(rep.s_prime), "", ""});
  return csv.text;
}

}  // namespace qcic
