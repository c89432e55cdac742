#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qcic/csv.hpp"
#include "qcic/measures.hpp"
#include "qcic/protocol.hpp"

namespace qcic {

// Per-round information ledger of a protocol run: the round terms of the
// classical-input information cost plus the summary totals.
struct CicLedger {
  struct Term {
    int round = 0;  // 1-based
    Sender sender = Sender::Alice;
    double bits = 0.0;
  };

  std::vector<Term> terms;
  double cic = 0.0;
  double cic0 = std::numeric_limits<double>::quiet_NaN();
  double qil = std::numeric_limits<double>::quiet_NaN();
  double qcc = 0.0;
};

namespace detail_cic {

// Classical coordinates of a transcript: inputs first, then one coordinate
// per coin-carrying round.
struct Coords {
  std::vector<std::string> names;
  std::vector<int> cards;
  std::vector<int> coin_rounds;  // round index of each coin coordinate
};

inline Coords transcript_coords(const ProtocolSpec& p) {
  Coords c;
  c.names = {"x", "y"};
  c.cards = {p.x_card, p.y_card};
  for (int i = 0; i < p.k(); ++i)
    if (p.coins.round_bits(i) > 0) {
      c.names.push_back("c" + std::to_string(i + 1));
      c.cards.push_back(p.coins.round_card(i));
      c.coin_rounds.push_back(i);
    }
  return c;
}

// Ensemble of the round-i states, weighted by an arbitrary joint input
// weighting (not necessarily the simulated mu).
inline CqEnsemble round_ensemble(const ProtocolSpec& p, const Transcript& tr, int round,
                                 const std::vector<double>& input_probs) {
  const Coords c = transcript_coords(p);
  CqEnsemble ens;
  ens.coord_names = c.names;
  ens.coord_cards = c.cards;
  ens.layout = tr.layout;
  ens.branches.reserve(tr.labels.size());
  for (size_t l = 0; l < tr.labels.size(); ++l) {
    const Transcript::Label& lab = tr.labels[l];
    CqEnsemble::Branch b;
    b.label = {lab.x, lab.y};
    for (int r : c.coin_rounds) b.label.push_back(lab.coins[r]);
    b.probability =
        input_probs[static_cast<size_t>(lab.x) * p.y_card + lab.y] * lab.coin_prob;
    b.state = tr.round_states[round][l];
    ens.branches.push_back(std::move(b));
  }
  return ens;
}

// Conditioning set for the round term: the receiver's input plus the
// receiver's coins revealed so far. Future coins are independent of the
// round state, so omitting them leaves the value unchanged.
inline std::vector<int> receiver_conditioning(const ProtocolSpec& p, int round) {
  const Coords c = transcript_coords(p);
  const Sender receiver = p.rounds[round].sender == Sender::Alice ? Sender::Bob : Sender::Alice;
  std::vector<int> cond;
  cond.push_back(receiver == Sender::Alice ? 0 : 1);
  for (size_t j = 0; j < c.coin_rounds.size(); ++j) {
    const int r = c.coin_rounds[j];
    if (r <= round && p.rounds[r].sender == receiver) cond.push_back(2 + static_cast<int>(j));
  }
  return cond;
}

inline std::vector<std::string> register_names(const ProtocolSpec& p) {
  std::vector<std::string> out;
  for (const auto& f : p.registers.factors) out.push_back(f.name);
  return out;
}

inline double round_term(const ProtocolSpec& p, const Transcript& tr, int round,
                         const std::vector<double>& input_probs) {
  const CqEnsemble ens = round_ensemble(p, tr, round, input_probs);
  const std::vector<std::string> sender_part = {p.rounds[round].sender == Sender::Alice ? "x"
                                                                                        : "y"};
  return classical_conditional_mi(ens, sender_part, register_names(p),
                                  receiver_conditioning(p, round));
}

}  // namespace detail_cic

// CIC0: the receiver's input is pinned to 0 and the sender's input is
// uniform over {0,1} (the conditionals of the hard AND distribution).
inline double cic0(const ProtocolSpec& p, int dim_cap = 256) {
  if (p.x_card != 2 || p.y_card != 2)
    throw RequiresBinaryInputs("cic0 is defined for binary input alphabets");
  if (!p.memoryless) throw RequiresMemoryless("cic0 is defined for memoryless protocols");
  const Transcript tr = simulate(p, InputDistribution::uniform(2, 2), dim_cap);
  double total = 0.0;
  for (int i = 0; i < p.k(); ++i) {
    const bool alice = p.rounds[i].sender == Sender::Alice;
    // odd rounds: X uniform, Y = 0; even rounds: Y uniform, X = 0
    const std::vector<double> cond_probs = alice ? std::vector<double>{0.5, 0.0, 0.5, 0.0}
                                                 : std::vector<double>{0.5, 0.5, 0.0, 0.0};
    total += detail_cic::round_term(p, tr, i, cond_probs);
  }
  return total;
}

// Quantum information loss: round terms conditioned on the receiver's input
// alone, computed through the lifted joint density route. Coincides with the
// CIC for memoryless protocols.
inline double qil(const ProtocolSpec& p, const InputDistribution& mu, int dim_cap = 256) {
  const Transcript tr = simulate(p, mu, dim_cap);
  const std::vector<std::string> regs = detail_cic::register_names(p);
  const int qd = p.dim();

  double total = 0.0;
  for (int i = 0; i < p.k(); ++i) {
    const bool alice = p.rounds[i].sender == Sender::Alice;
    const int recv_card = alice ? p.y_card : p.x_card;
    const int send_card = alice ? p.x_card : p.y_card;
    for (int r = 0; r < recv_card; ++r) {
      const double pr = alice ? mu.marginal_y(r) : mu.marginal_x(r);
      if (pr <= 0.0) continue;

      RegisterLayout lifted;
      lifted.factors.push_back({"#sender", send_card});
      for (const auto& f : p.registers.factors) lifted.factors.push_back(f);
      ComplexMatrix joint(send_card * qd, send_card * qd);
      for (size_t l = 0; l < tr.labels.size(); ++l) {
        const Transcript::Label& lab = tr.labels[l];
        const int rv = alice ? lab.y : lab.x;
        if (rv != r) continue;
        const int sv = alice ? lab.x : lab.y;
        const double w = mu(lab.x, lab.y) / pr * lab.coin_prob;
        if (w <= 0.0) continue;
        const PureState& psi = tr.round_states[i][l];
        for (int a = 0; a < qd; ++a) {
          const cplx wa = w * psi.amplitudes[a];
          if (wa == cplx(0.0, 0.0)) continue;
          for (int bcol = 0; bcol < qd; ++bcol)
            joint(sv * qd + a, sv * qd + bcol) += wa * std::conj(psi.amplitudes[bcol]);
        }
      }
      total += pr * mutual_information(DensityOperator(lifted, std::move(joint)), {"#sender"}, regs);
    }
  }
  return total;
}

// Full ledger: exact coin-enumerated conditional mutual informations per
// round, plus the CIC0 / QIL / QCC totals. The QIL total doubles the state
// dimension through its lifted-density route; pass with_qil = false when it
// is not needed.
inline CicLedger cic(const ProtocolSpec& p, const InputDistribution& mu, int dim_cap = 256,
                     bool with_qil = true) {
  const Transcript tr = simulate(p, mu, dim_cap);
  CicLedger ledger;
  for (int i = 0; i < p.k(); ++i) {
    const double bits = detail_cic::round_term(p, tr, i, mu.probs);
    ledger.terms.push_back({i + 1, p.rounds[i].sender, bits});
    ledger.cic += bits;
  }
  ledger.qcc = qcc(p);
  if (p.x_card == 2 && p.y_card == 2 && p.memoryless) ledger.cic0 = cic0(p, dim_cap);
  if (with_qil) ledger.qil = qil(p, mu, dim_cap);
  return ledger;
}

inline std::string ledger_to_csv(const CicLedger& ledger) {
  CsvBuilder csv;
  csv.row({"round", "sender", "term_bits"});
  for (const CicLedger::Term& t : ledger.terms)
    csv.row({std::to_string(t.round), to_string(t.sender), format_g17(t.bits)});
  csv.row({"cic", "", format_g17(ledger.cic)});
  csv.row({"cic0", "", format_g17(ledger.cic0)});
  csv.row({"qil", "", format_g17(ledger.qil)});
  csv.row({"qcc", "", format_g17(ledger.qcc)});
  return csv.text;
}

}  // namespace qcic
