#pragma once

#include "qcic/protocol.hpp"
#include "qcic/random.hpp"

namespace qcic {

// Adversarial coverage for the inequality suites: single-qubit memoryless
// protocols with Haar-random unitaries per (sender, input value).
inline ProtocolSpec random_memoryless_protocol(Rng& rng, int k) {
  ProtocolSpec p;
  p.registers = make_layout({{"C", 2}});
  p.output_register = "C";
  p.memoryless = true;
  for (int i = 0; i < k; ++i) {
    Round r;
    r.sender = (i % 2 == 0) ? Sender::Alice : Sender::Bob;
    r.unitaries = {{haar_unitary(rng, 2)}, {haar_unitary(rng, 2)}};
    p.rounds.push_back(std::move(r));
  }
  return p;
}

// Same, with one fresh coin bit per round read only by that round.
inline ProtocolSpec random_oneshot_protocol(Rng& rng, int k, int bits_per_round = 1) {
  ProtocolSpec p;
  p.registers = make_layout({{"C", 2}});
  p.output_register = "C";
  p.memoryless = true;
  p.coins.mode = CoinMode::OneShot;
  p.coins.bits.assign(k, bits_per_round);
  const int coin_card = 1 << bits_per_round;
  for (int i = 0; i < k; ++i) {
    Round r;
    r.sender = (i % 2 == 0) ? Sender::Alice : Sender::Bob;
    r.unitaries.assign(2, std::vector<ComplexMatrix>(coin_card));
    for (int v = 0; v < 2; ++v)
      for (int c = 0; c < coin_card; ++c) r.unitaries[v][c] = haar_unitary(rng, 2);
    p.rounds.push_back(std::move(r));
  }
  return p;
}

}  // namespace qcic
