#pragma once

#include <array>
#include <cmath>

#include "qcic/protocol.hpp"

namespace qcic {

// The k = 4r-1 round single-qubit reflection protocol for AND. Alice
// reflects about |v> = cos(theta)|0> + sin(theta)|1> when x = 1, Bob
// reflects about |0> when y = 1, and Bob measures C after the last round.
struct AndParams {
  int r = 1;
  double theta = 0.0;
  int k = 3;
  ComplexMatrix u_v;
  ComplexMatrix z;

  static AndParams make(int r) {
    if (r < 1) throw OutOfRange("AndParams requires r >= 1");
    AndParams p;
    p.r = r;
    p.theta = M_PI / (8.0 * r);
    p.k = 4 * r - 1;
    const double c = std::cos(2.0 * p.theta), s = std::sin(2.0 * p.theta);
    p.u_v = ComplexMatrix::from_rows(2, 2, {c, s, s, -c});
    p.z = ComplexMatrix::from_rows(2, 2, {1, 0, 0, -1});
    return p;
  }
};

inline ProtocolSpec build_and_protocol(int r) {
  const AndParams params = AndParams::make(r);
  ProtocolSpec p;
  p.registers = make_layout({{"C", 2}});
  p.output_register = "C";
  p.memoryless = true;

  const ComplexMatrix id = ComplexMatrix::identity(2);
  for (int i = 0; i < params.k; ++i) {
    Round round;
    round.sender = (i % 2 == 0) ? Sender::Alice : Sender::Bob;
    const ComplexMatrix& active = round.sender == Sender::Alice ? params.u_v : params.z;
    round.unitaries = {{id}, {active}};
    p.rounds.push_back(std::move(round));
  }
  return p;
}

inline std::vector<int> and_truth_table() { return {0, 0, 0, 1}; }

// Simulated per-input error of the AND protocol: Pr[output != x & y],
// indexed x*2 + y. The (1,1) value is a simulation result, not an assumed
// ground truth.
inline std::array<double, 4> expected_error(int r, int dim_cap = 256) {
  const ProtocolSpec p = build_and_protocol(r);
  const ErrorProbability e = error_probability(p, and_truth_table(), u0(), dim_cap);
  return {e.per_input[0], e.per_input[1], e.per_input[2], e.per_input[3]};
}

}  // namespace qcic
