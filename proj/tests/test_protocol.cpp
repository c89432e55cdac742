#include <catch2/catch_amalgamated.hpp>

#include "qcic/and_protocol.hpp"
#include "qcic/cic.hpp"
#include "qcic/corpus.hpp"
#include "qcic/protocol_json.hpp"

using namespace qcic;

namespace {

// single round: Alice writes |x> into C
ProtocolSpec send_x_protocol() {
  ProtocolSpec p;
  p.registers = make_layout({{"C", 2}});
  p.output_register = "C";
  Round r;
  r.sender = Sender::Alice;
  r.unitaries = {{ComplexMatrix::identity(2)}, {gates::pauli_x()}};
  p.rounds.push_back(std::move(r));
  return p;
}

// single round: Alice applies the identity no matter what
ProtocolSpec constant_protocol() {
  ProtocolSpec p;
  p.registers = make_layout({{"C", 2}});
  p.output_register = "C";
  Round r;
  r.sender = Sender::Alice;
  r.unitaries = {{ComplexMatrix::identity(2)}, {ComplexMatrix::identity(2)}};
  p.rounds.push_back(std::move(r));
  return p;
}

int label_index(const Transcript& tr, int x, int y) {
  for (size_t i = 0; i < tr.labels.size(); ++i)
    if (tr.labels[i].x == x && tr.labels[i].y == y) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("u0 matches the hard AND distribution") {
  const InputDistribution mu = u0();
  CHECK(mu(0, 1) == Catch::Approx(1.0 / 3.0));
  CHECK(mu(1, 1) == 0.0);
  CHECK(mu.marginal_y(0) == Catch::Approx(2.0 / 3.0));
  CHECK_NOTHROW(mu.check_valid());
}

TEST_CASE("validate") {
  SECTION("the AND protocol is clean") {
    CHECK(validate(build_and_protocol(1)).empty());
    CHECK(validate(build_and_protocol(2)).empty());
  }
  SECTION("non-unitary round matrix is flagged") {
    ProtocolSpec p = send_x_protocol();
    p.rounds[0].unitaries[1][0](0, 0) = 0.5;  // breaks the column norm
    p.rounds[0].unitaries[1][0](1, 0) = 0.0;
    const auto vs = validate(p);
    REQUIRE(!vs.empty());
    bool found = false;
    for (const auto& v : vs) found |= (v.kind == Violation::NonUnitary && v.round == 0);
    CHECK(found);
  }
  SECTION("alternation break is flagged") {
    ProtocolSpec p = build_and_protocol(1);
    p.rounds[1].sender = Sender::Alice;  // Alice twice in a row
    p.rounds[1].unitaries = p.rounds[0].unitaries;
    const auto vs = validate(p);
    bool found = false;
    for (const auto& v : vs) found |= (v.kind == Violation::AlternationBroken && v.round == 1);
    CHECK(found);
  }
  SECTION("even round count is flagged") {
    ProtocolSpec p = build_and_protocol(1);
    p.rounds.pop_back();
    CHECK(!validate(p).empty());
  }
  SECTION("oversized coin space is flagged") {
    Rng rng(1);
    ProtocolSpec p = random_oneshot_protocol(rng, 3, 5);  // 15 coin bits
    const auto vs = validate(p);
    bool found = false;
    for (const auto& v : vs) found |= (v.kind == Violation::CoinSpaceTooLarge);
    CHECK(found);
  }
}

TEST_CASE("simulate") {
  SECTION("identity round leaves |0>") {
    const Transcript tr = simulate(constant_protocol(), InputDistribution::uniform());
    for (const auto& s : tr.round_states[0]) {
      CHECK(std::abs(s.amplitudes[0] - cplx(1.0, 0.0)) < 1e-12);
      CHECK(std::abs(s.amplitudes[1]) < 1e-12);
    }
  }
  SECTION("AND protocol, r=1: final states on key inputs") {
    const ProtocolSpec p = build_and_protocol(1);
    const Transcript tr = simulate(p, u0());
    const PureState& s11 = tr.round_states[2][label_index(tr, 1, 1)];
    CHECK(std::abs(s11.amplitudes[1]) == Catch::Approx(1.0).margin(1e-12));
    const PureState& s01 = tr.round_states[2][label_index(tr, 0, 1)];
    CHECK(std::abs(s01.amplitudes[0]) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("norm preserved after every round") {
    Rng rng(21);
    const ProtocolSpec p = random_memoryless_protocol(rng, 5);
    const Transcript tr = simulate(p, u0());
    for (const auto& round : tr.round_states)
      for (const auto& s : round) CHECK(std::abs(s.norm() - 1.0) < 1e-10);
  }
  SECTION("determinism: identical runs produce identical states") {
    Rng rng(22);
    const ProtocolSpec p = random_oneshot_protocol(rng, 3);
    const Transcript a = simulate(p, u0());
    const Transcript b = simulate(p, u0());
    REQUIRE(a.labels.size() == b.labels.size());
    for (size_t r = 0; r < a.round_states.size(); ++r)
      for (size_t l = 0; l < a.labels.size(); ++l)
        for (size_t i = 0; i < a.round_states[r][l].amplitudes.size(); ++i)
          CHECK(a.round_states[r][l].amplitudes[i] == b.round_states[r][l].amplitudes[i]);
  }
  SECTION("dimension cap raises StateBlowup") {
    ProtocolSpec p = constant_protocol();
    p.registers = make_layout({{"A", 16}, {"B", 16}, {"C", 2}});
    p.output_register = "C";
    p.rounds[0].unitaries = {{ComplexMatrix::identity(512)}, {ComplexMatrix::identity(512)}};
    CHECK_THROWS_AS(simulate(p, InputDistribution::uniform()), StateBlowup);
  }
}

TEST_CASE("output distribution of the AND protocol") {
  const ProtocolSpec p = build_and_protocol(1);
  CHECK(output_distribution(p, 0, 0)[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(output_distribution(p, 1, 0)[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(output_distribution(p, 0, 1)[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(output_distribution(p, 1, 1)[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("error probability") {
  SECTION("AND protocol is exact under u0") {
    const ErrorProbability e = error_probability(build_and_protocol(1), and_truth_table(), u0());
    CHECK(e.distributional < 1e-12);
  }
  SECTION("always-output-0 protocol") {
    const ProtocolSpec p = constant_protocol();
    const ErrorProbability e = error_probability(p, and_truth_table(), u0());
    CHECK(e.distributional < 1e-12);  // AND is 0 on the support of u0
    CHECK(e.worst_case == Catch::Approx(1.0));  // input (1,1)
  }
}

TEST_CASE("qcc") {
  for (int r = 1; r <= 3; ++r) CHECK(qcc(build_and_protocol(r)) == Catch::Approx(4.0 * r - 1.0));
  ProtocolSpec p2 = constant_protocol();
  p2.registers = make_layout({{"M", 4}});
  p2.rounds[0].unitaries = {{ComplexMatrix::identity(4)}, {ComplexMatrix::identity(4)}};
  p2.output_register = "M";
  CHECK(qcc(p2) == Catch::Approx(2.0));
  ProtocolSpec empty;
  empty.registers = make_layout({{"C", 2}});
  CHECK(qcc(empty) == 0.0);
}

TEST_CASE("protocol json round trip") {
  Rng rng(30);
  for (const ProtocolSpec& p :
       {build_and_protocol(2), random_oneshot_protocol(rng, 3), send_x_protocol()}) {
    const nlohmann::json j = protocol_to_json(p);
    const ProtocolSpec q = protocol_from_json(j);
    REQUIRE(q.k() == p.k());
    CHECK(q.registers.same_shape(p.registers));
    CHECK(q.output_register == p.output_register);
    CHECK(q.memoryless == p.memoryless);
    for (int i = 0; i < p.k(); ++i) {
      CHECK(q.rounds[i].sender == p.rounds[i].sender);
      for (size_t v = 0; v < p.rounds[i].unitaries.size(); ++v)
        for (size_t c = 0; c < p.rounds[i].unitaries[v].size(); ++c)
          CHECK(max_abs_diff(q.rounds[i].unitaries[v][c], p.rounds[i].unitaries[v][c]) < 1e-15);
    }
    CHECK(validate(q).empty());
  }
}

TEST_CASE("protocol json parse errors name the offending path") {
  nlohmann::json good = protocol_to_json(build_and_protocol(1));

  SECTION("missing registers") {
    nlohmann::json j = good;
    j.erase("registers");
    try {
      protocol_from_json(j);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.json_path == "$.registers");
    }
  }
  SECTION("bad sender") {
    nlohmann::json j = good;
    j["rounds"][1]["sender"] = "carol";
    try {
      protocol_from_json(j);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.json_path == "$.rounds[1].sender");
    }
  }
  SECTION("wrong matrix length") {
    nlohmann::json j = good;
    j["rounds"][0]["unitaries"]["1"].erase(3);
    try {
      protocol_from_json(j);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.json_path == "$.rounds[0].unitaries.1");
    }
  }
  SECTION("bad complex entry") {
    nlohmann::json j = good;
    j["rounds"][0]["unitaries"]["1"][2] = "oops";
    CHECK_THROWS_AS(protocol_from_json(j), ParseError);
  }
}

TEST_CASE("cic ledger") {
  SECTION("input-independent protocol carries nothing") {
    const CicLedger led = cic(constant_protocol(), u0());
    CHECK(led.cic == Catch::Approx(0.0).margin(1e-10));
    CHECK(led.cic0 == Catch::Approx(0.0).margin(1e-10));
    CHECK(led.qil == Catch::Approx(0.0).margin(1e-10));
  }
  SECTION("send-x carries one bit under the uniform distribution") {
    const CicLedger led = cic(send_x_protocol(), InputDistribution::uniform());
    REQUIRE(led.terms.size() == 1);
    CHECK(led.terms[0].bits == Catch::Approx(1.0).margin(1e-10));
    CHECK(led.cic0 == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("AND r=1 under u0: cic = (2/3) cic0, both positive") {
    const CicLedger led = cic(build_and_protocol(1), u0());
    CHECK(led.cic > 0.0);
    CHECK(led.cic0 > 0.0);
    CHECK(led.cic == Catch::Approx(2.0 / 3.0 * led.cic0).margin(1e-9));
  }
  SECTION("AND r=2: cic0 = (3/2) cic") {
    const CicLedger led = cic(build_and_protocol(2), u0());
    CHECK(led.cic0 == Catch::Approx(1.5 * led.cic).margin(1e-9));
  }
  SECTION("ledger terms sum to the total and stay nonnegative") {
    Rng rng(33);
    const CicLedger led = cic(random_memoryless_protocol(rng, 5), u0());
    double sum = 0.0;
    for (const auto& t : led.terms) {
      CHECK(t.bits >= -1e-9);
      sum += t.bits;
    }
    CHECK(led.cic == Catch::Approx(sum).margin(1e-10));
  }
  SECTION("appending an input-independent round adds nothing") {
    // Holds when the resent state carries no further conditional correlation,
    // as for the AND protocol; a resend of a still-correlated state would be
    // charged again under the round-by-round definition.
    ProtocolSpec p = build_and_protocol(2);
    const CicLedger before = cic(p, u0());
    // extend with Bob + Alice identity rounds to keep k odd
    for (int j = 0; j < 2; ++j) {
      Round r;
      r.sender = (p.k() % 2 == 0) ? Sender::Alice : Sender::Bob;
      r.unitaries = {{ComplexMatrix::identity(2)}, {ComplexMatrix::identity(2)}};
      p.rounds.push_back(std::move(r));
    }
    const CicLedger after = cic(p, u0());
    CHECK(after.terms[7].bits <= 1e-9);
    CHECK(after.terms[8].bits <= 1e-9);
    CHECK(after.cic == Catch::Approx(before.cic).margin(1e-9));
  }
  SECTION("lemma-4 identity on random protocols, with and without coins") {
    Rng rng(35);
    for (int rep = 0; rep < 4; ++rep) {
      const ProtocolSpec p = rep % 2 == 0 ? random_memoryless_protocol(rng, 3)
                                          : random_oneshot_protocol(rng, 3);
      const CicLedger led = cic(p, u0());
      CHECK(led.cic == Catch::Approx(2.0 / 3.0 * led.cic0).margin(1e-9));
    }
  }
  SECTION("qil coincides with cic for memoryless protocols") {
    Rng rng(36);
    const ProtocolSpec p = random_memoryless_protocol(rng, 3);
    const CicLedger led = cic(p, u0());
    CHECK(led.qil == Catch::Approx(led.cic).margin(1e-9));
  }
  SECTION("csv serialization shape") {
    const std::string csv = ledger_to_csv(cic(build_and_protocol(1), u0()));
    CHECK(csv.find("round,sender,term_bits\n") == 0);
    CHECK(csv.find("cic,") != std::string::npos);
    CHECK(csv.find("qcc,") != std::string::npos);
    CHECK(csv.back() == '\n');
  }
}

TEST_CASE("AND protocol cost decreases along the round sweep") {
  double prev = 1e9;
  for (int r = 1; r <= 4; ++r) {
    const double c = cic(build_and_protocol(r), u0(), 256, /*with_qil=*/false).cic;
    CHECK(c < prev);
    prev = c;
  }
}

TEST_CASE("round-1 ensemble of the AND protocol under u0") {
  // I(M1 : X | Y) decomposes into (2/3) * I(M1 : X | Y=0): direct branch check
  const ProtocolSpec p = build_and_protocol(1);
  const Transcript tr = simulate(p, u0());
  const CqEnsemble ens = detail_cic::round_ensemble(p, tr, 0, u0().probs);
  const double cond_full = classical_conditional_mi(ens, {"x"}, {"C"}, {1});

  CqEnsemble y0;
  y0.coord_names = {"x"};
  y0.coord_cards = {2};
  y0.layout = p.registers;
  y0.branches.push_back({{0}, 0.5, tr.round_states[0][label_index(tr, 0, 0)]});
  y0.branches.push_back({{1}, 0.5, tr.round_states[0][label_index(tr, 1, 0)]});
  const double cond_y0 = classical_conditional_mi(y0, {"x"}, {"C"}, {});
  CHECK(cond_full == Catch::Approx(2.0 / 3.0 * cond_y0).margin(1e-10));
}

TEST_CASE("AND protocol construction") {
  SECTION("parameters") {
    const AndParams a = AndParams::make(1);
    CHECK(a.k == 3);
    CHECK(a.theta == Catch::Approx(M_PI / 8.0));
    CHECK(build_and_protocol(1).k() == 3);
    CHECK(qcc(build_and_protocol(3)) == Catch::Approx(11.0));
  }
  SECTION("reflection algebra") {
    for (int r : {1, 2, 5}) {
      const AndParams a = AndParams::make(r);
      CHECK(max_abs_diff(a.u_v * a.u_v, ComplexMatrix::identity(2)) < 1e-12);
      CHECK(max_abs_diff(a.z * a.z, ComplexMatrix::identity(2)) < 1e-12);
      // Z U_v rotates by 2 theta
      CHECK(trace(a.z * a.u_v).real() == Catch::Approx(2.0 * std::cos(2.0 * a.theta)).margin(1e-12));
      // column convention of the reflection
      CHECK(a.u_v(0, 0).real() == Catch::Approx(std::cos(2.0 * a.theta)));
      CHECK(a.u_v(1, 0).real() == Catch::Approx(std::sin(2.0 * a.theta)));
      CHECK(a.u_v(0, 1).real() == Catch::Approx(std::sin(2.0 * a.theta)));
      CHECK(a.u_v(1, 1).real() == Catch::Approx(-std::cos(2.0 * a.theta)));
      CHECK(max_abs_diff(a.z, ComplexMatrix::diag({1.0, -1.0})) == 0.0);
    }
  }
  SECTION("r=1 correctness on (1,1) against a hand-composed oracle") {
    const AndParams a = AndParams::make(1);
    const ComplexMatrix total = a.u_v * a.z * a.u_v;  // rounds 1..3 on x=y=1
    std::vector<cplx> out = matvec(total, {1.0, 0.0});
    CHECK(std::abs(out[1]) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("errors vanish for r = 1..8") {
    for (int r = 1; r <= 8; ++r) {
      const std::array<double, 4> err = expected_error(r);
      CHECK(err[0] < 1e-12);
      CHECK(err[1] < 1e-12);
      CHECK(err[2] < 1e-12);
      CHECK(err[3] < 1e-12);  // simulated, exact rotation composition
    }
  }
}
