// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and runtime budgets are pinned here, not configurable.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qcic/and_protocol.hpp"
#include "qcic/bound_audit.hpp"
#include "qcic/cic.hpp"
#include "qcic/compilers.hpp"
#include "qcic/corpus.hpp"
#include "qcic/measures.hpp"
#include "qcic/qotp.hpp"
#include "qcic/random.hpp"
#include "qcic/uhlmann.hpp"

using namespace qcic;

namespace {

int failures = 0;

void run_criterion(int number, const std::string& name, double budget_seconds,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_seconds) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
  }
  std::printf("[%s] criterion %2d: %s (%.2fs%s%s)\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              secs, detail.empty() ? "" : "; ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::vector<ProtocolSpec> memoryless_corpus(uint64_t seed, int count) {
  Rng root(seed);
  std::vector<ProtocolSpec> out;
  const int ks[3] = {3, 5, 7};
  for (int i = 0; i < count; ++i) {
    Rng sub = root.split(i);
    out.push_back(random_memoryless_protocol(sub, ks[i % 3]));
  }
  return out;
}

}  // namespace

int main() {
  std::printf("qcic acceptance suite (seeded, deterministic)\n");

  // 1. pure-encoding mutual-information identity
  run_criterion(1, "pure-state encoding identity, 200 seeded cases", 5.0, [](std::string& d) {
    Rng rng(101);
    const int dims[4] = {2, 3, 4, 8};
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      RegisterLayout l = make_layout({{"M", dims[t % 4]}});
      const PureState a = random_pure_state(rng, l);
      const PureState b = random_pure_state(rng, l);
      CqEnsemble ens;
      ens.coord_names = {"X"};
      ens.coord_cards = {2};
      ens.layout = l;
      ens.branches.push_back({{0}, 0.5, a});
      ens.branches.push_back({{1}, 0.5, b});
      const double mi = classical_conditional_mi(ens, {"X"}, {"M"}, {});
      worst = std::max(worst, std::abs(mi - binary_entropy((1.0 - overlap(a, b)) / 2.0)));
    }
    d = "max |I - h2(( 1-ov)/2)| = " + format_g17(worst);
    return worst <= 1e-9;
  });

  // 2. purification alignment achieves the reduced-state fidelity
  run_criterion(2, "alignment unitary extraction, 100 purifications", 10.0, [](std::string& d) {
    Rng rng(202);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      RegisterLayout l = make_layout({{"A", 2}, {"B", t % 2 == 0 ? 2 : 4}});
      const PureState phi0 = random_pure_state(rng, l);
      const PureState phi1 = random_pure_state(rng, l);
      const ComplexMatrix v = uhlmann_unitary(phi0, phi1, {"A"});
      const double got = aligned_overlap(phi0, phi1, v, {"A"});
      const double want = fidelity(partial_trace(to_density(phi0), {"B"}),
                                   partial_trace(to_density(phi1), {"B"}));
      worst = std::max(worst, std::abs(got - want));
    }
    d = "max |overlap - fidelity| = " + format_g17(worst);
    return worst <= 1e-8;
  });

  // 3. AND protocol correctness
  run_criterion(3, "AND protocol exact for r = 1..8", 1.0, [](std::string& d) {
    bool ok = true;
    double worst_input = 0.0;
    for (int r = 1; r <= 8; ++r) {
      const ProtocolSpec p = build_and_protocol(r);
      const ErrorProbability e = error_probability(p, and_truth_table(), u0());
      ok &= e.distributional <= 1e-12;
      for (double v : e.per_input) worst_input = std::max(worst_input, v);
    }
    d = "max per-input error (all four inputs, simulated) = " + format_g17(worst_input);
    return ok && worst_input <= 1e-12;
  });

  // 4. CIC sandwich across the round sweep
  run_criterion(4, "CIC sandwich for k = 3..31", 10.0, [](std::string& d) {
    // upper ratio frozen from a reference run: max over r=1..8 was 0.8147
    const double frozen_ratio = 0.82;
    bool ok = true;
    double worst_ratio = 0.0;
    for (int r = 1; r <= 8; ++r) {
      const ProtocolSpec p = build_and_protocol(r);
      const CicLedger led = cic(p, u0());
      const int k = p.k();
      const double logk = std::log2(static_cast<double>(k));
      ok &= led.cic >= logk / (12.0 * k) - 1e-9;
      worst_ratio = std::max(worst_ratio, k * led.cic / logk);
    }
    d = "max k*cic/log2(k) = " + format_g17(worst_ratio) + " vs frozen " +
        format_g17(frozen_ratio);
    return ok && worst_ratio <= frozen_ratio;
  });

  // 5. lower-bound audit chain
  run_criterion(5, "audit chain on AND r=1..8 and 100 random protocols", 30.0,
                [](std::string& d) {
                  int checked = 0;
                  for (int r = 1; r <= 8; ++r) {
                    if (!audit_passes(audit(build_and_protocol(r)), 1e-9)) {
                      d = "AND r=" + std::to_string(r) + " failed";
                      return false;
                    }
                    ++checked;
                  }
                  for (const ProtocolSpec& p : memoryless_corpus(0xC1C, 100)) {
                    if (!audit_passes(audit(p), 1e-9)) {
                      d = "corpus protocol " + std::to_string(checked - 8) + " failed";
                      return false;
                    }
                    ++checked;
                  }
                  d = std::to_string(checked) + " audits clean";
                  return true;
                });

  // 6. the 2/3 identity between the two cost functionals
  run_criterion(6, "cic = (2/3) cic0 under u0 across the corpus", 60.0, [](std::string& d) {
    double worst = 0.0;
    for (int r = 1; r <= 8; ++r) {
      const CicLedger led = cic(build_and_protocol(r), u0(), 256, /*with_qil=*/false);
      worst = std::max(worst, std::abs(led.cic - 2.0 / 3.0 * led.cic0));
    }
    for (const ProtocolSpec& p : memoryless_corpus(0xC1C, 100)) {
      const CicLedger led = cic(p, u0(), 256, /*with_qil=*/false);
      worst = std::max(worst, std::abs(led.cic - 2.0 / 3.0 * led.cic0));
    }
    d = "max |cic - (2/3) cic0| = " + format_g17(worst);
    return worst <= 1e-9;
  });

  // 7. privacy compiler
  run_criterion(7, "privacy compiler on the send-x AND base", 30.0, [](std::string& d) {
    const PrivateCompiled c = compile_private(forwarding_base(and_truth_table()));

    const PrivacyReport under_u0 = verify_private(c, u0());
    if (!under_u0.pass) {
      d = "certificate failure under u0";
      return false;
    }
    if (std::abs(under_u0.total_cic) > 1e-9) {
      d = "total cic under u0 = " + format_g17(under_u0.total_cic);
      return false;
    }

    const PrivacyReport uniform = verify_private(c, InputDistribution::uniform());
    double worst_term = 0.0;
    for (double t : uniform.round_terms) worst_term = std::max(worst_term, std::abs(t));
    const double dev = std::abs(uniform.total_cic - uniform.classical_output_mi);
    d = "round terms <= " + format_g17(worst_term) + ", |total - I(out:X|Y)| = " +
        format_g17(dev) + ", total under u0 = " + format_g17(under_u0.total_cic);
    return uniform.pass && worst_term <= 1e-9 && dev <= 1e-9;
  });

  // 8. one-shot coin removal over a seeded corpus
  run_criterion(8, "one-shot removal on 50 coined protocols (k <= 5)", 120.0,
                [](std::string& d) {
                  Rng root(808);
                  const int ks[3] = {1, 3, 5};
                  double worst_tv = 0.0, worst_round = -1.0;
                  for (int i = 0; i < 50; ++i) {
                    Rng sub = root.split(i);
                    const ProtocolSpec base = random_oneshot_protocol(sub, ks[i % 3]);
                    const OneshotCompiled oc = compile_oneshot(base);
                    const OneshotReport rep = verify_oneshot(base, oc);
                    if (!rep.pass) {
                      d = "protocol " + std::to_string(i) + " failed a certificate";
                      return false;
                    }
                    worst_tv = std::max(worst_tv, rep.max_output_tv);
                    for (size_t j = 0; j < rep.compiled_terms.size(); ++j)
                      worst_round = std::max(
                          worst_round, rep.compiled_terms[j] -
                                           binary_entropy(std::min(1.0, rep.base_terms[j]) / 2.0));
                  }
                  d = "max output TV = " + format_g17(worst_tv) +
                      ", max per-round excess = " + format_g17(worst_round);
                  return worst_tv <= 1e-9;
                });

  // 9. entropy sum bound and the concavity grid
  run_criterion(9, "entropy lemma on 1000 arrays + concavity grid", 5.0, [](std::string& d) {
    Rng rng(909);
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> xs(1 + rng.uniform_int(64));
      for (double& x : xs) x = rng.uniform();
      if (!check_entropy_lemma(xs, 1e-9)) {
        d = "array " + std::to_string(t) + " violated the bound";
        return false;
      }
    }
    if (!check_concavity(1e-9)) {
      d = "concavity grid failed";
      return false;
    }
    d = "1000 arrays + 400 grid pairs clean";
    return true;
  });

  // 10. one-time-pad twirl
  run_criterion(10, "one-time-pad twirl, widths 1..4", 30.0, [](std::string& d) {
    Rng rng(1010);
    double worst = 0.0;
    for (int w = 1; w <= 4; ++w) {
      RegisterLayout l;
      std::vector<std::string> block;
      for (int i = 0; i < w; ++i) {
        l.factors.push_back({"Q" + std::to_string(i), 2});
        block.push_back("Q" + std::to_string(i));
      }
      const int dim = l.total_dim();
      for (int t = 0; t < 20; ++t) {
        const DensityOperator avg = qotp_average(random_pure_state(rng, l), block);
        worst = std::max(
            worst, max_abs_diff(avg.matrix, ComplexMatrix::identity(dim) * cplx(1.0 / dim, 0.0)));
      }
    }
    d = "max |avg - I/2^w| = " + format_g17(worst);
    return worst <= 1e-12;
  });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
