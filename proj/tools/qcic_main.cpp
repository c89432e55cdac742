// qcic command line: protocol simulation, information-cost sweeps,
// lower-bound audits, and the two protocol compilers.
//
// Exit codes: 0 success, 1 certificate or claim failure, 2 usage/parse error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcic/and_protocol.hpp"
#include "qcic/bound_audit.hpp"
#include "qcic/cic.hpp"
#include "qcic/compilers.hpp"
#include "qcic/corpus.hpp"
#include "qcic/csv.hpp"
#include "qcic/protocol_json.hpp"
#include "qcic/random.hpp"
#include "qcic/uhlmann.hpp"

using namespace qcic;

namespace {

struct RunConfig {
  double tol = 1e-9;
  uint64_t seed = 1;
  int cap = 256;
  std::string out;

  void check() const {
    if (tol <= 0.0) throw Error("tolerance must be positive");
    if (cap < 2 || cap > 256) throw Error("dimension cap must lie in [2, 256]");
  }
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty())
    std::cout << text;
  else
    write_text_file(cfg.out, text);
}

InputDistribution parse_mu(const std::string& name) {
  if (name == "u0") return u0();
  if (name == "uniform") return InputDistribution::uniform();
  throw Error("unknown input distribution '" + name + "' (expected u0 or uniform)");
}

// ---------------------------------------------------------------------------

int cmd_and_sweep(const RunConfig& cfg, int r_min, int r_max) {
  if (r_min < 1 || r_max > 8 || r_min > r_max) throw Error("need 1 <= r_min <= r_max <= 8");
  CsvBuilder csv;
  csv.row({"r", "k", "qcc", "cic", "cic0", "lower_bound", "k_cic_over_log2k"});
  for (int r = r_min; r <= r_max; ++r) {
    const ProtocolSpec p = build_and_protocol(r);
    const CicLedger led = cic(p, u0(), cfg.cap);
    const int k = p.k();
    const double logk = std::log2(static_cast<double>(k));
    csv.row({std::to_string(r), std::to_string(k), format_g17(led.qcc), format_g17(led.cic),
             format_g17(led.cic0), format_g17(logk / (12.0 * k)),
             format_g17(k * led.cic / logk)});
  }
  emit(cfg, csv.text);
  return 0;
}

int cmd_audit(const RunConfig& cfg, const std::string& file, int and_r) {
  ProtocolSpec p;
  if (and_r > 0)
    p = build_and_protocol(and_r);
  else
    p = load_protocol(file);
  const LowerBoundAudit aud = audit(p, cfg.cap);
  emit(cfg, audit_to_csv(aud, cfg.tol));
  return audit_passes(aud, cfg.tol) ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, const std::string& file, int and_r,
                 const std::string& mu_name) {
  ProtocolSpec p;
  if (and_r > 0)
    p = build_and_protocol(and_r);
  else
    p = load_protocol(file);
  const Transcript tr = simulate(p, parse_mu(mu_name), cfg.cap);
  CsvBuilder csv;
  csv.row({"x", "y", "outcome", "probability"});
  for (int x = 0; x < p.x_card; ++x)
    for (int y = 0; y < p.y_card; ++y) {
      const std::vector<double>& dist = tr.output(x, y);
      for (size_t o = 0; o < dist.size(); ++o)
        csv.row({std::to_string(x), std::to_string(y), std::to_string(o), format_g17(dist[o])});
    }
  emit(cfg, csv.text);
  return 0;
}

int cmd_compile(const RunConfig& cfg, bool do_private, bool do_oneshot, const std::string& file,
                bool builtin_base, const std::string& mu_name) {
  if (do_private == do_oneshot) throw Error("pick exactly one of --private / --oneshot");
  ProtocolSpec base;
  if (builtin_base)
    base = forwarding_base(and_truth_table());
  else
    base = load_protocol(file);
  const InputDistribution mu = parse_mu(mu_name);
  const std::string prefix = cfg.out.empty() ? std::string("compiled") : cfg.out;

  if (do_private) {
    const PrivateCompiled c = compile_private(base);
    const PrivacyReport rep = verify_private(c, mu, /*width_cap=*/5, cfg.seed, cfg.tol);
    nlohmann::json j;
    j["kind"] = "private_compiled";
    j["base"] = protocol_to_json(c.base);
    j["width"] = c.width;
    j["round_key_bits"] = c.round_key_bits;
    j["s_b_bits"] = c.s_b_bits;
    j["s_a_bits"] = c.s_a_bits;
    write_text_file(prefix + ".compiled.json", j.dump(1) + "\n");
    CsvBuilder csv;
    csv.comment("qcic compile --private; prng=splitmix64 seed=" + std::to_string(cfg.seed));
    csv.text += privacy_report_to_csv(rep);
    write_text_file(prefix + ".report.csv", csv.text);
    std::cout << (rep.pass ? "private compile: all certificates pass\n"
                           : "private compile: certificate FAILURE\n");
    return rep.pass ? 0 : 1;
  }

  const OneshotCompiled oc = compile_oneshot(base, cfg.cap);
  const OneshotReport rep = verify_oneshot(base, oc, mu, cfg.cap, cfg.tol);
  save_protocol(oc.compiled, prefix + ".protocol.json");
  CsvBuilder csv;
  csv.comment("qcic compile --oneshot; prng=splitmix64 seed=" + std::to_string(cfg.seed));
  csv.text += oneshot_report_to_csv(rep);
  write_text_file(prefix + ".report.csv", csv.text);
  std::cout << (rep.pass ? "oneshot compile: all certificates pass\n"
                         : "oneshot compile: certificate FAILURE\n");
  return rep.pass ? 0 : 1;
}

// property suites over seeded random instances, one line per lemma
int cmd_lemmas(const RunConfig& cfg, int trials) {
  if (trials < 1) throw Error("--trials must be at least 1");
  Rng root(cfg.seed);
  CsvBuilder report;
  report.comment("qcic lemmas report");
  report.comment("prng=splitmix64 seed=" + std::to_string(cfg.seed) +
                 " trials=" + std::to_string(trials) + " tol=" + format_g17(cfg.tol));
  report.row({"suite", "passes", "trials"});
  bool all_pass = true;
  auto suite_row = [&](const std::string& name, int passes, int total) {
    report.row({name, std::to_string(passes), std::to_string(total)});
    all_pass &= (passes == total);
  };

  {  // measurement bound: Delta >= half the outcome deviation
    Rng rng = root.split(1);
    RegisterLayout l = make_layout({{"M", 3}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const DensityOperator rho = random_density(rng, l);
      const DensityOperator sig = random_density(rng, l);
      const ComplexMatrix v = haar_unitary(rng, 3);
      ComplexMatrix e0(3, 3);
      for (int k = 0; k < 3; ++k) {
        const double s = rng.uniform();
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) e0(i, j) += s * v(i, k) * std::conj(v(j, k));
      }
      const ComplexMatrix e1 = ComplexMatrix::identity(3) - e0;
      const double dev = std::abs(trace(e0 * rho.matrix).real() - trace(e0 * sig.matrix).real()) +
                         std::abs(trace(e1 * rho.matrix).real() - trace(e1 * sig.matrix).real());
      pass += trace_distance(rho, sig) >= 0.5 * dev - cfg.tol;
    }
    suite_row("povm_bound", pass, trials);
  }

  {  // pure-encoding identity I(X:M) = h2((1 - overlap)/2)
    Rng rng = root.split(2);
    RegisterLayout l = make_layout({{"M", 4}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const PureState a = random_pure_state(rng, l);
      const PureState b = random_pure_state(rng, l);
      CqEnsemble ens;
      ens.coord_names = {"X"};
      ens.coord_cards = {2};
      ens.layout = l;
      ens.branches.push_back({{0}, 0.5, a});
      ens.branches.push_back({{1}, 0.5, b});
      const double mi = classical_conditional_mi(ens, {"X"}, {"M"}, {});
      pass += std::abs(mi - binary_entropy((1.0 - overlap(a, b)) / 2.0)) <= cfg.tol;
    }
    suite_row("pure_pinsker", pass, trials);
  }

  {  // mixed-encoding bound I(X:Q) >= 1 - F
    Rng rng = root.split(3);
    RegisterLayout l = make_layout({{"M", 2}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const DensityOperator s0 = random_density(rng, l);
      const DensityOperator s1 = random_density(rng, l);
      CqEnsemble ens;
      ens.coord_names = {"X"};
      ens.coord_cards = {2};
      ens.layout = l;
      ens.branches.push_back({{0}, 0.5, s0});
      ens.branches.push_back({{1}, 0.5, s1});
      const double mi = classical_conditional_mi(ens, {"X"}, {"M"}, {});
      pass += mi >= 1.0 - fidelity(s0, s1) - cfg.tol;
    }
    suite_row("mi_fidelity", pass, trials);
  }

  {  // strengthened bound I(X:M) >= h2(Delta^2 / 4) on pure encodings
    Rng rng = root.split(4);
    RegisterLayout l = make_layout({{"M", 4}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const PureState a = random_pure_state(rng, l);
      const PureState b = random_pure_state(rng, l);
      CqEnsemble ens;
      ens.coord_names = {"X"};
      ens.coord_cards = {2};
      ens.layout = l;
      ens.branches.push_back({{0}, 0.5, a});
      ens.branches.push_back({{1}, 0.5, b});
      const double mi = classical_conditional_mi(ens, {"X"}, {"M"}, {});
      const double d = trace_distance(a, b);
      pass += mi >= binary_entropy(d * d / 4.0) - cfg.tol;
    }
    suite_row("improved_bound", pass, trials);
  }

  {  // purification alignment achieves the reduced-state fidelity
    Rng rng = root.split(5);
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      RegisterLayout l = make_layout({{"A", 2}, {"B", t % 2 == 0 ? 2 : 4}});
      const PureState phi0 = random_pure_state(rng, l);
      const PureState phi1 = random_pure_state(rng, l);
      const ComplexMatrix v = uhlmann_unitary(phi0, phi1, {"A"});
      const double got = aligned_overlap(phi0, phi1, v, {"A"});
      const double want = fidelity(partial_trace(to_density(phi0), {"B"}),
                                   partial_trace(to_density(phi1), {"B"}));
      pass += std::abs(got - want) <= 1e-8;
    }
    suite_row("uhlmann_extraction", pass, trials);
  }

  {  // compensation bound: aligning the A side caps the joint leakage
    Rng rng = root.split(10);
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      RegisterLayout l = make_layout({{"A", 2}, {"B", 2}});
      const PureState phi0 = random_pure_state(rng, l);
      const PureState phi1 = random_pure_state(rng, l);
      const ComplexMatrix v = uhlmann_unitary(phi0, phi1, {"A"});
      const PureState moved = apply_on_registers(phi1, v, {"A"});
      CqEnsemble joint;
      joint.coord_names = {"X"};
      joint.coord_cards = {2};
      joint.layout = l;
      joint.branches.push_back({{0}, 0.5, phi0});
      joint.branches.push_back({{1}, 0.5, moved});
      const double after = classical_conditional_mi(joint, {"X"}, {"A", "B"}, {});
      CqEnsemble side;
      side.coord_names = {"X"};
      side.coord_cards = {2};
      side.layout = l;
      side.branches.push_back({{0}, 0.5, phi0});
      side.branches.push_back({{1}, 0.5, phi1});
      const double leak_b = classical_conditional_mi(side, {"X"}, {"B"}, {});
      pass += after <= binary_entropy(std::min(1.0, leak_b) / 2.0) + cfg.tol;
    }
    suite_row("purification_compensation", pass, trials);
  }

  {  // Schmidt symmetry of bipartite pure states
    Rng rng = root.split(7);
    RegisterLayout l = make_layout({{"A", 2}, {"B", 4}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const DensityOperator rho = to_density(random_pure_state(rng, l));
      const double sa = von_neumann_entropy(partial_trace(rho, {"A"}));
      const double sb = von_neumann_entropy(partial_trace(rho, {"B"}));
      pass += std::abs(sa - sb) <= cfg.tol;
    }
    suite_row("schmidt_symmetry", pass, trials);
  }

  {  // an uncorrelated pure ancilla changes no mutual information
    Rng rng = root.split(8);
    RegisterLayout lab = make_layout({{"A", 2}, {"B", 2}});
    RegisterLayout lc = make_layout({{"C", 2}});
    RegisterLayout labc = make_layout({{"A", 2}, {"B", 2}, {"C", 2}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const DensityOperator rho = random_density(rng, lab);
      const PureState anc = random_pure_state(rng, lc);
      DensityOperator ext(labc, tensor(rho.matrix, to_density(anc).matrix));
      const double base = mutual_information(rho, {"A"}, {"B"});
      pass += std::abs(mutual_information(ext, {"A", "C"}, {"B"}) - base) <= cfg.tol;
    }
    suite_row("ancilla_neutrality", pass, trials);
  }

  {  // distance measures are invariant under a common unitary
    Rng rng = root.split(9);
    RegisterLayout l = make_layout({{"M", 4}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const DensityOperator rho = random_density(rng, l);
      const DensityOperator sig = random_density(rng, l);
      const ComplexMatrix v = haar_unitary(rng, 4);
      DensityOperator rho_u(l, v * rho.matrix * dagger(v));
      DensityOperator sig_u(l, v * sig.matrix * dagger(v));
      const bool td =
          std::abs(trace_distance(rho_u, sig_u) - trace_distance(rho, sig)) <= cfg.tol;
      const bool fd = std::abs(fidelity(rho_u, sig_u) - fidelity(rho, sig)) <= cfg.tol;
      pass += td && fd;
    }
    suite_row("unitary_invariance", pass, trials);
  }

  {  // pure-state trace distance equals sqrt(1 - overlap^2)
    Rng rng = root.split(11);
    RegisterLayout l = make_layout({{"M", 3}});
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      const PureState a = random_pure_state(rng, l);
      const PureState b = random_pure_state(rng, l);
      const double direct = trace_distance(to_density(a), to_density(b));
      pass += std::abs(direct - trace_distance(a, b)) <= cfg.tol;
    }
    suite_row("pure_trace_identity", pass, trials);
  }

  {  // entropy sum bound
    Rng rng = root.split(6);
    int pass = 0;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> xs(1 + rng.uniform_int(64));
      for (double& x : xs) x = rng.uniform();
      pass += check_entropy_lemma(xs, cfg.tol);
    }
    suite_row("entropy_sum", pass, trials);
  }

  {  // h2(x) >= x log2(1/x) on a dense grid
    int pass = 0;
    const int n = 1000;
    for (int i = 1; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      pass += binary_entropy(x) >= x * std::log2(1.0 / x) - cfg.tol;
    }
    suite_row("h2_lower_bound", pass, n);
  }

  suite_row("concavity_grid", check_concavity(cfg.tol) ? 1 : 0, 1);

  emit(cfg, report.text);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and verifier for memoryless quantum communication protocols"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--tol", cfg.tol, "numerical tolerance for checks")->capture_default_str();
  app.add_option("--seed", cfg.seed, "PRNG seed")->capture_default_str();
  app.add_option("--cap", cfg.cap, "register-space dimension cap")->capture_default_str();
  app.add_option("--out", cfg.out, "output file (or prefix for compile)");

  int r_min = 1, r_max = 8, and_r = 0, trials = 200;
  std::string file, mu_name = "u0";
  bool do_private = false, do_oneshot = false, builtin_base = false;

  CLI::App* sweep = app.add_subcommand("and-sweep", "cost table of the AND protocol family");
  sweep->add_option("--r-min", r_min, "smallest repetition parameter")->capture_default_str();
  sweep->add_option("--r-max", r_max, "largest repetition parameter")->capture_default_str();

  CLI::App* aud = app.add_subcommand("audit", "lower-bound audit of a memoryless protocol");
  aud->add_option("protocol", file, "protocol JSON file");
  aud->add_option("--and", and_r, "audit the built-in AND protocol with this r");

  CLI::App* sim = app.add_subcommand("simulate", "output distributions of a protocol");
  sim->add_option("protocol", file, "protocol JSON file");
  sim->add_option("--and", and_r, "simulate the built-in AND protocol with this r");
  sim->add_option("--mu", mu_name, "input distribution: u0 | uniform")->capture_default_str();

  CLI::App* comp = app.add_subcommand("compile", "run a protocol compiler and verify it");
  comp->add_flag("--private", do_private, "privacy compiler");
  comp->add_flag("--oneshot", do_oneshot, "one-shot coin removal");
  comp->add_option("--in", file, "base protocol JSON file");
  comp->add_flag("--send-x-and", builtin_base, "use the built-in send-x AND base");
  comp->add_option("--mu", mu_name, "input distribution: u0 | uniform")->capture_default_str();

  CLI::App* lem = app.add_subcommand("lemmas", "seeded property suites for the identities");
  lem->add_option("--trials", trials, "trials per suite")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.check();
    if (sweep->parsed()) return cmd_and_sweep(cfg, r_min, r_max);
    if (aud->parsed()) {
      if (and_r <= 0 && file.empty()) throw Error("audit needs a protocol file or --and r");
      return cmd_audit(cfg, file, and_r);
    }
    if (sim->parsed()) {
      if (and_r <= 0 && file.empty()) throw Error("simulate needs a protocol file or --and r");
      return cmd_simulate(cfg, file, and_r, mu_name);
    }
    if (comp->parsed()) {
      if (!builtin_base && file.empty()) throw Error("compile needs --in or --send-x-and");
      return cmd_compile(cfg, do_private, do_oneshot, file, builtin_base, mu_name);
    }
    if (lem->parsed()) return cmd_lemmas(cfg, trials);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
