// Command-line front end: validation, relative entropies, rectification,
// composition, disintegration, the chain-rule example, and the law driver.
//
// Exit status: 0 success, 1 a check failed (invalid input, missing
// disintegration, failing law), 2 usage or I/O error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncstat/entropy.hpp"
#include "ncstat/laws.hpp"
#include "ncstat/serialize.hpp"

using namespace ncstat;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_violations(const ValidationReport& r) {
  for (const auto& v : r.violations) std::cout << "  violation " << v.kind << " [" << v.where << "] " << fmt(v.residual) << '\n';
}

double left_inverse_residual(const NCMorphism& m) {
  double worst = 0.0;
  for (const auto& e : matrix_units(m.source().algebra()))
    worst = std::max(worst, distance(apply_cpu(m.hypothesis(), apply_hom(m.hom(), e)), e));
  return worst;
}

int validate_file(const std::string& path, double atol) {
  const Json j = read_json(path);
  const std::string kind = detect_kind(j);
  std::cout << "kind: " << kind << '\n';
  ValidationReport report;
  if (kind == "state") {
    const State s = decode_state(j);
    report = validate_state(s, atol);
    double total = 0.0;
    for (std::size_t x = 0; x < s.algebra().num_blocks(); ++x) total += s.weight(x);
    std::cout << "normalization residual: " << fmt(std::abs(total - 1.0)) << '\n';
    std::cout << "faithful: " << (report.faithful ? "yes" : "no") << '\n';
  } else if (kind == "morphism") {
    const NCMorphism m = decode_morphism(j, atol);
    report = validate_morphism(m, atol);
    std::cout << "state-compatibility residual: "
              << fmt(trace_distance(pushforward_state(m.target(), m.hom()), m.source())) << '\n';
    std::cout << "left-inverse residual: " << fmt(left_inverse_residual(m)) << '\n';
    std::cout << "optimality residual: " << fmt(is_optimal(m, atol).residual) << '\n';
  } else if (kind == "cpu") {
    report = validate_cpu(decode_cpu(j), atol);
  } else if (kind == "hom") {
    const StarHom f = decode_hom(j, atol);  // the constructor enforces unitality and unitarity
    std::cout << "standard form: " << (f.is_standard_form(atol) ? "yes" : "no") << '\n';
  } else if (kind == "alphas") {
    const AlphaFamily a = decode_alphas(j);
    std::cout << "normalization residual: " << fmt(a.normalization_residual()) << '\n';
    std::cout << "min eigenvalue: " << fmt(a.min_eigenvalue()) << '\n';
    if (a.normalization_residual() > atol) report.add("normalization", "alphas", a.normalization_residual());
    if (a.min_eigenvalue() < -atol) report.add("negativity", "alphas", -a.min_eigenvalue());
  } else if (kind == "algebra") {
    decode_algebra(j);
  } else {
    throw FormatError("cannot validate a document of kind " + kind);
  }
  print_violations(report);
  std::cout << (report.valid() ? "valid" : "invalid") << '\n';
  return report.valid() ? 0 : 1;
}

Matrix read_density(const std::string& path) {
  const Json j = read_json(path);
  if (j.contains("re")) return decode_matrix(j);
  const State s = decode_state(j);
  if (s.algebra().num_blocks() != 1) throw FormatError("expected a single-block state or a bare matrix");
  return s.density(0);
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
  if (dims.size() != 3) throw CLI::ValidationError("--dims", "expected dA,dB,dC");
  return dims;
}

double default_tolerance() {
  if (const char* env = std::getenv("NCSTAT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) return v;
    std::cerr << "ignoring malformed NCSTAT_TOL=" << env << '\n';
  }
  return kDefaultAtol;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional non-commutative probability: hypotheses and relative entropy"};
  app.require_subcommand(1);
  double tol = default_tolerance();
  app.add_option("--tol", tol, "Absolute tolerance (overrides NCSTAT_TOL)")->check(CLI::PositiveNumber);

  std::string file, file2, out;
  double cutoff = kDefaultCutoff;

  auto* validate = app.add_subcommand("validate", "Validate a state, hom, CPU map, morphism or alpha family");
  validate->add_option("file", file)->required();

  auto* rel = app.add_subcommand("rel-entropy", "Relative entropy S(a||b) in nats");
  rel->add_option("a", file)->required();
  rel->add_option("b", file2)->required();
  rel->add_option("--cutoff", cutoff, "Eigenvalue cutoff relative to the largest eigenvalue");

  auto* re = app.add_subcommand("re", "RE of a morphism, S(omega || xi o Q)");
  re->add_option("morphism", file)->required();
  re->add_option("--cutoff", cutoff);

  auto* rectify = app.add_subcommand("rectify", "Rewrite a morphism with its hom in standard form");
  rectify->add_option("morphism", file)->required();
  rectify->add_option("-o,--output", out)->required();

  auto* compose = app.add_subcommand("compose", "Compose g: C -> B with f: B -> A");
  compose->add_option("g", file)->required();
  compose->add_option("f", file2)->required();
  compose->add_option("-o,--output", out)->required();

  auto* disintegrate = app.add_subcommand("disintegrate", "Construct an optimal hypothesis for a hom and a state");
  disintegrate->add_option("hom", file)->required();
  disintegrate->add_option("state", file2)->required();
  disintegrate->add_option("-o,--output", out)->required();

  std::string dims_text;
  auto* chain = app.add_subcommand("chain-rule", "Conditional entropies and REs for C -> BC -> ABC");
  chain->add_option("rho", file)->required();
  chain->add_option("--dims", dims_text, "dA,dB,dC")->required();

  GeneratorConfig cfg;
  bool serial = false;
  bool as_json = false;
  auto* check = app.add_subcommand("check", "Run the property laws over random instances");
  check->add_option("--seed", cfg.seed);
  check->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  // Without the flag, rank-deficient states and alphas are drawn too.
  cfg.faithful_only = false;
  check->add_flag("--faithful-only", cfg.faithful_only, "Only faithful states and alphas");
  check->add_option("--max-blocks", cfg.max_blocks)->check(CLI::PositiveNumber);
  check->add_option("--max-dim", cfg.max_block_dim)->check(CLI::PositiveNumber);
  check->add_flag("--serial", serial, "Run trials on one thread");
  check->add_flag("--json", as_json, "Print the report as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return validate_file(file, tol);

    if (*rel) {
      std::cout << to_string(relative_entropy(decode_state(read_json(file)), decode_state(read_json(file2)), cutoff))
                << '\n';
      return 0;
    }

    if (*re) {
      std::cout << to_string(re_functor(decode_morphism(read_json(file), tol), cutoff)) << '\n';
      return 0;
    }

    if (*rectify) {
      const Rectification r = rectify_morphism(decode_morphism(read_json(file), tol));
      write_json(out, {{"kind", "rectification"}, {"unitary", encode(r.unitary)}, {"morphism", encode(r.morphism)}});
      std::cout << "wrote " << out << '\n';
      return 0;
    }

    if (*compose) {
      const NCMorphism h = compose_morphisms(decode_morphism(read_json(file), tol), decode_morphism(read_json(file2), tol));
      write_json(out, encode(h));
      std::cout << "wrote " << out << '\n';
      return 0;
    }

    if (*disintegrate) {
      const Disintegration d = construct_optimal_hypothesis(decode_hom(read_json(file), tol), decode_state(read_json(file2)), tol);
      if (!d.found()) {
        write_json(out, {{"kind", "no-disintegration"}, {"obstruction", d.obstruction}, {"residual", d.residual}});
        std::cout << "no disintegration: " << d.obstruction << " (residual " << fmt(d.residual) << ")\n";
        return 1;
      }
      write_json(out, {{"kind", "disintegration"}, {"morphism", encode(*d.morphism)}, {"alphas", encode(*d.alphas)}});
      std::cout << "wrote " << out << '\n';
      return 0;
    }

    if (*chain) {
      const auto d = parse_dims(dims_text);
      const ChainRuleReport r = chain_rule(read_density(file), d[0], d[1], d[2]);
      const double ln_a = std::log(r.d_a);
      const double ln_b = std::log(r.d_b);
      std::cout << "H(AB|C) = " << fmt(r.h_ab_given_c) << '\n'
                << "H(A|BC) = " << fmt(r.h_a_given_bc) << '\n'
                << "H(B|C) = " << fmt(r.h_b_given_c) << '\n'
                << "H(A|BC) + H(B|C) = " << fmt(r.h_a_given_bc + r.h_b_given_c) << '\n'
                << "RE(total) = " << to_string(r.re_composite) << "   H(AB|C) + ln dA dB = "
                << fmt(r.h_ab_given_c + ln_a + ln_b) << '\n'
                << "RE(inner) = " << to_string(r.re_inner) << "   H(B|C) + ln dB = " << fmt(r.h_b_given_c + ln_b) << '\n'
                << "RE(outer) = " << to_string(r.re_outer) << "   H(A|BC) + ln dA = " << fmt(r.h_a_given_bc + ln_a)
                << '\n'
                << "max defect = " << fmt(r.max_defect()) << '\n';
      return 0;
    }

    if (*check) {
      cfg.atol = tol;
      const LawReport report = run_laws(cfg, serial ? Execution::serial : Execution::parallel);
      if (as_json) {
        std::cout << encode(report).dump(2) << '\n';
      } else {
        std::cout << format_report(report);
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
