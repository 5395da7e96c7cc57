#include "ncstat/laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ncstat/entropy.hpp"

namespace ncstat {

namespace {

enum Law : std::size_t {
  kSoundness,
  kNonnegativity,
  kClosure,
  kFunctoriality,
  kExpansionOuter,
  kExpansionInner,
  kExpansionComposite,
  kCompositeState,
  kPushforward,
  kVanishing,
  kOptimality,
  kInvariance,
  kRectifiedValidity,
  kAffinity,
  kChainRule,
  kClassical,
  kRoundTrip,
  kSelfDivergence,
  kDivergenceNonneg,
  kTrialErrors,
  kNumLaws
};

struct LawInfo {
  const char* name;
  double tolerance;  // negative: use cfg.atol
};

constexpr std::array<LawInfo, kNumLaws> kLaws{{
    {"generator-soundness", -1},
    {"nonnegativity", 1e-10},
    {"category-closure", -1},
    {"functoriality", 1e-8},
    {"expansion-outer", 1e-8},
    {"expansion-inner", 1e-8},
    {"expansion-composite", 1e-8},
    {"composite-disintegration-state", 1e-9},
    {"pushforward-consistency", 1e-10},
    {"vanishing-on-optimal", 1e-9},
    {"optimality", -1},
    {"standard-form-invariance", 1e-9},
    {"rectification-validity", -1},
    {"affinity", 1e-9},
    {"chain-rule", 1e-9},
    {"classical-reduction", 1e-12},
    {"disintegration-round-trip", 1e-10},
    {"self-divergence", 1e-10},
    {"divergence-nonnegativity", 1e-10},
    {"trial-errors", 0.0},
}};

struct Sample {
  int evaluated = 0;
  int failed = 0;
  int skipped = 0;
  int infinite = 0;
  double max_defect = 0.0;
};

using TrialResult = std::array<Sample, kNumLaws>;

class Recorder {
 public:
  Recorder(const GeneratorConfig& cfg, TrialResult& out) : cfg_(cfg), out_(out) {}

  double tolerance(Law law) const { return kLaws[law].tolerance < 0 ? cfg_.atol : kLaws[law].tolerance; }

  void record(Law law, double defect) {
    Sample& s = out_[law];
    ++s.evaluated;
    if (!(defect <= tolerance(law))) ++s.failed;
    if (std::isnan(defect)) defect = std::numeric_limits<double>::infinity();
    s.max_defect = std::max(s.max_defect, defect);
  }
  void skip(Law law) { ++out_[law].skipped; }
  void infinite(Law law) { ++out_[law].infinite; }

  void record_report(Law law, const ValidationReport& r) {
    double worst = 0.0;
    for (const auto& v : r.violations) worst = std::max(worst, std::abs(v.residual));
    // A violation must fail even when its residual is small.
    record(law, r.valid() ? 0.0 : std::max(worst, 2.0 * tolerance(law) + 1.0));
  }

  void record_nonneg(Law law, ExtendedReal v) {
    if (v.is_infinite()) {
      infinite(law);
      return;
    }
    record(law, std::max(0.0, -v.value()));
  }

 private:
  const GeneratorConfig& cfg_;
  TrialResult& out_;
};

double re_difference(ExtendedReal a, ExtendedReal b) {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite() || b.is_infinite()) return std::numeric_limits<double>::infinity();
  return std::abs(a.value() - b.value());
}

void run_trial(const GeneratorConfig& cfg, std::uint64_t index, TrialResult& out) {
  Recorder rec(cfg, out);
  Rng rng = Rng::stream(cfg.seed, index);
  const double cutoff = cfg.cutoff;

  // Composable pair: validity, closure, nonnegativity, functoriality, expansions.
  const ComposablePair pair = gen_composable_pair(rng, cfg);
  const NCMorphism& g = pair.inner;
  const NCMorphism& f = pair.outer;
  rec.record_report(kSoundness, validate_morphism(g, cfg.atol));
  rec.record_report(kSoundness, validate_morphism(f, cfg.atol));

  const NCMorphism composite = compose_morphisms(g, f);
  rec.record_report(kClosure, validate_morphism(composite, cfg.atol));

  const FunctorialityResult fr = functoriality_defect(g, f, cutoff);
  for (ExtendedReal v : {fr.composite, fr.inner, fr.outer}) rec.record_nonneg(kNonnegativity, v);
  if (fr.defect) {
    rec.record(kFunctoriality, *fr.defect);
  } else {
    rec.infinite(kFunctoriality);
  }

  if (cfg.faithful_only) {
    const FunctorialityExpansion ex = expand_functoriality(g, f, cfg.atol, cutoff);
    rec.record(kExpansionOuter, ex.outer.defect());
    rec.record(kExpansionInner, ex.inner.defect());
    rec.record(kExpansionComposite, ex.composite.defect());
    rec.record(kCompositeState, ex.composite_state_residual);
  } else {
    for (Law law : {kExpansionOuter, kExpansionInner, kExpansionComposite, kCompositeState}) rec.skip(law);
  }

  // Pushforward by segments against ξ(B) = ω(F(B)) on matrix units.
  {
    const StarHom& hom = f.hom();
    const State pushed = pushforward_state(f.target(), hom);
    double worst = 0.0;
    for (std::size_t y = 0; y < hom.source().num_blocks(); ++y) {
      const int n = hom.source().block_dim(y);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Complex direct = f.target().expectation(apply_hom(hom, AlgebraElement::matrix_unit(hom.source(), y, i, j)));
          worst = std::max(worst, std::abs(direct - pushed.density(y)(j, i)));
        }
    }
    rec.record(kPushforward, worst);
  }

  // Standard-form invariance and rectification on the generated f (Haar conjugators).
  {
    const Rectification r = rectify_morphism(f);
    rec.record(kInvariance, re_difference(re_functor(f, cutoff), re_functor(r.morphism, cutoff)));
    rec.record_report(kRectifiedValidity, validate_morphism(r.morphism, cfg.atol));
  }

  // Optimal morphisms.
  {
    const NCMorphism opt = gen_optimal_morphism(rng, cfg);
    const ExtendedReal v = re_functor(opt, cutoff);
    rec.record_nonneg(kNonnegativity, v);
    rec.record(kVanishing, v.is_infinite() ? v.raw() : std::abs(v.value()));
    rec.record(kOptimality, is_optimal(opt, cfg.atol).residual);
    const Rectification r = rectify_morphism(opt);
    rec.record(kOptimality, is_optimal(r.morphism, cfg.atol).residual);
    rec.record(kInvariance, re_difference(v, re_functor(r.morphism, cutoff)));
    rec.record_report(kRectifiedValidity, validate_morphism(r.morphism, cfg.atol));
  }

  // Affinity over the two morphisms of the pair.
  {
    const ExtendedReal re_f = fr.outer;
    const ExtendedReal re_g = fr.inner;
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      if (re_f.is_infinite() || re_g.is_infinite()) {
        rec.infinite(kAffinity);
        continue;
      }
      const ExtendedReal mixed = re_functor(convex_sum_morphisms(lambda, f, g), cutoff);
      rec.record(kAffinity, mixed.is_infinite()
                                ? mixed.raw()
                                : std::abs(mixed.value() - lambda * re_f.value() - (1.0 - lambda) * re_g.value()));
    }
  }

  // Chain rule on 2⊗2⊗2.
  {
    const ChainRuleReport cr = chain_rule(gen_density(rng, 8, cfg.faithful_only), 2, 2, 2, cutoff);
    if (cr.re_composite.is_infinite() || cr.re_inner.is_infinite() || cr.re_outer.is_infinite()) {
      rec.infinite(kChainRule);
    } else {
      rec.record(kChainRule, cr.max_defect());
    }
  }

  // Commutative reduction against the scalar KL sum.
  {
    const int k = rng.uniform_int(1, cfg.max_blocks * cfg.max_block_dim);
    const auto p = gen_distribution(rng, k, cfg.faithful_only);
    const auto q = gen_distribution(rng, k, cfg.faithful_only);
    const AlgebraSpec alg(std::vector<int>(static_cast<std::size_t>(k), 1));
    std::vector<Matrix> dp, dq;
    for (int i = 0; i < k; ++i) {
      dp.push_back(Matrix::Constant(1, 1, p[static_cast<std::size_t>(i)]));
      dq.push_back(Matrix::Constant(1, 1, q[static_cast<std::size_t>(i)]));
    }
    const ExtendedReal v = relative_entropy(State(alg, dp), State(alg, dq), cutoff);
    const double oracle = scalar_kl(p, q);
    if (v.is_infinite()) rec.infinite(kClassical);
    rec.record(kClassical, re_difference(v, oracle == std::numeric_limits<double>::infinity()
                                                ? ExtendedReal::infinity()
                                                : ExtendedReal(oracle)));
  }

  // Disintegration round trip on a standard-form hom.
  {
    const AlgebraSpec b = gen_algebra(rng, cfg);
    const StarHom hom = gen_hom(rng, cfg, b).standard_part();
    const State xi = gen_state(rng, cfg, b);
    const AlphaFamily alpha = gen_alphas(rng, hom.multiplicities(), cfg.faithful_only);
    const NCMorphism m = build_hypothesis_from_alphas(hom, xi, alpha, std::nullopt, cfg.atol);
    rec.record(kRoundTrip, max_distance(extract_alphas(m, cfg.atol), alpha));
  }

  // Divergences between independent states, which may leave the support.
  {
    const AlgebraSpec alg = gen_algebra(rng, cfg);
    const State a = gen_state(rng, cfg, alg);
    const State b = gen_state(rng, cfg, alg);
    rec.record_nonneg(kDivergenceNonneg, relative_entropy(a, b, cutoff));
    rec.record_nonneg(kDivergenceNonneg, relative_entropy(b, a, cutoff));
    const ExtendedReal self = relative_entropy(a, a, cutoff);
    rec.record(kSelfDivergence, self.is_infinite() ? self.raw() : std::abs(self.value()));
  }
}

TrialResult guarded_trial(const GeneratorConfig& cfg, std::uint64_t index) {
  TrialResult out{};
  try {
    run_trial(cfg, index, out);
    Recorder(cfg, out).record(kTrialErrors, 0.0);
  } catch (const std::exception&) {
    Recorder(cfg, out).record(kTrialErrors, std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace

bool LawReport::all_passed() const {
  return std::all_of(laws.begin(), laws.end(), [](const LawStats& s) { return s.ok(); });
}

int LawReport::total_infinite() const {
  int n = 0;
  for (const auto& s : laws) n += s.infinite;
  return n;
}

const LawStats& LawReport::law(const std::string& name) const {
  for (const auto& s : laws)
    if (s.name == name) return s;
  throw std::out_of_range("no law named " + name);
}

bool operator==(const LawStats& a, const LawStats& b) {
  return a.name == b.name && a.tolerance == b.tolerance && a.evaluated == b.evaluated && a.passed == b.passed &&
         a.skipped == b.skipped && a.infinite == b.infinite && a.max_defect == b.max_defect &&
         a.failing_trials == b.failing_trials;
}

bool operator==(const LawReport& a, const LawReport& b) {
  return a.config.seed == b.config.seed && a.config.trials == b.config.trials && a.laws == b.laws;
}

const std::vector<std::string>& law_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& l : kLaws) v.emplace_back(l.name);
    return v;
  }();
  return names;
}

LawReport run_laws(const GeneratorConfig& cfg, Execution exec) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialResult> results(n);

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(n); ++t)
      results[static_cast<std::size_t>(t)] = guarded_trial(cfg, static_cast<std::uint64_t>(t));
  } else {
    for (std::size_t t = 0; t < n; ++t) results[t] = guarded_trial(cfg, t);
  }

  LawReport report;
  report.config = cfg;
  for (std::size_t l = 0; l < kNumLaws; ++l) {
    LawStats s;
    s.name = kLaws[l].name;
    s.tolerance = kLaws[l].tolerance < 0 ? cfg.atol : kLaws[l].tolerance;
    for (std::size_t t = 0; t < n; ++t) {
      const Sample& smp = results[t][l];
      s.evaluated += smp.evaluated;
      s.passed += smp.evaluated - smp.failed;
      s.skipped += smp.skipped;
      s.infinite += smp.infinite;
      s.max_defect = std::max(s.max_defect, smp.max_defect);
      if (smp.failed > 0) s.failing_trials.push_back(t);
    }
    report.laws.push_back(std::move(s));
  }
  return report;
}

double scalar_kl(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("scalar_kl: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return s;
}

std::string format_report(const LawReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "seed %llu, %d trials, %s, max %d blocks of dim <= %d\n",
                static_cast<unsigned long long>(report.config.seed), report.config.trials,
                report.config.faithful_only ? "faithful only" : "non-faithful allowed", report.config.max_blocks,
                report.config.max_block_dim);
  os << line;
  std::snprintf(line, sizeof line, "%-32s %8s %8s %8s %8s %12s %10s  %s\n", "law", "checked", "passed", "skipped",
                "infinite", "max defect", "tolerance", "status");
  os << line;
  for (const auto& s : report.laws) {
    std::snprintf(line, sizeof line, "%-32s %8d %8d %8d %8d %12.3e %10.1e  %s\n", s.name.c_str(), s.evaluated,
                  s.passed, s.skipped, s.infinite, s.max_defect, s.tolerance, s.ok() ? "ok" : "FAIL");
    os << line;
    if (!s.ok()) {
      os << "    failing trials (seed " << report.config.seed << "):";
      for (std::size_t i = 0; i < s.failing_trials.size() && i < 10; ++i) os << ' ' << s.failing_trials[i];
      if (s.failing_trials.size() > 10) os << " ...";
      os << '\n';
    }
  }
  os << (report.all_passed() ? "all laws hold\n" : "some laws FAILED\n");
  return os.str();
}

}  // namespace ncstat
