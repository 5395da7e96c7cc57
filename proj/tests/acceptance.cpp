// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "ncstat/entropy.hpp"
#include "ncstat/generators.hpp"
#include "ncstat/laws.hpp"

using namespace ncstat;

namespace {

constexpr std::uint64_t kSeed = 42;
const double kLn2 = std::log(2.0);

int failures = 0;

void report(bool ok, const char* id, const std::string& detail) {
  std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  if (!ok) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Worst-case tracker that treats NaN and ∞ as failures.
struct Worst {
  double value = 0.0;
  bool broken = false;
  void add(double v) {
    if (!std::isfinite(v)) broken = true;
    else value = std::max(value, v);
  }
  bool within(double tol) const { return !broken && value <= tol; }
  std::string str() const { return broken ? "non-finite" : sci(value); }
};

Matrix ghz() {
  Matrix m = Matrix::Zero(8, 8);
  m(0, 0) = m(0, 7) = m(7, 0) = m(7, 7) = 0.5;
  return m;
}

State classical_state(const std::vector<double>& p) {
  std::vector<Matrix> d;
  for (double v : p) d.push_back(Matrix::Constant(1, 1, v));
  return State(AlgebraSpec(std::vector<int>(p.size(), 1)), std::move(d));
}

}  // namespace

int main() {
  const GeneratorConfig faithful{.seed = kSeed};
  const GeneratorConfig degenerate{.seed = kSeed, .faithful_only = false};
  double min_re = std::numeric_limits<double>::infinity();
  int re_count = 0;
  auto track = [&](ExtendedReal v) {
    ++re_count;
    if (v.is_finite()) min_re = std::min(min_re, v.value());
  };

  // 200 faithful composable pairs, one RNG stream each.
  std::vector<ComposablePair> pairs;
  const auto t0 = std::chrono::steady_clock::now();
  Worst functoriality;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = Rng::stream(kSeed, i);
    pairs.push_back(gen_composable_pair(rng, faithful));
    const FunctorialityResult r = functoriality_defect(pairs.back().inner, pairs.back().outer);
    track(r.composite), track(r.inner), track(r.outer);
    functoriality.add(r.defect ? *r.defect : std::numeric_limits<double>::infinity());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(functoriality.within(1e-8) && seconds <= 30.0, "AC1",
         "functoriality: max |RE(F∘G,R∘Q) - RE(G,R) - RE(F,Q)| = " + functoriality.str() +
             " over 200 faithful pairs (tol 1e-8), " + sci(seconds) + " s (limit 30 s)");

  {
    Worst outer, inner, composite;
    for (const auto& p : pairs) {
      const FunctorialityExpansion e = expand_functoriality(p.inner, p.outer);
      outer.add(e.outer.defect());
      inner.add(e.inner.defect());
      composite.add(e.composite.defect());
    }
    report(outer.within(1e-8) && inner.within(1e-8) && composite.within(1e-8), "AC2",
           "expansion identities: max defects " + outer.str() + " (outer), " + inner.str() + " (inner), " +
               composite.str() + " (composite) over 200 pairs (tol 1e-8)");
  }

  {
    Worst vanish;
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng = Rng::stream(kSeed + 1, i);
      const ExtendedReal v = re_functor(gen_optimal_morphism(rng, faithful));
      track(v);
      vanish.add(v.is_finite() ? std::abs(v.value()) : v.raw());
    }
    report(vanish.within(1e-9), "AC3", "vanishing on optimal morphisms: max |RE| = " + vanish.str() + " over 200 (tol 1e-9)");
  }

  {
    Worst invariance;
    for (const auto& p : pairs) {
      const ExtendedReal before = re_functor(p.outer);
      const ExtendedReal after = re_functor(rectify_morphism(p.outer).morphism);
      track(after);
      invariance.add(std::abs(before.raw() - after.raw()));
    }
    report(invariance.within(1e-9), "AC4",
           "standard-form invariance: max |RE before - RE after| = " + invariance.str() +
               " over 200 Haar-conjugated morphisms (tol 1e-9)");
  }

  {
    Worst affinity;
    int used = 0;
    for (std::size_t i = 0; i < pairs.size() && used < 50; ++i) {
      const NCMorphism& m = pairs[i].outer;
      const NCMorphism& mbar = pairs[i].inner;
      const ExtendedReal a = re_functor(m), b = re_functor(mbar);
      if (a.is_infinite() || b.is_infinite()) continue;
      ++used;
      for (double l : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const ExtendedReal mixed = re_functor(convex_sum_morphisms(l, m, mbar));
        track(mixed);
        affinity.add(std::abs(mixed.raw() - l * a.value() - (1 - l) * b.value()));
      }
    }
    report(affinity.within(1e-9) && used == 50, "AC5",
           "affinity: max defect " + affinity.str() + " over " + std::to_string(used) + " finite pairs x 5 lambdas (tol 1e-9)");
  }

  {
    Worst chain;
    for (std::uint64_t i = 0; i < 50; ++i) {
      Rng rng = Rng::stream(kSeed + 2, i);
      const ChainRuleReport r = chain_rule(gen_density(rng, 8, true), 2, 2, 2);
      track(r.re_composite), track(r.re_inner), track(r.re_outer);
      chain.add(r.max_defect());
    }
    const ChainRuleReport g = chain_rule(ghz(), 2, 2, 2);
    const double ghz_gap = std::abs(g.re_composite.raw() - 3 * kLn2);
    const ChainRuleReport mm = chain_rule(Matrix::Identity(8, 8) / 8.0, 2, 2, 2);
    const double mm_gap = std::max({std::abs(mm.re_composite.raw()), std::abs(mm.re_inner.raw()), std::abs(mm.re_outer.raw())});
    report(chain.within(1e-9) && ghz_gap <= 1e-9 && g.max_defect() <= 1e-9 && mm_gap <= 1e-10, "AC6",
           "chain rule: max defect " + chain.str() + " over 50 states on 2x2x2 (tol 1e-9); GHZ |RE - 3 ln 2| = " +
               sci(ghz_gap) + "; maximally mixed max |RE| = " + sci(mm_gap) + " (tol 1e-10)");
  }

  {
    Worst classical;
    int infinite = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      Rng rng = Rng::stream(kSeed + 3, i);
      const int k = rng.uniform_int(1, 9);
      const bool allow_zeros = i % 2 == 1;
      const auto p = gen_distribution(rng, k, !allow_zeros);
      const auto q = gen_distribution(rng, k, !allow_zeros);
      const ExtendedReal v = relative_entropy(classical_state(p), classical_state(q));
      const double oracle = scalar_kl(p, q);
      if (std::isinf(oracle) || v.is_infinite()) {
        ++infinite;
        classical.add(std::isinf(oracle) && v.is_infinite() ? 0.0 : std::numeric_limits<double>::infinity());
      } else {
        classical.add(std::abs(v.value() - oracle));
      }
    }
    const double spot = relative_entropy(classical_state({0.5, 0.5}), classical_state({0.75, 0.25})).value();
    const double spot_gap = std::abs(spot - 0.5 * std::log(4.0 / 3.0));
    report(classical.within(1e-12) && spot_gap <= 1e-12, "AC7",
           "classical reduction: max |S - KL| = " + classical.str() + " over 100 pairs (" + std::to_string(infinite) +
               " both infinite, tol 1e-12); KL((1/2,1/2)||(3/4,1/4)) = " + std::to_string(spot));
  }

  {
    int infinite = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng = Rng::stream(kSeed + 4, i);
      const ComposablePair p = gen_composable_pair(rng, degenerate);
      for (const NCMorphism* m : {&p.inner, &p.outer}) {
        const ExtendedReal v = re_functor(*m);
        track(v);
        if (v.is_infinite()) ++infinite;
      }
      const FunctorialityResult r = functoriality_defect(p.inner, p.outer);
      track(r.composite);
      if (r.composite.is_infinite()) ++infinite;
    }
    const State mixed(AlgebraSpec({2}), {Matrix::Identity(2, 2) / 2.0});
    Matrix pure_d = Matrix::Zero(2, 2);
    pure_d(0, 0) = 1.0;
    const bool deterministic = relative_entropy(mixed, State(AlgebraSpec({2}), {pure_d})).is_infinite();
    report(infinite > 0 && deterministic, "AC8",
           "infinite branch: " + std::to_string(infinite) + " infinite REs among 600 non-faithful morphisms; " +
               "S(mixed || pure) = " + (deterministic ? "inf" : "finite"));
  }

  report(min_re >= -1e-10, "AC9",
         "nonnegativity: min RE = " + sci(min_re) + " over " + std::to_string(re_count) + " evaluations (bound -1e-10)");

  {
    Worst round_trip;
    for (std::uint64_t i = 0; i < 100; ++i) {
      Rng rng = Rng::stream(kSeed + 5, i);
      const StarHom f = gen_hom(rng, faithful, gen_algebra(rng, faithful)).standard_part();
      const AlphaFamily alpha = gen_alphas(rng, f.multiplicities(), true);
      const NCMorphism m = build_hypothesis_from_alphas(f, gen_state(rng, faithful, f.source()), alpha);
      round_trip.add(max_distance(extract_alphas(m), alpha));
    }
    report(round_trip.within(1e-10), "AC10",
           "disintegration round trip: max |alpha - extract(build(alpha))| = " + round_trip.str() +
               " over 100 faithful families (tol 1e-10)");
  }

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
