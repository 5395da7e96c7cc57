#pragma once

// Property-law driver. Each trial draws its own RNG stream from
// (seed, trial index), so the OpenMP path and the serial reference path
// produce identical reports.

#include <cstdint>
#include <string>
#include <vector>

#include "ncstat/generators.hpp"

namespace ncstat {

enum class Execution { serial, parallel };

struct LawStats {
  std::string name;
  double tolerance = 0.0;
  int evaluated = 0;
  int passed = 0;
  int skipped = 0;   // instances outside the law's hypotheses
  int infinite = 0;  // instances where a relative entropy was ∞ (logged, not failed)
  double max_defect = 0.0;
  std::vector<std::uint64_t> failing_trials;

  bool ok() const { return failing_trials.empty(); }
};

struct LawReport {
  GeneratorConfig config;
  std::vector<LawStats> laws;

  bool all_passed() const;
  int total_infinite() const;
  /// Throws std::out_of_range for unknown names.
  const LawStats& law(const std::string& name) const;
};

bool operator==(const LawStats& a, const LawStats& b);
bool operator==(const LawReport& a, const LawReport& b);

/// Names of the laws in report order.
const std::vector<std::string>& law_names();

LawReport run_laws(const GeneratorConfig& cfg, Execution exec = Execution::parallel);

/// Scalar Kullback–Leibler divergence in nats (∞ when q_i = 0 < p_i).
double scalar_kl(const std::vector<double>& p, const std::vector<double>& q);

std::string format_report(const LawReport& report);

}  // namespace ncstat
