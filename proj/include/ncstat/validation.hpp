#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ncstat {

struct Violation {
  std::string kind;   // e.g. "hermiticity", "normalization", "complete-positivity"
  std::string where;  // block or component label
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool faithful = false;

  bool valid() const { return violations.empty(); }
  void add(std::string kind, std::string where, double residual) {
    violations.push_back({std::move(kind), std::move(where), residual});
  }
  void merge(const ValidationReport& other, const std::string& prefix = {}) {
    for (const auto& v : other.violations)
      violations.push_back({v.kind, prefix.empty() ? v.where : prefix + v.where, v.residual});
  }
  /// Largest residual among violations of the given kind, or 0.
  double residual(const std::string& kind) const {
    double r = 0.0;
    for (const auto& v : violations)
      if (v.kind == kind && v.residual > r) r = v.residual;
    return r;
  }
};

}  // namespace ncstat
