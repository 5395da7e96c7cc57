#pragma once

// Von Neumann and Umegaki relative entropy (nats), the relative entropy of a
// morphism RE(F, Q) = S(ω ‖ ξ∘Q), conditional entropy, and convex sums.

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ncstat/algebra.hpp"
#include "ncstat/hypotheses.hpp"
#include "ncstat/maps.hpp"

namespace ncstat {

/// A value in (−∞, ∞] with a + ∞ = ∞.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  /// Rejects NaN and −∞.
  explicit ExtendedReal(double v);
  static ExtendedReal infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

  bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
  bool is_finite() const { return !is_infinite(); }
  /// The finite value; throws std::domain_error on ∞.
  double value() const;
  /// The raw double, +inf for ∞.
  double raw() const { return value_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) { return ExtendedReal(a.value_ + b.value_); }
  friend ExtendedReal operator*(double s, ExtendedReal a);
  friend bool operator==(ExtendedReal, ExtendedReal) = default;

 private:
  double value_ = 0.0;
};

/// "inf" or the value with 17 significant digits.
std::string to_string(ExtendedReal v);

/// −Σ_x tr(D_x ln D_x) with 0 ln 0 = 0.
double von_neumann_entropy(const State& omega, double cutoff = kDefaultCutoff);
double von_neumann_entropy(const Matrix& density, double cutoff = kDefaultCutoff);

/// S(ω ‖ ω') = Σ_x tr D_x (ln D_x − ln D'_x), ∞ unless ω ⪯ ω'.
ExtendedReal relative_entropy(const State& omega, const State& omega_prime, double cutoff = kDefaultCutoff);

/// RE(F, Q) = S(ω ‖ ξ∘Q) for (F, Q): (B, ξ) → (A, ω).
ExtendedReal re_functor(const NCMorphism& m, double cutoff = kDefaultCutoff);

/// For a density on C^left ⊗ C^right, returns S(ρ_right) − S(ρ), i.e.
/// tr(ρ ln ρ) − tr(ρ_right ln ρ_right). This is the negative of the usual
/// textbook conditional entropy S(ρ) − S(ρ_right).
double conditional_entropy(const Matrix& rho, int left_dim, int right_dim, double cutoff = kDefaultCutoff);

NCObject convex_sum_objects(double lambda, const NCObject& left, const NCObject& right);
NCMorphism convex_sum_morphisms(double lambda, const NCMorphism& left, const NCMorphism& right);

struct FunctorialityResult {
  ExtendedReal composite;  // RE(F∘G, R∘Q)
  ExtendedReal inner;      // RE(G, R)
  ExtendedReal outer;      // RE(F, Q)
  std::optional<double> defect;  // set only when all three are finite
  std::string infinite_terms;    // e.g. "composite,outer" when some term is ∞
};
/// g: (C, ζ) → (B, ξ) then f: (B, ξ) → (A, ω).
FunctorialityResult functoriality_defect(const NCMorphism& g, const NCMorphism& f,
                                         double cutoff = kDefaultCutoff);

/// Direct relative entropies alongside their expansions in terms of the
/// disintegration matrices α_yx, the diagonal segments of ω, and the
/// densities of ξ and ζ∘R, computed after rectifying the pair.
struct ExpansionCheck {
  double direct = 0.0;
  double expanded = 0.0;
  double defect() const { return std::abs(direct - expanded); }
};
struct FunctorialityExpansion {
  ExpansionCheck outer;      // S(ω ‖ ξ∘Q)
  ExpansionCheck inner;      // S(ξ ‖ ζ∘R)
  ExpansionCheck composite;  // S(ω ‖ ζ∘R∘Q)
  /// max_x ‖ζ∘R∘Q density − U(⊞_y α_yx ⊗ q^R_y σ^R_y)U†‖_F, in the rectified frame.
  double composite_state_residual = 0.0;
};
/// Requires faithful states and hypotheses of disintegration form.
FunctorialityExpansion expand_functoriality(const NCMorphism& g, const NCMorphism& f,
                                            double atol = kDefaultAtol, double cutoff = kDefaultCutoff);

/// The pair C → B⊗C → A⊗B⊗C of standard inclusions with hypotheses
/// tr_B((1_B/d_B ⊗ 1_C)·) and tr_A((1_A/d_A ⊗ 1_{BC})·), carrying the
/// states ρ_C, ρ_BC, ρ_ABC.
struct ChainRulePair {
  NCMorphism inner;  // (C, ρ_C) → (B⊗C, ρ_BC)
  NCMorphism outer;  // (B⊗C, ρ_BC) → (A⊗B⊗C, ρ_ABC)
};
ChainRulePair chain_rule_pair(const Matrix& rho_abc, int d_a, int d_b, int d_c);

struct ChainRuleReport {
  double h_ab_given_c = 0.0;
  double h_a_given_bc = 0.0;
  double h_b_given_c = 0.0;
  ExtendedReal re_composite;
  ExtendedReal re_inner;
  ExtendedReal re_outer;
  /// max of |H(AB|C) − H(A|BC) − H(B|C)| and the three |RE − H − ln d| offsets.
  double max_defect() const;
  double d_a = 0.0, d_b = 0.0;
};
ChainRuleReport chain_rule(const Matrix& rho_abc, int d_a, int d_b, int d_c, double cutoff = kDefaultCutoff);

}  // namespace ncstat
