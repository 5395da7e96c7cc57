#pragma once

// Objects (A, ω), morphisms (F, Q): (B, ξ) → (A, ω) with F a unital
// *-homomorphism B → A and Q a CPU map A ⇝ B satisfying ω∘F = ξ and Q∘F = id,
// rectification to standard form, and disintegrations in terms of the
// positive matrices α_yx.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncstat/algebra.hpp"
#include "ncstat/maps.hpp"
#include "ncstat/validation.hpp"

namespace ncstat {

/// An object is a state; the state carries its algebra.
using NCObject = State;

/// Object equality used when composing: same algebra, each block density
/// within this Frobenius distance.
inline constexpr double kObjectTolerance = 1e-8;

class NCMorphism {
 public:
  /// Shapes are checked here; the two axioms are validate_morphism's job.
  NCMorphism(State source, State target, StarHom hom, CPUMap hypothesis);

  const State& source() const { return source_; }  // (B, ξ)
  const State& target() const { return target_; }  // (A, ω)
  const StarHom& hom() const { return hom_; }      // F: B → A
  const CPUMap& hypothesis() const { return hypothesis_; }  // Q: A ⇝ B

 private:
  State source_;
  State target_;
  StarHom hom_;
  CPUMap hypothesis_;
};

NCMorphism identity_morphism(const State& object);

/// ω∘Ad_u, i.e. densities u† D_x u.
State conjugate_state(const State& omega, const AlgebraElement& u);

/// Residuals of ω∘F = ξ (trace distance) and Q∘F = id (max over matrix
/// units), plus validate_cpu(Q) and validate_state on both objects.
ValidationReport validate_morphism(const NCMorphism& m, double atol = kDefaultAtol);

struct OptimalityCheck {
  bool optimal = false;
  double residual = 0.0;  // Frobenius distance between ξ∘Q and ω
};
OptimalityCheck is_optimal(const NCMorphism& m, double atol = kDefaultAtol);

struct Rectification {
  AlgebraElement unitary;  // U, the conjugators of the original hom
  NCMorphism morphism;     // (Ad_{U†}∘F, Q∘Ad_U): (B, ξ) → (A, ω∘Ad_U)
};
Rectification rectify_morphism(const NCMorphism& m);

struct PairRectification {
  AlgebraElement outer_unitary;  // U on A
  AlgebraElement inner_unitary;  // V on B
  NCMorphism inner;              // (Ad_{V†}∘G, R∘Ad_V): (C, ζ) → (B, ξ∘Ad_V)
  NCMorphism outer;              // (Ad_{U†}∘F∘Ad_V, Ad_{V†}∘Q∘Ad_U): (B, ξ∘Ad_V) → (A, ω∘Ad_U)
};
/// g: (C, ζ) → (B, ξ) followed by f: (B, ξ) → (A, ω).
PairRectification rectify_pair(const NCMorphism& g, const NCMorphism& f);

struct CompositeRectification {
  std::vector<Matrix> permutations;  // P_x per block of A
  NCMorphism composite;              // (Ad_{P†}∘F∘G, R∘Q∘Ad_P), in standard form
};
/// Both g and f must already be in standard form.
CompositeRectification rectify_composite(const NCMorphism& g, const NCMorphism& f, double atol = kDefaultAtol);

/// f∘g = (F∘G, R∘Q): (C, ζ) → (A, ω). Throws StructuralError when g's
/// target object differs from f's source object.
NCMorphism compose_morphisms(const NCMorphism& g, const NCMorphism& f, double object_tol = kObjectTolerance);

/// Positive matrices α_yx (c[y][x] × c[y][x]) for every pair with c[y][x] > 0.
class AlphaFamily {
 public:
  /// alphas[y * num_target_blocks + x]; ignored (may be empty) where c[y][x] = 0.
  AlphaFamily(Multiplicities mult, std::vector<Matrix> alphas);

  const Multiplicities& multiplicities() const { return mult_; }
  std::size_t num_source_blocks() const { return static_cast<std::size_t>(mult_.rows()); }
  std::size_t num_target_blocks() const { return static_cast<std::size_t>(mult_.cols()); }
  bool present(std::size_t y, std::size_t x) const;
  const Matrix& alpha(std::size_t y, std::size_t x) const;

  /// max_y |Σ_x tr α_yx − 1|.
  double normalization_residual() const;
  /// Smallest eigenvalue across all present α.
  double min_eigenvalue() const;

 private:
  Multiplicities mult_;
  std::vector<Matrix> alphas_;
};

/// max over (y, x) of ‖α_yx − β_yx‖_F.
double max_distance(const AlphaFamily& a, const AlphaFamily& b);

class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Reads α off the state ξ∘Q for a morphism whose hom is in standard form:
/// every diagonal segment of ξ∘Q must equal α_yx ⊗ q_yσ_y and every
/// off-diagonal segment must vanish. Source blocks with q_y ≤ atol carry no
/// information in ξ∘Q; their α is read from the action of Q instead.
AlphaFamily extract_alphas(const NCMorphism& m, double atol = kDefaultAtol);

/// Q_yx(A_x) = tr_{M_c}((α_yx ⊗ 1_{n_y}) segment_yy(U_x† A_x U_x)).
CPUMap hypothesis_from_alphas(const StarHom& f, const AlphaFamily& alpha);

/// Densities U_x (⊞_y α_yx ⊗ q_yσ_y) U_x†, the state ξ∘Q for the hypothesis above.
State disintegration_state(const StarHom& f, const State& xi, const AlphaFamily& alpha);

/// The morphism (B, ξ) → (A, ω) with Q from α. Without an explicit target,
/// ω = disintegration_state(F, ξ, α) and the morphism is optimal.
NCMorphism build_hypothesis_from_alphas(const StarHom& f, const State& xi, const AlphaFamily& alpha,
                                        const std::optional<State>& target = std::nullopt,
                                        double atol = kDefaultAtol);

struct Disintegration {
  std::optional<NCMorphism> morphism;
  std::optional<AlphaFamily> alphas;
  double residual = 0.0;
  std::string obstruction;  // empty on success
  bool found() const { return morphism.has_value(); }
};

/// Tries to build an optimal hypothesis for F against ω. Failure to
/// disintegrate is reported in the result, not thrown.
Disintegration construct_optimal_hypothesis(const StarHom& f, const State& omega, double atol = kDefaultAtol);

}  // namespace ncstat
