#pragma once

// Random instances for the law driver: algebras, states, homs with
// Haar-random conjugators, disintegration data, and composable pairs.

#include <cstdint>
#include <vector>

#include "ncstat/algebra.hpp"
#include "ncstat/hypotheses.hpp"
#include "ncstat/maps.hpp"
#include "ncstat/rng.hpp"

namespace ncstat {

/// Minimum eigenvalue ratio λ_min / λ_max of faithful generated states.
inline constexpr double kFaithfulFloor = 1e-3;

struct GeneratorConfig {
  std::uint64_t seed = 42;
  int max_blocks = 3;
  int max_block_dim = 3;
  bool faithful_only = true;
  int trials = 200;
  double atol = kDefaultAtol;
  double cutoff = kDefaultCutoff;

  /// Throws std::invalid_argument unless max_blocks, max_block_dim, trials ≥ 1.
  void validate() const;
};

/// Entries i.i.d. standard complex Gaussian (real and imaginary parts N(0, 1/2)).
Matrix gaussian_matrix(Rng& rng, int rows, int cols);
/// QR of a complex Gaussian with the phases of diag(R) moved into Q.
Matrix haar_unitary(Rng& rng, int n);

AlgebraSpec gen_algebra(Rng& rng, const GeneratorConfig& cfg);

/// Single density matrix of trace 1. Faithful: λ_min ≥ kFaithfulFloor·λ_max.
Matrix gen_density(Rng& rng, int dim, bool faithful);

/// Faithful states have every eigenvalue of every block ≥ kFaithfulFloor
/// times the largest one; otherwise blocks may be rank deficient or empty.
State gen_state(Rng& rng, const GeneratorConfig& cfg, const AlgebraSpec& algebra);

/// A random injective unital hom out of `source` whose target blocks have
/// dimension ≤ cfg.max_block_dim, with Haar-random conjugators.
StarHom gen_hom(Rng& rng, const GeneratorConfig& cfg, const AlgebraSpec& source);

/// Normalized α for the given multiplicities; strictly positive when faithful.
AlphaFamily gen_alphas(Rng& rng, const Multiplicities& mult, bool faithful);

/// Probability vector of length k; may contain zeros unless faithful.
std::vector<double> gen_distribution(Rng& rng, int k, bool faithful);

struct ComposablePair {
  NCMorphism inner;  // (G, R): (C, ζ) → (B, ξ)
  NCMorphism outer;  // (F, Q): (B, ξ) → (A, ω)
};

/// ω random on A, ξ = ω∘F, ζ = ξ∘G; Q and R are built from random α against
/// ξ and ζ, so the target states are generally not ξ∘Q and ζ∘R.
ComposablePair gen_composable_pair(Rng& rng, const GeneratorConfig& cfg);
ComposablePair gen_composable_pair(const GeneratorConfig& cfg);

/// An optimal morphism (B, ξ) → (A, ξ∘Q) with a Haar-conjugated hom.
NCMorphism gen_optimal_morphism(Rng& rng, const GeneratorConfig& cfg);

}  // namespace ncstat
