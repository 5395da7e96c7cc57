#pragma once

// Unital *-homomorphisms (stored in standard form plus conjugators) and
// completely positive unital maps (stored as per-component Choi matrices).
//
// Standard-form layout: inside target block x the source blocks appear in
// ascending order; block y occupies a segment of size c[y][x]·n_y holding
// 1_{c[y][x]} ⊗ B_y, with the copy index as the outer tensor factor.
//
// Choi convention: a linear map Φ: M_m → M_n has Choi matrix
//   J = Σ_{i,j} E_ij ⊗ Φ(E_ij)        ((m·n) × (m·n), input factor outer),
// i.e. (id ⊗ Φ)(|Ω⟩⟨Ω|) with |Ω⟩ = vec(1_m) under column-major vec. So
//   Φ(X)[k,l] = Σ_{i,j} X[i,j] · J[i·n + k, j·n + l].

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncstat/algebra.hpp"
#include "ncstat/validation.hpp"

namespace ncstat {

using Multiplicities = Eigen::MatrixXi;  // rows: source blocks y, cols: target blocks x

/// Row/column ranges of the standard-form segments inside each target block.
class BlockIndexMap {
 public:
  struct Range {
    int offset = 0;
    int length = 0;
  };

  BlockIndexMap(const AlgebraSpec& source, const AlgebraSpec& target, const Multiplicities& mult);

  /// Diagonal range of segment y inside target block x; the (y, y') segment
  /// of A_x is rows segment(x, y) × cols segment(x, y').
  Range segment(std::size_t x, std::size_t y) const { return ranges_.at(x).at(y); }
  Matrix extract(const Matrix& block_x, std::size_t x, std::size_t y, std::size_t y2) const;

 private:
  std::vector<std::vector<Range>> ranges_;
};

class StarHom {
 public:
  /// Checks unitality Σ_y c[y][x]·n_y = m_x exactly and unitarity of each conjugator.
  StarHom(AlgebraSpec source, AlgebraSpec target, Multiplicities mult, std::vector<Matrix> conjugators,
          double atol = kDefaultAtol);

  /// Identity conjugators.
  static StarHom standard(AlgebraSpec source, AlgebraSpec target, Multiplicities mult);
  static StarHom identity(const AlgebraSpec& algebra);

  const AlgebraSpec& source() const { return source_; }
  const AlgebraSpec& target() const { return target_; }
  const Multiplicities& multiplicities() const { return mult_; }
  int multiplicity(std::size_t y, std::size_t x) const {
    return mult_(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
  }
  const std::vector<Matrix>& conjugators() const { return conjugators_; }
  const BlockIndexMap& layout() const { return layout_; }

  bool is_standard_form(double atol = kDefaultAtol) const;
  /// Same multiplicities, identity conjugators.
  StarHom standard_part() const;
  /// The conjugators as a unitary element of the target algebra.
  AlgebraElement conjugator_element() const;

 private:
  AlgebraSpec source_;
  AlgebraSpec target_;
  Multiplicities mult_;
  std::vector<Matrix> conjugators_;
  BlockIndexMap layout_;
};

/// ⊞_y 1_{c[y][x]} ⊗ B_y for target block x (no conjugation).
Matrix standard_block(const StarHom& f, const AlgebraElement& b, std::size_t x);

AlgebraElement apply_hom(const StarHom& f, const AlgebraElement& b);

/// Dense matrix of a linear map between algebras acting on vectorized
/// elements: blocks concatenated in order, each block vectorized column-major.
struct RawLinearMap {
  AlgebraSpec source;
  AlgebraSpec target;
  Matrix matrix;  // target.dim() × source.dim()
};

Eigen::VectorXcd vectorize(const AlgebraElement& a);
AlgebraElement unvectorize(const AlgebraSpec& algebra, const Eigen::VectorXcd& v);
AlgebraElement apply_raw(const RawLinearMap& l, const AlgebraElement& a);
RawLinearMap to_raw(const StarHom& f);

class NotAHomomorphism : public std::runtime_error {
 public:
  NotAHomomorphism(std::string axiom, double residual);
  const std::string& axiom() const { return axiom_; }
  double residual() const { return residual_; }

 private:
  std::string axiom_;
  double residual_;
};

class NonIntegralMultiplicity : public std::runtime_error {
 public:
  NonIntegralMultiplicity(std::size_t y, std::size_t x, double value);
  double value() const { return value_; }

 private:
  double value_;
};

/// Recover the canonical (multiplicities, conjugators) form of a raw map,
/// after checking multiplicativity, *-preservation and unitality on matrix units.
StarHom hom_from_raw(const RawLinearMap& l, double atol = kDefaultAtol);

/// Per target block, the permutation P_x regrouping the copies of each
/// innermost block when two standard-form homs are composed: if
/// S_x = ⊞_y 1 ⊗ (⊞_z 1 ⊗ C_z) is the nested layout, then
/// S_x = P_x (⊞_z 1_{c[z][x]} ⊗ C_z) P_xᵀ with c the product multiplicities.
std::vector<Matrix> composite_permutations(const StarHom& outer, const StarHom& inner);

/// outer ∘ inner; requires inner.target() == outer.source().
StarHom compose_homs(const StarHom& outer, const StarHom& inner);

/// ω∘F as a state on F.source(), via q_y σ_y = Σ_x tr_{M_c}(segment_yy(U_x† D_x U_x)).
State pushforward_state(const State& omega, const StarHom& f);

class CPUMap {
 public:
  /// choi[y * num_source_blocks + x] is the Choi matrix of the (y, x) component
  /// M_{m_x} → M_{n_y}.
  CPUMap(AlgebraSpec source, AlgebraSpec target, std::vector<Matrix> choi);

  /// Tabulates the Choi matrices of an arbitrary linear action on matrix units.
  template <typename Action>
  static CPUMap from_action(const AlgebraSpec& source, const AlgebraSpec& target, Action&& action);
  static CPUMap identity(const AlgebraSpec& algebra);

  const AlgebraSpec& source() const { return source_; }
  const AlgebraSpec& target() const { return target_; }
  const Matrix& choi(std::size_t y, std::size_t x) const { return choi_.at(y * source_.num_blocks() + x); }
  const std::vector<Matrix>& choi_matrices() const { return choi_; }

 private:
  AlgebraSpec source_;
  AlgebraSpec target_;
  std::vector<Matrix> choi_;
};

/// Φ(X) from Choi matrix J of Φ: M_m → M_n.
Matrix apply_choi(const Matrix& choi, const Matrix& x, int m, int n);
/// Trace-dual Φ†(Y): tr(Φ†(Y) X) = tr(Y Φ(X)).
Matrix apply_choi_adjoint(const Matrix& choi, const Matrix& y, int m, int n);

AlgebraElement apply_cpu(const CPUMap& q, const AlgebraElement& a);
/// outer ∘ inner, componentwise (R∘Q)_zx = Σ_y R_zy ∘ Q_yx.
CPUMap compose_cpu(const CPUMap& outer, const CPUMap& inner);
/// The state ξ∘Q on Q.source(), with densities Σ_y Q_yx†(D_y).
State pullback_state(const State& xi, const CPUMap& q);

/// Blockwise Choi PSD check plus unitality Σ_x Q_yx(1) = 1.
ValidationReport validate_cpu(const CPUMap& q, double atol = kDefaultAtol);

/// Ad_U: A ↦ U A U†, as a hom and as a CPU map.
struct AdUnitary {
  StarHom hom;
  CPUMap cpu;
};
AdUnitary ad_unitary(const AlgebraElement& u, double atol = kDefaultAtol);

/// Direct sums F ⊕ F̄ and Q ⊕ Q̄ (no cross components).
StarHom direct_sum(const StarHom& a, const StarHom& b);
CPUMap direct_sum(const CPUMap& a, const CPUMap& b);

template <typename Action>
CPUMap CPUMap::from_action(const AlgebraSpec& source, const AlgebraSpec& target, Action&& action) {
  const std::size_t s = source.num_blocks();
  const std::size_t t = target.num_blocks();
  std::vector<Matrix> choi(s * t);
  for (std::size_t y = 0; y < t; ++y)
    for (std::size_t x = 0; x < s; ++x) {
      const int m = source.block_dim(x);
      const int n = target.block_dim(y);
      choi[y * s + x] = Matrix::Zero(m * n, m * n);
    }
  for (std::size_t x = 0; x < s; ++x) {
    const int m = source.block_dim(x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const AlgebraElement image = action(AlgebraElement::matrix_unit(source, x, i, j));
        if (!(image.algebra() == target)) throw StructuralError("CPUMap::from_action: image algebra mismatch");
        for (std::size_t y = 0; y < t; ++y) {
          const int n = target.block_dim(y);
          choi[y * s + x].block(i * n, j * n, n, n) = image.block(y);
        }
      }
  }
  return CPUMap(source, target, std::move(choi));
}

}  // namespace ncstat
