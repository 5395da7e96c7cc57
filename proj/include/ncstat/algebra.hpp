#pragma once

// Dense block-matrix algebras ⊕_x M_{m_x}, their elements and states, and the
// Hermitian functional calculus used by the entropy code.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncstat/validation.hpp"

namespace ncstat {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultAtol = 1e-9;
inline constexpr double kDefaultCutoff = 1e-10;

/// Shape errors: wrong block counts, non-square blocks, mismatched algebras.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by the functional calculus when handed a non-Hermitian matrix.
class NotHermitian : public std::invalid_argument {
 public:
  explicit NotHermitian(double residual);
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Block sizes [m_1, ..., m_s] of ⊕_x M_{m_x}.
class AlgebraSpec {
 public:
  explicit AlgebraSpec(std::vector<int> block_dims);

  const std::vector<int>& block_dims() const { return block_dims_; }
  std::size_t num_blocks() const { return block_dims_.size(); }
  int block_dim(std::size_t x) const { return block_dims_.at(x); }
  /// Complex dimension Σ m_x².
  int dim() const;
  /// Σ m_x, the trace of the unit.
  int unit_trace() const;

  static AlgebraSpec direct_sum(const AlgebraSpec& left, const AlgebraSpec& right);

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

 private:
  std::vector<int> block_dims_;
};

std::string to_string(const AlgebraSpec& spec);

class AlgebraElement {
 public:
  AlgebraElement(AlgebraSpec algebra, std::vector<Matrix> blocks);

  static AlgebraElement zero(const AlgebraSpec& algebra);
  static AlgebraElement identity(const AlgebraSpec& algebra);
  /// E_ij placed in block x, zero elsewhere.
  static AlgebraElement matrix_unit(const AlgebraSpec& algebra, std::size_t x, int i, int j);

  const AlgebraSpec& algebra() const { return algebra_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t x) const { return blocks_.at(x); }

  AlgebraElement adjoint() const;

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(Complex s, const AlgebraElement& a);

 private:
  AlgebraSpec algebra_;
  std::vector<Matrix> blocks_;
};

/// sqrt(Σ_x ‖a_x − b_x‖_F²).
double distance(const AlgebraElement& a, const AlgebraElement& b);

/// Every matrix unit E_ij of every block, ordered by (x, i, j).
std::vector<AlgebraElement> matrix_units(const AlgebraSpec& algebra);

/// A state stored as unnormalized block densities D_x = p_x ρ_x.
///
/// Construction only checks shapes; numeric validity is validate_state's job.
class State {
 public:
  State(AlgebraSpec algebra, std::vector<Matrix> densities);

  /// Normalized trace: each block gets 1/Σm_x times the identity.
  static State maximally_mixed(const AlgebraSpec& algebra);

  const AlgebraSpec& algebra() const { return algebra_; }
  const std::vector<Matrix>& densities() const { return densities_; }
  const Matrix& density(std::size_t x) const { return densities_.at(x); }

  /// p_x = tr D_x.
  double weight(std::size_t x) const;
  /// ρ_x = D_x / p_x, or nullopt when p_x ≤ tol.
  std::optional<Matrix> normalized(std::size_t x, double tol = kDefaultAtol) const;
  /// ω(A) = Σ_x tr(D_x A_x).
  Complex expectation(const AlgebraElement& a) const;

 private:
  AlgebraSpec algebra_;
  std::vector<Matrix> densities_;
};

/// sqrt(Σ_x ‖D_x − D'_x‖_F²).
double frobenius_distance(const State& a, const State& b);
/// ½ Σ_x ‖D_x − D'_x‖_1.
double trace_distance(const State& a, const State& b);

ValidationReport validate_state(const State& s, double atol = kDefaultAtol);

struct HermitianEigen {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns
};

/// Throws NotHermitian if ‖M − M†‖_∞ > atol; the Hermitian part is diagonalized.
HermitianEigen hermitian_eigen(const Matrix& m, double atol = kDefaultAtol);

/// Apply f to the spectrum of a Hermitian matrix.
template <typename Fn>
Matrix spectral_apply(const HermitianEigen& eig, Fn&& f) {
  RealVector fv(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.eigenvalues(i));
  return eig.eigenvectors * fv.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

/// Natural log on the support (λ > cutoff·λ_max); zero on the kernel.
Matrix hermitian_log(const Matrix& m, double cutoff = kDefaultCutoff, double atol = kDefaultAtol);
Matrix hermitian_exp(const Matrix& m, double atol = kDefaultAtol);
/// Projection onto eigenvectors with λ > cutoff·λ_max.
Matrix support_projection(const Matrix& m, double cutoff = kDefaultCutoff,
                          double atol = kDefaultAtol);

/// ω ⪯ ω': supp(D_x) ≤ supp(D'_x) in every block.
bool absolutely_continuous(const State& omega, const State& omega_prime,
                           double cutoff = kDefaultCutoff);

Matrix kron(const Matrix& a, const Matrix& b);
/// tr over the first factor of C^a ⊗ C^b (the outer, slower index).
Matrix partial_trace_left(const Matrix& t, int a, int b);
/// tr over the second factor of C^a ⊗ C^b.
Matrix partial_trace_right(const Matrix& t, int a, int b);

double hermiticity_residual(const Matrix& m);
/// Operator 2-norm of a Hermitian matrix (largest |λ|).
double spectral_norm(const Matrix& m);

}  // namespace ncstat
