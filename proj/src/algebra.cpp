#include "ncstat/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ncstat {

NotHermitian::NotHermitian(double residual)
    : std::invalid_argument("matrix is not Hermitian (residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

AlgebraSpec::AlgebraSpec(std::vector<int> block_dims) : block_dims_(std::move(block_dims)) {
  if (block_dims_.empty()) throw StructuralError("algebra must have at least one block");
  for (int m : block_dims_)
    if (m < 1) throw StructuralError("block dimensions must be >= 1");
}

int AlgebraSpec::dim() const {
  int d = 0;
  for (int m : block_dims_) d += m * m;
  return d;
}

int AlgebraSpec::unit_trace() const {
  return std::accumulate(block_dims_.begin(), block_dims_.end(), 0);
}

AlgebraSpec AlgebraSpec::direct_sum(const AlgebraSpec& left, const AlgebraSpec& right) {
  std::vector<int> dims = left.block_dims_;
  dims.insert(dims.end(), right.block_dims_.begin(), right.block_dims_.end());
  return AlgebraSpec(std::move(dims));
}

std::string to_string(const AlgebraSpec& spec) {
  std::ostringstream os;
  for (std::size_t x = 0; x < spec.num_blocks(); ++x) {
    if (x) os << " ⊕ ";
    os << "M_" << spec.block_dim(x);
  }
  return os.str();
}

namespace {

void check_blocks(const AlgebraSpec& algebra, const std::vector<Matrix>& blocks, const char* what) {
  if (blocks.size() != algebra.num_blocks())
    throw StructuralError(std::string(what) + ": expected " + std::to_string(algebra.num_blocks()) +
                          " blocks, got " + std::to_string(blocks.size()));
  for (std::size_t x = 0; x < blocks.size(); ++x) {
    const int m = algebra.block_dim(x);
    if (blocks[x].rows() != m || blocks[x].cols() != m)
      throw StructuralError(std::string(what) + ": block " + std::to_string(x) + " must be " +
                            std::to_string(m) + "x" + std::to_string(m));
  }
}

void check_same_algebra(const AlgebraSpec& a, const AlgebraSpec& b) {
  if (!(a == b)) throw StructuralError("algebra mismatch: " + to_string(a) + " vs " + to_string(b));
}

}  // namespace

AlgebraElement::AlgebraElement(AlgebraSpec algebra, std::vector<Matrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  check_blocks(algebra_, blocks_, "AlgebraElement");
}

AlgebraElement AlgebraElement::zero(const AlgebraSpec& algebra) {
  std::vector<Matrix> blocks;
  for (int m : algebra.block_dims()) blocks.push_back(Matrix::Zero(m, m));
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement AlgebraElement::identity(const AlgebraSpec& algebra) {
  std::vector<Matrix> blocks;
  for (int m : algebra.block_dims()) blocks.push_back(Matrix::Identity(m, m));
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement AlgebraElement::matrix_unit(const AlgebraSpec& algebra, std::size_t x, int i, int j) {
  auto e = zero(algebra);
  e.blocks_.at(x)(i, j) = 1.0;
  return e;
}

AlgebraElement AlgebraElement::adjoint() const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return AlgebraElement(algebra_, std::move(out));
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_algebra(a.algebra_, b.algebra_);
  std::vector<Matrix> out;
  for (std::size_t x = 0; x < a.blocks_.size(); ++x) out.push_back(a.blocks_[x] + b.blocks_[x]);
  return AlgebraElement(a.algebra_, std::move(out));
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_algebra(a.algebra_, b.algebra_);
  std::vector<Matrix> out;
  for (std::size_t x = 0; x < a.blocks_.size(); ++x) out.push_back(a.blocks_[x] - b.blocks_[x]);
  return AlgebraElement(a.algebra_, std::move(out));
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_algebra(a.algebra_, b.algebra_);
  std::vector<Matrix> out;
  for (std::size_t x = 0; x < a.blocks_.size(); ++x) out.push_back(a.blocks_[x] * b.blocks_[x]);
  return AlgebraElement(a.algebra_, std::move(out));
}

AlgebraElement operator*(Complex s, const AlgebraElement& a) {
  std::vector<Matrix> out;
  for (const auto& b : a.blocks_) out.push_back(s * b);
  return AlgebraElement(a.algebra_, std::move(out));
}

double distance(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_algebra(a.algebra(), b.algebra());
  double s = 0.0;
  for (std::size_t x = 0; x < a.blocks().size(); ++x)
    s += (a.block(x) - b.block(x)).squaredNorm();
  return std::sqrt(s);
}

std::vector<AlgebraElement> matrix_units(const AlgebraSpec& algebra) {
  std::vector<AlgebraElement> units;
  units.reserve(static_cast<std::size_t>(algebra.dim()));
  for (std::size_t x = 0; x < algebra.num_blocks(); ++x) {
    const int m = algebra.block_dim(x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) units.push_back(AlgebraElement::matrix_unit(algebra, x, i, j));
  }
  return units;
}

State::State(AlgebraSpec algebra, std::vector<Matrix> densities)
    : algebra_(std::move(algebra)), densities_(std::move(densities)) {
  check_blocks(algebra_, densities_, "State");
}

State State::maximally_mixed(const AlgebraSpec& algebra) {
  const double scale = 1.0 / algebra.unit_trace();
  std::vector<Matrix> d;
  for (int m : algebra.block_dims()) d.push_back(scale * Matrix::Identity(m, m));
  return State(algebra, std::move(d));
}

double State::weight(std::size_t x) const { return densities_.at(x).trace().real(); }

std::optional<Matrix> State::normalized(std::size_t x, double tol) const {
  const double p = weight(x);
  if (p <= tol) return std::nullopt;
  return Matrix(densities_[x] / p);
}

Complex State::expectation(const AlgebraElement& a) const {
  check_same_algebra(algebra_, a.algebra());
  Complex s = 0.0;
  for (std::size_t x = 0; x < densities_.size(); ++x)
    s += (densities_[x] * a.block(x)).trace();
  return s;
}

double frobenius_distance(const State& a, const State& b) {
  check_same_algebra(a.algebra(), b.algebra());
  double s = 0.0;
  for (std::size_t x = 0; x < a.densities().size(); ++x)
    s += (a.density(x) - b.density(x)).squaredNorm();
  return std::sqrt(s);
}

double trace_distance(const State& a, const State& b) {
  check_same_algebra(a.algebra(), b.algebra());
  double s = 0.0;
  for (std::size_t x = 0; x < a.densities().size(); ++x) {
    Matrix diff = a.density(x) - b.density(x);
    diff = 0.5 * (diff + diff.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    s += es.eigenvalues().cwiseAbs().sum();
  }
  return 0.5 * s;
}

double hermiticity_residual(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ValidationReport validate_state(const State& s, double atol) {
  ValidationReport report;
  bool faithful = true;
  double total = 0.0;
  for (std::size_t x = 0; x < s.densities().size(); ++x) {
    const Matrix& d = s.density(x);
    const std::string where = "block " + std::to_string(x);
    const double herm = hermiticity_residual(d);
    if (herm > atol) report.add("hermiticity", where, herm);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (d + d.adjoint())), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -atol) report.add("negativity", where, -min_eig);
    if (min_eig <= atol) faithful = false;
    total += d.trace().real();
  }
  if (std::abs(total - 1.0) > atol) report.add("normalization", "total trace", std::abs(total - 1.0));
  report.faithful = faithful && report.valid();
  return report;
}

HermitianEigen hermitian_eigen(const Matrix& m, double atol) {
  if (m.rows() != m.cols()) throw StructuralError("hermitian_eigen: matrix must be square");
  const double herm = hermiticity_residual(m);
  if (herm > atol) throw NotHermitian(herm);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.adjoint())));
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

double support_threshold(const RealVector& eigenvalues, double cutoff) {
  if (eigenvalues.size() == 0) return 0.0;
  const double lmax = eigenvalues.maxCoeff();
  // An all-zero (or negative within noise) block has empty support.
  return lmax > 0.0 ? cutoff * lmax : std::numeric_limits<double>::infinity();
}

}  // namespace

Matrix hermitian_log(const Matrix& m, double cutoff, double atol) {
  const auto eig = hermitian_eigen(m, atol);
  const double thr = support_threshold(eig.eigenvalues, cutoff);
  return spectral_apply(eig, [thr](double l) { return l > thr ? std::log(l) : 0.0; });
}

Matrix hermitian_exp(const Matrix& m, double atol) {
  return spectral_apply(hermitian_eigen(m, atol), [](double l) { return std::exp(l); });
}

Matrix support_projection(const Matrix& m, double cutoff, double atol) {
  const auto eig = hermitian_eigen(m, atol);
  const double thr = support_threshold(eig.eigenvalues, cutoff);
  return spectral_apply(eig, [thr](double l) { return l > thr ? 1.0 : 0.0; });
}

bool absolutely_continuous(const State& omega, const State& omega_prime, double cutoff) {
  check_same_algebra(omega.algebra(), omega_prime.algebra());
  // Supports are computed on the Hermitian part; validity is the caller's concern.
  const double loose = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < omega.densities().size(); ++x) {
    const Matrix p = support_projection(omega.density(x), cutoff, loose);
    const Matrix pp = support_projection(omega_prime.density(x), cutoff, loose);
    const Matrix comp = Matrix::Identity(pp.rows(), pp.cols()) - pp;
    if (spectral_norm(comp * p * comp) > cutoff) return false;
  }
  return true;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace_left(const Matrix& t, int a, int b) {
  if (a < 0 || b < 0 || t.rows() != static_cast<Eigen::Index>(a) * b || t.cols() != t.rows())
    throw StructuralError("partial_trace_left: expected a (" + std::to_string(a * b) + ")^2 matrix");
  Matrix out = Matrix::Zero(b, b);
  for (int i = 0; i < a; ++i) out += t.block(i * b, i * b, b, b);
  return out;
}

Matrix partial_trace_right(const Matrix& t, int a, int b) {
  if (a < 0 || b < 0 || t.rows() != static_cast<Eigen::Index>(a) * b || t.cols() != t.rows())
    throw StructuralError("partial_trace_right: expected a (" + std::to_string(a * b) + ")^2 matrix");
  Matrix out(a, a);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) out(i, j) = t.block(i * b, j * b, b, b).trace();
  return out;
}

}  // namespace ncstat
