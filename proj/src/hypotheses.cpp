#include "ncstat/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace ncstat {

namespace {

void require_same(const AlgebraSpec& a, const AlgebraSpec& b, const std::string& what) {
  if (!(a == b)) throw StructuralError(what + ": algebra mismatch (" + to_string(a) + " vs " + to_string(b) + ")");
}

void require_same_object(const State& a, const State& b, double tol, const std::string& what) {
  require_same(a.algebra(), b.algebra(), what);
  for (std::size_t x = 0; x < a.densities().size(); ++x) {
    const double d = (a.density(x) - b.density(x)).norm();
    if (d > tol)
      throw StructuralError(what + ": object mismatch in block " + std::to_string(x) + " (distance " +
                            std::to_string(d) + ")");
  }
}

/// Hermitian pseudo-inverse with a relative eigenvalue cutoff.
Matrix pseudo_inverse(const Matrix& d) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (d + d.adjoint())));
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double thr = kDefaultCutoff * lmax;
  return spectral_apply(HermitianEigen{es.eigenvalues(), es.eigenvectors()},
                        [thr](double l) { return std::abs(l) > thr ? 1.0 / l : 0.0; });
}

struct SegmentFactorization {
  std::vector<Matrix> alphas;  // y * s + x
  std::vector<bool> determined;  // false where q_y was too small to read α
  double offdiag_residual = 0.0;
  double factor_residual = 0.0;
};

// Splits the rotated densities of a state on A along the standard layout of f
// and reads α_yx from each diagonal segment against D_y = q_y σ_y.
SegmentFactorization factorize_segments(const StarHom& f, const std::vector<Matrix>& rotated, const State& xi,
                                        double atol) {
  const std::size_t s = f.target().num_blocks();
  const std::size_t t = f.source().num_blocks();
  SegmentFactorization out;
  out.alphas.resize(t * s);
  out.determined.assign(t * s, true);
  double offdiag_sq = 0.0;
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < t; ++y)
      for (std::size_t y2 = 0; y2 < t; ++y2) {
        if (y == y2 || f.multiplicity(y, x) == 0 || f.multiplicity(y2, x) == 0) continue;
        offdiag_sq += f.layout().extract(rotated[x], x, y, y2).squaredNorm();
      }
    for (std::size_t y = 0; y < t; ++y) {
      const int c = f.multiplicity(y, x);
      if (c == 0) continue;
      const int n = f.source().block_dim(y);
      const Matrix seg = f.layout().extract(rotated[x], x, y, y);
      const Matrix& dy = xi.density(y);
      if (xi.weight(y) <= atol) {
        out.determined[y * s + x] = false;
        continue;
      }
      const Matrix dinv = pseudo_inverse(dy);
      const Complex denom = (dy * dinv).trace();
      Matrix alpha(c, c);
      for (int k = 0; k < c; ++k)
        for (int k2 = 0; k2 < c; ++k2) alpha(k, k2) = (seg.block(k * n, k2 * n, n, n) * dinv).trace() / denom;
      const double r = (seg - kron(alpha, dy)).norm();
      const double allowed = atol * seg.norm() + 64 * std::numeric_limits<double>::epsilon();
      if (r > allowed) out.factor_residual = std::max(out.factor_residual, r);
      out.alphas[y * s + x] = std::move(alpha);
    }
  }
  out.offdiag_residual = std::sqrt(offdiag_sq);
  return out;
}

// Where q_y carries no information: α from Q_yx(E_{k'k} ⊗ 1_n) = α[k,k']·1_n.
Matrix alpha_from_action(const NCMorphism& m, std::size_t y, std::size_t x) {
  const StarHom& f = m.hom();
  const int c = f.multiplicity(y, x);
  const int n = f.source().block_dim(y);
  const int mx = f.target().block_dim(x);
  const int off = f.layout().segment(x, y).offset;
  Matrix alpha(c, c);
  for (int k = 0; k < c; ++k)
    for (int k2 = 0; k2 < c; ++k2) {
      Matrix a = Matrix::Zero(mx, mx);
      for (int j = 0; j < n; ++j) a(off + k2 * n + j, off + k * n + j) = 1.0;
      alpha(k, k2) = apply_choi(m.hypothesis().choi(y, x), a, mx, n).trace() / static_cast<double>(n);
    }
  return alpha;
}

std::vector<Matrix> rotate(const State& omega, const StarHom& f) {
  std::vector<Matrix> out;
  for (std::size_t x = 0; x < f.target().num_blocks(); ++x) {
    const Matrix& u = f.conjugators()[x];
    out.push_back(u.adjoint() * omega.density(x) * u);
  }
  return out;
}

}  // namespace

NCMorphism::NCMorphism(State source, State target, StarHom hom, CPUMap hypothesis)
    : source_(std::move(source)), target_(std::move(target)), hom_(std::move(hom)), hypothesis_(std::move(hypothesis)) {
  require_same(hom_.source(), source_.algebra(), "NCMorphism hom source");
  require_same(hom_.target(), target_.algebra(), "NCMorphism hom target");
  require_same(hypothesis_.source(), target_.algebra(), "NCMorphism hypothesis source");
  require_same(hypothesis_.target(), source_.algebra(), "NCMorphism hypothesis target");
}

NCMorphism identity_morphism(const State& object) {
  return NCMorphism(object, object, StarHom::identity(object.algebra()), CPUMap::identity(object.algebra()));
}

State conjugate_state(const State& omega, const AlgebraElement& u) {
  require_same(omega.algebra(), u.algebra(), "conjugate_state");
  std::vector<Matrix> d;
  for (std::size_t x = 0; x < omega.densities().size(); ++x)
    d.push_back(u.block(x).adjoint() * omega.density(x) * u.block(x));
  return State(omega.algebra(), std::move(d));
}

ValidationReport validate_morphism(const NCMorphism& m, double atol) {
  ValidationReport report;
  report.merge(validate_state(m.source(), atol), "source ");
  report.merge(validate_state(m.target(), atol), "target ");

  const double compat = trace_distance(pushforward_state(m.target(), m.hom()), m.source());
  if (compat > atol) report.add("state-compatibility", "target∘F vs source", compat);

  double left_inverse = 0.0;
  for (const auto& e : matrix_units(m.source().algebra()))
    left_inverse = std::max(left_inverse, distance(apply_cpu(m.hypothesis(), apply_hom(m.hom(), e)), e));
  if (left_inverse > atol) report.add("left-inverse", "Q∘F vs id", left_inverse);

  report.merge(validate_cpu(m.hypothesis(), atol), "hypothesis ");
  report.faithful = validate_state(m.target(), atol).faithful && validate_state(m.source(), atol).faithful;
  return report;
}

OptimalityCheck is_optimal(const NCMorphism& m, double atol) {
  const double r = frobenius_distance(pullback_state(m.source(), m.hypothesis()), m.target());
  return {r <= atol, r};
}

Rectification rectify_morphism(const NCMorphism& m) {
  AlgebraElement u = m.hom().conjugator_element();
  const AdUnitary ad = ad_unitary(u, 1e-8);
  NCMorphism rectified(m.source(), conjugate_state(m.target(), u), m.hom().standard_part(),
                       compose_cpu(m.hypothesis(), ad.cpu));
  return {std::move(u), std::move(rectified)};
}

PairRectification rectify_pair(const NCMorphism& g, const NCMorphism& f) {
  require_same_object(g.target(), f.source(), kObjectTolerance, "rectify_pair");
  AlgebraElement v = g.hom().conjugator_element();
  const AdUnitary ad_v = ad_unitary(v, 1e-8);
  const AdUnitary ad_v_dag = ad_unitary(v.adjoint(), 1e-8);
  const State xi_v = conjugate_state(g.target(), v);

  NCMorphism inner(g.source(), xi_v, g.hom().standard_part(), compose_cpu(g.hypothesis(), ad_v.cpu));
  NCMorphism shifted(xi_v, f.target(), compose_homs(f.hom(), ad_v.hom), compose_cpu(ad_v_dag.cpu, f.hypothesis()));
  Rectification outer = rectify_morphism(shifted);
  return {std::move(outer.unitary), std::move(v), std::move(inner), std::move(outer.morphism)};
}

CompositeRectification rectify_composite(const NCMorphism& g, const NCMorphism& f, double atol) {
  if (!g.hom().is_standard_form(atol) || !f.hom().is_standard_form(atol))
    throw std::invalid_argument("rectify_composite: both morphisms must be in standard form");
  auto perms = composite_permutations(f.hom(), g.hom());
  Rectification r = rectify_morphism(compose_morphisms(g, f));
  return {std::move(perms), std::move(r.morphism)};
}

NCMorphism compose_morphisms(const NCMorphism& g, const NCMorphism& f, double object_tol) {
  require_same_object(g.target(), f.source(), object_tol, "compose_morphisms");
  return NCMorphism(g.source(), f.target(), compose_homs(f.hom(), g.hom()),
                    compose_cpu(g.hypothesis(), f.hypothesis()));
}

AlphaFamily::AlphaFamily(Multiplicities mult, std::vector<Matrix> alphas)
    : mult_(std::move(mult)), alphas_(std::move(alphas)) {
  if (alphas_.size() != static_cast<std::size_t>(mult_.size()))
    throw StructuralError("AlphaFamily: need one entry per (source block, target block) pair");
  for (std::size_t y = 0; y < num_source_blocks(); ++y)
    for (std::size_t x = 0; x < num_target_blocks(); ++x) {
      const int c = mult_(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      const Matrix& a = alphas_[y * num_target_blocks() + x];
      if (c > 0 && (a.rows() != c || a.cols() != c))
        throw StructuralError("AlphaFamily: alpha(" + std::to_string(y) + "," + std::to_string(x) + ") must be " +
                              std::to_string(c) + "x" + std::to_string(c));
    }
}

bool AlphaFamily::present(std::size_t y, std::size_t x) const {
  return mult_(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) > 0;
}

const Matrix& AlphaFamily::alpha(std::size_t y, std::size_t x) const {
  if (!present(y, x)) throw std::out_of_range("AlphaFamily: no alpha where the multiplicity is zero");
  return alphas_.at(y * num_target_blocks() + x);
}

double AlphaFamily::normalization_residual() const {
  double r = 0.0;
  for (std::size_t y = 0; y < num_source_blocks(); ++y) {
    double tr = 0.0;
    for (std::size_t x = 0; x < num_target_blocks(); ++x)
      if (present(y, x)) tr += alpha(y, x).trace().real();
    r = std::max(r, std::abs(tr - 1.0));
  }
  return r;
}

double AlphaFamily::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < num_source_blocks(); ++y)
    for (std::size_t x = 0; x < num_target_blocks(); ++x)
      if (present(y, x)) {
        const Matrix& a = alpha(y, x);
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (a + a.adjoint())), Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues().minCoeff());
      }
  return lo;
}

double max_distance(const AlphaFamily& a, const AlphaFamily& b) {
  if (a.multiplicities() != b.multiplicities()) throw StructuralError("max_distance: alpha families differ in shape");
  double d = 0.0;
  for (std::size_t y = 0; y < a.num_source_blocks(); ++y)
    for (std::size_t x = 0; x < a.num_target_blocks(); ++x)
      if (a.present(y, x)) d = std::max(d, (a.alpha(y, x) - b.alpha(y, x)).norm());
  return d;
}

FactorizationError::FactorizationError(const std::string& what, double residual)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

AlphaFamily extract_alphas(const NCMorphism& m, double atol) {
  const StarHom& f = m.hom();
  if (!f.is_standard_form(atol)) throw std::invalid_argument("extract_alphas: hom must be in standard form");
  const State pulled = pullback_state(m.source(), m.hypothesis());
  SegmentFactorization fac = factorize_segments(f, pulled.densities(), m.source(), atol);
  if (fac.offdiag_residual > atol)
    throw FactorizationError("extract_alphas: off-diagonal segments of source∘Q do not vanish", fac.offdiag_residual);
  if (fac.factor_residual > 0.0)
    throw FactorizationError("extract_alphas: a diagonal segment does not factor as alpha ⊗ q·sigma",
                             fac.factor_residual);
  const std::size_t s = f.target().num_blocks();
  for (std::size_t y = 0; y < f.source().num_blocks(); ++y)
    for (std::size_t x = 0; x < s; ++x)
      if (f.multiplicity(y, x) > 0 && !fac.determined[y * s + x]) fac.alphas[y * s + x] = alpha_from_action(m, y, x);
  AlphaFamily family(f.multiplicities(), std::move(fac.alphas));
  const double norm = family.normalization_residual();
  if (norm > atol) throw FactorizationError("extract_alphas: alphas are not normalized", norm);
  return family;
}

CPUMap hypothesis_from_alphas(const StarHom& f, const AlphaFamily& alpha) {
  if (alpha.multiplicities() != f.multiplicities())
    throw StructuralError("hypothesis_from_alphas: alpha family does not match the multiplicities");
  return CPUMap::from_action(f.target(), f.source(), [&](const AlgebraElement& a) {
    std::vector<Matrix> out;
    for (std::size_t y = 0; y < f.source().num_blocks(); ++y) {
      const int n = f.source().block_dim(y);
      Matrix acc = Matrix::Zero(n, n);
      for (std::size_t x = 0; x < f.target().num_blocks(); ++x) {
        const int c = f.multiplicity(y, x);
        if (c == 0) continue;
        const Matrix& u = f.conjugators()[x];
        const Matrix seg = f.layout().extract(u.adjoint() * a.block(x) * u, x, y, y);
        acc += partial_trace_left(kron(alpha.alpha(y, x), Matrix::Identity(n, n)) * seg, c, n);
      }
      out.push_back(std::move(acc));
    }
    return AlgebraElement(f.source(), std::move(out));
  });
}

State disintegration_state(const StarHom& f, const State& xi, const AlphaFamily& alpha) {
  require_same(xi.algebra(), f.source(), "disintegration_state");
  std::vector<Matrix> d;
  for (std::size_t x = 0; x < f.target().num_blocks(); ++x) {
    const int m = f.target().block_dim(x);
    Matrix s = Matrix::Zero(m, m);
    for (std::size_t y = 0; y < f.source().num_blocks(); ++y) {
      if (f.multiplicity(y, x) == 0) continue;
      const auto r = f.layout().segment(x, y);
      s.block(r.offset, r.offset, r.length, r.length) = kron(alpha.alpha(y, x), xi.density(y));
    }
    const Matrix& u = f.conjugators()[x];
    d.push_back(u * s * u.adjoint());
  }
  return State(f.target(), std::move(d));
}

NCMorphism build_hypothesis_from_alphas(const StarHom& f, const State& xi, const AlphaFamily& alpha,
                                        const std::optional<State>& target, double atol) {
  require_same(xi.algebra(), f.source(), "build_hypothesis_from_alphas");
  const double norm = alpha.normalization_residual();
  if (norm > atol) throw std::invalid_argument("build_hypothesis_from_alphas: alphas violate normalization by " +
                                               std::to_string(norm));
  const double lo = alpha.min_eigenvalue();
  if (lo < -atol)
    throw std::invalid_argument("build_hypothesis_from_alphas: alpha is not positive (eigenvalue " +
                                std::to_string(lo) + ")");
  State omega = target ? *target : disintegration_state(f, xi, alpha);
  return NCMorphism(xi, std::move(omega), f, hypothesis_from_alphas(f, alpha));
}

Disintegration construct_optimal_hypothesis(const StarHom& f, const State& omega, double atol) {
  require_same(omega.algebra(), f.target(), "construct_optimal_hypothesis");
  const State xi = pushforward_state(omega, f);
  SegmentFactorization fac = factorize_segments(f, rotate(omega, f), xi, atol);

  Disintegration out;
  if (fac.offdiag_residual > atol) {
    out.residual = fac.offdiag_residual;
    out.obstruction = "coherences between distinct source segments";
    return out;
  }
  if (fac.factor_residual > 0.0) {
    out.residual = fac.factor_residual;
    out.obstruction = "a diagonal segment does not factor as alpha ⊗ q·sigma";
    return out;
  }
  // Blocks of the source with no weight leave α free; split it uniformly.
  const std::size_t s = f.target().num_blocks();
  for (std::size_t y = 0; y < f.source().num_blocks(); ++y) {
    int total = 0;
    for (std::size_t x = 0; x < s; ++x) total += f.multiplicity(y, x);
    for (std::size_t x = 0; x < s; ++x) {
      const int c = f.multiplicity(y, x);
      if (c > 0 && !fac.determined[y * s + x]) fac.alphas[y * s + x] = Matrix::Identity(c, c) / double(total);
    }
  }
  AlphaFamily alphas(f.multiplicities(), std::move(fac.alphas));
  out.residual = alphas.normalization_residual();
  if (out.residual > atol) {
    out.obstruction = "extracted alphas are not normalized";
    return out;
  }
  out.morphism = build_hypothesis_from_alphas(f, xi, alphas, omega, atol);
  out.residual = is_optimal(*out.morphism, atol).residual;
  out.alphas = std::move(alphas);
  return out;
}

}  // namespace ncstat
