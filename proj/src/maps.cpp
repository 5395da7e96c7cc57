#include "ncstat/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace ncstat {

namespace {

void require_same(const AlgebraSpec& a, const AlgebraSpec& b, const char* what) {
  if (!(a == b))
    throw StructuralError(std::string(what) + ": algebra mismatch (" + to_string(a) + " vs " + to_string(b) + ")");
}

double unitarity_residual(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

std::vector<int> block_offsets(const AlgebraSpec& algebra) {
  std::vector<int> off;
  int acc = 0;
  for (int m : algebra.block_dims()) {
    off.push_back(acc);
    acc += m * m;
  }
  return off;
}

}  // namespace

BlockIndexMap::BlockIndexMap(const AlgebraSpec& source, const AlgebraSpec& target, const Multiplicities& mult) {
  ranges_.resize(target.num_blocks());
  for (std::size_t x = 0; x < target.num_blocks(); ++x) {
    int offset = 0;
    for (std::size_t y = 0; y < source.num_blocks(); ++y) {
      const int len = mult(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) * source.block_dim(y);
      ranges_[x].push_back({offset, len});
      offset += len;
    }
  }
}

Matrix BlockIndexMap::extract(const Matrix& block_x, std::size_t x, std::size_t y, std::size_t y2) const {
  const Range r = segment(x, y);
  const Range c = segment(x, y2);
  return block_x.block(r.offset, c.offset, r.length, c.length);
}

StarHom::StarHom(AlgebraSpec source, AlgebraSpec target, Multiplicities mult, std::vector<Matrix> conjugators,
                 double atol)
    : source_(std::move(source)),
      target_(std::move(target)),
      mult_(std::move(mult)),
      conjugators_(std::move(conjugators)),
      layout_((mult_.rows() == static_cast<Eigen::Index>(source_.num_blocks()) &&
               mult_.cols() == static_cast<Eigen::Index>(target_.num_blocks()))
                  ? BlockIndexMap(source_, target_, mult_)
                  : throw StructuralError("StarHom: multiplicity matrix must be (#source blocks) x (#target blocks)")) {
  if ((mult_.array() < 0).any()) throw StructuralError("StarHom: multiplicities must be non-negative");
  for (std::size_t x = 0; x < target_.num_blocks(); ++x) {
    int total = 0;
    for (std::size_t y = 0; y < source_.num_blocks(); ++y) total += multiplicity(y, x) * source_.block_dim(y);
    if (total != target_.block_dim(x))
      throw StructuralError("StarHom: not unital, target block " + std::to_string(x) + " has dimension " +
                            std::to_string(target_.block_dim(x)) + " but multiplicities fill " +
                            std::to_string(total));
  }
  if (conjugators_.size() != target_.num_blocks())
    throw StructuralError("StarHom: need one conjugator per target block");
  for (std::size_t x = 0; x < conjugators_.size(); ++x) {
    const int m = target_.block_dim(x);
    if (conjugators_[x].rows() != m || conjugators_[x].cols() != m)
      throw StructuralError("StarHom: conjugator " + std::to_string(x) + " has the wrong shape");
    const double r = unitarity_residual(conjugators_[x]);
    if (r > atol) throw StructuralError("StarHom: conjugator " + std::to_string(x) + " is not unitary (" + std::to_string(r) + ")");
  }
}

StarHom StarHom::standard(AlgebraSpec source, AlgebraSpec target, Multiplicities mult) {
  std::vector<Matrix> conj;
  for (int m : target.block_dims()) conj.push_back(Matrix::Identity(m, m));
  return StarHom(std::move(source), std::move(target), std::move(mult), std::move(conj));
}

StarHom StarHom::identity(const AlgebraSpec& algebra) {
  const auto s = static_cast<Eigen::Index>(algebra.num_blocks());
  return standard(algebra, algebra, Multiplicities::Identity(s, s));
}

bool StarHom::is_standard_form(double atol) const {
  for (const auto& u : conjugators_)
    if ((u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > atol) return false;
  return true;
}

StarHom StarHom::standard_part() const { return standard(source_, target_, mult_); }

AlgebraElement StarHom::conjugator_element() const { return AlgebraElement(target_, conjugators_); }

Matrix standard_block(const StarHom& f, const AlgebraElement& b, std::size_t x) {
  const int m = f.target().block_dim(x);
  Matrix s = Matrix::Zero(m, m);
  for (std::size_t y = 0; y < f.source().num_blocks(); ++y) {
    const int n = f.source().block_dim(y);
    const int off = f.layout().segment(x, y).offset;
    for (int k = 0; k < f.multiplicity(y, x); ++k) s.block(off + k * n, off + k * n, n, n) = b.block(y);
  }
  return s;
}

AlgebraElement apply_hom(const StarHom& f, const AlgebraElement& b) {
  require_same(b.algebra(), f.source(), "apply_hom");
  std::vector<Matrix> out;
  for (std::size_t x = 0; x < f.target().num_blocks(); ++x) {
    const Matrix& u = f.conjugators()[x];
    out.push_back(u * standard_block(f, b, x) * u.adjoint());
  }
  return AlgebraElement(f.target(), std::move(out));
}

Eigen::VectorXcd vectorize(const AlgebraElement& a) {
  Eigen::VectorXcd v(a.algebra().dim());
  Eigen::Index k = 0;
  for (const auto& b : a.blocks()) {
    v.segment(k, b.size()) = b.reshaped();  // column-major
    k += b.size();
  }
  return v;
}

AlgebraElement unvectorize(const AlgebraSpec& algebra, const Eigen::VectorXcd& v) {
  if (v.size() != algebra.dim()) throw StructuralError("unvectorize: length mismatch");
  std::vector<Matrix> blocks;
  Eigen::Index k = 0;
  for (int m : algebra.block_dims()) {
    blocks.push_back(v.segment(k, m * m).reshaped(m, m));
    k += m * m;
  }
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement apply_raw(const RawLinearMap& l, const AlgebraElement& a) {
  require_same(a.algebra(), l.source, "apply_raw");
  if (l.matrix.rows() != l.target.dim() || l.matrix.cols() != l.source.dim())
    throw StructuralError("RawLinearMap: matrix shape does not match the algebras");
  return unvectorize(l.target, l.matrix * vectorize(a));
}

RawLinearMap to_raw(const StarHom& f) {
  Matrix m(f.target().dim(), f.source().dim());
  const auto units = matrix_units(f.source());
  // matrix_units is (x, i, j)-ordered; vectorization is column-major.
  const auto off = block_offsets(f.source());
  std::size_t u = 0;
  for (std::size_t y = 0; y < f.source().num_blocks(); ++y) {
    const int n = f.source().block_dim(y);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++u) m.col(off[y] + j * n + i) = vectorize(apply_hom(f, units[u]));
  }
  return {f.source(), f.target(), std::move(m)};
}

NotAHomomorphism::NotAHomomorphism(std::string axiom, double residual)
    : std::runtime_error("not a unital *-homomorphism: " + axiom + " fails (residual " +
                         std::to_string(residual) + ")"),
      axiom_(std::move(axiom)),
      residual_(residual) {}

NonIntegralMultiplicity::NonIntegralMultiplicity(std::size_t y, std::size_t x, double value)
    : std::runtime_error("non-integral multiplicity " + std::to_string(value) + " for source block " +
                         std::to_string(y) + " in target block " + std::to_string(x)),
      value_(value) {}

StarHom hom_from_raw(const RawLinearMap& l, double atol) {
  const AlgebraSpec& src = l.source;
  const AlgebraSpec& tgt = l.target;
  if (l.matrix.rows() != tgt.dim() || l.matrix.cols() != src.dim())
    throw StructuralError("hom_from_raw: matrix shape does not match the algebras");

  struct Unit {
    std::size_t y;
    int i, j;
    AlgebraElement image;
  };
  std::vector<Unit> units;
  for (std::size_t y = 0; y < src.num_blocks(); ++y) {
    const int n = src.block_dim(y);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        units.push_back({y, i, j, apply_raw(l, AlgebraElement::matrix_unit(src, y, i, j))});
  }
  auto image_of = [&](std::size_t y, int i, int j) -> const AlgebraElement& {
    std::size_t k = 0;
    for (std::size_t b = 0; b < y; ++b) k += static_cast<std::size_t>(src.block_dim(b) * src.block_dim(b));
    return units[k + static_cast<std::size_t>(i * src.block_dim(y) + j)].image;
  };

  // E^y_ij E^{y'}_kl = δ_{yy'} δ_jk E^y_il
  double mult_res = 0.0;
  const auto zero = AlgebraElement::zero(tgt);
  for (const auto& a : units)
    for (const auto& b : units) {
      const AlgebraElement& expected = (a.y == b.y && a.j == b.i) ? image_of(a.y, a.i, b.j) : zero;
      mult_res = std::max(mult_res, distance(a.image * b.image, expected));
    }
  if (mult_res > atol) throw NotAHomomorphism("multiplicativity", mult_res);

  double star_res = 0.0;
  for (const auto& a : units) star_res = std::max(star_res, distance(image_of(a.y, a.j, a.i), a.image.adjoint()));
  if (star_res > atol) throw NotAHomomorphism("*-preservation", star_res);

  const double unit_res = distance(apply_raw(l, AlgebraElement::identity(src)), AlgebraElement::identity(tgt));
  if (unit_res > atol) throw NotAHomomorphism("unitality", unit_res);

  Multiplicities c(static_cast<Eigen::Index>(src.num_blocks()), static_cast<Eigen::Index>(tgt.num_blocks()));
  for (std::size_t y = 0; y < src.num_blocks(); ++y) {
    const int n = src.block_dim(y);
    auto img = AlgebraElement::zero(tgt);
    for (int i = 0; i < n; ++i) img = img + image_of(y, i, i);
    for (std::size_t x = 0; x < tgt.num_blocks(); ++x) {
      const double value = img.block(x).trace().real() / n;
      const double rounded = std::round(value);
      if (std::abs(value - rounded) > atol || rounded < 0) throw NonIntegralMultiplicity(y, x, value);
      c(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = static_cast<int>(rounded);
    }
  }

  std::vector<Matrix> conj;
  for (std::size_t x = 0; x < tgt.num_blocks(); ++x) {
    const int m = tgt.block_dim(x);
    Matrix u(m, m);
    int col = 0;
    for (std::size_t y = 0; y < src.num_blocks(); ++y) {
      const int n = src.block_dim(y);
      const int cyx = c(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      if (cyx == 0) continue;
      // Orthonormal basis of the range of the projection L_x(E^y_00).
      Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (image_of(y, 0, 0).block(x) +
                                                             image_of(y, 0, 0).block(x).adjoint())));
      std::vector<Eigen::VectorXcd> basis;
      for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) > 0.5) basis.push_back(es.eigenvectors().col(k));
      if (static_cast<int>(basis.size()) != cyx) throw NotAHomomorphism("projection rank", std::abs(double(basis.size()) - cyx));
      for (int k = 0; k < cyx; ++k)
        for (int j = 0; j < n; ++j) u.col(col++) = image_of(y, j, 0).block(x) * basis[static_cast<std::size_t>(k)];
    }
    conj.push_back(std::move(u));
  }
  return StarHom(src, tgt, std::move(c), std::move(conj), std::max(atol, 1e-8));
}

std::vector<Matrix> composite_permutations(const StarHom& outer, const StarHom& inner) {
  require_same(inner.target(), outer.source(), "composite_permutations");
  const AlgebraSpec& c_alg = inner.source();
  const AlgebraSpec& b_alg = outer.source();
  const Multiplicities prod = inner.multiplicities() * outer.multiplicities();
  std::vector<Matrix> perms;
  for (std::size_t x = 0; x < outer.target().num_blocks(); ++x) {
    const int m = outer.target().block_dim(x);
    std::vector<int> z_offset(c_alg.num_blocks());
    int acc = 0;
    for (std::size_t z = 0; z < c_alg.num_blocks(); ++z) {
      z_offset[z] = acc;
      acc += prod(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(x)) * c_alg.block_dim(z);
    }
    std::vector<int> copies_seen(c_alg.num_blocks(), 0);
    Matrix p = Matrix::Zero(m, m);
    int nested = 0;
    for (std::size_t y = 0; y < b_alg.num_blocks(); ++y)
      for (int kf = 0; kf < outer.multiplicity(y, x); ++kf)
        for (std::size_t z = 0; z < c_alg.num_blocks(); ++z) {
          const int o = c_alg.block_dim(z);
          for (int kg = 0; kg < inner.multiplicity(z, y); ++kg) {
            const int base = z_offset[z] + copies_seen[z]++ * o;
            for (int j = 0; j < o; ++j) p(nested++, base + j) = 1.0;
          }
        }
    perms.push_back(std::move(p));
  }
  return perms;
}

StarHom compose_homs(const StarHom& outer, const StarHom& inner) {
  require_same(inner.target(), outer.source(), "compose_homs");
  const auto perms = composite_permutations(outer, inner);
  std::vector<Matrix> conj;
  for (std::size_t x = 0; x < outer.target().num_blocks(); ++x) {
    // ⊞_y 1_{c[y][x]} ⊗ V_y on the outer standard layout.
    const Matrix w = standard_block(outer, inner.conjugator_element(), x);
    conj.push_back(outer.conjugators()[x] * w * perms[x]);
  }
  return StarHom(inner.source(), outer.target(), inner.multiplicities() * outer.multiplicities(), std::move(conj),
                 1e-8);
}

State pushforward_state(const State& omega, const StarHom& f) {
  require_same(omega.algebra(), f.target(), "pushforward_state");
  std::vector<Matrix> out;
  for (int n : f.source().block_dims()) out.push_back(Matrix::Zero(n, n));
  for (std::size_t x = 0; x < f.target().num_blocks(); ++x) {
    const Matrix& u = f.conjugators()[x];
    const Matrix rotated = u.adjoint() * omega.density(x) * u;
    for (std::size_t y = 0; y < f.source().num_blocks(); ++y) {
      const int c = f.multiplicity(y, x);
      if (c == 0) continue;
      out[y] += partial_trace_left(f.layout().extract(rotated, x, y, y), c, f.source().block_dim(y));
    }
  }
  return State(f.source(), std::move(out));
}

CPUMap::CPUMap(AlgebraSpec source, AlgebraSpec target, std::vector<Matrix> choi)
    : source_(std::move(source)), target_(std::move(target)), choi_(std::move(choi)) {
  const std::size_t s = source_.num_blocks();
  if (choi_.size() != s * target_.num_blocks())
    throw StructuralError("CPUMap: need one Choi matrix per (target block, source block) pair");
  for (std::size_t y = 0; y < target_.num_blocks(); ++y)
    for (std::size_t x = 0; x < s; ++x) {
      const int d = source_.block_dim(x) * target_.block_dim(y);
      const Matrix& j = choi_[y * s + x];
      if (j.rows() != d || j.cols() != d)
        throw StructuralError("CPUMap: component (" + std::to_string(y) + "," + std::to_string(x) +
                              ") Choi matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    }
}

CPUMap CPUMap::identity(const AlgebraSpec& algebra) {
  return from_action(algebra, algebra, [](const AlgebraElement& a) { return a; });
}

Matrix apply_choi(const Matrix& choi, const Matrix& x, int m, int n) {
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (x(i, j) != Complex(0.0)) out += x(i, j) * choi.block(i * n, j * n, n, n);
  return out;
}

Matrix apply_choi_adjoint(const Matrix& choi, const Matrix& y, int m, int n) {
  Matrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(j, i) = (choi.block(i * n, j * n, n, n) * y).trace();
  return out;
}

AlgebraElement apply_cpu(const CPUMap& q, const AlgebraElement& a) {
  require_same(a.algebra(), q.source(), "apply_cpu");
  std::vector<Matrix> out;
  for (std::size_t y = 0; y < q.target().num_blocks(); ++y) {
    const int n = q.target().block_dim(y);
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t x = 0; x < q.source().num_blocks(); ++x)
      acc += apply_choi(q.choi(y, x), a.block(x), q.source().block_dim(x), n);
    out.push_back(std::move(acc));
  }
  return AlgebraElement(q.target(), std::move(out));
}

CPUMap compose_cpu(const CPUMap& outer, const CPUMap& inner) {
  require_same(inner.target(), outer.source(), "compose_cpu");
  return CPUMap::from_action(inner.source(), outer.target(),
                             [&](const AlgebraElement& a) { return apply_cpu(outer, apply_cpu(inner, a)); });
}

State pullback_state(const State& xi, const CPUMap& q) {
  require_same(xi.algebra(), q.target(), "pullback_state");
  std::vector<Matrix> out;
  for (std::size_t x = 0; x < q.source().num_blocks(); ++x) {
    const int m = q.source().block_dim(x);
    Matrix acc = Matrix::Zero(m, m);
    for (std::size_t y = 0; y < q.target().num_blocks(); ++y)
      acc += apply_choi_adjoint(q.choi(y, x), xi.density(y), m, q.target().block_dim(y));
    out.push_back(std::move(acc));
  }
  return State(q.source(), std::move(out));
}

ValidationReport validate_cpu(const CPUMap& q, double atol) {
  ValidationReport report;
  for (std::size_t y = 0; y < q.target().num_blocks(); ++y)
    for (std::size_t x = 0; x < q.source().num_blocks(); ++x) {
      const Matrix& j = q.choi(y, x);
      const std::string where = "component (" + std::to_string(y) + "," + std::to_string(x) + ")";
      const double herm = hermiticity_residual(j);
      if (herm > atol) report.add("complete-positivity", where + " Choi not Hermitian", herm);
      Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (j + j.adjoint())), Eigen::EigenvaluesOnly);
      const double min_eig = es.eigenvalues().minCoeff();
      if (min_eig < -atol) report.add("complete-positivity", where, min_eig);
    }
  for (std::size_t y = 0; y < q.target().num_blocks(); ++y) {
    const int n = q.target().block_dim(y);
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t x = 0; x < q.source().num_blocks(); ++x) {
      const int m = q.source().block_dim(x);
      acc += apply_choi(q.choi(y, x), Matrix::Identity(m, m), m, n);
    }
    const double r = (acc - Matrix::Identity(n, n)).norm();
    if (r > atol) report.add("unitality", "target block " + std::to_string(y), r);
  }
  return report;
}

AdUnitary ad_unitary(const AlgebraElement& u, double atol) {
  for (std::size_t x = 0; x < u.blocks().size(); ++x) {
    const double r = unitarity_residual(u.block(x));
    if (r > atol) throw std::invalid_argument("ad_unitary: block " + std::to_string(x) + " is not unitary");
  }
  const auto s = static_cast<Eigen::Index>(u.algebra().num_blocks());
  StarHom hom(u.algebra(), u.algebra(), Multiplicities::Identity(s, s), u.blocks(), atol);
  CPUMap cpu = CPUMap::from_action(u.algebra(), u.algebra(),
                                   [&](const AlgebraElement& a) { return u * a * u.adjoint(); });
  return {std::move(hom), std::move(cpu)};
}

StarHom direct_sum(const StarHom& a, const StarHom& b) {
  const auto ts = static_cast<Eigen::Index>(a.source().num_blocks());
  const auto tt = static_cast<Eigen::Index>(a.target().num_blocks());
  Multiplicities c = Multiplicities::Zero(ts + b.multiplicities().rows(), tt + b.multiplicities().cols());
  c.topLeftCorner(ts, tt) = a.multiplicities();
  c.bottomRightCorner(b.multiplicities().rows(), b.multiplicities().cols()) = b.multiplicities();
  std::vector<Matrix> conj = a.conjugators();
  conj.insert(conj.end(), b.conjugators().begin(), b.conjugators().end());
  return StarHom(AlgebraSpec::direct_sum(a.source(), b.source()), AlgebraSpec::direct_sum(a.target(), b.target()),
                 std::move(c), std::move(conj), 1e-8);
}

CPUMap direct_sum(const CPUMap& a, const CPUMap& b) {
  const AlgebraSpec src = AlgebraSpec::direct_sum(a.source(), b.source());
  const AlgebraSpec tgt = AlgebraSpec::direct_sum(a.target(), b.target());
  const std::size_t sa = a.source().num_blocks();
  const std::size_t ta = a.target().num_blocks();
  std::vector<Matrix> choi;
  for (std::size_t y = 0; y < tgt.num_blocks(); ++y)
    for (std::size_t x = 0; x < src.num_blocks(); ++x) {
      if (y < ta && x < sa) {
        choi.push_back(a.choi(y, x));
      } else if (y >= ta && x >= sa) {
        choi.push_back(b.choi(y - ta, x - sa));
      } else {
        const int d = src.block_dim(x) * tgt.block_dim(y);
        choi.push_back(Matrix::Zero(d, d));
      }
    }
  return CPUMap(src, tgt, std::move(choi));
}

}  // namespace ncstat
