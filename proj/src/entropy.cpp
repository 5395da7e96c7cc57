#include "ncstat/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace ncstat {

ExtendedReal::ExtendedReal(double v) : value_(v) {
  if (std::isnan(v)) throw std::domain_error("ExtendedReal: NaN");
  if (v == -std::numeric_limits<double>::infinity()) throw std::domain_error("ExtendedReal: -inf is not allowed");
}

double ExtendedReal::value() const {
  if (is_infinite()) throw std::domain_error("ExtendedReal: value is infinite");
  return value_;
}

ExtendedReal operator*(double s, ExtendedReal a) {
  if (s < 0) throw std::domain_error("ExtendedReal: negative scaling");
  if (a.is_infinite()) return s == 0.0 ? ExtendedReal(0.0) : a;
  return ExtendedReal(s * a.value_);
}

std::string to_string(ExtendedReal v) {
  if (v.is_infinite()) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v.value());
  return buf;
}

double von_neumann_entropy(const Matrix& density, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (density + density.adjoint())), Eigen::EigenvaluesOnly);
  const auto& l = es.eigenvalues();
  if (l.size() == 0) return 0.0;
  const double thr = cutoff * l.maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.size(); ++i)
    if (l(i) > thr && l(i) > 0.0) s -= l(i) * std::log(l(i));
  return s;
}

double von_neumann_entropy(const State& omega, double cutoff) {
  double s = 0.0;
  for (const auto& d : omega.densities()) s += von_neumann_entropy(d, cutoff);
  return s;
}

ExtendedReal relative_entropy(const State& omega, const State& omega_prime, double cutoff) {
  if (!(omega.algebra() == omega_prime.algebra())) throw StructuralError("relative_entropy: algebra mismatch");
  if (!absolutely_continuous(omega, omega_prime, cutoff)) return ExtendedReal::infinity();

  const double loose = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t x = 0; x < omega.densities().size(); ++x) {
    const auto e = hermitian_eigen(omega.density(x), loose);
    const auto ep = hermitian_eigen(omega_prime.density(x), loose);
    const double lmax = e.eigenvalues.maxCoeff();
    if (lmax <= 0.0) continue;  // p_x = 0 contributes 0·ln 0 = 0
    const double thr = cutoff * lmax;
    const double mmax = ep.eigenvalues.maxCoeff();
    const double thr_p = mmax > 0.0 ? cutoff * mmax : loose;

    // |⟨u_i|v_j⟩|²
    const Eigen::MatrixXd overlap = (e.eigenvectors.adjoint() * ep.eigenvectors).cwiseAbs2();
    for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i) {
      const double li = e.eigenvalues(i);
      if (li > thr) total += li * std::log(li);
    }
    for (Eigen::Index j = 0; j < ep.eigenvalues.size(); ++j) {
      double weight = 0.0;  // ⟨v_j| D_x |v_j⟩ restricted to the support of D_x
      for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i)
        if (e.eigenvalues(i) > thr) weight += overlap(i, j) * e.eigenvalues(i);
      const double mj = ep.eigenvalues(j);
      if (mj > thr_p) {
        total -= weight * std::log(mj);
      } else if (weight > thr) {
        // Passed the projection test but leans on a numerically null direction.
        return ExtendedReal::infinity();
      }
    }
  }
  return ExtendedReal(total);
}

ExtendedReal re_functor(const NCMorphism& m, double cutoff) {
  return relative_entropy(m.target(), pullback_state(m.source(), m.hypothesis()), cutoff);
}

double conditional_entropy(const Matrix& rho, int left_dim, int right_dim, double cutoff) {
  const Matrix right = partial_trace_left(rho, left_dim, right_dim);
  return von_neumann_entropy(right, cutoff) - von_neumann_entropy(rho, cutoff);
}

NCObject convex_sum_objects(double lambda, const NCObject& left, const NCObject& right) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("convex sum weight must lie in [0, 1]");
  std::vector<Matrix> d;
  for (const auto& m : left.densities()) d.push_back(lambda * m);
  for (const auto& m : right.densities()) d.push_back((1.0 - lambda) * m);
  return State(AlgebraSpec::direct_sum(left.algebra(), right.algebra()), std::move(d));
}

NCMorphism convex_sum_morphisms(double lambda, const NCMorphism& left, const NCMorphism& right) {
  return NCMorphism(convex_sum_objects(lambda, left.source(), right.source()),
                    convex_sum_objects(lambda, left.target(), right.target()), direct_sum(left.hom(), right.hom()),
                    direct_sum(left.hypothesis(), right.hypothesis()));
}

FunctorialityResult functoriality_defect(const NCMorphism& g, const NCMorphism& f, double cutoff) {
  const NCMorphism composite = compose_morphisms(g, f);
  FunctorialityResult r;
  r.composite = re_functor(composite, cutoff);
  r.inner = re_functor(g, cutoff);
  r.outer = re_functor(f, cutoff);
  std::vector<std::string> inf;
  if (r.composite.is_infinite()) inf.push_back("composite");
  if (r.inner.is_infinite()) inf.push_back("inner");
  if (r.outer.is_infinite()) inf.push_back("outer");
  if (inf.empty()) {
    r.defect = std::abs(r.composite.value() - r.inner.value() - r.outer.value());
  } else {
    for (std::size_t i = 0; i < inf.size(); ++i) r.infinite_terms += (i ? "," : "") + inf[i];
  }
  return r;
}

FunctorialityExpansion expand_functoriality(const NCMorphism& g, const NCMorphism& f, double atol, double cutoff) {
  const PairRectification pr = rectify_pair(g, f);
  const NCMorphism& fs = pr.outer;
  const NCMorphism& gs = pr.inner;
  const AlphaFamily alpha = extract_alphas(fs, atol);
  const StarHom& hom = fs.hom();
  const State& omega = fs.target();
  const State& xi = fs.source();
  const State zeta_r = pullback_state(gs.source(), gs.hypothesis());

  std::vector<Matrix> log_xi, log_zeta_r;
  for (std::size_t y = 0; y < xi.densities().size(); ++y) {
    log_xi.push_back(hermitian_log(xi.density(y), cutoff));
    log_zeta_r.push_back(hermitian_log(zeta_r.density(y), cutoff));
  }

  double alpha_term = 0.0;  // Σ tr(D_{x;yy} (ln α_yx ⊗ 1))
  double xi_term = 0.0;     // Σ tr(tr_c(D_{x;yy}) ln q_yσ_y)
  double zeta_term = 0.0;   // Σ tr(tr_c(D_{x;yy}) ln q^R_y σ^R_y)
  for (std::size_t x = 0; x < hom.target().num_blocks(); ++x)
    for (std::size_t y = 0; y < hom.source().num_blocks(); ++y) {
      const int c = hom.multiplicity(y, x);
      if (c == 0) continue;
      const int n = hom.source().block_dim(y);
      const Matrix seg = hom.layout().extract(omega.density(x), x, y, y);
      const Matrix reduced = partial_trace_left(seg, c, n);
      const Matrix log_alpha = hermitian_log(alpha.alpha(y, x), cutoff);
      alpha_term += (seg * kron(log_alpha, Matrix::Identity(n, n))).trace().real();
      xi_term += (reduced * log_xi[y]).trace().real();
      zeta_term += (reduced * log_zeta_r[y]).trace().real();
    }
  const double neg_entropy = -von_neumann_entropy(omega, cutoff);

  FunctorialityExpansion out;
  out.outer = {re_functor(f, cutoff).value(), neg_entropy - alpha_term - xi_term};
  out.inner = {re_functor(g, cutoff).value(), xi_term - zeta_term};
  out.composite = {re_functor(compose_morphisms(g, f), cutoff).value(), neg_entropy - alpha_term - zeta_term};

  const State through = pullback_state(gs.source(), compose_cpu(gs.hypothesis(), fs.hypothesis()));
  out.composite_state_residual = frobenius_distance(through, disintegration_state(hom, zeta_r, alpha));
  return out;
}

ChainRulePair chain_rule_pair(const Matrix& rho_abc, int d_a, int d_b, int d_c) {
  if (d_a < 1 || d_b < 1 || d_c < 1 || rho_abc.rows() != d_a * d_b * d_c || rho_abc.cols() != rho_abc.rows())
    throw StructuralError("chain rule: density is not (dA·dB·dC)-dimensional");
  const Matrix rho_bc = partial_trace_left(rho_abc, d_a, d_b * d_c);
  const Matrix rho_c = partial_trace_left(rho_bc, d_b, d_c);
  const AlgebraSpec alg_c({d_c}), alg_bc({d_b * d_c}), alg_abc({d_a * d_b * d_c});
  const State zeta(alg_c, {rho_c}), xi(alg_bc, {rho_bc}), omega(alg_abc, {rho_abc});

  const StarHom g = StarHom::standard(alg_c, alg_bc, Multiplicities::Constant(1, 1, d_b));
  const StarHom f = StarHom::standard(alg_bc, alg_abc, Multiplicities::Constant(1, 1, d_a));
  const AlphaFamily uniform_b(g.multiplicities(), {Matrix(Matrix::Identity(d_b, d_b) / double(d_b))});
  const AlphaFamily uniform_a(f.multiplicities(), {Matrix(Matrix::Identity(d_a, d_a) / double(d_a))});
  return {build_hypothesis_from_alphas(g, zeta, uniform_b, xi), build_hypothesis_from_alphas(f, xi, uniform_a, omega)};
}

double ChainRuleReport::max_defect() const {
  if (re_composite.is_infinite() || re_inner.is_infinite() || re_outer.is_infinite())
    return std::numeric_limits<double>::infinity();
  const double la = std::log(d_a), lb = std::log(d_b);
  return std::max({std::abs(h_ab_given_c - h_a_given_bc - h_b_given_c),
                   std::abs(re_composite.value() - h_ab_given_c - la - lb),
                   std::abs(re_inner.value() - h_b_given_c - lb), std::abs(re_outer.value() - h_a_given_bc - la)});
}

ChainRuleReport chain_rule(const Matrix& rho_abc, int d_a, int d_b, int d_c, double cutoff) {
  const ChainRulePair pair = chain_rule_pair(rho_abc, d_a, d_b, d_c);
  ChainRuleReport r;
  r.d_a = d_a;
  r.d_b = d_b;
  r.h_ab_given_c = conditional_entropy(rho_abc, d_a * d_b, d_c, cutoff);
  r.h_a_given_bc = conditional_entropy(rho_abc, d_a, d_b * d_c, cutoff);
  r.h_b_given_c = conditional_entropy(pair.outer.source().density(0), d_b, d_c, cutoff);
  r.re_composite = re_functor(compose_morphisms(pair.inner, pair.outer), cutoff);
  r.re_inner = re_functor(pair.inner, cutoff);
  r.re_outer = re_functor(pair.outer, cutoff);
  return r;
}

}  // namespace ncstat
