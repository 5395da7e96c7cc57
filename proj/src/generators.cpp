#include "ncstat/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ncstat {

void GeneratorConfig::validate() const {
  if (max_blocks < 1) throw std::invalid_argument("max_blocks must be >= 1");
  if (max_block_dim < 1) throw std::invalid_argument("max_block_dim must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
}

Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
  const double s = std::sqrt(0.5);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(s * re, s * im);
    }
  return g;
}

Matrix haar_unitary(Rng& rng, int n) {
  const Matrix z = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

AlgebraSpec gen_algebra(Rng& rng, const GeneratorConfig& cfg) {
  const int s = rng.uniform_int(1, cfg.max_blocks);
  std::vector<int> dims;
  for (int x = 0; x < s; ++x) dims.push_back(rng.uniform_int(1, cfg.max_block_dim));
  return AlgebraSpec(std::move(dims));
}

namespace {

// Shift every block by t·1 so that λ_min ≥ floor·λ_max across the whole list.
void apply_floor(std::vector<Matrix>& blocks) {
  double lmin = std::numeric_limits<double>::infinity();
  double lmax = 0.0;
  for (const auto& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues().minCoeff());
    lmax = std::max(lmax, es.eigenvalues().maxCoeff());
  }
  if (lmin >= kFaithfulFloor * lmax) return;
  const double t = 1.01 * (kFaithfulFloor * lmax - lmin) / (1.0 - kFaithfulFloor);
  for (auto& b : blocks) b += t * Matrix::Identity(b.rows(), b.cols());
}

void normalize_trace(std::vector<Matrix>& blocks) {
  double total = 0.0;
  for (const auto& b : blocks) total += b.trace().real();
  for (auto& b : blocks) {
    b /= total;
    b = (0.5 * (b + b.adjoint())).eval();
  }
}

Matrix random_psd(Rng& rng, int dim, int rank) {
  const Matrix g = gaussian_matrix(rng, dim, rank);
  return g * g.adjoint();
}

}  // namespace

Matrix gen_density(Rng& rng, int dim, bool faithful) {
  std::vector<Matrix> blocks{random_psd(rng, dim, faithful ? dim : rng.uniform_int(1, dim))};
  if (faithful) apply_floor(blocks);
  normalize_trace(blocks);
  return blocks[0];
}

State gen_state(Rng& rng, const GeneratorConfig& cfg, const AlgebraSpec& algebra) {
  std::vector<Matrix> blocks;
  const std::size_t s = algebra.num_blocks();
  // In non-faithful mode one block may be switched off entirely.
  const int empty_block = (!cfg.faithful_only && s > 1 && rng.uniform() < 0.25) ? rng.uniform_int(0, int(s) - 1) : -1;
  for (std::size_t x = 0; x < s; ++x) {
    const int m = algebra.block_dim(x);
    if (static_cast<int>(x) == empty_block) {
      blocks.push_back(Matrix::Zero(m, m));
      continue;
    }
    const int rank = cfg.faithful_only ? m : rng.uniform_int(1, m);
    blocks.push_back(random_psd(rng, m, rank));
  }
  if (cfg.faithful_only) apply_floor(blocks);
  normalize_trace(blocks);
  return State(algebra, std::move(blocks));
}

StarHom gen_hom(Rng& rng, const GeneratorConfig& cfg, const AlgebraSpec& source) {
  const std::size_t t = source.num_blocks();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int s = rng.uniform_int(1, cfg.max_blocks);
    Multiplicities c = Multiplicities::Zero(static_cast<Eigen::Index>(t), s);
    bool ok = true;
    for (int x = 0; x < s && ok; ++x) {
      std::vector<std::size_t> order(t);
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = t; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, int(i) - 1))]);
      int room = cfg.max_block_dim;
      for (std::size_t y : order) {
        const int n = source.block_dim(y);
        const int k = rng.uniform_int(0, room / n);
        c(static_cast<Eigen::Index>(y), x) = k;
        room -= k * n;
      }
      ok = c.col(x).sum() > 0;
    }
    // Injectivity: every source block must land somewhere.
    for (std::size_t y = 0; y < t && ok; ++y) ok = c.row(static_cast<Eigen::Index>(y)).sum() > 0;
    if (!ok) continue;

    std::vector<int> dims;
    for (int x = 0; x < s; ++x) {
      int m = 0;
      for (std::size_t y = 0; y < t; ++y) m += c(static_cast<Eigen::Index>(y), x) * source.block_dim(y);
      dims.push_back(m);
    }
    std::vector<Matrix> conj;
    for (int m : dims) conj.push_back(haar_unitary(rng, m));
    return StarHom(source, AlgebraSpec(std::move(dims)), std::move(c), std::move(conj));
  }
  throw std::runtime_error("gen_hom: no injective unital hom fits within max_block_dim");
}

AlphaFamily gen_alphas(Rng& rng, const Multiplicities& mult, bool faithful) {
  const auto t = static_cast<std::size_t>(mult.rows());
  const auto s = static_cast<std::size_t>(mult.cols());
  std::vector<Matrix> alphas(t * s);
  for (std::size_t y = 0; y < t; ++y) {
    std::vector<Matrix> row;
    std::vector<std::size_t> where;
    for (std::size_t x = 0; x < s; ++x) {
      const int c = mult(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      if (c == 0) continue;
      row.push_back(random_psd(rng, c, faithful ? c : rng.uniform_int(1, c)));
      where.push_back(x);
    }
    if (faithful) apply_floor(row);
    normalize_trace(row);
    for (std::size_t i = 0; i < row.size(); ++i) alphas[y * s + where[i]] = std::move(row[i]);
  }
  return AlphaFamily(mult, std::move(alphas));
}

std::vector<double> gen_distribution(Rng& rng, int k, bool faithful) {
  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0.0;
  for (auto& v : p) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    v = -std::log(u);
    if (!faithful && k > 1 && rng.uniform() < 0.3) v = 0.0;
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (auto& v : p) v /= total;
  return p;
}

ComposablePair gen_composable_pair(Rng& rng, const GeneratorConfig& cfg) {
  const AlgebraSpec c_alg = gen_algebra(rng, cfg);
  const StarHom g = gen_hom(rng, cfg, c_alg);
  const StarHom f = gen_hom(rng, cfg, g.target());
  const State omega = gen_state(rng, cfg, f.target());
  const State xi = pushforward_state(omega, f);
  const State zeta = pushforward_state(xi, g);
  const AlphaFamily alpha_f = gen_alphas(rng, f.multiplicities(), cfg.faithful_only);
  const AlphaFamily alpha_g = gen_alphas(rng, g.multiplicities(), cfg.faithful_only);
  return {build_hypothesis_from_alphas(g, zeta, alpha_g, xi, cfg.atol),
          build_hypothesis_from_alphas(f, xi, alpha_f, omega, cfg.atol)};
}

ComposablePair gen_composable_pair(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng = Rng::stream(cfg.seed, 0);
  return gen_composable_pair(rng, cfg);
}

NCMorphism gen_optimal_morphism(Rng& rng, const GeneratorConfig& cfg) {
  const AlgebraSpec b = gen_algebra(rng, cfg);
  const StarHom f = gen_hom(rng, cfg, b);
  const State xi = gen_state(rng, cfg, b);
  return build_hypothesis_from_alphas(f, xi, gen_alphas(rng, f.multiplicities(), cfg.faithful_only), std::nullopt,
                                      cfg.atol);
}

}  // namespace ncstat
