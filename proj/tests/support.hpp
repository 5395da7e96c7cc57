#pragma once

// Small builders shared by the unit tests.

#include <cmath>
#include <initializer_list>
#include <vector>

#include "ncstat/algebra.hpp"
#include "ncstat/generators.hpp"
#include "ncstat/hypotheses.hpp"
#include "ncstat/maps.hpp"

namespace testing {

using namespace ncstat;

inline Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

inline Matrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (Complex v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

inline State single_block(const Matrix& d) { return State(AlgebraSpec({static_cast<int>(d.rows())}), {d}); }

inline State classical(std::initializer_list<double> p) {
  std::vector<Matrix> d;
  for (double v : p) d.push_back(scalar(v));
  return State(AlgebraSpec(std::vector<int>(p.size(), 1)), std::move(d));
}

/// Random (not necessarily Hermitian) element.
inline AlgebraElement random_element(Rng& rng, const AlgebraSpec& a) {
  std::vector<Matrix> blocks;
  for (int m : a.block_dims()) blocks.push_back(gaussian_matrix(rng, m, m));
  return AlgebraElement(a, std::move(blocks));
}

/// C ⊕ C → M_2, b1 ⊕ b2 ↦ diag(b1, b2).
inline StarHom diagonal_embedding() {
  Multiplicities c(2, 1);
  c << 1, 1;
  return StarHom::standard(AlgebraSpec({1, 1}), AlgebraSpec({2}), c);
}

/// Q(A) = A_00 ⊕ A_11 on M_2 → C ⊕ C.
inline CPUMap dephasing() {
  const AlgebraSpec m2({2}), cc({1, 1});
  return CPUMap::from_action(m2, cc, [&](const AlgebraElement& a) {
    return AlgebraElement(cc, {Matrix(a.block(0).block(0, 0, 1, 1)), Matrix(a.block(0).block(1, 1, 1, 1))});
  });
}

/// max over matrix units of ‖L1(E) − L2(E)‖.
template <typename L1, typename L2>
double max_unit_gap(const AlgebraSpec& a, L1&& l1, L2&& l2) {
  double worst = 0.0;
  for (const auto& e : matrix_units(a)) worst = std::max(worst, distance(l1(e), l2(e)));
  return worst;
}

}  // namespace testing
