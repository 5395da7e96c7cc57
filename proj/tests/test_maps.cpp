#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

template <typename Fn>
RawLinearMap raw_from(const AlgebraSpec& source, const AlgebraSpec& target, Fn&& fn) {
  Matrix m = Matrix::Zero(target.dim(), source.dim());
  for (int k = 0; k < source.dim(); ++k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(source.dim());
    e(k) = 1.0;
    m.col(k) = vectorize(fn(unvectorize(source, e)));
  }
  return {source, target, m};
}

Matrix swap_middle() {
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = p(1, 2) = p(2, 1) = p(3, 3) = 1.0;
  return p;
}

const GeneratorConfig kCfg{};

}  // namespace

TEST_CASE("apply_hom examples") {
  SUBCASE("diagonal embedding") {
    const AlgebraElement b(AlgebraSpec({1, 1}), {scalar(2), scalar(-3)});
    CHECK((apply_hom(diagonal_embedding(), b).block(0) - diag({2, -3})).norm() == 0.0);
  }
  SUBCASE("two copies") {
    const StarHom f = StarHom::standard(AlgebraSpec({2}), AlgebraSpec({4}), Multiplicities::Constant(1, 1, 2));
    const Matrix b = mat({{1, Complex(0, 2)}, {3, 4}});
    CHECK((apply_hom(f, AlgebraElement(AlgebraSpec({2}), {b})).block(0) - kron(Matrix::Identity(2, 2), b)).norm() == 0.0);
  }
  SUBCASE("random homs are unital") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const StarHom f = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
      CHECK(distance(apply_hom(f, AlgebraElement::identity(f.source())), AlgebraElement::identity(f.target())) < 1e-12);
    }
  }
}

TEST_CASE("StarHom rejects inconsistent data") {
  const AlgebraSpec m2({2}), m4({4}), m3({3});
  CHECK_THROWS_AS(StarHom::standard(m2, m3, Multiplicities::Constant(1, 1, 2)), StructuralError);
  CHECK_THROWS_AS(StarHom::standard(m2, m4, Multiplicities::Constant(1, 1, -2)), StructuralError);
  CHECK_THROWS_AS(StarHom(m2, m4, Multiplicities::Constant(1, 1, 2), {2.0 * Matrix::Identity(4, 4)}), StructuralError);
}

TEST_CASE("hom_from_raw examples") {
  SUBCASE("identity on M_2") {
    const AlgebraSpec m2({2});
    const StarHom f = hom_from_raw(raw_from(m2, m2, [](const AlgebraElement& b) { return b; }));
    CHECK(f.multiplicities() == Multiplicities::Constant(1, 1, 1));
    CHECK(max_unit_gap(m2, [&](const auto& e) { return apply_hom(f, e); }, [](const auto& e) { return e; }) < 1e-12);
  }
  SUBCASE("permuted doubling") {
    const AlgebraSpec m2({2}), m4({4});
    const Matrix p = swap_middle();
    auto l = [&](const AlgebraElement& b) {
      return AlgebraElement(m4, {p * kron(Matrix::Identity(2, 2), b.block(0)) * p.transpose()});
    };
    const StarHom f = hom_from_raw(raw_from(m2, m4, l));
    CHECK(f.multiplicities() == Multiplicities::Constant(1, 1, 2));
    CHECK(max_unit_gap(m2, [&](const auto& e) { return apply_hom(f, e); }, l) < 1e-12);
    // Ad_{U†}∘L is the standard layout.
    const AlgebraElement u = f.conjugator_element();
    CHECK(max_unit_gap(m2, [&](const auto& e) { return u.adjoint() * l(e) * u; },
                       [&](const auto& e) { return apply_hom(f.standard_part(), e); }) < 1e-12);
  }
  SUBCASE("transpose is not multiplicative") {
    const AlgebraSpec m2({2});
    try {
      hom_from_raw(raw_from(m2, m2, [&](const AlgebraElement& b) {
        return AlgebraElement(m2, {Matrix(b.block(0).transpose())});
      }));
      FAIL("transpose accepted");
    } catch (const NotAHomomorphism& e) {
      CHECK(e.axiom() == "multiplicativity");
      CHECK(e.residual() > 0.5);
    }
  }
  SUBCASE("non-unital map") {
    const AlgebraSpec c({1}), m2({2});
    CHECK_THROWS_AS(hom_from_raw(raw_from(c, m2, [&](const AlgebraElement& b) {
                      return AlgebraElement(m2, {Matrix(b.block(0)(0, 0) * diag({1, 0}))});
                    })),
                    NotAHomomorphism);
  }
  SUBCASE("random homs survive the raw round trip") {
    Rng rng(17);
    for (int i = 0; i < 25; ++i) {
      const StarHom f = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
      const StarHom g = hom_from_raw(to_raw(f));
      CHECK(g.multiplicities() == f.multiplicities());
      CHECK(max_unit_gap(f.source(), [&](const auto& e) { return apply_hom(f, e); },
                         [&](const auto& e) { return apply_hom(g, e); }) < 1e-10);
    }
  }
}

TEST_CASE("compose_homs") {
  SUBCASE("multiplicities multiply") {
    Multiplicities cf(2, 1), cg(1, 2);
    cf << 2, 1;
    cg << 1, 1;
    const StarHom f = StarHom::standard(AlgebraSpec({1, 1}), AlgebraSpec({3}), cf);
    const StarHom g = StarHom::standard(AlgebraSpec({1}), AlgebraSpec({1, 1}), cg);
    CHECK(compose_homs(f, g).multiplicities() == Multiplicities::Constant(1, 1, 3));
  }
  SUBCASE("identity is neutral") {
    Rng rng(2);
    const StarHom f = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
    const StarHom h = compose_homs(f, StarHom::identity(f.source()));
    CHECK(h.multiplicities() == f.multiplicities());
    CHECK(max_unit_gap(f.source(), [&](const auto& e) { return apply_hom(f, e); },
                       [&](const auto& e) { return apply_hom(h, e); }) < 1e-12);
  }
  SUBCASE("random composable pairs act pointwise") {
    Rng rng(23);
    for (int i = 0; i < 30; ++i) {
      const StarHom g = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
      const StarHom f = gen_hom(rng, kCfg, g.target());
      const StarHom h = compose_homs(f, g);
      CHECK(h.multiplicities() == Multiplicities(g.multiplicities() * f.multiplicities()));
      CHECK(max_unit_gap(g.source(), [&](const auto& e) { return apply_hom(h, e); },
                         [&](const auto& e) { return apply_hom(f, apply_hom(g, e)); }) < 1e-12);
    }
  }
  SUBCASE("composite permutations relayout nested copies") {
    Rng rng(29);
    for (int i = 0; i < 10; ++i) {
      const StarHom g = gen_hom(rng, kCfg, gen_algebra(rng, kCfg)).standard_part();
      const StarHom f = gen_hom(rng, kCfg, g.target()).standard_part();
      const auto perms = composite_permutations(f, g);
      const StarHom flat = StarHom::standard(g.source(), f.target(), g.multiplicities() * f.multiplicities());
      CHECK(max_unit_gap(g.source(),
                         [&](const auto& e) {
                           const AlgebraElement s = apply_hom(flat, e);
                           std::vector<Matrix> blocks;
                           for (std::size_t x = 0; x < perms.size(); ++x)
                             blocks.push_back(perms[x] * s.block(x) * perms[x].transpose());
                           return AlgebraElement(f.target(), blocks);
                         },
                         [&](const auto& e) { return apply_hom(f, apply_hom(g, e)); }) < 1e-14);
    }
  }
  CHECK_THROWS_AS(compose_homs(diagonal_embedding(), diagonal_embedding()), StructuralError);
}

TEST_CASE("pushforward_state examples") {
  SUBCASE("diagonal embedding reads the diagonal") {
    const State omega = single_block(mat({{0.7, Complex(0, 0.1)}, {Complex(0, -0.1), 0.3}}));
    const State xi = pushforward_state(omega, diagonal_embedding());
    CHECK(xi.density(0)(0, 0).real() == doctest::Approx(0.7));
    CHECK(xi.density(1)(0, 0).real() == doctest::Approx(0.3));
  }
  SUBCASE("maximally mixed through doubling") {
    const StarHom f = StarHom::standard(AlgebraSpec({2}), AlgebraSpec({4}), Multiplicities::Constant(1, 1, 2));
    const State xi = pushforward_state(State::maximally_mixed(f.target()), f);
    CHECK((xi.density(0) - diag({0.5, 0.5})).norm() < 1e-15);
  }
  SUBCASE("definitional oracle on random elements") {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
      const StarHom f = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
      const State omega = gen_state(rng, kCfg, f.target());
      const State xi = pushforward_state(omega, f);
      for (int k = 0; k < 20; ++k) {
        const AlgebraElement b = random_element(rng, f.source());
        CHECK(std::abs(xi.expectation(b) - omega.expectation(apply_hom(f, b))) < 1e-10);
      }
    }
  }
}

TEST_CASE("Choi matrices") {
  SUBCASE("identity channel") {
    const CPUMap id = CPUMap::identity(AlgebraSpec({2}));
    const Matrix x = mat({{1, 2}, {3, Complex(0, 4)}});
    CHECK((apply_choi(id.choi(0, 0), x, 2, 2) - x).norm() == 0.0);
    CHECK(validate_cpu(id).valid());
  }
  SUBCASE("adjoint is the trace dual") {
    Rng rng(37);
    const Matrix j = gaussian_matrix(rng, 6, 6);
    const Matrix x = gaussian_matrix(rng, 2, 2);
    const Matrix y = gaussian_matrix(rng, 3, 3);
    CHECK(std::abs((apply_choi_adjoint(j, y, 2, 3) * x).trace() - (y * apply_choi(j, x, 2, 3)).trace()) < 1e-12);
  }
  SUBCASE("transpose fails complete positivity with eigenvalue -1") {
    const AlgebraSpec m2({2});
    const CPUMap t = CPUMap::from_action(m2, m2, [&](const AlgebraElement& a) {
      return AlgebraElement(m2, {Matrix(a.block(0).transpose())});
    });
    const ValidationReport r = validate_cpu(t);
    REQUIRE_FALSE(r.valid());
    CHECK(r.violations.front().kind == "complete-positivity");
    CHECK(r.violations.front().residual == doctest::Approx(-1.0));
  }
  SUBCASE("weighted trace maps are unital and CP") {
    const AlgebraSpec a({1, 2}), b({2, 3});
    const double w[2][2] = {{0.25, 0.75}, {0.5, 0.5}};  // w[y][x], rows sum to 1
    const CPUMap q = CPUMap::from_action(a, b, [&](const AlgebraElement& e) {
      std::vector<Matrix> out;
      for (std::size_t y = 0; y < 2; ++y) {
        Complex s = 0;
        for (std::size_t x = 0; x < 2; ++x) s += w[y][x] * e.block(x).trace() / double(a.block_dim(x));
        out.push_back(s * Matrix::Identity(b.block_dim(y), b.block_dim(y)));
      }
      return AlgebraElement(b, out);
    });
    CHECK(validate_cpu(q).valid());
    CHECK(distance(apply_cpu(q, AlgebraElement::identity(a)), AlgebraElement::identity(b)) < 1e-14);
  }
  SUBCASE("non-unital map is reported") {
    const AlgebraSpec m2({2});
    const CPUMap half = CPUMap::from_action(m2, m2, [](const AlgebraElement& a) { return Complex(0.5) * a; });
    CHECK(validate_cpu(half).residual("unitality") == doctest::Approx(std::sqrt(0.5)));
  }
}

TEST_CASE("compose_cpu") {
  const AlgebraSpec m2({2});
  auto depolarizing = [&](double p) {
    return CPUMap::from_action(m2, m2, [=](const AlgebraElement& a) {
      return AlgebraElement(m2, {Matrix(p * a.block(0) + (1 - p) * a.block(0).trace() / 2.0 * Matrix::Identity(2, 2))});
    });
  };
  SUBCASE("identity is neutral") {
    const CPUMap q = depolarizing(0.3);
    const CPUMap c = compose_cpu(CPUMap::identity(m2), q);
    CHECK((c.choi(0, 0) - q.choi(0, 0)).norm() < 1e-15);
  }
  SUBCASE("depolarizing contractions multiply") {
    const CPUMap c = compose_cpu(depolarizing(0.5), depolarizing(0.4));
    CHECK((c.choi(0, 0) - depolarizing(0.2).choi(0, 0)).norm() < 1e-14);
  }
  SUBCASE("random hypotheses compose pointwise") {
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
      const ComposablePair p = gen_composable_pair(rng, kCfg);
      const CPUMap& r = p.inner.hypothesis();
      const CPUMap& q = p.outer.hypothesis();
      const CPUMap rq = compose_cpu(r, q);
      CHECK(max_unit_gap(q.source(), [&](const auto& e) { return apply_cpu(rq, e); },
                         [&](const auto& e) { return apply_cpu(r, apply_cpu(q, e)); }) < 1e-11);
      CHECK(validate_cpu(rq).valid());
    }
  }
}

TEST_CASE("pullback_state is the dual of apply_cpu") {
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    const ComposablePair p = gen_composable_pair(rng, kCfg);
    const CPUMap& q = p.outer.hypothesis();
    const State xi_q = pullback_state(p.outer.source(), q);
    for (int k = 0; k < 5; ++k) {
      const AlgebraElement a = random_element(rng, q.source());
      CHECK(std::abs(xi_q.expectation(a) - p.outer.source().expectation(apply_cpu(q, a))) < 1e-12);
    }
  }
}

TEST_CASE("ad_unitary") {
  const AlgebraSpec m2({2});
  SUBCASE("identity") {
    const AdUnitary ad = ad_unitary(AlgebraElement::identity(m2));
    CHECK(ad.hom.multiplicities() == Multiplicities::Constant(1, 1, 1));
    CHECK(ad.hom.is_standard_form());
  }
  SUBCASE("Pauli X swaps the diagonal") {
    const AdUnitary ad = ad_unitary(AlgebraElement(m2, {mat({{0, 1}, {1, 0}})}));
    const AlgebraElement d(m2, {diag({2, 5})});
    CHECK((apply_hom(ad.hom, d).block(0) - diag({5, 2})).norm() < 1e-15);
    CHECK((apply_cpu(ad.cpu, d).block(0) - diag({5, 2})).norm() < 1e-15);
  }
  SUBCASE("Ad_{U†} undoes Ad_U") {
    Rng rng(47);
    const AlgebraSpec a({1, 2, 3});
    std::vector<Matrix> blocks;
    for (int m : a.block_dims()) blocks.push_back(haar_unitary(rng, m));
    const AlgebraElement u(a, blocks);
    const AdUnitary ad = ad_unitary(u), inv = ad_unitary(u.adjoint());
    for (int k = 0; k < 5; ++k) {
      const AlgebraElement b = random_element(rng, a);
      CHECK(distance(apply_hom(inv.hom, apply_hom(ad.hom, b)), b) < 1e-12);
      CHECK(distance(apply_cpu(inv.cpu, apply_cpu(ad.cpu, b)), b) < 1e-12);
    }
  }
  CHECK_THROWS_AS(ad_unitary(AlgebraElement(m2, {diag({1, 2})})), std::invalid_argument);
}

TEST_CASE("direct sums act blockwise") {
  Rng rng(53);
  const StarHom f = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
  const StarHom g = gen_hom(rng, kCfg, gen_algebra(rng, kCfg));
  const StarHom fg = direct_sum(f, g);
  CHECK(fg.source() == AlgebraSpec::direct_sum(f.source(), g.source()));
  CHECK(fg.target() == AlgebraSpec::direct_sum(f.target(), g.target()));
  CHECK(distance(apply_hom(fg, AlgebraElement::identity(fg.source())), AlgebraElement::identity(fg.target())) < 1e-12);
  const CPUMap q = direct_sum(CPUMap::identity(f.source()), CPUMap::identity(g.source()));
  CHECK(validate_cpu(q).valid());
}

TEST_CASE("vectorize is column-major and invertible") {
  const AlgebraSpec a({1, 2});
  const AlgebraElement e(a, {scalar(7), mat({{1, 2}, {3, 4}})});
  const Eigen::VectorXcd v = vectorize(e);
  REQUIRE(v.size() == 5);
  CHECK(v(0) == Complex(7));
  CHECK(v(1) == Complex(1));
  CHECK(v(2) == Complex(3));
  CHECK(v(3) == Complex(2));
  CHECK(distance(unvectorize(a, v), e) == 0.0);
}
