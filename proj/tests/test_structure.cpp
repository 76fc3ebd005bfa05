#include "helpers.hpp"
#include "sbjo/orthogonality.hpp"
#include "sbjo/sampling.hpp"
#include "sbjo/structure.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sbjo;
using namespace sbjo::test;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Internal;
}

}  // namespace

TEST_SUITE("structure") {

TEST_CASE("right symmetry") {
  CHECK(is_right_symmetric(Element::identity(dims({1, 2, 3}))));
  CHECK_FALSE(is_right_symmetric(diag({1, 0})));
  Matrix one = Matrix::Identity(1, 1), half = Matrix::Zero(2, 2);
  half(0, 0) = 1.0;
  CHECK_FALSE(is_right_symmetric(Element(dims({1, 2}), {one, half})));
  CHECK_FALSE(is_right_symmetric(Element::zero(dims({2}))));
}

TEST_CASE("mutual edge witness") {
  const auto w = mutual_edge_witness(diag({1, 0}));
  REQUIRE(w);
  CHECK(dist(*w, unit(2, 2, 2)) < 1e-12);
  CHECK(strong_bj(*w, diag({1, 0})).value);
  CHECK(strong_bj(diag({1, 0}), *w).value);
  CHECK_FALSE(mutual_edge_witness(Element::identity(dims({2}))));
  const auto w2 = mutual_edge_witness(unit(2, 1, 2));
  REQUIRE(w2);
  CHECK(dist(*w2, unit(2, 2, 2)) < 1e-12);
}

TEST_CASE("witness is mutual on random singular elements") {
  Rng rng(20);
  for (int t = 0; t < 200; ++t) {
    const BlockStructure st = random_structure(rng, 3, 5);
    const Element x = random_singular_element(st, rng);
    const auto w = mutual_edge_witness(x);
    CHECK(w.has_value() != is_right_symmetric(x));
    if (!w) continue;
    CHECK(strong_bj(x, *w).value);
    CHECK(strong_bj(*w, x).value);
  }
}

TEST_CASE("coisometries") {
  Rng rng(21);
  const Element u = haar_unitary(dims({2, 3}), rng);
  CHECK(is_coisometry(u));
  CHECK(is_coisometry(Complex(0.3, 2.0) * u));
  CHECK_FALSE(is_coisometry(unit(2, 1, 2)));
  CHECK(is_coisometry(diag({1, -1})));
}

TEST_CASE("noninvertible shift") {
  CHECK(std::abs(unimodular_noninvertible_shift(Element::identity(dims({2}))) - 1.0) < 1e-12);
  CHECK(std::abs(unimodular_noninvertible_shift(diag({1, Complex(0, 1)})) - 1.0) < 1e-12);
  const double th = 0.7;
  Matrix r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Complex l = unimodular_noninvertible_shift(single(r));
  CHECK(std::abs(l) == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(std::arg(l)) - th) < 1e-12);
  CHECK(std::abs((r - l * Matrix::Identity(2, 2)).determinant()) < 1e-12);
  CHECK(kind_of([] { unimodular_noninvertible_shift(diag({2, 1})); }) == ErrorKind::NotCoisometry);

  Rng rng(22);
  for (int t = 0; t < 50; ++t) {
    const BlockStructure st = random_structure(rng, 3, 4);
    const Element u = random_coisometry(st, rng);
    const Complex lam = unimodular_noninvertible_shift(u);
    CHECK(std::abs(lam) == doctest::Approx(1.0));
    const Element shifted = Complex(1.0 / u.norm()) * u - lam * Element::identity(st);
    CHECK_FALSE(is_right_symmetric(shifted, ToleranceConfig{1e-8, 1e-9, 1e-8}));
  }
}

TEST_CASE("left symmetry") {
  CHECK(is_left_symmetric(unit(2, 1, 1)));
  CHECK_FALSE(is_left_symmetric(diag({1, 1})));
  Rng rng(23);
  const BlockStructure st = dims({3});
  const Element a = Complex(3.0) * outer(st, random_block_vector(st, 0, rng), random_block_vector(st, 0, rng));
  CHECK(is_left_symmetric(a));
}

TEST_CASE("R-set inclusion") {
  const Element i2 = Element::identity(dims({2})), e11 = unit(2, 1, 1);
  CHECK(r_leq(e11, i2).holds);
  const InclusionReport r = r_leq(i2, e11);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness);
  CHECK(dist(*r.witness, diag({1, 0})) < 1e-12);
  CHECK(strong_bj(i2, *r.witness).value);
  CHECK_FALSE(strong_bj(e11, *r.witness).value);
  CHECK(r_leq(diag({2, 1}), diag({2, 1})).holds);
}

TEST_CASE("L-set inclusion") {
  CHECK(l_leq(Element::identity(dims({2})), unit(2, 1, 1)).holds);
  const InclusionReport r = l_leq(unit(2, 1, 1), diag({1, 0.5}));
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness);
  CHECK(dist(*r.witness, unit(2, 2, 2)) < 1e-12);
  CHECK(strong_bj(*r.witness, unit(2, 1, 1)).value);
  CHECK_FALSE(strong_bj(*r.witness, diag({1, 0.5})).value);
  CHECK(l_leq(diag({1, 0}), diag({1, 0})).holds);
}

TEST_CASE("inclusion witnesses on random pairs") {
  Rng rng(24);
  int r_fail = 0, l_fail = 0;
  for (int t = 0; t < 200; ++t) {
    const BlockStructure st = random_structure(rng, 3, 4);
    const Element a = random_mixed_element(st, rng), b = random_mixed_element(st, rng);
    if (a.is_zero() || b.is_zero()) continue;
    const InclusionReport r = r_leq(a, b);
    if (!r.holds && r.witness) {
      ++r_fail;
      CHECK(strong_bj(a, *r.witness).value);
      CHECK_FALSE(strong_bj(b, *r.witness).value);
    }
    const InclusionReport l = l_leq(a, b);
    if (!l.holds && l.witness) {
      ++l_fail;
      CHECK(strong_bj(*l.witness, a).value);
      CHECK_FALSE(strong_bj(*l.witness, b).value);
    }
  }
  CHECK(r_fail > 20);
  CHECK(l_fail > 20);
}

TEST_CASE("scaled projections") {
  CHECK(is_scaled_projection(Complex(5.0) * Element::identity(dims({2}))));
  CHECK_FALSE(is_scaled_projection(diag({2, 1})));
  Rng rng(25);
  const BlockStructure st = dims({2, 3});
  CHECK(is_scaled_projection(outer(st, random_block_vector(st, 1, rng), random_block_vector(st, 1, rng))));
}

TEST_CASE("rank via chain") {
  const RankChain c = rank_via_chain(diag({3, 2, 1}));
  CHECK(c.rank == 3);
  REQUIRE(c.chain.size() == 3);
  CHECK(dist(c.chain[1], diag({1, 1, 0})) < 1e-12);
  CHECK(dist(c.chain[2], diag({1, 0, 0})) < 1e-12);
  CHECK(rank_via_chain(unit(3, 1, 2, 4.0)).rank == 1);
  CHECK(rank_via_chain(unit(3, 1, 2, 4.0)).chain.size() == 1);
  CHECK(rank_via_chain(diag({3, 0})).rank == 1);

  Rng rng(26);
  for (int t = 0; t < 100; ++t) {
    const BlockStructure st = random_structure(rng, 3, 4);
    const int r = uniform_int(rng, 1, st.ambient_dim());
    const Element a = random_rank_element(st, r, rng);
    CHECK(rank_via_chain(a).rank == r);
  }
}

TEST_CASE("block support and shared blocks") {
  const BlockStructure st = dims({2, 2});
  Matrix a = Matrix::Identity(2, 2), z = Matrix::Zero(2, 2);
  const Element left(st, {a, z}), right(st, {z, a});
  CHECK(block_support(left) == std::vector<int>{0});
  const SharedBlock none = shares_block(left, right);
  CHECK_FALSE(none.shares);
  CHECK_FALSE(none.witness);

  Matrix d1 = Matrix::Zero(2, 2), d2 = Matrix::Zero(2, 2);
  d1(0, 0) = 1.0;
  d2(1, 1) = 1.0;
  const Element A(st, {d1, z}), B(st, {d2, z});
  const SharedBlock s = shares_block(A, B);
  CHECK(s.shares);
  REQUIRE(s.witness);
  CHECK_FALSE(strong_bj(*s.witness, A).value);
  CHECK_FALSE(strong_bj(*s.witness, B).value);
  Matrix eta = Matrix::Constant(2, 2, 0.5);
  CHECK(dist(*s.witness, Element(st, {eta, z})) < 1e-12);

  const SharedBlock self = shares_block(A, A);
  CHECK(self.shares);
  REQUIRE(self.witness);
  CHECK_FALSE(strong_bj(*self.witness, A).value);
}

TEST_CASE("shared block witnesses on random pairs") {
  Rng rng(27);
  for (int t = 0; t < 200; ++t) {
    const BlockStructure st = random_structure(rng, 4, 3);
    const Element a = random_rank_one(st, rng), b = random_rank_one(st, rng);
    const SharedBlock s = shares_block(a, b);
    const bool overlap = block_support(a) == block_support(b);
    CHECK(s.shares == overlap);
    if (!s.witness) continue;
    CHECK_FALSE(strong_bj(*s.witness, a).value);
    CHECK_FALSE(strong_bj(*s.witness, b).value);
  }
}

TEST_CASE("R-chains") {
  const RChain c = r_chain(Element::identity(dims({3})), 3);
  REQUIRE(c.links.size() == 3);
  CHECK(dist(c.links[2], Element::identity(dims({3}))) < 1e-12);
  for (std::size_t k = 0; k + 1 < c.links.size(); ++k) {
    CHECK(r_leq(c.links[k], c.links[k + 1]).holds);
    CHECK_FALSE(r_leq(c.links[k + 1], c.links[k]).holds);
  }
  CHECK(r_chain(diag({1, 1, 0.5}), 2).links.size() == 2);
  CHECK(kind_of([] { r_chain(diag({1, 1, 0.5}), 3); }) == ErrorKind::EigenspaceTooSmall);
  CHECK(r_chain(diag({2, 1}), 1).links.size() == 1);
  CHECK(kind_of([] { r_chain(diag({1, -1}), 1); }) == ErrorKind::InvalidSpec);
}

}  // TEST_SUITE
