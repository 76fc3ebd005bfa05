#include "helpers.hpp"
#include "sbjo/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace sbjo;
using namespace sbjo::test;

TEST_SUITE("algebra") {

TEST_CASE("structure parsing") {
  const BlockStructure st = BlockStructure::parse("1,2,2");
  CHECK(st.num_blocks() == 3);
  CHECK(st.ambient_dim() == 5);
  CHECK(st.algebra_dim() == 9);
  CHECK(st.offset(2) == 3);
  CHECK(st.block_of(4) == 2);
  CHECK(st.to_string() == "1,2,2");
  CHECK_THROWS_AS(BlockStructure::parse("2,,3"), Error);
  CHECK_THROWS_AS(BlockStructure::parse("0"), Error);
  CHECK_THROWS_AS(BlockStructure::parse(""), Error);
}

TEST_CASE("validate") {
  const Element id = validate(dims({2}), {Matrix::Identity(2, 2)});
  CHECK(dist(id, Element::identity(dims({2}))) == 0.0);

  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  CHECK(kind_of([] { validate(dims({1, 2}), {Matrix::Identity(1, 1), Matrix::Identity(2, 2), Matrix::Identity(2, 2)}); }) ==
        ErrorKind::ShapeMismatch);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK(kind_of([&] { validate(dims({2}), {bad}); }) == ErrorKind::NonFiniteEntry);
  CHECK(kind_of([] { validate(dims({2}), {Matrix::Identity(3, 3)}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("negative zero is normalized") {
  Matrix m = Matrix::Zero(1, 1);
  m(0, 0) = Complex(-0.0, -0.0);
  const Element e = validate(dims({1}), {m});
  CHECK_FALSE(std::signbit(e.block(0)(0, 0).real()));
  CHECK_FALSE(std::signbit(e.block(0)(0, 0).imag()));
}

TEST_CASE("from_dense rejects off-block entries") {
  Matrix d = Matrix::Identity(3, 3);
  CHECK(Element::from_dense(dims({1, 2}), d).norm() == doctest::Approx(1.0));
  d(0, 2) = 1.0;
  CHECK_THROWS_AS(Element::from_dense(dims({1, 2}), d), Error);
}

TEST_CASE("decompose diag(3,1)") {
  const SpectralData d = decompose(diag({3, 1}));
  CHECK(d.norm == doctest::Approx(3.0));
  CHECK(d.rank == 2);
  CHECK(d.top_mult == 1);
  CHECK(d.ker_left.empty());
  CHECK(d.support == std::vector<int>{0});
  const Frame e1 = Frame::from_columns(dims({2}), basis(2, 1));
  CHECK(frame_equal(d.m_left, e1));
}

TEST_CASE("decompose unitary and zero") {
  Rng rng(7);
  const SpectralData u = decompose(haar_unitary(dims({2}), rng));
  CHECK(u.top_mult == 2);
  CHECK(u.rank == 2);
  CHECK(u.m_left.dim() == 2);

  const SpectralData z = decompose(Element::zero(dims({2, 1})));
  CHECK(z.m_left.dim() == 3);
  CHECK(z.ker_left.dim() == 3);
  CHECK(z.rank == 0);
}

TEST_CASE("top cluster is relative") {
  // 1 and 1 - 1e-12 merge, 1 and 0.99 do not; scale does not matter
  for (double scale : {1e-6, 1.0, 1e6}) {
    CHECK(decompose(Complex(scale) * diag({1.0, 1.0 - 1e-12})).top_mult == 2);
    CHECK(decompose(Complex(scale) * diag({1.0, 0.99})).top_mult == 1);
  }
}

TEST_CASE("frame inclusion") {
  const BlockStructure st = dims({2});
  const Frame e1 = Frame::from_columns(st, basis(2, 1)), e2 = Frame::from_columns(st, basis(2, 2));
  const Frame both = Frame::full(st);
  Vector diagv(2);
  diagv << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Frame d = Frame::from_columns(st, diagv);
  CHECK(frame_leq(e1, both));
  CHECK_FALSE(frame_leq(e1, e2));
  CHECK_FALSE(frame_leq(d, e1));
  CHECK(frame_residual(d, e1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(frame_leq(Frame::empty_frame(st), e1));
}

TEST_CASE("frame meet") {
  const BlockStructure st = dims({3});
  Matrix f(3, 2), g(3, 2);
  f << 1, 0, 0, 1, 0, 0;
  g << 0, 0, 1, 0, 0, 1;
  const auto m = frame_meet(Frame::from_columns(st, f), Frame::from_columns(st, g));
  REQUIRE(m);
  CHECK(std::abs((*m)(1)) == doctest::Approx(1.0));
  CHECK_FALSE(frame_meet(Frame::from_columns(st, basis(3, 1)), Frame::from_columns(st, basis(3, 2))));
  const Frame ff = Frame::from_columns(st, f);
  const auto self = frame_meet(ff, ff);
  REQUIRE(self);
  CHECK(frame_residual(Frame::from_columns(st, *self), ff) < 1e-12);
}

TEST_CASE("haar unitary") {
  const Element s = haar_unitary(dims({1}), 11);
  CHECK(std::abs(s.block(0)(0, 0)) == doctest::Approx(1.0));
  const BlockStructure st = dims({3, 1, 2});
  const Element u = haar_unitary(st, 5), w = haar_unitary(st, 5);
  CHECK(dist(u, w) == 0.0);
  CHECK((u.dense() * u.dense().adjoint() - Matrix::Identity(6, 6)).norm() < 1e-12);
  CHECK(dist(u, haar_unitary(st, 6)) > 0.1);
}

TEST_CASE("random_element ranks") {
  CHECK(decompose(random_element(dims({2, 3}), 1, 1)).rank == 1);
  CHECK(decompose(random_element(dims({2, 2}), 2, 4)).rank == 4);
  CHECK(decompose(random_element(dims({3}), 3)).rank == 3);
  CHECK_THROWS_AS(random_element(dims({2}), 1, 3), Error);
}

TEST_CASE("norm matches a dense SVD") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const BlockStructure st = random_structure(rng, 4, 6);
    const Element a = random_mixed_element(st, rng);
    CHECK(a.norm() == doctest::Approx(dense_norm(a)).epsilon(1e-12));
  }
}

TEST_CASE("abs and pseudo-inverse against their defining identities") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const BlockStructure st = random_structure(rng, 3, 5);
    const Element x = random_mixed_element(st, rng);
    const Element aa = abs_adjoint(x), a = abs(x);
    const double s = std::max(1.0, x.norm() * x.norm());
    CHECK(dist(aa * aa, x * x.adjoint()) < 1e-10 * s);
    CHECK(dist(a * a, x.adjoint() * x) < 1e-10 * s);
    CHECK(dist(aa, aa.adjoint()) < 1e-12 * s);
    const Element p = pseudo_inverse(x);
    // Penrose conditions
    CHECK(dist(x * p * x, x) < 1e-8 * std::max(1.0, x.norm()));
    CHECK(dist(p * x * p, p) < 1e-8 * std::max(1.0, p.norm()));
    CHECK(dist((x * p).adjoint(), x * p) < 1e-8);
    CHECK(dist((p * x).adjoint(), p * x) < 1e-8);
  }
}

TEST_CASE("algebra operations") {
  Rng rng(9);
  const BlockStructure st = dims({1, 2, 3});
  const Element a = random_element(st, rng), b = random_element(st, rng);
  CHECK(dist(a * b, Element::from_dense(st, a.dense() * b.dense(), 1e-12)) < 1e-12);
  CHECK(dist(a.adjoint().adjoint(), a) == 0.0);
  CHECK(dist(a.transpose(), Element::from_dense(st, a.dense().transpose())) == 0.0);
  CHECK(dist(a.conjugate(), Element::from_dense(st, a.dense().conjugate())) == 0.0);
  const Vector v = complex_gaussian_vector(rng, st.ambient_dim());
  CHECK((a.apply(v) - a.dense() * v).norm() < 1e-12);
  CHECK((a.apply_adjoint(v) - a.dense().adjoint() * v).norm() < 1e-12);
  CHECK_THROWS_AS(a + Element::identity(dims({2, 2, 2})), Error);
}

TEST_CASE("rank-one helpers") {
  const BlockStructure st = dims({2, 2});
  const Vector xi = embed(st, 1, basis(2, 1));
  const Element e = rank_one_projection(st, xi);
  CHECK(dist(e * e, e) < 1e-14);
  CHECK(decompose(e).rank == 1);
  CHECK(block_tag(st, xi) == 1);
  Vector mixed = Vector::Ones(4) / 2.0;
  CHECK(block_tag(st, mixed) == kMixedBlock);
  CHECK_THROWS_AS(outer(st, mixed, mixed), Error);
}

TEST_CASE("tolerance validation") {
  ToleranceConfig t;
  CHECK_NOTHROW(t.validate());
  t.eps_norm = 0.5;
  CHECK_THROWS_AS(t.validate(), Error);
  t.eps_norm = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
}

}  // TEST_SUITE
