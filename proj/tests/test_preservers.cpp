#include "helpers.hpp"
#include "sbjo/orthogonality.hpp"
#include "sbjo/preservers.hpp"
#include "sbjo/sampling.hpp"
#include "sbjo/structure.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

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

PreserverSpec identity_spec(const BlockStructure& st) {
  return make_sandwich(Element::identity(st), Element::identity(st), 1.0);
}

}  // namespace

TEST_SUITE("preservers") {

TEST_CASE("apply fixtures") {
  Rng rng(30);
  const BlockStructure st = dims({2, 3});
  const Element a = random_element(st, rng);
  CHECK(dist(apply(identity_spec(st), a), a) == 0.0);
  CHECK(dist(apply(PreserverSpec{Conjugation{}}, unit(2, 1, 2, Complex(0, 1))), unit(2, 1, 2, Complex(0, -1))) == 0.0);

  const BlockStructure two = dims({2, 2});
  const Matrix p = complex_gaussian(rng, 2, 2), q = complex_gaussian(rng, 2, 2);
  const Element swapped = apply(PreserverSpec{BlockPermutation{{1, 0}}}, Element(two, {p, q}));
  CHECK((swapped.block(0) - q).norm() == 0.0);
  CHECK((swapped.block(1) - p).norm() == 0.0);
}

TEST_CASE("specs are checked against the structure") {
  CHECK(kind_of([] { check_spec(PreserverSpec{BlockPermutation{{1, 0}}}, dims({1, 2})); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { check_spec(PreserverSpec{BlockPermutation{{0, 0}}}, dims({2, 2})); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] {
          check_spec(make_sandwich(Element::identity(dims({2})), diag({1, 0}), 1.0), dims({2}));
        }) == ErrorKind::InvalidSpec);
  CHECK_NOTHROW(check_spec(PreserverSpec{BlockPermutation{{2, 1, 0}}}, dims({2, 3, 2})));
}

TEST_CASE("inverses round-trip") {
  Rng rng(31);
  const BlockStructure st = dims({2, 1, 2});
  std::vector<PreserverSpec> specs = {random_sandwich(st, rng), random_block_permutation(st, rng),
                                      PreserverSpec{Conjugation{}}};
  specs.push_back(PreserverSpec{Composite{{specs[0], specs[1], specs[2]}}});
  for (const PreserverSpec& s : specs) {
    const auto inv = inverse(s);
    REQUIRE(inv);
    for (int t = 0; t < 10; ++t) {
      const Element a = random_mixed_element(st, rng);
      CHECK(dist(apply(*inv, apply(s, a)), a) < 1e-10 * std::max(1.0, a.norm()));
    }
  }
  CHECK_FALSE(inverse(PreserverSpec{Wild{3, {}}}));
}

TEST_CASE("wild map by hand") {
  const Element a = diag({3, 1});
  const Element id = Element::identity(dims({2}));
  const Element out = wild_with(a, {0.5}, id, id, 1.0);
  CHECK(dist(out, diag({3, 0.5})) < 1e-12);
}

TEST_CASE("wild keeps m_left and ker_left") {
  Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    const BlockStructure st = random_structure(rng, 3, 4);
    const Element a = random_mixed_element(st, rng);
    const Element w = wild(a, 99);
    const SpectralData da = decompose(a), dw = decompose(w);
    CHECK(frame_equal(da.m_left, dw.m_left));
    CHECK(frame_equal(da.ker_left, dw.ker_left));
    CHECK(dist(wild(a, 99), w) == 0.0);
  }
  CHECK(wild(Element::zero(dims({2})), 5).is_zero());

  const BlockStructure st = dims({3});
  const Element r1 = outer(st, random_block_vector(st, 0, rng), random_block_vector(st, 0, rng));
  const Element w1 = wild(r1, 4);
  CHECK(decompose(w1).rank == 1);
  CHECK(frame_equal(decompose(r1).m_left, decompose(w1).m_left));
}

TEST_CASE("wild is not linear") {
  Rng rng(33);
  const BlockStructure st = dims({3});
  const Element a = random_element(st, rng), b = random_element(st, rng);
  CHECK(dist(wild(a + b, 1), wild(a, 1) + wild(b, 1)) > 1e-3);
}

TEST_CASE("verify passes known preservers") {
  Rng rng(34);
  const BlockStructure st = dims({2, 3});
  const Element u = haar_unitary(st, rng), v = haar_unitary(st, rng);
  const VerifyReport r = verify(make_sandwich(u, v, Complex(2, 1)), st, 1, 2000);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.forward_failures.empty());
  CHECK(r.backward_failures.empty());
  CHECK(r.coverage.orthogonal > 100);
  CHECK(r.coverage.non_orthogonal > 100);
  CHECK(verify(identity_spec(st), st, 2, 500).verdict == Verdict::Pass);
  CHECK(verify(PreserverSpec{Wild{7, {}}}, st, 3, 500).verdict == Verdict::Pass);
  CHECK(verify(PreserverSpec{Conjugation{}}, st, 4, 500).verdict == Verdict::Pass);
}

TEST_CASE("verify passes dimension-2 line maps") {
  Rng rng(35);
  const PreserverSpec d = random_dim2_induced(4, rng);
  CHECK(verify(d, dims({2}), 5, 500).verdict == Verdict::Pass);
  CHECK(verify(d, dims({2, 2}), 6, 500).verdict == Verdict::Pass);
}

TEST_CASE("transpose is refuted with the hand counterexample") {
  const BlockStructure st = dims({2});
  CandidateMap t{"transpose", [](const Element& a) { return a.transpose(); }, {}, true, std::nullopt,
                 {unit(2, 1, 2), unit(2, 2, 2)}};
  const VerifyReport r = verify(t, st, 0, 200);
  CHECK(r.verdict == Verdict::Fail);
  const bool found = std::any_of(r.forward_failures.begin(), r.forward_failures.end(), [](const Counterexample& c) {
    return dist(c.x, unit(2, 1, 2)) < 1e-12 && dist(c.y, unit(2, 2, 2)) < 1e-12;
  });
  CHECK(found);
  CHECK(strong_bj(unit(2, 1, 2), unit(2, 2, 2)).value);
  CHECK_FALSE(strong_bj(unit(2, 2, 1), unit(2, 2, 2)).value);
}

TEST_CASE("table specs") {
  const BlockStructure st = dims({2});
  Table t;
  for (const Element& e : {unit(2, 1, 1), unit(2, 2, 2), unit(2, 1, 2), Element::identity(st)})
    t.pairs.emplace_back(e, Complex(2.0) * e);
  CHECK(verify(PreserverSpec{t}, st, 0, 100).verdict == Verdict::Pass);
  CHECK(kind_of([&] { apply(PreserverSpec{t}, unit(2, 2, 1)); }) == ErrorKind::DomainMiss);
}

TEST_CASE("property P") {
  const BlockStructure st = dims({1, 2, 2});
  CHECK(property_p_check([](const Element& a) { return a; }, st, 1, 100).pass());
  CHECK(property_p_check([](const Element& a) { return Complex(2.0) * a; }, st, 2, 100).pass());
  const PropertyPReport adj = property_p_check([](const Element& a) { return a.adjoint(); }, dims({2}), 3, 100);
  CHECK_FALSE(adj.pass());
}

TEST_CASE("block permutation extraction") {
  const BlockStructure st = dims({1, 2, 2});
  CHECK(extract_block_permutation([](const Element& a) { return a; }, st, 1) == std::vector<int>{0, 1, 2});
  const PreserverSpec swap{BlockPermutation{{0, 2, 1}}};
  CHECK(extract_block_permutation([&](const Element& a) { return apply(swap, a); }, st, 2) ==
        std::vector<int>{0, 2, 1});
  CHECK(extract_block_permutation([&](const Element& a) { return wild(apply(swap, a), 8); }, st, 3) ==
        std::vector<int>{0, 2, 1});
  // a map that smears every block into block 0 has no singleton supports
  auto smear = [&](const Element& a) {
    std::vector<Matrix> b = a.blocks();
    b[1] = b[2] = Matrix::Identity(2, 2) * a.norm();
    return Element(st, b);
  };
  CHECK(kind_of([&] { extract_block_permutation(smear, st, 4); }) == ErrorKind::NotSingletonSupport);
}

TEST_CASE("coordinates") {
  Rng rng(36);
  const BlockStructure st = dims({1, 2, 3});
  const Element a = random_element(st, rng);
  const Vector c = to_coordinates(a);
  CHECK(c.size() == 14);
  CHECK(c(1) == a.block(1)(0, 0));
  CHECK(c(2) == a.block(1)(0, 1));
  CHECK(dist(from_coordinates(st, c), a) == 0.0);
  const Matrix m = linearize([](const Element& x) { return Complex(3.0) * x; }, st);
  CHECK((m - 3.0 * Matrix::Identity(14, 14)).norm() < 1e-14);
  CHECK(dist(linear_map(m, st)(a), Complex(3.0) * a) < 1e-12);
}

TEST_CASE("sandwich recovery") {
  Rng rng(37);
  const BlockStructure st = dims({2, 2});
  const Element u = haar_unitary(st, rng), v = haar_unitary(st, rng);
  const PreserverSpec s = make_sandwich(u, v, Complex(0, 3));
  const Matrix m = linearize([&](const Element& x) { return apply(s, x); }, st);
  const SandwichRecovery r = recover_sandwich(m, st, 5);
  CHECK(std::abs(r.alpha) == doctest::Approx(3.0));
  CHECK(r.residual < 1e-8);
  for (int t = 0; t < 10; ++t) {
    const Element x = random_element(st, rng);
    CHECK(dist(apply_recovered(r, x), apply(s, x)) < 1e-8 * std::max(1.0, x.norm()));
  }

  const SandwichRecovery id = recover_sandwich(Matrix::Identity(8, 8), st, 6);
  CHECK(std::abs(id.alpha - 1.0) < 1e-12);
  CHECK(id.perm == std::vector<int>{0, 1});
  CHECK(id.residual <= 1e-12);

  const Matrix tr = linearize([](const Element& x) { return x.transpose(); }, dims({2}));
  const ErrorKind k = kind_of([&] { recover_sandwich(tr, dims({2}), 7); });
  CHECK((k == ErrorKind::KappaNotConstant || k == ErrorKind::RecoveryInconsistent));
}

TEST_CASE("recovery through a block permutation") {
  Rng rng(38);
  const BlockStructure st = dims({1, 2, 2, 3});
  const PreserverSpec s{Composite{{PreserverSpec{BlockPermutation{{0, 2, 1, 3}}}, random_sandwich(st, rng)}}};
  const Matrix m = linearize([&](const Element& x) { return apply(s, x); }, st);
  const SandwichRecovery r = recover_sandwich(m, st, 9);
  CHECK(r.residual < 1e-8);
  const Element x = random_element(st, rng);
  CHECK(dist(apply_recovered(r, x), apply(s, x)) < 1e-8 * std::max(1.0, x.norm()));
}

}  // TEST_SUITE
