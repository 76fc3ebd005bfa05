#include "helpers.hpp"
#include "sbjo/io.hpp"
#include "sbjo/sampling.hpp"

#include <doctest.h>

#include <filesystem>

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

TEST_SUITE("io") {

TEST_CASE("element round trip") {
  Rng rng(50);
  const BlockStructure st = dims({1, 3, 2});
  const Element a = random_element(st, rng);
  CHECK(dist(element_from_json(element_to_json(a)), a) == 0.0);
  const json j = element_to_json(unit(2, 1, 2, Complex(0.5, -1)));
  CHECK(j["dims"] == json::array({2}));
  CHECK(j["blocks"][0][0][1] == json::array({0.5, -1.0}));
  CHECK(j["blocks"][0][1][0] == json::array({0.0, 0.0}));

  const auto path = std::filesystem::temp_directory_path() / "sbjo_io_test.json";
  write_element(path.string(), a);
  CHECK(dist(read_element(path.string()), a) == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("malformed elements") {
  CHECK(kind_of([] { element_from_json(json::parse(R"({"dims":[2]})")); }) == ErrorKind::Parse);
  CHECK(kind_of([] { element_from_json(json::parse(R"({"dims":[0],"blocks":[]})")); }) == ErrorKind::Parse);
  CHECK(kind_of([] { element_from_json(json::parse(R"({"dims":[1],"blocks":[[[[1,0]]],[[[1,0]]]]})")); }) ==
        ErrorKind::ShapeMismatch);
  CHECK(kind_of([] { element_from_json(json::parse(R"({"dims":[1],"blocks":[[[[1]]]]})")); }) == ErrorKind::Parse);
  CHECK(kind_of([] { read_element("/nonexistent/x.json"); }) == ErrorKind::Parse);
}

TEST_CASE("spec round trip") {
  Rng rng(51);
  const BlockStructure st = dims({2, 2});
  const std::vector<PreserverSpec> specs = {
      random_sandwich(st, rng), PreserverSpec{BlockPermutation{{1, 0}}}, PreserverSpec{Conjugation{}},
      PreserverSpec{Wild{12, {0.1, 0.2}}}, random_dim2_induced(2, rng)};
  const Element x = random_mixed_element(st, rng);
  for (const PreserverSpec& s : specs) {
    const PreserverSpec back = spec_from_json(spec_to_json(s));
    CHECK(std::string(spec_name(back)) == spec_name(s));
    CHECK(dist(apply(back, x), apply(s, x)) < 1e-12);
  }
  const PreserverSpec comp{Composite{specs}};
  CHECK(dist(apply(spec_from_json(spec_to_json(comp)), x), apply(comp, x)) < 1e-12);
  CHECK(kind_of([] { spec_from_json(json::parse(R"({"type":"teleport"})")); }) == ErrorKind::Parse);
}

TEST_CASE("dim2 lines are closed on read") {
  const json j = json::parse(R"({"type":"dim2_induced","lines":[{"from":[[1,0],[0,0]],"to":[[0,0],[1,0]]}]})");
  const PreserverSpec s = spec_from_json(j);
  const auto& d = std::get<Dim2Induced>(s.kind);
  CHECK(d.lines.size() == 2);
  CHECK_NOTHROW(check_spec(s, dims({2})));
}

TEST_CASE("linear map round trip") {
  const BlockStructure st = dims({1, 2});
  const Matrix m = Matrix::Identity(5, 5) * Complex(0, 2);
  const auto [st2, m2] = linear_map_from_json(linear_map_to_json(st, m));
  CHECK(st2 == st);
  CHECK((m2 - m).norm() == 0.0);
  CHECK(kind_of([] { linear_map_from_json(json::parse(R"({"dims":[2],"matrix":[[[1,0]]]})")); }) ==
        ErrorKind::ShapeMismatch);
}

}  // TEST_SUITE
