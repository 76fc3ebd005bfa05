#include "helpers.hpp"
#include "sbjo/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace sbjo;
using namespace sbjo::test;

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "sbjo_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args) {
  const std::string cmd = std::string(SBJO_CLI) + " " + args + " >" + file("stdout.txt") + " 2>" + file("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check exit codes") {
  write_element(file("x.json"), diag({2, 1}));
  write_element(file("y0.json"), diag({0, 1}));
  write_element(file("y1.json"), diag({1, 0}));
  CHECK(run("check --x " + file("x.json") + " --y " + file("y0.json")) == 0);
  CHECK(slurp(file("stdout.txt")).find("witness") != std::string::npos);
  CHECK(run("check --x " + file("x.json") + " --y " + file("y1.json") + " --z-out " + file("z.json")) == 1);
  CHECK(dist(read_element(file("z.json")), diag({-2, 0})) < 1e-12);
  CHECK(run("--json check --x " + file("x.json") + " --y " + file("y1.json")) == 1);
  CHECK(json::parse(slurp(file("stdout.txt")))["orthogonal"] == false);

  std::ofstream(file("bad.json")) << "{\"dims\":[2],\"blocks\":";
  CHECK(run("check --x " + file("bad.json") + " --y " + file("y0.json")) == 64);
  write_element(file("other.json"), diag({1, 1, 1}));
  CHECK(run("check --x " + file("x.json") + " --y " + file("other.json")) == 64);
}

TEST_CASE("fragile margins exit 3") {
  // the minimal principal sine is 2e-8, inside the fragile band around 1e-8
  const double s = 2e-8, c = std::sqrt(1 - s * s);
  Matrix y = Matrix::Zero(2, 2);
  y(0, 0) = s * s;
  y(0, 1) = -s * c;
  y(1, 0) = -s * c;
  y(1, 1) = c * c;
  write_element(file("fx.json"), diag({2, 1}));
  write_element(file("fy.json"), single(y));
  CHECK(run("check --x " + file("fx.json") + " --y " + file("fy.json")) == 3);
}

TEST_CASE("usage errors") {
  CHECK(run("") == 64);
  CHECK(run("frobnicate") == 64);
  CHECK(run("check --x") == 64);
  CHECK(run("--help") == 0);
  CHECK(run("--tol-norm 0.5 classify --x " + file("x.json")) == 64);
}

TEST_CASE("rand is deterministic and typed") {
  CHECK(run("rand --structure 1,2 --kind unitary --seed 4 --out " + file("u.json")) == 0);
  const Element u = read_element(file("u.json"));
  CHECK((u.dense() * u.dense().adjoint() - Matrix::Identity(3, 3)).norm() < 1e-12);
  CHECK(run("rand --structure 1,2 --kind unitary --seed 4 --out " + file("u2.json")) == 0);
  CHECK(slurp(file("u.json")) == slurp(file("u2.json")));
  CHECK(run("rand --structure 3 --kind rank1 --out " + file("r.json")) == 0);
  CHECK(decompose(read_element(file("r.json"))).rank == 1);
  CHECK(run("rand --structure 3,x --kind rank1") == 64);
  CHECK(run("rand --structure 3 --kind hexagonal") == 64);
}

TEST_CASE("classify and graph") {
  CHECK(run("--json classify --x " + file("x.json")) == 0);
  const json c = json::parse(slurp(file("stdout.txt")));
  CHECK(c["rank"] == 2);
  CHECK(c["right_symmetric"] == true);
  CHECK(run("graph --structure 2,2 --sample 8 --mode mutual --seed 3 --out " + file("g.dot") + " --json " +
            file("g.json")) == 0);
  CHECK(slurp(file("g.dot")).rfind("graph ortho {", 0) == 0);
  CHECK(json::parse(slurp(file("g.json")))["mode"] == "mutual");
  CHECK(run("graph --structure 2 --mode sideways") == 64);
}

TEST_CASE("preserver subcommands") {
  std::ofstream(file("conj.json")) << R"({"type":"conjugation"})";
  CHECK(run("preserver verify --spec " + file("conj.json") + " --structure 2,1 --budget 200") == 0);

  // transpose is linear but not a sandwich
  json m = {{"dims", {2}}, {"matrix", json::array()}};
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int col = 0; col < 4; ++col) {
      const int target = (col % 2) * 2 + col / 2;
      row.push_back(json::array({r == target ? 1.0 : 0.0, 0.0}));
    }
    m["matrix"].push_back(row);
  }
  std::ofstream(file("transpose.json")) << m.dump();
  CHECK(run("preserver recover --map " + file("transpose.json")) == 1);

  json id = m;
  for (int r = 0; r < 4; ++r)
    for (int col = 0; col < 4; ++col) id["matrix"][r][col] = json::array({r == col ? 1.0 : 0.0, 0.0});
  std::ofstream(file("identity.json")) << id.dump();
  CHECK(run("preserver recover --map " + file("identity.json")) == 0);

  CHECK(run("preserver wild --x " + file("x.json") + " --out " + file("w.json")) == 0);
  const Element w = read_element(file("w.json"));
  CHECK(frame_equal(decompose(w).m_left, decompose(diag({2, 1})).m_left));
  CHECK(run("preserver wild --x " + file("x.json") + " --delta 2") == 64);
}

TEST_CASE("suite filtering and absurd tolerances") {
  CHECK(run("suite --criteria rank,chain --summary " + file("s.json")) == 0);
  const json s = json::parse(slurp(file("s.json")));
  CHECK(s["criteria"].size() == 2);
  CHECK(s["all_pass"] == true);
  CHECK(run("--tol-norm 0.5 suite --criteria rank") == 1);
  CHECK(run("suite --criteria nonsense") == 64);
}

}  // TEST_SUITE
