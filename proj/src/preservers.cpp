#include "sbjo/preservers.hpp"

#include "sbjo/sampling.hpp"
#include "sbjo/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace sbjo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over the raw entries; the wild map is a function of A, so its random
// choices are keyed by A's bytes.
std::uint64_t element_hash(const Element& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Matrix& b : a.blocks()) {
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index i = 0; i < b.rows(); ++i) {
        const double parts[2] = {b(i, j).real(), b(i, j).imag()};
        unsigned char bytes[sizeof parts];
        std::memcpy(bytes, parts, sizeof parts);
        for (unsigned char c : bytes) {
          h ^= c;
          h *= 0x100000001b3ULL;
        }
      }
  }
  return h;
}

double unitarity_residual(const Element& u) {
  return (u.adjoint() * u - Element::identity(u.structure())).norm();
}

Vector perp(const Vector& v) {
  Vector w(2);
  w << -std::conj(v(1)), std::conj(v(0));
  return w;
}

// Index of the table line containing xi, or -1.
int find_line(const Dim2Induced& d, const Vector& xi) {
  for (std::size_t i = 0; i < d.lines.size(); ++i)
    if (std::abs(d.lines[i].first.dot(xi)) >= 1.0 - 1e-9) return static_cast<int>(i);
  return -1;
}

Element apply_dim2(const Dim2Induced& d, const Element& a) {
  const BlockStructure& st = a.structure();
  const double cutoff = 1e-10 * a.norm();
  std::vector<Matrix> out;
  for (int k = 0; k < st.num_blocks(); ++k) {
    if (st.dim(k) != 2) {
      out.push_back(a.block(k));
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(a.block(k), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix b = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      const double s = svd.singularValues()(i);
      if (s <= cutoff) continue;
      Vector xi = svd.matrixU().col(i);
      const int line = find_line(d, xi);
      if (line >= 0) {
        // homogeneous lift: c xi0 -> c eta0
        const Complex c = d.lines[line].first.dot(xi);
        xi = c * d.lines[line].second;
      }
      b += s * xi * svd.matrixV().col(i).adjoint();
    }
    out.push_back(std::move(b));
  }
  return Element(st, std::move(out));
}

Element apply_permutation(const BlockPermutation& p, const Element& a) {
  std::vector<Matrix> out(a.blocks().size());
  for (std::size_t k = 0; k < p.perm.size(); ++k) out[p.perm[k]] = a.block(static_cast<int>(k));
  return Element(a.structure(), std::move(out));
}

bool same_element(const Element& a, const Element& b) {
  return a.structure() == b.structure() && (a - b).norm() <= 1e-12 * std::max(1.0, a.norm());
}

}  // namespace

const char* spec_name(const PreserverSpec& spec) {
  return std::visit(overloaded{[](const Sandwich&) { return "sandwich"; },
                               [](const BlockPermutation&) { return "block_permutation"; },
                               [](const Conjugation&) { return "conjugation"; },
                               [](const Wild&) { return "wild"; },
                               [](const Dim2Induced&) { return "dim2_induced"; },
                               [](const Table&) { return "table"; },
                               [](const Composite&) { return "composite"; }},
                    spec.kind);
}

void check_spec(const PreserverSpec& spec, const BlockStructure& st) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidSpec, msg); };
  std::visit(overloaded{[&](const Sandwich& s) {
                          if (!(s.u.structure() == st) || !(s.v.structure() == st))
                            fail("sandwich unitaries live in another structure");
                          if (unitarity_residual(s.u) > 1e-10 || unitarity_residual(s.v) > 1e-10)
                            fail("sandwich factors are not unitary");
                          if (std::abs(s.alpha) == 0.0) fail("sandwich scalar must be nonzero");
                        },
                        [&](const BlockPermutation& p) {
                          if (static_cast<int>(p.perm.size()) != st.num_blocks()) fail("permutation has wrong length");
                          std::vector<bool> hit(p.perm.size(), false);
                          for (std::size_t k = 0; k < p.perm.size(); ++k) {
                            const int to = p.perm[k];
                            if (to < 0 || to >= st.num_blocks() || hit[to]) fail("not a permutation");
                            hit[to] = true;
                            if (st.dim(to) != st.dim(static_cast<int>(k))) fail("permutation mixes block sizes");
                          }
                        },
                        [](const Conjugation&) {},
                        [&](const Wild& w) {
                          if (!(w.policy.delta > 0.0 && w.policy.delta < 1.0) || !(w.policy.floor > 0.0) ||
                              w.policy.floor >= 1.0 - w.policy.delta)
                            fail("wild tau policy out of range");
                        },
                        [&](const Dim2Induced& d) {
                          for (const auto& [from, to] : d.lines) {
                            if (from.size() != 2 || to.size() != 2) fail("line table needs 2-vectors");
                            if (std::abs(from.norm() - 1.0) > 1e-10 || std::abs(to.norm() - 1.0) > 1e-10)
                              fail("line table needs unit vectors");
                            const int c = find_line(d, perp(from));
                            if (c < 0 || std::abs(d.lines[c].second.dot(to)) > 1e-9)
                              fail("line table is not closed under orthocomplement");
                          }
                        },
                        [&](const Table& t) {
                          for (const auto& [in, out] : t.pairs)
                            if (!(in.structure() == st) || !(out.structure() == st)) fail("table entry in another structure");
                        },
                        [&](const Composite& c) {
                          for (const auto& part : c.parts) check_spec(part, st);
                        }},
             spec.kind);
}

Element apply(const PreserverSpec& spec, const Element& a) {
  return std::visit(
      overloaded{[&](const Sandwich& s) {
                   require_same_structure(s.u, a);
                   return s.alpha * (s.u * a * s.v.adjoint());
                 },
                 [&](const BlockPermutation& p) {
                   if (static_cast<int>(p.perm.size()) != a.structure().num_blocks())
                     throw Error(ErrorKind::StructureMismatch, "permutation length differs from the block count");
                   return apply_permutation(p, a);
                 },
                 [&](const Conjugation&) { return a.conjugate(); },
                 [&](const Wild& w) { return wild(a, w.seed, w.policy); },
                 [&](const Dim2Induced& d) { return apply_dim2(d, a); },
                 [&](const Table& t) {
                   for (const auto& [in, out] : t.pairs)
                     if (same_element(in, a)) return out;
                   throw Error(ErrorKind::DomainMiss, "element not in the table's domain");
                 },
                 [&](const Composite& c) {
                   Element x = a;
                   for (const auto& part : c.parts) x = apply(part, x);
                   return x;
                 }},
      spec.kind);
}

std::optional<PreserverSpec> inverse(const PreserverSpec& spec) {
  return std::visit(
      overloaded{[](const Sandwich& s) -> std::optional<PreserverSpec> {
                   return PreserverSpec{Sandwich{s.u.adjoint(), s.v.adjoint(), 1.0 / s.alpha}};
                 },
                 [](const BlockPermutation& p) -> std::optional<PreserverSpec> {
                   BlockPermutation q{std::vector<int>(p.perm.size())};
                   for (std::size_t k = 0; k < p.perm.size(); ++k) q.perm[p.perm[k]] = static_cast<int>(k);
                   return PreserverSpec{q};
                 },
                 [](const Conjugation&) -> std::optional<PreserverSpec> { return PreserverSpec{Conjugation{}}; },
                 [](const Wild&) -> std::optional<PreserverSpec> { return std::nullopt; },
                 [](const Dim2Induced& d) -> std::optional<PreserverSpec> {
                   Dim2Induced r;
                   for (const auto& [from, to] : d.lines) r.lines.emplace_back(to, from);
                   return PreserverSpec{r};
                 },
                 [](const Table& t) -> std::optional<PreserverSpec> {
                   Table r;
                   for (const auto& [in, out] : t.pairs) r.pairs.emplace_back(out, in);
                   return PreserverSpec{r};
                 },
                 [](const Composite& c) -> std::optional<PreserverSpec> {
                   Composite r;
                   for (auto it = c.parts.rbegin(); it != c.parts.rend(); ++it) {
                     auto inv = inverse(*it);
                     if (!inv) return std::nullopt;
                     r.parts.push_back(std::move(*inv));
                   }
                   return PreserverSpec{r};
                 }},
      spec.kind);
}

PreserverSpec make_sandwich(const Element& u, const Element& v, Complex alpha) {
  return PreserverSpec{Sandwich{u, v, alpha}};
}

PreserverSpec random_sandwich(const BlockStructure& structure, Rng& rng) {
  Element u = haar_unitary(structure, rng);
  Element v = haar_unitary(structure, rng);
  return make_sandwich(u, v, random_scalar(rng));
}

PreserverSpec random_block_permutation(const BlockStructure& structure, Rng& rng) {
  BlockPermutation p{std::vector<int>(structure.num_blocks())};
  // shuffle within each dimension class
  std::vector<int> dims = structure.dims();
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  for (int n : dims) {
    std::vector<int> same;
    for (int k = 0; k < structure.num_blocks(); ++k)
      if (structure.dim(k) == n) same.push_back(k);
    std::vector<int> image = same;
    std::shuffle(image.begin(), image.end(), rng);
    for (std::size_t i = 0; i < same.size(); ++i) p.perm[same[i]] = image[i];
  }
  return PreserverSpec{p};
}

Dim2Induced close_lines(const std::vector<std::pair<Vector, Vector>>& lines) {
  Dim2Induced d;
  for (const auto& [from, to] : lines) {
    if (find_line(d, from) < 0) d.lines.emplace_back(from.normalized(), to.normalized());
    const Vector pf = perp(from.normalized());
    if (find_line(d, pf) < 0) d.lines.emplace_back(pf, perp(to.normalized()));
  }
  return d;
}

PreserverSpec random_dim2_induced(int count, Rng& rng) {
  std::vector<Vector> base;
  for (int i = 0; i < count; ++i) base.push_back(complex_gaussian_vector(rng, 2).normalized());
  std::vector<int> sigma(count);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::shuffle(sigma.begin(), sigma.end(), rng);
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int i = 0; i < count; ++i) {
    Vector target = uniform_int(rng, 0, 1) ? base[sigma[i]] : perp(base[sigma[i]]);
    pairs.emplace_back(base[i], random_phase(rng) * target);
  }
  return PreserverSpec{close_lines(pairs)};
}

namespace {

// Property P: same m_left and ker_left.
bool keeps_frames(const SpectralData& a, const SpectralData& b, const ToleranceConfig& tol) {
  return frame_equal(a.m_left, b.m_left, tol) && frame_equal(a.ker_left, b.ker_left, tol);
}

}  // namespace

Element wild(const Element& a, std::uint64_t seed, const TauPolicy& policy, const ToleranceConfig& tol) {
  if (a.is_zero()) return a;
  const BlockStructure& st = a.structure();
  const SpectralData d = decompose(a, tol);
  Rng rng(splitmix(seed ^ splitmix(element_hash(a))));
  const double s1 = d.norm;
  const Complex gamma = random_scalar(rng, 0.5, 2.0);

  std::vector<Matrix> out;
  for (int k = 0; k < st.num_blocks(); ++k) {
    const int n = st.dim(k);
    const BlockSvd& b = d.svd[k];
    RealVector tau = RealVector::Zero(n);
    int top = 0, nonzero = 0;
    for (int i = 0; i < n; ++i) {
      if (b.s(i) >= d.top_cutoff) {
        tau(i) = s1;
        ++top;
        ++nonzero;
      } else if (b.s(i) > d.rank_cutoff) {
        tau(i) = uniform_real(rng, policy.floor * s1, (1.0 - policy.delta) * s1);
        ++nonzero;
      }
    }
    // U_A = W Q W* with Q block-diagonal on (top, rest of range, kernel).
    Matrix q = Matrix::Zero(n, n);
    const int sizes[3] = {top, nonzero - top, n - nonzero};
    int at = 0;
    for (int size : sizes) {
      if (size > 0) q.block(at, at, size, size) = haar_unitary_matrix(rng, size);
      at += size;
    }
    const Matrix v = haar_unitary_matrix(rng, n);
    out.push_back(gamma * b.u * q * tau.cast<Complex>().asDiagonal() * b.v.adjoint() * v.adjoint());
  }
  Element result(st, std::move(out));
  if (!keeps_frames(d, decompose(result, tol), tol))
    throw Error(ErrorKind::StructureViolation, "wild output changed the norm-attaining or kernel frame");
  return result;
}

Element wild_with(const Element& a, const std::vector<double>& lower, const Element& u, const Element& v,
                  Complex gamma, const ToleranceConfig& tol) {
  require_same_structure(a, u);
  require_same_structure(a, v);
  if (a.is_zero()) return a;
  const BlockStructure& st = a.structure();
  const SpectralData d = decompose(a, tol);
  const std::vector<SingularTriplet> trip = singular_triplets(d);
  if (lower.size() != trip.size() - static_cast<std::size_t>(d.top_mult))
    throw Error(ErrorKind::InvalidSpec, "need one new value per singular value below the top cluster");
  Element pa = Element::zero(st);
  for (std::size_t i = 0; i < trip.size(); ++i) {
    const double tau = static_cast<int>(i) < d.top_mult ? d.norm : lower[i - d.top_mult];
    pa = pa + Complex(tau) * outer(st, trip[i].left, trip[i].right);
  }
  Element result = gamma * (u * pa * v.adjoint());
  if (!keeps_frames(d, decompose(result, tol), tol))
    throw Error(ErrorKind::StructureViolation, "explicit wild choice breaks the frame invariance");
  return result;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Fragile: return "fragile";
  }
  return "unknown";
}

namespace {

std::vector<Element> matrix_units(const BlockStructure& st) {
  std::vector<Element> out;
  for (int k = 0; k < st.num_blocks(); ++k)
    for (int i = 0; i < st.dim(k); ++i)
      for (int j = 0; j < st.dim(k); ++j) {
        Vector a = Vector::Zero(st.dim(k)), b = Vector::Zero(st.dim(k));
        a(i) = 1.0;
        b(j) = 1.0;
        out.push_back(outer(st, embed(st, k, a), embed(st, k, b)));
      }
  return out;
}

// Extra samples for the line-table maps: elements whose left singular lines are table lines.
std::vector<Element> line_samples(const Dim2Induced& d, const BlockStructure& st) {
  std::vector<Element> out;
  for (int k = 0; k < st.num_blocks(); ++k) {
    if (st.dim(k) != 2) continue;
    Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;
    for (const auto& [from, to] : d.lines) {
      const Vector f = embed(st, k, from), g = embed(st, k, perp(from));
      out.push_back(outer(st, f, embed(st, k, e1)));
      out.push_back(Complex(2.0) * outer(st, f, embed(st, k, e2)) + outer(st, g, embed(st, k, e1)));
    }
  }
  return out;
}

void collect_line_samples(const PreserverSpec& spec, const BlockStructure& st, std::vector<Element>& out) {
  if (const auto* d = std::get_if<Dim2Induced>(&spec.kind)) {
    auto more = line_samples(*d, st);
    out.insert(out.end(), more.begin(), more.end());
  } else if (const auto* c = std::get_if<Composite>(&spec.kind)) {
    for (const auto& part : c->parts) collect_line_samples(part, st, out);
  }
}

bool contains_table(const PreserverSpec& spec) {
  if (std::holds_alternative<Table>(spec.kind)) return true;
  if (const auto* c = std::get_if<Composite>(&spec.kind))
    return std::any_of(c->parts.begin(), c->parts.end(), contains_table);
  return false;
}

bool element_less(const Element& a, const Element& b) {
  const Vector ca = to_coordinates(a), cb = to_coordinates(b);
  for (Eigen::Index i = 0; i < std::min(ca.size(), cb.size()); ++i) {
    if (ca(i).real() != cb(i).real()) return ca(i).real() < cb(i).real();
    if (ca(i).imag() != cb(i).imag()) return ca(i).imag() < cb(i).imag();
  }
  return ca.size() < cb.size();
}

Element restrict_to_block(const Element& a, int block) {
  std::vector<Matrix> out;
  for (int k = 0; k < a.structure().num_blocks(); ++k)
    out.push_back(k == block ? a.block(k) : Matrix::Zero(a.block(k).rows(), a.block(k).cols()));
  return Element(a.structure(), std::move(out));
}

}  // namespace

CandidateMap candidate(const PreserverSpec& spec, const BlockStructure& structure) {
  check_spec(spec, structure);
  CandidateMap m;
  m.name = spec_name(spec);
  m.fn = [spec](const Element& a) { return apply(spec, a); };
  if (auto inv = inverse(spec)) m.inverse = [s = *inv](const Element& a) { return apply(s, a); };
  m.block_respecting = !contains_table(spec);
  if (const auto* t = std::get_if<Table>(&spec.kind)) {
    std::vector<Element> dom;
    for (const auto& [in, out] : t->pairs) dom.push_back(in);
    m.domain = std::move(dom);
    m.inverse = nullptr;
  }
  collect_line_samples(spec, structure, m.extra_samples);
  return m;
}

VerifyReport verify(const PreserverSpec& spec, const BlockStructure& structure, std::uint64_t seed, int budget,
                    const ToleranceConfig& tol) {
  return verify(candidate(spec, structure), structure, seed, budget, tol);
}

VerifyReport verify(const CandidateMap& map, const BlockStructure& st, std::uint64_t seed, int budget,
                    const ToleranceConfig& tol) {
  if (budget < 1) throw Error(ErrorKind::InvalidSpec, "verify budget must be at least 1");
  VerifyReport rep;
  rep.map_name = map.name;
  Rng rng(seed);

  // Compares x _|_s y with f(x) _|_s f(y); returns false on a disagreement.
  auto check = [&](const Element& x, const Element& y, const Element& fx, const Element& fy, const char* dir) {
    const OrthoVerdict before = strong_bj(x, y, tol);
    const OrthoVerdict after = strong_bj(fx, fy, tol);
    ++rep.pairs_tested;
    (before.value ? rep.coverage.orthogonal : rep.coverage.non_orthogonal)++;
    const bool agree = before.value == after.value;
    if (before.fragile || after.fragile) {
      ++rep.fragile_pairs;
      if (!agree) ++rep.fragile_disagreements;
      return;
    }
    if (agree) return;
    Counterexample c{x, y, dir, before.value, after.value, before.margin, after.margin};
    (std::string(dir) == "backward" ? rep.backward_failures : rep.forward_failures).push_back(std::move(c));
  };
  auto forward = [&](const Element& x, const Element& y, const char* dir = "forward") {
    check(x, y, map.fn(x), map.fn(y), dir);
  };

  if (map.domain) {
    const std::vector<Element>& dom = *map.domain;
    const std::size_t n = dom.size();
    if (n * n <= static_cast<std::size_t>(budget)) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) forward(dom[i], dom[j]);
    } else {
      for (int t = 0; t < budget; ++t)
        forward(dom[uniform_int(rng, 0, static_cast<int>(n) - 1)], dom[uniform_int(rng, 0, static_cast<int>(n) - 1)]);
    }
    rep.coverage.random = rep.pairs_tested;
  } else {
    const int n_random = budget / 2;
    const int n_eng = budget / 4;
    const int n_rank1 = budget / 8;
    const int n_proj = budget - n_random - n_eng - n_rank1;

    for (int t = 0; t < n_random; ++t) {
      Element x = random_mixed_element(st, rng);
      Element y = random_mixed_element(st, rng);
      forward(x, y);
      ++rep.coverage.random;
    }
    for (int t = 0; t < n_eng; ++t) {
      if (t % 2 == 0) {
        auto [x, y] = engineered_orthogonal_pair(st, rng);
        forward(x, y);
      } else {
        Element x = random_mixed_element(st, rng);
        if (auto y = orthogonal_partner_left(x, rng))
          forward(*y, x);
        else
          forward(x, orthogonal_partner_right(x, rng));
      }
      ++rep.coverage.engineered;
    }
    // Matrix-unit pairs first, then random rank-ones.
    const std::vector<Element> units = matrix_units(st);
    std::vector<std::pair<int, int>> unit_pairs;
    for (int i = 0; i < static_cast<int>(units.size()); ++i)
      for (int j = 0; j < static_cast<int>(units.size()); ++j) unit_pairs.emplace_back(i, j);
    std::shuffle(unit_pairs.begin(), unit_pairs.end(), rng);
    for (int t = 0; t < n_rank1; ++t) {
      if (t < static_cast<int>(unit_pairs.size())) {
        forward(units[unit_pairs[t].first], units[unit_pairs[t].second]);
      } else {
        Element x = random_rank_one(st, rng);
        Element y = random_rank_one(st, rng);
        forward(x, y);
      }
      ++rep.coverage.rank_one;
    }
    const int n = st.ambient_dim();
    for (int t = 0; t < n_proj; ++t) {
      Element p = random_scalar(rng) * random_projection(st, uniform_int(rng, 1, n), rng);
      switch (t % 3) {
        case 0: forward(p, random_scalar(rng) * random_projection(st, uniform_int(rng, 1, n), rng)); break;
        case 1: forward(random_coisometry(st, rng), random_singular_element(st, rng)); break;
        default: forward(p, random_coisometry(st, rng)); break;
      }
      ++rep.coverage.projection;
    }
    if (map.block_respecting) {
      const int per_block = std::max(2, budget / (8 * st.num_blocks()));
      for (int k = 0; k < st.num_blocks(); ++k) {
        for (int t = 0; t < per_block; ++t) {
          Element x = restrict_to_block(random_mixed_element(st, rng), k);
          Element y = restrict_to_block(random_mixed_element(st, rng), k);
          if (x.is_zero() || y.is_zero()) continue;
          forward(x, y, "restriction");
          ++rep.coverage.restriction;
        }
      }
    }
    if (map.inverse) {
      const int n_back = std::max(1, budget / 4);
      for (int t = 0; t < n_back; ++t) {
        Element u, v;
        if (t % 2 == 0) {
          u = random_mixed_element(st, rng);
          v = random_mixed_element(st, rng);
        } else {
          std::tie(u, v) = engineered_orthogonal_pair(st, rng);
        }
        // u, v play the images; their preimages must be related the same way.
        check(map.inverse(u), map.inverse(v), u, v, "backward");
        ++rep.coverage.backward;
      }
    }
  }
  for (std::size_t i = 0; i < map.extra_samples.size(); ++i)
    for (std::size_t j = 0; j < map.extra_samples.size(); ++j) {
      forward(map.extra_samples[i], map.extra_samples[j]);
      ++rep.coverage.extra;
    }

  auto canonical = [](const Counterexample& a, const Counterexample& b) {
    if (element_less(a.x, b.x)) return true;
    if (element_less(b.x, a.x)) return false;
    return element_less(a.y, b.y);
  };
  std::stable_sort(rep.forward_failures.begin(), rep.forward_failures.end(), canonical);
  std::stable_sort(rep.backward_failures.begin(), rep.backward_failures.end(), canonical);

  if (!rep.forward_failures.empty() || !rep.backward_failures.empty())
    rep.verdict = Verdict::Fail;
  else if (rep.fragile_disagreements > 0)
    rep.verdict = Verdict::Fragile;
  return rep;
}

PropertyPReport property_p_check(const std::function<Element(const Element&)>& map, const BlockStructure& st,
                                 std::uint64_t seed, int samples, const ToleranceConfig& tol) {
  if (samples < 1) throw Error(ErrorKind::InvalidSpec, "property check needs at least one sample");
  PropertyPReport rep;
  Rng rng(seed);
  const std::vector<Element> units = matrix_units(st);
  const int n_units = std::min(static_cast<int>(units.size()), samples / 4);
  for (int t = 0; t < samples; ++t) {
    const Element a = t < n_units ? units[t] : random_mixed_element(st, rng);
    const Element b = map(a);
    ++rep.samples;
    if (b.is_zero() || !keeps_frames(decompose(a, tol), decompose(b, tol), tol)) rep.violations.push_back(a);
  }
  return rep;
}

std::vector<int> extract_block_permutation(const std::function<Element(const Element&)>& map,
                                           const BlockStructure& st, std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int m = st.num_blocks();
  std::vector<int> perm(m, -1);
  for (int k = 0; k < m; ++k) {
    for (int probe = 0; probe < 3; ++probe) {
      const Vector xi = random_block_vector(st, k, rng);
      const Element image = map(rank_one_projection(st, xi));
      const std::vector<int> support = block_support(image, tol);
      if (support.size() != 1)
        throw Error(ErrorKind::NotSingletonSupport, "image of a rank-one in block " + std::to_string(k) + " meets " +
                                                        std::to_string(support.size()) + " blocks");
      if (perm[k] >= 0 && perm[k] != support.front())
        throw Error(ErrorKind::NotSingletonSupport,
                    "rank-ones of block " + std::to_string(k) + " land in different blocks");
      perm[k] = support.front();
    }
  }
  std::vector<bool> hit(m, false);
  for (int k = 0; k < m; ++k) {
    if (hit[perm[k]]) throw Error(ErrorKind::NotInjective, "two blocks map to block " + std::to_string(perm[k]));
    hit[perm[k]] = true;
    if (st.dim(perm[k]) != st.dim(k))
      throw Error(ErrorKind::DimensionMismatch, "block " + std::to_string(k) + " maps to a block of another size");
  }
  return perm;
}

Vector to_coordinates(const Element& a) {
  Vector c(a.structure().algebra_dim());
  Eigen::Index at = 0;
  for (const Matrix& b : a.blocks())
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) c(at++) = b(i, j);
  return c;
}

Element from_coordinates(const BlockStructure& st, const Vector& c) {
  if (c.size() != st.algebra_dim())
    throw Error(ErrorKind::DimensionMismatch, "coordinate vector has length " + std::to_string(c.size()));
  std::vector<Matrix> blocks;
  Eigen::Index at = 0;
  for (int k = 0; k < st.num_blocks(); ++k) {
    Matrix b(st.dim(k), st.dim(k));
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = c(at++);
    blocks.push_back(std::move(b));
  }
  return Element(st, std::move(blocks));
}

Matrix linearize(const std::function<Element(const Element&)>& map, const BlockStructure& st) {
  const int d = st.algebra_dim();
  Matrix m(d, d);
  for (int c = 0; c < d; ++c) {
    Vector e = Vector::Zero(d);
    e(c) = 1.0;
    m.col(c) = to_coordinates(map(from_coordinates(st, e)));
  }
  return m;
}

std::function<Element(const Element&)> linear_map(const Matrix& m, const BlockStructure& st) {
  if (m.rows() != st.algebra_dim() || m.cols() != st.algebra_dim())
    throw Error(ErrorKind::DimensionMismatch, "linear map size does not match the algebra dimension");
  return [m, st](const Element& a) { return from_coordinates(st, m * to_coordinates(a)); };
}

Element apply_recovered(const SandwichRecovery& r, const Element& x) {
  const Element px = apply_permutation(BlockPermutation{r.perm}, x);
  return r.alpha * (r.u * px * r.v.adjoint());
}

SandwichRecovery recover_sandwich(const Matrix& linear, const BlockStructure& st, std::uint64_t seed,
                                  const ToleranceConfig& tol) {
  const auto fn = linear_map(linear, st);
  Rng rng(seed);
  SandwichRecovery out;

  // kappa = ||Phi(E)|| on norm-one rank-ones must not depend on E.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int k = uniform_int(rng, 0, st.num_blocks() - 1);
    const Element e = outer(st, random_block_vector(st, k, rng), random_block_vector(st, k, rng));
    const double kn = fn(e).norm();
    lo = std::min(lo, kn);
    hi = std::max(hi, kn);
  }
  if (hi == 0.0) throw Error(ErrorKind::KappaNotConstant, "map annihilates rank-one elements");
  out.kappa = hi;
  out.kappa_spread = (hi - lo) / hi;
  if (out.kappa_spread > tol.eps_norm)
    throw Error(ErrorKind::KappaNotConstant, "norms of rank-one images spread by " + std::to_string(out.kappa_spread));

  out.perm = extract_block_permutation(fn, st, splitmix(seed + 1), tol);

  std::vector<Matrix> ublocks(st.num_blocks()), vblocks(st.num_blocks());
  for (int lam = 0; lam < st.num_blocks(); ++lam) {
    const int mu = out.perm[lam], n = st.dim(lam);
    auto unit_image = [&](int i, int j) {
      Vector a = Vector::Zero(n), b = Vector::Zero(n);
      a(i) = 1.0;
      b(j) = 1.0;
      return Matrix(fn(outer(st, embed(st, lam, a), embed(st, lam, b))).block(mu));
    };
    const Matrix m11 = unit_image(0, 0);
    Eigen::JacobiSVD<Matrix> svd(m11, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s = svd.singularValues()(0);
    if (s == 0.0) throw Error(ErrorKind::RecoveryInconsistent, "matrix unit maps to zero");
    Vector u1 = svd.matrixU().col(0), v1 = svd.matrixV().col(0);
    // gauge: leading significant entry of u1 real-positive, v1 rotated along
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(u1(i)) > 1e-8) {
        const Complex p = std::conj(u1(i)) / std::abs(u1(i));
        u1 *= p;
        v1 *= p;
        break;
      }
    }
    const Complex alpha = u1.dot(m11 * v1);  // u1* M11 v1
    Matrix u(n, n), v(n, n);
    u.col(0) = u1;
    v.col(0) = v1;
    for (int i = 1; i < n; ++i) u.col(i) = unit_image(i, 0) * v1 / alpha;
    for (int j = 1; j < n; ++j) v.col(j) = unit_image(0, j).adjoint() * u1 / std::conj(alpha);
    // Block phases are absorbed into U so a single alpha serves every block.
    if (lam == 0) {
      out.alpha = alpha;
    } else {
      u *= alpha / out.alpha;
    }
    ublocks[mu] = std::move(u);
    vblocks[mu] = std::move(v);
  }
  out.u = Element(st, std::move(ublocks));
  out.v = Element(st, std::move(vblocks));

  for (int t = 0; t < 50; ++t) {
    const Element x = random_element(st, rng);
    out.residual = std::max(out.residual, (fn(x) - apply_recovered(out, x)).norm() / x.norm());
  }
  if (out.residual > 1e-6)
    throw Error(ErrorKind::RecoveryInconsistent, "sandwich model leaves residual " + std::to_string(out.residual));
  return out;
}

}  // namespace sbjo
