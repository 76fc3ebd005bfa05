#include "sbjo/acceptance.hpp"

#include "sbjo/orthogonality.hpp"
#include "sbjo/orthograph.hpp"
#include "sbjo/preservers.hpp"
#include "sbjo/sampling.hpp"
#include "sbjo/structure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace sbjo {

namespace {

// Pinned acceptance tolerances.
constexpr double kFragileFractionMax = 0.01;
constexpr double kCertificateFactor = 1.0 - 1e-7;
constexpr int kSampledBudget = 200;
constexpr double kInvertibleFloor = 1e-9;  // |r_nn| / ||x|| of pivoted QR
constexpr double kRecoveryResidualMax = 1e-8;
constexpr double kAlphaRatioTol = 1e-9;
constexpr double kKappaSpreadMax = 1e-9;

std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Counts = std::vector<std::pair<std::string, long long>>;

struct Outcome {
  bool pass = false;
  std::string detail;
  Counts counts;
};

// Mixed random / rank-constrained / engineered-orthogonal pairs.
std::pair<Element, Element> oracle_pair(Rng& rng, int t) {
  const BlockStructure st = random_structure(rng, 4, 8);
  switch (t % 5) {
    case 0:
    case 1: return {random_mixed_element(st, rng), random_mixed_element(st, rng)};
    case 2: {
      const int n = st.ambient_dim();
      Element x = random_element(st, rng, uniform_int(rng, 1, n));
      Element y = random_element(st, rng, uniform_int(rng, 1, n));
      return {x, y};
    }
    case 3: return engineered_orthogonal_pair(st, rng);
    default: {
      Element x = random_mixed_element(st, rng);
      if (auto y = orthogonal_partner_left(x, rng)) return {*y, x};
      return engineered_orthogonal_pair(st, rng);
    }
  }
}

bool certificate_holds(const Element& x, const Element& y, const OrthoVerdict& distance) {
  if (!distance.violating_z) return false;
  return (x + y * *distance.violating_z).norm() <= kCertificateFactor * x.norm();
}

Outcome cross_oracle(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 10000;
  long long fragile = 0, disagree = 0, orth = 0, non_orth = 0, refuted = 0, cert_fail = 0;
  for (int t = 0; t < total; ++t) {
    auto [x, y] = oracle_pair(rng, t);
    const CrossCheck cc = cross_check(x, y, tol);
    if (cc.fragile()) {
      ++fragile;
      continue;
    }
    if (!cc.agree()) {
      ++disagree;
      continue;
    }
    if (cc.criterion.value) {
      ++orth;
      if (!strong_bj_sampled(x, y, tol, kSampledBudget, derive(seed, t))) ++refuted;
    } else {
      ++non_orth;
      if (!certificate_holds(x, y, cc.distance)) ++cert_fail;
    }
  }
  const double frac = static_cast<double>(fragile) / total;
  Outcome o;
  o.pass = disagree == 0 && frac < kFragileFractionMax && refuted == 0;
  std::ostringstream os;
  os << total << " pairs, " << disagree << " disagreements, fragile " << fragile << " ("
     << std::setprecision(3) << 100.0 * frac << "%), sampled refutations of agreed orthogonal " << refuted;
  o.detail = os.str();
  o.counts = {{"pairs", total},   {"disagreements", disagree}, {"fragile", fragile},
              {"orthogonal", orth}, {"non_orthogonal", non_orth}, {"sampled_refutations", refuted},
              {"certificate_failures", cert_fail}};
  return o;
}

Outcome abs_polar(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 1000;
  long long violations = 0, fragile = 0, orth = 0;
  for (int t = 0; t < total; ++t) {
    auto [x, y] = oracle_pair(rng, t);
    const Element ax = abs_adjoint(x), ay = abs_adjoint(y);
    const OrthoVerdict v[4] = {strong_bj(x, y, tol), strong_bj(ax, y, tol), strong_bj(x, ay, tol),
                               strong_bj(ax, ay, tol)};
    if (std::any_of(std::begin(v), std::end(v), [](const OrthoVerdict& w) { return w.fragile; })) {
      ++fragile;
      continue;
    }
    if (v[0].value) ++orth;
    if (!std::all_of(std::begin(v), std::end(v), [&](const OrthoVerdict& w) { return w.value == v[0].value; }))
      ++violations;
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(total) + " pairs (" + std::to_string(orth) + " orthogonal), " +
             std::to_string(violations) + " violations, " + std::to_string(fragile) + " fragile skipped";
  o.counts = {{"pairs", total}, {"violations", violations}, {"fragile", fragile}, {"orthogonal", orth}};
  return o;
}

Outcome certificates(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 4000;
  long long checked = 0, failures = 0, missing = 0;
  for (int t = 0; t < total; ++t) {
    auto [x, y] = oracle_pair(rng, t);
    const CrossCheck cc = cross_check(x, y, tol);
    if (cc.fragile() || cc.criterion.value || cc.formula.value || cc.distance.value) continue;
    ++checked;
    if (!cc.distance.violating_z)
      ++missing;
    else if (!certificate_holds(x, y, cc.distance))
      ++failures;
  }
  Outcome o;
  o.pass = failures == 0 && missing == 0 && checked > 0;
  o.detail = std::to_string(checked) + " refuted pairs, " + std::to_string(failures) + " certificate failures";
  o.counts = {{"pairs", total}, {"refuted", checked}, {"failures", failures}, {"missing", missing}};
  return o;
}

bool oracle_blockwise_invertible(const Element& x) {
  const double n = x.norm();
  for (const Matrix& b : x.blocks()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(b);
    const Eigen::Index last = b.rows() - 1;
    if (std::abs(qr.matrixQR()(last, last)) <= kInvertibleFloor * n) return false;
  }
  return true;
}

Outcome right_symmetry(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 500;
  long long mismatch = 0, witness_fail = 0, symmetric = 0;
  for (int t = 0; t < total; ++t) {
    const BlockStructure st = random_structure(rng, 4, 6);
    Element x = t % 2 ? random_singular_element(st, rng) : random_mixed_element(st, rng);
    const bool rs = is_right_symmetric(x, tol);
    const auto w = mutual_edge_witness(x, tol);
    if (rs) ++symmetric;
    if (rs != oracle_blockwise_invertible(x) || rs == w.has_value()) ++mismatch;
    if (w && !(strong_bj(*w, x, tol).value && strong_bj(x, *w, tol).value)) ++witness_fail;
  }
  Outcome o;
  o.pass = mismatch == 0 && witness_fail == 0;
  o.detail = std::to_string(total) + " elements (" + std::to_string(symmetric) + " right-symmetric), " +
             std::to_string(mismatch) + " equivalence mismatches, " + std::to_string(witness_fail) +
             " witness failures";
  o.counts = {{"elements", total}, {"right_symmetric", symmetric}, {"mismatches", mismatch},
              {"witness_failures", witness_fail}};
  return o;
}

Outcome coisometry_law(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  long long cases = 0, hits = 0;
  for (int c = 0; c < 50; ++c) {
    // a single 1x1 block has no nonzero element that fails right symmetry
    BlockStructure st;
    do st = random_structure(rng, 4, 6);
    while (st.ambient_dim() < 2);
    const Element u = random_coisometry(st, rng);
    const SpectralData su = decompose(u, tol);
    for (int p = 0; p < 50; ++p) {
      Element y;
      int attempts = 0;
      do {
        switch (attempts++ < 20 ? p % 3 : 0) {
          case 0: y = random_singular_element(st, rng); break;
          case 1: y = random_rank_one(st, rng); break;
          default: y = orthogonal_partner_right(random_mixed_element(st, rng), rng); break;
        }
      } while (is_right_symmetric(y, tol));
      ++cases;
      if (strong_bj(su, decompose(y, tol), tol).value) ++hits;
    }
  }
  Outcome o;
  o.pass = hits == cases && cases == 2500;
  o.detail = std::to_string(hits) + "/" + std::to_string(cases) + " coisometry-partner pairs orthogonal";
  o.counts = {{"cases", cases}, {"orthogonal", hits}};
  return o;
}

Element frame_projection(const Frame& f) { return Element::from_dense(f.structure, f.projector(), 1e-9); }

// B with m_left(B) containing m_left(A), usually strictly.
Element r_nested(const Element& a, Rng& rng) {
  const BlockStructure& st = a.structure();
  const SpectralData d = decompose(a);
  const Element p = frame_projection(d.m_left);
  const Element id = Element::identity(st);
  Element q = p;
  const Vector eta0 = (id - p).apply(random_unit_vector(st, rng));
  if (eta0.norm() > 1e-6) q = q + rank_one_projection(st, eta0.normalized());
  const Element rest = (id - q) * random_element(st, rng) * (id - q);
  const double rn = rest.norm();
  return rn > 0.0 ? q + Complex(0.5 / rn) * rest : q;
}

// B with range(B) inside range(A).
Element l_nested(const Element& a, Rng& rng) {
  const SpectralData d = decompose(a);
  Element b = frame_projection(d.range) * random_element(a.structure(), rng);
  return b.is_zero() ? a : b;
}

Outcome inclusion(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 500;
  long long r_holds = 0, l_holds = 0, mono_viol = 0, wit_ok = 0, wit_fail = 0, unavailable = 0, internal = 0,
            z_checked = 0;
  for (int t = 0; t < total; ++t) {
    const BlockStructure st = random_structure(rng, 3, 4);
    Element a = random_mixed_element(st, rng), b;
    switch (t % 4) {
      case 0: b = random_mixed_element(st, rng); break;
      case 1: b = r_nested(a, rng); break;
      case 2: b = l_nested(a, rng); break;
      default: {
        b = a;
        a = t % 8 == 3 ? r_nested(b, rng) : l_nested(b, rng);
        break;
      }
    }
    if (a.is_zero() || b.is_zero()) continue;
    const SpectralData sa = decompose(a, tol), sb = decompose(b, tol);

    const InclusionReport r = r_leq(a, b, tol);
    if (r.holds) {
      ++r_holds;
      for (int s = 0; s < 100; ++s) {
        const Element z = s % 2 ? orthogonal_partner_right(a, rng) : random_mixed_element(st, rng);
        const SpectralData sz = decompose(z, tol);
        const OrthoVerdict va = strong_bj(sa, sz, tol), vb = strong_bj(sb, sz, tol);
        if (va.fragile || vb.fragile) continue;
        ++z_checked;
        if (va.value && !vb.value) ++mono_viol;
      }
    } else if (r.witness_unavailable) {
      ++unavailable;
    } else if (r.witness && strong_bj(a, *r.witness, tol).value && !strong_bj(b, *r.witness, tol).value) {
      ++wit_ok;
    } else {
      ++wit_fail;
    }

    InclusionReport l;
    try {
      l = l_leq(a, b, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Internal) throw;
      ++internal;
      continue;
    }
    if (l.holds) {
      ++l_holds;
      for (int s = 0; s < 100; ++s) {
        std::optional<Element> zl = s % 2 ? orthogonal_partner_left(a, rng) : std::nullopt;
        const Element z = zl ? *zl : random_mixed_element(st, rng);
        const SpectralData sz = decompose(z, tol);
        const OrthoVerdict va = strong_bj(sz, sa, tol), vb = strong_bj(sz, sb, tol);
        if (va.fragile || vb.fragile) continue;
        ++z_checked;
        if (va.value && !vb.value) ++mono_viol;
      }
    } else if (l.witness_unavailable) {
      ++unavailable;
    } else if (l.witness && strong_bj(*l.witness, a, tol).value && !strong_bj(*l.witness, b, tol).value) {
      ++wit_ok;
    } else {
      ++wit_fail;
    }
  }
  Outcome o;
  o.pass = mono_viol == 0 && wit_fail == 0 && unavailable == 0 && internal == 0;
  o.detail = std::to_string(total) + " pairs (R holds " + std::to_string(r_holds) + ", L holds " +
             std::to_string(l_holds) + "), " + std::to_string(mono_viol) + " monotonicity violations over " +
             std::to_string(z_checked) + " z, witnesses " + std::to_string(wit_ok) + " ok / " +
             std::to_string(wit_fail) + " bad, unavailable " + std::to_string(unavailable);
  o.counts = {{"pairs", total},
              {"r_holds", r_holds},
              {"l_holds", l_holds},
              {"z_checked", z_checked},
              {"monotonicity_violations", mono_viol},
              {"witnesses_valid", wit_ok},
              {"witnesses_invalid", wit_fail},
              {"witness_unavailable", unavailable},
              {"internal_mismatch", internal}};
  return o;
}

Outcome rank_chains(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 500;
  long long wrong = 0, errors = 0;
  for (int t = 0; t < total; ++t) {
    const int r = 1 + t % 6;
    BlockStructure st;
    do st = random_structure(rng, 4, 8);
    while (st.ambient_dim() < r);
    const Element a = random_scalar(rng) * random_rank_element(st, r, rng);
    try {
      const RankChain c = rank_via_chain(a, tol);
      if (c.rank != r || decompose(a, tol).rank != r || static_cast<int>(c.chain.size()) != r) ++wrong;
    } catch (const Error&) {
      ++errors;
    }
  }
  Outcome o;
  o.pass = wrong == 0 && errors == 0;
  o.detail = std::to_string(total) + " planted ranks 1-6, " + std::to_string(wrong) + " wrong, " +
             std::to_string(errors) + " chain errors";
  o.counts = {{"elements", total}, {"wrong", wrong}, {"errors", errors}};
  return o;
}

Outcome r_chains(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int total = 100;
  long long bad = 0, errors = 0, longest = 0;
  for (int t = 0; t < total; ++t) {
    const BlockStructure st = random_structure(rng, 3, 6);
    const int top = uniform_int(rng, 1, st.ambient_dim());
    const Element x = Complex(uniform_real(rng, 0.5, 3.0)) * planted_positive(st, top, rng);
    const int n = uniform_int(rng, 1, top);
    try {
      const RChain c = r_chain(x, n, tol);
      const int mdim = decompose(x, tol).m_left.dim();
      bool ok = static_cast<int>(c.links.size()) == n && n <= mdim;
      // strict growth of m_left along the chain, independently of r_chain's own check
      for (int k = 0; ok && k + 1 < n; ++k) {
        const SpectralData lo = decompose(c.links[k], tol), hi = decompose(c.links[k + 1], tol);
        ok = frame_leq(lo.m_left, hi.m_left, tol) && !frame_leq(hi.m_left, lo.m_left, tol);
      }
      if (!ok) ++bad;
      longest = std::max<long long>(longest, n);
    } catch (const Error&) {
      ++errors;
    }
  }
  Outcome o;
  o.pass = bad == 0 && errors == 0;
  o.detail = std::to_string(total) + " planted chains (longest " + std::to_string(longest) + "), " +
             std::to_string(bad) + " bad, " + std::to_string(errors) + " errors";
  o.counts = {{"chains", total}, {"bad", bad}, {"errors", errors}, {"longest", longest}};
  return o;
}

Outcome preservers_positive(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const int budget = 2000;
  std::map<std::string, std::pair<long long, long long>> tally;  // name -> (runs, failed runs)
  long long counterexamples = 0, fragile = 0, pairs = 0;
  auto run = [&](const std::string& name, const PreserverSpec& spec, const BlockStructure& st, int b) {
    const VerifyReport r = verify(spec, st, rng(), b, tol);
    const long long ce = static_cast<long long>(r.forward_failures.size() + r.backward_failures.size());
    counterexamples += ce;
    fragile += r.fragile_disagreements;
    pairs += r.pairs_tested;
    auto& [runs, failed] = tally[name];
    ++runs;
    if (ce > 0) ++failed;
  };
  const std::vector<BlockStructure> small = {BlockStructure({2, 3}), BlockStructure({1, 2, 2}), BlockStructure({3}),
                                             BlockStructure({2, 2})};
  for (int t = 0; t < 100; ++t) {
    const BlockStructure& st = small[t % small.size()];
    run("sandwich", random_sandwich(st, rng), st, budget);
  }
  const BlockStructure big({1, 2, 2, 3});
  for (int t = 0; t < 3; ++t) run("block_permutation", random_block_permutation(big, rng), big, budget);
  run("conjugation", PreserverSpec{Conjugation{}}, big, budget);
  run("conjugation", PreserverSpec{Conjugation{}}, BlockStructure({4}), budget);
  for (int t = 0; t < 3; ++t) {
    Composite c;
    c.parts.push_back(random_block_permutation(big, rng));
    c.parts.push_back(random_sandwich(big, rng));
    c.parts.push_back(PreserverSpec{Conjugation{}});
    run("composite", PreserverSpec{c}, big, budget);
  }
  run("wild", PreserverSpec{Wild{rng(), {}}}, BlockStructure({2, 3}), budget);
  run("wild", PreserverSpec{Wild{rng(), {}}}, big, budget);
  run("dim2_induced", random_dim2_induced(4, rng), BlockStructure({2}), budget);

  // property P on wild outputs, 500 elements over mixed structures
  long long p_viol = 0, p_samples = 0;
  for (int t = 0; t < 5; ++t) {
    const BlockStructure st = random_structure(rng, 4, 6);
    const std::uint64_t wseed = rng();
    const PropertyPReport pr =
        property_p_check([&](const Element& a) { return wild(a, wseed, {}, tol); }, st, rng(), 100, tol);
    p_viol += static_cast<long long>(pr.violations.size());
    p_samples += pr.samples;
  }

  Outcome o;
  o.pass = counterexamples == 0 && p_viol == 0;
  std::ostringstream os;
  for (const auto& [name, rf] : tally) os << name << " " << rf.first - rf.second << "/" << rf.first << ", ";
  os << counterexamples << " counterexamples over " << pairs << " pairs (" << fragile
     << " fragile disagreements), property P " << p_samples - p_viol << "/" << p_samples;
  o.detail = os.str();
  o.counts = {{"pairs", pairs},
              {"counterexamples", counterexamples},
              {"fragile_disagreements", fragile},
              {"property_p_samples", p_samples},
              {"property_p_violations", p_viol}};
  return o;
}

Element matrix_unit(const BlockStructure& st, int i, int j) {
  Vector a = Vector::Zero(st.ambient_dim()), b = Vector::Zero(st.ambient_dim());
  a(i) = 1.0;
  b(j) = 1.0;
  return outer(st, a, b);
}

Outcome preservers_negative(std::uint64_t seed, const ToleranceConfig& tol) {
  const BlockStructure m2({2});
  const Element e12 = matrix_unit(m2, 0, 1), e22 = matrix_unit(m2, 1, 1);
  auto found_pair = [&](const VerifyReport& r) {
    return std::any_of(r.forward_failures.begin(), r.forward_failures.end(), [&](const Counterexample& c) {
      return (c.x - e12).norm() == 0.0 && (c.y - e22).norm() == 0.0;
    });
  };
  CandidateMap transpose{"transpose", [](const Element& a) { return a.transpose(); },
                         [](const Element& a) { return a.transpose(); }, true, std::nullopt, {}};
  CandidateMap adjoint{"adjoint", [](const Element& a) { return a.adjoint(); },
                       [](const Element& a) { return a.adjoint(); }, true, std::nullopt, {}};
  const VerifyReport rt = verify(transpose, m2, derive(seed, 1), 200, tol);
  const VerifyReport ra = verify(adjoint, m2, derive(seed, 2), 200, tol);
  const bool t_ok = rt.verdict == Verdict::Fail && found_pair(rt);
  const bool a_ok = ra.verdict == Verdict::Fail && found_pair(ra);

  std::string recovery = "silent success";
  bool refuted = false;
  try {
    recover_sandwich(linearize(transpose.fn, m2), m2, derive(seed, 3), tol);
  } catch (const Error& e) {
    refuted = e.kind() == ErrorKind::KappaNotConstant || e.kind() == ErrorKind::RecoveryInconsistent;
    recovery = to_string(e.kind());
  }
  Outcome o;
  o.pass = t_ok && a_ok && refuted;
  o.detail = std::string("transpose ") + to_string(rt.verdict) + " (" + std::to_string(rt.forward_failures.size()) +
             " counterexamples, E12/E22 " + (found_pair(rt) ? "found" : "missing") + "), adjoint " +
             to_string(ra.verdict) + " (" + std::to_string(ra.forward_failures.size()) + " counterexamples, E12/E22 " +
             (found_pair(ra) ? "found" : "missing") + "), recovery on transpose: " + recovery;
  o.counts = {{"transpose_counterexamples", static_cast<long long>(rt.forward_failures.size())},
              {"adjoint_counterexamples", static_cast<long long>(ra.forward_failures.size())},
              {"recovery_refuted", refuted}};
  return o;
}

Outcome recovery(std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  const BlockStructure big({1, 2, 2, 3});
  long long perm_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const PreserverSpec perm = random_block_permutation(big, rng);
    Composite c;
    c.parts.push_back(perm);
    if (t % 2 == 0)
      c.parts.push_back(random_sandwich(big, rng));
    else
      c.parts.push_back(PreserverSpec{Wild{rng(), {}}});
    const PreserverSpec spec{c};
    try {
      const auto got = extract_block_permutation([&](const Element& a) { return apply(spec, a); }, big, rng(), tol);
      if (got == std::get<BlockPermutation>(perm.kind).perm) ++perm_ok;
    } catch (const Error&) {
    }
  }

  long long rec_ok = 0;
  double worst_residual = 0.0, worst_ratio = 0.0, worst_spread = 0.0;
  const std::vector<BlockStructure> shapes = {BlockStructure({2, 2}), big};
  for (int t = 0; t < 100; ++t) {
    const BlockStructure& st = shapes[t % 2];
    const PreserverSpec perm = random_block_permutation(st, rng);
    const PreserverSpec sw = random_sandwich(st, rng);
    const Complex alpha = std::get<Sandwich>(sw.kind).alpha;
    const PreserverSpec spec{Composite{{perm, sw}}};
    try {
      const SandwichRecovery r =
          recover_sandwich(linearize([&](const Element& a) { return apply(spec, a); }, st), st, rng(), tol);
      const double ratio = std::abs(std::abs(r.alpha) / std::abs(alpha) - 1.0);
      worst_residual = std::max(worst_residual, r.residual);
      worst_ratio = std::max(worst_ratio, ratio);
      worst_spread = std::max(worst_spread, r.kappa_spread);
      if (r.residual <= kRecoveryResidualMax && ratio <= kAlphaRatioTol && r.kappa_spread < kKappaSpreadMax &&
          r.perm == std::get<BlockPermutation>(perm.kind).perm)
        ++rec_ok;
    } catch (const Error&) {
    }
  }
  Outcome o;
  o.pass = perm_ok == 100 && rec_ok == 100;
  std::ostringstream os;
  os << "permutations " << perm_ok << "/100, sandwiches " << rec_ok << "/100 (worst residual " << std::setprecision(2)
     << worst_residual << ", |alpha| error " << worst_ratio << ", kappa spread " << worst_spread << ")";
  o.detail = os.str();
  o.counts = {{"permutations_recovered", perm_ok}, {"sandwiches_recovered", rec_ok}};
  return o;
}

std::vector<Element> graph_sample(const BlockStructure& st, int count, Rng& rng) {
  std::vector<Element> out;
  while (static_cast<int>(out.size()) < count) {
    switch (out.size() % 6) {
      case 0: out.push_back(random_rank_one(st, rng)); break;
      case 1: out.push_back(random_projection(st, uniform_int(rng, 1, st.ambient_dim()), rng)); break;
      case 2: out.push_back(random_singular_element(st, rng)); break;
      case 3: out.push_back(orthogonal_partner_right(out.back(), rng)); break;
      case 4: out.push_back(random_mixed_element(st, rng)); break;
      default: out.push_back(random_coisometry(st, rng)); break;
    }
  }
  return out;
}

Outcome graph(std::uint64_t seed, const ToleranceConfig& tol) {
  const BlockStructure m2({2});
  const Element id = Element::identity(m2);
  const std::vector<Element> fixture = {id, matrix_unit(m2, 0, 0), matrix_unit(m2, 1, 1)};
  const OrthoGraph g = build(fixture, GraphMode::Mutual, tol, true);
  const std::vector<int> iso = isolated_vertices(g);
  const bool fixture_ok = iso.size() == 1 && iso.front() == g.source[0];

  Rng rng(seed);
  long long invariant = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const BlockStructure st = t % 2 ? BlockStructure({2, 2}) : BlockStructure({1, 3});
    const std::vector<Element> s = graph_sample(st, 24, rng);
    const PreserverSpec phi = random_sandwich(st, rng);
    std::vector<Element> image;
    for (const Element& e : s) image.push_back(apply(phi, e));
    bool ok = true;
    for (GraphMode mode : {GraphMode::Mutual, GraphMode::Directed}) {
      const OrthoGraph a = build(s, mode, tol, false), b = build(image, mode, tol, false);
      std::vector<int> vmap(a.vertices.size(), -1);
      for (std::size_t i = 0; i < s.size(); ++i) {
        int& slot = vmap[a.source[i]];
        if (slot >= 0 && slot != b.source[i]) ok = false;
        slot = b.source[i];
      }
      ok = ok && isomorphic_under(a, b, vmap);
    }
    if (ok) ++invariant;
  }
  Outcome o;
  o.pass = fixture_ok && invariant == trials;
  o.detail = std::string("fixture isolated = ") + (fixture_ok ? "{[I]}" : "wrong (" + std::to_string(iso.size()) + " vertices)") +
             ", sandwich invariance " + std::to_string(invariant) + "/" + std::to_string(trials);
  o.counts = {{"fixture_ok", fixture_ok}, {"invariant", invariant}, {"trials", trials}};
  return o;
}

struct Criterion {
  int id;
  const char* group;
  const char* title;
  std::function<Outcome(std::uint64_t, const ToleranceConfig&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "oracle", "cross-oracle agreement", cross_oracle},
      {2, "abs-polar", "absolute-value invariance", abs_polar},
      {3, "certificate", "refutation certificates", certificates},
      {4, "symmetry", "right symmetry equivalences", right_symmetry},
      {5, "coisometry", "coisometry orthogonality law", coisometry_law},
      {6, "inclusion", "R/L inclusion and witnesses", inclusion},
      {7, "rank", "rank via L-set chains", rank_chains},
      {8, "chain", "R-chain family", r_chains},
      {9, "preserver", "preservers pass verify", preservers_positive},
      {10, "preserver", "non-preservers are refuted", preservers_negative},
      {11, "recovery", "permutation and sandwich recovery", recovery},
      {12, "graph", "ortho-graph fixture and invariance", graph},
  };
  return list;
}

}  // namespace

const std::vector<std::string>& criterion_groups() {
  static const std::vector<std::string> groups = [] {
    std::vector<std::string> g(1);
    for (const Criterion& c : criteria()) g.push_back(c.group);
    return g;
  }();
  return groups;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& options, std::ostream* log) {
  std::vector<bool> selected(criteria().size(), options.only.empty());
  for (const std::string& name : options.only) {
    bool known = false;
    for (std::size_t i = 0; i < criteria().size(); ++i) {
      if (name == criteria()[i].group || name == std::to_string(criteria()[i].id)) {
        selected[i] = true;
        known = true;
      }
    }
    if (!known) throw Error(ErrorKind::InvalidSpec, "unknown criterion or group '" + name + "'");
  }

  std::string tol_error;
  try {
    options.tol.validate();
  } catch (const Error& e) {
    tol_error = e.what();
  }

  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    if (!selected[i]) continue;
    const Criterion& c = criteria()[i];
    CriterionResult r;
    r.id = c.id;
    r.group = c.group;
    r.title = c.title;
    const auto start = std::chrono::steady_clock::now();
    if (!tol_error.empty()) {
      r.pass = false;
      r.detail = "not run: " + tol_error;
    } else {
      try {
        Outcome o = c.run(derive(options.seed, static_cast<std::uint64_t>(c.id)), options.tol);
        r.pass = o.pass;
        r.detail = std::move(o.detail);
        r.counts = std::move(o.counts);
      } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("aborted: ") + e.what();
      }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (log) *log << format_result(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << std::setw(2) << r.id << "  " << std::left << std::setw(11) << r.group << std::right << "  "
     << (r.pass ? "PASS" : "FAIL") << "  " << r.title << ": " << r.detail << "  (" << std::fixed
     << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

}  // namespace sbjo
