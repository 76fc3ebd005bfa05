// sbjo: command-line front end.
//
// Exit codes: 0 yes/pass, 1 no/fail, 2 disagreement between deciders,
// 3 fragile margin, 64 usage or I/O error.

#include "sbjo/acceptance.hpp"
#include "sbjo/io.hpp"
#include "sbjo/orthogonality.hpp"
#include "sbjo/orthograph.hpp"
#include "sbjo/preservers.hpp"
#include "sbjo/sampling.hpp"
#include "sbjo/structure.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace sbjo;

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kDisagree = 2;
constexpr int kFragile = 3;
constexpr int kUsage = 64;

struct Globals {
  std::uint64_t seed = 0;
  ToleranceConfig tol;
  bool json = false;
};

void emit(const Globals& g, const json& doc, const std::string& text) {
  if (g.json)
    std::cout << doc.dump(2) << '\n';
  else
    std::cout << text;
}

json verdict_json(const OrthoVerdict& v) {
  json j = {{"method", to_string(v.method)},
            {"value", v.value},
            {"margin", v.margin},
            {"threshold", v.threshold},
            {"fragile", v.fragile}};
  if (v.witness) {
    j["witness_block"] = v.witness->block;
    j["witness_left"] = json::array();
    j["witness_right"] = json::array();
    for (Eigen::Index i = 0; i < v.witness->left.size(); ++i) {
      j["witness_left"].push_back(complex_to_json(v.witness->left(i)));
      j["witness_right"].push_back(complex_to_json(v.witness->right(i)));
    }
  }
  if (v.violating_z) {
    j["violating_z"] = element_to_json(*v.violating_z);
    j["attained"] = v.attained;
  }
  return j;
}

std::string vector_text(const Vector& v) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v(i).real();
    if (v(i).imag() != 0.0) os << (v(i).imag() < 0 ? "-" : "+") << std::abs(v(i).imag()) << "i";
  }
  os << "]";
  return os.str();
}

int cmd_check(const Globals& g, const std::string& xf, const std::string& yf, int budget, const std::string& z_out) {
  g.tol.validate();
  const Element x = read_element(xf), y = read_element(yf);
  require_same_structure(x, y);
  const CrossCheck cc = cross_check(x, y, g.tol);
  const bool sampled = strong_bj_sampled(x, y, g.tol, budget, g.seed);
  const bool plain = bj(x, y, g.tol);

  int code;
  if (cc.fragile())
    code = kFragile;
  else if (!cc.agree() || (cc.criterion.value && !sampled))
    code = kDisagree;
  else
    code = cc.criterion.value ? kYes : kNo;

  if (!z_out.empty() && cc.distance.violating_z) write_element(z_out, *cc.distance.violating_z);

  json doc = {{"orthogonal", cc.agree() ? json(cc.criterion.value) : json(nullptr)},
              {"criterion", verdict_json(cc.criterion)},
              {"norm_formula", verdict_json(cc.formula)},
              {"distance", verdict_json(cc.distance)},
              {"sampled", {{"value", sampled}, {"budget", budget}}},
              {"bj", plain},
              {"exit", code}};
  std::ostringstream os;
  auto line = [&](const char* name, const OrthoVerdict& v) {
    os << name << (v.value ? "orthogonal" : "not orthogonal") << "  (margin " << v.margin << ", threshold "
       << v.threshold << (v.fragile ? ", fragile" : "") << ")\n";
  };
  line("criterion     ", cc.criterion);
  line("norm formula  ", cc.formula);
  line("distance      ", cc.distance);
  os << "sampled       " << (sampled ? "no refutation" : "refuted") << "  (budget " << budget << ")\n";
  os << "plain bj      " << (plain ? "orthogonal" : "not orthogonal") << "\n";
  if (cc.criterion.witness)
    os << "witness zeta  " << vector_text(cc.criterion.witness->right) << " (block " << cc.criterion.witness->block
       << ")\n";
  if (cc.distance.violating_z)
    os << "violating z   " << element_to_json(*cc.distance.violating_z).dump() << "  ||x+yz|| = "
       << cc.distance.attained << " < ||x|| = " << x.norm() << "\n";
  emit(g, doc, os.str());
  return code;
}

int cmd_classify(const Globals& g, const std::string& xf) {
  g.tol.validate();
  const Element x = read_element(xf);
  json doc;
  std::ostringstream os;
  const SpectralData d = decompose(x, g.tol);
  doc["norm"] = d.norm;
  doc["rank"] = d.rank;
  doc["top_multiplicity"] = d.top_mult;
  doc["block_support"] = block_support(x, g.tol);
  doc["right_symmetric"] = is_right_symmetric(x, g.tol);
  if (x.is_zero()) {
    doc["zero"] = true;
  } else {
    doc["zero"] = false;
    doc["left_symmetric"] = is_left_symmetric(x, g.tol);
    doc["coisometry"] = is_coisometry(x, g.tol);
    doc["scaled_projection"] = is_scaled_projection(x, g.tol);
    if (doc["coisometry"].get<bool>()) doc["noninvertible_shift"] = complex_to_json(unimodular_noninvertible_shift(x, g.tol));
    const RankChain chain = rank_via_chain(x, g.tol);
    json ranks = json::array();
    for (const Element& a : chain.chain) ranks.push_back(decompose(a, g.tol).rank);
    doc["chain_ranks"] = ranks;
    if (auto w = mutual_edge_witness(x, g.tol)) doc["mutual_edge_witness"] = element_to_json(*w);
  }
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "mutual_edge_witness") os << it.key() << ": " << it.value().dump() << "\n";
  emit(g, doc, os.str());
  return kYes;
}

std::vector<Element> sample_elements(const BlockStructure& st, int count, Rng& rng) {
  std::vector<Element> out;
  for (int i = 0; i < count; ++i) {
    switch (i % 4) {
      case 0: out.push_back(random_mixed_element(st, rng)); break;
      case 1: out.push_back(random_rank_one(st, rng)); break;
      case 2: out.push_back(orthogonal_partner_right(out.back(), rng)); break;
      default: out.push_back(random_projection(st, uniform_int(rng, 1, st.ambient_dim()), rng)); break;
    }
  }
  return out;
}

int cmd_graph(const Globals& g, const std::string& structure, int sample, const std::string& mode,
              const std::vector<std::string>& files, bool no_inject, const std::string& out, CLI::Option* json_opt,
              const std::string& json_path) {
  g.tol.validate();
  std::vector<Element> elements;
  for (const auto& f : files) elements.push_back(read_element(f));
  if (elements.empty()) {
    if (structure.empty()) throw Error(ErrorKind::Parse, "graph needs --structure or --elements");
    Rng rng(g.seed);
    elements = sample_elements(BlockStructure::parse(structure), sample, rng);
  }
  OrthoGraph graph = build(elements, parse_graph_mode(mode), g.tol, !no_inject);
  graph.seed = g.seed;
  const std::string dot = export_dot(graph);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error(ErrorKind::Parse, "cannot write " + out);
    f << dot;
  }
  const json doc = graph_to_json(graph);
  const bool want_json = g.json || json_opt->count() > 0;
  if (want_json && !json_path.empty()) {
    write_json(json_path, doc);
  } else if (want_json) {
    std::cout << doc.dump(2) << '\n';
    return kYes;
  }
  if (out.empty()) std::cout << dot;
  if (graph.mode == GraphMode::Mutual) {
    std::cerr << "vertices " << graph.vertices.size() << ", edges " << graph.edges.size() << ", isolated "
              << isolated_vertices(graph).size() << ", injected " << graph.injected << "\n";
  }
  return kYes;
}

int cmd_verify(const Globals& g, const std::string& spec_file, const std::string& structure, int budget,
               const std::string& cex_dir) {
  g.tol.validate();
  const PreserverSpec spec = spec_from_json(read_json(spec_file));
  const BlockStructure st = BlockStructure::parse(structure);
  const VerifyReport r = verify(spec, st, g.seed, budget, g.tol);
  if (!cex_dir.empty()) {
    std::filesystem::create_directories(cex_dir);
    int k = 0;
    for (const auto* list : {&r.forward_failures, &r.backward_failures})
      for (const Counterexample& c : *list) {
        const std::string stem = cex_dir + "/cex" + std::to_string(k++) + "_" + c.direction;
        write_element(stem + "_x.json", c.x);
        write_element(stem + "_y.json", c.y);
      }
  }
  std::ostringstream os;
  os << "map " << r.map_name << " on " << st.to_string() << ": " << to_string(r.verdict) << "\n"
     << "pairs tested " << r.pairs_tested << ", fragile " << r.fragile_pairs << " (" << r.fragile_disagreements
     << " disagreeing)\n"
     << "counterexamples: forward " << r.forward_failures.size() << ", backward " << r.backward_failures.size()
     << "\n";
  if (!r.forward_failures.empty()) {
    const Counterexample& c = r.forward_failures.front();
    os << "first: x = " << element_to_json(c.x).dump() << "\n       y = " << element_to_json(c.y).dump() << "\n"
       << "       x _|_s y is " << (c.before ? "true" : "false") << ", image pair is " << (c.after ? "true" : "false")
       << "\n";
  }
  emit(g, verify_report_to_json(r), os.str());
  switch (r.verdict) {
    case Verdict::Pass: return kYes;
    case Verdict::Fail: return kNo;
    case Verdict::Fragile: return kFragile;
  }
  return kDisagree;
}

int cmd_recover(const Globals& g, const std::string& map_file) {
  g.tol.validate();
  const auto [st, m] = linear_map_from_json(read_json(map_file));
  try {
    const SandwichRecovery r = recover_sandwich(m, st, g.seed, g.tol);
    json doc = {{"alpha", complex_to_json(r.alpha)}, {"perm", r.perm},         {"u", element_to_json(r.u)},
                {"v", element_to_json(r.v)},         {"residual", r.residual}, {"kappa", r.kappa},
                {"kappa_spread", r.kappa_spread}};
    std::ostringstream os;
    os << "sandwich recovered: alpha = " << r.alpha << ", residual " << r.residual << ", kappa " << r.kappa << "\n"
       << "perm " << json(r.perm).dump() << "\nU " << element_to_json(r.u).dump() << "\nV "
       << element_to_json(r.v).dump() << "\n";
    emit(g, doc, os.str());
    return kYes;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::KappaNotConstant:
      case ErrorKind::RecoveryInconsistent:
      case ErrorKind::NotSingletonSupport:
      case ErrorKind::NotInjective:
      case ErrorKind::DimensionMismatch: {
        json doc = {{"refuted", to_string(e.kind())}, {"message", e.what()}};
        emit(g, doc, std::string("not a sandwich: ") + to_string(e.kind()) + ": " + e.what() + "\n");
        return kNo;
      }
      default: throw;
    }
  }
}

int cmd_wild(const Globals& g, const std::string& xf, const std::string& out, double delta, double floor) {
  g.tol.validate();
  const Element x = read_element(xf);
  const PreserverSpec spec{Wild{g.seed, {delta, floor}}};
  check_spec(spec, x.structure());
  const Element y = apply(spec, x);
  if (!out.empty()) write_element(out, y);
  if (out.empty() || g.json) std::cout << element_to_json(y).dump(g.json ? 2 : -1) << '\n';
  return kYes;
}

int cmd_rand(const Globals& g, const std::string& structure, const std::string& kind, int rank,
             const std::string& out) {
  const BlockStructure st = BlockStructure::parse(structure);
  Rng rng(g.seed);
  Element e;
  if (kind == "element")
    e = random_element(st, rng);
  else if (kind == "unitary")
    e = haar_unitary(st, rng);
  else if (kind == "rank1")
    e = random_element(st, rng, 1);
  else if (kind == "rank")
    e = random_rank_element(st, rank, rng);
  else if (kind == "projection")
    e = random_projection(st, rank, rng);
  else if (kind == "coisometry")
    e = random_coisometry(st, rng);
  else if (kind == "singular")
    e = random_singular_element(st, rng);
  else if (kind == "positive")
    e = planted_positive(st, rank, rng);
  else
    throw Error(ErrorKind::Parse, "unknown kind '" + kind + "'");
  if (out.empty())
    std::cout << element_to_json(e).dump() << '\n';
  else
    write_element(out, e);
  return kYes;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_suite(const Globals& g, const std::string& criteria, const std::string& summary) {
  SuiteOptions opts;
  opts.seed = g.seed;
  opts.tol = g.tol;
  opts.only = split_csv(criteria);
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_suite(opts, g.json ? nullptr : &std::cout);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool all = !results.empty();
  json doc = {{"seed", g.seed}, {"tolerances", tolerances_to_json(g.tol)}, {"criteria", json::array()}};
  for (const auto& r : results) {
    all = all && r.pass;
    json counts = json::object();
    for (const auto& [k, v] : r.counts) counts[k] = v;
    doc["criteria"].push_back({{"id", r.id},
                               {"group", r.group},
                               {"title", r.title},
                               {"result", r.pass ? "pass" : "fail"},
                               {"detail", r.detail},
                               {"counts", counts},
                               {"seconds", r.seconds}});
  }
  doc["all_pass"] = all;
  doc["seconds"] = total;
  if (!summary.empty()) write_json(summary, doc);
  if (g.json) std::cout << doc.dump(2) << '\n';
  else
    std::cout << (all ? "suite PASS" : "suite FAIL") << " (" << results.size() << " criteria, " << total << " s)\n";
  return all ? kYes : kNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong Birkhoff-James orthogonality on block-diagonal matrix algebras", "sbjo"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--tol-rank", g.tol.eps_rank, "relative singular value cutoff");
  app.add_option("--tol-norm", g.tol.eps_norm, "relative norm-equality tolerance");
  app.add_option("--tol-frame", g.tol.eps_frame, "subspace inclusion tolerance");
  app.add_flag("--json", g.json, "machine-readable output");

  int code = kUsage;
  std::function<int()> action;

  auto* check = app.add_subcommand("check", "decide x _|_s y with every method");
  std::string xf, yf, z_out;
  int budget = 1000;
  check->add_option("--x", xf, "element file")->required();
  check->add_option("--y", yf, "element file")->required();
  check->add_option("--budget", budget, "random z samples for the sampled refuter");
  check->add_option("--z-out", z_out, "write the violating z here");
  check->callback([&] { action = [&] { return cmd_check(g, xf, yf, budget, z_out); }; });

  auto* classify = app.add_subcommand("classify", "structural report for one element");
  classify->add_option("--x", xf, "element file")->required();
  classify->callback([&] { action = [&] { return cmd_classify(g, xf); }; });

  auto* graph = app.add_subcommand("graph", "sampled ortho-graph as DOT");
  std::string structure, mode = "mutual", out, graph_json;
  int sample = 24;
  bool no_inject = false;
  std::vector<std::string> files;
  graph->add_option("--structure", structure, "block dims, e.g. 2,2");
  graph->add_option("--sample", sample, "number of sampled elements");
  graph->add_option("--mode", mode, "mutual | directed | reduced");
  graph->add_option("--elements", files, "element files instead of sampling");
  graph->add_flag("--no-inject", no_inject, "skip mutual-edge witness injection");
  graph->add_option("--out", out, "DOT output file");
  CLI::Option* json_opt = graph->add_option("--json", graph_json, "JSON output file")->expected(0, 1);
  graph->callback([&] {
    action = [&] { return cmd_graph(g, structure, sample, mode, files, no_inject, out, json_opt, graph_json); };
  });

  auto* pres = app.add_subcommand("preserver", "preserver tools");
  pres->require_subcommand(1);
  auto* pverify = pres->add_subcommand("verify", "sample a map for strong-BJ preservation");
  std::string spec_file, cex_dir;
  int vbudget = 1000;
  pverify->add_option("--spec", spec_file, "spec file")->required();
  pverify->add_option("--structure", structure, "block dims")->required();
  pverify->add_option("--budget", vbudget, "pairs to sample");
  pverify->add_option("--counterexamples", cex_dir, "directory for counterexample element files");
  pverify->callback([&] { action = [&] { return cmd_verify(g, spec_file, structure, vbudget, cex_dir); }; });

  auto* precover = pres->add_subcommand("recover", "recover alpha U (pi X) V* from a linear map");
  std::string map_file;
  precover->add_option("--map", map_file, "linear map file")->required();
  precover->callback([&] { action = [&] { return cmd_recover(g, map_file); }; });

  auto* pwild = pres->add_subcommand("wild", "apply a seeded wild map to one element");
  double delta = 0.05, floor = 0.05;
  pwild->add_option("--x", xf, "element file")->required();
  pwild->add_option("--out", out, "output element file");
  pwild->add_option("--delta", delta, "gap below the top singular value");
  pwild->add_option("--floor", floor, "lower bound for new singular values, relative");
  pwild->callback([&] { action = [&] { return cmd_wild(g, xf, out, delta, floor); }; });

  auto* rand = app.add_subcommand("rand", "write a seeded random element");
  std::string kind = "element";
  int rank = 1;
  rand->add_option("--structure", structure, "block dims")->required();
  rand->add_option("--kind", kind, "element | unitary | rank1 | rank | projection | coisometry | singular | positive");
  rand->add_option("--rank", rank, "rank (rank, projection) or top dimension (positive)");
  rand->add_option("--out", out, "output file (stdout if absent)");
  rand->callback([&] { action = [&] { return cmd_rand(g, structure, kind, rank, out); }; });

  auto* suite = app.add_subcommand("suite", "run the acceptance suite");
  std::string criteria, summary;
  suite->add_option("--criteria", criteria, "comma-separated groups or numbers");
  suite->add_option("--summary", summary, "JSON summary file");
  suite->callback([&] { action = [&] { return cmd_suite(g, criteria, summary); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    code = action();
  } catch (const Error& e) {
    std::cerr << "sbjo: " << to_string(e.kind()) << ": " << e.what() << "\n";
    code = e.kind() == ErrorKind::Internal ? kDisagree : kUsage;
  } catch (const json::exception& e) {
    std::cerr << "sbjo: malformed input: " << e.what() << "\n";
    code = kUsage;
  } catch (const std::exception& e) {
    std::cerr << "sbjo: " << e.what() << "\n";
    code = kUsage;
  }
  return code;
}
