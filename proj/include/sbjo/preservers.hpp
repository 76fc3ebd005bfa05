#ifndef SBJO_PRESERVERS_HPP
#define SBJO_PRESERVERS_HPP

// Strong-BJ isomorphism families (sandwiches, block permutations, conjugation,
// wild per-element maps, dimension-2 line maps), a sampling verifier for
// arbitrary candidate maps, and the classification routines that read a
// block permutation or a sandwich back out of a map.

#include "sbjo/algebra.hpp"
#include "sbjo/orthogonality.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sbjo {

struct PreserverSpec;

/// X -> alpha U X V*
struct Sandwich {
  Element u;
  Element v;
  Complex alpha{1.0, 0.0};
};

/// Block lambda of the input becomes block perm[lambda] of the output.
struct BlockPermutation {
  std::vector<int> perm;
};

/// Entrywise complex conjugation in the standard basis.
struct Conjugation {};

struct TauPolicy {
  double delta = 0.05;  // lower singular values land below (1 - delta) sigma_1
  double floor = 0.05;  // ... and above floor * sigma_1
};

struct Wild {
  std::uint64_t seed = 0;
  TauPolicy policy;
};

/// Line table for 2x2 blocks; every line comes with its orthocomplement.
/// Lines missing from the table are fixed.
struct Dim2Induced {
  std::vector<std::pair<Vector, Vector>> lines;  // unit 2-vectors, (from, to)
};

struct Table {
  std::vector<std::pair<Element, Element>> pairs;
};

struct Composite {
  std::vector<PreserverSpec> parts;  // applied left to right
};

struct PreserverSpec {
  std::variant<Sandwich, BlockPermutation, Conjugation, Wild, Dim2Induced, Table, Composite> kind;
};

const char* spec_name(const PreserverSpec& spec);

/// Throws InvalidSpec when the spec cannot act on `structure`.
void check_spec(const PreserverSpec& spec, const BlockStructure& structure);

Element apply(const PreserverSpec& spec, const Element& a);
std::optional<PreserverSpec> inverse(const PreserverSpec& spec);

PreserverSpec make_sandwich(const Element& u, const Element& v, Complex alpha);
PreserverSpec random_sandwich(const BlockStructure& structure, Rng& rng);
/// Random dimension-respecting block permutation.
PreserverSpec random_block_permutation(const BlockStructure& structure, Rng& rng);
/// Table on `count` random line pairs {L, L-perp} permuted among themselves.
PreserverSpec random_dim2_induced(int count, Rng& rng);
Dim2Induced close_lines(const std::vector<std::pair<Vector, Vector>>& lines);

/// gamma U P A V* with a random choice of gamma, U, V, tau derived from
/// (seed, A).  Output keeps m_left and ker_left of A.  wild(0) = 0.
Element wild(const Element& a, std::uint64_t seed, const TauPolicy& policy = {}, const ToleranceConfig& tol = {});

/// Same construction with explicit choices; `lower` lists the new values of the
/// nonzero singular values below the top cluster, in singular_triplets order.
Element wild_with(const Element& a, const std::vector<double>& lower, const Element& u, const Element& v,
                  Complex gamma, const ToleranceConfig& tol = {});

/// A map under test.  Closed-form specs, tables, callables and linear maps all
/// reduce to this.
struct CandidateMap {
  std::string name;
  std::function<Element(const Element&)> fn;
  std::function<Element(const Element&)> inverse;  // empty when unknown
  bool block_respecting = false;
  std::optional<std::vector<Element>> domain;  // finite domain (tables)
  std::vector<Element> extra_samples;          // always exercised
};

CandidateMap candidate(const PreserverSpec& spec, const BlockStructure& structure);

struct Counterexample {
  Element x;
  Element y;
  std::string direction;  // forward | backward | restriction
  bool before = false;    // strong_bj on the inputs
  bool after = false;     // strong_bj on the images
  double margin_before = 0.0;
  double margin_after = 0.0;
};

struct VerifyCoverage {
  int random = 0;
  int engineered = 0;
  int rank_one = 0;
  int projection = 0;
  int extra = 0;
  int restriction = 0;
  int backward = 0;
  int orthogonal = 0;      // pairs with x _|_s y
  int non_orthogonal = 0;  // pairs without
};

enum class Verdict { Pass, Fail, Fragile };
const char* to_string(Verdict v);

struct VerifyReport {
  std::string map_name;
  int pairs_tested = 0;
  int fragile_pairs = 0;
  int fragile_disagreements = 0;
  std::vector<Counterexample> forward_failures;
  std::vector<Counterexample> backward_failures;
  VerifyCoverage coverage;
  Verdict verdict = Verdict::Pass;
};

VerifyReport verify(const CandidateMap& map, const BlockStructure& structure, std::uint64_t seed, int budget,
                    const ToleranceConfig& tol = {});
VerifyReport verify(const PreserverSpec& spec, const BlockStructure& structure, std::uint64_t seed, int budget,
                    const ToleranceConfig& tol = {});

struct PropertyPReport {
  int samples = 0;
  std::vector<Element> violations;
  bool pass() const { return violations.empty(); }
};

/// m_left and ker_left of map(A) equal those of A on `samples` elements.
PropertyPReport property_p_check(const std::function<Element(const Element&)>& map, const BlockStructure& structure,
                                 std::uint64_t seed, int samples, const ToleranceConfig& tol = {});

/// Reads the block permutation of a bijective preserver from the supports of
/// images of rank-one projections.  Throws NotSingletonSupport, NotInjective,
/// DimensionMismatch.
std::vector<int> extract_block_permutation(const std::function<Element(const Element&)>& map,
                                           const BlockStructure& structure, std::uint64_t seed,
                                           const ToleranceConfig& tol = {});

/// Coordinates: blocks in order, each block row-major.
Vector to_coordinates(const Element& a);
Element from_coordinates(const BlockStructure& structure, const Vector& c);
/// Matrix of a (presumed linear) map in those coordinates.
Matrix linearize(const std::function<Element(const Element&)>& map, const BlockStructure& structure);
std::function<Element(const Element&)> linear_map(const Matrix& m, const BlockStructure& structure);

struct SandwichRecovery {
  Complex alpha;
  std::vector<int> perm;
  Element u;
  Element v;
  double residual = 0.0;
  double kappa = 0.0;
  double kappa_spread = 0.0;  // (max - min) / max over the rank-one probes
};

/// Recovers X -> alpha U (pi X) V* from a linear map.  Throws KappaNotConstant
/// or RecoveryInconsistent when the map is not of that form.
SandwichRecovery recover_sandwich(const Matrix& linear, const BlockStructure& structure, std::uint64_t seed = 0,
                                  const ToleranceConfig& tol = {});

/// alpha U (pi X) V*
Element apply_recovered(const SandwichRecovery& r, const Element& x);

}  // namespace sbjo

#endif
