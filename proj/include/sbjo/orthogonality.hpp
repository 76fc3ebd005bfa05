#ifndef SBJO_ORTHOGONALITY_HPP
#define SBJO_ORTHOGONALITY_HPP

// Deciders for strong Birkhoff-James orthogonality x _|_s y, i.e.
// ||x + y z|| >= ||x|| for every z in the algebra, plus plain BJ orthogonality.
//
// Four routes that must agree:
//   strong_bj              norm-attaining criterion: some unit xi in a block with
//                          xi in M_{|x*|} and y* xi = 0
//   strong_bj_norm_formula || ||y||^2 x - y y* x || == ||x|| ||y||^2
//   strong_bj_distance     dist(x, yA) = ||(I - P_{R(y)}) x|| == ||x||
//   strong_bj_sampled      one-sided search for z with ||x + y z|| < ||x||

#include "sbjo/algebra.hpp"

#include <cstdint>
#include <optional>

namespace sbjo {

enum class Method { Criterion, NormFormula, Distance, Sampled, RankOne, Plain };

const char* to_string(Method method);

struct OrthoWitness {
  int block = kMixedBlock;
  Vector left;   // xi = x zeta / ||x||, a unit vector of M_{|x*|} with y* xi = 0
  Vector right;  // zeta, a unit vector of M_x
};

struct OrthoVerdict {
  bool value = false;
  Method method = Method::Criterion;
  /// The decisive quantity: 0 for an exact "orthogonal", positive otherwise.
  /// Criterion: smallest principal sine; NormFormula / Distance: relative norm deficit.
  double margin = 0.0;
  /// Threshold the margin is compared with.
  double threshold = 0.0;
  bool fragile = false;
  std::optional<OrthoWitness> witness;
  std::optional<Element> violating_z;
  double attained = 0.0;  // ||x + y z|| for violating_z
};

/// Margins within a decade of the threshold on either side are fragile.
bool is_fragile_margin(double margin, double threshold);

OrthoVerdict strong_bj(const Element& x, const Element& y, const ToleranceConfig& tol = {});
OrthoVerdict strong_bj(const SpectralData& x, const SpectralData& y, const ToleranceConfig& tol = {});

OrthoVerdict strong_bj_norm_formula(const Element& x, const Element& y, const ToleranceConfig& tol = {});

OrthoVerdict strong_bj_distance(const Element& x, const Element& y, const ToleranceConfig& tol = {});
OrthoVerdict strong_bj_distance(const Element& x, const SpectralData& y, const ToleranceConfig& tol = {});

/// Refutation search over `budget` random z plus the analytic candidates
/// z = -y^+ x and z = -t y* x on a 16-point log grid.  Never certifies.
bool strong_bj_sampled(const Element& x, const Element& y, const ToleranceConfig& tol, int budget,
                       std::uint64_t seed = 0);

/// Plain BJ orthogonality: min over complex t of ||x + t y|| >= ||x||.
bool bj(const Element& x, const Element& y, const ToleranceConfig& tol = {});
/// The minimum of t -> ||x + t y|| found by bj().
double bj_minimum(const Element& x, const Element& y);

/// Rank-one fast path: || |b*| |a*| || <= eps_norm ||a|| ||b||.  Throws NotRankOne.
bool strong_bj_rank_one(const Element& a, const Element& b, const ToleranceConfig& tol = {});

/// Result of running the three exact deciders on one pair.
struct CrossCheck {
  OrthoVerdict criterion;
  OrthoVerdict formula;
  OrthoVerdict distance;
  bool agree() const { return criterion.value == formula.value && formula.value == distance.value; }
  bool fragile() const { return criterion.fragile || formula.fragile || distance.fragile; }
};

CrossCheck cross_check(const Element& x, const Element& y, const ToleranceConfig& tol = {});

}  // namespace sbjo

#endif
