#ifndef SBJO_STRUCTURE_HPP
#define SBJO_STRUCTURE_HPP

// Classifiers and witness constructors for symmetry, R/L-set inclusions,
// rank chains, block supports and R-chains.

#include "sbjo/algebra.hpp"

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace sbjo {

/// Every block of x x* is positive definite.  False for x = 0.
bool is_right_symmetric(const Element& x, const ToleranceConfig& tol = {});

/// For x with some ker x_k* != 0, the projection E_xi onto a unit xi of that kernel;
/// x and E_xi are then mutually strongly orthogonal.  None when x is right-symmetric.
std::optional<Element> mutual_edge_witness(const Element& x, const ToleranceConfig& tol = {});

bool is_coisometry(const Element& x, const ToleranceConfig& tol = {});

/// Eigenvalue lambda of u/||u|| with smallest argument in [0, 2 pi); u/||u|| - lambda is singular.
Complex unimodular_noninvertible_shift(const Element& u, const ToleranceConfig& tol = {});

/// |a*|/||a|| is a rank-one projection inside a single block.
bool is_left_symmetric(const Element& a, const ToleranceConfig& tol = {});

struct InclusionReport {
  bool holds = false;
  std::optional<Element> witness;
  bool witness_unavailable = false;
  double residual = 0.0;  // frame residual behind the decision
};

/// R^s_A subset R^s_B  <=>  M_{|A*|} subset M_{|B*|}.  Failure witness C = I - E_xi.
InclusionReport r_leq(const Element& a, const Element& b, const ToleranceConfig& tol = {});
/// L^s_A subset L^s_B  <=>  ker |A*| subset ker |B*|.  Failure witness C = E_xi.
InclusionReport l_leq(const Element& a, const Element& b, const ToleranceConfig& tol = {});

/// || |A*|^2/||A|| - |A*| || <= eps_norm ||A||.
bool is_scaled_projection(const Element& a, const ToleranceConfig& tol = {});

struct RankChain {
  int rank = 0;
  std::vector<Element> chain;  // A_0 = A, A_k = sum_{j <= n-k} E_j
};

/// Rank through a strictly increasing chain of L-sets; throws ChainInconsistent
/// when a link fails to be strict.
RankChain rank_via_chain(const Element& a, const ToleranceConfig& tol = {});

/// Support of a: blocks whose norm exceeds eps_rank ||a||.
std::vector<int> block_support(const Element& a, const ToleranceConfig& tol = {});

struct SharedBlock {
  bool shares = false;
  std::optional<Element> witness;  // rank-one C with C not _|_s A and C not _|_s B
};

SharedBlock shares_block(const Element& a, const Element& b, const ToleranceConfig& tol = {});

struct RChain {
  Element base;                // x / ||x||
  std::vector<Element> parts;  // x_j, rank-one top spectral projections
  std::vector<Element> links;  // y_k = x_1 + ... + x_k
};

/// Chain y_1, ..., y_n with R_{y_1} < ... < R_{y_n} <= R_x for positive x whose top
/// eigenvalue has multiplicity >= n.  Throws EigenspaceTooSmall or ChainInconsistent.
RChain r_chain(const Element& x, int n, const ToleranceConfig& tol = {});

}  // namespace sbjo

#endif
