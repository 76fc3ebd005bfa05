#ifndef SBJO_SAMPLING_HPP
#define SBJO_SAMPLING_HPP

// Seeded generators for structured test inputs: planted ranks, planted
// top multiplicities, engineered orthogonal pairs.

#include "sbjo/algebra.hpp"

#include <utility>

namespace sbjo {

/// Random structure with 1..max_blocks blocks of size 1..max_dim.
BlockStructure random_structure(Rng& rng, int max_blocks = 4, int max_dim = 8);

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);
Complex random_phase(Rng& rng);
/// Nonzero scalar with modulus in [lo, hi] and uniform phase.
Complex random_scalar(Rng& rng, double lo = 0.5, double hi = 2.0);

/// Unit vector supported in the given block (ambient coordinates).
Vector random_block_vector(const BlockStructure& structure, int block, Rng& rng);
/// Unit vector in a block chosen with probability proportional to its dimension.
Vector random_unit_vector(const BlockStructure& structure, Rng& rng);

/// sigma xi (x) zeta with unit xi, zeta in one random block and sigma in [0.5, 2].
Element random_rank_one(const BlockStructure& structure, Rng& rng);
/// c U with U Haar and c random nonzero.
Element random_coisometry(const BlockStructure& structure, Rng& rng);
/// Orthogonal projection of the given rank built from per-block Haar bases.
Element random_projection(const BlockStructure& structure, int rank, Rng& rng);
/// Element of the given rank whose nonzero singular values are drawn from [0.2, 3].
Element random_rank_element(const BlockStructure& structure, int rank, Rng& rng);
/// Element whose largest singular value 1 has multiplicity exactly top_dim and whose
/// remaining nonzero singular values lie in [0.1, 0.9]; total rank is top_dim + extra_rank.
Element planted_top(const BlockStructure& structure, int top_dim, int extra_rank, Rng& rng);
/// Positive element with eigenvalue 1 of multiplicity top_dim and the rest in [0.1, 0.9].
Element planted_positive(const BlockStructure& structure, int top_dim, Rng& rng);
/// Element with a block missing full rank (not right-symmetric).
Element random_singular_element(const BlockStructure& structure, Rng& rng);

/// Mixed sample: Gaussian, planted ranks, rank-ones, coisometries, projections, planted tops.
Element random_mixed_element(const BlockStructure& structure, Rng& rng);

/// A pair with x strongly BJ orthogonal to y by construction (y* kills a top left vector of x).
std::pair<Element, Element> engineered_orthogonal_pair(const BlockStructure& structure, Rng& rng);
/// Some y with x strongly BJ orthogonal to y, built from a top left vector of x.
Element orthogonal_partner_right(const Element& x, Rng& rng);
/// Some y with y strongly BJ orthogonal to x, when ker x* is nonzero.
std::optional<Element> orthogonal_partner_left(const Element& x, Rng& rng);

}  // namespace sbjo

#endif
