#include "sbjo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbjo {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Complex random_phase(Rng& rng) { return std::polar(1.0, uniform_real(rng, 0.0, 2.0 * std::numbers::pi)); }

Complex random_scalar(Rng& rng, double lo, double hi) { return uniform_real(rng, lo, hi) * random_phase(rng); }

BlockStructure random_structure(Rng& rng, int max_blocks, int max_dim) {
  const int m = uniform_int(rng, 1, max_blocks);
  std::vector<int> dims;
  for (int k = 0; k < m; ++k) dims.push_back(uniform_int(rng, 1, max_dim));
  return BlockStructure(std::move(dims));
}

Vector random_block_vector(const BlockStructure& structure, int block, Rng& rng) {
  return embed(structure, block, complex_gaussian_vector(rng, structure.dim(block)).normalized());
}

namespace {

int random_block_weighted(const BlockStructure& structure, Rng& rng) {
  const int i = uniform_int(rng, 0, structure.ambient_dim() - 1);
  return structure.block_of(i);
}

// Random assignment of `count` slots to blocks respecting block dimensions.
std::vector<int> block_slots(const BlockStructure& structure, int count, Rng& rng) {
  std::vector<int> slots;
  for (int k = 0; k < structure.num_blocks(); ++k)
    for (int i = 0; i < structure.dim(k); ++i) slots.push_back(k);
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(count);
  return slots;
}

// Per block W diag(s) Z* where s lists the singular values assigned to that block.
Element from_block_spectra(const BlockStructure& structure, const std::vector<std::vector<double>>& spectra,
                           bool positive, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int k = 0; k < structure.num_blocks(); ++k) {
    const int n = structure.dim(k);
    RealVector s = RealVector::Zero(n);
    for (std::size_t i = 0; i < spectra[k].size(); ++i) s(static_cast<Eigen::Index>(i)) = spectra[k][i];
    Matrix w = haar_unitary_matrix(rng, n);
    Matrix z = positive ? w : haar_unitary_matrix(rng, n);
    blocks.push_back(w * s.cast<Complex>().asDiagonal() * z.adjoint());
  }
  return Element(structure, std::move(blocks));
}

}  // namespace

Vector random_unit_vector(const BlockStructure& structure, Rng& rng) {
  return random_block_vector(structure, random_block_weighted(structure, rng), rng);
}

Element random_rank_one(const BlockStructure& structure, Rng& rng) {
  const int k = random_block_weighted(structure, rng);
  Vector xi = random_block_vector(structure, k, rng);
  Vector zeta = random_block_vector(structure, k, rng);
  return Complex(uniform_real(rng, 0.5, 2.0)) * outer(structure, xi, zeta);
}

Element random_coisometry(const BlockStructure& structure, Rng& rng) {
  Element u = haar_unitary(structure, rng);
  return random_scalar(rng) * u;
}

Element random_projection(const BlockStructure& structure, int rank, Rng& rng) {
  if (rank < 0 || rank > structure.ambient_dim()) throw Error(ErrorKind::RankTooLarge, "projection rank too large");
  std::vector<std::vector<double>> spectra(structure.num_blocks());
  for (int k : block_slots(structure, rank, rng)) spectra[k].push_back(1.0);
  return from_block_spectra(structure, spectra, true, rng);
}

Element random_rank_element(const BlockStructure& structure, int rank, Rng& rng) {
  if (rank < 0 || rank > structure.ambient_dim()) throw Error(ErrorKind::RankTooLarge, "rank too large");
  std::vector<std::vector<double>> spectra(structure.num_blocks());
  for (int k : block_slots(structure, rank, rng)) spectra[k].push_back(uniform_real(rng, 0.2, 3.0));
  for (auto& s : spectra) std::sort(s.rbegin(), s.rend());
  return from_block_spectra(structure, spectra, false, rng);
}

namespace {

Element planted(const BlockStructure& structure, int top_dim, int extra_rank, bool positive, Rng& rng) {
  if (top_dim < 1 || top_dim + extra_rank > structure.ambient_dim())
    throw Error(ErrorKind::RankTooLarge, "planted spectrum does not fit the structure");
  std::vector<std::vector<double>> spectra(structure.num_blocks());
  const std::vector<int> slots = block_slots(structure, top_dim + extra_rank, rng);
  for (int t = 0; t < top_dim + extra_rank; ++t)
    spectra[slots[t]].push_back(t < top_dim ? 1.0 : uniform_real(rng, 0.1, 0.9));
  for (auto& s : spectra) std::sort(s.rbegin(), s.rend());
  return from_block_spectra(structure, spectra, positive, rng);
}

}  // namespace

Element planted_top(const BlockStructure& structure, int top_dim, int extra_rank, Rng& rng) {
  return planted(structure, top_dim, extra_rank, false, rng);
}

Element planted_positive(const BlockStructure& structure, int top_dim, Rng& rng) {
  return planted(structure, top_dim, structure.ambient_dim() - top_dim, true, rng);
}

Element random_singular_element(const BlockStructure& structure, Rng& rng) {
  const int bad = uniform_int(rng, 0, structure.num_blocks() - 1);
  std::vector<Matrix> blocks;
  for (int k = 0; k < structure.num_blocks(); ++k) {
    const int n = structure.dim(k);
    if (k != bad) {
      blocks.push_back(complex_gaussian(rng, n, n));
      continue;
    }
    const int r = uniform_int(rng, 0, n - 1);
    Matrix b = Matrix::Zero(n, n);
    for (int t = 0; t < r; ++t) b += complex_gaussian_vector(rng, n) * complex_gaussian_vector(rng, n).adjoint();
    blocks.push_back(b);
  }
  Element out(structure, std::move(blocks));
  if (out.is_zero()) return random_rank_one(structure, rng);
  return out;
}

Element random_mixed_element(const BlockStructure& structure, Rng& rng) {
  const int n = structure.ambient_dim();
  switch (uniform_int(rng, 0, 6)) {
    case 0: return random_element(structure, rng);
    case 1: return random_element(structure, rng, uniform_int(rng, 1, n));
    case 2: return random_rank_one(structure, rng);
    case 3: return random_coisometry(structure, rng);
    case 4: return random_scalar(rng) * random_projection(structure, uniform_int(rng, 1, n), rng);
    case 5: {
      const int top = uniform_int(rng, 1, n);
      return random_scalar(rng) * planted_top(structure, top, uniform_int(rng, 0, n - top), rng);
    }
    default: return random_singular_element(structure, rng);
  }
}

Element orthogonal_partner_right(const Element& x, Rng& rng) {
  const BlockStructure& st = x.structure();
  const SpectralData d = decompose(x);
  if (d.norm == 0.0) return random_mixed_element(st, rng);
  // Random unit vector of m_left(x) inside one block.
  const int pick = uniform_int(rng, 0, d.m_left.dim() - 1);
  const int block = d.m_left.tags[pick];
  Matrix local = d.m_left.block_columns(block);
  const Vector xi = (local * complex_gaussian_vector(rng, static_cast<int>(local.cols()))).normalized();
  // projector onto the complement of xi from an orthonormal basis, so a 1x1
  // block gives an exact zero instead of 1 - |xi|^2 roundoff
  const Matrix q = Eigen::HouseholderQR<Matrix>(xi).householderQ();
  const Matrix c = q.rightCols(q.cols() - 1);
  std::vector<Matrix> kb = Element::identity(st).blocks();
  kb[block] = c * c.adjoint();
  const Element kill(st, std::move(kb));
  Element r = random_mixed_element(st, rng);
  Element y = kill * r;
  if (y.is_zero() || y.norm() < 1e-6) y = kill;
  return y;
}

std::optional<Element> orthogonal_partner_left(const Element& x, Rng& rng) {
  const BlockStructure& st = x.structure();
  const SpectralData d = decompose(x);
  if (d.ker_left.empty()) return std::nullopt;
  const int pick = uniform_int(rng, 0, d.ker_left.dim() - 1);
  const int block = d.ker_left.tags[pick];
  Matrix local = d.ker_left.block_columns(block);
  Vector xi = embed(st, block, (local * complex_gaussian_vector(rng, static_cast<int>(local.cols()))).normalized());
  Vector zeta = random_block_vector(st, block, rng);
  Element top = Complex(2.0) * outer(st, xi, zeta);
  if (uniform_int(rng, 0, 1) == 0) return random_scalar(rng) * top;
  Element id = Element::identity(st);
  Element w = random_element(st, rng);
  Element rest = (id - rank_one_projection(st, xi)) * w * (id - rank_one_projection(st, zeta));
  const double rn = rest.norm();
  if (rn > 0.0) rest = Complex(uniform_real(rng, 0.1, 1.0) / rn) * rest;
  return random_scalar(rng) * (top + rest);
}

std::pair<Element, Element> engineered_orthogonal_pair(const BlockStructure& structure, Rng& rng) {
  Element x = random_mixed_element(structure, rng);
  Element y = orthogonal_partner_right(x, rng);
  return {x, y};
}

}  // namespace sbjo
