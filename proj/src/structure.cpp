#include "sbjo/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbjo {

namespace {

void require_nonzero(const Element& x, const char* what) {
  if (x.is_zero()) throw Error(ErrorKind::ZeroElement, std::string(what) + " needs a nonzero element");
}

// Within each block, the unit vector of F farthest from span G; returns the worst one overall.
struct FarthestVector {
  double distance = 0.0;
  Vector vector;  // ambient, single block
};

FarthestVector farthest_blockwise(const Frame& f, const Frame& g) {
  FarthestVector out;
  const BlockStructure& st = f.structure;
  for (int k = 0; k < st.num_blocks(); ++k) {
    Matrix fk = f.block_columns(k);
    if (fk.cols() == 0) continue;
    Matrix gk = g.block_columns(k);
    Matrix r = gk.cols() ? Matrix(fk - gk * (gk.adjoint() * fk)) : fk;
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
    const double dist = svd.singularValues()(0);
    if (dist > out.distance) {
      out.distance = dist;
      out.vector = embed(st, k, (fk * svd.matrixV().col(0)).normalized());
    }
  }
  return out;
}

}  // namespace

bool is_right_symmetric(const Element& x, const ToleranceConfig& tol) {
  const double nx = x.norm();
  if (nx == 0.0) return false;
  for (const Matrix& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b);
    const RealVector& s = svd.singularValues();
    if (s(s.size() - 1) <= tol.eps_rank * nx) return false;
  }
  return true;
}

std::optional<Element> mutual_edge_witness(const Element& x, const ToleranceConfig& tol) {
  require_nonzero(x, "mutual_edge_witness");
  const SpectralData d = decompose(x, tol);
  if (d.ker_left.empty()) return std::nullopt;
  return rank_one_projection(x.structure(), d.ker_left.columns.col(0));
}

bool is_coisometry(const Element& x, const ToleranceConfig& tol) {
  require_nonzero(x, "is_coisometry");
  const double n = x.norm();
  const Element gram = x * x.adjoint();
  const Element target = Complex(n * n) * Element::identity(x.structure());
  return (gram - target).norm() <= tol.eps_norm * n * n;
}

Complex unimodular_noninvertible_shift(const Element& u, const ToleranceConfig& tol) {
  require_nonzero(u, "unimodular_noninvertible_shift");
  if (!is_coisometry(u, tol)) throw Error(ErrorKind::NotCoisometry, "element is not a multiple of a coisometry");
  const double n = u.norm();
  Complex best;
  double best_arg = 10.0;
  for (const Matrix& b : u.blocks()) {
    Eigen::ComplexEigenSolver<Matrix> es(b / n, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex lambda = es.eigenvalues()(i);
      double arg = std::arg(lambda);
      if (arg < 0.0) arg += 2.0 * std::numbers::pi;
      if (arg > 2.0 * std::numbers::pi - 1e-12) arg = 0.0;
      if (arg < best_arg - 1e-12) {
        best_arg = arg;
        best = lambda;
      }
    }
  }
  return best;
}

bool is_left_symmetric(const Element& a, const ToleranceConfig& tol) {
  require_nonzero(a, "is_left_symmetric");
  return decompose(a, tol).rank == 1;
}

InclusionReport r_leq(const Element& a, const Element& b, const ToleranceConfig& tol) {
  require_same_structure(a, b);
  require_nonzero(a, "r_leq");
  require_nonzero(b, "r_leq");
  const SpectralData da = decompose(a, tol), db = decompose(b, tol);
  InclusionReport rep;
  rep.residual = frame_residual(da.m_left, db.m_left);
  rep.holds = rep.residual <= tol.eps_frame;
  if (rep.holds) return rep;

  const FarthestVector far = farthest_blockwise(da.m_left, db.m_left);
  if (far.distance <= tol.eps_frame) {
    rep.witness_unavailable = true;
    return rep;
  }
  const BlockStructure& st = a.structure();
  Element c = Element::identity(st) - rank_one_projection(st, far.vector);
  // ||B + C(-B)|| = ||E_xi B|| = ||B* xi|| must drop below ||B||.
  if (!(b.apply_adjoint(far.vector).norm() < b.norm())) {
    rep.witness_unavailable = true;
    return rep;
  }
  rep.witness = std::move(c);
  return rep;
}

InclusionReport l_leq(const Element& a, const Element& b, const ToleranceConfig& tol) {
  require_same_structure(a, b);
  require_nonzero(a, "l_leq");
  require_nonzero(b, "l_leq");
  const SpectralData da = decompose(a, tol), db = decompose(b, tol);
  InclusionReport rep;
  rep.residual = frame_residual(da.ker_left, db.ker_left);
  rep.holds = rep.residual <= tol.eps_frame;
  const double range_residual = frame_residual(db.range, da.range);
  if (rep.holds != (range_residual <= tol.eps_frame))
    throw Error(ErrorKind::Internal, "kernel and range inclusions disagree (" + std::to_string(rep.residual) + " vs " +
                                         std::to_string(range_residual) + ")");
  if (rep.holds) return rep;

  const FarthestVector far = farthest_blockwise(da.ker_left, db.ker_left);
  if (far.distance <= tol.eps_frame) {
    rep.witness_unavailable = true;
    return rep;
  }
  rep.witness = rank_one_projection(a.structure(), far.vector);
  return rep;
}

bool is_scaled_projection(const Element& a, const ToleranceConfig& tol) {
  require_nonzero(a, "is_scaled_projection");
  const double n = a.norm();
  const Element p = abs_adjoint(a);
  return (Complex(1.0 / n) * (p * p) - p).norm() <= tol.eps_norm * n;
}

RankChain rank_via_chain(const Element& a, const ToleranceConfig& tol) {
  require_nonzero(a, "rank_via_chain");
  const SpectralData d = decompose(a, tol);
  const std::vector<SingularTriplet> trip = singular_triplets(d);
  const int n = static_cast<int>(trip.size());
  const BlockStructure& st = a.structure();

  RankChain out;
  out.rank = n;
  out.chain.push_back(a);
  for (int k = 1; k < n; ++k) {
    Element ak = Element::zero(st);
    for (int j = 0; j < n - k; ++j) ak = ak + rank_one_projection(st, trip[j].left);
    out.chain.push_back(std::move(ak));
  }
  for (int k = 0; k + 1 < n; ++k) {
    const bool up = l_leq(out.chain[k], out.chain[k + 1], tol).holds;
    const bool down = l_leq(out.chain[k + 1], out.chain[k], tol).holds;
    if (!up || down)
      throw Error(ErrorKind::ChainInconsistent, "L-set chain is not strictly increasing at link " + std::to_string(k));
  }
  if (n != d.rank) throw Error(ErrorKind::ChainInconsistent, "chain length differs from the singular rank");
  return out;
}

std::vector<int> block_support(const Element& a, const ToleranceConfig& tol) {
  const double n = a.norm();
  std::vector<int> out;
  if (n == 0.0) return out;
  for (int k = 0; k < a.structure().num_blocks(); ++k)
    if (a.block_norm(k) > tol.eps_rank * n) out.push_back(k);
  return out;
}

SharedBlock shares_block(const Element& a, const Element& b, const ToleranceConfig& tol) {
  require_same_structure(a, b);
  require_nonzero(a, "shares_block");
  require_nonzero(b, "shares_block");
  const std::vector<int> sa = block_support(a, tol), sb = block_support(b, tol);
  std::vector<int> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
  SharedBlock out;
  if (common.empty()) return out;
  out.shares = true;

  const double na = a.norm(), nb = b.norm();
  int lambda = common.front();
  double best = -1.0;
  for (int k : common) {
    const double score = std::min(a.block_norm(k) / na, b.block_norm(k) / nb);
    if (score > best) {
      best = score;
      lambda = k;
    }
  }
  const BlockStructure& st = a.structure();
  Eigen::JacobiSVD<Matrix> sva(a.block(lambda), Eigen::ComputeFullU);
  Eigen::JacobiSVD<Matrix> svb(b.block(lambda), Eigen::ComputeFullU);
  Vector xi = sva.matrixU().col(0);

  // Distance of xi from ker B_lambda*.
  const double cutoff = tol.eps_rank * nb;
  int rb = 0;
  while (rb < svb.singularValues().size() && svb.singularValues()(rb) > cutoff) ++rb;
  const Matrix ub = svb.matrixU().leftCols(rb);
  const double off_kernel = (ub.adjoint() * xi).norm();
  if (off_kernel > 10.0 * tol.eps_frame) {
    out.witness = rank_one_projection(st, embed(st, lambda, xi));
    return out;
  }
  // B xi = 0: mix xi with a direction zeta _|_ xi that B sees.
  Vector zeta = svb.matrixU().col(0);
  zeta -= xi.dot(zeta) * xi;
  zeta.normalize();
  const Matrix abs_a = abs_adjoint(a).block(lambda);
  if ((abs_a * xi).dot(zeta).real() < 0.0) zeta = -zeta;  // Re <|A*| xi, zeta> >= 0
  Vector eta = (xi + zeta) / std::numbers::sqrt2;
  out.witness = rank_one_projection(st, embed(st, lambda, eta));
  return out;
}

RChain r_chain(const Element& x, int n, const ToleranceConfig& tol) {
  require_nonzero(x, "r_chain");
  if (n < 1) throw Error(ErrorKind::EigenspaceTooSmall, "chain length must be at least 1");
  const double nx = x.norm();
  if ((x - x.adjoint()).norm() > tol.eps_norm * nx * 10.0)
    throw Error(ErrorKind::InvalidSpec, "r_chain needs a positive element");
  for (const Matrix& b : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.eps_norm * nx * 10.0)
      throw Error(ErrorKind::InvalidSpec, "r_chain needs a positive element");
  }
  const BlockStructure& st = x.structure();
  RChain out;
  out.base = Complex(1.0 / nx) * x;
  const SpectralData d = decompose(out.base, tol);
  if (n > d.top_mult)
    throw Error(ErrorKind::EigenspaceTooSmall, "top eigenspace has dimension " + std::to_string(d.top_mult) +
                                                   " < " + std::to_string(n));
  Element link = Element::zero(st);
  for (int j = 0; j < n; ++j) {
    Element part = rank_one_projection(st, d.m_left.columns.col(j));
    link = link + part;
    out.parts.push_back(part);
    out.links.push_back(link);
  }

  const double slack = 10.0 * tol.eps_norm;
  for (int i = 0; i < n; ++i) {
    if ((out.base * out.parts[i] - out.parts[i]).norm() > slack)
      throw Error(ErrorKind::ChainInconsistent, "x x_j != x_j");
    for (int j = 0; j < n; ++j)
      if (i != j && (out.parts[i] * out.parts[j]).norm() > slack)
        throw Error(ErrorKind::ChainInconsistent, "chain parts are not orthogonal");
    if (std::abs(out.links[i].norm() - 1.0) > slack) throw Error(ErrorKind::ChainInconsistent, "||y_k|| != ||x||");
  }
  for (int k = 0; k + 1 < n; ++k) {
    if (!r_leq(out.links[k], out.links[k + 1], tol).holds || r_leq(out.links[k + 1], out.links[k], tol).holds)
      throw Error(ErrorKind::ChainInconsistent, "R-sets do not grow strictly at link " + std::to_string(k));
  }
  if (!r_leq(out.links.back(), out.base, tol).holds)
    throw Error(ErrorKind::ChainInconsistent, "last link escapes R_x");
  return out;
}

}  // namespace sbjo
