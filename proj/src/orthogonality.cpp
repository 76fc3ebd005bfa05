#include "sbjo/orthogonality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace sbjo {

const char* to_string(Method method) {
  switch (method) {
    case Method::Criterion: return "criterion";
    case Method::NormFormula: return "norm-formula";
    case Method::Distance: return "distance";
    case Method::Sampled: return "sampled";
    case Method::RankOne: return "rank-one";
    case Method::Plain: return "bj";
  }
  return "unknown";
}

bool is_fragile_margin(double margin, double threshold) {
  return margin >= 0.1 * threshold && margin <= 10.0 * threshold;
}

namespace {

void require_same(const BlockStructure& a, const BlockStructure& b) {
  if (!(a == b))
    throw Error(ErrorKind::StructureMismatch, "elements live in " + a.to_string() + " and " + b.to_string());
}

OrthoVerdict trivially_orthogonal(Method method, double threshold) {
  OrthoVerdict v;
  v.value = true;
  v.method = method;
  v.margin = 0.0;
  v.threshold = threshold;
  return v;
}

double block_diag_norm(const std::vector<Matrix>& blocks) {
  double best = 0.0;
  for (const auto& b : blocks) {
    if (b.size() == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(b);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

}  // namespace

OrthoVerdict strong_bj(const SpectralData& x, const SpectralData& y, const ToleranceConfig& tol) {
  require_same(x.structure, y.structure);
  if (x.norm == 0.0 || y.norm == 0.0) return trivially_orthogonal(Method::Criterion, tol.eps_frame);

  OrthoVerdict v;
  v.method = Method::Criterion;
  v.threshold = tol.eps_frame;
  v.margin = 1.0;
  Vector best_local;
  int best_block = kMixedBlock;
  for (int k = 0; k < x.structure.num_blocks(); ++k) {
    if (x.block_norms[k] < x.top_cutoff) continue;
    Matrix f = x.m_left.block_columns(k);
    Matrix g = y.ker_left.block_columns(k);
    if (f.cols() == 0 || g.cols() == 0) continue;
    Matrix r = f - g * (g.adjoint() * f);
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
    const Eigen::Index last = svd.singularValues().size() - 1;
    const double sine = svd.singularValues()(last);
    if (sine < v.margin) {
      v.margin = sine;
      best_block = k;
      best_local = (f * svd.matrixV().col(last)).normalized();
    }
  }
  v.value = v.margin <= tol.eps_frame;
  v.fragile = is_fragile_margin(v.margin, v.threshold);
  if (v.value && best_block != kMixedBlock) {
    const BlockStructure& st = x.structure;
    Matrix f = x.m_left.block_columns(best_block);
    Matrix fr = x.m_right.block_columns(best_block);
    Vector coeff = f.adjoint() * best_local;
    OrthoWitness w;
    w.block = best_block;
    w.left = embed(st, best_block, best_local);
    w.right = embed(st, best_block, (fr * coeff).normalized());
    v.witness = w;
  }
  return v;
}

OrthoVerdict strong_bj(const Element& x, const Element& y, const ToleranceConfig& tol) {
  require_same_structure(x, y);
  return strong_bj(decompose(x, tol), decompose(y, tol), tol);
}

OrthoVerdict strong_bj_norm_formula(const Element& x, const Element& y, const ToleranceConfig& tol) {
  require_same_structure(x, y);
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return trivially_orthogonal(Method::NormFormula, tol.eps_norm);
  std::vector<Matrix> lhs;
  for (int k = 0; k < x.structure().num_blocks(); ++k) {
    const Matrix& xb = x.block(k);
    const Matrix& yb = y.block(k);
    lhs.push_back(ny * ny * xb - yb * (yb.adjoint() * xb));
  }
  const double r = block_diag_norm(lhs);
  const double target = nx * ny * ny;
  OrthoVerdict v;
  v.method = Method::NormFormula;
  v.threshold = tol.eps_norm;
  v.margin = std::max(0.0, (target - r) / target);
  v.value = v.margin <= tol.eps_norm;
  v.fragile = is_fragile_margin(v.margin, v.threshold);
  return v;
}

OrthoVerdict strong_bj_distance(const Element& x, const SpectralData& y, const ToleranceConfig& tol) {
  require_same(x.structure(), y.structure);
  const double nx = x.norm();
  if (nx == 0.0 || y.norm == 0.0) return trivially_orthogonal(Method::Distance, tol.eps_norm);
  const BlockStructure& st = x.structure();
  std::vector<Matrix> residual, z;
  for (int k = 0; k < st.num_blocks(); ++k) {
    const BlockSvd& b = y.svd[k];
    int r = 0;
    while (r < b.s.size() && b.s(r) > y.rank_cutoff) ++r;
    Matrix ur = b.u.leftCols(r);
    Matrix coeff = ur.adjoint() * x.block(k);
    residual.push_back(x.block(k) - ur * coeff);
    RealVector inv = b.s.head(r).cwiseInverse();
    z.push_back(-(b.v.leftCols(r) * inv.cast<Complex>().asDiagonal() * coeff));
  }
  const double d = block_diag_norm(residual);
  OrthoVerdict v;
  v.method = Method::Distance;
  v.threshold = tol.eps_norm;
  v.margin = std::max(0.0, 1.0 - d / nx);
  v.value = v.margin <= tol.eps_norm;
  v.fragile = is_fragile_margin(v.margin, v.threshold);
  if (!v.value) {
    Element ze(st, std::move(z));
    Element yz = Element(st, [&] {
      std::vector<Matrix> out;
      for (int k = 0; k < st.num_blocks(); ++k) {
        const BlockSvd& b = y.svd[k];
        out.push_back(b.u * b.s.cast<Complex>().asDiagonal() * b.v.adjoint() * ze.block(k));
      }
      return out;
    }());
    v.attained = (x + yz).norm();
    v.violating_z = std::move(ze);
  }
  return v;
}

OrthoVerdict strong_bj_distance(const Element& x, const Element& y, const ToleranceConfig& tol) {
  require_same_structure(x, y);
  return strong_bj_distance(x, decompose(y, tol), tol);
}

bool strong_bj_sampled(const Element& x, const Element& y, const ToleranceConfig& tol, int budget,
                       std::uint64_t seed) {
  if (budget < 1) throw Error(ErrorKind::InvalidSpec, "sampling budget must be at least 1");
  require_same_structure(x, y);
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return true;
  const double floor = (1.0 - 1e-7) * nx;
  auto violates = [&](const Element& z) { return (x + y * z).norm() < floor; };

  if (violates(-(pseudo_inverse(y, tol) * x))) return false;
  const Element ystar_x = y.adjoint() * x;
  for (int i = 0; i < 16; ++i) {
    const double t = std::pow(10.0, -3.0 + 6.0 * i / 15.0) / (ny * ny);
    if (violates(Complex(-t) * ystar_x)) return false;
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> expo(-2.0, 1.0);
  for (int i = 0; i < budget; ++i) {
    const double scale = nx / ny * std::pow(10.0, expo(rng));
    Element z = random_element(x.structure(), rng);
    if (violates(Complex(scale / std::max(z.norm(), 1e-300)) * z)) return false;
  }
  return true;
}

namespace {

double shifted_norm(const Element& x, const Element& y, Complex t) {
  double best = 0.0;
  for (int k = 0; k < x.structure().num_blocks(); ++k) {
    Matrix m = x.block(k) + t * y.block(k);
    if (m.size() == 1) {
      best = std::max(best, std::abs(m(0, 0)));
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

}  // namespace

double bj_minimum(const Element& x, const Element& y) {
  require_same_structure(x, y);
  const double nx = x.norm(), ny = y.norm();
  if (ny == 0.0 || nx == 0.0) return nx;
  const double radius = 2.0 * nx / ny;
  Complex best_t = 0.0;
  double best = nx;
  for (int i = 1; i <= 32; ++i) {
    for (int j = 0; j < 16; ++j) {
      const Complex t = std::polar(radius * i / 32.0, 2.0 * std::numbers::pi * j / 16.0);
      const double f = shifted_norm(x, y, t);
      if (f < best) {
        best = f;
        best_t = t;
      }
    }
  }
  // Pattern search over eight compass directions; the spectral norm is not smooth
  // where the top singular value is degenerate, so no gradients.
  static const std::array<Complex, 8> dirs = {Complex(1, 0),  Complex(-1, 0), Complex(0, 1),   Complex(0, -1),
                                              Complex(1, 1),  Complex(1, -1), Complex(-1, 1),  Complex(-1, -1)};
  double step = radius / 32.0;
  const double stop = 1e-10 * std::max(1.0, radius);
  while (step > stop) {
    bool moved = false;
    for (const Complex& d : dirs) {
      const Complex t = best_t + step * d / std::abs(d);
      const double f = shifted_norm(x, y, t);
      if (f < best) {
        best = f;
        best_t = t;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

bool bj(const Element& x, const Element& y, const ToleranceConfig& tol) {
  const double nx = x.norm();
  return bj_minimum(x, y) >= (1.0 - tol.eps_norm) * nx;
}

bool strong_bj_rank_one(const Element& a, const Element& b, const ToleranceConfig& tol) {
  require_same_structure(a, b);
  if (decompose(a, tol).rank != 1 || decompose(b, tol).rank != 1)
    throw Error(ErrorKind::NotRankOne, "rank-one test needs two rank-one elements");
  const double prod = (abs_adjoint(b) * abs_adjoint(a)).norm();
  return prod <= tol.eps_norm * a.norm() * b.norm();
}

CrossCheck cross_check(const Element& x, const Element& y, const ToleranceConfig& tol) {
  require_same_structure(x, y);
  const SpectralData sx = decompose(x, tol), sy = decompose(y, tol);
  return {strong_bj(sx, sy, tol), strong_bj_norm_formula(x, y, tol), strong_bj_distance(x, sy, tol)};
}

}  // namespace sbjo
