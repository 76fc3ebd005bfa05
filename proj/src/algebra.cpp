#include "sbjo/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sbjo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorKind::AmbientMismatch: return "AmbientMismatch";
    case ErrorKind::RankTooLarge: return "RankTooLarge";
    case ErrorKind::StructureMismatch: return "StructureMismatch";
    case ErrorKind::NotRankOne: return "NotRankOne";
    case ErrorKind::ZeroElement: return "ZeroElement";
    case ErrorKind::NotCoisometry: return "NotCoisometry";
    case ErrorKind::WitnessUnavailable: return "WitnessUnavailable";
    case ErrorKind::ChainInconsistent: return "ChainInconsistent";
    case ErrorKind::EigenspaceTooSmall: return "EigenspaceTooSmall";
    case ErrorKind::DomainMiss: return "DomainMiss";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::NotSingletonSupport: return "NotSingletonSupport";
    case ErrorKind::NotInjective: return "NotInjective";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::KappaNotConstant: return "KappaNotConstant";
    case ErrorKind::RecoveryInconsistent: return "RecoveryInconsistent";
    case ErrorKind::WrongMode: return "WrongMode";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidTolerance: return "InvalidTolerance";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void ToleranceConfig::validate() const {
  auto ok = [](double v) { return v > 0.0 && v < 1e-3; };
  if (!ok(eps_rank) || !ok(eps_norm) || !ok(eps_frame)) {
    std::ostringstream os;
    os << "tolerances must lie in (0, 1e-3): eps_rank=" << eps_rank << " eps_norm=" << eps_norm
       << " eps_frame=" << eps_frame;
    throw Error(ErrorKind::InvalidTolerance, os.str());
  }
}

// ---------------------------------------------------------------------------
// BlockStructure

BlockStructure::BlockStructure(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error(ErrorKind::ShapeMismatch, "block structure needs at least one block");
  offsets_.reserve(dims_.size());
  for (int n : dims_) {
    if (n < 1) throw Error(ErrorKind::ShapeMismatch, "block dimensions must be positive");
    offsets_.push_back(ambient_);
    ambient_ += n;
  }
}

BlockStructure BlockStructure::parse(std::string_view text) {
  std::vector<int> dims;
  std::string token;
  std::istringstream is{std::string(text)};
  while (std::getline(is, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(), [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw Error(ErrorKind::Parse, "cannot parse block structure '" + std::string(text) + "'");
    dims.push_back(std::stoi(token));
  }
  return BlockStructure(std::move(dims));
}

int BlockStructure::algebra_dim() const {
  int d = 0;
  for (int n : dims_) d += n * n;
  return d;
}

int BlockStructure::block_of(int coordinate) const {
  for (int k = num_blocks() - 1; k >= 0; --k)
    if (coordinate >= offsets_[k]) return k;
  return 0;
}

std::string BlockStructure::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
  return os.str();
}

// ---------------------------------------------------------------------------
// Element

namespace {

void canonicalize_and_check(Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    Complex& c = m.data()[i];
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw Error(ErrorKind::NonFiniteEntry, "element entries must be finite");
    double re = c.real() == 0.0 ? 0.0 : c.real();
    double im = c.imag() == 0.0 ? 0.0 : c.imag();
    c = Complex(re, im);
  }
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Element::Element(BlockStructure structure, std::vector<Matrix> blocks)
    : structure_(std::move(structure)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != structure_.num_blocks())
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(structure_.num_blocks()) + " blocks, got " +
                                              std::to_string(blocks_.size()));
  for (int k = 0; k < structure_.num_blocks(); ++k) {
    const int n = structure_.dim(k);
    if (blocks_[k].rows() != n || blocks_[k].cols() != n)
      throw Error(ErrorKind::ShapeMismatch, "block " + std::to_string(k) + " must be " + std::to_string(n) + "x" +
                                                std::to_string(n));
    canonicalize_and_check(blocks_[k]);
  }
}

Element validate(const BlockStructure& structure, std::vector<Matrix> raw) {
  return Element(structure, std::move(raw));
}

Element Element::zero(const BlockStructure& structure) {
  std::vector<Matrix> blocks;
  for (int n : structure.dims()) blocks.push_back(Matrix::Zero(n, n));
  return Element(structure, std::move(blocks));
}

Element Element::identity(const BlockStructure& structure) {
  std::vector<Matrix> blocks;
  for (int n : structure.dims()) blocks.push_back(Matrix::Identity(n, n));
  return Element(structure, std::move(blocks));
}

Element Element::from_dense(const BlockStructure& structure, const Matrix& dense, double tol) {
  const int n = structure.ambient_dim();
  if (dense.rows() != n || dense.cols() != n) throw Error(ErrorKind::ShapeMismatch, "dense matrix has wrong size");
  std::vector<Matrix> blocks;
  Matrix rest = dense;
  for (int k = 0; k < structure.num_blocks(); ++k) {
    const int o = structure.offset(k), d = structure.dim(k);
    blocks.push_back(dense.block(o, o, d, d));
    rest.block(o, o, d, d).setZero();
  }
  if (rest.cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorKind::ShapeMismatch, "dense matrix is not block diagonal for " + structure.to_string());
  return Element(structure, std::move(blocks));
}

Matrix Element::dense() const {
  const int n = structure_.ambient_dim();
  Matrix out = Matrix::Zero(n, n);
  for (int k = 0; k < structure_.num_blocks(); ++k) {
    const int o = structure_.offset(k), d = structure_.dim(k);
    out.block(o, o, d, d) = blocks_[k];
  }
  return out;
}

double Element::block_norm(int k) const { return spectral_norm(blocks_[k]); }

double Element::norm() const {
  double best = 0.0;
  for (int k = 0; k < structure_.num_blocks(); ++k) best = std::max(best, block_norm(k));
  return best;
}

bool Element::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Matrix& m) { return m.isZero(0.0); });
}

Element Element::adjoint() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return Element(structure_, std::move(out));
}

Element Element::conjugate() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(b.conjugate());
  return Element(structure_, std::move(out));
}

Element Element::transpose() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(b.transpose());
  return Element(structure_, std::move(out));
}

Vector Element::apply(const Vector& v) const {
  Vector out = Vector::Zero(structure_.ambient_dim());
  for (int k = 0; k < structure_.num_blocks(); ++k) {
    const int o = structure_.offset(k), d = structure_.dim(k);
    out.segment(o, d) = blocks_[k] * v.segment(o, d);
  }
  return out;
}

Vector Element::apply_adjoint(const Vector& v) const {
  Vector out = Vector::Zero(structure_.ambient_dim());
  for (int k = 0; k < structure_.num_blocks(); ++k) {
    const int o = structure_.offset(k), d = structure_.dim(k);
    out.segment(o, d) = blocks_[k].adjoint() * v.segment(o, d);
  }
  return out;
}

void require_same_structure(const Element& a, const Element& b) {
  if (!(a.structure() == b.structure()))
    throw Error(ErrorKind::StructureMismatch,
                "elements live in " + a.structure().to_string() + " and " + b.structure().to_string());
}

namespace {

template <typename Op>
Element zip(const Element& a, const Element& b, Op op) {
  require_same_structure(a, b);
  std::vector<Matrix> out;
  for (int k = 0; k < a.structure().num_blocks(); ++k) out.push_back(op(a.block(k), b.block(k)));
  return Element(a.structure(), std::move(out));
}

}  // namespace

Element operator+(const Element& a, const Element& b) {
  return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x + y; });
}
Element operator-(const Element& a, const Element& b) {
  return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x - y; });
}
Element operator*(const Element& a, const Element& b) {
  return zip(a, b, [](const Matrix& x, const Matrix& y) -> Matrix { return x * y; });
}
Element operator*(Complex c, const Element& a) {
  std::vector<Matrix> out;
  for (const auto& m : a.blocks()) out.push_back(c * m);
  return Element(a.structure(), std::move(out));
}

int block_tag(const BlockStructure& structure, const Vector& v, double tol) {
  int tag = kMixedBlock;
  for (int k = 0; k < structure.num_blocks(); ++k) {
    if (v.segment(structure.offset(k), structure.dim(k)).norm() > tol) {
      if (tag != kMixedBlock) return kMixedBlock;
      tag = k;
    }
  }
  return tag;
}

Vector embed(const BlockStructure& structure, int block, const Vector& local) {
  Vector out = Vector::Zero(structure.ambient_dim());
  out.segment(structure.offset(block), structure.dim(block)) = local;
  return out;
}

Element outer(const BlockStructure& structure, const Vector& xi, const Vector& zeta) {
  if (xi.size() != structure.ambient_dim() || zeta.size() != structure.ambient_dim())
    throw Error(ErrorKind::AmbientMismatch, "outer product vectors have wrong length");
  Element out = Element::zero(structure);
  const int bx = block_tag(structure, xi), bz = block_tag(structure, zeta);
  if (xi.norm() == 0.0 || zeta.norm() == 0.0) return out;
  if (bx == kMixedBlock || bx != bz)
    throw Error(ErrorKind::StructureMismatch, "rank-one term must be supported in a single block");
  std::vector<Matrix> blocks = out.blocks();
  const int o = structure.offset(bx), d = structure.dim(bx);
  blocks[bx] = xi.segment(o, d) * zeta.segment(o, d).adjoint();
  return Element(structure, std::move(blocks));
}

Element rank_one_projection(const BlockStructure& structure, const Vector& xi) {
  return outer(structure, xi.normalized(), xi.normalized());
}

// ---------------------------------------------------------------------------
// Frames

Frame Frame::empty_frame(const BlockStructure& structure) {
  return Frame{structure, Matrix::Zero(structure.ambient_dim(), 0), {}};
}

Frame Frame::full(const BlockStructure& structure) {
  const int n = structure.ambient_dim();
  Frame f{structure, Matrix::Identity(n, n), {}};
  for (int i = 0; i < n; ++i) f.tags.push_back(structure.block_of(i));
  return f;
}

Frame Frame::from_columns(const BlockStructure& structure, const Matrix& columns, double rel_tol) {
  if (columns.rows() != structure.ambient_dim()) throw Error(ErrorKind::AmbientMismatch, "frame has wrong row count");
  if (columns.cols() == 0) return empty_frame(structure);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  int k = 0;
  while (k < s.size() && s(k) > rel_tol * std::max(1.0, s(0))) ++k;
  Frame f{structure, svd.matrixU().leftCols(k), {}};
  for (int j = 0; j < k; ++j) f.tags.push_back(block_tag(structure, f.columns.col(j)));
  return f;
}

Matrix Frame::block_columns(int block) const {
  const int o = structure.offset(block), d = structure.dim(block);
  int count = 0;
  for (int t : tags) count += (t == block);
  Matrix out(d, count);
  int j = 0;
  for (int c = 0; c < dim(); ++c)
    if (tags[c] == block) out.col(j++) = columns.col(c).segment(o, d);
  return out;
}

Frame Frame::blockwise() const {
  if (std::none_of(tags.begin(), tags.end(), [](int t) { return t == kMixedBlock; })) return *this;
  Frame out = empty_frame(structure);
  std::vector<Vector> cols;
  for (int k = 0; k < structure.num_blocks(); ++k) {
    const int o = structure.offset(k), d = structure.dim(k);
    Matrix local = columns.middleRows(o, d);
    if (local.cols() == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(local, Eigen::ComputeThinU);
    for (int j = 0; j < svd.singularValues().size(); ++j) {
      if (svd.singularValues()(j) <= 1e-8) break;
      cols.push_back(embed(structure, k, svd.matrixU().col(j)));
      out.tags.push_back(k);
    }
  }
  out.columns.resize(structure.ambient_dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.columns.col(j) = cols[j];
  return out;
}

Matrix Frame::projector() const { return columns * columns.adjoint(); }

namespace {

void require_same_ambient(const Frame& f, const Frame& g) {
  if (f.columns.rows() != g.columns.rows())
    throw Error(ErrorKind::AmbientMismatch, "frames live in different ambient spaces");
}

}  // namespace

double frame_residual(const Frame& f, const Frame& g) {
  require_same_ambient(f, g);
  if (f.empty()) return 0.0;
  Matrix r = f.columns - g.columns * (g.columns.adjoint() * f.columns);
  return spectral_norm(r);
}

bool frame_leq(const Frame& f, const Frame& g, const ToleranceConfig& tol) {
  return frame_residual(f, g) <= tol.eps_frame;
}

bool frame_equal(const Frame& f, const Frame& g, const ToleranceConfig& tol) {
  return frame_leq(f, g, tol) && frame_leq(g, f, tol);
}

FrameMeet frame_meet_data(const Frame& f, const Frame& g) {
  require_same_ambient(f, g);
  FrameMeet out;
  if (f.empty() || g.empty()) return out;
  // Singular values of (I - P_G) F are the distances of unit vectors of F to G.
  Matrix r = f.columns - g.columns * (g.columns.adjoint() * f.columns);
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
  const Eigen::Index last = svd.singularValues().size() - 1;
  Vector c;
  if (f.dim() > r.rows()) {
    // More columns than rows: the null space of r is nontrivial.
    out.sine = 0.0;
    c = svd.matrixV().col(f.dim() - 1);
  } else {
    out.sine = svd.singularValues()(last);
    c = svd.matrixV().col(last);
  }
  out.vector = (f.columns * c).normalized();
  return out;
}

std::optional<Vector> frame_meet(const Frame& f, const Frame& g, const ToleranceConfig& tol) {
  FrameMeet m = frame_meet_data(f, g);
  if (m.vector.size() == 0 || m.sine > tol.eps_frame) return std::nullopt;
  return m.vector;
}

// ---------------------------------------------------------------------------
// Singular data

SpectralData decompose(const Element& a, const ToleranceConfig& tol) {
  const BlockStructure& st = a.structure();
  SpectralData out;
  out.structure = st;
  for (int k = 0; k < st.num_blocks(); ++k) {
    Eigen::JacobiSVD<Matrix> svd(a.block(k), Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.svd.push_back({svd.matrixU(), svd.singularValues(), svd.matrixV()});
    out.singulars.push_back(svd.singularValues());
    const double bn = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    out.block_norms.push_back(bn);
    out.norm = std::max(out.norm, bn);
  }
  if (out.norm == 0.0) {
    out.m_left = out.m_right = out.ker_left = Frame::full(st);
    out.range = Frame::empty_frame(st);
    out.top_mult = st.ambient_dim();
    return out;
  }
  out.top_cutoff = (1.0 - tol.eps_norm) * out.norm;
  out.rank_cutoff = tol.eps_rank * out.norm;

  std::vector<Vector> top_l, top_r, ker, rng;
  std::vector<int> top_tags, ker_tags, rng_tags;
  for (int k = 0; k < st.num_blocks(); ++k) {
    const BlockSvd& b = out.svd[k];
    if (out.block_norms[k] > out.rank_cutoff) out.support.push_back(k);
    for (int i = 0; i < b.s.size(); ++i) {
      const double s = b.s(i);
      if (s >= out.top_cutoff) {
        top_l.push_back(embed(st, k, b.u.col(i)));
        top_r.push_back(embed(st, k, b.v.col(i)));
        top_tags.push_back(k);
      }
      if (s > out.rank_cutoff) {
        ++out.rank;
        rng.push_back(embed(st, k, b.u.col(i)));
        rng_tags.push_back(k);
      } else {
        ker.push_back(embed(st, k, b.u.col(i)));
        ker_tags.push_back(k);
      }
    }
  }
  auto assemble = [&](const std::vector<Vector>& cols, const std::vector<int>& tags) {
    Frame f{st, Matrix(st.ambient_dim(), static_cast<Eigen::Index>(cols.size())), tags};
    for (std::size_t j = 0; j < cols.size(); ++j) f.columns.col(j) = cols[j];
    return f;
  };
  out.m_left = assemble(top_l, top_tags);
  out.m_right = assemble(top_r, top_tags);
  out.ker_left = assemble(ker, ker_tags);
  out.range = assemble(rng, rng_tags);
  out.top_mult = static_cast<int>(top_l.size());
  return out;
}

std::vector<SingularTriplet> singular_triplets(const SpectralData& data) {
  std::vector<SingularTriplet> out;
  for (int k = 0; k < data.structure.num_blocks(); ++k) {
    const BlockSvd& b = data.svd[k];
    for (int i = 0; i < b.s.size(); ++i) {
      if (b.s(i) <= data.rank_cutoff || data.norm == 0.0) continue;
      out.push_back({k, i, b.s(i), embed(data.structure, k, b.u.col(i)), embed(data.structure, k, b.v.col(i))});
    }
  }
  std::stable_sort(out.begin(), out.end(), [&](const SingularTriplet& x, const SingularTriplet& y) {
    const bool xt = x.sigma >= data.top_cutoff, yt = y.sigma >= data.top_cutoff;
    if (xt != yt) return xt;
    if (xt) return false;  // top cluster keeps block order
    return x.sigma > y.sigma;
  });
  return out;
}

Element abs_adjoint(const Element& x) {
  std::vector<Matrix> out;
  for (const auto& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU);
    const Matrix& u = svd.matrixU();
    out.push_back(u * svd.singularValues().cast<Complex>().asDiagonal() * u.adjoint());
  }
  return Element(x.structure(), std::move(out));
}

Element abs(const Element& x) {
  std::vector<Matrix> out;
  for (const auto& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullV);
    const Matrix& v = svd.matrixV();
    out.push_back(v * svd.singularValues().cast<Complex>().asDiagonal() * v.adjoint());
  }
  return Element(x.structure(), std::move(out));
}

Element pseudo_inverse(const Element& x, const ToleranceConfig& tol) {
  const double cutoff = tol.eps_rank * x.norm();
  std::vector<Matrix> out;
  for (const auto& b : x.blocks()) {
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector inv = svd.singularValues();
    for (int i = 0; i < inv.size(); ++i) inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
    out.push_back(svd.matrixV() * inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint());
  }
  return Element(x.structure(), std::move(out));
}

// ---------------------------------------------------------------------------
// Random generators

Matrix complex_gaussian(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

Vector complex_gaussian_vector(Rng& rng, int n) { return complex_gaussian(rng, n, 1).col(0); }

Matrix haar_unitary_matrix(Rng& rng, int n) {
  Matrix z = complex_gaussian(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double m = std::abs(d);
    if (m > 0.0) q.col(i) *= d / m;
  }
  return q;
}

Element haar_unitary(const BlockStructure& structure, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int n : structure.dims()) blocks.push_back(haar_unitary_matrix(rng, n));
  return Element(structure, std::move(blocks));
}

Element haar_unitary(const BlockStructure& structure, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(structure, rng);
}

Element random_element(const BlockStructure& structure, Rng& rng, std::optional<int> target_rank) {
  if (!target_rank) {
    std::vector<Matrix> blocks;
    for (int n : structure.dims()) blocks.push_back(complex_gaussian(rng, n, n));
    return Element(structure, std::move(blocks));
  }
  const int r = *target_rank;
  if (r < 0 || r > structure.ambient_dim())
    throw Error(ErrorKind::RankTooLarge, "target rank " + std::to_string(r) + " exceeds ambient dimension " +
                                             std::to_string(structure.ambient_dim()));
  // Distribute the rank-one terms over blocks without exceeding any block's capacity.
  std::vector<int> slots;
  for (int k = 0; k < structure.num_blocks(); ++k)
    for (int i = 0; i < structure.dim(k); ++i) slots.push_back(k);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<Matrix> blocks;
  for (int n : structure.dims()) blocks.push_back(Matrix::Zero(n, n));
  for (int t = 0; t < r; ++t) {
    const int k = slots[t];
    const int n = structure.dim(k);
    blocks[k] += complex_gaussian_vector(rng, n) * complex_gaussian_vector(rng, n).adjoint();
  }
  return Element(structure, std::move(blocks));
}

Element random_element(const BlockStructure& structure, std::uint64_t seed, std::optional<int> target_rank) {
  Rng rng(seed);
  return random_element(structure, rng, target_rank);
}

}  // namespace sbjo
