#ifndef SBJO_ALGEBRA_HPP
#define SBJO_ALGEBRA_HPP

// Block-diagonal complex matrix algebras  A = M_{n_1} (+) ... (+) M_{n_m},
// singular data of their elements and tolerance-aware subspace frames.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbjo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class ErrorKind {
  ShapeMismatch,
  NonFiniteEntry,
  AmbientMismatch,
  RankTooLarge,
  StructureMismatch,
  NotRankOne,
  ZeroElement,
  NotCoisometry,
  WitnessUnavailable,
  ChainInconsistent,
  EigenspaceTooSmall,
  DomainMiss,
  StructureViolation,
  NotSingletonSupport,
  NotInjective,
  DimensionMismatch,
  KappaNotConstant,
  RecoveryInconsistent,
  WrongMode,
  InvalidSpec,
  InvalidTolerance,
  Parse,
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ToleranceConfig {
  double eps_rank = 1e-10;   // relative singular-value cutoff
  double eps_norm = 1e-9;    // relative tolerance for norm equalities
  double eps_frame = 1e-8;   // subspace inclusion / intersection

  /// Throws InvalidTolerance unless every field lies in (0, 1e-3).
  void validate() const;
};

/// Shape (n_1, ..., n_m) of a block-diagonal algebra.
class BlockStructure {
 public:
  BlockStructure() = default;
  explicit BlockStructure(std::vector<int> dims);

  /// Parses "1,2,2".
  static BlockStructure parse(std::string_view text);

  const std::vector<int>& dims() const { return dims_; }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int dim(int block) const { return dims_[block]; }
  int offset(int block) const { return offsets_[block]; }
  int ambient_dim() const { return ambient_; }
  /// Complex dimension of the algebra, sum of n_k^2.
  int algebra_dim() const;
  int block_of(int coordinate) const;
  std::string to_string() const;

  bool operator==(const BlockStructure& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int ambient_ = 0;
};

/// A member of the algebra: one square complex block per entry of the structure.
/// Entries are always finite; -0.0 is stored as 0.0.
class Element {
 public:
  Element() = default;
  Element(BlockStructure structure, std::vector<Matrix> blocks);

  static Element zero(const BlockStructure& structure);
  static Element identity(const BlockStructure& structure);
  /// Reads the diagonal blocks of a dense N x N matrix; off-block entries must vanish.
  static Element from_dense(const BlockStructure& structure, const Matrix& dense, double tol = 0.0);

  const BlockStructure& structure() const { return structure_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(int k) const { return blocks_[k]; }

  Matrix dense() const;
  double norm() const;
  double block_norm(int k) const;
  bool is_zero() const;

  Element adjoint() const;
  Element conjugate() const;
  Element transpose() const;

  /// Applies y = x v for an ambient vector v.
  Vector apply(const Vector& v) const;
  Vector apply_adjoint(const Vector& v) const;

  friend Element operator+(const Element& a, const Element& b);
  friend Element operator-(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);
  friend Element operator*(Complex c, const Element& a);
  friend Element operator*(const Element& a, Complex c) { return c * a; }
  Element operator-() const { return Complex(-1.0) * *this; }

 private:
  BlockStructure structure_;
  std::vector<Matrix> blocks_;
};

/// Builds an Element from raw blocks, checking shapes and finiteness.
Element validate(const BlockStructure& structure, std::vector<Matrix> raw);

void require_same_structure(const Element& a, const Element& b);

/// Rank-one element xi (x) zeta, eta -> <eta, zeta> xi.  Both vectors must live in one block.
Element outer(const BlockStructure& structure, const Vector& xi, const Vector& zeta);
/// E_xi, the projection onto C xi for a unit block vector xi.
Element rank_one_projection(const BlockStructure& structure, const Vector& xi);
/// Embeds a block-local vector into the ambient space.
Vector embed(const BlockStructure& structure, int block, const Vector& local);
/// Index of the unique block carrying v (entries outside below tol), or -1 if mixed / zero.
int block_tag(const BlockStructure& structure, const Vector& v, double tol = 1e-10);

inline constexpr int kMixedBlock = -1;

/// Orthonormal columns spanning a subspace of the ambient space.
struct Frame {
  BlockStructure structure;
  Matrix columns;         // N x k
  std::vector<int> tags;  // block per column, kMixedBlock when spread

  int dim() const { return static_cast<int>(columns.cols()); }
  bool empty() const { return columns.cols() == 0; }

  static Frame empty_frame(const BlockStructure& structure);
  static Frame full(const BlockStructure& structure);
  /// Orthonormalizes the given columns (rank decided at rel_tol) and tags them.
  static Frame from_columns(const BlockStructure& structure, const Matrix& columns, double rel_tol = 1e-10);

  /// Columns of the given block in block-local coordinates (n_block x k_block).
  Matrix block_columns(int block) const;
  /// Re-expresses the frame by per-block bases of P_block(F); exact for block-reducing subspaces.
  Frame blockwise() const;
  /// Orthogonal projection onto the span.
  Matrix projector() const;
};

struct BlockSvd {
  Matrix u;
  RealVector s;
  Matrix v;
};

/// Everything the orthogonality deciders need about one element.
struct SpectralData {
  BlockStructure structure;
  double norm = 0.0;
  int rank = 0;
  int top_mult = 0;
  Frame m_right;   // M_A, top right-singular subspace
  Frame m_left;    // A M_A, top left-singular subspace
  Frame ker_left;  // ker A*
  Frame range;     // R(A)
  std::vector<double> block_norms;
  std::vector<int> support;  // blocks with A_k != 0
  std::vector<RealVector> singulars;
  std::vector<BlockSvd> svd;
  double top_cutoff = 0.0;   // singular values >= top_cutoff form the top cluster
  double rank_cutoff = 0.0;  // singular values > rank_cutoff count toward the rank
};

SpectralData decompose(const Element& a, const ToleranceConfig& tol = {});

struct SingularTriplet {
  int block;
  int index;
  double sigma;
  Vector left;   // ambient
  Vector right;  // ambient
};

/// Nonzero singular triplets over all blocks, sigma nonincreasing (ties by block order).
std::vector<SingularTriplet> singular_triplets(const SpectralData& data);

/// ||(I - P_G) F|| (spectral norm).  Zero for an empty F.
double frame_residual(const Frame& f, const Frame& g);
bool frame_leq(const Frame& f, const Frame& g, const ToleranceConfig& tol = {});
bool frame_equal(const Frame& f, const Frame& g, const ToleranceConfig& tol = {});

struct FrameMeet {
  double sine = 1.0;  // min over unit v in F of dist(v, G)
  Vector vector;      // minimizing unit vector of F (empty if F or G empty)
};

/// Smallest principal sine between span F and span G with its principal vector.
FrameMeet frame_meet_data(const Frame& f, const Frame& g);
/// A unit vector of F (ambient coordinates) lying in G, if the spans meet within eps_frame.
std::optional<Vector> frame_meet(const Frame& f, const Frame& g, const ToleranceConfig& tol = {});

/// |x*| = (x x*)^{1/2}, from the singular decomposition.
Element abs_adjoint(const Element& x);
/// |x| = (x* x)^{1/2}.
Element abs(const Element& x);
/// Moore-Penrose pseudo-inverse with singular values <= eps_rank ||x|| dropped.
Element pseudo_inverse(const Element& x, const ToleranceConfig& tol = {});

Matrix complex_gaussian(Rng& rng, int rows, int cols);
Vector complex_gaussian_vector(Rng& rng, int n);

/// Haar unitary of size n: QR of a complex Gaussian with R's diagonal made positive.
Matrix haar_unitary_matrix(Rng& rng, int n);
Element haar_unitary(const BlockStructure& structure, Rng& rng);
Element haar_unitary(const BlockStructure& structure, std::uint64_t seed);

/// Complex Gaussian blocks, or a sum of target_rank random block-local rank-one terms.
Element random_element(const BlockStructure& structure, Rng& rng, std::optional<int> target_rank = std::nullopt);
Element random_element(const BlockStructure& structure, std::uint64_t seed,
                       std::optional<int> target_rank = std::nullopt);

}  // namespace sbjo

#endif
