#ifndef SBJO_TEST_HELPERS_HPP
#define SBJO_TEST_HELPERS_HPP

#include "sbjo/algebra.hpp"

#include <initializer_list>

namespace sbjo::test {

inline BlockStructure dims(std::initializer_list<int> d) { return BlockStructure(std::vector<int>(d)); }

// single-block element from a real diagonal
inline Element diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex c : d) m(i, i) = c, ++i;
  return Element(dims({static_cast<int>(d.size())}), {m});
}

// matrix unit E_ij in M_n, 1-based like the usual notation
inline Element unit(int n, int i, int j, Complex c = 1.0) {
  Matrix m = Matrix::Zero(n, n);
  m(i - 1, j - 1) = c;
  return Element(dims({n}), {m});
}

inline Element single(const Matrix& m) { return Element(dims({static_cast<int>(m.rows())}), {m}); }

inline Vector basis(int n, int i) { return Vector::Unit(n, i - 1); }

inline double dist(const Element& a, const Element& b) { return (a.dense() - b.dense()).norm(); }

// dense spectral norm, independent of the block code path
inline double dense_norm(const Element& a) {
  Eigen::BDCSVD<Matrix> svd(a.dense());
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace sbjo::test

#endif
