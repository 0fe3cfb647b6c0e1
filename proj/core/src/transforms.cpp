#include "pufkey/transforms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pufkey {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::MatrixXd dct_matrix(int n) {
  Eigen::MatrixXd m(n, n);
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int j = 0; j < n; ++j)
      m(k, j) = scale * std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n));
  }
  return m;
}

Eigen::MatrixXd hadamard_matrix(int n) {
  Eigen::MatrixXd m(n, n);
  const double s = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = (std::popcount(unsigned(i & j)) & 1) ? -s : s;
  return m;
}

// Orthonormal Haar: W_1 = [1], W_2n = rows of [W_n (x) (1,1); I_n (x) (1,-1)]
// normalized to unit length. Row 0 stays the constant vector.
Eigen::MatrixXd haar_matrix(int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
  while (m.rows() < n) {
    const int h = int(m.rows());
    Eigen::MatrixXd next(2 * h, 2 * h);
    next.setZero();
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) {
        next(i, 2 * j) = m(i, j);
        next(i, 2 * j + 1) = m(i, j);
      }
    for (int i = 0; i < h; ++i) {
      next(h + i, 2 * i) = 1.0;
      next(h + i, 2 * i + 1) = -1.0;
    }
    for (int i = 0; i < 2 * h; ++i) next.row(i).normalize();
    m = std::move(next);
  }
  return m;
}

Eigen::MatrixXd side_matrix(Transform::Kind kind, int n) {
  if (!is_pow2(n))
    throw std::invalid_argument("transform: side length must be a power of two");
  switch (kind) {
    case Transform::Kind::Dct: return dct_matrix(n);
    case Transform::Kind::Dwht: return hadamard_matrix(n);
    case Transform::Kind::Dht: return haar_matrix(n);
    default: throw std::logic_error("side_matrix: not a separable kind");
  }
}

Eigen::VectorXd vec_rowmajor(const Eigen::MatrixXd& x) {
  Eigen::VectorXd v(x.size());
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c) v(r * x.cols() + c) = x(r, c);
  return v;
}

Eigen::MatrixXd unvec_rowmajor(const Eigen::VectorXd& v, int rows, int cols) {
  Eigen::MatrixXd x(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) x(r, c) = v(r * cols + c);
  return x;
}

}  // namespace

Transform Transform::klt(Eigen::MatrixXd basis) {
  if (basis.rows() != basis.cols())
    throw std::invalid_argument("klt: basis must be square");
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  const int L = int(basis.rows());
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      if (std::fabs(gram(i, j) - (i == j ? 1.0 : 0.0)) > 1e-10)
        throw std::invalid_argument("klt: basis is not orthogonal (B^T B != I)");
  Transform t(Kind::Klt);
  t.basis_ = std::move(basis);
  return t;
}

Transform Transform::from_name(const std::string& name) {
  if (name == "dct") return dct();
  if (name == "dwht") return dwht();
  if (name == "dht") return dht();
  throw std::invalid_argument("unknown transform name: " + name);
}

std::string Transform::name() const {
  switch (kind_) {
    case Kind::Dct: return "dct";
    case Kind::Dwht: return "dwht";
    case Kind::Dht: return "dht";
    case Kind::Klt: return "klt";
  }
  return "?";
}

const Eigen::MatrixXd& Transform::basis() const {
  if (kind_ != Kind::Klt) throw std::logic_error("basis(): not a KLT");
  return basis_;
}

Eigen::MatrixXd Transform::forward(const Eigen::MatrixXd& array) const {
  if (kind_ == Kind::Klt) {
    if (array.size() != basis_.rows())
      throw std::invalid_argument("klt forward: array size != basis dimension");
    const Eigen::VectorXd t = basis_.transpose() * vec_rowmajor(array);
    return unvec_rowmajor(t, int(array.rows()), int(array.cols()));
  }
  const Eigen::MatrixXd r = side_matrix(kind_, int(array.rows()));
  const Eigen::MatrixXd c = side_matrix(kind_, int(array.cols()));
  return r * array * c.transpose();
}

Eigen::MatrixXd Transform::inverse(const Eigen::MatrixXd& coeffs) const {
  if (kind_ == Kind::Klt) {
    if (coeffs.size() != basis_.rows())
      throw std::invalid_argument("klt inverse: array size != basis dimension");
    const Eigen::VectorXd x = basis_ * vec_rowmajor(coeffs);
    return unvec_rowmajor(x, int(coeffs.rows()), int(coeffs.cols()));
  }
  const Eigen::MatrixXd r = side_matrix(kind_, int(coeffs.rows()));
  const Eigen::MatrixXd c = side_matrix(kind_, int(coeffs.cols()));
  return r.transpose() * coeffs * c;
}

Eigen::MatrixXd Transform::matrix(int rows, int cols) const {
  if (kind_ == Kind::Klt) {
    if (basis_.rows() != std::int64_t(rows) * cols)
      throw std::invalid_argument("klt matrix: dimension mismatch");
    return basis_.transpose();
  }
  // Row-major vec: vec(R X C^T) = (R kron C) vec(X).
  const Eigen::MatrixXd r = side_matrix(kind_, rows);
  const Eigen::MatrixXd c = side_matrix(kind_, cols);
  Eigen::MatrixXd a(rows * cols, rows * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (int k = 0; k < rows; ++k)
        for (int l = 0; l < cols; ++l)
          a(i * cols + j, k * cols + l) = r(i, k) * c(j, l);
  return a;
}

Transform klt_fit(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols())
    throw std::invalid_argument("klt_fit: covariance must be square");
  const int L = int(cov.rows());
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j)
      if (std::fabs(cov(i, j) - cov(j, i)) > 1e-9 * std::max(1.0, std::fabs(cov(i, j))))
        throw std::invalid_argument("klt_fit: covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("klt_fit: eigendecomposition failed");
  // Solver returns ascending eigenvalues; emit descending. Stable sort so
  // equal eigenvalues keep the solver's own (deterministic) order.
  std::vector<int> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });
  Eigen::MatrixXd basis(L, L);
  for (int k = 0; k < L; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(order[k]);
    int arg = 0;
    for (int i = 1; i < L; ++i)
      if (std::fabs(v(i)) > std::fabs(v(arg))) arg = i;
    if (v(arg) < 0.0) v = -v;
    basis.col(k) = v;
  }
  return Transform::klt(std::move(basis));
}

double decorrelation_efficiency(const Eigen::MatrixXd& c_tt,
                                const Eigen::MatrixXd& c_xx) {
  if (c_tt.rows() != c_xx.rows() || c_tt.cols() != c_xx.cols())
    throw std::invalid_argument("decorrelation_efficiency: dimension mismatch");
  auto offdiag = [](const Eigen::MatrixXd& m) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (i != j) s += std::fabs(m(i, j));
    return s;
  };
  const double denom = offdiag(c_xx);
  if (denom <= 0.0)
    throw std::invalid_argument(
        "decorrelation_efficiency: source has no off-diagonal correlation");
  return 1.0 - offdiag(c_tt) / denom;
}

}  // namespace pufkey
