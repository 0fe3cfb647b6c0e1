#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace pufkey {

// Coefficient arrays use a 1-based row-major index that starts at the
// top-left (DC) position and advances along each row: index 1 = (0,0),
// index 2 = (0,1), ..., index cols+1 = (1,0).
inline int coeff_index(int row, int col, int cols) { return row * cols + col + 1; }
inline std::pair<int, int> coeff_rowcol(int index, int cols) {
  return {(index - 1) / cols, (index - 1) % cols};
}

// Orthonormal 2D transforms over r x c arrays. DCT is the type-II orthonormal
// DCT; DWHT is the natural-order Walsh-Hadamard transform scaled 1/sqrt(L);
// DHT is the full-depth orthonormal Haar transform; KLT multiplies the
// row-major vectorized array by a stored orthogonal basis.
class Transform {
 public:
  enum class Kind { Dct, Dwht, Dht, Klt };

  static Transform dct() { return Transform(Kind::Dct); }
  static Transform dwht() { return Transform(Kind::Dwht); }
  static Transform dht() { return Transform(Kind::Dht); }
  // basis columns are the analysis directions: forward computes basis^T * vec(x).
  static Transform klt(Eigen::MatrixXd basis);
  // "dct", "dwht", "dht" (KLT needs a basis and has no bare name form).
  static Transform from_name(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& array) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& coeffs) const;

  // The L x L matrix A with vec(forward(x)) = A * vec(x), row-major vec.
  // Used to propagate covariances: C_TT = A * C_XX * A^T.
  Eigen::MatrixXd matrix(int rows, int cols) const;

  const Eigen::MatrixXd& basis() const;  // KLT only

 private:
  explicit Transform(Kind k) : kind_(k) {}
  Kind kind_;
  Eigen::MatrixXd basis_;  // KLT analysis basis (columns orthonormal)
};

// Eigendecomposition of a PSD covariance: basis columns sorted by descending
// eigenvalue, each flipped so its largest-magnitude component is positive
// (first such component on ties). Equal eigenvalues keep solver order.
Transform klt_fit(const Eigen::MatrixXd& cov);

// eta_c = 1 - offdiag_abs_sum(C_TT) / offdiag_abs_sum(C_XX).
double decorrelation_efficiency(const Eigen::MatrixXd& c_tt,
                                const Eigen::MatrixXd& c_xx);

}  // namespace pufkey
