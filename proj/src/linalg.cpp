#include "psp/linalg.hpp"

#include <cmath>

namespace psp {

Vec matvec(const Mat& a, const Vec& x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  return a * x;
}

CVec matvec(const CMat& a, const CVec& x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  return a * x;
}

Vec hadamard(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "hadamard: length mismatch");
  return a.cwiseProduct(b);
}

CVec hadamard(const CVec& a, const CVec& b) {
  require(a.size() == b.size(), "hadamard: length mismatch");
  return a.cwiseProduct(b);
}

QrResult qr_orthonormalize(const Mat& a) {
  require(a.rows() == a.cols() && a.rows() >= 1, "qr_orthonormalize: matrix must be square");
  Eigen::HouseholderQR<Mat> qr(a);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  const Vec diag_abs = r.diagonal().cwiseAbs();
  require(diag_abs.minCoeff() > 1e-10 * std::max(1.0, diag_abs.maxCoeff()),
          "qr_orthonormalize: matrix is rank-deficient within tolerance 1e-10");
  Mat q = qr.householderQ();
  return {std::move(q), std::move(r)};
}

Mat gaussian_matrix(Index rows, Index cols, SeededRng& rng) {
  Mat g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = rng.normal();
  return g;
}

Vec gaussian_vector(Index n, SeededRng& rng) {
  Vec g(n);
  for (Index i = 0; i < n; ++i) g[i] = rng.normal();
  return g;
}

CVec gaussian_cvector(Index n, SeededRng& rng) {
  CVec g(n);
  for (Index i = 0; i < n; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    g[i] = Complex(re, im);
  }
  return g;
}

Mat sample_haar_orthogonal(Index m, SeededRng& rng) {
  require(m >= 1, "sample_haar_orthogonal: dimension must be >= 1");
  const Mat g = gaussian_matrix(m, m, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  for (Index j = 0; j < m; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Vec haar_rotate(const Vec& w, SeededRng& rng) {
  require(w.size() >= 1, "haar_rotate: dimension must be >= 1");
  Vec g = gaussian_vector(w.size(), rng);
  double n = g.norm();
  while (n == 0.0) {  // probability zero, but keep the contract total
    g = gaussian_vector(w.size(), rng);
    n = g.norm();
  }
  return g * (w.norm() / n);
}

}  // namespace psp
