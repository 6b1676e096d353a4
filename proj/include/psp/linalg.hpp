#pragma once

#include "psp/rng.hpp"
#include "psp/types.hpp"

namespace psp {

Vec matvec(const Mat& a, const Vec& x);
CVec matvec(const CMat& a, const CVec& x);

Vec hadamard(const Vec& a, const Vec& b);
CVec hadamard(const CVec& a, const CVec& b);

struct QrResult {
  Mat q;
  Mat r;
};

/// Householder QR of a square full-rank matrix. Rejects inputs whose R has
/// a diagonal entry below 1e-10 relative to the largest one.
QrResult qr_orthonormalize(const Mat& a);

/// Gaussian matrix/vector fills in fixed row-major draw order.
Mat gaussian_matrix(Index rows, Index cols, SeededRng& rng);
Vec gaussian_vector(Index n, SeededRng& rng);
CVec gaussian_cvector(Index n, SeededRng& rng);

/// Orthogonal matrix drawn from the O(M) Haar distribution: Gaussian fill,
/// QR, then each column of Q scaled by the sign of the matching diagonal
/// entry of R to strip the factorization's sign gauge.
Mat sample_haar_orthogonal(Index m, SeededRng& rng);

/// The image C*w of w under a Haar-random orthogonal C, sampled without
/// materializing C: the image is uniform on the sphere of radius |w|, so
/// it equals |w| * g / |g| for a Gaussian g. O(M) per draw where the dense
/// route costs O(M^3); agreement of the two routes is covered by tests.
Vec haar_rotate(const Vec& w, SeededRng& rng);

}  // namespace psp
