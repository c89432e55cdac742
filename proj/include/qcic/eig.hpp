#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qcic/complex_matrix.hpp"
#include "qcic/errors.hpp"

namespace qcic {

struct EigResult {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns, same order as values
};

namespace detail {

inline double offdiag_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace detail

// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi sweeps.
// Deterministic, no pivot search; sweeps run until the off-diagonal norm
// drops below 1e-12 relative to the matrix scale. Plenty for dim <= 256.
inline EigResult hermitian_eig(const ComplexMatrix& h, double herm_tol = 1e-8) {
  if (!h.square()) throw NotHermitian("matrix is not square");
  const int n = h.rows;
  if (!is_hermitian(h, herm_tol))
    throw NotHermitian("off-Hermitian part exceeds " + std::to_string(herm_tol));

  ComplexMatrix a = h;
  // enforce exact Hermitian symmetry so rotations keep the diagonal real
  for (int i = 0; i < n; ++i) {
    a(i, i) = cplx(a(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }

  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = std::max(1.0, frobenius_norm(a));
  // converge well past the 1e-12 contract; quadratic convergence makes the
  // extra sweeps cheap and keeps sqrt(eigenvalue) noise near roundoff
  const double tol = 1e-15 * scale;
  const int max_sweeps = 128;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (detail::offdiag_norm(a) <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= tol / (static_cast<double>(n))) continue;

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const cplx phase = apq / mag;  // e^{i phi}

        // rotation angle zeroing the (p,q) entry
        const double tau = (aqq - app) / (2.0 * mag);
        double t;
        if (std::isinf(tau)) {
          t = 0.0;
        } else if (tau >= 0.0) {
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx spq = s * phase;  // s e^{i phi}

        // A <- G^dag A G with G = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p,q)
        for (int k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - std::conj(spq) * akq;
          a(k, q) = spq * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - spq * aqk;
          a(q, k) = std::conj(spq) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);

        for (int k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - std::conj(spq) * vkq;
          v(k, q) = spq * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

  EigResult res;
  res.values.resize(n);
  res.vectors = ComplexMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    res.values[j] = a(order[j], order[j]).real();
    for (int i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
  }
  return res;
}

struct SvdResult {
  ComplexMatrix u;                   // left singular vectors (columns)
  std::vector<double> sigma;         // descending, >= 0
  ComplexMatrix w;                   // right singular vectors (columns); K = U diag(sigma) W^dag
};

namespace detail {

// Gram-Schmidt completion: fill the unset columns of m with unit vectors
// orthogonal to every column already set.
inline void fill_orthonormal(ComplexMatrix& m, std::vector<bool>& set) {
  const int n = m.rows;
  for (int cand = 0; cand < n; ++cand) {
    int slot = -1;
    for (int j = 0; j < n; ++j)
      if (!set[j]) {
        slot = j;
        break;
      }
    if (slot < 0) return;
    std::vector<cplx> v(n, cplx(0.0, 0.0));
    v[cand] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < n; ++j) {
        if (!set[j]) continue;
        cplx dot = 0.0;
        for (int i = 0; i < n; ++i) dot += std::conj(m(i, j)) * v[i];
        for (int i = 0; i < n; ++i) v[i] -= dot * m(i, j);
      }
    }
    double nrm = 0.0;
    for (const cplx& e : v) nrm += std::norm(e);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) continue;  // candidate inside the span, try the next one
    for (int i = 0; i < n; ++i) m(i, slot) = v[i] / nrm;
    set[slot] = true;
  }
}

inline void complete_orthonormal(ComplexMatrix& m, int filled) {
  std::vector<bool> set(m.rows, false);
  for (int j = 0; j < filled; ++j) set[j] = true;
  fill_orthonormal(m, set);
}

}  // namespace detail

// SVD of a square matrix, built from the eigendecomposition of K^dag K;
// left vectors are recovered as normalized images K w (phase alignment)
// and re-orthogonalized, with the null space completed to an orthonormal
// basis. Singular values below the eigensolver noise floor are treated as
// zero; ties in the null space are resolved arbitrarily, which is fine for
// every use here.
inline SvdResult svd_square(const ComplexMatrix& k) {
  if (!k.square()) throw DimensionMismatch("svd_square expects a square matrix");
  const int n = k.rows;
  const ComplexMatrix ktk = dagger(k) * k;
  const EigResult ew = hermitian_eig(ktk, 1e-6);

  SvdResult res;
  res.w = ew.vectors;
  res.sigma.resize(n);
  res.u = ComplexMatrix(n, n);

  const double scale = std::max(1.0, frobenius_norm(k));
  const double sig_tol = 1e-8 * scale;
  std::vector<bool> set(n, false);
  for (int j = 0; j < n; ++j) {
    const double s = std::sqrt(std::max(0.0, ew.values[j]));
    if (s <= sig_tol) {
      res.sigma[j] = 0.0;
      continue;
    }
    std::vector<cplx> col(n, cplx(0.0, 0.0));
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) col[i] += k(i, c) * res.w(c, j);
    // re-orthogonalize against the kept columns before normalizing
    for (int pass = 0; pass < 2; ++pass)
      for (int prev = 0; prev < j; ++prev) {
        if (!set[prev]) continue;
        cplx dot = 0.0;
        for (int i = 0; i < n; ++i) dot += std::conj(res.u(i, prev)) * col[i];
        for (int i = 0; i < n; ++i) col[i] -= dot * res.u(i, prev);
      }
    double nrm = 0.0;
    for (const cplx& e : col) nrm += std::norm(e);
    nrm = std::sqrt(nrm);
    if (nrm <= sig_tol) {
      res.sigma[j] = 0.0;
      continue;
    }
    res.sigma[j] = s;
    for (int i = 0; i < n; ++i) res.u(i, j) = col[i] / nrm;
    set[j] = true;
  }
  detail::fill_orthonormal(res.u, set);
  return res;
}

}  // namespace qcic
