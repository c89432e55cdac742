#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qcic/errors.hpp"

namespace qcic {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Carrier for every operator and state
// in the library; dimensions stay small (total dim <= ~256) so there is
// no attempt at sparsity or blocking.
struct ComplexMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<cplx> entries;  // row-major, length rows*cols

  ComplexMatrix() = default;
  ComplexMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<size_t>(r) * c) {}

  cplx& operator()(int r, int c) { return entries[static_cast<size_t>(r) * cols + c]; }
  const cplx& operator()(int r, int c) const { return entries[static_cast<size_t>(r) * cols + c]; }

  bool square() const { return rows == cols; }

  static ComplexMatrix zeros(int r, int c) { return ComplexMatrix(r, c); }

  static ComplexMatrix identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diag(const std::vector<double>& d) {
    ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
  }

  // Row-major initializer, for small literal matrices in tests and builders.
  static ComplexMatrix from_rows(int r, int c, std::initializer_list<cplx> vals) {
    ComplexMatrix m(r, c);
    size_t i = 0;
    for (cplx v : vals) m.entries[i++] = v;
    return m;
  }
};

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw DimensionMismatch("matrix add " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                            " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  ComplexMatrix out(a.rows, a.cols);
  for (size_t i = 0; i < a.entries.size(); ++i) out.entries[i] = a.entries[i] + b.entries[i];
  return out;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw DimensionMismatch("matrix sub " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                            " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  ComplexMatrix out(a.rows, a.cols);
  for (size_t i = 0; i < a.entries.size(); ++i) out.entries[i] = a.entries[i] - b.entries[i];
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, cplx s) {
  ComplexMatrix out = a;
  for (auto& e : out.entries) e *= s;
  return out;
}

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& a) { return a * s; }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols != b.rows)
    throw DimensionMismatch("matmul " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                            " * " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  ComplexMatrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline cplx trace(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionMismatch("trace of non-square matrix");
  cplx t = 0.0;
  for (int i = 0; i < a.rows; ++i) t += a(i, i);
  return t;
}

inline double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const cplx& e : a.entries) s += std::norm(e);
  return std::sqrt(s);
}

inline double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const cplx& e : a.entries) m = std::max(m, std::abs(e));
  return m;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw DimensionMismatch("max_abs_diff on mismatched shapes");
  double m = 0.0;
  for (size_t i = 0; i < a.entries.size(); ++i) m = std::max(m, std::abs(a.entries[i] - b.entries[i]));
  return m;
}

inline bool all_finite(const ComplexMatrix& a) {
  for (const cplx& e : a.entries)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (!a.square()) return false;
  for (int i = 0; i < a.rows; ++i)
    for (int j = i; j < a.cols; ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

inline bool is_unitary(const ComplexMatrix& a, double tol) {
  if (!a.square()) return false;
  // check U^dag U = I column by column
  for (int j = 0; j < a.cols; ++j) {
    for (int j2 = j; j2 < a.cols; ++j2) {
      cplx dot = 0.0;
      for (int i = 0; i < a.rows; ++i) dot += std::conj(a(i, j)) * a(i, j2);
      const cplx want = (j == j2) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      if (std::abs(dot - want) > tol) return false;
    }
  }
  return true;
}

// Kronecker product; the left factor owns the high-order index.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows * b.rows, a.cols * b.cols);
  for (int ia = 0; ia < a.rows; ++ia)
    for (int ja = 0; ja < a.cols; ++ja) {
      const cplx v = a(ia, ja);
      if (v == cplx(0.0, 0.0)) continue;
      for (int ib = 0; ib < b.rows; ++ib)
        for (int jb = 0; jb < b.cols; ++jb)
          out(ia * b.rows + ib, ja * b.cols + jb) = v * b(ib, jb);
    }
  return out;
}

inline std::vector<cplx> matvec(const ComplexMatrix& a, const std::vector<cplx>& v) {
  if (a.cols != static_cast<int>(v.size()))
    throw DimensionMismatch("matvec " + std::to_string(a.cols) + " vs " + std::to_string(v.size()));
  std::vector<cplx> out(a.rows, cplx(0.0, 0.0));
  for (int i = 0; i < a.rows; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

// Common single-qubit constants.
namespace gates {

inline ComplexMatrix pauli_x() { return ComplexMatrix::from_rows(2, 2, {0, 1, 1, 0}); }
inline ComplexMatrix pauli_z() { return ComplexMatrix::from_rows(2, 2, {1, 0, 0, -1}); }
inline ComplexMatrix pauli_y() {
  return ComplexMatrix::from_rows(2, 2, {0, cplx(0, -1), cplx(0, 1), 0});
}

}  // namespace gates

}  // namespace qcic
