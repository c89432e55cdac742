#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "qcic/complex_matrix.hpp"
#include "qcic/eig.hpp"
#include "qcic/layout.hpp"

namespace qcic {

struct PureState {
  RegisterLayout layout;
  std::vector<cplx> amplitudes;

  PureState() = default;
  PureState(RegisterLayout l, std::vector<cplx> a) : layout(std::move(l)), amplitudes(std::move(a)) {}

  // |0...0> on the given layout
  static PureState zero(const RegisterLayout& l) {
    PureState s;
    s.layout = l;
    s.amplitudes.assign(l.total_dim(), cplx(0.0, 0.0));
    s.amplitudes[0] = 1.0;
    return s;
  }

  static PureState basis(const RegisterLayout& l, int index) {
    PureState s;
    s.layout = l;
    s.amplitudes.assign(l.total_dim(), cplx(0.0, 0.0));
    s.amplitudes[index] = 1.0;
    return s;
  }

  double norm() const {
    double n = 0.0;
    for (const cplx& a : amplitudes) n += std::norm(a);
    return std::sqrt(n);
  }

  void check_valid(double tol = 1e-10) const {
    if (!layout.valid()) throw InvalidState("bad register layout");
    if (static_cast<int>(amplitudes.size()) != layout.total_dim())
      throw InvalidState("amplitude count does not match layout dimension");
    if (std::abs(norm() - 1.0) > tol) throw InvalidState("norm deviates from 1");
  }
};

inline cplx inner(const PureState& a, const PureState& b) {
  if (a.amplitudes.size() != b.amplitudes.size())
    throw DimensionMismatch("inner product of states with different dimensions");
  cplx s = 0.0;
  for (size_t i = 0; i < a.amplitudes.size(); ++i) s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

// Overlap magnitude ignoring the global phase.
inline double overlap(const PureState& a, const PureState& b) { return std::abs(inner(a, b)); }

struct DensityOperator {
  RegisterLayout layout;
  ComplexMatrix matrix;

  DensityOperator() = default;
  DensityOperator(RegisterLayout l, ComplexMatrix m) : layout(std::move(l)), matrix(std::move(m)) {}

  int dim() const { return matrix.rows; }

  // Hermitian within 1e-10, eigenvalues >= -1e-10, unit trace. Eigenvalues in
  // [-1e-10, 0) are considered roundoff; anything below -1e-8 is an error.
  void check_valid() const {
    if (!layout.valid()) throw InvalidState("bad register layout");
    if (!matrix.square() || matrix.rows != layout.total_dim())
      throw InvalidState("matrix dimension does not match layout");
    if (!all_finite(matrix)) throw InvalidState("non-finite entries");
    if (!is_hermitian(matrix, 1e-10)) throw InvalidState("not Hermitian within 1e-10");
    if (std::abs(trace(matrix) - cplx(1.0, 0.0)) > 1e-10) throw InvalidState("trace deviates from 1");
    const EigResult e = hermitian_eig(matrix, 1e-8);
    for (double v : e.values)
      if (v < -1e-8) throw InvalidState("negative eigenvalue " + std::to_string(v));
  }
};

inline DensityOperator to_density(const PureState& psi) {
  const int d = static_cast<int>(psi.amplitudes.size());
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = psi.amplitudes[i] * std::conj(psi.amplitudes[j]);
  return DensityOperator(psi.layout, std::move(m));
}

// Weighted mixture of pure states sharing one layout. Weights need not be
// normalized here; callers pass probabilities.
inline DensityOperator mix(const RegisterLayout& layout,
                           const std::vector<std::pair<double, const PureState*>>& parts) {
  const int d = layout.total_dim();
  ComplexMatrix m(d, d);
  for (const auto& [w, psi] : parts) {
    if (w == 0.0) continue;
    for (int i = 0; i < d; ++i) {
      const cplx wi = w * psi->amplitudes[i];
      if (wi == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < d; ++j) m(i, j) += wi * std::conj(psi->amplitudes[j]);
    }
  }
  return DensityOperator(layout, std::move(m));
}

// Apply a unitary acting on the given factor positions (ascending order)
// to a pure state; the remaining factors are untouched.
inline PureState apply_on_factors(const PureState& psi, const ComplexMatrix& u,
                                  const std::vector<int>& targets) {
  const std::vector<int> dims = psi.layout.dims();
  int tdim = 1;
  for (int t : targets) tdim *= dims[t];
  if (u.rows != tdim || u.cols != tdim)
    throw DimensionMismatch("operator is " + std::to_string(u.rows) + "-dim, targets span " +
                            std::to_string(tdim));

  std::vector<int> rest;
  for (int i = 0; i < psi.layout.size(); ++i)
    if (std::find(targets.begin(), targets.end(), i) == targets.end()) rest.push_back(i);

  const std::vector<int> strides_ = radix::strides(dims);
  std::vector<int> tdims, rdims;
  for (int t : targets) tdims.push_back(dims[t]);
  for (int r : rest) rdims.push_back(dims[r]);

  PureState out = psi;
  std::vector<cplx> buf(tdim), res(tdim);
  radix::for_each(rdims, [&](const std::vector<int>& rc) {
    int base = 0;
    for (size_t i = 0; i < rest.size(); ++i) base += rc[i] * strides_[rest[i]];
    // gather
    std::vector<int> tc(targets.size(), 0);
    for (int g = 0; g < tdim; ++g) {
      radix::unravel(g, tdims, tc);
      int idx = base;
      for (size_t i = 0; i < targets.size(); ++i) idx += tc[i] * strides_[targets[i]];
      buf[g] = psi.amplitudes[idx];
    }
    for (int i = 0; i < tdim; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < tdim; ++j) s += u(i, j) * buf[j];
      res[i] = s;
    }
    for (int g = 0; g < tdim; ++g) {
      radix::unravel(g, tdims, tc);
      int idx = base;
      for (size_t i = 0; i < targets.size(); ++i) idx += tc[i] * strides_[targets[i]];
      out.amplitudes[idx] = res[g];
    }
  });
  return out;
}

inline PureState apply_on_registers(const PureState& psi, const ComplexMatrix& u,
                                    const std::vector<std::string>& names) {
  return apply_on_factors(psi, u, psi.layout.indices_of(names));
}

// Expand an operator on a factor subset to the full layout dimension.
inline ComplexMatrix embed_on_factors(const ComplexMatrix& u, const RegisterLayout& layout,
                                      const std::vector<int>& targets) {
  const std::vector<int> dims = layout.dims();
  const int d = layout.total_dim();
  std::vector<int> tdims;
  for (int t : targets) tdims.push_back(dims[t]);
  const std::vector<int> tstr = radix::strides(tdims);

  ComplexMatrix out(d, d);
  std::vector<int> rc, cc;
  for (int r = 0; r < d; ++r) {
    radix::unravel(r, dims, rc);
    for (int c = 0; c < d; ++c) {
      radix::unravel(c, dims, cc);
      bool rest_equal = true;
      for (int i = 0; i < layout.size() && rest_equal; ++i)
        if (std::find(targets.begin(), targets.end(), i) == targets.end() && rc[i] != cc[i])
          rest_equal = false;
      if (!rest_equal) continue;
      int tr = 0, tc = 0;
      for (size_t i = 0; i < targets.size(); ++i) {
        tr += rc[targets[i]] * tstr[i];
        tc += cc[targets[i]] * tstr[i];
      }
      out(r, c) = u(tr, tc);
    }
  }
  return out;
}

// Partial trace over everything outside `keep` (factor positions, any order);
// the result keeps the original factor order.
inline ComplexMatrix partial_trace_matrix(const ComplexMatrix& m, const std::vector<int>& dims,
                                          std::vector<int> keep) {
  std::sort(keep.begin(), keep.end());
  std::vector<int> traced;
  for (int i = 0; i < static_cast<int>(dims.size()); ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);

  const std::vector<int> strides_ = radix::strides(dims);
  std::vector<int> kdims, tdims;
  for (int k : keep) kdims.push_back(dims[k]);
  for (int t : traced) tdims.push_back(dims[t]);
  int kd = 1;
  for (int d : kdims) kd *= d;

  ComplexMatrix out(kd, kd);
  std::vector<int> kr(keep.size()), kc(keep.size());
  const std::vector<int> kstr = radix::strides(kdims);
  radix::for_each(kdims, [&](const std::vector<int>& krow) {
    const int orow = radix::ravel(krow, kstr);
    radix::for_each(kdims, [&](const std::vector<int>& kcol) {
      const int ocol = radix::ravel(kcol, kstr);
      cplx acc = 0.0;
      radix::for_each(tdims, [&](const std::vector<int>& tc) {
        int r = 0, c = 0;
        for (size_t i = 0; i < keep.size(); ++i) {
          r += krow[i] * strides_[keep[i]];
          c += kcol[i] * strides_[keep[i]];
        }
        for (size_t i = 0; i < traced.size(); ++i) {
          const int off = tc[i] * strides_[traced[i]];
          r += off;
          c += off;
        }
        acc += m(r, c);
      });
      out(orow, ocol) = acc;
    });
  });
  return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& keep_names) {
  std::vector<int> keep;
  keep.reserve(keep_names.size());
  for (const std::string& n : keep_names) keep.push_back(rho.layout.index_of(n));
  std::sort(keep.begin(), keep.end());
  return DensityOperator(rho.layout.sub(keep),
                         partial_trace_matrix(rho.matrix, rho.layout.dims(), keep));
}

// Classical-quantum ensemble: probability-weighted states indexed by a tuple
// of small integers (inputs, coins, ...). Coordinates are named so that
// information measures can refer to them alongside quantum registers.
struct CqEnsemble {
  struct Branch {
    std::vector<int> label;
    double probability = 0.0;
    std::variant<PureState, DensityOperator> state;
  };

  std::vector<std::string> coord_names;
  std::vector<int> coord_cards;  // cardinality per classical coordinate
  RegisterLayout layout;         // shared quantum layout
  std::vector<Branch> branches;

  void check_valid(double tol = 1e-12) const {
    double total = 0.0;
    for (const Branch& b : branches) {
      if (b.probability < 0.0) throw InvalidState("negative branch probability");
      if (b.label.size() != coord_names.size()) throw InvalidState("label arity mismatch");
      total += b.probability;
    }
    if (std::abs(total - 1.0) > tol) throw InvalidState("branch probabilities do not sum to 1");
  }

  int coord_index(const std::string& name) const {
    for (size_t i = 0; i < coord_names.size(); ++i)
      if (coord_names[i] == name) return static_cast<int>(i);
    return -1;
  }

  DensityOperator branch_density(const Branch& b) const {
    if (std::holds_alternative<PureState>(b.state)) return to_density(std::get<PureState>(b.state));
    return std::get<DensityOperator>(b.state);
  }
};

}  // namespace qcic
