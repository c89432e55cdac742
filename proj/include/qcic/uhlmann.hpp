#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qcic/eig.hpp"
#include "qcic/measures.hpp"
#include "qcic/states.hpp"

namespace qcic {

// Unitary on the `act_on` factors maximizing |<phi0| (V (x) I) |phi1>|.
// The maximizer aligns the two purifications, so the achieved overlap equals
// the fidelity of the reduced states on the complement registers.
//
// Construction: K = Tr_complement(|phi1><phi0|), SVD K = U S W^dag,
// V = W U^dag, which attains |Tr(V K)| = nuclear norm of K. Any V attaining
// the nuclear norm is acceptable when singular values are degenerate.
inline ComplexMatrix uhlmann_unitary(const PureState& phi0, const PureState& phi1,
                                     const std::vector<std::string>& act_on) {
  if (!phi0.layout.same_shape(phi1.layout))
    throw DimensionMismatch("uhlmann_unitary on states with different layouts");
  if (act_on.empty()) throw UnknownRegister("act_on must name at least one register");

  std::vector<int> targets;
  for (const std::string& n : act_on) targets.push_back(phi0.layout.index_of(n));
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const std::vector<int> dims = phi0.layout.dims();
  std::vector<int> rest;
  for (int i = 0; i < phi0.layout.size(); ++i)
    if (std::find(targets.begin(), targets.end(), i) == targets.end()) rest.push_back(i);

  int da = 1;
  for (int t : targets) da *= dims[t];

  const std::vector<int> strides_ = radix::strides(dims);
  std::vector<int> tdims, rdims;
  for (int t : targets) tdims.push_back(dims[t]);
  for (int r : rest) rdims.push_back(dims[r]);

  // K[a', a] = sum_b phi1[(a', b)] conj(phi0[(a, b)])
  ComplexMatrix k(da, da);
  std::vector<int> ta(targets.size()), tb(targets.size());
  radix::for_each(rdims, [&](const std::vector<int>& rc) {
    int base = 0;
    for (size_t i = 0; i < rest.size(); ++i) base += rc[i] * strides_[rest[i]];
    for (int a1 = 0; a1 < da; ++a1) {
      radix::unravel(a1, tdims, ta);
      int idx1 = base;
      for (size_t i = 0; i < targets.size(); ++i) idx1 += ta[i] * strides_[targets[i]];
      const cplx v1 = phi1.amplitudes[idx1];
      if (v1 == cplx(0.0, 0.0)) continue;
      for (int a0 = 0; a0 < da; ++a0) {
        radix::unravel(a0, tdims, tb);
        int idx0 = base;
        for (size_t i = 0; i < targets.size(); ++i) idx0 += tb[i] * strides_[targets[i]];
        k(a1, a0) += v1 * std::conj(phi0.amplitudes[idx0]);
      }
    }
  });

  const SvdResult s = svd_square(k);
  return s.w * dagger(s.u);
}

// Overlap achieved by a candidate alignment unitary, |<phi0|(V (x) I)|phi1>|.
inline double aligned_overlap(const PureState& phi0, const PureState& phi1, const ComplexMatrix& v,
                              const std::vector<std::string>& act_on) {
  const PureState moved = apply_on_registers(phi1, v, act_on);
  return overlap(phi0, moved);
}

}  // namespace qcic
