#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qcic/eig.hpp"
#include "qcic/states.hpp"

namespace qcic {

// -------------------------------------------------------------------------
// scalar entropy helpers (all logarithms base 2)
// -------------------------------------------------------------------------

inline double xlog2x(double x) { return x <= 0.0 ? 0.0 : x * std::log2(x); }

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw OutOfRange("binary_entropy(" + std::to_string(p) + ")");
  return -xlog2x(p) - xlog2x(1.0 - p);
}

// Inverse of h2 restricted to [0, 0.5], by bisection. Monotone nondecreasing
// in y by construction.
inline double binary_entropy_inv(double y) {
  if (y < 0.0 || y > 1.0) throw OutOfRange("binary_entropy_inv(" + std::to_string(y) + ")");
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double shannon_entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s -= xlog2x(v);
  return s;
}

// -------------------------------------------------------------------------
// spectral measures on density operators
// -------------------------------------------------------------------------

namespace detail {

// Eigenvalues of a density matrix, clipped to [0, 1]. Negatives in
// [-1e-10, 0) are treated as roundoff zeros; below -1e-8 is an error.
inline std::vector<double> clipped_spectrum(const ComplexMatrix& m) {
  const EigResult e = hermitian_eig(m, 1e-8);
  std::vector<double> out;
  out.reserve(e.values.size());
  for (double v : e.values) {
    if (v < -1e-8) throw InvalidState("density eigenvalue " + std::to_string(v) + " below -1e-8");
    out.push_back(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

inline double entropy_of_matrix(const ComplexMatrix& m) {
  double s = 0.0;
  for (double v : clipped_spectrum(m)) s -= xlog2x(v);
  return s;
}

}  // namespace detail

inline double von_neumann_entropy(const DensityOperator& rho) {
  return detail::entropy_of_matrix(rho.matrix);
}

// I(A:B) = S(A) + S(B) - S(AB); registers outside A u B are traced out.
inline double mutual_information(const DensityOperator& rho, const std::vector<std::string>& part_a,
                                 const std::vector<std::string>& part_b) {
  std::vector<int> ia, ib;
  for (const std::string& n : part_a) ia.push_back(rho.layout.index_of(n));
  for (const std::string& n : part_b) ib.push_back(rho.layout.index_of(n));
  for (int x : ia)
    if (std::find(ib.begin(), ib.end(), x) != ib.end())
      throw OverlappingParts(rho.layout.factors[x].name);

  const std::vector<int> dims = rho.layout.dims();
  std::vector<int> iab = ia;
  iab.insert(iab.end(), ib.begin(), ib.end());
  std::sort(iab.begin(), iab.end());
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());

  const double sa = detail::entropy_of_matrix(partial_trace_matrix(rho.matrix, dims, ia));
  const double sb = detail::entropy_of_matrix(partial_trace_matrix(rho.matrix, dims, ib));
  const double sab = detail::entropy_of_matrix(partial_trace_matrix(rho.matrix, dims, iab));
  return sa + sb - sab;
}

// I(A:B|C) = I(A:BC) - I(A:C); the chain rule holds exactly by construction.
inline double conditional_mi(const DensityOperator& rho, const std::vector<std::string>& part_a,
                             const std::vector<std::string>& part_b,
                             const std::vector<std::string>& part_c) {
  std::set<std::string> seen;
  for (const auto* part : {&part_a, &part_b, &part_c})
    for (const std::string& n : *part)
      if (!seen.insert(n).second) throw OverlappingParts(n);

  if (part_c.empty()) return mutual_information(rho, part_a, part_b);
  std::vector<std::string> bc = part_b;
  bc.insert(bc.end(), part_c.begin(), part_c.end());
  return mutual_information(rho, part_a, bc) - mutual_information(rho, part_a, part_c);
}

inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!rho.layout.same_shape(sigma.layout))
    throw DimensionMismatch("trace_distance between different layouts");
  const EigResult e = hermitian_eig(rho.matrix - sigma.matrix, 1e-8);
  double s = 0.0;
  for (double v : e.values) s += std::abs(v);
  return 0.5 * s;
}

// Trace distance between pure states; equals sqrt(1 - |<psi|phi>|^2).
inline double trace_distance(const PureState& a, const PureState& b) {
  const double ov = overlap(a, b);
  return std::sqrt(std::max(0.0, 1.0 - ov * ov));
}

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), a.k.a. the
// Bhattacharyya coefficient. Equals |<psi|phi>| on pure states.
inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!rho.layout.same_shape(sigma.layout))
    throw DimensionMismatch("fidelity between different layouts");
  const EigResult er = hermitian_eig(rho.matrix, 1e-8);
  const int n = rho.dim();
  ComplexMatrix sqrt_rho(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sqrt(std::max(0.0, er.values[k]));
    if (s == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      const cplx vik = s * er.vectors(i, k);
      for (int j = 0; j < n; ++j) sqrt_rho(i, j) += vik * std::conj(er.vectors(j, k));
    }
  }
  const ComplexMatrix inner_m = sqrt_rho * sigma.matrix * sqrt_rho;
  const EigResult em = hermitian_eig(inner_m, 1e-6);
  // sqrt amplifies eigenvalue roundoff (1e-16 -> 1e-8), so eigenvalues at the
  // noise floor of the top one are treated as exact zeros of the low-rank case
  const double lmax = em.values.empty() ? 0.0 : std::max(0.0, em.values.front());
  const double noise_floor = 32.0 * n * 2.220446049250313e-16 * lmax;
  double f = 0.0;
  for (double v : em.values)
    if (v > noise_floor) f += std::sqrt(v);
  return f;
}

// -------------------------------------------------------------------------
// classical-quantum conditional mutual information
// -------------------------------------------------------------------------

namespace detail {

struct PartSplit {
  std::vector<int> coords;        // classical coordinate indices
  std::vector<std::string> regs;  // quantum register names
};

inline PartSplit split_part(const CqEnsemble& ens, const std::vector<std::string>& names) {
  PartSplit out;
  for (const std::string& n : names) {
    const int c = ens.coord_index(n);
    if (c >= 0)
      out.coords.push_back(c);
    else if (ens.layout.find(n) >= 0)
      out.regs.push_back(n);
    else
      throw UnknownRegister(n);
  }
  return out;
}

// Quantum MI of one conditional branch: groups is a list of
// (weight, density on partB registers) keyed by the partA classical value.
// I(A:B) = S(sum_a w_a rho_a) - sum_a w_a S(rho_a) for classical A.
inline double cq_branch_mi(const std::vector<std::pair<double, ComplexMatrix>>& groups) {
  if (groups.empty()) return 0.0;
  ComplexMatrix avg = groups.front().second * cplx(groups.front().first, 0.0);
  for (size_t i = 1; i < groups.size(); ++i) avg = avg + groups[i].second * cplx(groups[i].first, 0.0);
  double s = entropy_of_matrix(avg);
  for (const auto& [w, m] : groups)
    if (w > 0.0) s -= w * entropy_of_matrix(m);
  return s;
}

}  // namespace detail

// Exact conditional mutual information over a cq ensemble:
// I(A:B|C) = sum_c p_c I(A:B | C=c), with C given by classical coordinate
// selectors. Parts may name classical coordinates or quantum registers.
// Branches of probability zero are skipped.
inline double classical_conditional_mi(const CqEnsemble& ens, const std::vector<std::string>& part_a,
                                       const std::vector<std::string>& part_b,
                                       const std::vector<int>& cond_coords) {
  const detail::PartSplit pa = detail::split_part(ens, part_a);
  const detail::PartSplit pb = detail::split_part(ens, part_b);
  for (int c : pa.coords)
    if (std::find(pb.coords.begin(), pb.coords.end(), c) != pb.coords.end())
      throw OverlappingParts(ens.coord_names[c]);
  for (const std::string& r : pa.regs)
    if (std::find(pb.regs.begin(), pb.regs.end(), r) != pb.regs.end()) throw OverlappingParts(r);
  for (int c : cond_coords) {
    if (c < 0 || c >= static_cast<int>(ens.coord_names.size()))
      throw OutOfRange("conditioning coordinate " + std::to_string(c));
    if (std::find(pa.coords.begin(), pa.coords.end(), c) != pa.coords.end() ||
        std::find(pb.coords.begin(), pb.coords.end(), c) != pb.coords.end())
      throw OverlappingParts("conditioning on " + ens.coord_names[c]);
  }

  // group branches by the conditioning value
  std::map<std::vector<int>, std::vector<const CqEnsemble::Branch*>> by_cond;
  for (const CqEnsemble::Branch& b : ens.branches) {
    std::vector<int> key;
    key.reserve(cond_coords.size());
    for (int c : cond_coords) key.push_back(b.label[c]);
    by_cond[key].push_back(&b);
  }

  const std::vector<int> qdims = ens.layout.dims();
  double total = 0.0;
  for (const auto& [key, branches] : by_cond) {
    double pc = 0.0;
    for (const auto* b : branches) pc += b->probability;
    if (pc <= 0.0) continue;  // empty branch, weight 0

    if (pa.regs.empty() && pb.coords.empty()) {
      // fast path: A fully classical, B quantum. Group by the A-value,
      // average each group's reduced state on the B registers.
      std::vector<int> keep;
      for (const std::string& r : pb.regs) keep.push_back(ens.layout.index_of(r));
      std::sort(keep.begin(), keep.end());

      std::map<std::vector<int>, std::pair<double, ComplexMatrix>> groups;
      for (const auto* b : branches) {
        std::vector<int> akey;
        for (int c : pa.coords) akey.push_back(b->label[c]);
        const DensityOperator rho = ens.branch_density(*b);
        ComplexMatrix reduced = partial_trace_matrix(rho.matrix, qdims, keep);
        auto it = groups.find(akey);
        if (it == groups.end()) {
          groups.emplace(akey, std::make_pair(b->probability / pc,
                                              reduced * cplx(b->probability / pc, 0.0)));
        } else {
          it->second.first += b->probability / pc;
          it->second.second = it->second.second + reduced * cplx(b->probability / pc, 0.0);
        }
      }
      std::vector<std::pair<double, ComplexMatrix>> glist;
      for (auto& [akey, wm] : groups) {
        if (wm.first <= 0.0) continue;
        glist.emplace_back(wm.first, wm.second * cplx(1.0 / wm.first, 0.0));
      }
      total += pc * detail::cq_branch_mi(glist);
      continue;
    }

    // generic path: lift classical coordinates named in the parts to
    // explicit diagonal registers and use the quantum MI.
    std::vector<int> lifted;  // coordinate indices that become registers
    for (int c : pa.coords) lifted.push_back(c);
    for (int c : pb.coords) lifted.push_back(c);

    RegisterLayout lifted_layout;
    for (int c : lifted)
      lifted_layout.factors.push_back({"#coord:" + ens.coord_names[c], ens.coord_cards[c]});
    for (const auto& f : ens.layout.factors) lifted_layout.factors.push_back(f);

    const int ld = lifted_layout.total_dim();
    const int qd = ens.layout.total_dim();
    ComplexMatrix joint(ld, ld);
    for (const auto* b : branches) {
      int off = 0;
      for (int c : lifted) off = off * ens.coord_cards[c] + b->label[c];
      const DensityOperator rho = ens.branch_density(*b);
      const double w = b->probability / pc;
      for (int i = 0; i < qd; ++i)
        for (int j = 0; j < qd; ++j)
          joint(off * qd + i, off * qd + j) += w * rho.matrix(i, j);
    }

    std::vector<std::string> la, lb;
    for (int c : pa.coords) la.push_back("#coord:" + ens.coord_names[c]);
    for (const std::string& r : pa.regs) la.push_back(r);
    for (int c : pb.coords) lb.push_back("#coord:" + ens.coord_names[c]);
    for (const std::string& r : pb.regs) lb.push_back(r);
    total += pc * mutual_information(DensityOperator(lifted_layout, std::move(joint)), la, lb);
  }
  return total;
}

}  // namespace qcic
