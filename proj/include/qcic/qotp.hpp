#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcic/states.hpp"

namespace qcic {

// Quantum one-time pad key for a q-qubit block: 2q bits, laid out as
// (x_1, z_1, x_2, z_2, ...). E_s = tensor_i X^{x_i} Z^{z_i}; averaging the
// encryption over all 4^q keys yields the maximally mixed state.
struct QotpKey {
  std::vector<int> bits;

  int qubits() const { return static_cast<int>(bits.size()) / 2; }

  static QotpKey zero(int q) {
    QotpKey k;
    k.bits.assign(2 * q, 0);
    return k;
  }

  // Enumerate the 4^q key space by index.
  static QotpKey from_index(uint64_t v, int q) {
    QotpKey k;
    k.bits.resize(2 * q);
    for (int i = 0; i < 2 * q; ++i) k.bits[i] = static_cast<int>((v >> i) & 1);
    return k;
  }

  QotpKey xor_with(const QotpKey& o) const {
    QotpKey k = *this;
    for (size_t i = 0; i < bits.size() && i < o.bits.size(); ++i) k.bits[i] ^= o.bits[i];
    return k;
  }

  bool is_zero() const {
    for (int b : bits)
      if (b) return false;
    return true;
  }
};

// Apply E_s to the named qubit registers. X^a Z^b sends |v> to
// (-1)^{b v} |v + a>, so the whole layer is a signed index permutation.
inline PureState qotp_apply(const PureState& psi, const QotpKey& key,
                            const std::vector<std::string>& block) {
  if (static_cast<int>(key.bits.size()) != 2 * static_cast<int>(block.size()))
    throw KeyLengthMismatch(std::to_string(key.bits.size()) + " key bits for " +
                            std::to_string(block.size()) + " block qubits");
  const std::vector<int> dims = psi.layout.dims();
  std::vector<int> pos;
  for (const std::string& n : block) {
    const int f = psi.layout.index_of(n);
    if (dims[f] != 2) throw DimensionMismatch("QOTP block register '" + n + "' is not a qubit");
    pos.push_back(f);
  }
  const std::vector<int> strides_ = radix::strides(dims);

  PureState out = psi;
  const int d = psi.layout.total_dim();
  for (int g = 0; g < d; ++g) {
    int target = g;
    int sign = 0;
    for (size_t i = 0; i < pos.size(); ++i) {
      const int bit = (g / strides_[pos[i]]) % 2;
      sign ^= key.bits[2 * i + 1] & bit;          // Z phase on the input bit
      if (key.bits[2 * i]) target += bit ? -strides_[pos[i]] : strides_[pos[i]];  // X flip
    }
    out.amplitudes[target] = sign ? -psi.amplitudes[g] : psi.amplitudes[g];
  }
  return out;
}

// (1/4^q) sum_s E_s |psi><psi| E_s^dag over the full key space.
inline DensityOperator qotp_average(const PureState& psi, const std::vector<std::string>& block) {
  const int q = static_cast<int>(block.size());
  const uint64_t keys = uint64_t{1} << (2 * q);
  const int d = psi.layout.total_dim();
  ComplexMatrix acc(d, d);
  for (uint64_t v = 0; v < keys; ++v) {
    const PureState enc = qotp_apply(psi, QotpKey::from_index(v, q), block);
    for (int i = 0; i < d; ++i) {
      const cplx wi = enc.amplitudes[i] / static_cast<double>(keys);
      if (wi == cplx(0.0, 0.0)) continue;
      for (int j = 0; j < d; ++j) acc(i, j) += wi * std::conj(enc.amplitudes[j]);
    }
  }
  return DensityOperator(psi.layout, std::move(acc));
}

}  // namespace qcic
