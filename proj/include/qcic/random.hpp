#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qcic/complex_matrix.hpp"
#include "qcic/states.hpp"

namespace qcic {

// Deterministic 64-bit PRNG (xoshiro-style splitmix step). Self-contained so
// identical seeds produce identical bytes on every platform; std::random
// distributions are avoided for the same reason.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Derive an independent stream, e.g. one per subcommand or per corpus seed.
  Rng split(uint64_t salt) {
    return Rng(next_u64() ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

  double gaussian() {
    // Box-Muller; cache the second value.
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  cplx gaussian_cplx() { return cplx(gaussian(), gaussian()); }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Haar-random unitary: QR of a Ginibre matrix by modified Gram-Schmidt with
// the R diagonal made real positive.
inline ComplexMatrix haar_unitary(Rng& rng, int n) {
  ComplexMatrix g(n, n);
  for (auto& e : g.entries) e = rng.gaussian_cplx();
  for (int j = 0; j < n; ++j) {
    for (int rep = 0; rep < 2; ++rep) {
      for (int prev = 0; prev < j; ++prev) {
        cplx dot = 0.0;
        for (int i = 0; i < n; ++i) dot += std::conj(g(i, prev)) * g(i, j);
        for (int i = 0; i < n; ++i) g(i, j) -= dot * g(i, prev);
      }
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += std::norm(g(i, j));
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) g(i, j) /= nrm;
  }
  return g;
}

inline PureState random_pure_state(Rng& rng, const RegisterLayout& layout) {
  PureState s;
  s.layout = layout;
  s.amplitudes.resize(layout.total_dim());
  double nrm = 0.0;
  for (auto& a : s.amplitudes) {
    a = rng.gaussian_cplx();
    nrm += std::norm(a);
  }
  nrm = std::sqrt(nrm);
  for (auto& a : s.amplitudes) a /= nrm;
  return s;
}

// Full-rank random density operator: normalized Wishart G G^dag / Tr.
inline DensityOperator random_density(Rng& rng, const RegisterLayout& layout) {
  const int d = layout.total_dim();
  ComplexMatrix g(d, d);
  for (auto& e : g.entries) e = rng.gaussian_cplx();
  ComplexMatrix w = g * dagger(g);
  const double tr = trace(w).real();
  for (auto& e : w.entries) e /= tr;
  return DensityOperator(layout, std::move(w));
}

}  // namespace qcic
