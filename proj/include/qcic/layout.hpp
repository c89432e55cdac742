#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qcic/errors.hpp"

namespace qcic {

// Ordered named tensor factors. Factor 0 owns the most significant digit
// of a basis-state index, matching the Kronecker-product convention.
struct RegisterLayout {
  struct Factor {
    std::string name;
    int dim = 0;
  };

  std::vector<Factor> factors;

  int size() const { return static_cast<int>(factors.size()); }

  int total_dim() const {
    int d = 1;
    for (const Factor& f : factors) d *= f.dim;
    return d;
  }

  int find(const std::string& name) const {
    for (size_t i = 0; i < factors.size(); ++i)
      if (factors[i].name == name) return static_cast<int>(i);
    return -1;
  }

  int index_of(const std::string& name) const {
    const int i = find(name);
    if (i < 0) throw UnknownRegister(name);
    return i;
  }

  std::vector<int> indices_of(const std::vector<std::string>& names) const {
    std::vector<int> out;
    out.reserve(names.size());
    for (const std::string& n : names) out.push_back(index_of(n));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> dims() const {
    std::vector<int> out;
    out.reserve(factors.size());
    for (const Factor& f : factors) out.push_back(f.dim);
    return out;
  }

  bool names_unique() const {
    for (size_t i = 0; i < factors.size(); ++i)
      for (size_t j = i + 1; j < factors.size(); ++j)
        if (factors[i].name == factors[j].name) return false;
    return true;
  }

  bool valid() const {
    if (!names_unique()) return false;
    for (const Factor& f : factors)
      if (f.dim < 1 || f.name.empty()) return false;
    return true;
  }

  bool same_shape(const RegisterLayout& other) const {
    if (factors.size() != other.factors.size()) return false;
    for (size_t i = 0; i < factors.size(); ++i)
      if (factors[i].name != other.factors[i].name || factors[i].dim != other.factors[i].dim)
        return false;
    return true;
  }

  // Sub-layout of the given factor positions, in original order.
  RegisterLayout sub(const std::vector<int>& positions) const {
    RegisterLayout out;
    for (int p : positions) out.factors.push_back(factors[p]);
    return out;
  }

  RegisterLayout complement_of(const std::vector<int>& positions) const {
    RegisterLayout out;
    for (int i = 0; i < size(); ++i)
      if (std::find(positions.begin(), positions.end(), i) == positions.end())
        out.factors.push_back(factors[i]);
    return out;
  }
};

inline RegisterLayout make_layout(std::initializer_list<RegisterLayout::Factor> fs) {
  RegisterLayout l;
  l.factors.assign(fs.begin(), fs.end());
  return l;
}

// Mixed-radix index helpers over a dims vector (factor 0 most significant).
namespace radix {

inline std::vector<int> strides(const std::vector<int>& dims) {
  std::vector<int> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}

inline int ravel(const std::vector<int>& coords, const std::vector<int>& strides_) {
  int g = 0;
  for (size_t i = 0; i < coords.size(); ++i) g += coords[i] * strides_[i];
  return g;
}

inline void unravel(int g, const std::vector<int>& dims, std::vector<int>& coords) {
  coords.resize(dims.size());
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    coords[i] = g % dims[i];
    g /= dims[i];
  }
}

// Iterate every assignment of dims, invoking fn(coords).
template <typename Fn>
void for_each(const std::vector<int>& dims, Fn&& fn) {
  int total = 1;
  for (int d : dims) total *= d;
  std::vector<int> coords(dims.size(), 0);
  for (int g = 0; g < total; ++g) {
    unravel(g, dims, coords);
    fn(coords);
  }
}

}  // namespace radix

}  // namespace qcic
