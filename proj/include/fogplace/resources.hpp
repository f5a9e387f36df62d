#pragma once

#include <stdexcept>
#include <string>

namespace fogplace {

// Absolute tolerance for residual/capacity comparisons; absorbs floating
// point accumulation over long placement sequences.
inline constexpr double kResidualTol = 1e-9;

enum class Resource { Memory, Storage, Cpu };

inline const char* resource_name(Resource r) {
  switch (r) {
    case Resource::Memory: return "memory";
    case Resource::Storage: return "storage";
    case Resource::Cpu: return "cpu";
  }
  return "?";
}

// Memory [GB], storage [GB], CPU [MIPS]. Used both as a demand and as a
// capacity. Ordering is component-wise and therefore partial.
struct ResourceVector {
  double memory = 0.0;
  double storage = 0.0;
  double cpu = 0.0;

  double operator[](Resource r) const {
    switch (r) {
      case Resource::Memory: return memory;
      case Resource::Storage: return storage;
      case Resource::Cpu: return cpu;
    }
    throw std::logic_error("bad resource");
  }

  ResourceVector& operator+=(const ResourceVector& o) {
    memory += o.memory;
    storage += o.storage;
    cpu += o.cpu;
    return *this;
  }
  ResourceVector& operator-=(const ResourceVector& o) {
    memory -= o.memory;
    storage -= o.storage;
    cpu -= o.cpu;
    return *this;
  }
  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
  friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
  friend ResourceVector operator*(double s, const ResourceVector& v) {
    return {s * v.memory, s * v.storage, s * v.cpu};
  }
  bool operator==(const ResourceVector&) const = default;

  bool non_negative(double tol = 0.0) const {
    return memory >= -tol && storage >= -tol && cpu >= -tol;
  }
};

// Component-wise a <= b with absolute tolerance.
inline bool fits(const ResourceVector& a, const ResourceVector& b, double tol = kResidualTol) {
  return a.memory <= b.memory + tol && a.storage <= b.storage + tol && a.cpu <= b.cpu + tol;
}

inline constexpr Resource kAllResources[] = {Resource::Memory, Resource::Storage, Resource::Cpu};

}  // namespace fogplace
