#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <vector>

#include "mri/errors.hpp"

namespace mri {

using cx = std::complex<double>;

/// Dense row-major n-d array. Axis order convention throughout the library
/// is [coil, echo, ky, kx], with leading axes dropped when absent.
template <typename T>
class NdArray {
public:
  NdArray() = default;

  explicit NdArray(std::vector<int> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (int s : shape_) {
      if (s < 1) throw DimensionError("NdArray: axis length must be >= 1");
      n *= static_cast<std::size_t>(s);
    }
    data_.assign(n, T{});
  }

  NdArray(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    std::size_t n = 1;
    for (int s : shape_) {
      if (s < 1) throw DimensionError("NdArray: axis length must be >= 1");
      n *= static_cast<std::size_t>(s);
    }
    if (n != data_.size())
      throw DimensionError("NdArray: data length does not match shape");
  }

  static NdArray zeros(std::vector<int> shape) { return NdArray(std::move(shape)); }

  int ndim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int shape(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // Trailing-axes accessors; leading axes collapse when the array is 2-d/3-d.
  T& at(int y, int x) { return data_[idx2(y, x)]; }
  const T& at(int y, int x) const { return data_[idx2(y, x)]; }
  T& at(int c, int y, int x) { return data_[idx3(c, y, x)]; }
  const T& at(int c, int y, int x) const { return data_[idx3(c, y, x)]; }
  T& at(int c, int e, int y, int x) { return data_[idx4(c, e, y, x)]; }
  const T& at(int c, int e, int y, int x) const { return data_[idx4(c, e, y, x)]; }

  /// Length of the last axis (kx) and second-to-last axis (ky).
  int nx() const { return shape_.empty() ? 0 : shape_.back(); }
  int ny() const { return ndim() < 2 ? 0 : shape_[shape_.size() - 2]; }

  bool same_shape(const NdArray& other) const { return shape_ == other.shape_; }

  std::string shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i)
      os << shape_[i] << (i + 1 < shape_.size() ? "," : "");
    os << "]";
    return os.str();
  }

private:
  std::size_t idx2(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(nx()) +
           static_cast<std::size_t>(x);
  }
  std::size_t idx3(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(ny()) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(nx()) +
           static_cast<std::size_t>(x);
  }
  std::size_t idx4(int c, int e, int y, int x) const {
    const std::size_t ne = static_cast<std::size_t>(shape_[shape_.size() - 3]);
    return ((static_cast<std::size_t>(c) * ne + static_cast<std::size_t>(e)) *
                static_cast<std::size_t>(ny()) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(nx()) +
           static_cast<std::size_t>(x);
  }

  std::vector<int> shape_;
  std::vector<T> data_;
};

using CxArray = NdArray<cx>;
using RealArray = NdArray<double>;
using ByteArray = NdArray<std::uint8_t>;

/// Image-domain magnetization m(r): [ny,nx] or echo-stacked [ne,ny,nx].
using ComplexImage = CxArray;
/// k-space data d(k): [nc,ny,nx] or [nc,ne,ny,nx].
using KSpaceData = CxArray;

}  // namespace mri
