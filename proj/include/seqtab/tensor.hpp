#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqtab {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<int>;

std::string shape_str(const Shape& shape);
size_t shape_size(const Shape& shape);

// Dense row-major array.
template <typename T>
class Array {
 public:
  using value_type = T;

  Array() = default;
  explicit Array(Shape shape, T fill = T(0)) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}
  Array(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_size(shape_)) {
      throw ShapeError("array of shape " + shape_str(shape_) + " given " + std::to_string(data_.size()) + " values");
    }
  }

  static Array scalar(T v) { return Array({1}, std::vector<T>{v}); }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }
  // 2-D access; the array is treated as rows x (size / rows).
  T& at(int r, int c) { return data_[static_cast<size_t>(r) * static_cast<size_t>(cols2d()) + static_cast<size_t>(c)]; }
  const T& at(int r, int c) const {
    return data_[static_cast<size_t>(r) * static_cast<size_t>(cols2d()) + static_cast<size_t>(c)];
  }
  T item() const {
    if (data_.size() != 1) throw ShapeError("item() on array of shape " + shape_str(shape_));
    return data_[0];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void reshape(Shape s) {
    if (shape_size(s) != data_.size()) {
      throw ShapeError("cannot reshape " + shape_str(shape_) + " to " + shape_str(s));
    }
    shape_ = std::move(s);
  }

  template <typename U>
  Array<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Array<U>(shape_, std::move(out));
  }

  bool operator==(const Array&) const = default;

 private:
  int cols2d() const { return shape_.empty() ? 1 : static_cast<int>(data_.size() / static_cast<size_t>(shape_[0])); }

  Shape shape_;
  std::vector<T> data_;
};

// Trainable array with its gradient accumulator.
template <typename T>
struct Parameter {
  std::string name;
  Array<T> value;
  Array<T> grad;

  Parameter() = default;
  Parameter(std::string n, Array<T> v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
  void zero_grad() { grad = Array<T>(value.shape()); }
};

// Deterministic uniform(-scale, scale) initializer independent of the
// standard library's distribution implementations.
class UniformInit {
 public:
  explicit UniformInit(unsigned long long seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}
  double next_unit();  // [0, 1)
  template <typename T>
  void fill(Array<T>& a, double scale) {
    for (auto& v : a.values()) v = static_cast<T>((2.0 * next_unit() - 1.0) * scale);
  }

 private:
  unsigned long long state_;
};

}  // namespace seqtab
