#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace xray {

/// Dense row-major tensor of finite doubles. An empty shape denotes a scalar.
class Tensor {
 public:
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double v) { return {{}, {v}}; }
  static Tensor vector(std::vector<double> v) {
    const auto n = v.size();
    return {{n}, std::move(v)};
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::span<const double> data() const { return data_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }

  double operator[](std::size_t i) const { return data_[i]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

}  // namespace xray
