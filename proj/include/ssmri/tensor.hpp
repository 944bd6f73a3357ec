#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ssmri {

// Dense row-major tensor of doubles. Problem sizes here are small (2D
// images, k-space grids, conv kernels), so everything is value-semantic.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, double fill_value);

  static Tensor scalar(double v);
  static Tensor zeros_like(const Tensor& t);

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(int i, int j) { return data_[flat(i, j)]; }
  double at(int i, int j) const { return data_[flat(i, j)]; }
  double& at(int i, int j, int k) { return data_[flat(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[flat(i, j, k)]; }
  double& at(int i, int j, int k, int l) { return data_[flat(i, j, k, l)]; }
  double at(int i, int j, int k, int l) const { return data_[flat(i, j, k, l)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  void fill(double v);

  bool operator==(const Tensor& o) const = default;

private:
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i) * shape_[1] + j;
  }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
  }
  std::size_t flat(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k) * shape_[3] + l;
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

std::size_t shape_size(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);
bool all_finite(const Tensor& t);

}  // namespace ssmri
