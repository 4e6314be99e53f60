#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace normcluster {

using Vector = std::vector<double>;

/// Dense row-major n x d matrix of points. All rows share one dimension.
class Points {
public:
  Points() = default;
  explicit Points(std::size_t dim) : dim_(dim) {}
  Points(std::size_t rows, std::size_t dim) : dim_(dim), data_(rows * dim, 0.0) {}

  static Points from_rows(const std::vector<Vector>& rows);
  static Points from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }

  /// Appends a row. Throws InputError when the dimension differs.
  void push_back(std::span<const double> row);

  const double* data() const noexcept { return data_.data(); }
  std::span<const double> flat() const noexcept { return data_; }

  friend bool operator==(const Points&, const Points&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace normcluster
