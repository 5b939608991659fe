#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace irtid {

/// Binary response matrix, respondents as rows and items as columns.
class ResponseMatrix {
 public:
  ResponseMatrix() = default;
  ResponseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::uint8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<std::uint8_t> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const ResponseMatrix&, const ResponseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace irtid
