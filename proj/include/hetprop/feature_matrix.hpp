#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetprop {

using NodeId = std::uint64_t;
using TypeId = std::uint32_t;
using ClassId = std::uint32_t;

// Read-only row-major view over rows x dim floats. Does not own the storage,
// which may live in a FeatureMatrix or in a memory-mapped file.
class FeatureView {
 public:
  FeatureView() = default;
  FeatureView(std::size_t rows, std::size_t dim, std::span<const float> data)
      : rows_(rows), dim_(dim), data_(data) {
    if (data.size() != rows * dim) {
      throw std::invalid_argument("FeatureView: data length " + std::to_string(data.size()) +
                                  " != rows*dim " + std::to_string(rows * dim));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> data() const { return data_; }
  std::span<const float> row(std::size_t i) const { return data_.subspan(i * dim_, dim_); }
  float operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::span<const float> data_;
};

// Dense row-major float matrix. Used for node features, relation embeddings
// and propagated hops.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}
  FeatureMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows * dim) {
      throw std::invalid_argument("FeatureMatrix: data length " + std::to_string(data_.size()) +
                                  " != rows*dim " + std::to_string(rows * dim));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::span<float> row(std::size_t i) { return std::span<float>(data_).subspan(i * dim_, dim_); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  float& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  float operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  FeatureView view() const { return FeatureView(rows_, dim_, data_); }
  operator FeatureView() const { return view(); }

  bool all_finite() const { return view().all_finite(); }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

// Bitwise equality of shape and contents.
bool bitwise_equal(FeatureView a, FeatureView b);

// Largest absolute elementwise difference; throws on shape mismatch.
double max_abs_diff(FeatureView a, FeatureView b);

}  // namespace hetprop
