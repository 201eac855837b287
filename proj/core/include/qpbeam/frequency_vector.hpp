#pragma once

#include <span>
#include <vector>

namespace qpbeam {

/// Forcing frequency omega in R^nu, normalized so that |omega|_2 <= 1.
class FrequencyVector {
 public:
  FrequencyVector() = default;
  /// Throws qpbeam::Error if the vector is empty or |omega|_2 exceeds 1.
  explicit FrequencyVector(std::vector<double> components);

  /// Rescales an arbitrary nonzero vector to unit Euclidean length.
  static FrequencyVector normalized(std::vector<double> components);

  int dimension() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<double>& components() const noexcept { return components_; }
  double operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }

  double dot(std::span<const int> k) const;
  double euclidean_norm() const;
  double max_abs() const;

 private:
  std::vector<double> components_;
};

}  // namespace qpbeam
