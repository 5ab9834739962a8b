#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace ghindex {

/// N points in the unit cube [0,1)^n, row-major, each carrying a stable id.
class PointCloud {
 public:
  PointCloud() = default;

  PointCloud(unsigned n, std::vector<double> coords, std::vector<std::uint64_t> ids)
      : n_(n), coords_(std::move(coords)), ids_(std::move(ids)) {
    if (n_ == 0) throw std::invalid_argument("point cloud dimension must be positive");
    if (coords_.size() != ids_.size() * n_) {
      throw std::invalid_argument("coordinate count does not match ids x dimension");
    }
    for (double x : coords_) {
      if (!(x >= 0.0 && x < 1.0)) {
        throw std::out_of_range("coordinate " + std::to_string(x) + " outside [0, 1)");
      }
    }
    std::unordered_set<std::uint64_t> seen(ids_.begin(), ids_.end());
    if (seen.size() != ids_.size()) throw std::invalid_argument("point ids are not unique");
  }

  /// Cloud whose ids are the row numbers 0..N-1.
  static PointCloud with_row_ids(unsigned n, std::vector<double> coords) {
    std::vector<std::uint64_t> ids(n == 0 ? 0 : coords.size() / n);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return PointCloud(n, std::move(coords), std::move(ids));
  }

  unsigned dimension() const noexcept { return n_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  std::span<const double> point(std::size_t row) const {
    return {coords_.data() + row * n_, n_};
  }
  std::uint64_t id(std::size_t row) const { return ids_[row]; }

  std::span<const double> coordinates() const noexcept { return coords_; }
  std::span<const std::uint64_t> ids() const noexcept { return ids_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  unsigned n_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint64_t> ids_;
};

}  // namespace ghindex
