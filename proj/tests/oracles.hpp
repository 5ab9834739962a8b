#pragma once

// Reference constructions used only by tests. The Gray and Hilbert oracles are
// built from first principles; the key-sort oracle goes through encode_key,
// which shares no code with the tree builder's partitioning.

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ghindex/curve.hpp"
#include "ghindex/point_cloud.hpp"

namespace ghindex::oracle {

/// Reflected Gray code by the reflect-and-prefix construction.
inline std::vector<std::uint64_t> reflected_gray_list(unsigned n) {
  std::vector<std::uint64_t> codes{0};
  for (unsigned bit = 0; bit < n; ++bit) {
    const std::size_t half = codes.size();
    for (std::size_t i = half; i-- > 0;) codes.push_back(codes[i] | (std::uint64_t{1} << bit));
  }
  return codes;
}

/// Cells visited by the classical Hilbert curve of order k, produced by turtle
/// interpretation of the L-system A -> +BF-AFA-FB+, B -> -AF+BFB+FA-.
/// The turtle run starts at (0,0) heading east, which traces the curve that
/// leaves the origin upward; the result is transposed so that the top-level
/// quadrant order is lower-left, lower-right, upper-right, upper-left.
inline std::vector<std::pair<int, int>> hilbert_2d(unsigned k) {
  std::string program = "A";
  for (unsigned i = 0; i < k; ++i) {
    std::string next;
    for (char c : program) {
      if (c == 'A') next += "+BF-AFA-FB+";
      else if (c == 'B') next += "-AF+BFB+FA-";
      else next += c;
    }
    program = std::move(next);
  }
  int x = 0, y = 0, dx = 1, dy = 0;
  std::vector<std::pair<int, int>> cells{{0, 0}};
  for (char c : program) {
    if (c == '+') {
      std::swap(dx, dy);
      dx = -dx;
    } else if (c == '-') {
      std::swap(dx, dy);
      dy = -dy;
    } else if (c == 'F') {
      x += dx;
      y += dy;
      cells.emplace_back(x, y);
    }
  }
  for (auto& [a, b] : cells) std::swap(a, b);
  return cells;
}

/// Static curve order of a cloud: sort by the depth-k keys, ties by id.
inline std::vector<std::uint64_t> key_sorted_ids(const PointCloud& cloud, unsigned k, Scheme scheme) {
  std::vector<std::pair<CurveKey, std::uint64_t>> keyed;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    keyed.emplace_back(encode_key(point_to_cell(cloud.point(i), k), scheme), cloud.id(i));
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint64_t> ids;
  for (auto& entry : keyed) ids.push_back(entry.second);
  return ids;
}

}  // namespace ghindex::oracle
