#pragma once

// Scaled Gray-Hilbert tree generated by a point cloud, and the histogram view
// of the fixed-depth static tree.
//
// The tree is binary: every level splits one coordinate, and each block of n
// consecutive levels refines the cube once along every axis, in the order the
// block's TransformState prescribes. Children are stored in curve order, so a
// pre-order walk visits leaves in curve order. Node ids are pre-order ranks;
// the first child of an internal node is always id + 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ghindex/curve.hpp"
#include "ghindex/point_cloud.hpp"

namespace ghindex {

inline constexpr unsigned kDefaultMaxBits = 52;

enum class BucketStatus { Empty, Filled, Underfilled, Overfilled };

inline BucketStatus classify_bucket(std::size_t count, std::size_t capacity) {
  if (count == 0) return BucketStatus::Empty;
  if (count == capacity) return BucketStatus::Filled;
  return count < capacity ? BucketStatus::Underfilled : BucketStatus::Overfilled;
}

inline std::string_view to_string(BucketStatus status) {
  switch (status) {
    case BucketStatus::Empty: return "empty";
    case BucketStatus::Filled: return "filled";
    case BucketStatus::Underfilled: return "underfilled";
    case BucketStatus::Overfilled: return "overfilled";
  }
  return "unknown";
}

/// Leaf tallies of a tree over a cloud. `total` counts every leaf, empty ones
/// included; it is a double so that 2^(nk) static counts stay exact.
struct LeafCounts {
  double total = 0;
  std::uint64_t non_empty = 0;
  std::uint64_t overfilled = 0;

  friend bool operator==(const LeafCounts&, const LeafCounts&) = default;
};

struct TreeNode {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t second_child = kNone;
  std::uint32_t begin = 0;  // range into ScaledTree::ordered_ids()
  std::uint32_t end = 0;
  std::uint32_t block_state = kNone;  // set on internal nodes that open a block
  std::uint16_t depth = 0;            // bits from the root
  std::int16_t axis = -1;             // split coordinate; -1 on leaves

  bool is_leaf() const noexcept { return axis < 0; }
  std::size_t size() const noexcept { return end - begin; }
  std::uint32_t first_child(std::uint32_t self) const noexcept { return self + 1; }
};

class ScaledTree {
 public:
  unsigned dimension() const noexcept { return n_; }
  std::size_t capacity() const noexcept { return capacity_; }
  Scheme scheme() const noexcept { return scheme_; }
  unsigned max_bits() const noexcept { return max_bits_; }
  unsigned depth_limit() const noexcept { return n_ * max_bits_; }

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }

  /// All point ids in curve order; every node owns a contiguous slice.
  std::span<const std::uint64_t> ordered_ids() const noexcept { return ordered_ids_; }
  std::span<const std::uint64_t> points(const TreeNode& node) const {
    return std::span(ordered_ids_).subspan(node.begin, node.size());
  }

  const TransformState& block_state(const TreeNode& node) const { return block_states_.at(node.block_state); }

  BucketStatus status(const TreeNode& node) const { return classify_bucket(node.size(), capacity_); }

  LeafCounts leaf_counts() const {
    LeafCounts counts;
    for (const auto& node : nodes_) {
      if (!node.is_leaf()) continue;
      counts.total += 1;
      counts.non_empty += node.size() > 0;
      counts.overfilled += node.size() > capacity_;
    }
    return counts;
  }

 private:
  friend class TreeBuilder;

  unsigned n_ = 0;
  std::size_t capacity_ = 1;
  Scheme scheme_ = Scheme::Ring;
  unsigned max_bits_ = kDefaultMaxBits;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint64_t> ordered_ids_;
  std::vector<TransformState> block_states_;
};

class TreeBuilder {
 public:
  TreeBuilder(const PointCloud& cloud, std::size_t capacity, Scheme scheme, unsigned max_bits)
      : cloud_(cloud), n_(cloud.dimension()) {
    if (cloud.empty()) throw std::invalid_argument("cannot build a tree over an empty cloud");
    if (capacity < 1) throw std::invalid_argument("bucket capacity must be at least 1");
    if (max_bits < 1 || max_bits > 64) throw std::invalid_argument("max bits must be in [1, 64]");
    if (cloud.size() >= TreeNode::kNone) throw std::length_error("too many points");
    detail::check_dimension(n_);
    tree_.n_ = n_;
    tree_.capacity_ = capacity;
    tree_.scheme_ = scheme;
    tree_.max_bits_ = max_bits;

    fixed_.reserve(cloud.size() * n_);
    for (double x : cloud.coordinates()) fixed_.push_back(to_fixed_point(x));
    rows_.resize(cloud.size());
    std::iota(rows_.begin(), rows_.end(), 0u);
  }

  ScaledTree build() && {
    const auto root = TransformState::root(n_, tree_.scheme_);
    grow(0, static_cast<std::uint32_t>(rows_.size()), {root, 0, 0}, 0);
    tree_.ordered_ids_.reserve(rows_.size());
    for (auto row : rows_) tree_.ordered_ids_.push_back(cloud_.id(row));
    return std::move(tree_);
  }

 private:
  // Position inside the current block: `level` levels of it are already
  // split, `prefix` holds the traversal-rank bits chosen so far.
  struct Cursor {
    TransformState state;
    unsigned level;
    std::uint64_t prefix;
  };

  bool bit(std::uint32_t row, unsigned axis, unsigned block) const {
    return fixed_[std::size_t{row} * n_ + axis] >> (63 - block) & 1;
  }

  /// Partitions rows by the next rank bit; returns the split point and the
  /// split axis.
  std::pair<std::uint32_t, unsigned> split(std::uint32_t begin, std::uint32_t end, const Cursor& at,
                                           unsigned depth) {
    const unsigned axis = at.state.axis(n_ - 1 - at.level);
    const unsigned block = depth / n_;
    const bool flip = ((at.state.mask() >> axis) & 1) ^ (at.prefix & 1);
    auto mid = std::partition(rows_.begin() + begin, rows_.begin() + end,
                              [&](std::uint32_t row) { return bit(row, axis, block) == flip; });
    return {static_cast<std::uint32_t>(mid - rows_.begin()), axis};
  }

  Cursor descend(const Cursor& at, unsigned rank_bit) const {
    const std::uint64_t prefix = at.prefix << 1 | rank_bit;
    if (at.level + 1 < n_) return {at.state, at.level + 1, prefix};
    return {child_state(at.state, prefix, tree_.scheme_), 0, 0};
  }

  std::uint32_t grow(std::uint32_t begin, std::uint32_t end, const Cursor& at, unsigned depth) {
    if (tree_.nodes_.size() >= TreeNode::kNone - 1) throw std::length_error("tree too large");
    const auto id = static_cast<std::uint32_t>(tree_.nodes_.size());
    tree_.nodes_.push_back({TreeNode::kNone, begin, end, TreeNode::kNone,
                            static_cast<std::uint16_t>(depth), -1});
    if (end - begin <= tree_.capacity_ || depth == tree_.depth_limit()) {
      order_bucket(begin, end, at, depth);
      return id;
    }
    const auto [mid, axis] = split(begin, end, at, depth);
    tree_.nodes_[id].axis = static_cast<std::int16_t>(axis);
    if (at.level == 0) {
      tree_.nodes_[id].block_state = static_cast<std::uint32_t>(tree_.block_states_.size());
      tree_.block_states_.push_back(at.state);
    }
    grow(begin, mid, descend(at, 0), depth + 1);
    const auto second = grow(mid, end, descend(at, 1), depth + 1);
    tree_.nodes_[id].second_child = second;
    return id;
  }

  // Orders a bucket by continuing the curve refinement without creating
  // nodes; points still together at the depth limit are ordered by id.
  void order_bucket(std::uint32_t begin, std::uint32_t end, const Cursor& at, unsigned depth) {
    if (end - begin <= 1) return;
    if (depth == tree_.depth_limit()) {
      std::sort(rows_.begin() + begin, rows_.begin() + end,
                [&](std::uint32_t a, std::uint32_t b) { return cloud_.id(a) < cloud_.id(b); });
      return;
    }
    const auto mid = split(begin, end, at, depth).first;
    order_bucket(begin, mid, descend(at, 0), depth + 1);
    order_bucket(mid, end, descend(at, 1), depth + 1);
  }

  const PointCloud& cloud_;
  unsigned n_;
  std::vector<std::uint64_t> fixed_;
  std::vector<std::uint32_t> rows_;
  ScaledTree tree_;
};

/// Smallest subtree of the Gray-Hilbert tree whose leaves hold at most
/// `capacity` points, except leaves at the depth limit (n * max_bits bits).
/// Empty siblings forced by the binary structure are kept as Empty leaves.
inline ScaledTree build_scaled(const PointCloud& cloud, std::size_t capacity, Scheme scheme,
                               unsigned max_bits = kDefaultMaxBits) {
  return TreeBuilder(cloud, capacity, scheme, max_bits).build();
}

struct OrderedPoint {
  std::uint64_t id;
  std::uint64_t leaf;  // pre-order ordinal among all leaves, empty ones included

  friend bool operator==(const OrderedPoint&, const OrderedPoint&) = default;
};

inline std::vector<OrderedPoint> preorder_index(const ScaledTree& tree) {
  std::vector<OrderedPoint> order;
  order.reserve(tree.ordered_ids().size());
  std::uint64_t ordinal = 0;
  for (const auto& node : tree.nodes()) {
    if (!node.is_leaf()) continue;
    for (auto id : tree.points(node)) order.push_back({id, ordinal});
    ++ordinal;
  }
  return order;
}

/// Point counts of the non-empty leaves, in curve order.
inline std::vector<std::uint64_t> leaf_occupancies(const ScaledTree& tree) {
  std::vector<std::uint64_t> sizes;
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf() && node.size() > 0) sizes.push_back(node.size());
  }
  return sizes;
}

/// Histogram summary of the static tree of iteration k, never materialized.
struct StaticProfile {
  unsigned k = 0;
  LeafCounts counts;                     // counts.total == 2^(n k)
  std::vector<std::uint64_t> occupancies;  // non-empty cells, in curve order
};

inline StaticProfile static_profile(const PointCloud& cloud, unsigned k, Scheme scheme, std::size_t capacity) {
  const unsigned n = cloud.dimension();
  detail::check_dimension(n);
  if (k > 64) throw std::invalid_argument("at most 64 iterations supported");
  if (std::size_t{n} * k > 1023) throw std::overflow_error("2^(n k) leaves exceed double range");
  if (capacity < 1) throw std::invalid_argument("bucket capacity must be at least 1");

  StaticProfile profile;
  profile.k = k;
  profile.counts.total = std::ldexp(1.0, static_cast<int>(n * k));

  // Cell prefixes, n words per point; sorted so equal cells form runs.
  const std::size_t count = cloud.size();
  std::vector<std::uint64_t> prefixes(count * n);
  for (std::size_t i = 0; i < count; ++i) {
    const auto point = cloud.point(i);
    for (unsigned c = 0; c < n; ++c) {
      prefixes[i * n + c] = k == 0 ? 0 : to_fixed_point(point[c]) >> (64 - k);
    }
  }
  auto cell_of = [&](std::size_t row) { return std::span(prefixes).subspan(row * n, n); };
  std::vector<std::size_t> rows(count);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = cell_of(a), cb = cell_of(b);
    return std::lexicographical_compare(ca.begin(), ca.end(), cb.begin(), cb.end());
  });

  std::vector<std::pair<CurveKey, std::uint64_t>> cells;
  for (std::size_t i = 0; i < count;) {
    std::size_t j = i + 1;
    while (j < count && std::ranges::equal(cell_of(rows[i]), cell_of(rows[j]))) ++j;
    const auto run = static_cast<std::uint64_t>(j - i);
    profile.counts.non_empty += 1;
    profile.counts.overfilled += run > capacity;
    const auto cell = cell_of(rows[i]);
    cells.emplace_back(encode_key(CellAddress{{cell.begin(), cell.end()}, k}, scheme), run);
    i = j;
  }
  std::sort(cells.begin(), cells.end());
  profile.occupancies.reserve(cells.size());
  for (auto& [key, run] : cells) profile.occupancies.push_back(run);
  return profile;
}

}  // namespace ghindex
