#pragma once

// Index quality measures comparing the scaled tree with the optimal static one.
//
//   omega(T, S) = overfilled leaves / non-empty leaves
//   Omega(T, S) = (1 + omega) * leaves
//   k           = ceil(log2(|S| / s) / n)           (static iteration)
//   R(S)        = Omega(T_scaled) / Omega(T_static)
//   rho(S, s)   : (2s)^rho = |S| / |L(T_scaled)| * (1 + omega(T_static))
//
// The leaves of T_scaled are the non-empty leaves of the built tree; empty
// siblings are structural and hold no bucket. T_static has all 2^(nk) leaves.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghindex/tree.hpp"

namespace ghindex {

inline constexpr double kRhoTolerance = 1e-9;

inline double omega(const LeafCounts& counts) {
  if (counts.non_empty == 0) throw std::domain_error("omega undefined without non-empty leaves");
  return static_cast<double>(counts.overfilled) / static_cast<double>(counts.non_empty);
}

inline double capacity_Omega(const LeafCounts& counts) { return (1.0 + omega(counts)) * counts.total; }

/// Smallest k >= 0 with s * 2^(n k) >= N, i.e. ceil(log2(N / s) / n) in exact
/// integer arithmetic.
inline unsigned static_k(std::uint64_t point_count, std::uint64_t capacity, unsigned n) {
  if (point_count < 1 || capacity < 1 || n < 1) throw std::invalid_argument("static_k needs N, s, n >= 1");
  unsigned k = 0;
  // s * 2^(nk) < N  <=>  2^(nk) < ceil(N / s)
  const std::uint64_t target = point_count / capacity + (point_count % capacity != 0);
  while (true) {
    const unsigned bits = n * k;
    if (bits >= 64 || (std::uint64_t{1} << bits) >= target) return k;
    ++k;
  }
}

/// Leaf tallies of the tree generated by the cloud: only buckets that hold points.
inline LeafCounts generated_leaves(const LeafCounts& built) {
  return {static_cast<double>(built.non_empty), built.non_empty, built.overfilled};
}

struct RhoResult {
  double value = 0;
  bool in_range = true;  // within [0, 1] up to kRhoTolerance
};

inline RhoResult local_sparsity_rho(std::uint64_t point_count, double scaled_leaves, double omega_static,
                                    std::uint64_t capacity) {
  if (capacity < 1) throw std::invalid_argument("bucket capacity must be at least 1");
  if (point_count < 1 || !(scaled_leaves > 0)) throw std::invalid_argument("rho needs a non-empty cloud");
  const double value = std::log(static_cast<double>(point_count) / scaled_leaves * (1.0 + omega_static)) /
                       std::log(2.0 * static_cast<double>(capacity));
  return {value, value >= -kRhoTolerance && value <= 1.0 + kRhoTolerance};
}

struct IndexMetrics {
  unsigned n = 0;
  std::uint64_t s = 1;
  Scheme scheme = Scheme::Ring;
  unsigned k = 0;
  std::uint64_t points = 0;
  LeafCounts scaled;      // generated tree: non-empty leaves only
  LeafCounts static_;     // all 2^(nk) leaves of the static tree
  std::uint64_t scaled_nodes = 0;
  double omega_scaled = 0;
  double omega_static = 0;
  double Omega_scaled = 0;
  double Omega_static = 0;
  double R = 0;
  double rho = 0;
  std::optional<std::string> diagnostic;
};

inline IndexMetrics compute_metrics(const ScaledTree& tree, const PointCloud& cloud) {
  IndexMetrics m;
  m.n = cloud.dimension();
  m.s = tree.capacity();
  m.scheme = tree.scheme();
  m.points = cloud.size();
  m.k = static_k(m.points, m.s, m.n);
  m.scaled = generated_leaves(tree.leaf_counts());
  m.scaled_nodes = tree.nodes().size();
  m.static_ = static_profile(cloud, m.k, m.scheme, m.s).counts;
  m.omega_scaled = omega(m.scaled);
  m.omega_static = omega(m.static_);
  m.Omega_scaled = capacity_Omega(m.scaled);
  m.Omega_static = capacity_Omega(m.static_);
  m.R = m.Omega_scaled / m.Omega_static;
  const auto rho = local_sparsity_rho(m.points, m.scaled.total, m.omega_static, m.s);
  m.rho = rho.value;
  if (!rho.in_range) {
    m.diagnostic = "rho = " + std::to_string(rho.value) + " outside [0, 1]";
  }
  return m;
}

inline IndexMetrics compute_metrics(const PointCloud& cloud, std::uint64_t capacity, Scheme scheme,
                                    unsigned max_bits = kDefaultMaxBits) {
  return compute_metrics(build_scaled(cloud, capacity, scheme, max_bits), cloud);
}

inline double capacity_ratio(const PointCloud& cloud, std::uint64_t capacity, Scheme scheme,
                             unsigned max_bits = kDefaultMaxBits) {
  return compute_metrics(cloud, capacity, scheme, max_bits).R;
}

inline RhoResult local_sparsity_rho(const PointCloud& cloud, std::uint64_t capacity, Scheme scheme,
                                    unsigned max_bits = kDefaultMaxBits) {
  const auto m = compute_metrics(cloud, capacity, scheme, max_bits);
  return {m.rho, !m.diagnostic};
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return {buffer, result.ptr};
}

inline constexpr const char* kMetricsCsvHeader =
    "n,s,scheme,k,leaves_scaled,leaves_static,omega_scaled,omega_static,Omega_scaled,Omega_static,R,rho";

inline std::string metrics_csv_row(const IndexMetrics& m) {
  std::string row = std::to_string(m.n) + ',' + std::to_string(m.s) + ',' + std::string(to_string(m.scheme)) +
                    ',' + std::to_string(m.k) + ',' + format_number(m.scaled.total) + ',';
  char buffer[400];
  std::snprintf(buffer, sizeof buffer, "%.0f", m.static_.total);  // exact for powers of two
  row += buffer;
  for (double x : {m.omega_scaled, m.omega_static, m.Omega_scaled, m.Omega_static, m.R, m.rho}) {
    row += ',' + format_number(x);
  }
  return row;
}

inline nlohmann::ordered_json metrics_json(const IndexMetrics& m) {
  nlohmann::ordered_json j;
  j["n"] = m.n;
  j["s"] = m.s;
  j["scheme"] = to_string(m.scheme);
  j["k"] = m.k;
  j["points"] = m.points;
  j["leaves_scaled"] = m.scaled.non_empty;
  j["nodes_scaled"] = m.scaled_nodes;
  j["leaves_static"] = m.static_.total;
  j["nonempty_static"] = m.static_.non_empty;
  j["overfilled_scaled"] = m.scaled.overfilled;
  j["overfilled_static"] = m.static_.overfilled;
  j["omega_scaled"] = m.omega_scaled;
  j["omega_static"] = m.omega_static;
  j["Omega_scaled"] = m.Omega_scaled;
  j["Omega_static"] = m.Omega_static;
  j["R"] = m.R;
  j["rho"] = m.rho;
  j["diagnostic"] = m.diagnostic ? nlohmann::ordered_json(*m.diagnostic) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace ghindex
