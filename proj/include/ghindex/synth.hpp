#pragma once

// Seeded synthetic clouds. Clustered families place centres uniformly and
// displace each point from a random centre along a uniform random direction,
// with the radius drawn from the named distribution. Coordinates leaving the
// cube are reflected back at the faces.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ghindex/curve.hpp"
#include "ghindex/point_cloud.hpp"
#include "ghindex/random.hpp"

namespace ghindex {

enum class Distribution { Uniform, LognormalCluster, ParetoCluster, Mixture };

inline std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::Uniform: return "uniform";
    case Distribution::LognormalCluster: return "lognormal-cluster";
    case Distribution::ParetoCluster: return "pareto-cluster";
    case Distribution::Mixture: return "mixture";
  }
  return "unknown";
}

inline Distribution parse_distribution(std::string_view text) {
  for (auto d : {Distribution::Uniform, Distribution::LognormalCluster, Distribution::ParetoCluster,
                 Distribution::Mixture}) {
    if (text == to_string(d)) return d;
  }
  throw std::invalid_argument("unknown distribution '" + std::string(text) + "'");
}

struct SynthSpec {
  Distribution distribution = Distribution::Uniform;
  unsigned n = 2;
  std::size_t count = 1000;
  std::uint64_t seed = 42;
  double mu = -4.0;     // log-normal radius: log-scale mean
  double sigma = 1.0;   // log-normal radius: log-scale deviation
  double alpha = 2.5;   // Pareto radius exponent
  double xmin = 0.005;  // Pareto radius scale
  unsigned clusters = 16;
  double mixture_weight = 0.5;  // clustered share of a mixture

  void validate() const {
    detail::check_dimension(n);
    if (count < 1) throw std::invalid_argument("point count must be at least 1");
    if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be >= 0");
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 1");
    if (!(xmin > 0.0) || !std::isfinite(xmin)) throw std::invalid_argument("xmin must be > 0");
    if (clusters < 1) throw std::invalid_argument("cluster count must be at least 1");
    if (!(mixture_weight >= 0.0 && mixture_weight <= 1.0)) {
      throw std::invalid_argument("mixture weight must be in [0, 1]");
    }
  }
};

/// Reflects x into [0, 1).
inline double fold_unit(double x) {
  double y = std::fmod(x, 2.0);
  if (y < 0.0) y += 2.0;
  if (y >= 1.0) y = 2.0 - y;
  return y >= 1.0 ? std::nextafter(1.0, 0.0) : y;
}

inline PointCloud generate(const SynthSpec& spec) {
  spec.validate();
  Random rng(spec.seed);
  const unsigned n = spec.n;

  std::vector<double> centres(std::size_t{spec.clusters} * n);
  for (auto& c : centres) c = rng.uniform();

  std::vector<double> coords;
  coords.reserve(spec.count * n);
  std::vector<double> direction(n);

  auto clustered = [&](bool pareto) {
    const std::size_t cluster = rng.below(spec.clusters);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& d : direction) {
        d = rng.normal();
        norm += d * d;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    const double radius = pareto ? rng.pareto(spec.alpha, spec.xmin) : rng.lognormal(spec.mu, spec.sigma);
    for (unsigned c = 0; c < n; ++c) {
      coords.push_back(fold_unit(centres[cluster * n + c] + radius * direction[c] / norm));
    }
  };
  auto uniform = [&] {
    for (unsigned c = 0; c < n; ++c) coords.push_back(rng.uniform());
  };

  for (std::size_t i = 0; i < spec.count; ++i) {
    switch (spec.distribution) {
      case Distribution::Uniform: uniform(); break;
      case Distribution::LognormalCluster: clustered(false); break;
      case Distribution::ParetoCluster: clustered(true); break;
      case Distribution::Mixture:
        if (rng.uniform() < spec.mixture_weight) {
          clustered(false);
        } else {
          uniform();
        }
        break;
    }
  }
  return PointCloud::with_row_ids(n, std::move(coords));
}

}  // namespace ghindex
