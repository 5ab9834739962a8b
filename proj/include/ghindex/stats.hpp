#pragma once

// Heavy-tail diagnostics for occupancy samples.
//
// Tail distributions use the convention P(X >= x). Fits are continuous
// maximum likelihood even for integer samples. The power-law lower cutoff
// x_min minimizes the Kolmogorov-Smirnov distance over candidate cutoffs; the
// log-normal can be fitted to the whole sample or truncated to x >= x_min so
// that both models describe the same tail before they are compared.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ghindex/random.hpp"

namespace ghindex {

struct TailDistribution {
  std::vector<double> x;     // distinct values, ascending
  std::vector<double> ccdf;  // P(X >= x)
};

template <typename T>
TailDistribution tail_ccdf(std::span<const T> sample) {
  if (sample.empty()) throw std::invalid_argument("tail distribution of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  TailDistribution tail;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    tail.x.push_back(sorted[i]);
    tail.ccdf.push_back(static_cast<double>(sorted.size() - i) / n);
    i = j;
  }
  return tail;
}

template <typename T>
TailDistribution tail_ccdf(const std::vector<T>& sample) {
  return tail_ccdf(std::span<const T>(sample));
}

enum class Model { Lognormal, PowerLaw };

inline std::string_view to_string(Model m) { return m == Model::Lognormal ? "lognormal" : "powerlaw"; }

struct FitResult {
  Model model = Model::Lognormal;
  double mu = 0, sigma = 0;  // log-normal
  double alpha = 0;          // power law
  double xmin = 0;           // lower cutoff; 0 for an untruncated log-normal
  std::size_t n_tail = 0;    // sample points at or above xmin
  double log_likelihood = 0;
  double ks = 0;  // KS distance on the tail
  std::optional<double> gof_p;
};

struct ComparisonResult {
  double log_likelihood_ratio = 0;  // first model minus second
  double normalized_ratio = 0;
  double p_value = 1;
  std::size_t n_tail = 0;
};

namespace detail {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// log P(Z > z) for standard normal Z; accurate far into the upper tail.
inline double log_normal_survival(double z) {
  if (z < 30) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Mills ratio asymptotics
  return -0.5 * z * z - std::log(z) - kLogSqrt2Pi + std::log1p(-1.0 / (z * z) + 3.0 / (z * z * z * z));
}

inline void require_positive(std::span<const double> sample) {
  for (double x : sample) {
    if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument("sample values must be positive and finite");
  }
}

inline std::vector<double> sorted_copy(std::span<const double> sample) {
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  return v;
}

inline double lognormal_log_density(double x, double mu, double sigma) {
  const double lx = std::log(x);
  const double z = (lx - mu) / sigma;
  return -lx - std::log(sigma) - kLogSqrt2Pi - 0.5 * z * z;
}

/// Per-point log density of a fitted model; log-normals fitted with xmin > 0
/// are normalized on [xmin, inf).
inline double log_density(const FitResult& fit, double x) {
  if (fit.model == Model::PowerLaw) {
    return std::log(fit.alpha - 1.0) - std::log(fit.xmin) - fit.alpha * std::log(x / fit.xmin);
  }
  double value = lognormal_log_density(x, fit.mu, fit.sigma);
  if (fit.xmin > 0) value -= log_normal_survival((std::log(fit.xmin) - fit.mu) / fit.sigma);
  return value;
}

/// log P(X >= x) under a fitted model, for x at or above its cutoff.
inline double log_survival(const FitResult& fit, double x) {
  if (fit.model == Model::PowerLaw) return x > fit.xmin ? (1.0 - fit.alpha) * std::log(x / fit.xmin) : 0.0;
  if (!(x > 0)) return 0.0;
  double value = log_normal_survival((std::log(x) - fit.mu) / fit.sigma);
  if (fit.xmin > 0) value -= log_normal_survival((std::log(fit.xmin) - fit.mu) / fit.sigma);
  return value;
}

inline double model_cdf(const FitResult& fit, double x) {
  if (x < fit.xmin) return 0.0;
  if (fit.model == Model::PowerLaw) return -std::expm1((1.0 - fit.alpha) * std::log(x / fit.xmin));
  const double z = (std::log(x) - fit.mu) / fit.sigma;
  if (fit.xmin <= 0) return normal_cdf(z);
  const double z0 = (std::log(fit.xmin) - fit.mu) / fit.sigma;
  const double log_tail0 = log_normal_survival(z0);
  const double log_tail = log_normal_survival(z);
  return -std::expm1(log_tail - log_tail0);
}

/// KS distance between the empirical tail (ascending values) and a model.
inline double ks_distance(std::span<const double> tail, const FitResult& fit) {
  const double n = static_cast<double>(tail.size());
  double d = 0;
  for (std::size_t j = 0; j < tail.size(); ++j) {
    const double f = model_cdf(fit, tail[j]);
    d = std::max({d, std::abs(static_cast<double>(j + 1) / n - f), std::abs(f - static_cast<double>(j) / n)});
  }
  return d;
}

/// Nelder-Mead minimizer in two variables.
template <typename F>
std::array<double, 2> minimize2(F&& f, std::array<double, 2> start, std::array<double, 2> step, int iterations = 400) {
  std::array<std::array<double, 2>, 3> p{start, start, start};
  p[1][0] += step[0];
  p[2][1] += step[1];
  std::array<double, 3> v{f(p[0]), f(p[1]), f(p[2])};
  for (int it = 0; it < iterations; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    const auto best = p[idx[0]], mid = p[idx[1]], worst = p[idx[2]];
    const double vb = v[idx[0]], vm = v[idx[1]], vw = v[idx[2]];
    if (std::abs(vw - vb) <= 1e-12 * (std::abs(vb) + 1e-12)) break;
    const std::array<double, 2> c{(best[0] + mid[0]) / 2, (best[1] + mid[1]) / 2};
    auto along = [&](double t) { return std::array<double, 2>{c[0] + t * (worst[0] - c[0]), c[1] + t * (worst[1] - c[1])}; };
    const auto r = along(-1.0);
    const double vr = f(r);
    std::array<double, 2> next = r;
    double vnext = vr;
    if (vr < vb) {
      const auto e = along(-2.0);
      const double ve = f(e);
      if (ve < vr) {
        next = e;
        vnext = ve;
      }
    } else if (vr >= vm) {
      const auto k = along(vr < vw ? -0.5 : 0.5);
      const double vk = f(k);
      if (vk < std::min(vr, vw)) {
        next = k;
        vnext = vk;
      } else {
        // shrink towards the best vertex
        for (int i : {idx[1], idx[2]}) {
          p[i] = {(p[i][0] + best[0]) / 2, (p[i][1] + best[1]) / 2};
          v[i] = f(p[i]);
        }
        continue;
      }
    }
    p[idx[2]] = next;
    v[idx[2]] = vnext;
  }
  const auto best = std::min_element(v.begin(), v.end()) - v.begin();
  return p[best];
}

}  // namespace detail

/// Maximum-likelihood log-normal over the whole sample.
inline FitResult fit_lognormal(std::span<const double> sample) {
  if (sample.size() < 2) throw std::invalid_argument("log-normal fit needs at least two values");
  detail::require_positive(sample);
  const double n = static_cast<double>(sample.size());
  double sum = 0;
  for (double x : sample) sum += std::log(x);
  FitResult fit;
  fit.model = Model::Lognormal;
  fit.mu = sum / n;
  double ss = 0;
  for (double x : sample) ss += (std::log(x) - fit.mu) * (std::log(x) - fit.mu);
  fit.sigma = std::sqrt(ss / n);
  fit.n_tail = sample.size();
  if (fit.sigma > 0) {
    fit.log_likelihood = 0;
    for (double x : sample) fit.log_likelihood += detail::lognormal_log_density(x, fit.mu, fit.sigma);
    const auto sorted = detail::sorted_copy(sample);
    fit.ks = detail::ks_distance(sorted, fit);
  } else {
    fit.log_likelihood = std::numeric_limits<double>::infinity();
  }
  return fit;
}

inline FitResult fit_lognormal(const std::vector<double>& sample) { return fit_lognormal(std::span<const double>(sample)); }

/// Maximum-likelihood log-normal truncated to x >= xmin, fitted to that tail.
inline FitResult fit_lognormal_tail(std::span<const double> sample, double xmin) {
  if (!(xmin > 0)) throw std::invalid_argument("truncation point must be positive");
  std::vector<double> tail;
  for (double x : sample) {
    if (x >= xmin) tail.push_back(x);
  }
  if (tail.size() < 2) throw std::invalid_argument("log-normal tail fit needs at least two values at or above xmin");
  std::sort(tail.begin(), tail.end());
  const auto start = fit_lognormal(tail);
  if (!(start.sigma > 0)) throw std::invalid_argument("log-normal tail fit of a constant tail");

  const double n = static_cast<double>(tail.size());
  double sum_log = 0, sum_log2 = 0;
  for (double x : tail) {
    sum_log += std::log(x);
    sum_log2 += std::log(x) * std::log(x);
  }
  const double log_xmin = std::log(xmin);
  auto negative_ll = [&](std::array<double, 2> p) {
    const double mu = p[0], sigma = std::exp(p[1]);
    if (!std::isfinite(sigma) || sigma < 1e-12) return std::numeric_limits<double>::infinity();
    const double quad = (sum_log2 - 2 * mu * sum_log + n * mu * mu) / (2 * sigma * sigma);
    const double ll = -sum_log - n * std::log(sigma) - n * detail::kLogSqrt2Pi - quad -
                      n * detail::log_normal_survival((log_xmin - mu) / sigma);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };
  const auto best = detail::minimize2(negative_ll, {start.mu, std::log(start.sigma)}, {0.5 * start.sigma, 0.3}, 800);
  FitResult fit;
  fit.model = Model::Lognormal;
  fit.mu = best[0];
  fit.sigma = std::exp(best[1]);
  fit.xmin = xmin;
  fit.n_tail = tail.size();
  fit.log_likelihood = -negative_ll(best);
  fit.ks = detail::ks_distance(tail, fit);
  return fit;
}

inline FitResult fit_lognormal_tail(const std::vector<double>& sample, double xmin) {
  return fit_lognormal_tail(std::span<const double>(sample), xmin);
}

inline constexpr std::size_t kDefaultXminCandidates = 1000;

/// Continuous power law with x_min chosen by minimum KS distance. At most
/// max_candidates distinct values, spread evenly by rank, are tried; each
/// needs a tail of at least two points with some spread.
inline FitResult fit_powerlaw(std::span<const double> sample, std::size_t max_candidates = kDefaultXminCandidates) {
  if (sample.size() < 2) throw std::invalid_argument("power-law fit needs at least two values");
  detail::require_positive(sample);
  const auto sorted = detail::sorted_copy(sample);
  const std::size_t total = sorted.size();

  std::vector<double> logs(total);
  for (std::size_t i = 0; i < total; ++i) logs[i] = std::log(sorted[i]);
  std::vector<double> suffix(total + 1, 0.0);
  for (std::size_t i = total; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  // first index of each distinct value, except the largest
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < total; ++i) {
    if ((i == 0 || sorted[i] != sorted[i - 1]) && sorted[i] != sorted.back()) starts.push_back(i);
  }
  if (starts.empty()) throw std::invalid_argument("power-law fit of a constant sample (alpha unbounded)");
  std::vector<std::size_t> candidates;
  if (starts.size() <= max_candidates) {
    candidates = starts;
  } else {
    for (std::size_t c = 0; c < max_candidates; ++c) {
      candidates.push_back(starts[c * (starts.size() - 1) / (max_candidates - 1)]);
    }
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }

  FitResult best;
  best.model = Model::PowerLaw;
  best.ks = std::numeric_limits<double>::infinity();
  for (std::size_t i : candidates) {
    const double n = static_cast<double>(total - i);
    const double spread = suffix[i] - n * logs[i];
    if (!(spread > 0)) continue;
    const double alpha = 1.0 + n / spread;
    // KS on the tail with F(x) = 1 - exp((1 - alpha) (ln x - ln xmin))
    double d = 0;
    for (std::size_t j = i; j < total; ++j) {
      const double f = -std::expm1((1.0 - alpha) * (logs[j] - logs[i]));
      const double r = static_cast<double>(j - i);
      d = std::max({d, std::abs((r + 1) / n - f), std::abs(f - r / n)});
      if (d >= best.ks) break;
    }
    if (d < best.ks) {
      best.ks = d;
      best.alpha = alpha;
      best.xmin = sorted[i];
      best.n_tail = total - i;
      best.log_likelihood = n * std::log(alpha - 1.0) - n * logs[i] - alpha * spread;
    }
  }
  if (!std::isfinite(best.ks)) throw std::invalid_argument("power-law fit is degenerate (alpha unbounded)");
  return best;
}

inline FitResult fit_powerlaw(const std::vector<double>& sample, std::size_t max_candidates = kDefaultXminCandidates) {
  return fit_powerlaw(std::span<const double>(sample), max_candidates);
}

/// Log-likelihood ratio test on the points at or above the larger of the two
/// cutoffs, with both models conditioned on that common tail. Positive ratios
/// favor the first model; the p-value is two-sided.
inline ComparisonResult compare_models(std::span<const double> sample, const FitResult& first, const FitResult& second) {
  const double xmin = std::max(first.xmin, second.xmin);
  const double shift = detail::log_survival(second, xmin) - detail::log_survival(first, xmin);
  std::vector<double> diffs;
  for (double x : sample) {
    if (x >= xmin && x > 0) diffs.push_back(detail::log_density(first, x) - detail::log_density(second, x) + shift);
  }
  ComparisonResult result;
  result.n_tail = diffs.size();
  if (diffs.empty()) throw std::invalid_argument("no sample points in the common tail");
  const double n = static_cast<double>(diffs.size());
  const double ratio = std::accumulate(diffs.begin(), diffs.end(), 0.0);
  const double mean = ratio / n;
  double var = 0;
  for (double d : diffs) var += (d - mean) * (d - mean);
  var /= n;
  result.log_likelihood_ratio = ratio;
  if (ratio == 0 || !(var > 0)) {
    result.p_value = ratio == 0 ? 1.0 : 0.0;
    result.normalized_ratio = ratio == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ratio);
    return result;
  }
  result.normalized_ratio = ratio / std::sqrt(n * var);
  result.p_value = std::erfc(std::abs(ratio) / std::sqrt(2 * n * var));
  return result;
}

inline ComparisonResult compare_models(const std::vector<double>& sample, const FitResult& first,
                                       const FitResult& second) {
  return compare_models(std::span<const double>(sample), first, second);
}

inline constexpr std::size_t kMinReplicates = 100;

/// Bootstrap goodness of fit: the share of synthetic samples whose refitted KS
/// distance is at least the observed one. Synthetic samples keep the observed
/// body below xmin (resampled) and draw the tail from the fitted model; the
/// refit repeats the original procedure, including x_min selection for a
/// power law. Replicate r draws from derive_seed(seed, r).
inline double gof_bootstrap(std::span<const double> sample, const FitResult& fit, std::size_t replicates,
                            std::uint64_t seed, std::size_t max_candidates = kDefaultXminCandidates) {
  if (replicates < kMinReplicates) {
    throw std::invalid_argument("bootstrap needs at least " + std::to_string(kMinReplicates) + " replicates");
  }
  if (fit.model == Model::Lognormal && !(fit.sigma > 0)) throw std::invalid_argument("log-normal fit has sigma 0");
  std::vector<double> body;
  std::size_t tail_count = 0;
  for (double x : sample) {
    if (x >= fit.xmin) {
      ++tail_count;
    } else {
      body.push_back(x);
    }
  }
  if (tail_count == 0) throw std::invalid_argument("fit has an empty tail");
  const double tail_share = static_cast<double>(tail_count) / static_cast<double>(sample.size());
  const double log_tail0 =
      fit.model == Model::Lognormal && fit.xmin > 0 ? detail::log_normal_survival((std::log(fit.xmin) - fit.mu) / fit.sigma) : 0;

  std::size_t at_least = 0;
  std::vector<double> synthetic(sample.size());
  for (std::size_t r = 0; r < replicates; ++r) {
    Random rng(derive_seed(seed, r));
    for (auto& x : synthetic) {
      if (body.empty() || rng.uniform() < tail_share) {
        if (fit.model == Model::PowerLaw) {
          x = rng.pareto(fit.alpha, fit.xmin);
        } else if (fit.xmin <= 0) {
          x = rng.lognormal(fit.mu, fit.sigma);
        } else if (log_tail0 > std::log(0.05)) {
          do x = rng.lognormal(fit.mu, fit.sigma);
          while (x < fit.xmin);
        } else {
          // deep tail: invert the survival function by bisection on log x
          const double target = log_tail0 + std::log(rng.uniform_pos());
          double lo = std::log(fit.xmin), hi = lo + 1;
          while (detail::log_normal_survival((hi - fit.mu) / fit.sigma) > target) hi += (hi - lo);
          for (int i = 0; i < 100; ++i) {
            const double m = 0.5 * (lo + hi);
            (detail::log_normal_survival((m - fit.mu) / fit.sigma) > target ? lo : hi) = m;
          }
          x = std::exp(0.5 * (lo + hi));
        }
      } else {
        x = body[rng.below(body.size())];
      }
    }
    double d = 0;
    try {
      if (fit.model == Model::PowerLaw) {
        d = fit_powerlaw(synthetic, max_candidates).ks;
      } else if (fit.xmin > 0) {
        d = fit_lognormal_tail(synthetic, fit.xmin).ks;
      } else {
        d = fit_lognormal(synthetic).ks;
      }
    } catch (const std::invalid_argument&) {
      continue;  // degenerate replicate cannot beat the observed fit
    }
    at_least += d >= fit.ks;
  }
  return static_cast<double>(at_least) / static_cast<double>(replicates);
}

inline double gof_bootstrap(const std::vector<double>& sample, const FitResult& fit, std::size_t replicates,
                            std::uint64_t seed, std::size_t max_candidates = kDefaultXminCandidates) {
  return gof_bootstrap(std::span<const double>(sample), fit, replicates, seed, max_candidates);
}

}  // namespace ghindex
