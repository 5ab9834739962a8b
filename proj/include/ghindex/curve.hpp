#pragma once

// Binary reflected Gray code and the static Gray-Hilbert curve in n dimensions.
//
// Bit convention: bit i of an n-bit word belongs to coordinate i, coordinate 0
// being the least significant bit. This holds for cell words, masks and the
// targets of permutations alike.
//
// A TransformState describes how one hypercube orders its 2^n children: the
// child at traversal rank w sits at cell word
//
//     mask XOR scatter(gray_encode(w))
//
// where scatter moves Gray bit i onto coordinate perm[i]. The most significant
// Gray bit is split first, so perm[n-1] is the coordinate labelling the first
// level of the block (the "lead" axis). Entry and exit corners of the block
// differ exactly in the lead axis.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ghindex {

inline constexpr unsigned kMaxDimension = 63;

enum class Scheme { Bubble, Ring };

inline std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Bubble ? "bubble" : "ring";
}

inline Scheme parse_scheme(std::string_view text) {
  if (text == "bubble") return Scheme::Bubble;
  if (text == "ring") return Scheme::Ring;
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

namespace detail {

inline void check_dimension(unsigned n) {
  if (n == 0 || n > kMaxDimension) {
    throw std::invalid_argument("dimension must be in [1, 63], got " + std::to_string(n));
  }
}

constexpr std::uint64_t low_mask(unsigned n) noexcept {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

constexpr unsigned permuted_axis(Scheme scheme, unsigned d, unsigned n, unsigned i) noexcept {
  if (scheme == Scheme::Ring) return (i + d + 1) % n;
  if (i == n - 1) return d;
  return i < d ? i : i + 1;
}

}  // namespace detail

struct GrayWord {
  std::uint64_t bits = 0;
  unsigned n = 0;

  friend bool operator==(const GrayWord&, const GrayWord&) = default;
};

inline GrayWord gray_encode(std::uint64_t x, unsigned n) {
  detail::check_dimension(n);
  if (x > detail::low_mask(n)) {
    throw std::invalid_argument("value does not fit in " + std::to_string(n) + " bits");
  }
  return {x ^ (x >> 1), n};
}

inline std::uint64_t gray_decode(GrayWord g) {
  detail::check_dimension(g.n);
  if (g.bits > detail::low_mask(g.n)) {
    throw std::invalid_argument("Gray word wider than its dimension");
  }
  std::uint64_t x = g.bits;
  for (unsigned shift = 1; shift < 64; shift <<= 1) x ^= x >> shift;
  return x;
}

/// Maps Gray bit position i to a coordinate, given the lead coordinate d that
/// the first level of the block splits.
///
///   Bubble: i -> i for i < d, i -> i+1 for d <= i <= n-2, n-1 -> d
///   Ring:   i -> (i + d + 1) mod n
inline std::vector<unsigned> scheme_permutation(Scheme scheme, unsigned d, unsigned n) {
  detail::check_dimension(n);
  if (d >= n) throw std::invalid_argument("lead coordinate out of range");
  std::vector<unsigned> perm(n);
  for (unsigned i = 0; i < n; ++i) perm[i] = detail::permuted_axis(scheme, d, n, i);
  return perm;
}

class TransformState {
 public:
  TransformState() = default;

  TransformState(std::span<const unsigned> perm, std::uint64_t mask)
      : mask_(mask), n_(static_cast<std::uint8_t>(perm.size())) {
    detail::check_dimension(n_);
    if (mask > detail::low_mask(n_)) throw std::invalid_argument("mask wider than dimension");
    std::uint64_t seen = 0;
    for (unsigned i = 0; i < n_; ++i) {
      if (perm[i] >= n_ || (seen >> perm[i] & 1)) {
        throw std::invalid_argument("perm is not a bijection");
      }
      seen |= std::uint64_t{1} << perm[i];
      perm_[i] = static_cast<std::uint8_t>(perm[i]);
    }
  }

  /// Scheme permutation for lead axis `lead`, without the validation pass.
  static TransformState from_scheme(Scheme scheme, unsigned lead, unsigned n, std::uint64_t mask) {
    detail::check_dimension(n);
    if (lead >= n) throw std::invalid_argument("lead coordinate out of range");
    TransformState state;
    state.n_ = static_cast<std::uint8_t>(n);
    state.mask_ = mask & detail::low_mask(n);
    for (unsigned i = 0; i < n; ++i) {
      state.perm_[i] = static_cast<std::uint8_t>(detail::permuted_axis(scheme, lead, n, i));
    }
    return state;
  }

  /// State of the whole unit cube: identity permutation, entry at the origin.
  /// Both schemes agree here since their permutation for d = n-1 is the identity.
  static TransformState root(unsigned n, Scheme scheme) {
    return from_scheme(scheme, n - 1, n, 0);
  }

  unsigned dimension() const noexcept { return n_; }
  std::uint64_t mask() const noexcept { return mask_; }
  unsigned axis(unsigned gray_bit) const noexcept { return perm_[gray_bit]; }
  unsigned lead_axis() const noexcept { return perm_[n_ - 1u]; }

  std::vector<unsigned> permutation() const { return {perm_.begin(), perm_.begin() + n_}; }

  /// Gray word to the absolute cell word of the child it denotes.
  std::uint64_t to_cell(std::uint64_t gray) const noexcept {
    std::uint64_t cell = 0;
    for (unsigned i = 0; i < n_; ++i) cell |= (gray >> i & 1) << perm_[i];
    return cell ^ mask_;
  }

  std::uint64_t to_gray(std::uint64_t cell) const noexcept {
    const std::uint64_t x = cell ^ mask_;
    std::uint64_t gray = 0;
    for (unsigned i = 0; i < n_; ++i) gray |= (x >> perm_[i] & 1) << i;
    return gray;
  }

  friend bool operator==(const TransformState& a, const TransformState& b) {
    return a.n_ == b.n_ && a.mask_ == b.mask_ &&
           std::equal(a.perm_.begin(), a.perm_.begin() + a.n_, b.perm_.begin());
  }

 private:
  std::array<std::uint8_t, 64> perm_{};
  std::uint64_t mask_ = 0;
  std::uint8_t n_ = 0;
};

/// Transform for the sub-traversal inside the child at traversal rank `digit`.
///
/// Entry corners follow the Gray-code entry-point sequence: child 0 enters at
/// the parent entry, child g >= 1 at gray_encode(2*floor((g-1)/2)) in the
/// parent frame. The child's lead axis is the parent-frame direction joining
/// its entry and exit corners; the scheme fixes the remaining order.
inline TransformState child_state(const TransformState& parent, std::uint64_t digit, Scheme scheme) {
  const unsigned n = parent.dimension();
  if (digit > detail::low_mask(n)) throw std::invalid_argument("digit out of range");
  std::uint64_t entry = 0;
  unsigned direction = 0;
  if (digit != 0) {
    const std::uint64_t even = 2 * ((digit - 1) / 2);
    entry = even ^ (even >> 1);
    const std::uint64_t probe = (digit & 1) ? digit : digit - 1;
    direction = static_cast<unsigned>(std::countr_one(probe)) % n;
  }
  const unsigned lead = parent.axis(direction);
  return TransformState::from_scheme(scheme, lead, n, parent.to_cell(entry));
}

/// One subhypercube of the k-th subdivision: coords[i] holds the k leading
/// binary digits of coordinate i, most significant first.
struct CellAddress {
  std::vector<std::uint64_t> coords;
  unsigned k = 0;

  unsigned dimension() const noexcept { return static_cast<unsigned>(coords.size()); }
  friend bool operator==(const CellAddress&, const CellAddress&) = default;
};

/// Position on the k-th static curve; digits[i] is the traversal rank at level i.
/// Lexicographic order on digits is curve order.
struct CurveKey {
  std::vector<std::uint64_t> digits;
  unsigned n = 0;

  unsigned iterations() const noexcept { return static_cast<unsigned>(digits.size()); }

  friend bool operator==(const CurveKey&, const CurveKey&) = default;
  friend std::strong_ordering operator<=>(const CurveKey& a, const CurveKey& b) {
    return std::lexicographical_compare_three_way(a.digits.begin(), a.digits.end(),
                                                  b.digits.begin(), b.digits.end());
  }
};

namespace detail {

inline void check_cell(const CellAddress& cell) {
  check_dimension(cell.dimension());
  if (cell.k > 64) throw std::invalid_argument("at most 64 iterations supported");
  for (auto c : cell.coords) {
    if (c > low_mask(cell.k)) throw std::invalid_argument("cell coordinate wider than k bits");
  }
}

}  // namespace detail

inline CurveKey encode_key(const CellAddress& cell, Scheme scheme) {
  detail::check_cell(cell);
  const unsigned n = cell.dimension();
  CurveKey key{{}, n};
  key.digits.reserve(cell.k);
  auto state = TransformState::root(n, scheme);
  for (unsigned level = 0; level < cell.k; ++level) {
    const unsigned shift = cell.k - 1 - level;
    std::uint64_t word = 0;
    for (unsigned c = 0; c < n; ++c) word |= (cell.coords[c] >> shift & 1) << c;
    const std::uint64_t rank = gray_decode({state.to_gray(word), n});
    key.digits.push_back(rank);
    state = child_state(state, rank, scheme);
  }
  return key;
}

inline CellAddress decode_key(const CurveKey& key, Scheme scheme) {
  detail::check_dimension(key.n);
  if (key.iterations() > 64) throw std::invalid_argument("at most 64 iterations supported");
  CellAddress cell{std::vector<std::uint64_t>(key.n, 0), key.iterations()};
  auto state = TransformState::root(key.n, scheme);
  for (auto rank : key.digits) {
    const std::uint64_t word = state.to_cell(gray_encode(rank, key.n).bits);
    for (unsigned c = 0; c < key.n; ++c) cell.coords[c] = cell.coords[c] << 1 | (word >> c & 1);
    state = child_state(state, rank, scheme);
  }
  return cell;
}

/// Leading 64 binary digits of a coordinate in [0, 1).
inline std::uint64_t to_fixed_point(double x) {
  if (!(x >= 0.0 && x < 1.0)) {
    throw std::out_of_range("coordinate " + std::to_string(x) + " outside [0, 1)");
  }
  return static_cast<std::uint64_t>(std::ldexp(x, 64));
}

inline CellAddress point_to_cell(std::span<const double> point, unsigned k) {
  detail::check_dimension(static_cast<unsigned>(point.size()));
  if (k > 64) throw std::invalid_argument("at most 64 iterations supported");
  CellAddress cell{{}, k};
  cell.coords.reserve(point.size());
  for (double x : point) {
    const std::uint64_t fixed = to_fixed_point(x);
    cell.coords.push_back(k == 0 ? 0 : fixed >> (64 - k));
  }
  return cell;
}

}  // namespace ghindex
