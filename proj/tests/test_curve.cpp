#include <gtest/gtest.h>

#include <bit>
#include <map>
#include <set>

#include "ghindex/curve.hpp"
#include "ghindex/random.hpp"
#include "oracles.hpp"

using namespace ghindex;

namespace {

std::vector<CellAddress> curve_cells(unsigned n, unsigned k, Scheme scheme) {
  const std::uint64_t count = std::uint64_t{1} << (n * k);
  std::vector<CellAddress> cells;
  cells.reserve(count);
  for (std::uint64_t pos = 0; pos < count; ++pos) {
    CurveKey key{{}, n};
    for (unsigned level = 0; level < k; ++level) {
      key.digits.push_back(pos >> (n * (k - 1 - level)) & ((std::uint64_t{1} << n) - 1));
    }
    cells.push_back(decode_key(key, scheme));
  }
  return cells;
}

bool edge_adjacent(const CellAddress& a, const CellAddress& b) {
  int moved = 0;
  for (unsigned c = 0; c < a.dimension(); ++c) {
    const auto lo = std::min(a.coords[c], b.coords[c]);
    const auto hi = std::max(a.coords[c], b.coords[c]);
    if (hi - lo > 1) return false;
    moved += hi != lo;
  }
  return moved == 1;
}

}  // namespace

TEST(Gray, SpotValues) {
  EXPECT_EQ(gray_encode(0, 2).bits, 0u);
  EXPECT_EQ(gray_encode(2, 2).bits, 3u);
  EXPECT_EQ(gray_encode(3, 2).bits, 2u);
  EXPECT_EQ(gray_decode({0, 2}), 0u);
  EXPECT_EQ(gray_decode({3, 2}), 2u);
}

TEST(Gray, MatchesReflectAndPrefixConstruction) {
  for (unsigned n = 1; n <= 10; ++n) {
    const auto codes = oracle::reflected_gray_list(n);
    for (std::uint64_t x = 0; x < codes.size(); ++x) ASSERT_EQ(gray_encode(x, n).bits, codes[x]);
  }
}

TEST(Gray, ExhaustiveInverseForEightBits) {
  std::map<std::uint64_t, std::uint64_t> inverse;
  for (std::uint64_t x = 0; x < 256; ++x) inverse[x ^ (x >> 1)] = x;
  ASSERT_EQ(inverse.size(), 256u);
  for (auto [g, x] : inverse) EXPECT_EQ(gray_decode({g, 8}), x);
}

TEST(Gray, SingleBitAdjacencyIncludingWrap) {
  for (unsigned n = 1; n <= 16; ++n) {
    const std::uint64_t last = (std::uint64_t{1} << n) - 1;
    for (std::uint64_t i = 0; i < last; ++i) {
      ASSERT_EQ(std::popcount(gray_encode(i, n).bits ^ gray_encode(i + 1, n).bits), 1);
    }
    EXPECT_EQ(std::popcount(gray_encode(0, n).bits ^ gray_encode(last, n).bits), 1);
  }
}

TEST(Gray, RejectsOverflow) {
  EXPECT_THROW(gray_encode(4, 2), std::invalid_argument);
  EXPECT_THROW(gray_encode(0, 64), std::invalid_argument);
  EXPECT_THROW(gray_encode(0, 0), std::invalid_argument);
  EXPECT_THROW(gray_decode({8, 3}), std::invalid_argument);
  EXPECT_EQ(gray_decode(gray_encode((std::uint64_t{1} << 63) - 1, 63)), (std::uint64_t{1} << 63) - 1);
}

TEST(SchemePermutation, ClosedForms) {
  EXPECT_EQ(scheme_permutation(Scheme::Ring, 1, 4), (std::vector<unsigned>{2, 3, 0, 1}));
  EXPECT_EQ(scheme_permutation(Scheme::Bubble, 0, 3), (std::vector<unsigned>{1, 2, 0}));
  for (unsigned n = 1; n <= 9; ++n) {
    std::vector<unsigned> identity(n);
    for (unsigned i = 0; i < n; ++i) identity[i] = i;
    EXPECT_EQ(scheme_permutation(Scheme::Bubble, n - 1, n), identity);
    EXPECT_EQ(scheme_permutation(Scheme::Ring, n - 1, n), identity);
  }
  EXPECT_THROW(scheme_permutation(Scheme::Ring, 4, 4), std::invalid_argument);
}

// Two-line notation: top row n-1, n-2, ..., 0 maps onto the bottom row.
TEST(SchemePermutation, MatchesTwoLineArrays) {
  for (unsigned n = 2; n <= 8; ++n) {
    for (unsigned d = 0; d < n; ++d) {
      std::vector<unsigned> bubble_bottom{d};
      for (unsigned c = n; c-- > 0;) {
        if (c != d) bubble_bottom.push_back(c);
      }
      std::vector<unsigned> ring_bottom;
      for (unsigned j = 0; j < n; ++j) ring_bottom.push_back((d + n - j) % n);
      const auto bubble = scheme_permutation(Scheme::Bubble, d, n);
      const auto ring = scheme_permutation(Scheme::Ring, d, n);
      for (unsigned j = 0; j < n; ++j) {
        EXPECT_EQ(bubble[n - 1 - j], bubble_bottom[j]) << n << ' ' << d;
        EXPECT_EQ(ring[n - 1 - j], ring_bottom[j]) << n << ' ' << d;
      }
    }
  }
}

TEST(TransformState, RejectsNonBijection) {
  std::vector<unsigned> bad{0, 0, 1};
  EXPECT_THROW(TransformState(bad, 0), std::invalid_argument);
  std::vector<unsigned> ok{2, 0, 1};
  EXPECT_THROW(TransformState(ok, 8), std::invalid_argument);
  TransformState state(ok, 5);
  for (std::uint64_t g = 0; g < 8; ++g) EXPECT_EQ(state.to_gray(state.to_cell(g)), g);
}

TEST(ChildState, FirstChildEntersAtParentEntry) {
  const auto root = TransformState::root(2, Scheme::Ring);
  const auto child = child_state(root, 0, Scheme::Ring);
  // The first child shares the parent's entry corner and leaves along the
  // axis the parent moves in first.
  EXPECT_EQ(child.mask(), root.mask());
  EXPECT_EQ(child.lead_axis(), root.axis(0));
}

TEST(ChildState, ChildrenCoverParentOnce) {
  for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
    for (unsigned n = 1; n <= 6; ++n) {
      const auto root = TransformState::root(n, scheme);
      std::set<std::uint64_t> cells;
      for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
        cells.insert(root.to_cell(gray_encode(w, n).bits));
        const auto child = child_state(root, w, scheme);
        EXPECT_EQ(child.permutation(), scheme_permutation(scheme, child.lead_axis(), n));
      }
      EXPECT_EQ(cells.size(), std::size_t{1} << n);
    }
  }
}

TEST(Curve, FirstIterationQuadrantOrder) {
  // x is coordinate 0. Lower-left, lower-right, upper-right, upper-left.
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> expected{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
    for (std::uint64_t key = 0; key < 4; ++key) {
      const CellAddress cell{{expected[key].first, expected[key].second}, 1};
      EXPECT_EQ(encode_key(cell, scheme).digits, std::vector<std::uint64_t>{key});
    }
  }
}

TEST(Curve, SecondIterationMatchesPublishedFigure) {
  // Cell centres of the second-iteration curve, traced from the figure.
  const std::vector<std::pair<int, int>> figure{
      {0, 0}, {0, 1}, {1, 1}, {1, 0}, {2, 0}, {3, 0}, {3, 1}, {2, 1},
      {2, 2}, {3, 2}, {3, 3}, {2, 3}, {1, 3}, {1, 2}, {0, 2}, {0, 3}};
  for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
    const auto cells = curve_cells(2, 2, scheme);
    for (std::size_t i = 0; i < figure.size(); ++i) {
      EXPECT_EQ(cells[i].coords[0], static_cast<std::uint64_t>(figure[i].first)) << i;
      EXPECT_EQ(cells[i].coords[1], static_cast<std::uint64_t>(figure[i].second)) << i;
    }
  }
}

TEST(Curve, TwoDimensionalCurveIsClassicalHilbert) {
  for (unsigned k = 1; k <= 5; ++k) {
    const auto expected = oracle::hilbert_2d(k);
    for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
      const auto cells = curve_cells(2, k, scheme);
      ASSERT_EQ(cells.size(), expected.size());
      for (std::size_t i = 0; i < cells.size(); ++i) {
        ASSERT_EQ(cells[i].coords[0], static_cast<std::uint64_t>(expected[i].first)) << k << ' ' << i;
        ASSERT_EQ(cells[i].coords[1], static_cast<std::uint64_t>(expected[i].second)) << k << ' ' << i;
      }
    }
  }
}

TEST(Curve, BijectiveAndAdjacent) {
  const std::vector<std::pair<unsigned, unsigned>> cases{
      {1, 1}, {1, 6}, {2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {3, 1}, {3, 2}, {3, 3},
      {4, 1}, {4, 2}, {5, 2}, {6, 2}, {8, 2}, {16, 1}};
  for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
    for (auto [n, k] : cases) {
      const auto cells = curve_cells(n, k, scheme);
      std::set<std::vector<std::uint64_t>> distinct;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        distinct.insert(cells[i].coords);
        ASSERT_EQ(encode_key(cells[i], scheme).digits.size(), k);
        if (i > 0) {
          ASSERT_TRUE(edge_adjacent(cells[i - 1], cells[i])) << n << ' ' << k << ' ' << i;
        }
      }
      EXPECT_EQ(distinct.size(), cells.size()) << n << ' ' << k;
    }
  }
}

TEST(Curve, SchemesDifferFromThreeDimensionsOn) {
  EXPECT_NE(curve_cells(3, 2, Scheme::Bubble), curve_cells(3, 2, Scheme::Ring));
  EXPECT_EQ(curve_cells(2, 3, Scheme::Bubble), curve_cells(2, 3, Scheme::Ring));
}

TEST(Curve, ExhaustiveRoundTripThreeDimensions) {
  for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
    for (std::uint64_t x = 0; x < 4; ++x) {
      for (std::uint64_t y = 0; y < 4; ++y) {
        for (std::uint64_t z = 0; z < 4; ++z) {
          const CellAddress cell{{x, y, z}, 2};
          EXPECT_EQ(decode_key(encode_key(cell, scheme), scheme), cell);
        }
      }
    }
  }
}

TEST(Curve, RandomKeysRoundTrip) {
  Random rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const unsigned n = 1 + static_cast<unsigned>(rng.below(5));
    const unsigned k = 1 + static_cast<unsigned>(rng.below(3));
    const auto scheme = rng.below(2) ? Scheme::Bubble : Scheme::Ring;
    CurveKey key{{}, n};
    for (unsigned i = 0; i < k; ++i) key.digits.push_back(rng.below(std::uint64_t{1} << n));
    ASSERT_EQ(encode_key(decode_key(key, scheme), scheme), key);
  }
}

TEST(Curve, ZeroKeyIsTheOrigin) {
  for (auto scheme : {Scheme::Bubble, Scheme::Ring}) {
    const CurveKey key{std::vector<std::uint64_t>(4, 0), 5};
    EXPECT_EQ(decode_key(key, scheme), (CellAddress{std::vector<std::uint64_t>(5, 0), 4}));
  }
}

TEST(Curve, KeysRefineMonotonically) {
  Random rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const unsigned n = 1 + static_cast<unsigned>(rng.below(8));
    const auto scheme = rng.below(2) ? Scheme::Bubble : Scheme::Ring;
    std::vector<double> point(n);
    for (auto& x : point) x = rng.uniform();
    const auto deep = encode_key(point_to_cell(point, 12), scheme);
    for (unsigned k = 0; k < 12; ++k) {
      const auto shallow = encode_key(point_to_cell(point, k), scheme);
      ASSERT_TRUE(std::equal(shallow.digits.begin(), shallow.digits.end(), deep.digits.begin()));
    }
  }
}

TEST(PointToCell, DyadicDigits) {
  const std::vector<double> origin{0.0, 0.0};
  EXPECT_EQ(point_to_cell(origin, 3), (CellAddress{{0, 0}, 3}));
  const std::vector<double> p{0.5, 0.25};
  EXPECT_EQ(point_to_cell(p, 2), (CellAddress{{0b10, 0b01}, 2}));
  const std::vector<double> edge{1.0, 0.0};
  EXPECT_THROW(point_to_cell(edge, 2), std::out_of_range);
  const std::vector<double> negative{-0.1};
  EXPECT_THROW(point_to_cell(negative, 2), std::out_of_range);
  const std::vector<double> top{std::nextafter(1.0, 0.0)};
  EXPECT_EQ(point_to_cell(top, 64).coords[0], ~std::uint64_t{0} << 11);
}
