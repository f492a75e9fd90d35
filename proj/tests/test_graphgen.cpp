#include <gtest/gtest.h>

#include <set>

#include "qlbits/graphgen.hpp"

using namespace qlbits;
using namespace qlbits::graphgen;

namespace {

void expect_simple_regular(const Mat& adj, int k) {
  const std::size_t n = adj.rows();
  ASSERT_EQ(adj.cols(), n);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(adj(i, i), 0.0);
    int deg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_TRUE(adj(i, j) == 0.0 || adj(i, j) == 1.0);
      EXPECT_EQ(adj(i, j), adj(j, i));
      deg += static_cast<int>(adj(i, j));
    }
    EXPECT_EQ(deg, k) << "row " << i;
  }
}

void expect_biregular(const Mat& c, int l, int sign) {
  for (std::size_t i = 0; i < c.rows(); ++i) {
    int r = 0;
    for (std::size_t j = 0; j < c.cols(); ++j) {
      EXPECT_TRUE(c(i, j) == 0.0 || c(i, j) == sign);
      r += c(i, j) != 0.0;
    }
    EXPECT_EQ(r, l);
  }
  for (std::size_t j = 0; j < c.cols(); ++j) {
    int s = 0;
    for (std::size_t i = 0; i < c.rows(); ++i) s += c(i, j) != 0.0;
    EXPECT_EQ(s, l);
  }
}

}  // namespace

TEST(RandomRegular, SparseMediumAndDense) {
  for (auto [n, k] : {std::pair{30, 20}, std::pair{30, 3}, std::pair{8, 3}, std::pair{40, 10}, std::pair{10, 9},
                      std::pair{31, 30}, std::pair{6, 2}, std::pair{100, 50}}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
      auto g = gen_random_regular(n, k, seed);
      expect_simple_regular(g.adjacency, k);
      EXPECT_EQ(g.regularity, k);
      EXPECT_EQ(g.edge_count(), static_cast<long>(n) * k / 2);
    }
  }
}

TEST(RandomRegular, CompleteGraph) {
  auto g = gen_random_regular(10, 9, 5);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(g.adjacency(i, j), i == j ? 0.0 : 1.0);
}

TEST(RandomRegular, OddHandshakeRejected) {
  EXPECT_THROW(gen_random_regular(5, 3, 1), ParameterError);
  EXPECT_THROW(gen_random_regular(5, 5, 1), ParameterError);
  EXPECT_THROW(gen_random_regular(5, 0, 1), ParameterError);
}

TEST(RandomRegular, DeterministicPerSeedAndVariesAcrossSeeds) {
  auto a = gen_random_regular(30, 6, 42);
  auto b = gen_random_regular(30, 6, 42);
  auto c = gen_random_regular(30, 6, 43);
  EXPECT_EQ(a.adjacency, b.adjacency);
  EXPECT_FALSE(a.adjacency == c.adjacency);
}

TEST(RandomRegular, ZeroSwapBudgetCanFail) {
  // With no repair budget a configuration-model draw on a dense target almost
  // always contains a loop or multi-edge; across many seeds at least one fails.
  int failures = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    try {
      gen_random_regular(20, 8, s, 0);
    } catch (const GenerationError&) {
      ++failures;
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(Biregular, MarginalsAndSign) {
  for (auto [n, l] : {std::pair{30, 3}, std::pair{30, 0}, std::pair{30, 30}, std::pair{8, 1}, std::pair{20, 15},
                      std::pair{50, 24}}) {
    for (int sign : {-1, 1}) {
      auto c = gen_biregular_bipartite(n, l, sign, 7);
      expect_biregular(c.matrix, l, sign);
      EXPECT_EQ(c.degree, l);
      EXPECT_EQ(c.sign, sign);
    }
  }
}

TEST(Biregular, Errors) {
  EXPECT_THROW(gen_biregular_bipartite(10, 11, -1, 1), ParameterError);
  EXPECT_THROW(gen_biregular_bipartite(10, -1, -1, 1), ParameterError);
  EXPECT_THROW(gen_biregular_bipartite(10, 3, 0, 1), ParameterError);
}

TEST(RowRegularDirected, RowSumsExactColumnsFree) {
  auto c = gen_row_regular_directed(30, 24, -1, 11);
  for (double s : c.matrix.row_sums()) EXPECT_EQ(s, -24.0);
  EXPECT_EQ(c.mode, CouplingMode::RowRegularDirected);
  auto c2 = gen_row_regular_directed(30, 5, 1, 11);
  std::set<double> cols;
  for (double s : c2.matrix.col_sums()) cols.insert(s);
  EXPECT_GT(cols.size(), 1u) << "column sums of a row-regular draw should vary";
}

TEST(BalancedDirected, RowAndColumnRegular) {
  auto c = gen_balanced_directed(40, 7, -1, 3);
  expect_biregular(c.matrix, 7, -1);
  EXPECT_EQ(c.mode, CouplingMode::RowRegularDirected);
}

TEST(RealBiregular, RealRowAndColumnSums) {
  const double l = 5.0 * std::sqrt(2.0) / 8.0;
  auto c = gen_real_biregular(30, l, -1, 9);
  for (double s : c.matrix.row_sums()) EXPECT_NEAR(s, -l, 1e-14);
  for (double s : c.matrix.col_sums()) EXPECT_NEAR(s, -l, 1e-14);
  EXPECT_TRUE(c.real_valued);
  auto z = gen_real_biregular(10, 0.0, -1, 9);
  for (double v : z.matrix.data()) EXPECT_EQ(v, 0.0);
}

TEST(ErdosRenyi, ExtremesAndDensity) {
  auto full = gen_er_graph(12, 1.0, 1);
  EXPECT_EQ(full.graph.edge_count(), 66);
  auto empty = gen_er_graph(12, 0.0, 1);
  EXPECT_EQ(empty.graph.edge_count(), 0);
  auto half = gen_er_graph(200, 0.5, 5);
  const double expected = 0.5 * 200 * 199 / 2;
  EXPECT_NEAR(half.graph.edge_count(), expected, 5 * std::sqrt(expected * 0.5));
  EXPECT_THROW(gen_er_graph(10, 1.5, 1), ParameterError);
}

TEST(Connectivity, DirectedAndUndirected) {
  Mat path(3, 3);
  path(0, 1) = 1;
  path(1, 2) = 1;
  EXPECT_TRUE(is_connected(path));
  EXPECT_FALSE(is_strongly_connected(path));
  path(2, 0) = 1;
  EXPECT_TRUE(is_strongly_connected(path));
  Mat two(4, 4);
  two(0, 1) = two(1, 0) = 1;
  two(2, 3) = two(3, 2) = 1;
  EXPECT_FALSE(is_connected(two));
}
