#pragma once

// Seeded generators for the combinatorial building blocks of a composite
// network: k-regular simple graphs, biregular and row-regular bipartite
// couplings, and Erdos-Renyi samples. All generators are pure functions of
// (parameters, seed) and check their own output before returning it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "qlbits/error.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/rng.hpp"

namespace qlbits::graphgen {

/// Undirected simple graph: symmetric 0/1 adjacency with zero diagonal.
struct SimpleGraph {
  Mat adjacency;
  std::optional<int> regularity;

  int order() const { return static_cast<int>(adjacency.rows()); }
  long edge_count() const {
    double s = 0.0;
    for (double v : adjacency.data()) s += v;
    return std::lround(s / 2.0);
  }
};

enum class CouplingMode { UndirectedBiregular, RowRegularDirected };

/// n x m coupling block with entries in {sign, 0} (or [-1,0] / [0,1] when
/// real-valued). `degree` is the absolute row sum.
struct BipartiteCoupling {
  Mat matrix;
  CouplingMode mode = CouplingMode::UndirectedBiregular;
  int sign = -1;
  double degree = 0.0;
  bool real_valued = false;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
};

struct ErGraphSample {
  SimpleGraph graph;
  double p = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_sign(int sign) {
  if (sign != -1 && sign != 1) throw ParameterError("coupling sign must be -1 or +1");
}

/// Uniform index in [0, n).
inline int uniform_index(Rng& rng, int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Symmetric multiplicity counter for the configuration model. Loops are
/// counted once on the diagonal.
class EdgeCounter {
 public:
  explicit EdgeCounter(int n) : n_(n), count_(static_cast<std::size_t>(n) * n, 0) {}
  void add(int u, int v, int delta) {
    at(u, v) += delta;
    if (u != v) at(v, u) += delta;
  }
  int get(int u, int v) const { return count_[static_cast<std::size_t>(u) * n_ + v]; }

 private:
  int& at(int u, int v) { return count_[static_cast<std::size_t>(u) * n_ + v]; }
  int n_;
  std::vector<int> count_;
};

/// Configuration model with double-edge-swap repair. Returns nullopt when the
/// swap budget runs out.
inline std::optional<Mat> configuration_model(int n, int k, Rng& rng, long max_swaps) {
  Mat adj(n, n);
  if (k == 0) return adj;

  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * k);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < k; ++i) stubs.push_back(v);
  std::shuffle(stubs.begin(), stubs.end(), rng);

  std::vector<std::pair<int, int>> edges;
  edges.reserve(stubs.size() / 2);
  EdgeCounter count(n);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    edges.emplace_back(stubs[i], stubs[i + 1]);
    count.add(stubs[i], stubs[i + 1], 1);
  }

  const int m = static_cast<int>(edges.size());
  auto bad = [&](int e) {
    auto [u, v] = edges[static_cast<std::size_t>(e)];
    return u == v || count.get(u, v) > 1;
  };

  long attempts = 0;
  for (;;) {
    std::vector<int> bad_edges;
    for (int e = 0; e < m; ++e)
      if (bad(e)) bad_edges.push_back(e);
    if (bad_edges.empty()) break;

    for (int e : bad_edges) {
      while (bad(e)) {
        if (++attempts > max_swaps) return std::nullopt;
        int f = uniform_index(rng, m);
        if (f == e) continue;
        auto [u, v] = edges[static_cast<std::size_t>(e)];
        auto [x, y] = edges[static_cast<std::size_t>(f)];
        if (rng() & 1U) std::swap(x, y);
        // (u,v),(x,y) -> (u,x),(v,y)
        if (u == x || v == y) continue;
        if (count.get(u, x) > 0 || count.get(v, y) > 0) continue;
        if (std::minmax(u, x) == std::minmax(v, y)) continue;
        count.add(u, v, -1);
        count.add(x, y, -1);
        count.add(u, x, 1);
        count.add(v, y, 1);
        edges[static_cast<std::size_t>(e)] = {u, x};
        edges[static_cast<std::size_t>(f)] = {v, y};
      }
    }
  }

  for (auto [u, v] : edges) {
    adj(u, v) = 1.0;
    adj(v, u) = 1.0;
  }
  return adj;
}

inline Mat complement_graph(const Mat& adj) {
  const std::size_t n = adj.rows();
  Mat c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = (i != j && adj(i, j) == 0.0) ? 1.0 : 0.0;
  return c;
}

/// 0/1 n x n support that is l-biregular, built from l superimposed
/// permutations. Collisions are repaired by swapping two entries of the
/// offending permutation, which keeps it a permutation and so preserves all
/// row and column sums.
inline std::optional<Mat> biregular_support(int n, int l, Rng& rng) {
  Mat occ(n, n);
  if (l == 0) return occ;
  if (l == n) return Mat(n, n, 1.0);
  if (2 * l > n) {
    auto inner = biregular_support(n, n - l, rng);
    if (!inner) return std::nullopt;
    for (std::size_t i = 0; i < occ.rows(); ++i)
      for (std::size_t j = 0; j < occ.cols(); ++j) occ(i, j) = 1.0 - (*inner)(i, j);
    return occ;
  }

  const long max_attempts = 100L * n * std::max(l, 1);
  constexpr int kMaxRestarts = 64;
  for (int t = 0; t < l; ++t) {
    bool placed = false;
    for (int restart = 0; restart < kMaxRestarts && !placed; ++restart) {
      auto perm = random_permutation(n, rng);
      long attempts = 0;
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        while (occ(i, perm[i]) != 0.0) {
          if (++attempts > max_attempts) {
            ok = false;
            break;
          }
          int i2 = uniform_index(rng, n);
          if (i2 == i) continue;
          if (occ(i, perm[i2]) == 0.0 && occ(i2, perm[i]) == 0.0) std::swap(perm[i], perm[i2]);
        }
      }
      if (!ok) continue;
      // A later swap may have moved an earlier row onto an occupied cell.
      bool clean = true;
      for (int i = 0; i < n; ++i) clean = clean && occ(i, perm[i]) == 0.0;
      if (!clean) continue;
      for (int i = 0; i < n; ++i) occ(i, perm[i]) = 1.0;
      placed = true;
    }
    if (!placed) return std::nullopt;
  }
  return occ;
}

inline void assert_regular(const Mat& adj, int k) {
  const std::size_t n = adj.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (adj(i, i) != 0.0) throw GenerationError("regular graph has a self-loop");
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (adj(i, j) != adj(j, i)) throw GenerationError("regular graph is not symmetric");
      if (adj(i, j) != 0.0 && adj(i, j) != 1.0) throw GenerationError("regular graph has a non-0/1 entry");
      s += adj(i, j);
    }
    if (s != k) throw GenerationError("regular graph row sum differs from k");
  }
}

inline void assert_marginals(const Mat& m, double l, bool check_cols, double tol = 0.0) {
  for (double s : m.row_sums())
    if (std::abs(std::abs(s) - l) > tol) throw GenerationError("coupling row sum differs from l");
  if (check_cols)
    for (double s : m.col_sums())
      if (std::abs(std::abs(s) - l) > tol) throw GenerationError("coupling column sum differs from l");
}

}  // namespace detail

/// Random simple k-regular graph on n vertices. Dense targets (2k > n-1)
/// are sampled as the complement of an (n-1-k)-regular graph.
inline SimpleGraph gen_random_regular(int n, int k, std::uint64_t seed,
                                      std::optional<long> max_swaps = std::nullopt) {
  if (n <= 0 || k <= 0 || k >= n)
    throw ParameterError("gen_random_regular: need 0 < k < n (n=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + ")");
  if ((static_cast<long>(n) * k) % 2 != 0)
    throw ParameterError("gen_random_regular: n*k is odd (n=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + "), no k-regular graph exists");

  const bool use_complement = 2 * k > n - 1;
  const int k_gen = use_complement ? n - 1 - k : k;
  const long budget = max_swaps.value_or(100L * n * std::max(k, 1));

  Rng rng(seed);
  auto adj = detail::configuration_model(n, k_gen, rng, budget);
  if (!adj)
    throw GenerationError("gen_random_regular: edge-swap repair did not converge within " +
                          std::to_string(budget) + " attempts; retry with a different seed");
  Mat out = use_complement ? detail::complement_graph(*adj) : std::move(*adj);
  detail::assert_regular(out, k);
  return {std::move(out), k};
}

/// n x n coupling whose rows and columns all contain exactly l entries equal to `sign`.
inline BipartiteCoupling gen_biregular_bipartite(int n, int l, int sign, std::uint64_t seed) {
  detail::check_sign(sign);
  if (n <= 0) throw ParameterError("gen_biregular_bipartite: n must be positive");
  if (l < 0 || l > n)
    throw ParameterError("gen_biregular_bipartite: need 0 <= l <= n (n=" + std::to_string(n) +
                         ", l=" + std::to_string(l) + ")");
  Rng rng(seed);
  auto support = detail::biregular_support(n, l, rng);
  if (!support)
    throw GenerationError("gen_biregular_bipartite: collision repair did not converge; retry with a different seed");
  Mat m = std::move(*support);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double& v : m.row(i)) v *= sign;
  detail::assert_marginals(m, l, /*check_cols=*/true);
  return {std::move(m), CouplingMode::UndirectedBiregular, sign, static_cast<double>(l), false};
}

/// n x n coupling with exactly l_out entries equal to `sign` per row; columns unconstrained.
inline BipartiteCoupling gen_row_regular_directed(int n, int l_out, int sign, std::uint64_t seed) {
  detail::check_sign(sign);
  if (n <= 0) throw ParameterError("gen_row_regular_directed: n must be positive");
  if (l_out < 0 || l_out > n)
    throw ParameterError("gen_row_regular_directed: need 0 <= l_out <= n (n=" + std::to_string(n) +
                         ", l_out=" + std::to_string(l_out) + ")");
  Rng rng(seed);
  Mat m(n, n);
  std::vector<int> cols(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::iota(cols.begin(), cols.end(), 0);
    // partial Fisher-Yates: the first l_out slots are a uniform l_out-subset
    for (int j = 0; j < l_out; ++j) {
      int r = std::uniform_int_distribution<int>(j, n - 1)(rng);
      std::swap(cols[j], cols[r]);
      m(i, cols[j]) = sign;
    }
  }
  detail::assert_marginals(m, l_out, /*check_cols=*/false);
  return {std::move(m), CouplingMode::RowRegularDirected, sign, static_cast<double>(l_out), false};
}

/// Row- and column-regular coupling tagged as directed. Two independent draws
/// give C_A != C_B^T while keeping in-degree equal to out-degree per block,
/// which the random-walk closed forms rely on.
inline BipartiteCoupling gen_balanced_directed(int n, int l, int sign, std::uint64_t seed) {
  auto c = gen_biregular_bipartite(n, l, sign, seed);
  c.mode = CouplingMode::RowRegularDirected;
  return c;
}

/// Real-valued coupling: a ceil(l)-biregular support with every entry scaled
/// to sign * l / ceil(l), so all row and column sums equal the real l.
inline BipartiteCoupling gen_real_biregular(int n, double l, int sign, std::uint64_t seed) {
  detail::check_sign(sign);
  if (!(l >= 0.0) || l > n || !std::isfinite(l))
    throw ParameterError("gen_real_biregular: need 0 <= l <= n");
  const int support = static_cast<int>(std::ceil(l));
  Rng rng(seed);
  auto s = detail::biregular_support(n, support, rng);
  if (!s) throw GenerationError("gen_real_biregular: collision repair did not converge; retry with a different seed");
  Mat m = std::move(*s);
  const double w = support == 0 ? 0.0 : sign * l / support;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double& v : m.row(i)) v *= w;
  detail::assert_marginals(m, l, /*check_cols=*/true, 1e-12 * std::max(1.0, l));
  return {std::move(m), CouplingMode::UndirectedBiregular, sign, l, true};
}

inline ErGraphSample gen_er_graph(int n, double p, std::uint64_t seed) {
  if (n <= 0) throw ParameterError("gen_er_graph: n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("gen_er_graph: need 0 <= p <= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mat adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unit(rng) < p) adj(i, j) = adj(j, i) = 1.0;
  return {{std::move(adj), std::nullopt}, p, seed};
}

/// Vertices reachable from `start` along nonzero entries (i -> j when m(i,j) != 0).
inline std::vector<bool> reachable(const Mat& m, std::size_t start, bool transpose = false) {
  const std::size_t n = m.rows();
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  seen[start] = true;
  q.push(start);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v) {
      const double w = transpose ? m(v, u) : m(u, v);
      if (w != 0.0 && !seen[v]) {
        seen[v] = true;
        q.push(v);
      }
    }
  }
  return seen;
}

/// Connectivity of the undirected support (m(i,j) != 0 or m(j,i) != 0).
inline bool is_connected(const Mat& m) {
  if (m.rows() == 0) return true;
  Mat sym(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      sym(i, j) = (m(i, j) != 0.0 || m(j, i) != 0.0) ? 1.0 : 0.0;
  auto seen = reachable(sym, 0);
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

inline bool is_strongly_connected(const Mat& m) {
  if (m.rows() == 0) return true;
  auto fwd = reachable(m, 0);
  auto bwd = reachable(m, 0, /*transpose=*/true);
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (!fwd[i] || !bwd[i]) return false;
  return true;
}

}  // namespace qlbits::graphgen
