#pragma once

// Four-block network carrying two coupled quantum-like bits:
//
//        A     B     D     E
//   A [  A     C    X_AD  X_AE ]
//   B [  C^T   B    X_BD  X_BE ]
//   D [  .     .     D     F   ]
//   E [  .     .     F^T   E   ]
//
// with the lower-left quadrant the transpose of the upper-right one. Internal
// couplings C, F and the cross blocks X_AD, X_BE are negative; X_AE, X_BD are
// positive.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "qlbits/error.hpp"
#include "qlbits/graphgen.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/rng.hpp"
#include "qlbits/spectral.hpp"

namespace qlbits::twoqubit {

struct TwoQubitNetwork {
  int n = 0;
  int k = 0;
  int l = 0;
  int j1 = 0;
  int j2 = 0;
  std::uint64_t seed = 0;
  Mat A, B, D, E;
  Mat C, F;
  Mat X_AD, X_AE, X_BD, X_BE;
  /// 4n x 4n, block order A, B, D, E.
  Mat R;
};

inline TwoQubitNetwork assemble_two_qubit(int n, int k, int l, int j1, int j2, std::uint64_t seed) {
  if (n <= 0) throw ParameterError("assemble_two_qubit: n must be positive");
  if (k <= 0 || k >= n) throw ParameterError("assemble_two_qubit: need 0 < k < n");
  if (l <= 0 || l > n) throw ParameterError("assemble_two_qubit: need 0 < l <= n");
  if (j1 < 0 || j1 > n || j2 < 0 || j2 > n) throw ParameterError("assemble_two_qubit: need 0 <= j1, j2 <= n");

  TwoQubitNetwork net;
  net.n = n;
  net.k = k;
  net.l = l;
  net.j1 = j1;
  net.j2 = j2;
  net.seed = seed;
  net.A = graphgen::gen_random_regular(n, k, derive_seed(seed, "A")).adjacency;
  net.B = graphgen::gen_random_regular(n, k, derive_seed(seed, "B")).adjacency;
  net.D = graphgen::gen_random_regular(n, k, derive_seed(seed, "D")).adjacency;
  net.E = graphgen::gen_random_regular(n, k, derive_seed(seed, "E")).adjacency;
  net.C = graphgen::gen_biregular_bipartite(n, l, -1, derive_seed(seed, "C")).matrix;
  net.F = graphgen::gen_biregular_bipartite(n, l, -1, derive_seed(seed, "F")).matrix;
  net.X_AD = graphgen::gen_biregular_bipartite(n, j1, -1, derive_seed(seed, "X_AD")).matrix;
  net.X_BE = graphgen::gen_biregular_bipartite(n, j1, -1, derive_seed(seed, "X_BE")).matrix;
  net.X_AE = graphgen::gen_biregular_bipartite(n, j2, +1, derive_seed(seed, "X_AE")).matrix;
  net.X_BD = graphgen::gen_biregular_bipartite(n, j2, +1, derive_seed(seed, "X_BD")).matrix;

  const std::size_t m = static_cast<std::size_t>(n);
  net.R = Mat(4 * m, 4 * m);
  auto place = [&](std::size_t bi, std::size_t bj, const Mat& blk) {
    net.R.set_block(bi * m, bj * m, blk);
    if (bi != bj) net.R.set_block(bj * m, bi * m, blk.transpose());
  };
  place(0, 0, net.A);
  place(1, 1, net.B);
  place(2, 2, net.D);
  place(3, 3, net.E);
  place(0, 1, net.C);
  place(2, 3, net.F);
  place(0, 2, net.X_AD);
  place(0, 3, net.X_AE);
  place(1, 2, net.X_BD);
  place(1, 3, net.X_BE);
  return net;
}

/// Cross-coupling regularities must be whole numbers; averaged values such as
/// 1.5 have to be replaced by an integer plan before assembly.
inline TwoQubitNetwork assemble_two_qubit(int n, int k, int l, double j1, double j2, std::uint64_t seed) {
  for (double j : {j1, j2})
    if (!std::isfinite(j) || j != std::floor(j))
      throw ParameterError("assemble_two_qubit: cross-coupling regularity " + std::to_string(j) +
                           " is not an integer; exact-regular blocks need integer j");
  return assemble_two_qubit(n, k, l, static_cast<int>(j1), static_cast<int>(j2), seed);
}

enum class Pattern { PP, PM, MP, MM };

inline constexpr std::array<Pattern, 4> kPatterns = {Pattern::PP, Pattern::PM, Pattern::MP, Pattern::MM};

inline constexpr std::string_view to_string(Pattern p) {
  switch (p) {
    case Pattern::PP: return "++";
    case Pattern::PM: return "+-";
    case Pattern::MP: return "-+";
    case Pattern::MM: return "--";
  }
  return "?";
}

/// Block signs over (A, B, D, E): the first label flips D and E together,
/// the second flips B and E.
inline constexpr std::array<int, 4> pattern_signs(Pattern p) {
  switch (p) {
    case Pattern::PP: return {1, 1, 1, 1};
    case Pattern::PM: return {1, 1, -1, -1};
    case Pattern::MP: return {1, -1, 1, -1};
    case Pattern::MM: return {1, -1, -1, 1};
  }
  return {0, 0, 0, 0};
}

/// Unit vector: each block is +-1/2 times the normalized all-ones vector.
inline Vec pattern_vector(Pattern p, int n) {
  const auto s = pattern_signs(p);
  const double v = 0.5 / std::sqrt(static_cast<double>(n));
  Vec psi(4 * static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < 4; ++b)
    for (int i = 0; i < n; ++i) psi[b * n + i] = s[b] * v;
  return psi;
}

/// Closed-form predictions in pattern order (++, +-, -+, --):
/// (k+l)+(j1+j2), (k+l)-(j1+j2), (k-l)+(j1-j2), (k-l)-(j1-j2).
inline std::array<double, 4> predicted_two_qubit_eigs(double k, double l, double j1, double j2) {
  return {(k + l) + (j1 + j2), (k + l) - (j1 + j2), (k - l) + (j1 - j2), (k - l) - (j1 - j2)};
}

/// Eigenvalue each pattern carries under the block sign layout: the row sum
/// of one block-A row weighted by the pattern signs.
inline std::array<double, 4> pattern_eigs(double k, double l, double j1, double j2) {
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto s = pattern_signs(kPatterns[i]);
    out[i] = k * s[0] - l * s[1] - j1 * s[2] + j2 * s[3];
  }
  return out;
}

struct PatternReport {
  Pattern pattern = Pattern::PP;
  double predicted = 0.0;
  /// ||R psi - predicted psi||
  double residual = 0.0;
  double rayleigh = 0.0;
  /// ||R psi - rayleigh psi||
  double rayleigh_residual = 0.0;
  /// Norm of psi's projection onto the eigenspace at `rayleigh`.
  double fidelity = 0.0;
  std::size_t eigenspace_dim = 0;
  /// Pattern whose predicted value equals `rayleigh`, if any.
  std::optional<Pattern> matches_prediction_of;
};

struct TwoQubitBasisReport {
  std::array<PatternReport, 4> patterns;
  Vec spectrum;
  double tolerance = 1e-9;
  /// Largest |<psi_i, psi_j>| over distinct patterns.
  double max_overlap = 0.0;
  /// Every pattern is an eigenvector of R (at some eigenvalue).
  bool all_eigenvectors = false;
  /// Every pattern's residual against its own prediction is within tolerance.
  bool predictions_hold = false;
};

/// Checks each product-basis pattern against its predicted eigenvalue and
/// against the full symmetric eigendecomposition. Mismatches are reported,
/// not thrown.
inline TwoQubitBasisReport verify_two_qubit_basis(const TwoQubitNetwork& net, double tol = 1e-9,
                                                  double cluster_tol = 1e-6) {
  TwoQubitBasisReport rep;
  rep.tolerance = tol;
  const auto sys = spectral::jacobi_eigen(net.R, true);
  rep.spectrum = sys.values;
  const auto predicted = predicted_two_qubit_eigs(net.k, net.l, net.j1, net.j2);
  std::array<Vec, 4> psis;
  rep.all_eigenvectors = true;
  rep.predictions_hold = true;
  for (std::size_t i = 0; i < 4; ++i) {
    psis[i] = pattern_vector(kPatterns[i], net.n);
    PatternReport& p = rep.patterns[i];
    p.pattern = kPatterns[i];
    p.predicted = predicted[i];
    p.residual = eigen_residual(net.R, psis[i], p.predicted);
    p.rayleigh = dot(psis[i], matvec(net.R, psis[i]));
    p.rayleigh_residual = eigen_residual(net.R, psis[i], p.rayleigh);
    p.fidelity = spectral::eigenspace_fidelity(sys, p.rayleigh, psis[i], cluster_tol);
    p.eigenspace_dim = spectral::eigenspace_dimension(sys, p.rayleigh, cluster_tol);
    for (std::size_t j = 0; j < 4; ++j)
      if (std::abs(predicted[j] - p.rayleigh) <= tol) {
        p.matches_prediction_of = kPatterns[j];
        if (j == i) break;
      }
    if (p.rayleigh_residual > tol) rep.all_eigenvectors = false;
    if (p.residual > tol) rep.predictions_hold = false;
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) rep.max_overlap = std::max(rep.max_overlap, std::abs(dot(psis[i], psis[j])));
  return rep;
}

}  // namespace qlbits::twoqubit
