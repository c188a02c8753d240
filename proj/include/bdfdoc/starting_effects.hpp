#pragma once

#include <vector>

#include "bdfdoc/doc_kernels.hpp"
#include "bdfdoc/kernel_core.hpp"
#include "bdfdoc/rational.hpp"

namespace bdfdoc {

inline constexpr int kDefaultStartingNMax = 400;

/// Weights c_l(n) = sum_{j=k}^{n} theta_{n-j} b_{j-l}, l = 1..k-1, with which
/// the initial differences u^l - u^{l-1} enter the DOC-transformed step n.
struct StartingCoefficients {
  int order = 0;
  int step = 0;
  /// c[l-1] = c_l(n).
  std::vector<Rational> c;

  Rational max_abs() const;
};

/// Direct double-sum evaluation. Requires n >= k and theta holding at
/// least n-k+1 entries (PreconditionError otherwise).
StartingCoefficients starting_coefficients(int k, int n, const DocKernels& theta, const BdfKernels& b);

/// First step index from which every c_l(n) has its full set of k-l
/// terms, so the convolution identity can collapse it: 2k-2.
int starting_generic_from(int k);

/// Geometric envelope of c_l(n) for n >= starting_generic_from(k):
///   |c_l(n)| <= (rho_k / 4) (k/7)^{n-k} * E_l,
/// where E_l is the smaller of the bounds obtained by inserting the decay
/// envelope into the direct sum sum_{m=k-l}^{k-1} theta_{n-l-m} b_m and
/// into the collapsed sum -sum_{m=0}^{k-l-1} theta_{n-l-m} b_m.
std::vector<Rational> starting_envelope(int k);

struct StartingBaseCase {
  int step = 0;
  /// 8 max_l |c_l(n)| / (rho_k (k/7)^{n-k}).
  Rational ratio;
};

struct StartingBoundConstant {
  int order = 0;
  /// Constant certified for every n >= k: the larger of 1, the base-case
  /// ratios (k <= n < 2k-2) and 2 max_l E_l for the generic range.
  Rational c_I;
  /// sup over k <= n <= n_max of the exact rescaled coefficient magnitude.
  Rational c_I_tight;
  int j_max_checked = 0;
  std::vector<StartingBaseCase> base_cases;
  std::vector<Rational> envelope;
  /// min over n of (c_I rho/8)(k/7)^{n-k} - max_l |c_l(n)|, as a double.
  double envelope_slack_min = 0.0;
  /// Every n <= n_max satisfies the bound exactly and the DOC decay
  /// certificate the generic envelope rests on holds up to n_max.
  bool valid = false;
};

/// k in 3..5, n_max >= k.
StartingBoundConstant certify_starting_bound(int k, int n_max = kDefaultStartingNMax);

struct CumulativeStartingSum {
  /// sum_{j=k}^{n} max_l |c_l(j)|.
  Rational total;
  /// sum_{j=k}^{n} |c_l(j)| for l = 1..k-1.
  std::vector<Rational> per_ell;
  /// 7 c_I rho / (8 (7-k)).
  Rational bound;
  bool within_bound = false;
};

CumulativeStartingSum cumulative_starting_sum(int k, int n, const Rational& c_I);

}  // namespace bdfdoc
