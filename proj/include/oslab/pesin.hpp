#pragma once

// Finite-window membership tests for Pesin blocks Lambda_k(alpha, beta; eps).
//
// A point passes when, for every m in [-M, M] and n in [1, N],
//   (a) |Df^n  restricted to E^s(f^m x)| <= e^{eps k} e^{-(beta  - eps) n} e^{eps |m|}
//   (b) |Df^-n restricted to E^u(f^m x)| <= e^{eps k} e^{-(alpha - eps) n} e^{eps |m|}
//   (c) tan angle(E^s(f^m x), E^u(f^m x)) >= e^{-eps k} e^{-eps |m|}
// Only this window is certified; the definition itself quantifies over all
// m and n.

#include "oslab/oseledets.hpp"

#include <optional>
#include <vector>

namespace oslab {

struct PesinParams {
  double alpha = 0.5;
  double beta = 0.5;
  double epsilon = 0.05;
  int k = 1;
  int m_range = 100;
  int n_range = 100;

  /// alpha, beta >= 10 epsilon > 0; k >= 1; M >= 0; N >= 1.
  void validate() const;
};

struct PesinMargins {
  int m = 0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Margins are log-scale slack, negative on violation.
struct PesinReport {
  bool pass = false;
  double a_margin = 0.0;
  double b_margin = 0.0;
  double c_margin = 0.0;
  PesinParams params;
  /// Per-m worst slack of the cocycle terms, i.e. without the e^{eps k} and
  /// e^{eps |m|} allowances. Constant in m for linear systems.
  std::vector<PesinMargins> cocycle_margins;
  /// (m, n, a, b) slack for every pair, allowances included; filled only on
  /// request.
  struct Entry {
    int m, n;
    double a, b;
  };
  std::vector<Entry> audit;
};

struct PesinOptions {
  bool audit = false;
  int sweep_padding = 60;
  double snap_tol = 1e-8;
};

PesinReport pesin_check(const System& sys, const Point& x, const Subspace& stable, const Subspace& unstable,
                        const PesinParams& params, const PesinOptions& opts = {});

/// Smallest k in [1, 64] for which pesin_check passes; nullopt if none.
std::optional<int> smallest_k(const System& sys, const Point& x, const Subspace& stable, const Subspace& unstable,
                              double alpha, double beta, double epsilon, int m_range, int n_range,
                              const PesinOptions& opts = {});

}  // namespace oslab
