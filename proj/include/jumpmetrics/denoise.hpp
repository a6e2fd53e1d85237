// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "jumpmetrics/core.hpp"

namespace jm {

struct DenoiseConfig {
  int zscore_window = 11;       // odd, >= 3
  double zscore_threshold = 3.0;
  int savgol_window = 21;       // odd, > savgol_order
  int savgol_order = 2;

  void validate() const {
    if (zscore_window < 3 || zscore_window % 2 == 0)
      fail(errc::argument, "zscore_window must be odd and >= 3");
    if (!(zscore_threshold > 0.0)) fail(errc::argument, "zscore_threshold must be positive");
    if (savgol_window < 1 || savgol_window % 2 == 0)
      fail(errc::argument, "savgol_window must be odd");
    if (savgol_order < 0) fail(errc::argument, "savgol_order must be non-negative");
    if (savgol_window <= savgol_order)
      fail(errc::argument, "savgol_window must exceed savgol_order");
  }
};

namespace detail {

/// Gauss-Jordan solve of a small dense system A x = b (A is square, order n).
/// Used only for the polynomial normal equations, so n is tiny.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) fail(errc::argument, "singular normal equations");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    const double inv = 1.0 / a[col][col];
    for (std::size_t c = col; c < n; ++c) a[col][c] *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  return b;
}

/// Weights w such that w . window evaluates the least-squares polynomial of
/// degree `order` (fit over integer offsets -m..m) at offset `tau`.
inline std::vector<double> savgol_eval_weights(int window, int order, int tau) {
  const int m = window / 2;
  const int p = order + 1;
  // Normal matrix M[a][b] = sum_k t_k^(a+b), t_k = -m..m.
  std::vector<double> moments(static_cast<std::size_t>(2 * order + 1), 0.0);
  for (int t = -m; t <= m; ++t) {
    double pw = 1.0;
    for (int j = 0; j <= 2 * order; ++j) {
      moments[static_cast<std::size_t>(j)] += pw;
      pw *= t;
    }
  }
  std::vector<std::vector<double>> normal(static_cast<std::size_t>(p),
                                          std::vector<double>(static_cast<std::size_t>(p)));
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      normal[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          moments[static_cast<std::size_t>(a + b)];

  // beta = M^-1 A^T x, fitted value = tvec(tau) . beta. Solve M^T y = tvec
  // (M symmetric) once, then weights_k = y . trow(t_k).
  std::vector<double> tvec(static_cast<std::size_t>(p));
  double pw = 1.0;
  for (int j = 0; j < p; ++j) {
    tvec[static_cast<std::size_t>(j)] = pw;
    pw *= tau;
  }
  const std::vector<double> y = solve_dense(normal, tvec);

  std::vector<double> weights(static_cast<std::size_t>(window), 0.0);
  for (int k = 0; k < window; ++k) {
    const int t = k - m;
    double acc = 0.0;
    double tp = 1.0;
    for (int j = 0; j < p; ++j) {
      acc += y[static_cast<std::size_t>(j)] * tp;
      tp *= t;
    }
    weights[static_cast<std::size_t>(k)] = acc;
  }
  return weights;
}

}  // namespace detail

/// Replace samples whose rolling z-score (centered window, the sample itself
/// excluded from mean/sd) exceeds the threshold by linear interpolation
/// between the nearest retained neighbours. Detection and replacement repeat
/// until no sample is flagged, so the output is a fixed point of the filter.
inline TimeSeries zscore_despike(const TimeSeries& series, const DenoiseConfig& cfg = {}) {
  cfg.validate();
  require_nonempty(series, "zscore_despike");
  const int n = static_cast<int>(series.size());
  const int w = cfg.zscore_window;
  if (n < w)
    fail(errc::length, "zscore_despike: series length " + std::to_string(n) +
                           " shorter than window " + std::to_string(w));

  TimeSeries out = series;
  std::vector<double>& x = out.samples;
  const int half = w / 2;
  constexpr int kMaxPasses = 10;

  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::vector<char> spike(static_cast<std::size_t>(n), 0);
    int flagged = 0;
    for (int i = 0; i < n; ++i) {
      int lo = i - half;
      lo = std::max(0, std::min(lo, n - w));  // full-size window, shifted at the edges
      double sum = 0.0;
      for (int j = lo; j < lo + w; ++j)
        if (j != i) sum += x[static_cast<std::size_t>(j)];
      const double mu = sum / static_cast<double>(w - 1);
      double ss = 0.0;
      for (int j = lo; j < lo + w; ++j) {
        if (j == i) continue;
        const double d = x[static_cast<std::size_t>(j)] - mu;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(w - 2));
      const double dev = std::fabs(x[static_cast<std::size_t>(i)] - mu);
      const bool is_spike = sd > 0.0 ? dev / sd > cfg.zscore_threshold : dev > 0.0;
      if (is_spike) {
        spike[static_cast<std::size_t>(i)] = 1;
        ++flagged;
      }
    }
    if (flagged == 0 || flagged == n) break;  // converged, or nothing to anchor on

    int i = 0;
    while (i < n) {
      if (!spike[static_cast<std::size_t>(i)]) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < n && spike[static_cast<std::size_t>(j + 1)]) ++j;
      const int left = i - 1;    // -1 when the run starts at the beginning
      const int right = j + 1;   // n when the run ends at the end
      for (int k = i; k <= j; ++k) {
        double v;
        if (left >= 0 && right < n) {
          const double f = static_cast<double>(k - left) / static_cast<double>(right - left);
          v = x[static_cast<std::size_t>(left)] +
              f * (x[static_cast<std::size_t>(right)] - x[static_cast<std::size_t>(left)]);
        } else if (left >= 0) {
          v = x[static_cast<std::size_t>(left)];
        } else {
          v = x[static_cast<std::size_t>(right)];
        }
        x[static_cast<std::size_t>(k)] = v;
      }
      i = j + 1;
    }
  }
  return out;
}

/// Savitzky-Golay smoothing: each sample becomes the centre value of the
/// least-squares polynomial over its window. Near the boundaries the
/// polynomial is fit on the first/last full window and evaluated at the edge
/// offsets, which avoids fabricating extrema from padded data.
inline TimeSeries savgol_smooth(const TimeSeries& series, const DenoiseConfig& cfg = {}) {
  cfg.validate();
  require_nonempty(series, "savgol_smooth");
  const int n = static_cast<int>(series.size());
  const int w = cfg.savgol_window;
  if (n < w)
    fail(errc::length, "savgol_smooth: series length " + std::to_string(n) +
                           " shorter than window " + std::to_string(w));

  const int m = w / 2;
  const std::vector<double> center = detail::savgol_eval_weights(w, cfg.savgol_order, 0);

  TimeSeries out = series;
  const std::vector<double>& x = series.samples;
  std::vector<double>& y = out.samples;

  for (int i = m; i < n - m; ++i) {
    double acc = 0.0;
    for (int k = 0; k < w; ++k) acc += center[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i - m + k)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  for (int i = 0; i < m && i < n; ++i) {
    const std::vector<double> wl = detail::savgol_eval_weights(w, cfg.savgol_order, i - m);
    double acc = 0.0;
    for (int k = 0; k < w; ++k) acc += wl[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = acc;
    const std::vector<double> wr = detail::savgol_eval_weights(w, cfg.savgol_order, m - i);
    acc = 0.0;
    for (int k = 0; k < w; ++k) acc += wr[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(n - w + k)];
    y[static_cast<std::size_t>(n - 1 - i)] = acc;
  }
  return out;
}

}  // namespace jm
