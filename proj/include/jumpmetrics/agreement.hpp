// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "jumpmetrics/core.hpp"
#include "jumpmetrics/metrics.hpp"

namespace jm {

struct BlandAltmanResult {
  double bias_cm = 0.0;
  double sd_cm = 0.0;
  double loa_low_cm = 0.0;
  double loa_high_cm = 0.0;
  std::size_t n = 0;
};

struct AgreementResult {
  double icc_2_1 = 0.0;
  Method method_a = Method::FP;
  Method method_b = Method::FP;
  std::size_t n = 0;
};

/// ICC(2,1): two-way random effects, absolute agreement, single measurement.
/// ratings is a complete n-targets x k-raters matrix.
inline double icc_2_1_value(const std::vector<std::vector<double>>& ratings) {
  const std::size_t n = ratings.size();
  if (n < 2) fail(errc::argument, "icc_2_1: need at least 2 targets");
  const std::size_t k = ratings.front().size();
  if (k < 2) fail(errc::argument, "icc_2_1: need at least 2 raters");
  for (const auto& row : ratings)
    if (row.size() != k) fail(errc::input, "icc_2_1: ragged ratings matrix");

  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double v = ratings[i][j];
      if (!std::isfinite(v)) fail(errc::input, "icc_2_1: non-finite cell");
      row_mean[i] += v;
      col_mean[j] += v;
      grand += v;
    }
  }
  for (double& v : row_mean) v /= dk;
  for (double& v : col_mean) v /= dn;
  grand /= dn * dk;

  double ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double d = ratings[i][j] - grand;
      ss_total += d * d;
    }
  double ss_rows = 0.0;
  for (double rm : row_mean) ss_rows += (rm - grand) * (rm - grand);
  ss_rows *= dk;
  double ss_cols = 0.0;
  for (double cm : col_mean) ss_cols += (cm - grand) * (cm - grand);
  ss_cols *= dn;
  const double ss_err = ss_total - ss_rows - ss_cols;

  const double msr = ss_rows / (dn - 1.0);
  const double msc = ss_cols / (dk - 1.0);
  const double mse = ss_err / ((dn - 1.0) * (dk - 1.0));

  const double denom = msr + (dk - 1.0) * mse + (dk / dn) * (msc - mse);
  if (denom == 0.0) return 1.0;  // zero variance everywhere: perfect agreement
  return (msr - mse) / denom;
}

inline AgreementResult icc_2_1(const std::vector<std::vector<double>>& ratings, Method a, Method b) {
  return {icc_2_1_value(ratings), a, b, ratings.size()};
}

/// Bland-Altman bias and limits of agreement for paired measurements.
/// Differences are a - b; sd uses the n-1 denominator.
inline BlandAltmanResult bland_altman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(errc::pairing, "bland_altman: series lengths differ (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2) fail(errc::argument, "bland_altman: need at least 2 pairs");
  std::vector<double> diffs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  BlandAltmanResult r;
  r.n = a.size();
  r.bias_cm = mean(diffs);
  r.sd_cm = sample_sd(diffs);
  r.loa_low_cm = r.bias_cm - 1.96 * r.sd_cm;
  r.loa_high_cm = r.bias_cm + 1.96 * r.sd_cm;
  return r;
}

/// Intra-session test-retest reliability: ICC(2,1) with repetitions as
/// raters and participants as targets. Rows with any non-finite cell
/// (missing repetitions) are excluded.
inline double test_retest_reliability(const std::vector<std::vector<double>>& heights_per_target) {
  std::vector<std::vector<double>> complete;
  for (const auto& row : heights_per_target) {
    bool ok = !row.empty();
    for (double v : row)
      if (!std::isfinite(v)) ok = false;
    if (ok) complete.push_back(row);
  }
  if (complete.size() < 2)
    fail(errc::input, "test_retest_reliability: fewer than 2 complete targets");
  return icc_2_1_value(complete);
}

}  // namespace jm
