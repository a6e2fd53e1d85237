// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <complex>
#include <numbers>
#include <vector>

#include "jumpmetrics/core.hpp"

namespace jm {

namespace detail {

using cplx = std::complex<double>;

inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

/// Unscaled DFT (sign -1 forward). Power-of-two sizes use radix-2; other
/// sizes fall back to the direct transform, which is plenty for the short
/// displacement series this library handles.
inline std::vector<cplx> dft(const std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (std::has_single_bit(n)) {
    std::vector<cplx> a = x;
    fft_pow2(a, inverse);
    return a;
  }
  std::vector<cplx> roots(n);
  const double base = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j)
    roots[j] = cplx(std::cos(base * static_cast<double>(j)), std::sin(base * static_cast<double>(j)));
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) acc += x[j] * roots[(k * j) % n];
    out[k] = acc;
  }
  return out;
}

}  // namespace detail

/// Fourier-domain resampling to an arbitrary length: the spectrum is
/// truncated or zero-padded symmetrically, the Nyquist bin is split/folded to
/// keep the output real, and the DC bin scaling preserves the series mean.
inline TimeSeries fft_resample(const TimeSeries& series, std::size_t target_len) {
  if (target_len < 2) fail(errc::argument, "fft_resample: target_len must be >= 2");
  require_nonempty(series, "fft_resample");
  const std::size_t n = series.size();
  const std::size_t m = target_len;

  TimeSeries out;
  out.unit = series.unit;
  out.rate_hz = series.rate_hz * static_cast<double>(m) / static_cast<double>(n);
  if (n == m) {
    out.samples = series.samples;
    return out;
  }

  std::vector<detail::cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = detail::cplx(series.samples[i], 0.0);
  const std::vector<detail::cplx> spec = detail::dft(x, false);

  std::vector<detail::cplx> resized(m, detail::cplx(0.0, 0.0));
  const std::size_t keep = std::min(n, m);
  const std::size_t pos = keep / 2 + 1;          // non-negative bins kept, incl. DC
  const std::size_t neg = keep - pos;            // negative-frequency bins kept
  for (std::size_t k = 0; k < pos; ++k) resized[k] = spec[k];
  for (std::size_t k = 1; k <= neg; ++k) resized[m - k] = spec[n - k];
  if (keep % 2 == 0) {
    const std::size_t nyq = keep / 2;
    if (m < n) {
      resized[nyq] += spec[n - nyq];             // fold the old mirror bin onto the new Nyquist
    } else {
      resized[nyq] *= 0.5;                       // split the old Nyquist across both mirrors
      resized[m - nyq] = resized[nyq];
    }
  }

  const std::vector<detail::cplx> y = detail::dft(resized, true);
  out.samples.resize(m);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < m; ++i) out.samples[i] = y[i].real() * scale;
  return out;
}

}  // namespace jm
