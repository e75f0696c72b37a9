// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Score-distribution summaries: equal-width histogram, Gaussian KDE with
// Silverman's bandwidth, and the first four moments. Differences in
// distribution shape between subgroups are where fairness gaps originate,
// so these are first-class report artifacts.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdet/error.hpp"
#include "fairdet/trial.hpp"

namespace fairdet {

struct Histogram {
  std::vector<double> edges;      // bins + 1, ascending
  std::vector<double> densities;  // per bin; integrates to 1 over the range
};

struct Kde {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

struct Moments {
  double mean = 0.0;
  double sd = 0.0;        // population convention (divide by n)
  double skewness = 0.0;  // 0 when sd == 0
  double excess_kurtosis = 0.0;
};

struct DistributionSummary {
  SubgroupKey subgroup;
  bool is_target = false;
  std::size_t n = 0;
  Moments moments;
  Histogram histogram;
  std::optional<Kde> kde;  // absent for degenerate (single-value) samples
  std::string note;        // set when kde is skipped
};

namespace detail {

inline Moments compute_moments(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments m;
  m.mean = mean;
  m.sd = std::sqrt(m2);
  if (m2 > 0.0) {
    m.skewness = m3 / (m2 * std::sqrt(m2));
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

// Linear-interpolation quantile on a sorted sample (the numpy default).
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double idx = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = idx - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline double gauss_kernel(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace detail

// Silverman's rule of thumb, robust variant: 0.9 * min(sd, IQR/1.34) * n^(-1/5),
// falling back to the plain sd rule when the IQR collapses. Requires sd > 0.
inline double silverman_bandwidth(std::span<const double> sorted, double sd) {
  const double n = static_cast<double>(sorted.size());
  const double iqr =
      detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return 0.9 * spread * std::pow(n, -0.2);
}

// Summarizes one score sample. `bins` controls the histogram; `bandwidth`
// overrides Silverman's rule when positive. A sample with a single distinct
// value yields a one-bin histogram of unit width centered on the value and
// no KDE.
inline DistributionSummary score_distribution(std::span<const double> scores,
                                              bool is_target, const SubgroupKey& subgroup,
                                              std::size_t bins = 60,
                                              double bandwidth = 0.0) {
  if (scores.empty()) throw DataError("score distribution: empty sample");
  if (bins == 0) throw DataError("score distribution: bins must be >= 1");

  DistributionSummary out;
  out.subgroup = subgroup;
  out.is_target = is_target;
  out.n = scores.size();
  out.moments = detail::compute_moments(scores);

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double n = static_cast<double>(sorted.size());

  if (lo == hi) {
    out.histogram.edges = {lo - 0.5, lo + 0.5};
    out.histogram.densities = {1.0};
    out.note = "single distinct score; density estimate skipped";
    return out;
  }

  // Equal-width histogram over [lo, hi]; the final bin includes hi.
  const double width = (hi - lo) / static_cast<double>(bins);
  out.histogram.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    out.histogram.edges[i] = lo + width * static_cast<double>(i);
  out.histogram.edges[bins] = hi;
  std::vector<std::size_t> counts(bins, 0);
  for (double x : sorted) {
    std::size_t b = static_cast<std::size_t>((x - lo) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  out.histogram.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    out.histogram.densities[i] = static_cast<double>(counts[i]) / (n * width);

  // Gaussian KDE on a fixed 201-point grid spanning the data plus 3 bandwidths.
  Kde kde;
  kde.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(sorted, out.moments.sd);
  const double h = kde.bandwidth;
  constexpr std::size_t kGrid = 201;
  kde.grid.resize(kGrid);
  kde.density.assign(kGrid, 0.0);
  const double glo = lo - 3.0 * h;
  const double ghi = hi + 3.0 * h;
  const double gstep = (ghi - glo) / static_cast<double>(kGrid - 1);
  for (std::size_t i = 0; i < kGrid; ++i)
    kde.grid[i] = glo + gstep * static_cast<double>(i);

  constexpr std::size_t kExactLimit = 4096;
  if (sorted.size() <= kExactLimit) {
    for (std::size_t i = 0; i < kGrid; ++i) {
      double acc = 0.0;
      for (double x : sorted) acc += detail::gauss_kernel((kde.grid[i] - x) / h);
      kde.density[i] = acc / (n * h);
    }
  } else {
    // Linear binning onto 1024 anchors, then kernel sums over anchors. The
    // approximation error is far below plotting resolution and turns an
    // O(n * grid) scan into O(n + anchors * grid).
    constexpr std::size_t kAnchors = 1024;
    std::vector<double> weight(kAnchors, 0.0);
    const double astep = (hi - lo) / static_cast<double>(kAnchors - 1);
    for (double x : sorted) {
      const double pos = (x - lo) / astep;
      std::size_t a = static_cast<std::size_t>(pos);
      if (a >= kAnchors - 1) a = kAnchors - 2;
      const double frac = pos - static_cast<double>(a);
      weight[a] += 1.0 - frac;
      weight[a + 1] += frac;
    }
    for (std::size_t i = 0; i < kGrid; ++i) {
      double acc = 0.0;
      for (std::size_t a = 0; a < kAnchors; ++a) {
        if (weight[a] == 0.0) continue;
        const double center = lo + astep * static_cast<double>(a);
        acc += weight[a] * detail::gauss_kernel((kde.grid[i] - center) / h);
      }
      kde.density[i] = acc / (n * h);
    }
  }
  out.kde = std::move(kde);
  return out;
}

}  // namespace fairdet
