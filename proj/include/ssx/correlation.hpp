#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ssx/dataset.hpp"
#include "ssx/error.hpp"

namespace ssx {

namespace detail {

template <class T>
std::pair<double, double> mean_and_var(const std::vector<T>& xs) {
  double mean = 0.0;
  for (auto x : xs) mean += static_cast<double>(x);
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (auto x : xs) {
    const double d = static_cast<double>(x) - mean;
    var += d * d;
  }
  return {mean, var};
}

}  // namespace detail

// Pearson product-moment coefficient. Throws ZeroVariance on constant input.
template <class T>
double pearson(const std::vector<T>& a, const std::vector<T>& b) {
  require(a.size() == b.size(), Errc::dimension_mismatch, "pearson: unequal lengths");
  require(a.size() >= 2, Errc::insufficient_data, "pearson: need at least 2 samples");
  const auto [ma, va] = detail::mean_and_var(a);
  const auto [mb, vb] = detail::mean_and_var(b);
  require(va > 0.0 && vb > 0.0, Errc::zero_variance, "pearson: constant column");
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    cov += (static_cast<double>(a[i]) - ma) * (static_cast<double>(b[i]) - mb);
  return cov / std::sqrt(va * vb);
}

// Spearman rank correlation with average ranks for ties. Returns nullopt when
// either side has zero rank variance.
inline std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), Errc::dimension_mismatch, "spearman: unequal lengths");
  require(a.size() >= 2, Errc::insufficient_data, "spearman: need at least 2 samples");
  const auto ranks = [](const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&xs](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    std::vector<double> r(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
      const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const auto [ma, va] = detail::mean_and_var(ra);
  const auto [mb, vb] = detail::mean_and_var(rb);
  if (va <= 0.0 || vb <= 0.0) return std::nullopt;
  double cov = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) cov += (ra[i] - ma) * (rb[i] - mb);
  return cov / std::sqrt(va * vb);
}

inline std::vector<std::uint8_t> feature_column(const Dataset& ds, std::size_t feature) {
  std::vector<std::uint8_t> col;
  col.reserve(ds.records.size());
  for (const auto& r : ds.records) col.push_back(r.features[feature]);
  return col;
}

struct ReduceResult {
  FeatureCatalog catalog;
  std::vector<std::size_t> kept;  // original catalog indices, in order
};

// Greedy first-kept-wins reduction in catalog order: constant columns are
// dropped outright, then a feature is dropped when its |pearson| with any
// already-kept feature exceeds the threshold.
inline ReduceResult pearson_reduce(const Dataset& ds, double threshold = 0.95) {
  require(!ds.records.empty(), Errc::insufficient_data, "pearson_reduce: empty dataset");
  require(threshold > 0.0 && threshold <= 1.0, Errc::invalid_config,
          "pearson_reduce: threshold must be in (0,1]");
  ReduceResult out;
  std::vector<std::vector<std::uint8_t>> kept_cols;
  for (std::size_t f = 0; f < ds.catalog.size(); ++f) {
    auto col = feature_column(ds, f);
    const bool constant = std::all_of(col.begin(), col.end(),
                                      [&col](std::uint8_t b) { return b == col.front(); });
    if (constant) continue;
    bool keep = true;
    for (const auto& prev : kept_cols) {
      if (std::abs(pearson(prev, col)) > threshold) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    out.catalog.add(ds.catalog.at(f));
    out.kept.push_back(f);
    kept_cols.push_back(std::move(col));
  }
  return out;
}

}  // namespace ssx
