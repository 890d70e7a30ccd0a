#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ssx/error.hpp"
#include "ssx/rng.hpp"

namespace ssx {

struct Metrics {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;  // 0 when undefined; see precision_defined
  double recall = 0.0;
  bool precision_defined = false;
  bool recall_defined = false;

  static Metrics from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                             std::uint64_t fn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.tn = tn;
    m.fn = fn;
    m.precision_defined = tp + fp > 0;
    m.recall_defined = tp + fn > 0;
    if (m.precision_defined) m.precision = double(tp) / double(tp + fp);
    if (m.recall_defined) m.recall = double(tp) / double(tp + fn);
    return m;
  }
};

// Confusion counts for probability scores against binary labels; a score at
// the threshold counts as a positive prediction.
inline Metrics score_metrics(const std::vector<int>& labels, const std::vector<double>& probs,
                             double threshold) {
  require(labels.size() == probs.size(), Errc::dimension_mismatch,
          "labels and probabilities differ in length");
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = probs[i] >= threshold;
    const bool truth = labels[i] != 0;
    if (pred && truth)
      ++tp;
    else if (pred && !truth)
      ++fp;
    else if (!pred && truth)
      ++fn;
    else
      ++tn;
  }
  return Metrics::from_counts(tp, fp, tn, fn);
}

enum class TuneMode { precision_over_recall, recall_over_precision };

struct ThresholdResult {
  double threshold = 0.5;
  bool feasible = false;  // false: no threshold attains the requested regime
  Metrics metrics;
};

// Sweeps the observed probabilities as candidate thresholds. In
// precision_over_recall mode the feasible candidates satisfy
// precision > recall; among them the sweep maximizes recall and breaks ties
// toward the smallest threshold. The other mode swaps the two roles.
inline ThresholdResult tune_threshold(const std::vector<int>& labels,
                                      const std::vector<double>& probs, TuneMode mode) {
  require(labels.size() == probs.size(), Errc::dimension_mismatch,
          "labels and probabilities differ in length");
  require(!labels.empty(), Errc::insufficient_data, "cannot tune a threshold on no data");
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y != 0 ? has_pos : has_neg) = true;
  require(has_pos && has_neg, Errc::degenerate_dataset,
          "threshold tuning needs both classes present");

  std::vector<double> candidates = probs;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  ThresholdResult best;
  for (double t : candidates) {
    const Metrics m = score_metrics(labels, probs, t);
    const double primary = mode == TuneMode::precision_over_recall ? m.precision : m.recall;
    const double secondary = mode == TuneMode::precision_over_recall ? m.recall : m.precision;
    if (!(primary > secondary)) continue;
    const double best_secondary =
        mode == TuneMode::precision_over_recall ? best.metrics.recall : best.metrics.precision;
    if (!best.feasible || secondary > best_secondary) {
      best.feasible = true;
      best.threshold = t;
      best.metrics = m;
    }
  }
  if (!best.feasible) {
    best.threshold = 0.5;
    best.metrics = score_metrics(labels, probs, 0.5);
  }
  return best;
}

struct SplitIdx {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Deterministic shuffled split of [0, n) into train/test parts.
inline SplitIdx split_dataset(std::size_t n, double train_frac, std::uint64_t seed) {
  require(n >= 2, Errc::insufficient_data, "need at least two records to split");
  require(train_frac > 0.0 && train_frac < 1.0, Errc::invalid_config,
          "train_frac must lie strictly between 0 and 1");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(idx);
  std::size_t n_train = static_cast<std::size_t>(double(n) * train_frac);
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  SplitIdx s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return s;
}

}  // namespace ssx
