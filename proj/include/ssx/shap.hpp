#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssx/correlation.hpp"
#include "ssx/dataset.hpp"
#include "ssx/error.hpp"
#include "ssx/rng.hpp"
#include "ssx/util.hpp"

namespace ssx {

enum class ShapMethod { exact, sampled };

struct ShapConfig {
  ShapMethod method = ShapMethod::sampled;
  int exact_limit = 12;        // exact mode enumerates 2^|features| coalitions
  int n_imputation_draws = 8;  // 0 sweeps the whole background deterministically
  int n_permutations = 48;
  int background_subsample = 0;  // 0 keeps the full dataset as background
  std::uint64_t seed = 1;

  void validate() const {
    require(exact_limit >= 1 && exact_limit <= 24, Errc::invalid_config,
            "exact_limit must lie in [1,24]");
    require(n_imputation_draws >= 0, Errc::invalid_config, "n_imputation_draws must be >= 0");
    require(n_permutations >= 1, Errc::invalid_config, "n_permutations must be >= 1");
    require(background_subsample >= 0, Errc::invalid_config,
            "background_subsample must be >= 0");
  }
};

struct Explanation {
  std::string instance_id;
  double base_value = 0.0;  // mean model output over the background draws
  std::vector<double> shap_values;
};

// One imputation: present features keep the instance's bits, absent ones take
// the bits of a single uniformly drawn background record.
inline FeatureVector impute(const std::vector<std::uint8_t>& mask, const FeatureVector& instance,
                            const Dataset& background, std::uint64_t seed) {
  require(mask.size() == instance.size(), Errc::dimension_mismatch,
          "presence mask length does not match the instance");
  require(!background.records.empty(), Errc::empty_background, "background dataset is empty");
  Rng rng(seed);
  const auto& drawn = background.records[rng.below(background.records.size())].features;
  require(drawn.size() == instance.size(), Errc::dimension_mismatch,
          "background feature width does not match the instance");
  FeatureVector out = instance;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (!mask[i]) out.bits[i] = drawn[i];
  return out;
}

namespace detail {

// s!(n-s-1)!/n! for s = 0..n-1, built without factorial overflow.
inline std::vector<double> coalition_weights(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    // 1 / (n * C(n-1, s))
    double c = 1.0;
    for (int i = 0; i < s; ++i) c = c * double(n - 1 - i) / double(i + 1);
    w[static_cast<std::size_t>(s)] = 1.0 / (double(n) * c);
  }
  return w;
}

template <class F>
std::pair<double, std::vector<double>> exact_explain_core(
    F&& f, const std::vector<double>& x, const std::vector<std::vector<double>>& background,
    int n_draws, int exact_limit, std::uint64_t seed) {
  const int n = static_cast<int>(x.size());
  require(n >= 1, Errc::dimension_mismatch, "instance has no features");
  require(n <= exact_limit, Errc::too_many_features,
          "exact mode handles at most " + std::to_string(exact_limit) + " features, got " +
              std::to_string(n));
  require(!background.empty(), Errc::empty_background, "background dataset is empty");

  // Shared imputation rows: either every background record in order, or a
  // fixed set of uniform draws reused for all coalitions so the efficiency
  // identity holds exactly.
  std::vector<std::size_t> rows;
  if (n_draws == 0) {
    rows.resize(background.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  } else {
    Rng rng(derive_seed(seed, "draws"));
    rows.resize(static_cast<std::size_t>(n_draws));
    for (auto& r : rows) r = rng.below(background.size());
  }

  const std::size_t n_masks = std::size_t{1} << n;
  std::vector<double> vtable(n_masks, 0.0);
  std::vector<double> z(x.size());
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    double acc = 0.0;
    for (std::size_t r : rows) {
      const auto& b = background[r];
      require(b.size() == x.size(), Errc::dimension_mismatch,
              "background feature width does not match the instance");
      for (int i = 0; i < n; ++i)
        z[static_cast<std::size_t>(i)] =
            (mask >> i) & 1 ? x[static_cast<std::size_t>(i)] : b[static_cast<std::size_t>(i)];
      acc += f(z);
    }
    vtable[mask] = acc / double(rows.size());
  }

  const auto w = coalition_weights(n);
  std::vector<double> psi(static_cast<std::size_t>(n), 0.0);
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    const int size = std::popcount(mask);
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1) continue;
      psi[static_cast<std::size_t>(i)] +=
          w[static_cast<std::size_t>(size)] * (vtable[mask | (std::size_t{1} << i)] - vtable[mask]);
    }
  }
  return {vtable[0], std::move(psi)};
}

template <class F>
std::pair<double, std::vector<double>> sampled_explain_core(
    F&& f, const std::vector<double>& x, const std::vector<std::vector<double>>& background,
    int n_permutations, std::uint64_t seed) {
  const std::size_t n = x.size();
  require(n >= 1, Errc::dimension_mismatch, "instance has no features");
  require(!background.empty(), Errc::empty_background, "background dataset is empty");
  require(n_permutations >= 1, Errc::invalid_config, "n_permutations must be >= 1");

  Rng rng(derive_seed(seed, "perm"));
  std::vector<std::size_t> order(n);
  std::vector<double> psi(n, 0.0), z;
  double base = 0.0;
  for (int t = 0; t < n_permutations; ++t) {
    const auto& b = background[rng.below(background.size())];
    require(b.size() == n, Errc::dimension_mismatch,
            "background feature width does not match the instance");
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    z = b;
    double prev = f(z);
    base += prev;
    for (std::size_t i : order) {
      z[i] = x[i];
      const double cur = f(z);
      psi[i] += cur - prev;
      prev = cur;
    }
  }
  for (auto& p : psi) p /= double(n_permutations);
  return {base / double(n_permutations), std::move(psi)};
}

}  // namespace detail

template <class F>
double shapley_exact(F&& f, const std::vector<double>& x,
                     const std::vector<std::vector<double>>& background, std::size_t feature,
                     int n_draws, std::uint64_t seed, int exact_limit = 12) {
  require(feature < x.size(), Errc::dimension_mismatch, "feature index out of range");
  return detail::exact_explain_core(std::forward<F>(f), x, background, n_draws, exact_limit,
                                    seed)
      .second[feature];
}

template <class F>
double shapley_sampled(F&& f, const std::vector<double>& x,
                       const std::vector<std::vector<double>>& background, std::size_t feature,
                       int n_permutations, std::uint64_t seed) {
  require(feature < x.size(), Errc::dimension_mismatch, "feature index out of range");
  return detail::sampled_explain_core(std::forward<F>(f), x, background, n_permutations, seed)
      .second[feature];
}

template <class F>
Explanation explain_instance(F&& f, const std::string& instance_id, const std::vector<double>& x,
                             const std::vector<std::vector<double>>& background,
                             const ShapConfig& cfg) {
  cfg.validate();
  Explanation e;
  e.instance_id = instance_id;
  auto [base, psi] =
      cfg.method == ShapMethod::exact
          ? detail::exact_explain_core(f, x, background, cfg.n_imputation_draws,
                                       cfg.exact_limit, cfg.seed)
          : detail::sampled_explain_core(f, x, background, cfg.n_permutations, cfg.seed);
  e.base_value = base;
  e.shap_values = std::move(psi);
  return e;
}

// Background rows for a dataset: every record, or a seeded subsample.
inline std::vector<std::vector<double>> background_matrix(const Dataset& ds,
                                                          const ShapConfig& cfg) {
  require(!ds.records.empty(), Errc::empty_background, "background dataset is empty");
  std::vector<std::vector<double>> bg;
  if (cfg.background_subsample > 0 &&
      static_cast<std::size_t>(cfg.background_subsample) < ds.records.size()) {
    Rng rng(derive_seed(cfg.seed, "background"));
    std::vector<std::size_t> idx(ds.records.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(cfg.background_subsample));
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) {
      bg.emplace_back(ds.records[i].features.size());
      for (std::size_t k = 0; k < bg.back().size(); ++k)
        bg.back()[k] = ds.records[i].features[k] ? 1.0 : 0.0;
    }
  } else {
    for (const auto& r : ds.records) {
      bg.emplace_back(r.features.size());
      for (std::size_t k = 0; k < bg.back().size(); ++k)
        bg.back()[k] = r.features[k] ? 1.0 : 0.0;
    }
  }
  return bg;
}

// One explanation per record; per-instance seeds come off the master seed by
// instance id, so ordering and parallel scheduling cannot change results.
template <class F>
std::vector<Explanation> explain_dataset(F&& f, const Dataset& ds, const ShapConfig& cfg) {
  cfg.validate();
  const auto bg = background_matrix(ds, cfg);
  std::vector<Explanation> out;
  out.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    ShapConfig per = cfg;
    per.seed = derive_seed(cfg.seed, "explain." + r.store_id);
    std::vector<double> x(r.features.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = r.features[i] ? 1.0 : 0.0;
    out.push_back(explain_instance(f, r.store_id, x, bg, per));
  }
  return out;
}

struct CombinedShapRecord {
  std::vector<std::string> codes;  // catalog order
  double combined_shap = 0.0;      // meaningful only when support > 0
  double silent_ratio = 0.0;       // from labels only
  std::size_t support = 0;
};

namespace detail {

inline CombinedShapRecord combine_indices(const Dataset& ds,
                                          const std::vector<Explanation>& explanations,
                                          const std::vector<std::size_t>& feat_idx) {
  CombinedShapRecord rec;
  for (std::size_t fi : feat_idx) rec.codes.push_back(ds.catalog.at(fi).code);
  double sum = 0.0;
  std::size_t silent = 0;
  for (std::size_t j = 0; j < ds.records.size(); ++j) {
    const auto& r = ds.records[j];
    bool all = true;
    for (std::size_t fi : feat_idx)
      if (!r.features[fi]) {
        all = false;
        break;
      }
    if (!all) continue;
    ++rec.support;
    if (r.silent_label) ++silent;
    for (std::size_t fi : feat_idx) sum += explanations[j].shap_values[fi];
  }
  if (rec.support > 0) {
    rec.combined_shap = sum / (double(rec.support) * double(feat_idx.size()));
    rec.silent_ratio = double(silent) / double(rec.support);
  }
  return rec;
}

}  // namespace detail

// Mean summed attribution of the k codes over the records carrying all of
// them, next to the exact fraction of those records labeled silent.
inline CombinedShapRecord combined_shap(const Dataset& ds,
                                        const std::vector<Explanation>& explanations,
                                        const std::vector<std::string>& feature_codes) {
  require(feature_codes.size() >= 2, Errc::invalid_config,
          "combined attribution needs at least two feature codes");
  require(explanations.size() == ds.records.size(), Errc::dimension_mismatch,
          "explanations do not cover the dataset");
  std::vector<std::size_t> feat_idx;
  for (const auto& c : feature_codes) feat_idx.push_back(ds.catalog.require_index(c));
  std::sort(feat_idx.begin(), feat_idx.end());
  require(std::adjacent_find(feat_idx.begin(), feat_idx.end()) == feat_idx.end(),
          Errc::invalid_config, "feature codes must be distinct");
  return detail::combine_indices(ds, explanations, feat_idx);
}

// All 3-code vectors, then 4-code extensions of the strong 3-code vectors.
// min_support = 0 keeps every candidate (useful for counting).
inline std::vector<CombinedShapRecord> enumerate_combined(
    const Dataset& ds, const std::vector<Explanation>& explanations,
    double prune_threshold = 0.2, std::size_t min_support = 120) {
  require(explanations.size() == ds.records.size(), Errc::dimension_mismatch,
          "explanations do not cover the dataset");
  const std::size_t n = ds.catalog.size();
  require(n >= 3, Errc::invalid_config, "need at least three features to enumerate");
  for (std::size_t j = 0; j < ds.records.size(); ++j)
    require(explanations[j].shap_values.size() == n, Errc::dimension_mismatch,
            "explanation width does not match the catalog");

  // Bit masks per record make the support scans cheap.
  require(n <= 64, Errc::too_many_features, "combined enumeration supports up to 64 features");
  std::vector<std::uint64_t> masks(ds.records.size(), 0);
  std::vector<double> expl_sum;  // per record, reused below
  for (std::size_t j = 0; j < ds.records.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (ds.records[j].features[i]) masks[j] |= std::uint64_t{1} << i;

  const auto combine_mask = [&](std::uint64_t want,
                                const std::vector<std::size_t>& idx) -> CombinedShapRecord {
    CombinedShapRecord rec;
    for (std::size_t fi : idx) rec.codes.push_back(ds.catalog.at(fi).code);
    double sum = 0.0;
    std::size_t silent = 0;
    for (std::size_t j = 0; j < masks.size(); ++j) {
      if ((masks[j] & want) != want) continue;
      ++rec.support;
      if (ds.records[j].silent_label) ++silent;
      for (std::size_t fi : idx) sum += explanations[j].shap_values[fi];
    }
    if (rec.support > 0) {
      rec.combined_shap = sum / (double(rec.support) * double(idx.size()));
      rec.silent_ratio = double(silent) / double(rec.support);
    }
    return rec;
  };

  std::vector<CombinedShapRecord> out;
  std::vector<std::vector<std::size_t>> strong3;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        const std::uint64_t want = (std::uint64_t{1} << a) | (std::uint64_t{1} << b) |
                                   (std::uint64_t{1} << c);
        auto rec = combine_mask(want, {a, b, c});
        if (rec.support < min_support) continue;
        if (rec.combined_shap > prune_threshold) strong3.push_back({a, b, c});
        out.push_back(std::move(rec));
      }

  // Extensions, deduplicated via the combined bit mask.
  std::vector<std::uint64_t> seen;
  for (const auto& tri : strong3) {
    const std::uint64_t base_mask = (std::uint64_t{1} << tri[0]) | (std::uint64_t{1} << tri[1]) |
                                    (std::uint64_t{1} << tri[2]);
    for (std::size_t d = 0; d < n; ++d) {
      if (base_mask & (std::uint64_t{1} << d)) continue;
      const std::uint64_t want = base_mask | (std::uint64_t{1} << d);
      if (std::find(seen.begin(), seen.end(), want) != seen.end()) continue;
      seen.push_back(want);
      std::vector<std::size_t> idx = tri;
      idx.push_back(d);
      std::sort(idx.begin(), idx.end());
      auto rec = combine_mask(want, idx);
      if (rec.support < min_support) continue;
      out.push_back(std::move(rec));
    }
  }
  std::sort(out.begin(), out.end(), [](const CombinedShapRecord& l, const CombinedShapRecord& r) {
    if (l.codes.size() != r.codes.size()) return l.codes.size() < r.codes.size();
    return l.codes < r.codes;
  });
  return out;
}

struct ScatterRow {
  std::string codes;
  double combined_shap = 0.0;
  double silent_ratio = 0.0;
  double log10_support = 0.0;
};

struct CorrelationReport {
  std::optional<double> spearman;  // empty when a side has zero variance
  std::optional<double> pearson;
  std::vector<ScatterRow> rows;
};

inline CorrelationReport correlation_report(const std::vector<CombinedShapRecord>& records) {
  require(records.size() >= 3, Errc::insufficient_data,
          "correlation needs at least three combined records");
  CorrelationReport rep;
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    require(r.support > 0, Errc::insufficient_data,
            "correlation input contains an empty-support record");
    xs.push_back(r.combined_shap);
    ys.push_back(r.silent_ratio);
    rep.rows.push_back(ScatterRow{join(r.codes, "+"), r.combined_shap, r.silent_ratio,
                                  std::log10(double(r.support))});
  }
  rep.spearman = spearman(xs, ys);
  try {
    rep.pearson = pearson(xs, ys);
  } catch (const Error& e) {
    if (e.code() != Errc::zero_variance) throw;
  }
  return rep;
}

struct BeeswarmFeature {
  std::string code;
  std::size_t rank = 0;  // 1 = largest mean |shap|
  double mean_abs_shap = 0.0;
  double mean_set_shap = 0.0;    // mean attribution over instances with the bit set
  std::size_t n_set = 0;
  std::vector<double> values;    // per instance, aligned with bits
  std::vector<std::uint8_t> bits;
};

// Features ranked by mean absolute attribution, with the per-instance values
// and bit colors a beeswarm plot needs.
inline std::vector<BeeswarmFeature> beeswarm_data(const Dataset& ds,
                                                  const std::vector<Explanation>& explanations,
                                                  std::size_t top_n = 10) {
  require(explanations.size() == ds.records.size(), Errc::dimension_mismatch,
          "explanations do not cover the dataset");
  require(!explanations.empty(), Errc::insufficient_data, "no explanations to rank");
  const std::size_t n = ds.catalog.size();
  std::vector<BeeswarmFeature> feats(n);
  for (std::size_t i = 0; i < n; ++i) feats[i].code = ds.catalog.at(i).code;
  for (std::size_t j = 0; j < ds.records.size(); ++j) {
    require(explanations[j].shap_values.size() == n, Errc::dimension_mismatch,
            "explanation width does not match the catalog");
    for (std::size_t i = 0; i < n; ++i) {
      const double v = explanations[j].shap_values[i];
      const std::uint8_t bit = ds.records[j].features[i];
      feats[i].values.push_back(v);
      feats[i].bits.push_back(bit);
      feats[i].mean_abs_shap += std::abs(v);
      if (bit) {
        feats[i].mean_set_shap += v;
        ++feats[i].n_set;
      }
    }
  }
  for (auto& f : feats) {
    f.mean_abs_shap /= double(ds.records.size());
    if (f.n_set > 0) f.mean_set_shap /= double(f.n_set);
  }
  std::stable_sort(feats.begin(), feats.end(),
                   [](const BeeswarmFeature& a, const BeeswarmFeature& b) {
                     return a.mean_abs_shap > b.mean_abs_shap;
                   });
  if (feats.size() > top_n) feats.resize(top_n);
  for (std::size_t i = 0; i < feats.size(); ++i) feats[i].rank = i + 1;
  return feats;
}

// ---- CSV forms ----

inline std::string explanations_to_csv(const FeatureCatalog& catalog,
                                       const std::vector<Explanation>& explanations) {
  std::string out = "instance_id,base_value";
  for (const auto& f : catalog.features()) out += "," + f.code;
  out += "\n";
  for (const auto& e : explanations) {
    require(e.shap_values.size() == catalog.size(), Errc::dimension_mismatch,
            "explanation width does not match the catalog");
    out += e.instance_id + "," + fmt_double(e.base_value);
    for (double v : e.shap_values) out += "," + fmt_double(v);
    out += "\n";
  }
  return out;
}

inline std::vector<Explanation> explanations_from_csv(const FeatureCatalog& catalog,
                                                      const std::string& text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  require(!lines.empty(), Errc::schema_mismatch, "empty explanations file");
  std::string want = "instance_id,base_value";
  for (const auto& f : catalog.features()) want += "," + f.code;
  std::string got = lines[0];
  if (!got.empty() && got.back() == '\r') got.pop_back();
  require(got == want, Errc::schema_mismatch,
          "explanations header mismatch: expected '" + want + "', got '" + got + "'");
  std::vector<Explanation> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::string line = lines[ln];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    require(cells.size() == catalog.size() + 2, Errc::schema_mismatch,
            "bad cell count on explanations line " + std::to_string(ln + 1));
    Explanation e;
    e.instance_id = cells[0];
    e.base_value = std::stod(cells[1]);
    for (std::size_t i = 2; i < cells.size(); ++i) e.shap_values.push_back(std::stod(cells[i]));
    out.push_back(std::move(e));
  }
  return out;
}

inline std::string combined_to_csv(const std::vector<CombinedShapRecord>& records) {
  std::string out = "codes;combined_shap;silent_ratio;support\n";
  for (const auto& r : records) {
    out += join(r.codes, "+") + ";" + fmt_double(r.combined_shap) + ";" +
           fmt_double(r.silent_ratio) + ";" + std::to_string(r.support) + "\n";
  }
  return out;
}

inline std::vector<CombinedShapRecord> combined_from_csv(const std::string& text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  require(!lines.empty(), Errc::schema_mismatch, "empty combined-attribution file");
  std::string head = lines[0];
  if (!head.empty() && head.back() == '\r') head.pop_back();
  require(head == "codes;combined_shap;silent_ratio;support", Errc::schema_mismatch,
          "combined-attribution header mismatch");
  std::vector<CombinedShapRecord> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::string line = lines[ln];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ';');
    require(cells.size() == 4, Errc::schema_mismatch,
            "bad cell count on combined line " + std::to_string(ln + 1));
    CombinedShapRecord r;
    r.codes = split(cells[0], '+');
    r.combined_shap = std::stod(cells[1]);
    r.silent_ratio = std::stod(cells[2]);
    r.support = static_cast<std::size_t>(std::stoull(cells[3]));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ssx
