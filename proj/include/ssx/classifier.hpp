#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssx/dataset.hpp"
#include "ssx/error.hpp"
#include "ssx/forest.hpp"
#include "ssx/metrics.hpp"
#include "ssx/mlp.hpp"
#include "ssx/util.hpp"

namespace ssx {

inline std::vector<double> to_input(const FeatureVector& fv) {
  std::vector<double> x(fv.size());
  for (std::size_t i = 0; i < fv.size(); ++i) x[i] = fv[i] ? 1.0 : 0.0;
  return x;
}

inline std::vector<std::vector<double>> feature_matrix(const Dataset& ds) {
  std::vector<std::vector<double>> X;
  X.reserve(ds.records.size());
  for (const auto& r : ds.records) X.push_back(to_input(r.features));
  return X;
}

inline std::vector<int> label_vector(const Dataset& ds) {
  std::vector<int> y;
  y.reserve(ds.records.size());
  for (const auto& r : ds.records) y.push_back(r.silent_label ? 1 : 0);
  return y;
}

struct Classifier {
  enum class Kind { mlp, forest };

  Kind kind = Kind::mlp;
  Mlp mlp;
  Forest forest;
  double threshold = 0.5;
  std::vector<std::string> feature_codes;  // catalog the model was fit on

  int input_dim() const {
    return kind == Kind::mlp ? mlp.input_dim() : forest.input_dim;
  }

  double predict_proba(const std::vector<double>& x) const {
    return kind == Kind::mlp ? mlp.forward(x) : forest.forward(x);
  }

  double predict_proba(const FeatureVector& fv) const { return predict_proba(to_input(fv)); }

  // True means silent; a probability exactly at the threshold counts.
  bool predict(const std::vector<double>& x) const { return predict_proba(x) >= threshold; }
  bool predict(const FeatureVector& fv) const { return predict(to_input(fv)); }

  nlohmann::json to_json() const {
    nlohmann::json j{{"version", 1},
                     {"kind", kind == Kind::mlp ? "mlp" : "forest"},
                     {"threshold", threshold},
                     {"feature_codes", feature_codes}};
    j["model"] = kind == Kind::mlp ? mlp.to_json() : forest.to_json();
    return j;
  }

  static Classifier from_json(const nlohmann::json& j) {
    require(j.value("version", 0) == 1, Errc::schema_mismatch,
            "unsupported model file version");
    Classifier c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mlp") {
      c.kind = Kind::mlp;
      c.mlp = Mlp::from_json(j.at("model"));
    } else if (kind == "forest") {
      c.kind = Kind::forest;
      c.forest = Forest::from_json(j.at("model"));
    } else {
      fail(Errc::schema_mismatch, "unknown model kind: " + kind);
    }
    c.threshold = j.value("threshold", 0.5);
    require(c.threshold > 0.0 && c.threshold < 1.0, Errc::schema_mismatch,
            "decision threshold must lie in (0,1)");
    c.feature_codes = j.value("feature_codes", std::vector<std::string>{});
    return c;
  }

  void save(const std::string& path) const { write_file(path, to_json().dump(2) + "\n"); }

  static Classifier load(const std::string& path) {
    return from_json(nlohmann::json::parse(read_file(path)));
  }
};

inline std::vector<double> predict_probs(const Classifier& model, const Dataset& ds) {
  std::vector<double> probs;
  probs.reserve(ds.records.size());
  for (const auto& r : ds.records) probs.push_back(model.predict_proba(r.features));
  return probs;
}

inline Metrics evaluate(const Classifier& model, const Dataset& ds) {
  return score_metrics(label_vector(ds), predict_probs(model, ds), model.threshold);
}

struct SplitConfig {
  double train_frac = 0.8;
  std::uint64_t seed = 1;
};

struct TrainOutcome {
  Classifier model;
  Metrics held_out;  // on the test part of the split, at threshold 0.5
  SplitIdx split;
};

namespace detail {

inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.catalog = ds.catalog;
  for (std::size_t r : rows) out.records.push_back(ds.records[r]);
  return out;
}

}  // namespace detail

inline TrainOutcome train_mlp(const Dataset& ds, const MlpConfig& cfg, const SplitConfig& split) {
  TrainOutcome out;
  out.split = split_dataset(ds.records.size(), split.train_frac, split.seed);
  out.model.kind = Classifier::Kind::mlp;
  out.model.feature_codes = ds.catalog.codes();
  out.model.mlp = fit_mlp(feature_matrix(ds), label_vector(ds), out.split.train, cfg);
  out.held_out = evaluate(out.model, detail::subset(ds, out.split.test));
  return out;
}

inline TrainOutcome train_forest(const Dataset& ds, const ForestConfig& cfg,
                                 const SplitConfig& split) {
  TrainOutcome out;
  out.split = split_dataset(ds.records.size(), split.train_frac, split.seed);
  out.model.kind = Classifier::Kind::forest;
  out.model.feature_codes = ds.catalog.codes();
  out.model.forest = fit_forest(feature_matrix(ds), label_vector(ds), out.split.train, cfg);
  out.held_out = evaluate(out.model, detail::subset(ds, out.split.test));
  return out;
}

// Threshold sweep on a labeled dataset; see tune_threshold on raw scores.
inline ThresholdResult tune_threshold(const Classifier& model, const Dataset& ds,
                                      TuneMode mode) {
  return tune_threshold(label_vector(ds), predict_probs(model, ds), mode);
}

}  // namespace ssx
