#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssx/anchors.hpp"
#include "ssx/classifier.hpp"
#include "ssx/cost_model.hpp"
#include "ssx/error.hpp"
#include "ssx/features.hpp"
#include "ssx/interpreter.hpp"
#include "ssx/ir.hpp"
#include "ssx/util.hpp"

namespace ssx {

struct SelectionPolicy {
  enum class Mode { by_rules, by_model };

  Mode mode = Mode::by_rules;
  std::vector<Rule> rules;             // by_rules: match any
  const Classifier* model = nullptr;   // by_model
  double threshold = 0.5;

  static SelectionPolicy by_rules(std::vector<Rule> rules) {
    SelectionPolicy p;
    p.mode = Mode::by_rules;
    p.rules = std::move(rules);
    return p;
  }

  static SelectionPolicy by_model(const Classifier& model, double threshold) {
    SelectionPolicy p;
    p.mode = Mode::by_model;
    p.model = &model;
    p.threshold = threshold;
    return p;
  }

  void validate() const {
    if (mode == Mode::by_model) {
      require(model != nullptr, Errc::invalid_config, "by_model selection needs a model");
      require(threshold >= 0.0 && threshold <= 1.0, Errc::invalid_config,
              "selection threshold must lie in [0,1]");
    }
  }
};

// Store ids whose static features the policy flags for verification.
inline std::vector<std::string> select_stores(const TinyProgram& prog,
                                              const FeatureCatalog& catalog,
                                              const SelectionPolicy& policy) {
  policy.validate();
  const auto features = extract_features(prog, catalog);
  std::vector<std::string> selected;
  for (const auto& [id, fv] : features) {
    bool take = false;
    if (policy.mode == SelectionPolicy::Mode::by_rules) {
      for (const auto& r : policy.rules)
        if (r.satisfied_by(fv, catalog)) {
          take = true;
          break;
        }
    } else {
      take = policy.model->predict_proba(fv) >= policy.threshold;
    }
    if (take) selected.push_back(id);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

// Marks the selected stores verified: they load the target, compare, and only
// write on inequality. Everything else is untouched.
inline TinyProgram apply_store_verify(const TinyProgram& prog,
                                      const std::vector<std::string>& selection) {
  std::set<std::string> want(selection.begin(), selection.end());
  std::set<std::string> present;
  prog.for_each_store([&present](const StoreStmt& st, int) { present.insert(st.id); });
  for (const auto& id : want)
    require(present.count(id), Errc::unknown_store, "selection names unknown store: " + id);

  TinyProgram out = prog;
  out.for_each_store_mut([&want](StoreStmt& st) {
    if (want.count(st.id)) st.verified = true;
  });
  return out;
}

struct TransformReport {
  std::vector<std::string> selected_store_ids;
  double baseline_cost = 0.0;
  double transformed_cost = 0.0;
  std::uint64_t eliminated_writes = 0;
  std::uint64_t added_reads = 0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"selected_store_ids", selected_store_ids},
                          {"baseline_cost", baseline_cost},
                          {"transformed_cost", transformed_cost},
                          {"eliminated_writes", eliminated_writes},
                          {"added_reads", added_reads}};
  }

  std::string to_csv() const {
    std::string out = "metric,value\n";
    out += "selected_stores," + std::to_string(selected_store_ids.size()) + "\n";
    out += "baseline_cost," + fmt_double(baseline_cost) + "\n";
    out += "transformed_cost," + fmt_double(transformed_cost) + "\n";
    out += "eliminated_writes," + std::to_string(eliminated_writes) + "\n";
    out += "added_reads," + std::to_string(added_reads) + "\n";
    return out;
  }
};

// Cost accounting between two profiles of the same inputs: every dynamic
// store pays c_store unless its verify found the value in place, and every
// verify pays c_read (the compare itself rides free).
inline TransformReport account_costs(const ProfileResult& baseline,
                                     const ProfileResult& transformed, const NvmCosts& costs) {
  costs.validate();
  require(baseline.stores.size() == transformed.stores.size(), Errc::profile_mismatch,
          "profiles cover different store sets");
  TransformReport rep;
  for (const auto& [id, base] : baseline.stores) {
    const auto it = transformed.stores.find(id);
    require(it != transformed.stores.end(), Errc::profile_mismatch,
            "store missing from transformed profile: " + id);
    const auto& tr = it->second;
    require(base.total == tr.total, Errc::profile_mismatch,
            "execution counts differ for store " + id + " (different inputs?)");
    require(!base.verified, Errc::profile_mismatch,
            "baseline profile contains a verified store: " + id);
    rep.baseline_cost += double(base.total) * costs.c_store;
    rep.transformed_cost += double(tr.reads) * costs.c_read + double(tr.writes) * costs.c_store;
    if (tr.verified) {
      rep.selected_store_ids.push_back(id);
      rep.added_reads += tr.reads;
      rep.eliminated_writes += base.writes - tr.writes;
    }
  }
  return rep;
}

}  // namespace ssx
