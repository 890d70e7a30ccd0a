#pragma once

#include <json.hpp>

#include "ssx/error.hpp"

namespace ssx {

// Abstract per-operation costs (energy or latency, caller's choice); the
// verify compare is treated as free next to the read it rides on.
struct NvmCosts {
  double c_read = 1.0;
  double c_store = 2.5;

  void validate() const {
    require(c_read > 0.0 && c_store > 0.0, Errc::invalid_config,
            "read and store costs must be positive");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"c_read", c_read}, {"c_store", c_store}};
  }

  static NvmCosts from_json(const nlohmann::json& j) {
    NvmCosts c;
    c.c_read = j.value("c_read", c.c_read);
    c.c_store = j.value("c_store", c.c_store);
    return c;
  }
};

struct MistakeProfile {
  double m = 0.0;  // mistaken predictions, FP + FN
  double p = 0.0;  // fraction of mistakes that are false positives

  void validate() const {
    require(m >= 0.0, Errc::invalid_config, "mistake count must be >= 0");
    require(p >= 0.0 && p <= 1.0, Errc::invalid_config, "FP fraction must lie in [0,1]");
  }
};

// False positives verify stores that were not silent: one wasted read each.
inline double fp_overhead(const MistakeProfile& mp, const NvmCosts& costs) {
  mp.validate();
  costs.validate();
  return mp.m * mp.p * costs.c_read;
}

// False negatives forgo the store-for-read swap on silent stores.
inline double fn_overhead(const MistakeProfile& mp, const NvmCosts& costs) {
  mp.validate();
  costs.validate();
  return mp.m * (1.0 - mp.p) * (costs.c_store - costs.c_read);
}

// Affine in p: m·(c_store − c_read) − m·(c_store − 2·c_read)·p.
inline double total_overhead(const MistakeProfile& mp, const NvmCosts& costs) {
  mp.validate();
  costs.validate();
  return mp.m * (costs.c_store - costs.c_read) -
         mp.m * (costs.c_store - 2.0 * costs.c_read) * mp.p;
}

enum class RegimeAdvice { favor_recall, indifferent, favor_precision_for_cost };

inline const char* to_string(RegimeAdvice a) {
  switch (a) {
    case RegimeAdvice::favor_recall: return "favor_recall";
    case RegimeAdvice::indifferent: return "indifferent";
    case RegimeAdvice::favor_precision_for_cost: return "favor_precision_for_cost";
  }
  return "?";
}

// Deployment-cost regime only: when a store costs more than two reads, total
// overhead falls as the false-positive share rises, so recall-heavy tuning is
// cheaper to run. Explanation quality separately wants precision on top.
inline RegimeAdvice regime_advice(const NvmCosts& costs) {
  costs.validate();
  if (costs.c_store > 2.0 * costs.c_read) return RegimeAdvice::favor_recall;
  if (costs.c_store == 2.0 * costs.c_read) return RegimeAdvice::indifferent;
  return RegimeAdvice::favor_precision_for_cost;
}

}  // namespace ssx
