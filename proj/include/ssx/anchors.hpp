#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssx/dataset.hpp"
#include "ssx/error.hpp"
#include "ssx/rng.hpp"

namespace ssx {

struct Literal {
  std::string code;
  std::uint8_t bit = 1;

  bool operator==(const Literal& o) const { return code == o.code && bit == o.bit; }
};

// Conjunction of bit constraints; at most one literal per feature.
struct Rule {
  std::vector<Literal> literals;

  bool satisfied_by(const FeatureVector& fv, const FeatureCatalog& catalog) const {
    for (const auto& lit : literals)
      if (fv[catalog.require_index(lit.code)] != lit.bit) return false;
    return true;
  }

  bool mentions(const std::string& code) const {
    for (const auto& lit : literals)
      if (lit.code == code) return true;
    return false;
  }

  // Stable identity string; doubles as the derived-seed tag for estimates.
  std::string key() const {
    std::vector<std::string> parts;
    for (const auto& lit : literals) parts.push_back(lit.code + "=" + (lit.bit ? "1" : "0"));
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& p : parts) out += p + "&";
    return out;
  }

  // The textual form: set bits as "(code > 0.00)", cleared as "(code = 0.00)".
  std::string text() const {
    if (literals.empty()) return "(true)";
    std::string out;
    for (std::size_t i = 0; i < literals.size(); ++i) {
      if (i) out += " AND ";
      out += "(" + literals[i].code + (literals[i].bit ? " > 0.00)" : " = 0.00)");
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& lit : literals)
      arr.push_back(nlohmann::json{{"code", lit.code}, {"bit", int(lit.bit)}});
    return arr;
  }

  static Rule from_json(const nlohmann::json& arr) {
    Rule r;
    for (const auto& j : arr) {
      Literal lit;
      lit.code = j.at("code").get<std::string>();
      const int bit = j.at("bit").get<int>();
      require(bit == 0 || bit == 1, Errc::schema_mismatch, "rule bit must be 0 or 1");
      lit.bit = static_cast<std::uint8_t>(bit);
      require(!r.mentions(lit.code), Errc::schema_mismatch,
              "rule mentions feature twice: " + lit.code);
      r.literals.push_back(std::move(lit));
    }
    return r;
  }
};

enum class PerturbMode { marginal, whole_record };

struct AnchorConfig {
  double min_precision = 0.95;
  int beam_width = 4;
  int max_literals = 8;
  int n_samples = 1000;
  PerturbMode perturb = PerturbMode::marginal;
  std::uint64_t seed = 1;

  void validate() const {
    require(min_precision >= 0.0 && min_precision <= 1.0, Errc::invalid_config,
            "min_precision must lie in [0,1]");
    require(beam_width >= 1, Errc::invalid_config, "beam_width must be >= 1");
    require(max_literals >= 1, Errc::invalid_config, "max_literals must be >= 1");
    require(n_samples >= 30, Errc::invalid_config, "n_samples must be >= 30");
  }
};

struct AnchorResult {
  Rule rule;
  double precision = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  double coverage = 0.0;
  std::string instance_id;
  bool prediction_silent = false;
  bool found = false;  // false: best attempt, bar not reached within max_literals

  nlohmann::json to_json() const {
    return nlohmann::json{{"instance_id", instance_id},
                          {"prediction", prediction_silent ? "silent" : "noisy"},
                          {"literals", rule.to_json()},
                          {"precision", precision},
                          {"samples", samples},
                          {"coverage", coverage},
                          {"found", found}};
  }
};

// Perturbation samples honoring the rule: constrained bits are pinned,
// every other bit is drawn from the background (independently per feature in
// marginal mode, from one shared record in whole_record mode).
inline std::vector<FeatureVector> sample_under_rule(const Rule& rule,
                                                    const FeatureVector& instance,
                                                    const Dataset& background, int n,
                                                    std::uint64_t seed,
                                                    PerturbMode mode = PerturbMode::marginal) {
  require(!background.records.empty(), Errc::empty_background, "background dataset is empty");
  require(rule.satisfied_by(instance, background.catalog), Errc::invalid_config,
          "instance does not satisfy the rule being sampled");
  const std::size_t width = instance.size();
  std::vector<int> pinned(width, -1);
  for (const auto& lit : rule.literals)
    pinned[background.catalog.require_index(lit.code)] = lit.bit;

  Rng rng(seed);
  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    FeatureVector fv;
    fv.bits.resize(width);
    const auto& shared = background.records[rng.below(background.records.size())].features;
    for (std::size_t i = 0; i < width; ++i) {
      if (pinned[i] >= 0) {
        fv.bits[i] = static_cast<std::uint8_t>(pinned[i]);
      } else if (mode == PerturbMode::whole_record) {
        fv.bits[i] = shared[i];
      } else {
        fv.bits[i] = background.records[rng.below(background.records.size())].features[i];
      }
    }
    out.push_back(std::move(fv));
  }
  return out;
}

struct PrecisionEstimate {
  double precision = 0.0;
  double half_width = 0.0;  // 95% normal-approximation confidence half-width
  std::size_t samples = 0;

  bool passes(double min_precision) const { return precision - half_width >= min_precision; }
};

// Fraction of rule-respecting perturbations on which the model repeats its
// prediction for the anchored instance.
template <class PredFn>
PrecisionEstimate estimate_precision(const Rule& rule, PredFn&& predict,
                                     const FeatureVector& instance, const Dataset& background,
                                     int n_samples, std::uint64_t seed,
                                     PerturbMode mode = PerturbMode::marginal) {
  require(n_samples >= 30, Errc::invalid_config, "precision estimates need >= 30 samples");
  const bool target = predict(instance);
  const auto samples = sample_under_rule(rule, instance, background, n_samples, seed, mode);
  std::size_t hits = 0;
  for (const auto& fv : samples) hits += static_cast<std::size_t>(predict(fv) == target);
  PrecisionEstimate est;
  est.samples = samples.size();
  est.precision = double(hits) / double(samples.size());
  est.half_width = 1.96 * std::sqrt(est.precision * (1.0 - est.precision) / double(est.samples));
  return est;
}

inline double coverage(const Rule& rule, const Dataset& ds) {
  require(!ds.records.empty(), Errc::insufficient_data, "coverage over an empty dataset");
  std::size_t hits = 0;
  for (const auto& r : ds.records)
    hits += static_cast<std::size_t>(rule.satisfied_by(r.features, ds.catalog));
  return double(hits) / double(ds.records.size());
}

// Beam search over the instance's own bits, one literal per step, gated by
// the lower confidence bound. Estimate seeds hang off the rule's identity, so
// search order cannot perturb any estimate.
template <class PredFn>
AnchorResult find_anchor(PredFn&& predict, const std::string& instance_id,
                         const FeatureVector& instance, const Dataset& background,
                         const AnchorConfig& cfg) {
  cfg.validate();
  require(instance.size() == background.catalog.size(), Errc::dimension_mismatch,
          "instance width does not match the background catalog");

  AnchorResult out;
  out.instance_id = instance_id;
  out.prediction_silent = predict(instance);

  const auto estimate = [&](const Rule& r) {
    return estimate_precision(r, predict, instance, background, cfg.n_samples,
                              derive_seed(cfg.seed, "rule." + r.key()), cfg.perturb);
  };
  const auto finish = [&](const Rule& r, const PrecisionEstimate& est, bool found) {
    out.rule = r;
    out.precision = est.precision;
    out.half_width = est.half_width;
    out.samples = est.samples;
    out.coverage = coverage(r, background);
    out.found = found;
    return out;
  };

  struct Scored {
    Rule rule;
    PrecisionEstimate est;
  };

  const Rule empty;
  const auto empty_est = estimate(empty);
  if (empty_est.passes(cfg.min_precision)) return finish(empty, empty_est, true);

  std::vector<Scored> beam{{empty, empty_est}};
  Scored best = beam.front();
  for (int step = 0; step < cfg.max_literals; ++step) {
    std::vector<Scored> expanded;
    std::vector<std::string> seen;
    for (const auto& parent : beam) {
      for (std::size_t i = 0; i < instance.size(); ++i) {
        const auto& code = background.catalog.at(i).code;
        if (parent.rule.mentions(code)) continue;
        Rule child = parent.rule;
        child.literals.push_back(Literal{code, instance[i]});
        const auto key = child.key();
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        auto est = estimate(child);
        expanded.push_back(Scored{std::move(child), est});
      }
    }
    if (expanded.empty()) break;

    // Passing candidates: pick the widest-coverage rule (ties: fewer
    // literals, then rule identity).
    std::vector<Scored> passing;
    for (auto& s : expanded)
      if (s.est.passes(cfg.min_precision)) passing.push_back(s);
    if (!passing.empty()) {
      const Scored* pick = nullptr;
      double pick_cov = -1.0;
      for (const auto& s : passing) {
        const double cov = coverage(s.rule, background);
        const bool better =
            pick == nullptr || cov > pick_cov ||
            (cov == pick_cov && (s.rule.literals.size() < pick->rule.literals.size() ||
                                 (s.rule.literals.size() == pick->rule.literals.size() &&
                                  s.rule.key() < pick->rule.key())));
        if (better) {
          pick = &s;
          pick_cov = cov;
        }
      }
      return finish(pick->rule, pick->est, true);
    }

    std::stable_sort(expanded.begin(), expanded.end(), [](const Scored& a, const Scored& b) {
      if (a.est.precision != b.est.precision) return a.est.precision > b.est.precision;
      return a.rule.key() < b.rule.key();
    });
    if (expanded.size() > static_cast<std::size_t>(cfg.beam_width))
      expanded.resize(static_cast<std::size_t>(cfg.beam_width));
    beam = std::move(expanded);
    if (beam.front().est.precision > best.est.precision) best = beam.front();
  }
  return finish(best.rule, best.est, false);
}

// Drops literals whose removal keeps the lower confidence bound above the
// bar; minimal under single-literal removal.
template <class PredFn>
Rule simplify_rule(const Rule& rule, PredFn&& predict, const FeatureVector& instance,
                   const Dataset& background, double min_precision, int n_samples,
                   std::uint64_t seed, PerturbMode mode = PerturbMode::marginal) {
  Rule current = rule;
  bool shrunk = true;
  while (shrunk && !current.literals.empty()) {
    shrunk = false;
    for (std::size_t i = 0; i < current.literals.size(); ++i) {
      Rule candidate = current;
      candidate.literals.erase(candidate.literals.begin() + static_cast<std::ptrdiff_t>(i));
      const auto est =
          estimate_precision(candidate, predict, instance, background, n_samples,
                             derive_seed(seed, "rule." + candidate.key()), mode);
      if (est.passes(min_precision)) {
        current = std::move(candidate);
        shrunk = true;
        break;
      }
    }
  }
  return current;
}

}  // namespace ssx
