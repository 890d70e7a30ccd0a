// ssx: silent-store prediction and explanation pipeline.
//
// Subcommands: gen, train, eval, explain, combine, anchor, transform, report.
// One master seed drives everything; stage seeds are keyed hashes of
// (seed, stage name), so runs are reproducible file-for-file.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssx/anchors.hpp"
#include "ssx/classifier.hpp"
#include "ssx/correlation.hpp"
#include "ssx/cost_model.hpp"
#include "ssx/generator.hpp"
#include "ssx/shap.hpp"
#include "ssx/svg.hpp"
#include "ssx/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit 2: the command line or required inputs are unusable.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Paths {
  fs::path out = "run";

  fs::path corpus() const { return out / "corpus.json"; }
  fs::path catalog() const { return out / "catalog.json"; }
  fs::path catalog_reduced() const { return out / "catalog_reduced.json"; }
  fs::path dataset_full() const { return out / "dataset_full.csv"; }
  fs::path dataset() const { return out / "dataset.csv"; }
  fs::path gen_summary() const { return out / "gen_summary.json"; }
  fs::path model() const { return out / "model.json"; }
  fs::path model_recall() const { return out / "model_recall.json"; }
  fs::path metrics() const { return out / "metrics.json"; }
  fs::path metrics_eval() const { return out / "metrics_eval.json"; }
  fs::path explanations() const { return out / "explanations.csv"; }
  fs::path combined() const { return out / "combined.csv"; }
  fs::path anchors_json() const { return out / "anchors.json"; }
  fs::path anchors_text() const { return out / "anchors.txt"; }
  fs::path corpus_verified() const { return out / "corpus_verified.json"; }
  fs::path transform_json() const { return out / "transform_report.json"; }
  fs::path transform_csv() const { return out / "transform_report.csv"; }
  fs::path beeswarm_csv() const { return out / "beeswarm.csv"; }
  fs::path beeswarm_svg_file() const { return out / "beeswarm.svg"; }
  fs::path scatter_csv() const { return out / "scatter.csv"; }
  fs::path scatter_svg_file() const { return out / "scatter.svg"; }
  fs::path bars_csv() const { return out / "bars.csv"; }
  fs::path overhead_csv() const { return out / "overhead_curve.csv"; }
  fs::path correlation_json() const { return out / "correlation.json"; }
};

struct RunConfig {
  std::uint64_t seed = 1;
  Paths paths;
  ssx::GenConfig gen;
  int profile_inputs = 200;
  double reduce_threshold = 0.95;
  std::string model_kind = "mlp";  // or "forest"
  ssx::MlpConfig mlp;
  ssx::ForestConfig forest;
  double train_frac = 0.8;
  std::string tune_mode = "precision_over_recall";
  ssx::ShapConfig shap;
  double prune_threshold = 0.2;
  std::size_t min_support = 120;
  ssx::AnchorConfig anchor;
  int anchor_count = 10;
  ssx::NvmCosts costs;
  std::vector<std::string> transform_rules = {"Ozr", "ZER"};
  bool transform_use_model = false;
  double transform_threshold = -1.0;  // <0: the trained model's tuned threshold

  static RunConfig from_json(const json& j) {
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.paths.out = j.value("out", c.paths.out.string());
    if (j.contains("gen")) c.gen = ssx::GenConfig::from_json(j.at("gen"));
    c.profile_inputs = j.value("profile_inputs", c.profile_inputs);
    c.reduce_threshold = j.value("reduce_threshold", c.reduce_threshold);
    c.model_kind = j.value("model_kind", c.model_kind);
    if (j.contains("mlp")) c.mlp = ssx::MlpConfig::from_json(j.at("mlp"));
    if (j.contains("forest")) c.forest = ssx::ForestConfig::from_json(j.at("forest"));
    c.train_frac = j.value("train_frac", c.train_frac);
    c.tune_mode = j.value("tune_mode", c.tune_mode);
    if (j.contains("shap")) {
      const auto& s = j.at("shap");
      const std::string method = s.value("method", std::string("sampled"));
      if (method == "exact")
        c.shap.method = ssx::ShapMethod::exact;
      else if (method == "sampled")
        c.shap.method = ssx::ShapMethod::sampled;
      else
        throw UsageError("shap.method must be 'exact' or 'sampled'");
      c.shap.exact_limit = s.value("exact_limit", c.shap.exact_limit);
      c.shap.n_imputation_draws = s.value("n_imputation_draws", c.shap.n_imputation_draws);
      c.shap.n_permutations = s.value("n_permutations", c.shap.n_permutations);
      c.shap.background_subsample = s.value("background_subsample", c.shap.background_subsample);
    }
    c.prune_threshold = j.value("prune_threshold", c.prune_threshold);
    c.min_support = j.value("min_support", c.min_support);
    if (j.contains("anchor")) {
      const auto& a = j.at("anchor");
      c.anchor.min_precision = a.value("min_precision", c.anchor.min_precision);
      c.anchor.beam_width = a.value("beam_width", c.anchor.beam_width);
      c.anchor.max_literals = a.value("max_literals", c.anchor.max_literals);
      c.anchor.n_samples = a.value("n_samples", c.anchor.n_samples);
      c.anchor_count = a.value("count", c.anchor_count);
    }
    if (j.contains("costs")) c.costs = ssx::NvmCosts::from_json(j.at("costs"));
    if (j.contains("transform")) {
      const auto& t = j.at("transform");
      c.transform_rules = t.value("rules", c.transform_rules);
      c.transform_use_model = t.value("use_model", c.transform_use_model);
      c.transform_threshold = t.value("threshold", c.transform_threshold);
    }
    return c;
  }
};

std::string need_file(const fs::path& p, const std::string& producer) {
  if (!fs::exists(p))
    throw UsageError("missing " + p.string() + " (run `ssx " + producer + "` first)");
  return ssx::read_file(p);
}

ssx::FeatureCatalog load_catalog(const fs::path& p, const std::string& producer) {
  return ssx::FeatureCatalog::from_json(json::parse(need_file(p, producer)));
}

// ---- gen ----

void cmd_gen(const RunConfig& cfg) {
  const auto catalog = ssx::default_catalog();
  const auto corpus = ssx::generate_corpus(ssx::derive_seed(cfg.seed, "gen"), cfg.gen);
  const auto full = ssx::assemble_dataset(corpus, catalog,
                                          ssx::derive_seed(cfg.seed, "profile"),
                                          cfg.profile_inputs);
  const auto red = ssx::pearson_reduce(full, cfg.reduce_threshold);
  const auto ds = ssx::project(full, red.catalog, red.kept);

  ssx::write_file(cfg.paths.corpus(), ssx::corpus_to_json(corpus).dump(1) + "\n");
  ssx::write_file(cfg.paths.catalog(), catalog.to_json().dump(1) + "\n");
  ssx::write_file(cfg.paths.catalog_reduced(), red.catalog.to_json().dump(1) + "\n");
  ssx::save_csv(full, cfg.paths.dataset_full());
  ssx::save_csv(ds, cfg.paths.dataset());

  std::size_t silent = 0;
  for (const auto& r : ds.records) silent += r.silent_label ? 1 : 0;
  const double frac = ds.records.empty() ? 0.0 : double(silent) / double(ds.records.size());
  json summary{{"programs", corpus.size()},
               {"records", ds.records.size()},
               {"silent_records", silent},
               {"silent_fraction", frac},
               {"features_full", catalog.size()},
               {"features_reduced", red.catalog.size()}};
  ssx::write_file(cfg.paths.gen_summary(), summary.dump(2) + "\n");
  std::printf("generated %zu programs, %zu records; silent %zu (%.3f); features %zu -> %zu\n",
              corpus.size(), ds.records.size(), silent, frac, catalog.size(),
              red.catalog.size());
}

// ---- train / eval ----

json metrics_json(const ssx::Metrics& m) {
  return json{{"tp", m.tp},
              {"fp", m.fp},
              {"tn", m.tn},
              {"fn", m.fn},
              {"precision", m.precision},
              {"precision_defined", m.precision_defined},
              {"recall", m.recall},
              {"recall_defined", m.recall_defined}};
}

ssx::Dataset load_working_dataset(const RunConfig& cfg) {
  const auto catalog = load_catalog(cfg.paths.catalog_reduced(), "gen");
  return ssx::dataset_from_csv(need_file(cfg.paths.dataset(), "gen"), catalog);
}

void cmd_train(const RunConfig& cfg) {
  const auto ds = load_working_dataset(cfg);
  const ssx::SplitConfig split{cfg.train_frac, ssx::derive_seed(cfg.seed, "split")};
  ssx::TrainOutcome outcome;
  if (cfg.model_kind == "mlp") {
    ssx::MlpConfig mc = cfg.mlp;
    mc.seed = ssx::derive_seed(cfg.seed, "train");
    outcome = ssx::train_mlp(ds, mc, split);
  } else if (cfg.model_kind == "forest") {
    ssx::ForestConfig fc = cfg.forest;
    fc.seed = ssx::derive_seed(cfg.seed, "train");
    outcome = ssx::train_forest(ds, fc, split);
  } else {
    throw UsageError("model kind must be 'mlp' or 'forest', got '" + cfg.model_kind + "'");
  }

  ssx::TuneMode mode;
  if (cfg.tune_mode == "precision_over_recall")
    mode = ssx::TuneMode::precision_over_recall;
  else if (cfg.tune_mode == "recall_over_precision")
    mode = ssx::TuneMode::recall_over_precision;
  else
    throw UsageError("tune mode must be precision_over_recall or recall_over_precision");

  ssx::Dataset held;
  held.catalog = ds.catalog;
  for (std::size_t i : outcome.split.test) held.records.push_back(ds.records[i]);
  const auto tuned = ssx::tune_threshold(outcome.model, held, mode);
  if (tuned.feasible) outcome.model.threshold = tuned.threshold;

  outcome.model.save(cfg.paths.model().string());
  json out{{"kind", cfg.model_kind},
           {"tune_mode", cfg.tune_mode},
           {"held_out_at_default", metrics_json(outcome.held_out)},
           {"tuned",
            {{"threshold", tuned.threshold},
             {"feasible", tuned.feasible},
             {"metrics", metrics_json(tuned.metrics)}}}};
  ssx::write_file(cfg.paths.metrics(), out.dump(2) + "\n");
  std::printf("%s trained: held-out P=%.3f R=%.3f; tuned thr=%.4f (%s) P=%.3f R=%.3f\n",
              cfg.model_kind.c_str(), outcome.held_out.precision, outcome.held_out.recall,
              tuned.threshold, tuned.feasible ? "feasible" : "infeasible",
              tuned.metrics.precision, tuned.metrics.recall);
}

void cmd_eval(const RunConfig& cfg) {
  const auto ds = load_working_dataset(cfg);
  const auto model = ssx::Classifier::from_json(json::parse(need_file(cfg.paths.model(), "train")));
  const auto m = ssx::evaluate(model, ds);
  const json out = metrics_json(m);
  ssx::write_file(cfg.paths.metrics_eval(), out.dump(2) + "\n");
  std::printf("%s\n", out.dump(2).c_str());
}

// ---- explain / combine ----

void cmd_explain(const RunConfig& cfg) {
  const auto ds = load_working_dataset(cfg);
  const auto model = ssx::Classifier::from_json(json::parse(need_file(cfg.paths.model(), "train")));
  ssx::ShapConfig sc = cfg.shap;
  sc.seed = ssx::derive_seed(cfg.seed, "explain");
  if (sc.method == ssx::ShapMethod::exact &&
      ds.catalog.size() > static_cast<std::size_t>(sc.exact_limit))
    throw UsageError("exact explanations handle at most " + std::to_string(sc.exact_limit) +
                     " features; this dataset has " + std::to_string(ds.catalog.size()) +
                     " (use sampled)");
  const auto explanations = ssx::explain_dataset(
      [&model](const std::vector<double>& x) { return model.predict_proba(x); }, ds, sc);
  ssx::write_file(cfg.paths.explanations(), ssx::explanations_to_csv(ds.catalog, explanations));
  std::printf("explained %zu instances (%s)\n", explanations.size(),
              sc.method == ssx::ShapMethod::exact ? "exact" : "sampled");
}

void cmd_combine(const RunConfig& cfg) {
  const auto ds = load_working_dataset(cfg);
  const auto explanations =
      ssx::explanations_from_csv(ds.catalog, need_file(cfg.paths.explanations(), "explain"));
  const auto records =
      ssx::enumerate_combined(ds, explanations, cfg.prune_threshold, cfg.min_support);
  ssx::write_file(cfg.paths.combined(), ssx::combined_to_csv(records));
  std::printf("combined vectors: %zu (prune > %s, support >= %zu)\n", records.size(),
              ssx::fmt_double(cfg.prune_threshold).c_str(), cfg.min_support);
}

// ---- anchor ----

void cmd_anchor(const RunConfig& cfg) {
  const auto ds = load_working_dataset(cfg);
  const auto model = ssx::Classifier::from_json(json::parse(need_file(cfg.paths.model(), "train")));
  const auto predict = [&model](const ssx::FeatureVector& fv) { return model.predict(fv); };

  // Most confidently silent-predicted instances first; deterministic.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    ranked.emplace_back(-model.predict_proba(ds.records[i].features), i);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t count =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.anchor_count), ranked.size());

  ssx::AnchorConfig ac = cfg.anchor;
  json arr = json::array();
  std::string text;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& rec = ds.records[ranked[k].second];
    ac.seed = ssx::derive_seed(cfg.seed, "anchor." + rec.store_id);
    auto res = ssx::find_anchor(predict, rec.store_id, rec.features, ds, ac);
    if (res.found) {
      auto slim = ssx::simplify_rule(res.rule, predict, rec.features, ds, ac.min_precision,
                                     ac.n_samples, ac.seed, ac.perturb);
      if (slim.literals.size() < res.rule.literals.size()) {
        res.rule = slim;
        const auto est = ssx::estimate_precision(res.rule, predict, rec.features, ds,
                                                 ac.n_samples,
                                                 ssx::derive_seed(ac.seed, "rule." + slim.key()),
                                                 ac.perturb);
        res.precision = est.precision;
        res.half_width = est.half_width;
        res.samples = est.samples;
        res.coverage = ssx::coverage(res.rule, ds);
      }
    }
    arr.push_back(res.to_json());
    text += rec.store_id + ": " + res.rule.text() +
            (res.found ? "" : "  [below precision bar]") + "\n";
  }
  ssx::write_file(cfg.paths.anchors_json(), arr.dump(2) + "\n");
  ssx::write_file(cfg.paths.anchors_text(), text);
  std::printf("anchored %zu instances (min precision %s)\n", count,
              ssx::fmt_double(cfg.anchor.min_precision).c_str());
}

// ---- transform ----

void cmd_transform(const RunConfig& cfg) {
  const auto catalog = load_catalog(cfg.paths.catalog(), "gen");
  const auto corpus = ssx::corpus_from_json(json::parse(need_file(cfg.paths.corpus(), "gen")));

  // By-model selection works on the reduced catalog the model was fit on;
  // rule selection reads the full catalog.
  ssx::Classifier model;
  ssx::FeatureCatalog select_catalog = catalog;
  ssx::SelectionPolicy policy;
  std::vector<ssx::Rule> rules;
  if (cfg.transform_use_model) {
    model = ssx::Classifier::from_json(json::parse(need_file(cfg.paths.model(), "train")));
    select_catalog = load_catalog(cfg.paths.catalog_reduced(), "gen");
    const double thr = cfg.transform_threshold >= 0.0 ? cfg.transform_threshold : model.threshold;
    policy = ssx::SelectionPolicy::by_model(model, thr);
  } else {
    for (const auto& code : cfg.transform_rules)
      rules.push_back(ssx::Rule{{ssx::Literal{code, 1}}});
    policy = ssx::SelectionPolicy::by_rules(rules);
  }

  std::vector<ssx::TinyProgram> rewritten;
  ssx::TransformReport total;
  for (const auto& prog : corpus) {
    const auto selection = ssx::select_stores(prog, select_catalog, policy);
    rewritten.push_back(ssx::apply_store_verify(prog, selection));
  }
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    const auto seed = ssx::derive_seed(ssx::derive_seed(cfg.seed, "profile"), corpus[p].name);
    const auto before = ssx::profile(corpus[p], seed, cfg.profile_inputs);
    const auto after = ssx::profile(rewritten[p], seed, cfg.profile_inputs);
    const auto rep = ssx::account_costs(before, after, cfg.costs);
    total.baseline_cost += rep.baseline_cost;
    total.transformed_cost += rep.transformed_cost;
    total.eliminated_writes += rep.eliminated_writes;
    total.added_reads += rep.added_reads;
    for (const auto& id : rep.selected_store_ids) total.selected_store_ids.push_back(id);
  }
  std::sort(total.selected_store_ids.begin(), total.selected_store_ids.end());
  ssx::write_file(cfg.paths.corpus_verified(), ssx::corpus_to_json(rewritten).dump(1) + "\n");
  ssx::write_file(cfg.paths.transform_json(), total.to_json().dump(2) + "\n");
  ssx::write_file(cfg.paths.transform_csv(), total.to_csv());
  std::printf("selected %zu stores; cost %s -> %s; eliminated %llu writes\n",
              total.selected_store_ids.size(), ssx::fmt_double(total.baseline_cost).c_str(),
              ssx::fmt_double(total.transformed_cost).c_str(),
              static_cast<unsigned long long>(total.eliminated_writes));
}

// ---- report ----

void cmd_report(const RunConfig& cfg) {
  const auto ds = load_working_dataset(cfg);
  const auto explanations =
      ssx::explanations_from_csv(ds.catalog, need_file(cfg.paths.explanations(), "explain"));

  const auto feats = ssx::beeswarm_data(ds, explanations, 10);
  std::string bee = "feature,rank,mean_abs_shap,mean_set_shap,instance_id,shap,bit\n";
  for (const auto& f : feats)
    for (std::size_t i = 0; i < f.values.size(); ++i)
      bee += f.code + "," + std::to_string(f.rank) + "," + ssx::fmt_double(f.mean_abs_shap) +
             "," + ssx::fmt_double(f.mean_set_shap) + "," + explanations[i].instance_id + "," +
             ssx::fmt_double(f.values[i]) + "," + std::to_string(int(f.bits[i])) + "\n";
  ssx::write_file(cfg.paths.beeswarm_csv(), bee);
  ssx::write_file(cfg.paths.beeswarm_svg_file(), ssx::beeswarm_svg(feats));

  std::string bars = "feature,rank,mean_abs_shap,mean_set_shap,n_set\n";
  for (const auto& f : feats)
    bars += f.code + "," + std::to_string(f.rank) + "," + ssx::fmt_double(f.mean_abs_shap) +
            "," + ssx::fmt_double(f.mean_set_shap) + "," + std::to_string(f.n_set) + "\n";
  ssx::write_file(cfg.paths.bars_csv(), bars);

  auto combined = ssx::combined_from_csv(need_file(cfg.paths.combined(), "combine"));
  std::vector<ssx::CombinedShapRecord> kept;
  for (auto& r : combined)
    if (r.support >= cfg.min_support) kept.push_back(std::move(r));
  const auto rep = ssx::correlation_report(kept);
  std::string scatter = "codes;combined_shap;silent_ratio;log10_support\n";
  for (const auto& row : rep.rows)
    scatter += row.codes + ";" + ssx::fmt_double(row.combined_shap) + ";" +
               ssx::fmt_double(row.silent_ratio) + ";" + ssx::fmt_double(row.log10_support) +
               "\n";
  ssx::write_file(cfg.paths.scatter_csv(), scatter);
  ssx::write_file(cfg.paths.scatter_svg_file(), ssx::scatter_svg(rep.rows));
  json corr{{"records", rep.rows.size()},
            {"spearman", rep.spearman ? json(*rep.spearman) : json()},
            {"pearson", rep.pearson ? json(*rep.pearson) : json()}};
  ssx::write_file(cfg.paths.correlation_json(), corr.dump(2) + "\n");

  std::string curve = "p,total_overhead,fp_overhead,fn_overhead\n";
  for (int i = 0; i <= 20; ++i) {
    const double p = double(i) / 20.0;
    const ssx::MistakeProfile mp{100.0, p};
    curve += ssx::fmt_double(p) + "," + ssx::fmt_double(ssx::total_overhead(mp, cfg.costs)) +
             "," + ssx::fmt_double(ssx::fp_overhead(mp, cfg.costs)) + "," +
             ssx::fmt_double(ssx::fn_overhead(mp, cfg.costs)) + "\n";
  }
  ssx::write_file(cfg.paths.overhead_csv(), curve);

  std::printf("report written: beeswarm, scatter (spearman %s), bars, overhead curve\n",
              rep.spearman ? ssx::fmt_double(*rep.spearman).c_str() : "undefined");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"silent-store prediction and explanation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, out_set = false;
  int threads = 1;
  app.add_option("--config", config_path, "JSON run configuration")->expected(1);
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; }, "master seed")
      ->expected(1);
  app.add_option_function<std::string>(
         "--out", [&](std::string d) { out_dir = std::move(d); out_set = true; },
         "output directory")
      ->expected(1);
  app.add_option("--threads", threads, "worker threads (advisory)")->expected(1);

  auto* c_gen = app.add_subcommand("gen", "generate corpus and labeled dataset");
  double nullifier_rate = -1.0, induction_rate = -1.0, zero_input_rate = -1.0;
  int n_programs = -1, profile_inputs = -1;
  c_gen->add_option("--nullifier-rate", nullifier_rate, "zero-constant store share");
  c_gen->add_option("--induction-rate", induction_rate, "increment store share");
  c_gen->add_option("--zero-input-rate", zero_input_rate, "P(input cell = 0)");
  c_gen->add_option("--programs", n_programs, "number of programs");
  c_gen->add_option("--inputs", profile_inputs, "profiling input valuations per program");

  auto* c_train = app.add_subcommand("train", "fit a model and tune its threshold");
  std::string arch, tune_mode, kind;
  double pos_weight = -1.0;
  c_train->add_option("--arch", arch, "comma-separated layer widths, e.g. 64,32,16,8,1");
  c_train->add_option("--mode", tune_mode,
                      "precision_over_recall or recall_over_precision");
  c_train->add_option("--kind", kind, "mlp or forest");
  c_train->add_option("--pos-weight", pos_weight, "loss weight of the silent class");

  auto* c_eval = app.add_subcommand("eval", "evaluate the stored model");

  auto* c_explain = app.add_subcommand("explain", "per-instance attributions");
  std::string method;
  int n_perm = -1, n_draws = -1;
  c_explain->add_option("--method", method, "exact or sampled");
  c_explain->add_option("--permutations", n_perm, "sampled-mode permutations");
  c_explain->add_option("--draws", n_draws, "exact-mode imputation draws (0 = full sweep)");

  auto* c_combine = app.add_subcommand("combine", "combined attributions over code triples");
  double prune = -1.0;
  long long min_support = -1;
  c_combine->add_option("--prune", prune, "extend triples with combined value above this");
  c_combine->add_option("--min-support", min_support, "drop vectors with fewer instances");

  auto* c_anchor = app.add_subcommand("anchor", "high-precision rules for top predictions");
  double min_precision = -1.0;
  int anchor_count = -1, anchor_samples = -1;
  c_anchor->add_option("--min-precision", min_precision, "precision bar");
  c_anchor->add_option("--count", anchor_count, "instances to anchor");
  c_anchor->add_option("--samples", anchor_samples, "perturbation samples per estimate");

  auto* c_transform = app.add_subcommand("transform", "rewrite selected stores to store-verify");
  std::string rules_csv;
  bool use_model = false;
  double tthr = -1.0, c_read = -1.0, c_store = -1.0;
  c_transform->add_option("--rules", rules_csv, "comma-separated codes selected when set");
  c_transform->add_flag("--use-model", use_model, "select by model probability instead");
  c_transform->add_option("--threshold", tthr, "selection threshold (default: tuned)");
  c_transform->add_option("--c-read", c_read, "NVM read cost");
  c_transform->add_option("--c-store", c_store, "NVM store cost");

  auto* c_report = app.add_subcommand("report", "figures + CSV data from artifacts");
  long long report_support = -1;
  c_report->add_option("--min-support", report_support, "scatter support filter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw UsageError("config file not found: " + config_path);
      cfg = RunConfig::from_json(json::parse(ssx::read_file(config_path)));
    }
    if (seed_set) cfg.seed = seed;
    if (out_set) cfg.paths.out = out_dir;
    (void)threads;  // single-threaded build; accepted for interface stability

    if (c_gen->parsed()) {
      if (nullifier_rate >= 0.0) cfg.gen.nullifier_rate = nullifier_rate;
      if (induction_rate >= 0.0) cfg.gen.induction_rate = induction_rate;
      if (zero_input_rate >= 0.0) cfg.gen.zero_input_rate = zero_input_rate;
      if (n_programs >= 0) cfg.gen.n_programs = n_programs;
      if (profile_inputs >= 0) cfg.profile_inputs = profile_inputs;
      cmd_gen(cfg);
    } else if (c_train->parsed()) {
      if (!arch.empty()) {
        cfg.mlp.layer_widths.clear();
        for (const auto& part : ssx::split(arch, ','))
          cfg.mlp.layer_widths.push_back(std::stoi(part));
      }
      if (!tune_mode.empty()) cfg.tune_mode = tune_mode;
      if (!kind.empty()) cfg.model_kind = kind;
      if (pos_weight > 0.0) cfg.mlp.pos_weight = pos_weight;
      cmd_train(cfg);
    } else if (c_eval->parsed()) {
      cmd_eval(cfg);
    } else if (c_explain->parsed()) {
      if (!method.empty()) {
        if (method == "exact")
          cfg.shap.method = ssx::ShapMethod::exact;
        else if (method == "sampled")
          cfg.shap.method = ssx::ShapMethod::sampled;
        else
          throw UsageError("--method must be exact or sampled");
      }
      if (n_perm >= 1) cfg.shap.n_permutations = n_perm;
      if (n_draws >= 0) cfg.shap.n_imputation_draws = n_draws;
      cmd_explain(cfg);
    } else if (c_combine->parsed()) {
      if (prune >= 0.0) cfg.prune_threshold = prune;
      if (min_support >= 0) cfg.min_support = static_cast<std::size_t>(min_support);
      cmd_combine(cfg);
    } else if (c_anchor->parsed()) {
      if (min_precision >= 0.0) cfg.anchor.min_precision = min_precision;
      if (anchor_count >= 1) cfg.anchor_count = anchor_count;
      if (anchor_samples >= 30) cfg.anchor.n_samples = anchor_samples;
      cmd_anchor(cfg);
    } else if (c_transform->parsed()) {
      if (!rules_csv.empty()) cfg.transform_rules = ssx::split(rules_csv, ',');
      if (use_model) cfg.transform_use_model = true;
      if (tthr >= 0.0) cfg.transform_threshold = tthr;
      if (c_read > 0.0) cfg.costs.c_read = c_read;
      if (c_store > 0.0) cfg.costs.c_store = c_store;
      cmd_transform(cfg);
    } else if (c_report->parsed()) {
      if (report_support >= 0) cfg.min_support = static_cast<std::size_t>(report_support);
      cmd_report(cfg);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const ssx::Error& e) {
    std::cerr << json{{"error", ssx::errc_name(e.code())}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}
