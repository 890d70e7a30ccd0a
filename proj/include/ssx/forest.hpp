#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssx/error.hpp"
#include "ssx/rng.hpp"

namespace ssx {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 5;
  int mtry = 0;  // features tried per split; 0 means round(sqrt(dim))
  std::uint64_t seed = 1;

  void validate() const {
    require(n_trees >= 1, Errc::invalid_config, "n_trees must be >= 1");
    require(max_depth >= 1, Errc::invalid_config, "max_depth must be >= 1");
    require(min_leaf >= 1, Errc::invalid_config, "min_leaf must be >= 1");
    require(mtry >= 0, Errc::invalid_config, "mtry must be >= 0");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"n_trees", n_trees},
                          {"max_depth", max_depth},
                          {"min_leaf", min_leaf},
                          {"mtry", mtry},
                          {"seed", seed}};
  }

  static ForestConfig from_json(const nlohmann::json& j) {
    ForestConfig c;
    c.n_trees = j.value("n_trees", c.n_trees);
    c.max_depth = j.value("max_depth", c.max_depth);
    c.min_leaf = j.value("min_leaf", c.min_leaf);
    c.mtry = j.value("mtry", c.mtry);
    c.seed = j.value("seed", c.seed);
    return c;
  }
};

struct TreeNode {
  int feature = -1;         // -1 marks a leaf
  double threshold = 0.5;   // go left when x[feature] <= threshold
  int left = -1, right = -1;
  int vote = 0;             // leaf class: 1 silent, 0 noisy
};

struct Tree {
  std::vector<TreeNode> nodes;

  int vote(const std::vector<double>& x) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(at)];
      at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].vote;
  }
};

struct Forest {
  int input_dim = 0;
  std::vector<Tree> trees;

  // Fraction of trees voting silent.
  double forward(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == input_dim, Errc::dimension_mismatch,
            "input width " + std::to_string(x.size()) + " does not match model width " +
                std::to_string(input_dim));
    std::size_t silent = 0;
    for (const auto& t : trees) silent += static_cast<std::size_t>(t.vote(x));
    return double(silent) / double(trees.size());
  }

  nlohmann::json to_json() const {
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& t : trees) {
      nlohmann::json jn = nlohmann::json::array();
      for (const auto& n : t.nodes)
        jn.push_back(nlohmann::json{{"feature", n.feature},
                                    {"threshold", n.threshold},
                                    {"left", n.left},
                                    {"right", n.right},
                                    {"vote", n.vote}});
      jt.push_back(std::move(jn));
    }
    return nlohmann::json{{"input_dim", input_dim}, {"trees", std::move(jt)}};
  }

  static Forest from_json(const nlohmann::json& j) {
    Forest f;
    f.input_dim = j.at("input_dim").get<int>();
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode n;
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        n.vote = jn.at("vote").get<int>();
        t.nodes.push_back(n);
      }
      require(!t.nodes.empty(), Errc::schema_mismatch, "empty tree in model file");
      f.trees.push_back(std::move(t));
    }
    require(!f.trees.empty(), Errc::schema_mismatch, "forest has no trees");
    return f;
  }
};

namespace detail {

struct TreeBuilder {
  const std::vector<std::vector<double>>& X;
  const std::vector<int>& y;
  const ForestConfig& cfg;
  Rng& rng;
  Tree tree;

  static double gini(std::size_t pos, std::size_t n) {
    if (n == 0) return 0.0;
    const double p = double(pos) / double(n);
    return 2.0 * p * (1.0 - p);
  }

  int make_leaf(const std::vector<std::size_t>& rows) {
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += static_cast<std::size_t>(y[r] != 0);
    TreeNode n;
    n.vote = 2 * pos > rows.size() ? 1 : 0;  // majority; ties fall to noisy
    tree.nodes.push_back(n);
    return static_cast<int>(tree.nodes.size() - 1);
  }

  int build(const std::vector<std::size_t>& rows, int depth) {
    std::size_t pos = 0;
    for (std::size_t r : rows) pos += static_cast<std::size_t>(y[r] != 0);
    if (depth >= cfg.max_depth || pos == 0 || pos == rows.size() ||
        rows.size() < 2 * static_cast<std::size_t>(cfg.min_leaf))
      return make_leaf(rows);

    const int d = static_cast<int>(X[0].size());
    const int mtry =
        cfg.mtry > 0 ? std::min(cfg.mtry, d)
                     : std::max(1, std::min(d, static_cast<int>(std::round(std::sqrt(double(d))))));
    std::vector<int> feats(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) feats[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < mtry; ++i) {  // partial Fisher-Yates, first mtry entries
      const std::size_t j = i + rng.below(static_cast<std::uint64_t>(d - i));
      std::swap(feats[static_cast<std::size_t>(i)], feats[j]);
    }
    std::sort(feats.begin(), feats.begin() + mtry);  // deterministic tie-break order

    const double parent = gini(pos, rows.size());
    // Zero-gain splits are allowed (ties break toward the lowest feature
    // index) so parity-style labelings can still be carved out.
    double best_gain = -1.0;
    int best_feat = -1;
    for (int k = 0; k < mtry; ++k) {
      const int f = feats[static_cast<std::size_t>(k)];
      std::size_t ln = 0, lp = 0;
      for (std::size_t r : rows) {
        if (X[r][static_cast<std::size_t>(f)] <= 0.5) {
          ++ln;
          lp += static_cast<std::size_t>(y[r] != 0);
        }
      }
      const std::size_t rn = rows.size() - ln, rp = pos - lp;
      if (ln < static_cast<std::size_t>(cfg.min_leaf) ||
          rn < static_cast<std::size_t>(cfg.min_leaf))
        continue;
      const double gain = parent - (double(ln) * gini(lp, ln) + double(rn) * gini(rp, rn)) /
                                       double(rows.size());
      if (gain > best_gain) {
        best_gain = gain;
        best_feat = f;
      }
    }
    if (best_feat < 0) return make_leaf(rows);

    std::vector<std::size_t> lrows, rrows;
    for (std::size_t r : rows)
      (X[r][static_cast<std::size_t>(best_feat)] <= 0.5 ? lrows : rrows).push_back(r);
    TreeNode n;
    n.feature = best_feat;
    tree.nodes.push_back(n);
    const int at = static_cast<int>(tree.nodes.size() - 1);
    const int left = build(lrows, depth + 1);
    const int right = build(rrows, depth + 1);
    tree.nodes[static_cast<std::size_t>(at)].left = left;
    tree.nodes[static_cast<std::size_t>(at)].right = right;
    return at;
  }
};

}  // namespace detail

// Bootstrap-sampled trees with random feature subsets at each split; per-tree
// seeds come off the master seed so tree order cannot change the model.
inline Forest fit_forest(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                         const std::vector<std::size_t>& rows, const ForestConfig& cfg) {
  cfg.validate();
  require(!X.empty() && X.size() == y.size(), Errc::dimension_mismatch,
          "features and labels differ in length");
  require(rows.size() >= 2, Errc::insufficient_data, "need at least two training rows");
  bool has_pos = false, has_neg = false;
  for (std::size_t r : rows) (y[r] != 0 ? has_pos : has_neg) = true;
  require(has_pos && has_neg, Errc::degenerate_dataset, "training split lacks a class");

  Forest forest;
  forest.input_dim = static_cast<int>(X[0].size());
  forest.trees.resize(static_cast<std::size_t>(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, "tree." + std::to_string(t)));
    std::vector<std::size_t> sample(rows.size());
    for (auto& s : sample) s = rows[rng.below(rows.size())];
    detail::TreeBuilder builder{X, y, cfg, rng, {}};
    builder.build(sample, 0);
    forest.trees[static_cast<std::size_t>(t)] = std::move(builder.tree);
  }
  return forest;
}

}  // namespace ssx
