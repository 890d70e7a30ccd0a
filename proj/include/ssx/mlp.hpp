#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssx/error.hpp"
#include "ssx/rng.hpp"

namespace ssx {

struct MlpConfig {
  std::vector<int> layer_widths = {64, 32, 16, 8, 1};
  double learning_rate = 3e-4;
  int max_epochs = 3000;
  int batch_size = 20000;  // capped at the training-set size
  int early_stop_patience = 50;
  double val_frac = 0.1;    // carved from the training split for early stopping
  double pos_weight = 1.0;  // >1 leans the loss toward recall
  std::uint64_t seed = 1;

  void validate() const {
    require(!layer_widths.empty() && layer_widths.back() == 1, Errc::invalid_config,
            "layer_widths must end in a single output unit");
    for (int w : layer_widths)
      require(w >= 1, Errc::invalid_config, "layer widths must be positive");
    require(learning_rate > 0.0, Errc::invalid_config, "learning_rate must be > 0");
    require(max_epochs >= 1 && batch_size >= 1, Errc::invalid_config,
            "max_epochs and batch_size must be >= 1");
    require(early_stop_patience >= 1, Errc::invalid_config, "early_stop_patience must be >= 1");
    require(val_frac > 0.0 && val_frac < 1.0, Errc::invalid_config,
            "val_frac must lie strictly between 0 and 1");
    require(pos_weight > 0.0, Errc::invalid_config, "pos_weight must be > 0");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"layer_widths", layer_widths},
                          {"learning_rate", learning_rate},
                          {"max_epochs", max_epochs},
                          {"batch_size", batch_size},
                          {"early_stop_patience", early_stop_patience},
                          {"val_frac", val_frac},
                          {"pos_weight", pos_weight},
                          {"seed", seed}};
  }

  static MlpConfig from_json(const nlohmann::json& j) {
    MlpConfig c;
    c.layer_widths = j.value("layer_widths", c.layer_widths);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
    c.val_frac = j.value("val_frac", c.val_frac);
    c.pos_weight = j.value("pos_weight", c.pos_weight);
    c.seed = j.value("seed", c.seed);
    return c;
  }
};

// Fully connected net: rectifier hidden layers, logistic output.
struct Mlp {
  std::vector<int> widths;  // input width first, then every layer
  // weights[l] is row-major (widths[l+1] x widths[l]); biases[l] has widths[l+1].
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  std::size_t n_layers() const { return weights.size(); }
  int input_dim() const { return widths.empty() ? 0 : widths.front(); }

  double forward(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == input_dim(), Errc::dimension_mismatch,
            "input width " + std::to_string(x.size()) + " does not match model width " +
                std::to_string(input_dim()));
    std::vector<double> a = x, next;
    for (std::size_t l = 0; l < n_layers(); ++l) {
      const int in = widths[l], out = widths[l + 1];
      next.assign(static_cast<std::size_t>(out), 0.0);
      const double* w = weights[l].data();
      for (int o = 0; o < out; ++o) {
        double z = biases[l][static_cast<std::size_t>(o)];
        const double* row = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) z += row[i] * a[static_cast<std::size_t>(i)];
        next[static_cast<std::size_t>(o)] =
            l + 1 == n_layers() ? 1.0 / (1.0 + std::exp(-z)) : (z > 0.0 ? z : 0.0);
      }
      a.swap(next);
    }
    return a[0];
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"widths", widths}, {"weights", weights}, {"biases", biases}};
  }

  static Mlp from_json(const nlohmann::json& j) {
    Mlp m;
    j.at("widths").get_to(m.widths);
    j.at("weights").get_to(m.weights);
    j.at("biases").get_to(m.biases);
    require(m.widths.size() == m.weights.size() + 1 && m.weights.size() == m.biases.size(),
            Errc::schema_mismatch, "inconsistent layer counts in model file");
    return m;
  }
};

namespace detail {

// Adam state and scratch buffers for one training run.
struct MlpTrainer {
  Mlp net;
  std::vector<std::vector<double>> gw, gb;    // gradients
  std::vector<std::vector<double>> mw, vw;    // Adam first/second moments, weights
  std::vector<std::vector<double>> mb, vb;    // and biases
  std::vector<std::vector<double>> acts;      // post-activation per layer (batch-major rows)
  std::vector<std::vector<double>> deltas;    // dL/dz per layer
  long long step = 0;

  explicit MlpTrainer(int input_dim, const MlpConfig& cfg) {
    net.widths.push_back(input_dim);
    for (int w : cfg.layer_widths) net.widths.push_back(w);
    Rng rng(derive_seed(cfg.seed, "init"));
    for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
      const int in = net.widths[l], out = net.widths[l + 1];
      std::vector<double> w(static_cast<std::size_t>(in) * out);
      const double scale = std::sqrt(2.0 / double(in));
      for (auto& v : w) v = rng.normal() * scale;
      net.weights.push_back(std::move(w));
      net.biases.emplace_back(static_cast<std::size_t>(out), 0.0);
    }
    const auto zeros_like = [](const std::vector<std::vector<double>>& src) {
      std::vector<std::vector<double>> out;
      for (const auto& v : src) out.emplace_back(v.size(), 0.0);
      return out;
    };
    gw = zeros_like(net.weights);
    gb = zeros_like(net.biases);
    mw = zeros_like(net.weights);
    vw = zeros_like(net.weights);
    mb = zeros_like(net.biases);
    vb = zeros_like(net.biases);
  }

  // Forward + backward over one minibatch; accumulates mean gradients and
  // returns the mean weighted cross-entropy loss.
  double batch_pass(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                    const std::vector<std::size_t>& rows, double pos_weight) {
    const std::size_t B = rows.size();
    const std::size_t L = net.n_layers();
    acts.assign(L + 1, {});
    deltas.assign(L, {});
    acts[0].resize(B * static_cast<std::size_t>(net.widths[0]));
    for (std::size_t r = 0; r < B; ++r)
      std::copy(X[rows[r]].begin(), X[rows[r]].end(),
                acts[0].begin() + static_cast<std::ptrdiff_t>(r * net.widths[0]));

    for (std::size_t l = 0; l < L; ++l) {
      const int in = net.widths[l], out = net.widths[l + 1];
      acts[l + 1].assign(B * static_cast<std::size_t>(out), 0.0);
      const double* w = net.weights[l].data();
      for (std::size_t r = 0; r < B; ++r) {
        const double* ain = acts[l].data() + r * static_cast<std::size_t>(in);
        double* aout = acts[l + 1].data() + r * static_cast<std::size_t>(out);
        for (int o = 0; o < out; ++o) {
          double z = net.biases[l][static_cast<std::size_t>(o)];
          const double* row = w + static_cast<std::size_t>(o) * in;
          for (int i = 0; i < in; ++i) z += row[i] * ain[i];
          aout[o] = l + 1 == L ? 1.0 / (1.0 + std::exp(-z)) : (z > 0.0 ? z : 0.0);
        }
      }
    }

    // Output delta for logistic + cross-entropy, with class weighting.
    double loss = 0.0;
    deltas[L - 1].assign(B, 0.0);
    const double eps = 1e-12;
    for (std::size_t r = 0; r < B; ++r) {
      const double p = acts[L][r];
      const int label = y[rows[r]];
      if (label != 0) {
        loss += -pos_weight * std::log(p + eps);
        deltas[L - 1][r] = pos_weight * (p - 1.0) / double(B);
      } else {
        loss += -std::log(1.0 - p + eps);
        deltas[L - 1][r] = p / double(B);
      }
    }
    loss /= double(B);

    for (std::size_t l = L; l-- > 0;) {
      const int in = net.widths[l], out = net.widths[l + 1];
      auto& g_w = gw[l];
      auto& g_b = gb[l];
      std::fill(g_w.begin(), g_w.end(), 0.0);
      std::fill(g_b.begin(), g_b.end(), 0.0);
      if (l > 0) deltas[l - 1].assign(B * static_cast<std::size_t>(in), 0.0);
      const double* w = net.weights[l].data();
      for (std::size_t r = 0; r < B; ++r) {
        const double* ain = acts[l].data() + r * static_cast<std::size_t>(in);
        const double* d = deltas[l].data() + r * static_cast<std::size_t>(out);
        for (int o = 0; o < out; ++o) {
          const double dz = d[o];
          if (dz == 0.0) continue;
          g_b[static_cast<std::size_t>(o)] += dz;
          double* grow = g_w.data() + static_cast<std::size_t>(o) * in;
          for (int i = 0; i < in; ++i) grow[i] += dz * ain[i];
        }
        if (l > 0) {
          double* dprev = deltas[l - 1].data() + r * static_cast<std::size_t>(in);
          for (int o = 0; o < out; ++o) {
            const double dz = d[o];
            if (dz == 0.0) continue;
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i)
              if (ain[i] > 0.0) dprev[i] += dz * row[i];  // rectifier gate
          }
        }
      }
    }
    return loss;
  }

  void adam_update(double lr) {
    ++step;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, double(step));
    const double c2 = 1.0 - std::pow(b2, double(step));
    const auto apply = [&](std::vector<double>& p, std::vector<double>& g,
                           std::vector<double>& m, std::vector<double>& v) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
      }
    };
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
      apply(net.weights[l], gw[l], mw[l], vw[l]);
      apply(net.biases[l], gb[l], mb[l], vb[l]);
    }
  }

  double eval_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                   const std::vector<std::size_t>& rows, double pos_weight) const {
    const double eps = 1e-12;
    double loss = 0.0;
    for (std::size_t r : rows) {
      const double p = net.forward(X[r]);
      loss += y[r] != 0 ? -pos_weight * std::log(p + eps) : -std::log(1.0 - p + eps);
    }
    return loss / double(rows.size());
  }
};

}  // namespace detail

// Trains on the given rows; early stopping watches a slice carved off the end
// of the (shuffled) training rows so the caller's held-out split stays
// untouched. Returns the weights that scored best on that slice.
inline Mlp fit_mlp(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                   std::vector<std::size_t> rows, const MlpConfig& cfg) {
  cfg.validate();
  require(!X.empty() && X.size() == y.size(), Errc::dimension_mismatch,
          "features and labels differ in length");
  require(rows.size() >= 2, Errc::insufficient_data, "need at least two training rows");
  bool has_pos = false, has_neg = false;
  for (std::size_t r : rows) (y[r] != 0 ? has_pos : has_neg) = true;
  require(has_pos && has_neg, Errc::degenerate_dataset, "training split lacks a class");

  Rng shuffle_rng(derive_seed(cfg.seed, "order"));
  shuffle_rng.shuffle(rows);
  std::size_t n_val = static_cast<std::size_t>(double(rows.size()) * cfg.val_frac);
  n_val = std::clamp<std::size_t>(n_val, 1, rows.size() - 1);
  std::vector<std::size_t> val_rows(rows.end() - static_cast<std::ptrdiff_t>(n_val), rows.end());
  std::vector<std::size_t> fit_rows(rows.begin(),
                                    rows.end() - static_cast<std::ptrdiff_t>(n_val));

  detail::MlpTrainer tr(static_cast<int>(X[0].size()), cfg);
  const std::size_t batch =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), fit_rows.size());

  double best_val = std::numeric_limits<double>::infinity();
  Mlp best = tr.net;
  int stale = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(fit_rows);
    for (std::size_t off = 0; off < fit_rows.size(); off += batch) {
      const std::size_t hi = std::min(off + batch, fit_rows.size());
      std::vector<std::size_t> mb(fit_rows.begin() + static_cast<std::ptrdiff_t>(off),
                                  fit_rows.begin() + static_cast<std::ptrdiff_t>(hi));
      tr.batch_pass(X, y, mb, cfg.pos_weight);
      tr.adam_update(cfg.learning_rate);
    }
    const double val = tr.eval_loss(X, y, val_rows, cfg.pos_weight);
    if (val < best_val - 1e-9) {
      best_val = val;
      best = tr.net;
      stale = 0;
    } else if (++stale >= cfg.early_stop_patience) {
      break;
    }
  }
  return best;
}

}  // namespace ssx
