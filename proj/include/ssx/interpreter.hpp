#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssx/error.hpp"
#include "ssx/ir.hpp"
#include "ssx/rng.hpp"

namespace ssx {

struct StoreCounts {
  std::uint64_t silent = 0;
  std::uint64_t total = 0;
  std::uint64_t reads = 0;   // loads issued by verified stores
  std::uint64_t writes = 0;  // writes actually performed
  bool verified = false;
};

struct ProfileResult {
  std::map<std::string, StoreCounts> stores;
  std::uint64_t inputs_run = 0;
  std::uint64_t inputs_skipped = 0;  // valuations aborted by division by zero
};

using Memory = std::map<std::string, std::vector<double>>;

namespace detail {

struct DivByZero {};

inline Memory init_memory(const TinyProgram& prog, Rng& rng) {
  Memory mem;
  for (const auto& b : prog.bases) {
    std::vector<double> cells(static_cast<std::size_t>(b.size), 0.0);
    switch (b.init.kind) {
      case InitSpec::Kind::zero:
        break;
      case InitSpec::Kind::constant:
        for (auto& c : cells) c = b.init.value;
        break;
      case InitSpec::Kind::input:
        for (auto& c : cells) {
          if (rng.bernoulli(b.init.zero_rate)) {
            c = 0.0;
          } else {
            c = static_cast<double>(rng.range(1, b.init.range < 1 ? 1 : b.init.range));
          }
        }
        break;
    }
    mem.emplace(b.id, std::move(cells));
  }
  return mem;
}

using LoopEnv = std::map<std::string, long long>;

inline long long eval_index(const IndexExpr& e, const LoopEnv& env) {
  switch (e.kind) {
    case IndexExpr::Kind::constant:
      return e.value;
    case IndexExpr::Kind::induction: {
      auto it = env.find(e.var);
      require(it != env.end(), Errc::invalid_config, "unbound loop variable: " + e.var);
      return e.stride * it->second;
    }
    case IndexExpr::Kind::affine: {
      auto it = env.find(e.var);
      require(it != env.end(), Errc::invalid_config, "unbound loop variable: " + e.var);
      return e.scale * it->second + e.offset;
    }
  }
  return 0;
}

inline double read_loc(const Loc& loc, const LoopEnv& env, const Memory& mem) {
  auto it = mem.find(loc.base);
  require(it != mem.end(), Errc::unknown_store, "undeclared base: " + loc.base);
  const long long idx = eval_index(loc.index, env);
  require(idx >= 0 && idx < static_cast<long long>(it->second.size()), Errc::invalid_config,
          "index out of range on base " + loc.base);
  return it->second[static_cast<std::size_t>(idx)];
}

inline double eval_value(const ValueExpr& e, const LoopEnv& env, const Memory& mem,
                         bool integral) {
  switch (e.kind) {
    case ValueExpr::Kind::zero:
      return 0.0;
    case ValueExpr::Kind::int_const:
      return static_cast<double>(e.value);
    case ValueExpr::Kind::increment:
      return read_loc(*e.loc, env, mem) + static_cast<double>(e.value);
    case ValueExpr::Kind::load:
      return read_loc(*e.loc, env, mem);
    case ValueExpr::Kind::add:
      return eval_value(e.children[0], env, mem, integral) +
             eval_value(e.children[1], env, mem, integral);
    case ValueExpr::Kind::sub:
      return eval_value(e.children[0], env, mem, integral) -
             eval_value(e.children[1], env, mem, integral);
    case ValueExpr::Kind::div: {
      const double num = eval_value(e.children[0], env, mem, integral);
      const double den = eval_value(e.children[1], env, mem, integral);
      if (den == 0.0) throw DivByZero{};
      return integral ? std::trunc(num / den) : num / den;
    }
    case ValueExpr::Kind::product:
      return read_loc(*e.loc, env, mem) * read_loc(*e.loc2, env, mem);
  }
  return 0.0;
}

inline double coerce(double v, ValueType t) {
  switch (t) {
    case ValueType::i64:
    case ValueType::ptr:
      return std::trunc(v);
    case ValueType::boolean:
      return v != 0.0 ? 1.0 : 0.0;
    case ValueType::f32:
      return static_cast<double>(static_cast<float>(v));
    case ValueType::f64:
      return v;
  }
  return v;
}

inline void run_stmts(const std::vector<Statement>& stmts, LoopEnv& env, Memory& mem,
                      std::map<std::string, StoreCounts>* counts) {
  for (const auto& s : stmts) {
    if (s.is_store()) {
      const auto& st = s.store();
      const bool integral = st.type == ValueType::i64 || st.type == ValueType::ptr ||
                            st.type == ValueType::boolean;
      const double value = coerce(eval_value(st.value, env, mem, integral), st.type);
      auto& cells = mem.at(st.target.base);
      const long long idx = eval_index(st.target.index, env);
      require(idx >= 0 && idx < static_cast<long long>(cells.size()), Errc::invalid_config,
              "store index out of range on base " + st.target.base);
      double& cell = cells[static_cast<std::size_t>(idx)];
      const bool silent = cell == value;
      StoreCounts* c = counts ? &(*counts)[st.id] : nullptr;
      if (c) {
        c->total += 1;
        if (silent) c->silent += 1;
        c->verified = st.verified;
      }
      if (st.verified) {
        if (c) c->reads += 1;  // the verify load
        if (!silent) {
          cell = value;
          if (c) c->writes += 1;
        }
      } else {
        cell = value;
        if (c) c->writes += 1;
      }
    } else {
      const auto& lp = s.loop();
      for (long long i = 0; i < lp.trips; ++i) {
        env[lp.var] = i;
        run_stmts(lp.body, env, mem, counts);
      }
      env.erase(lp.var);
    }
  }
}

}  // namespace detail

// Interprets the program on n_inputs random input valuations and accumulates
// per-store silent/total counts. A dynamic store is silent when the value
// written equals the value already at the target location. Valuations that
// divide by zero are skipped and counted in inputs_skipped.
inline ProfileResult profile(const TinyProgram& prog, std::uint64_t input_seed, int n_inputs) {
  require(n_inputs >= 1, Errc::invalid_config, "profile: n_inputs must be >= 1");
  ProfileResult result;
  // Register every store so never-executed ones still appear with total 0.
  prog.for_each_store([&result](const StoreStmt& st, int) {
    result.stores[st.id].verified = st.verified;
  });
  for (int k = 0; k < n_inputs; ++k) {
    Rng rng(derive_seed(input_seed, static_cast<std::uint64_t>(k)));
    Memory mem = detail::init_memory(prog, rng);
    detail::LoopEnv env;
    std::map<std::string, StoreCounts> local;
    try {
      detail::run_stmts(prog.body, env, mem, &local);
    } catch (const detail::DivByZero&) {
      result.inputs_skipped += 1;
      continue;
    }
    result.inputs_run += 1;
    for (const auto& [id, c] : local) {
      auto& acc = result.stores[id];
      acc.silent += c.silent;
      acc.total += c.total;
      acc.reads += c.reads;
      acc.writes += c.writes;
      acc.verified = c.verified;
    }
  }
  return result;
}

// Final memory state after one valuation; nullopt when the valuation divides
// by zero. Used by the transformation equivalence checks.
inline std::optional<Memory> final_memory(const TinyProgram& prog, std::uint64_t input_seed) {
  Rng rng(derive_seed(input_seed, std::uint64_t{0}));
  Memory mem = detail::init_memory(prog, rng);
  detail::LoopEnv env;
  try {
    detail::run_stmts(prog.body, env, mem, nullptr);
  } catch (const detail::DivByZero&) {
    return std::nullopt;
  }
  return mem;
}

}  // namespace ssx
