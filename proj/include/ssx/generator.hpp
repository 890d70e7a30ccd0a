#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssx/dataset.hpp"
#include "ssx/error.hpp"
#include "ssx/features.hpp"
#include "ssx/interpreter.hpp"
#include "ssx/ir.hpp"
#include "ssx/rng.hpp"

namespace ssx {

struct GenConfig {
  int n_programs = 200;
  double nullifier_rate = 0.20;    // share of stores writing a zero constant
  double induction_rate = 0.05;    // share of stores incrementing by a constant
  double zero_input_rate = 0.30;   // P(cell == 0) for input-initialized bases
  std::vector<double> loop_depth_dist = {0.35, 0.40, 0.20, 0.05};  // depths 0..3

  void validate() const {
    require(n_programs >= 1, Errc::invalid_config, "n_programs must be >= 1");
    const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(unit(nullifier_rate) && unit(induction_rate) && unit(zero_input_rate),
            Errc::invalid_config, "rates must lie in [0,1]");
    require(nullifier_rate + induction_rate <= 1.0 + 1e-12, Errc::invalid_config,
            "nullifier_rate + induction_rate must not exceed 1");
    require(loop_depth_dist.size() == 4, Errc::invalid_config,
            "loop_depth_dist needs one weight per depth 0..3");
    double sum = 0.0;
    for (double w : loop_depth_dist) {
      require(w >= 0.0, Errc::invalid_config, "loop_depth_dist weights must be >= 0");
      sum += w;
    }
    require(sum > 0.0, Errc::invalid_config, "loop_depth_dist must have positive mass");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"n_programs", n_programs},
                          {"nullifier_rate", nullifier_rate},
                          {"induction_rate", induction_rate},
                          {"zero_input_rate", zero_input_rate},
                          {"loop_depth_dist", loop_depth_dist}};
  }

  static GenConfig from_json(const nlohmann::json& j) {
    GenConfig c;
    c.n_programs = j.value("n_programs", c.n_programs);
    c.nullifier_rate = j.value("nullifier_rate", c.nullifier_rate);
    c.induction_rate = j.value("induction_rate", c.induction_rate);
    c.zero_input_rate = j.value("zero_input_rate", c.zero_input_rate);
    c.loop_depth_dist = j.value("loop_depth_dist", c.loop_depth_dist);
    return c;
  }
};

namespace detail {

// Per-program builder state shared by the store patterns below.
struct ProgBuilder {
  TinyProgram prog;
  const GenConfig& cfg;
  Rng& rng;
  bool in_main = false;
  int n_bases = 0;
  int n_stores = 0;
  int n_vars = 0;

  std::string base_id() { return "g" + std::to_string(n_bases++); }
  std::string store_id() {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "s%02d", n_stores++);
    return prog.name + "_" + buf;
  }
  std::string var_id() { return "i" + std::to_string(n_vars++); }

  std::string add_base(Region region, PointerKind pointer, ValueType elem, long long size,
                       InitSpec init) {
    BaseDecl b;
    b.id = base_id();
    b.region = region;
    b.pointer = pointer;
    b.elem = elem;
    b.size = size;
    b.init = init;
    prog.bases.push_back(std::move(b));
    return prog.bases.back().id;
  }

  Region pick_region(double w_static, double w_stack, double w_heap) {
    const double u = rng.real() * (w_static + w_stack + w_heap);
    if (u < w_static) return Region::static_mem;
    if (u < w_static + w_stack) return Region::stack;
    return Region::heap;
  }

  PointerKind pick_pointer(bool array_like, bool floaty = false) {
    const double u = rng.real();
    if (floaty && u < 0.30) return PointerKind::simd_ptr;
    if (array_like) {
      if (u < 0.65) return PointerKind::array_ptr;
      if (u < 0.85) return PointerKind::int_ptr;
      return PointerKind::struct_ptr;
    }
    return u < 0.55 ? PointerKind::int_ptr : PointerKind::struct_ptr;
  }

  bool compulsory(int depth) { return rng.bernoulli(depth == 0 ? 0.8 : 0.1); }

  // Depth of a store that may live at any nesting level.
  int any_depth() {
    double total = 0.0;
    for (double w : cfg.loop_depth_dist) total += w;
    double u = rng.real() * total;
    for (int d = 0; d < 4; ++d) {
      if (u < cfg.loop_depth_dist[d]) return d;
      u -= cfg.loop_depth_dist[d];
    }
    return 0;
  }

  // Depth for sweep patterns whose own loop already contributes one level.
  int loop_depth() {
    double total = 0.0;
    for (int d = 1; d < 4; ++d) total += cfg.loop_depth_dist[d];
    if (total <= 0.0) return 1;
    double u = rng.real() * total;
    for (int d = 1; d < 4; ++d) {
      if (u < cfg.loop_depth_dist[d]) return d;
      u -= cfg.loop_depth_dist[d];
    }
    return 1;
  }

  // Wraps stmt in `levels` counting loops with small trip counts.
  void emit_nested(Statement stmt, int levels) {
    for (int k = 0; k < levels; ++k) {
      LoopStmt outer;
      outer.var = var_id();
      outer.trips = rng.range(2, 3);
      outer.body.push_back(std::move(stmt));
      stmt = Statement(std::move(outer));
    }
    prog.body.push_back(std::move(stmt));
  }

  StoreStmt make_store(std::string base, IndexExpr index, ValueExpr value, ValueType type,
                       int depth) {
    StoreStmt st;
    st.id = store_id();
    st.target = Loc{std::move(base), std::move(index)};
    st.value = std::move(value);
    st.type = type;
    st.compulsory = compulsory(depth);
    st.in_main = in_main;
    return st;
  }
};

inline InitSpec input_init(double zero_rate, long long range = 9) {
  InitSpec s;
  s.kind = InitSpec::Kind::input;
  s.zero_rate = zero_rate;
  s.range = range;
  return s;
}

inline InitSpec zero_init() { return InitSpec{InitSpec::Kind::zero, 0.0, 0.0, 0}; }

inline InitSpec const_init(double v) { return InitSpec{InitSpec::Kind::constant, v, 0.0, 0}; }

// Zero-constant store. Whether the write lands on a still-zeroed scalar or
// clobbers live data depends on where the scalar lives and how deep the
// store sits: static zeroing is first-touch initialization, heap zeroing is
// plausible at top level but rarely survives a loop, and stack scratch is
// only occasionally still in its cleared state.
inline void pat_nullifier(ProgBuilder& b) {
  const int depth = b.any_depth();
  const Region region = b.pick_region(0.33, 0.25, 0.42);
  const double rate = region == Region::static_mem ? 1.0
                      : region == Region::heap     ? (depth == 0 ? 0.25 : 0.10)
                                                   : 0.12;
  const bool silent = b.rng.bernoulli(rate);
  const bool boolean = silent && b.rng.bernoulli(0.12);
  const InitSpec init = silent ? zero_init() : const_init(double(b.rng.range(1, 9)));
  const ValueType type = boolean ? ValueType::boolean : ValueType::i64;
  const auto base = b.add_base(region, b.pick_pointer(false), type, 1, init);
  auto st = b.make_store(base, IndexExpr::make_const(0), ValueExpr::zero(), type, depth);
  if (depth == 0) {
    b.prog.body.emplace_back(std::move(st));
  } else {
    LoopStmt lp;
    lp.var = b.var_id();
    lp.trips = b.rng.range(2, 4);
    lp.body.emplace_back(std::move(st));
    b.emit_nested(Statement(std::move(lp)), depth - 1);
  }
}

// acc = acc + c inside a loop; never silent for c != 0.
inline void pat_induction(ProgBuilder& b) {
  const int depth = b.loop_depth();
  const long long step = b.rng.range(1, 5);
  const bool sweep = b.rng.bernoulli(0.5);
  const long long trips = b.rng.range(4, 16);
  const Region region = b.pick_region(0.30, 0.35, 0.35);
  LoopStmt lp;
  lp.var = b.var_id();
  lp.trips = trips;
  const InitSpec start = const_init(double(b.rng.range(1, 9)));
  if (sweep) {
    const auto base = b.add_base(region, b.pick_pointer(true), ValueType::i64, trips, start);
    auto st = b.make_store(base, IndexExpr::make_induction(lp.var, 1),
                           ValueExpr::increment(Loc{base, IndexExpr::make_induction(lp.var, 1)},
                                                step),
                           ValueType::i64, depth);
    lp.body.emplace_back(std::move(st));
  } else {
    const auto base = b.add_base(region, b.pick_pointer(false), ValueType::i64, 1, start);
    auto st = b.make_store(base, IndexExpr::make_const(0),
                           ValueExpr::increment(Loc{base, IndexExpr::make_const(0)}, step),
                           ValueType::i64, depth);
    lp.body.emplace_back(std::move(st));
  }
  b.emit_nested(Statement(std::move(lp)), depth - 1);
}

// Target index for sweep loops: unit stride, stride 8, or affine.
inline IndexExpr sweep_index(ProgBuilder& b, const std::string& var, long long trips,
                             long long& size_out) {
  const double u = b.rng.real();
  if (u < 0.60) {
    size_out = trips;
    return IndexExpr::make_induction(var, 1);
  }
  if (u < 0.80) {
    size_out = 8 * (trips - 1) + 1;
    return IndexExpr::make_induction(var, 8);
  }
  size_out = 2 * (trips - 1) + 2;
  return IndexExpr::make_affine(var, 2, 1);
}

// dst[i] = src[i] with input-initialized src: dynamically silent exactly
// where the drawn inputs happen to be zero, so the label stays noisy.
inline void pat_copy(ProgBuilder& b, ValueType type) {
  const int depth = b.loop_depth();
  const long long trips = b.rng.range(4, 16);
  const double zr = b.cfg.zero_input_rate;
  const bool floaty = type == ValueType::f32 || type == ValueType::f64;
  LoopStmt lp;
  lp.var = b.var_id();
  lp.trips = trips;
  long long dst_size = trips;
  auto index = sweep_index(b, lp.var, trips, dst_size);
  const auto src = b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(true, floaty),
                              type, trips, input_init(zr));
  const auto dst = b.add_base(b.pick_region(0.45, 0.28, 0.27), b.pick_pointer(true, floaty),
                              type, dst_size, zero_init());
  auto st = b.make_store(dst, std::move(index),
                         ValueExpr::load(Loc{src, IndexExpr::make_induction(lp.var, 1)}), type,
                         depth);
  lp.body.emplace_back(std::move(st));
  b.emit_nested(Statement(std::move(lp)), depth - 1);
}

// d = z where z is zeroed and never written: the loaded slice carries the
// zero initializer even though the store itself is a load.
inline void pat_zero_copy(ProgBuilder& b) {
  const int depth = b.any_depth();
  const Region region = b.pick_region(0.35, 0.25, 0.40);
  const double rate = region == Region::static_mem ? (depth == 0 ? 0.50 : 0.30)
                      : region == Region::heap     ? (depth == 0 ? 0.22 : 0.10)
                                                   : 0.0;
  const bool silent = b.rng.bernoulli(rate);
  const auto src =
      b.add_base(Region::static_mem, b.pick_pointer(false), ValueType::i64, 1, zero_init());
  const auto dst =
      b.add_base(region, b.pick_pointer(false), ValueType::i64, 1,
                 silent ? zero_init() : const_init(double(b.rng.range(1, 9))));
  auto st = b.make_store(dst, IndexExpr::make_const(0),
                         ValueExpr::load(Loc{src, IndexExpr::make_const(0)}), ValueType::i64,
                         depth);
  if (depth == 0) {
    b.prog.body.emplace_back(std::move(st));
  } else {
    LoopStmt lp;
    lp.var = b.var_id();
    lp.trips = b.rng.range(2, 4);
    lp.body.emplace_back(std::move(st));
    b.emit_nested(Statement(std::move(lp)), depth - 1);
  }
}

// d[i] = z over a sweep, with z a zeroed scalar that is never written:
// a memset-style refill. Whether it lands silent depends on whether the
// array still holds its cleared image or has been repopulated since.
inline void pat_fill(ProgBuilder& b) {
  const int depth = b.loop_depth();
  const long long trips = b.rng.range(4, 16);
  const Region region = b.pick_region(0.40, 0.25, 0.35);
  const double rate = region == Region::static_mem ? 0.40
                      : region == Region::heap     ? 0.33
                                                   : 0.40;
  const bool silent = b.rng.bernoulli(rate);
  LoopStmt lp;
  lp.var = b.var_id();
  lp.trips = trips;
  long long dst_size = trips;
  auto index = sweep_index(b, lp.var, trips, dst_size);
  const auto z =
      b.add_base(Region::static_mem, b.pick_pointer(false), ValueType::i64, 1, zero_init());
  const auto dst = b.add_base(region, b.pick_pointer(true), ValueType::i64, dst_size,
                              silent ? zero_init() : input_init(0.0));
  auto st = b.make_store(dst, std::move(index),
                         ValueExpr::load(Loc{z, IndexExpr::make_const(0)}), ValueType::i64,
                         depth);
  lp.body.emplace_back(std::move(st));
  b.emit_nested(Statement(std::move(lp)), depth - 1);
}

// d = z * v where z is a zeroed scale factor that is never written: the
// store provably writes zero, but through a multiply rather than a zero
// literal. Mirrors the nullifier shape bit-for-bit except for the producer.
inline void pat_zmul(ProgBuilder& b) {
  const int depth = b.any_depth();
  const Region region = b.pick_region(0.35, 0.25, 0.40);
  const double rate = region == Region::static_mem ? (depth == 0 ? 0.40 : 0.20)
                      : region == Region::heap     ? (depth == 0 ? 0.15 : 0.08)
                                                   : 0.0;
  const bool silent = b.rng.bernoulli(rate);
  const InitSpec init = silent ? zero_init() : const_init(double(b.rng.range(1, 9)));
  const auto z =
      b.add_base(Region::static_mem, b.pick_pointer(false), ValueType::i64, 1, zero_init());
  const auto v = b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(false),
                            ValueType::i64, 1, input_init(b.cfg.zero_input_rate));
  const auto dst = b.add_base(region, b.pick_pointer(false), ValueType::i64, 1, init);
  auto st = b.make_store(dst, IndexExpr::make_const(0),
                         ValueExpr::product(Loc{z, IndexExpr::make_const(0)},
                                            Loc{v, IndexExpr::make_const(0)}),
                         ValueType::i64, depth);
  if (depth == 0) {
    b.prog.body.emplace_back(std::move(st));
  } else {
    LoopStmt lp;
    lp.var = b.var_id();
    lp.trips = b.rng.range(2, 4);
    lp.body.emplace_back(std::move(st));
    b.emit_nested(Statement(std::move(lp)), depth - 1);
  }
}

// acc = v[i] * w[i] (or acc = acc * v[i]): silentness rides on the input
// data, not on anything the static features can see.
inline void pat_product(ProgBuilder& b) {
  const int depth = b.loop_depth();
  const bool swept = b.rng.bernoulli(0.55);
  const long long trips = swept ? b.rng.range(4, 16) : b.rng.range(2, 6);
  const bool self = b.rng.bernoulli(0.35);
  const double zr = b.cfg.zero_input_rate;
  LoopStmt lp;
  lp.var = b.var_id();
  lp.trips = trips;
  if (b.rng.bernoulli(0.12)) {
    // acc = acc * one where one is pinned to 1: rescaling by a unit factor
    // rewrites the accumulator with its own value.
    const auto one =
        b.add_base(Region::static_mem, b.pick_pointer(false), ValueType::i64, 1, const_init(1));
    const auto acc = b.add_base(b.pick_region(0.38, 0.30, 0.32), b.pick_pointer(false),
                                ValueType::i64, 1, input_init(0.0));
    auto st = b.make_store(acc, IndexExpr::make_const(0),
                           ValueExpr::product(Loc{acc, IndexExpr::make_const(0)},
                                              Loc{one, IndexExpr::make_const(0)}),
                           ValueType::i64, depth);
    lp.body.emplace_back(std::move(st));
    b.emit_nested(Statement(std::move(lp)), depth - 1);
    return;
  }
  const auto v = swept ? b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(true),
                                    ValueType::i64, trips, input_init(zr))
                       : b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(false),
                                    ValueType::i64, 1, input_init(zr));
  const IndexExpr vi = swept ? IndexExpr::make_induction(lp.var, 1) : IndexExpr::make_const(0);
  if (self) {
    const auto acc = b.add_base(b.pick_region(0.45, 0.28, 0.27), b.pick_pointer(false),
                                ValueType::i64, 1, const_init(double(b.rng.range(1, 9))));
    auto st = b.make_store(acc, IndexExpr::make_const(0),
                           ValueExpr::product(Loc{acc, IndexExpr::make_const(0)}, Loc{v, vi}),
                           ValueType::i64, depth);
    lp.body.emplace_back(std::move(st));
  } else {
    const auto w = swept ? b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(true),
                                      ValueType::i64, trips, input_init(zr))
                         : b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(false),
                                      ValueType::i64, 1, input_init(zr));
    const auto acc = b.add_base(b.pick_region(0.45, 0.28, 0.27), b.pick_pointer(false),
                                ValueType::i64, 1, zero_init());
    auto st = b.make_store(acc, IndexExpr::make_const(0),
                           ValueExpr::product(Loc{v, vi}, Loc{w, vi}), ValueType::i64, depth);
    lp.body.emplace_back(std::move(st));
  }
  b.emit_nested(Statement(std::move(lp)), depth - 1);
}

enum class ArithKind { add_pair, acc_add, sub_pair, div_pair, idle_add };

inline void pat_arith(ProgBuilder& b, ArithKind kind) {
  const int depth = b.loop_depth();
  const long long trips = b.rng.range(4, 16);
  LoopStmt lp;
  lp.var = b.var_id();
  lp.trips = trips;
  const IndexExpr li = IndexExpr::make_induction(lp.var, 1);
  const auto src = [&](double zr) {
    return b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(true), ValueType::i64,
                      trips, input_init(zr));
  };
  switch (kind) {
    case ArithKind::acc_add: {
      // Accumulate either a swept slice or a plain scalar counter.
      const bool swept = b.rng.bernoulli(0.5);
      const auto v = swept ? src(b.cfg.zero_input_rate)
                           : b.add_base(b.pick_region(0.34, 0.33, 0.33), b.pick_pointer(false),
                                        ValueType::i64, 1,
                                        input_init(b.cfg.zero_input_rate));
      const auto acc = b.add_base(b.pick_region(0.45, 0.28, 0.27), b.pick_pointer(false),
                                  ValueType::i64, 1, input_init(0.0));
      const Loc acc_loc{acc, IndexExpr::make_const(0)};
      const Loc v_loc{v, swept ? li : IndexExpr::make_const(0)};
      auto st = b.make_store(acc, IndexExpr::make_const(0),
                             ValueExpr::binary(ValueExpr::Kind::add, ValueExpr::load(acc_loc),
                                               ValueExpr::load(v_loc)),
                             ValueType::i64, depth);
      lp.body.emplace_back(std::move(st));
      break;
    }
    case ArithKind::idle_add: {
      // x = x + 0: a redundant update that rewrites whatever the cell holds,
      // either on a scalar or across a swept array.
      if (b.rng.bernoulli(0.5)) {
        const auto acc = b.add_base(b.pick_region(0.38, 0.30, 0.32), b.pick_pointer(false),
                                    ValueType::i64, 1, input_init(0.0));
        const Loc acc_loc{acc, IndexExpr::make_const(0)};
        auto st = b.make_store(acc, IndexExpr::make_const(0), ValueExpr::increment(acc_loc, 0),
                               ValueType::i64, depth);
        lp.body.emplace_back(std::move(st));
      } else {
        long long dst_size = trips;
        auto index = sweep_index(b, lp.var, trips, dst_size);
        const auto dst = b.add_base(b.pick_region(0.38, 0.30, 0.32), b.pick_pointer(true),
                                    ValueType::i64, dst_size, input_init(0.0));
        Loc cell{dst, index};
        auto st = b.make_store(dst, std::move(index), ValueExpr::increment(std::move(cell), 0),
                               ValueType::i64, depth);
        lp.body.emplace_back(std::move(st));
      }
      break;
    }
    case ArithKind::add_pair:
    case ArithKind::div_pair: {
      const auto a = src(b.cfg.zero_input_rate);
      const auto c2 = src(0.0);
      long long dst_size = trips;
      auto index = sweep_index(b, lp.var, trips, dst_size);
      const auto dst = b.add_base(b.pick_region(0.52, 0.24, 0.24), b.pick_pointer(true),
                                  ValueType::i64, dst_size, zero_init());
      auto st = b.make_store(
          dst, std::move(index),
          ValueExpr::binary(kind == ArithKind::add_pair ? ValueExpr::Kind::add
                                                        : ValueExpr::Kind::div,
                            ValueExpr::load(Loc{a, li}), ValueExpr::load(Loc{c2, li})),
          ValueType::i64, depth);
      lp.body.emplace_back(std::move(st));
      break;
    }
    case ArithKind::sub_pair: {
      const auto a = src(b.cfg.zero_input_rate);
      const auto c2 = src(b.cfg.zero_input_rate);
      long long dst_size = trips;
      auto index = sweep_index(b, lp.var, trips, dst_size);
      const auto dst = b.add_base(b.pick_region(0.52, 0.24, 0.24), b.pick_pointer(true),
                                  ValueType::i64, dst_size, zero_init());
      auto st = b.make_store(dst, std::move(index),
                             ValueExpr::binary(ValueExpr::Kind::sub, ValueExpr::load(Loc{a, li}),
                                               ValueExpr::load(Loc{c2, li})),
                             ValueType::i64, depth);
      lp.body.emplace_back(std::move(st));
      break;
    }
  }
  b.emit_nested(Statement(std::move(lp)), depth - 1);
}

// x = c for nonzero c. Against a zeroed location the first write always
// lands; against a cell that already holds c (a flag re-set to its resting
// value) the store never changes anything.
inline void pat_const_store(ProgBuilder& b) {
  const long long c = b.rng.range(1, 9);
  const Region region = b.pick_region(0.40, 0.30, 0.30);
  const double rate = region == Region::static_mem ? 0.15
                      : region == Region::heap     ? 0.08
                                                   : 0.04;
  const bool silent = b.rng.bernoulli(rate);
  const auto base = b.add_base(region, b.pick_pointer(false), ValueType::i64, 1,
                               silent ? const_init(double(c)) : zero_init());
  const int depth = b.any_depth();
  auto st = b.make_store(base, IndexExpr::make_const(0), ValueExpr::int_const(c),
                         ValueType::i64, depth);
  if (depth == 0) {
    b.prog.body.emplace_back(std::move(st));
  } else {
    LoopStmt lp;
    lp.var = b.var_id();
    lp.trips = b.rng.range(2, 4);
    lp.body.emplace_back(std::move(st));
    b.emit_nested(Statement(std::move(lp)), depth - 1);
  }
}

inline void pat_bool_store(ProgBuilder& b) {
  const bool zero = b.rng.bernoulli(0.5);
  const Region region =
      zero ? b.pick_region(0.60, 0.0, 0.40) : b.pick_region(0.34, 0.33, 0.33);
  const auto base = b.add_base(region, b.pick_pointer(false), ValueType::boolean, 1,
                               zero_init());
  auto st = b.make_store(base, IndexExpr::make_const(0),
                         zero ? ValueExpr::zero() : ValueExpr::int_const(1),
                         ValueType::boolean, 0);
  b.prog.body.emplace_back(std::move(st));
}

inline void pat_ptr_store(ProgBuilder& b) {
  if (b.rng.bernoulli(0.35)) {
    // Stale pointers being nulled live on stack/heap, like noisy nullifiers.
    const bool fresh = b.rng.bernoulli(0.5);
    const auto base =
        b.add_base(fresh ? b.pick_region(0.60, 0.0, 0.40) : b.pick_region(0.0, 0.5, 0.5),
                   b.pick_pointer(false), ValueType::ptr, 1,
                   fresh ? zero_init() : const_init(double(b.rng.range(1, 9))));
    auto st = b.make_store(base, IndexExpr::make_const(0), ValueExpr::zero(), ValueType::ptr, 0);
    b.prog.body.emplace_back(std::move(st));
  } else {
    pat_copy(b, ValueType::ptr);
  }
}

inline void pat_typed(ProgBuilder& b) {
  const double u = b.rng.real();
  if (u < 0.50) {
    pat_copy(b, b.rng.bernoulli(0.5) ? ValueType::f32 : ValueType::f64);
  } else if (u < 0.75) {
    pat_bool_store(b);
  } else {
    pat_ptr_store(b);
  }
}

inline void emit_pattern(ProgBuilder& b) {
  const double u = b.rng.real();
  if (u < b.cfg.nullifier_rate) {
    pat_nullifier(b);
    return;
  }
  if (u < b.cfg.nullifier_rate + b.cfg.induction_rate) {
    pat_induction(b);
    return;
  }
  // Remaining mass: sweeps, fills, products, arithmetic, constants, typed.
  const double v = b.rng.real();
  if (v < 0.085) {
    pat_copy(b, ValueType::i64);
  } else if (v < 0.141) {
    pat_zero_copy(b);
  } else if (v < 0.197) {
    pat_zmul(b);
  } else if (v < 0.310) {
    pat_product(b);
  } else if (v < 0.620) {
    const double w = b.rng.real();
    pat_arith(b, w < 0.20   ? ArithKind::add_pair
                 : w < 0.60 ? ArithKind::acc_add
                 : w < 0.76 ? ArithKind::sub_pair
                 : w < 0.92 ? ArithKind::div_pair
                            : ArithKind::idle_add);
  } else if (v < 0.761) {
    pat_fill(b);
  } else if (v < 0.873) {
    pat_const_store(b);
  } else {
    pat_typed(b);
  }
}

}  // namespace detail

inline TinyProgram generate_program(std::uint64_t seed, const GenConfig& cfg,
                                    const std::string& name) {
  Rng rng(seed);
  detail::ProgBuilder b{TinyProgram{}, cfg, rng};
  b.prog.name = name;
  b.in_main = rng.bernoulli(0.5);
  const int n_stores = int(rng.range(6, 14));
  for (int s = 0; s < n_stores; ++s) detail::emit_pattern(b);
  return std::move(b.prog);
}

inline std::vector<TinyProgram> generate_corpus(std::uint64_t seed, const GenConfig& cfg) {
  cfg.validate();
  std::vector<TinyProgram> corpus;
  corpus.reserve(static_cast<std::size_t>(cfg.n_programs));
  for (int p = 0; p < cfg.n_programs; ++p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%04d", p);
    corpus.push_back(generate_program(derive_seed(seed, buf), cfg, buf));
  }
  return corpus;
}

// Profiles every program, extracts static features, and assembles the labeled
// dataset ordered by store_id.
inline Dataset assemble_dataset(const std::vector<TinyProgram>& corpus,
                                const FeatureCatalog& catalog, std::uint64_t profile_seed,
                                int n_inputs) {
  std::map<std::string, ProfileCounts> counts;
  std::map<std::string, FeatureVector> features;
  for (const auto& prog : corpus) {
    const auto result = profile(prog, derive_seed(profile_seed, prog.name), n_inputs);
    for (const auto& [id, c] : result.stores) {
      require(!counts.count(id), Errc::invalid_config, "duplicate store id across corpus: " + id);
      counts[id] = ProfileCounts{c.silent, c.total};
    }
    for (auto& [id, fv] : extract_features(prog, catalog)) features[id] = std::move(fv);
  }
  return label_records(counts, features, catalog);
}

}  // namespace ssx
