#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ssx/error.hpp"

namespace ssx {

enum class Region { static_mem, stack, heap };
enum class PointerKind { int_ptr, struct_ptr, array_ptr, simd_ptr };
enum class ValueType { i64, f32, f64, ptr, boolean };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::static_mem: return "static";
    case Region::stack: return "stack";
    case Region::heap: return "heap";
  }
  return "?";
}

inline const char* to_string(PointerKind p) {
  switch (p) {
    case PointerKind::int_ptr: return "int";
    case PointerKind::struct_ptr: return "struct";
    case PointerKind::array_ptr: return "array";
    case PointerKind::simd_ptr: return "simd";
  }
  return "?";
}

inline const char* to_string(ValueType t) {
  switch (t) {
    case ValueType::i64: return "int";
    case ValueType::f32: return "f32";
    case ValueType::f64: return "f64";
    case ValueType::ptr: return "ptr";
    case ValueType::boolean: return "bool";
  }
  return "?";
}

// How a base's cells are initialised before each profiled input valuation.
// `input` cells are redrawn per valuation: zero with probability zero_rate,
// otherwise uniform in [1, range].
struct InitSpec {
  enum class Kind { zero, constant, input };
  Kind kind = Kind::zero;
  double value = 0.0;      // constant
  double zero_rate = 0.0;  // input
  long long range = 4;     // input
};

// Offset expression for p[i]: a constant, stride * loop_var, or a * loop_var + b.
struct IndexExpr {
  enum class Kind { constant, induction, affine };
  Kind kind = Kind::constant;
  long long value = 0;   // constant
  std::string var;       // induction / affine
  long long stride = 1;  // induction
  long long scale = 2;   // affine: scale * var + offset
  long long offset = 0;  // affine

  static IndexExpr make_const(long long v) {
    IndexExpr e;
    e.kind = Kind::constant;
    e.value = v;
    return e;
  }
  static IndexExpr make_induction(std::string var, long long stride = 1) {
    IndexExpr e;
    e.kind = Kind::induction;
    e.var = std::move(var);
    e.stride = stride;
    return e;
  }
  static IndexExpr make_affine(std::string var, long long scale, long long offset) {
    IndexExpr e;
    e.kind = Kind::affine;
    e.var = std::move(var);
    e.scale = scale;
    e.offset = offset;
    return e;
  }

  bool operator==(const IndexExpr&) const = default;
};

struct Loc {
  std::string base;
  IndexExpr index;

  bool operator==(const Loc&) const = default;
};

// Value expression tree for the stored value v.
struct ValueExpr {
  enum class Kind { zero, int_const, increment, load, add, sub, div, product };
  Kind kind = Kind::zero;
  long long value = 0;               // int_const value / increment step
  std::optional<Loc> loc;            // increment / load / product lhs
  std::optional<Loc> loc2;           // product rhs
  std::vector<ValueExpr> children;   // add / sub / div operands (exactly two)

  static ValueExpr zero() { return ValueExpr{}; }
  static ValueExpr int_const(long long v) {
    ValueExpr e;
    e.kind = Kind::int_const;
    e.value = v;
    return e;
  }
  static ValueExpr increment(Loc target, long long step) {
    ValueExpr e;
    e.kind = Kind::increment;
    e.loc = std::move(target);
    e.value = step;
    return e;
  }
  static ValueExpr load(Loc from) {
    ValueExpr e;
    e.kind = Kind::load;
    e.loc = std::move(from);
    return e;
  }
  static ValueExpr binary(Kind k, ValueExpr lhs, ValueExpr rhs) {
    ValueExpr e;
    e.kind = k;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
  }
  static ValueExpr add(ValueExpr lhs, ValueExpr rhs) {
    return binary(Kind::add, std::move(lhs), std::move(rhs));
  }
  static ValueExpr sub(ValueExpr lhs, ValueExpr rhs) {
    return binary(Kind::sub, std::move(lhs), std::move(rhs));
  }
  static ValueExpr div(ValueExpr lhs, ValueExpr rhs) {
    return binary(Kind::div, std::move(lhs), std::move(rhs));
  }
  static ValueExpr product(Loc lhs, Loc rhs) {
    ValueExpr e;
    e.kind = Kind::product;
    e.loc = std::move(lhs);
    e.loc2 = std::move(rhs);
    return e;
  }
};

struct StoreStmt {
  std::string id;
  Loc target;
  ValueExpr value;
  ValueType type = ValueType::i64;
  bool compulsory = false;
  bool in_main = true;
  bool verified = false;  // set by the store-verify transformation
};

struct Statement;

struct LoopStmt {
  std::string var;
  long long trips = 0;
  std::vector<Statement> body;
};

struct Statement {
  std::variant<StoreStmt, LoopStmt> node;

  Statement() = default;
  Statement(StoreStmt s) : node(std::move(s)) {}
  Statement(LoopStmt l) : node(std::move(l)) {}

  bool is_store() const { return std::holds_alternative<StoreStmt>(node); }
  const StoreStmt& store() const { return std::get<StoreStmt>(node); }
  StoreStmt& store() { return std::get<StoreStmt>(node); }
  const LoopStmt& loop() const { return std::get<LoopStmt>(node); }
  LoopStmt& loop() { return std::get<LoopStmt>(node); }
};

struct BaseDecl {
  std::string id;
  Region region = Region::stack;
  PointerKind pointer = PointerKind::int_ptr;
  ValueType elem = ValueType::i64;
  long long size = 1;
  InitSpec init;
};

struct TinyProgram {
  std::string name;
  std::vector<BaseDecl> bases;
  std::vector<Statement> body;

  const BaseDecl& base(const std::string& id) const {
    for (const auto& b : bases)
      if (b.id == id) return b;
    fail(Errc::unknown_store, "undeclared base: " + id);
  }

  template <class Fn>
  void for_each_store(Fn&& fn) const {
    for_each_store_in(body, 0, std::forward<Fn>(fn));
  }

  template <class Fn>
  void for_each_store_mut(Fn&& fn) {
    for_each_store_in_mut(body, std::forward<Fn>(fn));
  }

 private:
  template <class Fn>
  static void for_each_store_in(const std::vector<Statement>& stmts, int depth, Fn&& fn) {
    for (const auto& s : stmts) {
      if (s.is_store()) {
        fn(s.store(), depth);
      } else {
        for_each_store_in(s.loop().body, depth + 1, fn);
      }
    }
  }
  template <class Fn>
  static void for_each_store_in_mut(std::vector<Statement>& stmts, Fn&& fn) {
    for (auto& s : stmts) {
      if (s.is_store()) {
        fn(s.store());
      } else {
        for_each_store_in_mut(s.loop().body, fn);
      }
    }
  }
};

// ---------------------------------------------------------------------------
// JSON serialization (schema documented in docs/ir_schema.md)

namespace ir_json {

inline nlohmann::json index_to_json(const IndexExpr& e) {
  switch (e.kind) {
    case IndexExpr::Kind::constant:
      return {{"kind", "const"}, {"value", e.value}};
    case IndexExpr::Kind::induction:
      return {{"kind", "induction"}, {"var", e.var}, {"stride", e.stride}};
    case IndexExpr::Kind::affine:
      return {{"kind", "affine"}, {"var", e.var}, {"scale", e.scale}, {"offset", e.offset}};
  }
  fail(Errc::io_error, "bad index kind");
}

inline IndexExpr index_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "const") return IndexExpr::make_const(j.at("value").get<long long>());
  if (kind == "induction")
    return IndexExpr::make_induction(j.at("var").get<std::string>(), j.at("stride").get<long long>());
  if (kind == "affine")
    return IndexExpr::make_affine(j.at("var").get<std::string>(), j.at("scale").get<long long>(),
                                  j.at("offset").get<long long>());
  fail(Errc::schema_mismatch, "bad index kind: " + kind);
}

inline nlohmann::json loc_to_json(const Loc& l) {
  return {{"base", l.base}, {"index", index_to_json(l.index)}};
}

inline Loc loc_from_json(const nlohmann::json& j) {
  return Loc{j.at("base").get<std::string>(), index_from_json(j.at("index"))};
}

inline nlohmann::json value_to_json(const ValueExpr& e) {
  switch (e.kind) {
    case ValueExpr::Kind::zero:
      return {{"kind", "zero"}};
    case ValueExpr::Kind::int_const:
      return {{"kind", "int"}, {"value", e.value}};
    case ValueExpr::Kind::increment:
      return {{"kind", "inc"}, {"loc", loc_to_json(*e.loc)}, {"step", e.value}};
    case ValueExpr::Kind::load:
      return {{"kind", "load"}, {"loc", loc_to_json(*e.loc)}};
    case ValueExpr::Kind::add:
    case ValueExpr::Kind::sub:
    case ValueExpr::Kind::div: {
      const char* k = e.kind == ValueExpr::Kind::add   ? "add"
                      : e.kind == ValueExpr::Kind::sub ? "sub"
                                                       : "div";
      return {{"kind", k},
              {"lhs", value_to_json(e.children[0])},
              {"rhs", value_to_json(e.children[1])}};
    }
    case ValueExpr::Kind::product:
      return {{"kind", "prod"}, {"lhs", loc_to_json(*e.loc)}, {"rhs", loc_to_json(*e.loc2)}};
  }
  fail(Errc::io_error, "bad value kind");
}

inline ValueExpr value_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "zero") return ValueExpr::zero();
  if (kind == "int") return ValueExpr::int_const(j.at("value").get<long long>());
  if (kind == "inc")
    return ValueExpr::increment(loc_from_json(j.at("loc")), j.at("step").get<long long>());
  if (kind == "load") return ValueExpr::load(loc_from_json(j.at("loc")));
  if (kind == "add" || kind == "sub" || kind == "div") {
    auto k = kind == "add"   ? ValueExpr::Kind::add
             : kind == "sub" ? ValueExpr::Kind::sub
                             : ValueExpr::Kind::div;
    return ValueExpr::binary(k, value_from_json(j.at("lhs")), value_from_json(j.at("rhs")));
  }
  if (kind == "prod")
    return ValueExpr::product(loc_from_json(j.at("lhs")), loc_from_json(j.at("rhs")));
  fail(Errc::schema_mismatch, "bad value kind: " + kind);
}

inline nlohmann::json stmt_to_json(const Statement& s);

inline nlohmann::json stmts_to_json(const std::vector<Statement>& body) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : body) arr.push_back(stmt_to_json(s));
  return arr;
}

inline nlohmann::json stmt_to_json(const Statement& s) {
  if (s.is_store()) {
    const auto& st = s.store();
    return {{"stmt", "store"},
            {"id", st.id},
            {"target", loc_to_json(st.target)},
            {"value", value_to_json(st.value)},
            {"type", to_string(st.type)},
            {"compulsory", st.compulsory},
            {"in_main", st.in_main},
            {"verified", st.verified}};
  }
  const auto& lp = s.loop();
  return {{"stmt", "loop"}, {"var", lp.var}, {"trips", lp.trips}, {"body", stmts_to_json(lp.body)}};
}

inline Statement stmt_from_json(const nlohmann::json& j);

inline std::vector<Statement> stmts_from_json(const nlohmann::json& arr) {
  std::vector<Statement> out;
  for (const auto& item : arr) out.push_back(stmt_from_json(item));
  return out;
}

inline Statement stmt_from_json(const nlohmann::json& j) {
  const auto stmt = j.at("stmt").get<std::string>();
  if (stmt == "store") {
    StoreStmt st;
    st.id = j.at("id").get<std::string>();
    st.target = loc_from_json(j.at("target"));
    st.value = value_from_json(j.at("value"));
    const auto type = j.at("type").get<std::string>();
    if (type == "int") st.type = ValueType::i64;
    else if (type == "f32") st.type = ValueType::f32;
    else if (type == "f64") st.type = ValueType::f64;
    else if (type == "ptr") st.type = ValueType::ptr;
    else if (type == "bool") st.type = ValueType::boolean;
    else fail(Errc::schema_mismatch, "bad value type: " + type);
    st.compulsory = j.at("compulsory").get<bool>();
    st.in_main = j.at("in_main").get<bool>();
    st.verified = j.value("verified", false);
    return Statement{std::move(st)};
  }
  if (stmt == "loop") {
    LoopStmt lp;
    lp.var = j.at("var").get<std::string>();
    lp.trips = j.at("trips").get<long long>();
    lp.body = stmts_from_json(j.at("body"));
    return Statement{std::move(lp)};
  }
  fail(Errc::schema_mismatch, "bad statement kind: " + stmt);
}

}  // namespace ir_json

inline nlohmann::json program_to_json(const TinyProgram& p) {
  nlohmann::json bases = nlohmann::json::array();
  for (const auto& b : p.bases) {
    nlohmann::json init;
    switch (b.init.kind) {
      case InitSpec::Kind::zero:
        init = {{"kind", "zero"}};
        break;
      case InitSpec::Kind::constant:
        init = {{"kind", "const"}, {"value", b.init.value}};
        break;
      case InitSpec::Kind::input:
        init = {{"kind", "input"}, {"zero_rate", b.init.zero_rate}, {"range", b.init.range}};
        break;
    }
    bases.push_back({{"id", b.id},
                     {"region", to_string(b.region)},
                     {"pointer", to_string(b.pointer)},
                     {"elem", to_string(b.elem)},
                     {"size", b.size},
                     {"init", init}});
  }
  return {{"name", p.name}, {"bases", bases}, {"body", ir_json::stmts_to_json(p.body)}};
}

inline TinyProgram program_from_json(const nlohmann::json& j) {
  TinyProgram p;
  p.name = j.at("name").get<std::string>();
  for (const auto& bj : j.at("bases")) {
    BaseDecl b;
    b.id = bj.at("id").get<std::string>();
    const auto region = bj.at("region").get<std::string>();
    if (region == "static") b.region = Region::static_mem;
    else if (region == "stack") b.region = Region::stack;
    else if (region == "heap") b.region = Region::heap;
    else fail(Errc::schema_mismatch, "bad region: " + region);
    const auto ptr = bj.at("pointer").get<std::string>();
    if (ptr == "int") b.pointer = PointerKind::int_ptr;
    else if (ptr == "struct") b.pointer = PointerKind::struct_ptr;
    else if (ptr == "array") b.pointer = PointerKind::array_ptr;
    else if (ptr == "simd") b.pointer = PointerKind::simd_ptr;
    else fail(Errc::schema_mismatch, "bad pointer kind: " + ptr);
    const auto elem = bj.at("elem").get<std::string>();
    if (elem == "int") b.elem = ValueType::i64;
    else if (elem == "f32") b.elem = ValueType::f32;
    else if (elem == "f64") b.elem = ValueType::f64;
    else if (elem == "ptr") b.elem = ValueType::ptr;
    else if (elem == "bool") b.elem = ValueType::boolean;
    else fail(Errc::schema_mismatch, "bad elem type: " + elem);
    b.size = bj.at("size").get<long long>();
    const auto& ij = bj.at("init");
    const auto ik = ij.at("kind").get<std::string>();
    if (ik == "zero") {
      b.init.kind = InitSpec::Kind::zero;
    } else if (ik == "const") {
      b.init.kind = InitSpec::Kind::constant;
      b.init.value = ij.at("value").get<double>();
    } else if (ik == "input") {
      b.init.kind = InitSpec::Kind::input;
      b.init.zero_rate = ij.at("zero_rate").get<double>();
      b.init.range = ij.at("range").get<long long>();
    } else {
      fail(Errc::schema_mismatch, "bad init kind: " + ik);
    }
    p.bases.push_back(std::move(b));
  }
  p.body = ir_json::stmts_from_json(j.at("body"));
  return p;
}

inline nlohmann::json corpus_to_json(const std::vector<TinyProgram>& programs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : programs) arr.push_back(program_to_json(p));
  return arr;
}

inline std::vector<TinyProgram> corpus_from_json(const nlohmann::json& arr) {
  std::vector<TinyProgram> out;
  for (const auto& item : arr) out.push_back(program_from_json(item));
  return out;
}

}  // namespace ssx
