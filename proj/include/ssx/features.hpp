#pragma once

#include <map>
#include <set>
#include <string>

#include "ssx/catalog.hpp"
#include "ssx/error.hpp"
#include "ssx/ir.hpp"

namespace ssx {

namespace detail {

inline bool is_self_load(const ValueExpr& e, const Loc& target) {
  return e.kind == ValueExpr::Kind::load && e.loc && *e.loc == target;
}

// Slice codes: operations and constants visible in the expression tree, plus
// the declared initializers of loaded locations (one level of dataflow).
inline void collect_slice(const ValueExpr& e, const TinyProgram& prog, std::set<std::string>& out,
                          bool& uses_indexing) {
  const auto note_loc = [&prog, &out, &uses_indexing](const Loc& loc) {
    if (loc.index.kind != IndexExpr::Kind::constant) uses_indexing = true;
    const auto& init = prog.base(loc.base).init;
    if (init.kind == InitSpec::Kind::zero) out.insert("ZER");
    if (init.kind == InitSpec::Kind::constant) out.insert(init.value == 0.0 ? "ZER" : "INT");
  };
  switch (e.kind) {
    case ValueExpr::Kind::zero:
      out.insert("ZER");
      break;
    case ValueExpr::Kind::int_const:
      out.insert(e.value == 0 ? "ZER" : "INT");
      break;
    case ValueExpr::Kind::increment:
      out.insert("ADD");
      out.insert(e.value == 0 ? "ZER" : "INT");
      note_loc(*e.loc);
      break;
    case ValueExpr::Kind::load:
      note_loc(*e.loc);
      break;
    case ValueExpr::Kind::add:
    case ValueExpr::Kind::sub:
    case ValueExpr::Kind::div:
      out.insert(e.kind == ValueExpr::Kind::add   ? "ADD"
                 : e.kind == ValueExpr::Kind::sub ? "SUB"
                                                  : "DIV");
      for (const auto& c : e.children) collect_slice(c, prog, out, uses_indexing);
      break;
    case ValueExpr::Kind::product:
      note_loc(*e.loc);
      note_loc(*e.loc2);
      break;
  }
}

inline std::set<std::string> store_codes(const StoreStmt& st, int depth, const TinyProgram& prog) {
  std::set<std::string> codes;

  switch (st.type) {
    case ValueType::i64: codes.insert("Vin"); break;
    case ValueType::f32: codes.insert("Vfp"); break;
    case ValueType::f64: codes.insert("Vdb"); break;
    case ValueType::ptr: codes.insert("Vpt"); break;
    case ValueType::boolean: break;
  }
  codes.insert(st.type == ValueType::boolean ? "sz1" : "sz8");

  bool uses_indexing = st.target.index.kind != IndexExpr::Kind::constant;
  collect_slice(st.value, prog, codes, uses_indexing);
  if (uses_indexing) codes.insert("GEP");

  switch (st.value.kind) {
    case ValueExpr::Kind::zero:
      codes.insert("Ozr");
      break;
    case ValueExpr::Kind::int_const:
      codes.insert("Oin");
      break;
    case ValueExpr::Kind::increment:
      codes.insert("Oic");
      codes.insert("Oin");
      break;
    case ValueExpr::Kind::load:
      codes.insert("Old");
      break;
    case ValueExpr::Kind::add:
      if (is_self_load(st.value.children[0], st.target) ||
          is_self_load(st.value.children[1], st.target))
        codes.insert("Oic");
      break;
    default:
      break;
  }

  const auto& base = prog.base(st.target.base);
  switch (base.pointer) {
    case PointerKind::int_ptr: codes.insert("Pin"); break;
    case PointerKind::struct_ptr: codes.insert("Pst"); break;
    case PointerKind::array_ptr: codes.insert("Pay"); break;
    case PointerKind::simd_ptr: codes.insert("Pvc"); break;
  }
  switch (base.region) {
    case Region::static_mem: codes.insert("Msc"); break;
    case Region::stack: codes.insert("Msk"); break;
    case Region::heap: codes.insert("Mhp"); break;
  }

  if (st.in_main) codes.insert("Smn");
  require(depth >= 0 && depth <= 3, Errc::invalid_config, "loop nesting depth exceeds 3");
  codes.insert("Sl" + std::to_string(depth));
  if (st.compulsory) codes.insert("Scm");

  switch (st.target.index.kind) {
    case IndexExpr::Kind::constant:
      break;
    case IndexExpr::Kind::induction:
      if (st.target.index.stride == 1) codes.insert("Es1");
      if (st.target.index.stride == 8) codes.insert("Es8");
      break;
    case IndexExpr::Kind::affine:
      codes.insert("Eaf");
      break;
  }
  return codes;
}

// Codes this extractor can evaluate; anything else in the catalog is an error.
inline const std::set<std::string>& known_codes() {
  static const std::set<std::string> codes = [] {
    std::set<std::string> s;
    const auto cat = default_catalog();
    for (const auto& f : cat.features()) s.insert(f.code);
    return s;
  }();
  return codes;
}

}  // namespace detail

inline FeatureVector project_codes(const std::set<std::string>& codes,
                                   const FeatureCatalog& catalog) {
  FeatureVector fv(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& code = catalog.at(i).code;
    require(detail::known_codes().count(code) > 0, Errc::unknown_feature,
            "extractor cannot evaluate feature: " + code);
    fv[i] = codes.count(code) ? 1 : 0;
  }
  return fv;
}

inline std::map<std::string, FeatureVector> extract_features(const TinyProgram& prog,
                                                             const FeatureCatalog& catalog) {
  std::map<std::string, FeatureVector> out;
  prog.for_each_store([&](const StoreStmt& st, int depth) {
    out[st.id] = project_codes(detail::store_codes(st, depth, prog), catalog);
  });
  return out;
}

}  // namespace ssx
