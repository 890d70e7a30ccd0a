#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ssx/error.hpp"

namespace ssx {

// The eight categories a static store feature can fall into.
enum class FeatureCategory {
  value_type,        // type of the stored value v
  value_size,        // bit width of v's type
  slice,             // operations appearing in the slice that produces v
  last_producer,     // last instruction that produced v
  pointer_type,      // type of the pointer p being stored through
  region,            // memory region p points into
  label,             // placement of the store instruction l
  offset,            // shape of the offset i in p[i]
};

inline const char* to_string(FeatureCategory c) {
  switch (c) {
    case FeatureCategory::value_type: return "value-type";
    case FeatureCategory::value_size: return "value-size";
    case FeatureCategory::slice: return "slice";
    case FeatureCategory::last_producer: return "last-producing-instruction";
    case FeatureCategory::pointer_type: return "pointer-type";
    case FeatureCategory::region: return "region";
    case FeatureCategory::label: return "instruction-label";
    case FeatureCategory::offset: return "offset";
  }
  return "?";
}

inline FeatureCategory category_from_string(const std::string& s) {
  static const std::unordered_map<std::string, FeatureCategory> map = {
      {"value-type", FeatureCategory::value_type},
      {"value-size", FeatureCategory::value_size},
      {"slice", FeatureCategory::slice},
      {"last-producing-instruction", FeatureCategory::last_producer},
      {"pointer-type", FeatureCategory::pointer_type},
      {"region", FeatureCategory::region},
      {"instruction-label", FeatureCategory::label},
      {"offset", FeatureCategory::offset},
  };
  auto it = map.find(s);
  require(it != map.end(), Errc::schema_mismatch, "unknown feature category: " + s);
  return it->second;
}

struct Feature {
  std::string code;
  FeatureCategory category;
  std::string description;
};

// Ordered feature set. Iteration order is stable and defines the bit position
// of each feature in every FeatureVector built against this catalog.
class FeatureCatalog {
 public:
  FeatureCatalog() = default;

  void add(Feature f) {
    require(!f.code.empty(), Errc::invalid_config, "feature code must be non-empty");
    require(index_.find(f.code) == index_.end(), Errc::invalid_config,
            "duplicate feature code: " + f.code);
    index_.emplace(f.code, features_.size());
    features_.push_back(std::move(f));
  }

  std::size_t size() const { return features_.size(); }
  const Feature& at(std::size_t i) const { return features_.at(i); }
  const std::vector<Feature>& features() const { return features_; }

  std::optional<std::size_t> index_of(const std::string& code) const {
    auto it = index_.find(code);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const std::string& code) const {
    auto idx = index_of(code);
    require(idx.has_value(), Errc::unknown_feature, "feature not in catalog: " + code);
    return *idx;
  }

  std::vector<std::string> codes() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.code);
    return out;
  }

  bool operator==(const FeatureCatalog& other) const {
    if (features_.size() != other.features_.size()) return false;
    for (std::size_t i = 0; i < features_.size(); ++i) {
      if (features_[i].code != other.features_[i].code) return false;
      if (features_[i].category != other.features_[i].category) return false;
    }
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : features_) {
      arr.push_back({{"code", f.code},
                     {"category", to_string(f.category)},
                     {"description", f.description}});
    }
    return arr;
  }

  static FeatureCatalog from_json(const nlohmann::json& arr) {
    require(arr.is_array(), Errc::schema_mismatch, "catalog JSON must be an array");
    FeatureCatalog cat;
    for (const auto& item : arr) {
      cat.add(Feature{item.at("code").get<std::string>(),
                      category_from_string(item.at("category").get<std::string>()),
                      item.value("description", std::string{})});
    }
    return cat;
  }

 private:
  std::vector<Feature> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Binary feature vector over a catalog; bits[i] pairs with catalog feature i.
struct FeatureVector {
  std::vector<std::uint8_t> bits;

  FeatureVector() = default;
  explicit FeatureVector(std::size_t n) : bits(n, 0) {}

  std::size_t size() const { return bits.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::uint8_t& operator[](std::size_t i) { return bits[i]; }
  bool operator==(const FeatureVector& other) const { return bits == other.bits; }
};

// Built-in catalog for store instructions `l: p[i] = v`.
inline FeatureCatalog default_catalog() {
  FeatureCatalog cat;
  const auto add = [&cat](const char* code, FeatureCategory c, const char* desc) {
    cat.add(Feature{code, c, desc});
  };
  add("Vfp", FeatureCategory::value_type, "v is a 32-bit floating point value");
  add("Vdb", FeatureCategory::value_type, "v is a 64-bit floating point value");
  add("Vin", FeatureCategory::value_type, "v is an integer value");
  add("Vpt", FeatureCategory::value_type, "v is a pointer value");
  add("sz1", FeatureCategory::value_size, "v's type is 1 bit wide");
  add("sz8", FeatureCategory::value_size, "v's type is 2 to 8 bits wide");
  add("ADD", FeatureCategory::slice, "an addition operation contributes to v");
  add("GEP", FeatureCategory::slice, "an element-pointer computation contributes to v");
  add("ZER", FeatureCategory::slice, "a zero constant contributes to v");
  add("INT", FeatureCategory::slice, "a nonzero integer constant contributes to v");
  add("SUB", FeatureCategory::slice, "a subtraction operation contributes to v");
  add("DIV", FeatureCategory::slice, "a division operation contributes to v");
  add("Oic", FeatureCategory::last_producer, "v was produced by an increment");
  add("Ozr", FeatureCategory::last_producer, "v was produced by an assignment of zero");
  add("Oin", FeatureCategory::last_producer, "v was produced by an integer constant update");
  add("Old", FeatureCategory::last_producer, "v was produced by a load instruction");
  add("Pin", FeatureCategory::pointer_type, "p points to an integer");
  add("Pst", FeatureCategory::pointer_type, "p points to a struct");
  add("Pay", FeatureCategory::pointer_type, "p points to an array");
  add("Pvc", FeatureCategory::pointer_type, "p points to a SIMD vector");
  add("Msc", FeatureCategory::region, "p points into static memory");
  add("Msk", FeatureCategory::region, "p points into the stack");
  add("Mhp", FeatureCategory::region, "p points into the heap");
  add("Smn", FeatureCategory::label, "l is within the main function");
  add("Sl0", FeatureCategory::label, "l is outside any loop");
  add("Sl1", FeatureCategory::label, "l is within a singly nested loop");
  add("Sl2", FeatureCategory::label, "l is within a doubly nested loop");
  add("Sl3", FeatureCategory::label, "l is within a triply nested loop");
  add("Scm", FeatureCategory::label, "l is a compulsory store instruction");
  add("Es1", FeatureCategory::offset, "i advances with a stride of 1");
  add("Es8", FeatureCategory::offset, "i advances with a stride of 8");
  add("Eaf", FeatureCategory::offset, "i is built by an affine expression");
  return cat;
}

}  // namespace ssx
