#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ssx/catalog.hpp"
#include "ssx/error.hpp"
#include "ssx/util.hpp"

namespace ssx {

// One static store with its profiled dynamic behaviour. The label is derived:
// a static store is silent only when every one of its dynamic stores was.
struct StoreRecord {
  std::string store_id;
  FeatureVector features;
  std::uint64_t silent_count = 0;
  std::uint64_t total_count = 0;
  bool silent_label = false;
};

struct Dataset {
  FeatureCatalog catalog;
  std::vector<StoreRecord> records;

  void validate() const {
    for (const auto& r : records) {
      require(r.features.size() == catalog.size(), Errc::dimension_mismatch,
              "record " + r.store_id + " has wrong feature width");
      require(r.silent_count <= r.total_count, Errc::schema_mismatch,
              "record " + r.store_id + " has silent_count > total_count");
      require(r.silent_label == (r.silent_count == r.total_count && r.total_count > 0),
              Errc::schema_mismatch, "record " + r.store_id + " has inconsistent label");
    }
  }
};

struct ProfileCounts {
  std::uint64_t silent = 0;
  std::uint64_t total = 0;
};

// Builds the dataset from profiled counts and extracted features. Stores that
// never executed are excluded. Records are ordered by store_id.
inline Dataset label_records(const std::map<std::string, ProfileCounts>& profiles,
                             const std::map<std::string, FeatureVector>& features,
                             const FeatureCatalog& catalog) {
  Dataset ds;
  ds.catalog = catalog;
  for (const auto& [id, counts] : profiles) {
    if (counts.total == 0) continue;
    auto it = features.find(id);
    require(it != features.end(), Errc::unknown_store, "no features for store " + id);
    require(counts.silent <= counts.total, Errc::profile_mismatch,
            "silent_count exceeds total_count for " + id);
    StoreRecord rec;
    rec.store_id = id;
    rec.features = it->second;
    rec.silent_count = counts.silent;
    rec.total_count = counts.total;
    rec.silent_label = counts.silent == counts.total;
    ds.records.push_back(std::move(rec));
  }
  ds.validate();
  return ds;
}

// CSV schema: store_id,<code_1>,...,<code_n>,silent_count,total_count,label
inline std::string dataset_to_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "store_id";
  for (const auto& f : ds.catalog.features()) out << ',' << f.code;
  out << ",silent_count,total_count,label\n";
  for (const auto& r : ds.records) {
    out << r.store_id;
    for (std::size_t i = 0; i < r.features.size(); ++i) out << ',' << int(r.features[i]);
    out << ',' << r.silent_count << ',' << r.total_count << ','
        << (r.silent_label ? "silent" : "noisy") << '\n';
  }
  return out.str();
}

inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  ds.validate();
  write_file(path, dataset_to_csv(ds));
}

inline Dataset dataset_from_csv(const std::string& text, const FeatureCatalog& catalog) {
  std::istringstream in(text);
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), Errc::schema_mismatch, "empty CSV");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::vector<std::string> want;
  want.push_back("store_id");
  for (const auto& f : catalog.features()) want.push_back(f.code);
  want.push_back("silent_count");
  want.push_back("total_count");
  want.push_back("label");
  const auto got = split(header, ',');
  if (got != want) {
    std::string msg = "CSV header mismatch;";
    for (const auto& w : want)
      if (std::find(got.begin(), got.end(), w) == got.end()) msg += " missing:" + w;
    for (const auto& g : got)
      if (std::find(want.begin(), want.end(), g) == want.end()) msg += " extra:" + g;
    fail(Errc::schema_mismatch, msg);
  }

  Dataset ds;
  ds.catalog = catalog;
  const std::size_t n = catalog.size();
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    require(cells.size() == n + 4, Errc::schema_mismatch,
            "line " + std::to_string(lineno) + ": wrong column count");
    StoreRecord rec;
    rec.store_id = cells[0];
    rec.features = FeatureVector(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = cells[1 + i];
      require(c == "0" || c == "1", Errc::schema_mismatch,
              "line " + std::to_string(lineno) + ": feature cell must be 0 or 1");
      rec.features[i] = c == "1" ? 1 : 0;
    }
    rec.silent_count = std::stoull(cells[n + 1]);
    rec.total_count = std::stoull(cells[n + 2]);
    const auto& label = cells[n + 3];
    require(label == "silent" || label == "noisy", Errc::schema_mismatch,
            "line " + std::to_string(lineno) + ": bad label " + label);
    rec.silent_label = label == "silent";
    ds.records.push_back(std::move(rec));
  }
  ds.validate();
  return ds;
}

inline Dataset load_csv(const std::filesystem::path& path, const FeatureCatalog& catalog) {
  return dataset_from_csv(read_file(path), catalog);
}

// Projects every record onto the given original-catalog indices.
inline Dataset project(const Dataset& ds, const FeatureCatalog& reduced,
                       const std::vector<std::size_t>& kept) {
  require(reduced.size() == kept.size(), Errc::dimension_mismatch,
          "reduced catalog and kept index list disagree");
  Dataset out;
  out.catalog = reduced;
  out.records.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    StoreRecord rec = r;
    rec.features = FeatureVector(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) rec.features[i] = r.features[kept[i]];
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ssx
