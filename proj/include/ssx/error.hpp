#pragma once

#include <stdexcept>
#include <string>

namespace ssx {

// Error categories thrown across the toolkit. Conditions the contracts treat
// as flags rather than failures (NoFeasibleThreshold, NoAnchorFound,
// EmptySupport) are reported inside result structs instead.
enum class Errc {
  invalid_config,
  zero_variance,
  schema_mismatch,
  degenerate_dataset,
  dimension_mismatch,
  too_many_features,
  empty_background,
  insufficient_data,
  unknown_feature,
  unknown_store,
  profile_mismatch,
  io_error,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_config: return "invalid_config";
    case Errc::zero_variance: return "zero_variance";
    case Errc::schema_mismatch: return "schema_mismatch";
    case Errc::degenerate_dataset: return "degenerate_dataset";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::too_many_features: return "too_many_features";
    case Errc::empty_background: return "empty_background";
    case Errc::insufficient_data: return "insufficient_data";
    case Errc::unknown_feature: return "unknown_feature";
    case Errc::unknown_store: return "unknown_store";
    case Errc::profile_mismatch: return "profile_mismatch";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace ssx
