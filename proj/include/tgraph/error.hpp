#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tgraph {

enum class Errc {
  validation,
  dimension_mismatch,
  out_of_range,
  excluded_granularity,
  granularity_order,
  reduction_requires_features,
  negative_offset,
  duplicate_name,
  invalid_contract,
  cyclic_recipe,
  missing_attribute,
  contract_violation,
  hook_failed,
  stream_order,
  capacity,
  exhaustion,
  schema,
  parse,
  degenerate_split,
  io,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::validation: return "validation error";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::out_of_range: return "out of range";
    case Errc::excluded_granularity: return "excluded granularity";
    case Errc::granularity_order: return "granularity order";
    case Errc::reduction_requires_features: return "reduction requires features";
    case Errc::negative_offset: return "negative offset";
    case Errc::duplicate_name: return "duplicate name";
    case Errc::invalid_contract: return "invalid contract";
    case Errc::cyclic_recipe: return "cyclic recipe";
    case Errc::missing_attribute: return "missing attribute";
    case Errc::contract_violation: return "contract violation";
    case Errc::hook_failed: return "hook failed";
    case Errc::stream_order: return "stream order";
    case Errc::capacity: return "capacity";
    case Errc::exhaustion: return "exhaustion";
    case Errc::schema: return "schema error";
    case Errc::parse: return "parse error";
    case Errc::degenerate_split: return "degenerate split";
    case Errc::io: return "io error";
  }
  return "unknown error";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the category without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tgraph
