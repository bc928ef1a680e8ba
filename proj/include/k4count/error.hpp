#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace k4c {

enum class Errc {
  index_out_of_range,
  duplicate_edge,
  edge_on_non_pattern_pair,
  syntax_error,
  anchor_not_adjacent,
  empty_subset,
  empty_side,
  side_too_large_for_exact,
  subset_too_small,
  parameter_order_violation,
  invalid_parameter,
  pattern_mismatch,
  edge_absent,
  missing_pattern_edge,
  too_few_vertices,
  domain_error,
  m_too_large,
  m_out_of_range,
  rejection_exhausted,
  retries_exhausted,
  q_too_large,
  config_error,
  io_error,
};

inline std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::edge_on_non_pattern_pair: return "EdgeOnNonPatternPair";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::anchor_not_adjacent: return "AnchorNotAdjacent";
    case Errc::empty_subset: return "EmptySubset";
    case Errc::empty_side: return "EmptySide";
    case Errc::side_too_large_for_exact: return "SideTooLargeForExact";
    case Errc::subset_too_small: return "SubsetTooSmall";
    case Errc::parameter_order_violation: return "ParameterOrderViolation";
    case Errc::invalid_parameter: return "InvalidParameter";
    case Errc::pattern_mismatch: return "PatternMismatch";
    case Errc::edge_absent: return "EdgeAbsent";
    case Errc::missing_pattern_edge: return "MissingPatternEdge";
    case Errc::too_few_vertices: return "TooFewVertices";
    case Errc::domain_error: return "DomainError";
    case Errc::m_too_large: return "MTooLarge";
    case Errc::m_out_of_range: return "MOutOfRange";
    case Errc::rejection_exhausted: return "RejectionExhausted";
    case Errc::retries_exhausted: return "RetriesExhausted";
    case Errc::q_too_large: return "QTooLarge";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class; the
/// message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace k4c
