#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "malstat/pe_parser.hpp"

namespace malstat {

/// First moment a PE compile timestamp can plausibly carry (MS-DOS era
/// begins 1981-01-01 UTC); anything earlier is treated as tampered.
constexpr std::int64_t kEarliestPlausibleTimestamp = 347155200;

struct AuditResult {
  std::map<int, std::uint64_t> histogram;  // UTC year -> file count
  std::vector<bool> tampered;              // aligned with the input reports
};

/// Per-year compile-time counts (log-scale histogram input) plus a tamper
/// flag per report: tampered iff timestamp < 1981-01-01 or > dataset_cutoff
/// (boundary inclusive: a timestamp equal to the cutoff is kept).
AuditResult compile_time_audit(std::span<const PeReport> reports, std::int64_t dataset_cutoff);

/// UTC calendar year of a unix timestamp.
int utc_year(std::int64_t timestamp);

}  // namespace malstat
