#include "malstat/pe_audit.hpp"

#include <ctime>

namespace malstat {

int utc_year(std::int64_t timestamp) {
  std::time_t tt = static_cast<std::time_t>(timestamp);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return tm.tm_year + 1900;
}

AuditResult compile_time_audit(std::span<const PeReport> reports, std::int64_t dataset_cutoff) {
  AuditResult out;
  out.tampered.reserve(reports.size());
  for (const PeReport& r : reports) {
    std::int64_t ts = r.compile_timestamp;
    out.histogram[utc_year(ts)]++;
    out.tampered.push_back(ts < kEarliestPlausibleTimestamp || ts > dataset_cutoff);
  }
  return out;
}

}  // namespace malstat
