#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tgraph/error.hpp"

namespace tgraph {

using Timestamp = std::int64_t;
using NodeId = std::int64_t;

/// Unit of one timestamp tick. EventOrdered carries no wall-clock length and
/// is rejected by every operation that does time arithmetic.
enum class TimeGranularity : std::uint8_t {
  event_ordered,
  second,
  minute,
  hour,
  day,
  week,
  month,  // fixed 30 days
  year,   // fixed 365 days
};

enum class GranularityOrder { finer, equal, coarser };

constexpr bool is_real_time(TimeGranularity g) { return g != TimeGranularity::event_ordered; }

constexpr std::int64_t tick_seconds(TimeGranularity g) {
  switch (g) {
    case TimeGranularity::second: return 1;
    case TimeGranularity::minute: return 60;
    case TimeGranularity::hour: return 3600;
    case TimeGranularity::day: return 86400;
    case TimeGranularity::week: return 7 * 86400;
    case TimeGranularity::month: return 30 * 86400;
    case TimeGranularity::year: return 365 * 86400;
    case TimeGranularity::event_ordered: break;
  }
  throw Error(Errc::excluded_granularity, "event-ordered granularity has no tick length");
}

constexpr std::string_view to_string(TimeGranularity g) {
  switch (g) {
    case TimeGranularity::event_ordered: return "event";
    case TimeGranularity::second: return "second";
    case TimeGranularity::minute: return "minute";
    case TimeGranularity::hour: return "hour";
    case TimeGranularity::day: return "day";
    case TimeGranularity::week: return "week";
    case TimeGranularity::month: return "month";
    case TimeGranularity::year: return "year";
  }
  return "?";
}

inline constexpr std::array<TimeGranularity, 7> kRealTimeGranularities = {
    TimeGranularity::second, TimeGranularity::minute, TimeGranularity::hour,
    TimeGranularity::day,    TimeGranularity::week,   TimeGranularity::month,
    TimeGranularity::year};

inline std::optional<TimeGranularity> parse_granularity(std::string_view name) {
  if (name == "event" || name == "event_ordered") return TimeGranularity::event_ordered;
  for (auto g : kRealTimeGranularities) {
    if (name == to_string(g)) return g;
  }
  return std::nullopt;
}

/// Orders `a` relative to `b` by tick length: `finer` means `a` has the
/// shorter tick.
inline GranularityOrder compare_granularity(TimeGranularity a, TimeGranularity b) {
  if (!is_real_time(a) || !is_real_time(b)) {
    throw Error(Errc::excluded_granularity,
                "event-ordered granularity is excluded from time operations");
  }
  const auto sa = tick_seconds(a);
  const auto sb = tick_seconds(b);
  if (sa < sb) return GranularityOrder::finer;
  if (sa > sb) return GranularityOrder::coarser;
  return GranularityOrder::equal;
}

/// Throws unless `coarse` is real-time and coarser than or equal to `native`.
inline void require_coarser_or_equal(TimeGranularity native, TimeGranularity coarse) {
  if (compare_granularity(coarse, native) == GranularityOrder::finer) {
    throw Error(Errc::granularity_order, std::string("target granularity '") +
                                             std::string(to_string(coarse)) +
                                             "' is finer than native '" +
                                             std::string(to_string(native)) + "'");
  }
}

/// Maps native ticks onto coarse buckets. One coarse tick spans
/// `tick_seconds(coarse) / tick_seconds(native)` native ticks, which need not
/// be integral (a month is not a whole number of weeks), so the bucket rule is
/// kept as an exact rational: floor(offset * native_s / coarse_s).
class Bucketizer {
 public:
  Bucketizer(TimeGranularity native, TimeGranularity coarse) {
    require_coarser_or_equal(native, coarse);
    num_ = tick_seconds(native);
    den_ = tick_seconds(coarse);
    if (den_ % num_ == 0) {
      den_ /= num_;
      num_ = 1;
    }
  }

  /// Bucket of a non-negative offset from the anchor.
  std::int64_t bucket(std::int64_t offset) const {
    if (num_ == 1) return offset / den_;
    return static_cast<std::int64_t>(static_cast<__int128>(offset) * num_ / den_);
  }

  /// First offset (in native ticks) that falls into bucket `k`.
  std::int64_t bucket_start(std::int64_t k) const {
    if (num_ == 1) return k * den_;
    const __int128 scaled = static_cast<__int128>(k) * den_;
    return static_cast<std::int64_t>((scaled + num_ - 1) / num_);
  }

  /// True when every coarse tick is a whole number of native ticks.
  bool integral() const { return num_ == 1; }
  std::int64_t native_ticks_per_bucket() const { return den_; }

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

inline std::int64_t bucket_of(Timestamp t, Timestamp anchor, TimeGranularity native,
                              TimeGranularity coarse) {
  const Bucketizer bucketizer(native, coarse);
  if (t < anchor) {
    throw Error(Errc::negative_offset, "timestamp " + std::to_string(t) +
                                           " precedes anchor " + std::to_string(anchor));
  }
  return bucketizer.bucket(t - anchor);
}

}  // namespace tgraph
