#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

#include "mibguard/classifiers.hpp"
#include "mibguard/snmp.hpp"

namespace mibguard {

struct AgentEndpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 161;
  std::string community = "public";
  std::chrono::milliseconds timeout{1000};
  int retries = 1;  // total attempts = retries + 1
};

// Cumulative ICMP counters in canonical order (iOM, iIM, iOU, iIU, iIE, iOE),
// timestamped at response receipt (monotonic milliseconds).
struct CounterSnapshot {
  std::int64_t timestamp_ms = 0;
  std::array<std::uint32_t, 6> counters{};

  bool operator==(const CounterSnapshot&) const = default;
};

// Wrap-corrected per-window counter differences.
struct DeltaVector {
  std::int64_t window_start_ms = 0;
  std::int64_t window_end_ms = 0;
  std::array<double, 6> deltas{};

  bool operator==(const DeltaVector&) const = default;
};

// One SNMP v2c GetRequest for the six ICMP OIDs. Throws NetworkError on
// timeout (after retries+1 attempts), SNMP error-status, or missing varbinds.
CounterSnapshot poll(const AgentEndpoint& endpoint);

// Single-wrap Counter32 correction: curr >= prev ? curr - prev
// : curr + 2^32 - prev. Throws DataError on non-increasing timestamps.
DeltaVector delta(const CounterSnapshot& prev, const CounterSnapshot& curr);

struct StreamEvent {
  bool is_gap = false;
  std::string gap_reason;  // set when is_gap
  DeltaVector window;
  ClassLabel label = ClassLabel::Normal;
  ClassDistribution distribution{};
};

// Polls windows+1 times (the first poll only primes the previous snapshot),
// classifying each completed window with the model. Poll failures emit a gap
// event and reset the window; the loop never throws for network faults.
// Returns the number of classified window events.
std::size_t classify_stream(const AgentEndpoint& endpoint, const Model& model,
                            std::chrono::milliseconds interval,
                            std::size_t windows,
                            const std::function<void(const StreamEvent&)>& sink);

}  // namespace mibguard
