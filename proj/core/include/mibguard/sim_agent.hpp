#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "mibguard/snmp.hpp"

namespace mibguard {

// Scripted per-window counter increments, canonical attribute order.
struct ScenarioPhase {
  std::size_t windows = 0;
  std::array<std::uint32_t, 6> increments{};
};

struct Scenario {
  std::array<std::uint32_t, 6> initial{};
  // Once the last phase is exhausted its increments keep applying.
  std::vector<ScenarioPhase> phases;
  // Fault injection: drop these varbinds from every response.
  std::array<bool, 6> omit{};
};

// UDP test double for an SNMP agent. Answers v2c GetRequests for the six
// ICMP OIDs and advances the scenario by one window per well-formed request,
// so the i-th poll observes the scripted cumulative counters after i windows.
class SimulatedAgent {
 public:
  explicit SimulatedAgent(Scenario scenario, std::string community = "public");
  ~SimulatedAgent();

  SimulatedAgent(const SimulatedAgent&) = delete;
  SimulatedAgent& operator=(const SimulatedAgent&) = delete;

  // port 0 binds an ephemeral port; see port() for the bound one.
  void start(std::uint16_t port = 0);
  void stop();

  std::uint16_t port() const { return port_; }
  std::uint64_t requests_served() const { return requests_served_.load(); }

 private:
  void serve_loop();
  snmp::Message handle(const snmp::Message& request);
  void advance_window();

  Scenario scenario_;
  std::string community_;
  std::array<std::uint32_t, 6> counters_{};
  std::size_t window_index_ = 0;

  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread thread_;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> requests_served_{0};
};

}  // namespace mibguard
