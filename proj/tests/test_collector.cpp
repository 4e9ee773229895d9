#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <vector>

#include "doctest.h"

#include "mibguard/collector.hpp"
#include "mibguard/error.hpp"
#include "mibguard/rng.hpp"
#include "mibguard/sim_agent.hpp"
#include "mibguard/synth.hpp"
#include "test_util.hpp"

using namespace mibguard;

namespace {

AgentEndpoint local_endpoint(std::uint16_t port,
                             std::chrono::milliseconds timeout =
                                 std::chrono::milliseconds(1000),
                             int retries = 1) {
  AgentEndpoint ep;
  ep.host = "127.0.0.1";
  ep.port = port;
  ep.timeout = timeout;
  ep.retries = retries;
  return ep;
}

// Raw request/response against a local UDP port, for codec-level agent tests.
std::vector<std::uint8_t> raw_exchange(std::uint16_t port,
                                       const std::vector<std::uint8_t>& request) {
  const int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  timeval tv{};
  tv.tv_sec = 2;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::sendto(fd, request.data(), request.size(), 0,
           reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  std::uint8_t buffer[65536];
  const ssize_t got = ::recvfrom(fd, buffer, sizeof(buffer), 0, nullptr, nullptr);
  ::close(fd);
  REQUIRE(got > 0);
  return std::vector<std::uint8_t>(buffer, buffer + got);
}

}  // namespace

TEST_SUITE_BEGIN("collector");

TEST_CASE("delta arithmetic") {
  CounterSnapshot prev{1000, {100, 90, 5, 4, 50, 40}};
  CounterSnapshot curr{2000, {150, 95, 5, 6, 80, 41}};
  const DeltaVector dv = delta(prev, curr);
  CHECK(dv.window_start_ms == 1000);
  CHECK(dv.window_end_ms == 2000);
  CHECK(dv.deltas[0] == 50.0);
  CHECK(dv.deltas[1] == 5.0);
  CHECK(dv.deltas[2] == 0.0);
  CHECK(dv.deltas[5] == 1.0);
}

TEST_CASE("delta applies the single-wrap correction") {
  CounterSnapshot prev{0, {4294967286u, 0, 0, 0, 0, 0}};  // 2^32 - 10
  CounterSnapshot curr{1, {5, 0, 0, 0, 0, 0}};
  CHECK(delta(prev, curr).deltas[0] == 15.0);
}

TEST_CASE("identical counters give all-zero deltas") {
  CounterSnapshot prev{0, {7, 7, 7, 7, 7, 7}};
  CounterSnapshot curr{5, {7, 7, 7, 7, 7, 7}};
  for (double d : delta(prev, curr).deltas) CHECK(d == 0.0);
}

TEST_CASE("delta rejects non-increasing timestamps") {
  CounterSnapshot a{5, {}};
  CounterSnapshot b{5, {}};
  CHECK_THROWS_AS(delta(a, b), DataError);
  b.timestamp_ms = 4;
  CHECK_THROWS_AS(delta(a, b), DataError);
}

TEST_CASE("delta is translation-invariant modulo 2^32") {
  Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    CounterSnapshot prev{0, {}};
    CounterSnapshot curr{1, {}};
    for (std::size_t i = 0; i < 6; ++i) {
      prev.counters[i] = rng.next_u32();
      // Keep the true increment within one wrap.
      curr.counters[i] = prev.counters[i] + rng.below(1000000);
    }
    const std::uint32_t shift = rng.next_u32();
    CounterSnapshot prev_shifted = prev;
    CounterSnapshot curr_shifted = curr;
    for (std::size_t i = 0; i < 6; ++i) {
      prev_shifted.counters[i] += shift;
      curr_shifted.counters[i] += shift;
    }
    CHECK(delta(prev, curr).deltas == delta(prev_shifted, curr_shifted).deltas);
  }
}

TEST_CASE("simulated agent echoes a constant scenario") {
  Scenario scenario;
  scenario.initial = {100, 90, 5, 4, 50, 40};
  scenario.phases = {{1000, {0, 0, 0, 0, 0, 0}}};
  SimulatedAgent agent(scenario);
  agent.start();

  const auto ep = local_endpoint(agent.port());
  const CounterSnapshot a = poll(ep);
  const CounterSnapshot b = poll(ep);
  CHECK(a.counters == scenario.initial);
  CHECK(b.counters == scenario.initial);
  CHECK(b.timestamp_ms > a.timestamp_ms);
  CHECK(agent.requests_served() == 2);
  agent.stop();
}

TEST_CASE("polled snapshots equal the scripted cumulative values") {
  Scenario scenario;
  scenario.initial = {10, 0, 0, 0, 100, 7};
  scenario.phases = {{3, {5, 1, 0, 0, 20, 2}}, {2, {50, 1, 0, 0, 900, 80}}};
  SimulatedAgent agent(scenario);
  agent.start();
  const auto ep = local_endpoint(agent.port());

  std::array<std::uint32_t, 6> expected = scenario.initial;
  for (int p = 0; p <= 6; ++p) {
    const CounterSnapshot snap = poll(ep);
    CHECK(snap.counters == expected);
    // The last phase keeps applying once the script runs out.
    const auto& inc = p < 3 ? scenario.phases[0].increments
                            : scenario.phases[1].increments;
    for (std::size_t i = 0; i < 6; ++i) expected[i] += inc[i];
  }
  agent.stop();
}

TEST_CASE("an echo-flood phase changes the iIE slope at the scripted window") {
  Scenario scenario;
  scenario.phases = {{3, {50, 45, 2, 2, 20, 20}},
                     {1000, {8050, 45, 2, 2, 10045, 8020}}};
  SimulatedAgent agent(scenario);
  agent.start();
  const auto ep = local_endpoint(agent.port());

  CounterSnapshot prev = poll(ep);
  for (int w = 0; w < 6; ++w) {
    const CounterSnapshot curr = poll(ep);
    const DeltaVector dv = delta(prev, curr);
    if (w < 3) {
      CHECK(dv.deltas[4] == 20.0);
    } else {
      CHECK(dv.deltas[4] == 10045.0);
    }
    prev = curr;
  }
  agent.stop();
}

TEST_CASE("agent answers unscripted oids with noSuchObject") {
  SimulatedAgent agent(Scenario{});
  agent.start();

  snmp::Message request;
  request.community = "public";
  request.pdu_type = snmp::PduType::GetRequest;
  request.request_id = 77;
  request.varbinds.push_back({snmp::parse_oid("1.3.6.1.2.1.1.3.0"), snmp::Null{}});
  const snmp::Message response =
      snmp::decode(raw_exchange(agent.port(), snmp::encode(request)));
  CHECK(response.request_id == 77);
  CHECK(response.error_status == 0);
  REQUIRE(response.varbinds.size() == 1);
  CHECK(std::holds_alternative<snmp::NoSuchObject>(response.varbinds[0].value));
  agent.stop();
}

TEST_CASE("agent answers malformed requests with an SNMP error, not silence") {
  SimulatedAgent agent(Scenario{});
  agent.start();
  const std::vector<std::uint8_t> garbage = {0xDE, 0xAD, 0xBE, 0xEF};
  const snmp::Message response = snmp::decode(raw_exchange(agent.port(), garbage));
  CHECK(response.pdu_type == snmp::PduType::Response);
  CHECK(response.error_status == 5);  // genErr
  agent.stop();
}

TEST_CASE("poll reports an omitted varbind by OID") {
  Scenario scenario;
  scenario.initial = {1, 2, 3, 4, 5, 6};
  scenario.omit[4] = true;  // drop icmpInEchos
  SimulatedAgent agent(scenario);
  agent.start();

  try {
    poll(local_endpoint(agent.port()));
    FAIL("expected NetworkError");
  } catch (const NetworkError& e) {
    const std::string what = e.what();
    CHECK(what.find("missing varbind") != std::string::npos);
    CHECK(what.find("1.3.6.1.2.1.5.8.0") != std::string::npos);
    CHECK(what.find("icmpInEchos") != std::string::npos);
  }
  agent.stop();
}

TEST_CASE("poll times out against an unreachable endpoint after retries+1") {
  // Nothing listens here; each of the 3 attempts must wait out its timeout.
  const auto ep = local_endpoint(1, std::chrono::milliseconds(40), 2);
  const auto start = std::chrono::steady_clock::now();
  try {
    poll(ep);
    FAIL("expected NetworkError");
  } catch (const NetworkError& e) {
    const std::string what = e.what();
    CHECK(what.find("3 attempts") != std::string::npos);
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed >= std::chrono::milliseconds(100));
}

TEST_CASE("poll validates endpoint parameters") {
  CHECK_THROWS_AS(poll(local_endpoint(1, std::chrono::milliseconds(0))),
                  DataError);
  CHECK_THROWS_AS(poll(local_endpoint(1, std::chrono::milliseconds(10), -1)),
                  DataError);
}

TEST_CASE("classify_stream labels idle and flood windows end to end") {
  // Matched synthetic training data: Normal around the idle increments,
  // IcmpEcho around the flood increments.
  SynthSpec spec;
  spec.schema = icmp_schema();
  SynthClass normal;
  normal.label = ClassLabel::Normal;
  normal.count = 120;
  normal.attrs = {{50, 5}, {45, 5}, {2, 1}, {2, 1}, {20, 3}, {20, 3}};
  SynthClass flood;
  flood.label = ClassLabel::IcmpEcho;
  flood.count = 120;
  flood.attrs = {{8050, 400}, {45, 5}, {2, 1}, {2, 1}, {10045, 500}, {8020, 400}};
  spec.classes = {normal, flood};
  spec.seed = 77;
  const Dataset training = synth_generate(spec);
  const auto model = train_tree(training, 2);

  Scenario scenario;
  scenario.phases = {{10, {50, 45, 2, 2, 20, 20}},
                     {1000, {8050, 45, 2, 2, 10045, 8020}}};
  SimulatedAgent agent(scenario);
  agent.start();

  std::vector<StreamEvent> events;
  const std::size_t classified = classify_stream(
      local_endpoint(agent.port()), *model, std::chrono::milliseconds(10), 20,
      [&](const StreamEvent& e) { events.push_back(e); });
  agent.stop();

  REQUIRE(classified == 20);
  REQUIRE(events.size() == 20);
  for (std::size_t w = 0; w < events.size(); ++w) {
    REQUIRE(!events[w].is_gap);
    CHECK(events[w].window.window_end_ms > events[w].window.window_start_ms);
    if (w < 10) {
      CHECK(events[w].label == ClassLabel::Normal);
    } else {
      CHECK(events[w].label == ClassLabel::IcmpEcho);
    }
    double total = 0.0;
    for (double p : events[w].distribution) total += p;
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("classify_stream turns poll failures into gap events") {
  // No agent at all: every poll fails, no window is ever classified.
  const Dataset training = synth_generate(testutil::small_separable_spec(3, 10));
  const auto model = train_naive_bayes(training);

  std::size_t gaps = 0;
  const std::size_t classified = classify_stream(
      local_endpoint(1, std::chrono::milliseconds(20), 0), *model,
      std::chrono::milliseconds(5), 3, [&](const StreamEvent& e) {
        CHECK(e.is_gap);
        CHECK(!e.gap_reason.empty());
        ++gaps;
      });
  CHECK(classified == 0);
  CHECK(gaps == 4);  // windows + 1 polls, all failed
}

TEST_CASE("classify_stream rejects non-ICMP model schemas") {
  const Dataset ds = testutil::make_dataset(
      {"tcpInSegs"}, {{{1.0}, ClassLabel::Normal}, {{2.0}, ClassLabel::TcpSyn}});
  const auto model = train_naive_bayes(ds);
  CHECK_THROWS_AS(
      classify_stream(local_endpoint(1), *model, std::chrono::milliseconds(10),
                      1, [](const StreamEvent&) {}),
      DataError);
}

TEST_CASE("classify_stream accepts a subset of the six attributes") {
  const Dataset training = synth_generate(testutil::small_separable_spec(4, 30));
  REQUIRE(training.schema().names() ==
          std::vector<std::string>{"iIE", "iOE"});
  const auto model = train_knn(training, 1);

  Scenario scenario;
  scenario.phases = {{1000, {1, 1, 1, 1, 100, 90}}};  // near Normal's range
  SimulatedAgent agent(scenario);
  agent.start();
  std::vector<ClassLabel> labels;
  classify_stream(local_endpoint(agent.port()), *model,
                  std::chrono::milliseconds(5), 3,
                  [&](const StreamEvent& e) { labels.push_back(e.label); });
  agent.stop();
  REQUIRE(labels.size() == 3);
  for (ClassLabel l : labels) CHECK(l == ClassLabel::Normal);
}

TEST_SUITE_END();
