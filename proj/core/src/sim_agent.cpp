#include "mibguard/sim_agent.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cstring>
#include <utility>

#include "mibguard/error.hpp"

namespace mibguard {

SimulatedAgent::SimulatedAgent(Scenario scenario, std::string community)
    : scenario_(std::move(scenario)),
      community_(std::move(community)),
      counters_(scenario_.initial) {}

SimulatedAgent::~SimulatedAgent() { stop(); }

void SimulatedAgent::start(std::uint16_t port) {
  if (running_.load()) throw NetworkError("agent already running");
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw NetworkError("cannot create agent socket");

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(fd_);
    fd_ = -1;
    throw NetworkError("cannot bind agent to port " + std::to_string(port));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  // Short receive timeout so stop() is observed promptly.
  timeval tv{};
  tv.tv_usec = 50 * 1000;
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));

  running_.store(true);
  thread_ = std::thread([this] { serve_loop(); });
}

void SimulatedAgent::stop() {
  if (!running_.exchange(false)) return;
  if (thread_.joinable()) thread_.join();
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void SimulatedAgent::advance_window() {
  // Locate the phase for the current window; the last phase repeats.
  std::size_t remaining = window_index_;
  const ScenarioPhase* phase = nullptr;
  for (const ScenarioPhase& p : scenario_.phases) {
    if (remaining < p.windows) {
      phase = &p;
      break;
    }
    remaining -= p.windows;
  }
  if (phase == nullptr && !scenario_.phases.empty()) {
    phase = &scenario_.phases.back();
  }
  if (phase != nullptr) {
    for (std::size_t i = 0; i < counters_.size(); ++i) {
      counters_[i] += phase->increments[i];  // uint32 wrap is intended
    }
  }
  ++window_index_;
}

snmp::Message SimulatedAgent::handle(const snmp::Message& request) {
  snmp::Message response;
  response.version = request.version;
  response.community = request.community;
  response.pdu_type = snmp::PduType::Response;
  response.request_id = request.request_id;

  if (request.pdu_type != snmp::PduType::GetRequest) {
    response.error_status = 5;  // genErr
    return response;
  }

  const auto& oids = snmp::icmp_oids();
  for (const auto& vb : request.varbinds) {
    int match = -1;
    for (std::size_t i = 0; i < oids.size(); ++i) {
      if (vb.oid == oids[i]) {
        match = static_cast<int>(i);
        break;
      }
    }
    if (match >= 0 && scenario_.omit[match]) continue;  // dropped entirely
    snmp::VarBind out;
    out.oid = vb.oid;
    if (match >= 0) {
      out.value = snmp::Counter32{counters_[match]};
    } else {
      out.value = snmp::NoSuchObject{};
    }
    response.varbinds.push_back(std::move(out));
  }

  // One well-formed GetRequest = one polling window.
  advance_window();
  return response;
}

void SimulatedAgent::serve_loop() {
  std::uint8_t buffer[65536];
  while (running_.load()) {
    sockaddr_in peer{};
    socklen_t peer_len = sizeof(peer);
    const ssize_t got =
        ::recvfrom(fd_, buffer, sizeof(buffer), 0,
                   reinterpret_cast<sockaddr*>(&peer), &peer_len);
    if (got < 0) continue;  // timeout or shutdown

    snmp::Message response;
    try {
      const snmp::Message request = snmp::decode(
          std::span<const std::uint8_t>(buffer, static_cast<std::size_t>(got)));
      response = handle(request);
    } catch (const snmp::CodecError&) {
      // Malformed request: answer with a generic error, never silence.
      response.pdu_type = snmp::PduType::Response;
      response.community = community_;
      response.request_id = 0;
      response.error_status = 5;  // genErr
    }
    const auto wire = snmp::encode(response);
    ::sendto(fd_, wire.data(), wire.size(), 0,
             reinterpret_cast<sockaddr*>(&peer), peer_len);
    requests_served_.fetch_add(1);
  }
}

}  // namespace mibguard
