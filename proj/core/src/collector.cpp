#include "mibguard/collector.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <optional>
#include <thread>

#include "mibguard/error.hpp"

namespace mibguard {
namespace {

std::int64_t monotonic_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// RAII socket.
struct UdpSocket {
  int fd = -1;

  UdpSocket() {
    fd = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd < 0) throw NetworkError("cannot create UDP socket");
  }
  ~UdpSocket() {
    if (fd >= 0) ::close(fd);
  }
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  void set_receive_timeout(std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  }
};

sockaddr_in resolve(const AgentEndpoint& endpoint) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) == 1) {
    return addr;
  }
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* result = nullptr;
  if (getaddrinfo(endpoint.host.c_str(), nullptr, &hints, &result) != 0 ||
      result == nullptr) {
    throw NetworkError("cannot resolve host '" + endpoint.host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
  freeaddrinfo(result);
  return addr;
}

std::int64_t next_request_id() {
  static std::atomic<std::int64_t> counter{1};
  return counter.fetch_add(1);
}

// One request/response exchange; throws NetworkError on timeout.
snmp::Message exchange(UdpSocket& sock, const sockaddr_in& addr,
                       const snmp::Message& request,
                       std::chrono::milliseconds timeout) {
  const auto wire = snmp::encode(request);
  if (::sendto(sock.fd, wire.data(), wire.size(), 0,
               reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
    throw NetworkError("sendto failed");
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::uint8_t buffer[65536];
  for (;;) {
    const auto remaining = deadline - std::chrono::steady_clock::now();
    if (remaining <= std::chrono::milliseconds::zero()) {
      throw NetworkError("timed out waiting for response");
    }
    sock.set_receive_timeout(
        std::chrono::duration_cast<std::chrono::milliseconds>(remaining) +
        std::chrono::milliseconds(1));
    const ssize_t got = ::recvfrom(sock.fd, buffer, sizeof(buffer), 0, nullptr, nullptr);
    if (got < 0) throw NetworkError("timed out waiting for response");

    snmp::Message response;
    try {
      response = snmp::decode(
          std::span<const std::uint8_t>(buffer, static_cast<std::size_t>(got)));
    } catch (const snmp::CodecError& e) {
      throw NetworkError(std::string("malformed SNMP response: ") + e.what());
    }
    // Stray datagrams for other requests are skipped, not fatal.
    if (response.request_id != request.request_id ||
        response.pdu_type != snmp::PduType::Response) {
      continue;
    }
    return response;
  }
}

}  // namespace

CounterSnapshot poll(const AgentEndpoint& endpoint) {
  if (endpoint.timeout <= std::chrono::milliseconds::zero()) {
    throw DataError("poll timeout must be positive");
  }
  if (endpoint.retries < 0) throw DataError("retries must be >= 0");

  const sockaddr_in addr = resolve(endpoint);
  UdpSocket sock;

  snmp::Message request;
  request.version = 1;  // v2c
  request.community = endpoint.community;
  request.pdu_type = snmp::PduType::GetRequest;
  for (const auto& oid : snmp::icmp_oids()) {
    request.varbinds.push_back({oid, snmp::Null{}});
  }

  std::string last_error = "timed out";
  const int attempts = endpoint.retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    request.request_id = next_request_id();
    snmp::Message response;
    try {
      response = exchange(sock, addr, request, endpoint.timeout);
    } catch (const NetworkError& e) {
      last_error = e.what();
      continue;
    }

    if (response.error_status != 0) {
      throw NetworkError("SNMP error-status " +
                         std::to_string(response.error_status) + " (index " +
                         std::to_string(response.error_index) + ")");
    }
    CounterSnapshot snapshot;
    snapshot.timestamp_ms = monotonic_ms();
    const auto& oids = snmp::icmp_oids();
    for (std::size_t i = 0; i < oids.size(); ++i) {
      const snmp::Counter32* counter = nullptr;
      for (const auto& vb : response.varbinds) {
        if (vb.oid == oids[i]) {
          counter = std::get_if<snmp::Counter32>(&vb.value);
          break;
        }
      }
      if (counter == nullptr) {
        throw NetworkError("missing varbind: " + snmp::oid_to_string(oids[i]) +
                           " (" + std::string(kIcmpLongNames[i]) + ")");
      }
      snapshot.counters[i] = counter->value;
    }
    return snapshot;
  }
  throw NetworkError("poll failed after " + std::to_string(attempts) +
                     " attempts: " + last_error);
}

DeltaVector delta(const CounterSnapshot& prev, const CounterSnapshot& curr) {
  if (curr.timestamp_ms <= prev.timestamp_ms) {
    throw DataError("snapshot timestamps must increase");
  }
  DeltaVector dv;
  dv.window_start_ms = prev.timestamp_ms;
  dv.window_end_ms = curr.timestamp_ms;
  for (std::size_t i = 0; i < dv.deltas.size(); ++i) {
    const std::uint64_t p = prev.counters[i];
    const std::uint64_t c = curr.counters[i];
    // Single-wrap Counter32 correction.
    const std::uint64_t d = c >= p ? c - p : c + 0x100000000ULL - p;
    dv.deltas[i] = static_cast<double>(d);
  }
  return dv;
}

std::size_t classify_stream(
    const AgentEndpoint& endpoint, const Model& model,
    std::chrono::milliseconds interval, std::size_t windows,
    const std::function<void(const StreamEvent&)>& sink) {
  if (interval <= std::chrono::milliseconds::zero()) {
    throw DataError("poll interval must be positive");
  }
  // The model may use any subset of the six ICMP attributes.
  std::vector<std::size_t> column_of;
  for (const auto& name : model.schema().names()) {
    const auto idx = icmp_schema().index_of(name);
    if (!idx) {
      throw DataError("model attribute '" + name +
                      "' is not an ICMP counter attribute");
    }
    column_of.push_back(*idx);
  }

  std::optional<CounterSnapshot> prev;
  std::size_t events = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t p = 0; p <= windows; ++p) {
    if (p > 0) std::this_thread::sleep_until(start + p * interval);
    CounterSnapshot snapshot;
    try {
      snapshot = poll(endpoint);
    } catch (const NetworkError& e) {
      StreamEvent event;
      event.is_gap = true;
      event.gap_reason = e.what();
      sink(event);
      prev.reset();
      continue;
    }
    if (prev) {
      StreamEvent event;
      event.window = delta(*prev, snapshot);
      std::vector<double> query(column_of.size());
      for (std::size_t a = 0; a < column_of.size(); ++a) {
        query[a] = event.window.deltas[column_of[a]];
      }
      event.distribution = model.predict_distribution(query);
      event.label = model.predict(query);
      sink(event);
      ++events;
    }
    prev = snapshot;
  }
  return events;
}

}  // namespace mibguard
