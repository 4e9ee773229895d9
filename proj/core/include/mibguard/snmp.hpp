#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mibguard/error.hpp"

namespace mibguard::snmp {

// Malformed or unsupported BER/SNMP bytes.
class CodecError : public Error {
 public:
  using Error::Error;
};

using Oid = std::vector<std::uint32_t>;

std::string oid_to_string(const Oid& oid);
Oid parse_oid(std::string_view dotted);

struct Null {
  bool operator==(const Null&) const = default;
};

// v2c exception marker returned for unknown objects.
struct NoSuchObject {
  bool operator==(const NoSuchObject&) const = default;
};

struct Counter32 {
  std::uint32_t value = 0;
  bool operator==(const Counter32&) const = default;
};

using Value =
    std::variant<Null, std::int64_t, std::string, Oid, Counter32, NoSuchObject>;

struct VarBind {
  Oid oid;
  Value value = Null{};

  bool operator==(const VarBind&) const = default;
};

enum class PduType : std::uint8_t {
  GetRequest = 0xA0,
  Response = 0xA2,
};

// One community-based SNMP message (v2c is version value 1 on the wire).
struct Message {
  std::int64_t version = 1;
  std::string community = "public";
  PduType pdu_type = PduType::GetRequest;
  std::int64_t request_id = 0;
  std::int64_t error_status = 0;
  std::int64_t error_index = 0;
  std::vector<VarBind> varbinds;

  bool operator==(const Message&) const = default;
};

// BER with definite lengths, covering exactly the message grammar above.
std::vector<std::uint8_t> encode(const Message& msg);

// Strict: rejects indefinite lengths, trailing bytes, and unsupported tags.
Message decode(std::span<const std::uint8_t> data);

// RFC 1213 ICMP group, instance .0, aligned to the canonical attribute order
// (iOM, iIM, iOU, iIU, iIE, iOE).
const std::array<Oid, 6>& icmp_oids();

}  // namespace mibguard::snmp
