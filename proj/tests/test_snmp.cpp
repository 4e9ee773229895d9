#include <cstdint>

#include "doctest.h"

#include "mibguard/rng.hpp"
#include "mibguard/snmp.hpp"

using namespace mibguard;
using namespace mibguard::snmp;

namespace {

Message random_message(Rng& rng) {
  Message msg;
  msg.version = 1;
  const std::size_t community_len = rng.below(12);
  for (std::size_t i = 0; i < community_len; ++i) {
    msg.community.push_back(static_cast<char>(rng.below(256)));
  }
  if (community_len > 0 && rng.below(2) == 0) msg.community = "public";
  msg.pdu_type = rng.below(2) == 0 ? PduType::GetRequest : PduType::Response;
  msg.request_id = static_cast<std::int32_t>(rng.next_u32());
  msg.error_status = rng.below(7);
  msg.error_index = rng.below(4);

  const std::size_t varbinds = rng.below(5);
  for (std::size_t v = 0; v < varbinds; ++v) {
    VarBind vb;
    vb.oid = {1, 3};
    const std::size_t arcs = rng.below(8);
    for (std::size_t a = 0; a < arcs; ++a) {
      vb.oid.push_back(rng.below(2) == 0 ? rng.below(128) : rng.next_u32());
    }
    switch (rng.below(6)) {
      case 0: vb.value = Null{}; break;
      case 1: vb.value = static_cast<std::int64_t>(
                  static_cast<std::int32_t>(rng.next_u32()));
              break;
      case 2: {
        std::string s;
        const std::size_t len = rng.below(20);
        for (std::size_t i = 0; i < len; ++i) {
          s.push_back(static_cast<char>(rng.below(256)));
        }
        vb.value = s;
        break;
      }
      case 3: vb.value = Oid{1, 3, 6, 1, rng.below(1000)}; break;
      case 4: vb.value = Counter32{rng.next_u32()}; break;
      default: vb.value = NoSuchObject{}; break;
    }
    msg.varbinds.push_back(std::move(vb));
  }
  return msg;
}

}  // namespace

TEST_SUITE_BEGIN("snmp");

TEST_CASE("a known GetRequest encodes to hand-verified bytes") {
  Message msg;
  msg.version = 1;
  msg.community = "public";
  msg.pdu_type = PduType::GetRequest;
  msg.request_id = 1;
  msg.varbinds.push_back({Oid{1, 3, 6, 1, 2, 1, 5, 1, 0}, Null{}});

  const std::vector<std::uint8_t> expected = {
      0x30, 0x26, 0x02, 0x01, 0x01, 0x04, 0x06, 0x70, 0x75, 0x62,
      0x6C, 0x69, 0x63, 0xA0, 0x19, 0x02, 0x01, 0x01, 0x02, 0x01,
      0x00, 0x02, 0x01, 0x00, 0x30, 0x0E, 0x30, 0x0C, 0x06, 0x08,
      0x2B, 0x06, 0x01, 0x02, 0x01, 0x05, 0x01, 0x00, 0x05, 0x00};
  CHECK(encode(msg) == expected);
  CHECK(decode(expected) == msg);
}

TEST_CASE("decode is the left inverse of encode on random messages") {
  Rng rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const Message msg = random_message(rng);
    CHECK(decode(encode(msg)) == msg);
  }
}

TEST_CASE("counter32 edge values survive the trip") {
  for (std::uint32_t value : {0u, 15u, 127u, 128u, 0x7FFFFFFFu, 0x80000000u,
                              0xFFFFFFFFu}) {
    Message msg;
    msg.varbinds.push_back({Oid{1, 3, 6, 1}, Counter32{value}});
    const Message back = decode(encode(msg));
    CHECK(std::get<Counter32>(back.varbinds[0].value).value == value);
  }
}

TEST_CASE("multi-byte OID arcs survive the trip") {
  Message msg;
  msg.varbinds.push_back({Oid{1, 3, 6, 1, 4, 1, 99999, 1}, Null{}});
  msg.varbinds.push_back({Oid{2, 999, 4294967295u}, Null{}});
  CHECK(decode(encode(msg)) == msg);
}

TEST_CASE("negative and large integers survive the trip") {
  for (std::int64_t value : {0LL, -1LL, 127LL, 128LL, -128LL, -129LL,
                             2147483647LL, -2147483648LL}) {
    Message msg;
    msg.request_id = value;
    msg.varbinds.push_back({Oid{1, 3}, value});
    const Message back = decode(encode(msg));
    CHECK(back.request_id == value);
    CHECK(std::get<std::int64_t>(back.varbinds[0].value) == value);
  }
}

TEST_CASE("long-form lengths are used for big payloads") {
  Message msg;
  msg.community = std::string(300, 'x');
  const Message back = decode(encode(msg));
  CHECK(back.community == msg.community);
}

TEST_CASE("decoder rejects malformed input") {
  Message msg;
  msg.varbinds.push_back({Oid{1, 3, 6}, Counter32{7}});
  const auto wire = encode(msg);

  SUBCASE("truncation") {
    for (std::size_t cut = 1; cut < wire.size(); ++cut) {
      const std::span<const std::uint8_t> prefix(wire.data(), cut);
      CHECK_THROWS_AS(decode(prefix), CodecError);
    }
  }
  SUBCASE("trailing garbage") {
    auto padded = wire;
    padded.push_back(0x00);
    CHECK_THROWS_AS(decode(padded), CodecError);
  }
  SUBCASE("indefinite length") {
    auto mutated = wire;
    mutated[1] = 0x80;
    CHECK_THROWS_AS(decode(mutated), CodecError);
  }
  SUBCASE("unsupported pdu tag") {
    auto mutated = wire;
    mutated[13] = 0xA3;  // SetRequest
    CHECK_THROWS_AS(decode(mutated), CodecError);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(decode(std::span<const std::uint8_t>{}), CodecError);
  }
}

TEST_CASE("oid text helpers") {
  const Oid oid = {1, 3, 6, 1, 2, 1, 5, 8, 0};
  CHECK(oid_to_string(oid) == "1.3.6.1.2.1.5.8.0");
  CHECK(parse_oid("1.3.6.1.2.1.5.8.0") == oid);
  CHECK_THROWS_AS(parse_oid("1.3.x"), CodecError);
  CHECK_THROWS_AS(parse_oid("1"), CodecError);
  CHECK_THROWS_AS(parse_oid(""), CodecError);
}

TEST_CASE("icmp oids align with the canonical attribute order") {
  const auto& oids = icmp_oids();
  CHECK(oid_to_string(oids[0]) == "1.3.6.1.2.1.5.14.0");  // iOM
  CHECK(oid_to_string(oids[1]) == "1.3.6.1.2.1.5.1.0");   // iIM
  CHECK(oid_to_string(oids[2]) == "1.3.6.1.2.1.5.16.0");  // iOU
  CHECK(oid_to_string(oids[3]) == "1.3.6.1.2.1.5.3.0");   // iIU
  CHECK(oid_to_string(oids[4]) == "1.3.6.1.2.1.5.8.0");   // iIE
  CHECK(oid_to_string(oids[5]) == "1.3.6.1.2.1.5.21.0");  // iOE
}

TEST_CASE("oid validation on encode") {
  Message msg;
  msg.varbinds.push_back({Oid{1}, Null{}});
  CHECK_THROWS_AS(encode(msg), CodecError);
  msg.varbinds[0].oid = Oid{0, 40};
  CHECK_THROWS_AS(encode(msg), CodecError);
  msg.varbinds[0].oid = Oid{3, 1};
  CHECK_THROWS_AS(encode(msg), CodecError);
}

TEST_SUITE_END();
