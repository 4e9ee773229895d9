#include "mibguard/snmp.hpp"

#include <charconv>
#include <utility>

namespace mibguard::snmp {
namespace {

constexpr std::uint8_t kTagInteger = 0x02;
constexpr std::uint8_t kTagOctetString = 0x04;
constexpr std::uint8_t kTagNull = 0x05;
constexpr std::uint8_t kTagOid = 0x06;
constexpr std::uint8_t kTagSequence = 0x30;
constexpr std::uint8_t kTagCounter32 = 0x41;
constexpr std::uint8_t kTagNoSuchObject = 0x80;

using Bytes = std::vector<std::uint8_t>;

void append_length(Bytes& out, std::size_t len) {
  if (len < 128) {
    out.push_back(static_cast<std::uint8_t>(len));
    return;
  }
  std::uint8_t tmp[8];
  int n = 0;
  std::size_t v = len;
  while (v > 0) {
    tmp[n++] = static_cast<std::uint8_t>(v & 0xFF);
    v >>= 8;
  }
  out.push_back(static_cast<std::uint8_t>(0x80 | n));
  for (int i = n - 1; i >= 0; --i) out.push_back(tmp[i]);
}

void append_tlv(Bytes& out, std::uint8_t tag, const Bytes& content) {
  out.push_back(tag);
  append_length(out, content.size());
  out.insert(out.end(), content.begin(), content.end());
}

// Minimal two's-complement content octets.
Bytes int_content(std::int64_t value) {
  const std::uint64_t u = static_cast<std::uint64_t>(value);
  std::uint8_t raw[8];
  for (int i = 0; i < 8; ++i) {
    raw[i] = static_cast<std::uint8_t>((u >> (8 * (7 - i))) & 0xFF);
  }
  int start = 0;
  while (start < 7) {
    if (raw[start] == 0x00 && (raw[start + 1] & 0x80) == 0) {
      ++start;
    } else if (raw[start] == 0xFF && (raw[start + 1] & 0x80) != 0) {
      ++start;
    } else {
      break;
    }
  }
  return Bytes(raw + start, raw + 8);
}

// Unsigned content octets per SMI: minimal, leading 0x00 when the top bit is
// set.
Bytes uint_content(std::uint32_t value) {
  std::uint8_t raw[4];
  for (int i = 0; i < 4; ++i) {
    raw[i] = static_cast<std::uint8_t>((value >> (8 * (3 - i))) & 0xFF);
  }
  int start = 0;
  while (start < 3 && raw[start] == 0x00) ++start;
  Bytes out;
  if (raw[start] & 0x80) out.push_back(0x00);
  out.insert(out.end(), raw + start, raw + 4);
  return out;
}

void append_base128(Bytes& out, std::uint64_t v) {
  std::uint8_t tmp[10];
  int n = 0;
  do {
    tmp[n++] = static_cast<std::uint8_t>(v & 0x7F);
    v >>= 7;
  } while (v > 0);
  for (int i = n - 1; i > 0; --i) {
    out.push_back(static_cast<std::uint8_t>(tmp[i] | 0x80));
  }
  out.push_back(tmp[0]);
}

Bytes oid_content(const Oid& oid) {
  if (oid.size() < 2) throw CodecError("OID needs at least two arcs");
  if (oid[0] > 2 || (oid[0] < 2 && oid[1] >= 40)) {
    throw CodecError("invalid OID root arcs");
  }
  Bytes out;
  append_base128(out, static_cast<std::uint64_t>(oid[0]) * 40 + oid[1]);
  for (std::size_t i = 2; i < oid.size(); ++i) append_base128(out, oid[i]);
  return out;
}

Bytes value_bytes(const Value& value) {
  Bytes out;
  if (std::holds_alternative<Null>(value)) {
    append_tlv(out, kTagNull, {});
  } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
    append_tlv(out, kTagInteger, int_content(*i));
  } else if (const auto* s = std::get_if<std::string>(&value)) {
    append_tlv(out, kTagOctetString, Bytes(s->begin(), s->end()));
  } else if (const auto* o = std::get_if<Oid>(&value)) {
    append_tlv(out, kTagOid, oid_content(*o));
  } else if (const auto* c = std::get_if<Counter32>(&value)) {
    append_tlv(out, kTagCounter32, uint_content(c->value));
  } else {
    append_tlv(out, kTagNoSuchObject, {});
  }
  return out;
}

struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  bool done() const { return pos >= data.size(); }

  std::uint8_t byte() {
    if (done()) throw CodecError("truncated message");
    return data[pos++];
  }

  std::pair<std::uint8_t, std::span<const std::uint8_t>> read_tlv() {
    const std::uint8_t tag = byte();
    const std::uint8_t first = byte();
    std::size_t len = 0;
    if (first < 0x80) {
      len = first;
    } else if (first == 0x80) {
      throw CodecError("indefinite lengths are not supported");
    } else {
      const int n = first & 0x7F;
      if (n > 4) throw CodecError("unreasonable length field");
      for (int i = 0; i < n; ++i) len = (len << 8) | byte();
    }
    if (len > data.size() - pos) throw CodecError("length overruns message");
    auto content = data.subspan(pos, len);
    pos += len;
    return {tag, content};
  }

  std::span<const std::uint8_t> expect(std::uint8_t tag, const char* what) {
    const auto [got, content] = read_tlv();
    if (got != tag) {
      throw CodecError(std::string("expected ") + what);
    }
    return content;
  }
};

std::int64_t decode_int(std::span<const std::uint8_t> content) {
  if (content.empty() || content.size() > 8) {
    throw CodecError("INTEGER content out of range");
  }
  std::uint64_t value = (content[0] & 0x80) ? ~0ULL : 0;
  for (std::uint8_t b : content) value = (value << 8) | b;
  return static_cast<std::int64_t>(value);
}

std::uint32_t decode_uint32(std::span<const std::uint8_t> content) {
  if (content.empty() || content.size() > 5) {
    throw CodecError("Counter32 content out of range");
  }
  if (content.size() == 5 && content[0] != 0x00) {
    throw CodecError("Counter32 exceeds 32 bits");
  }
  std::uint64_t value = 0;
  for (std::uint8_t b : content) value = (value << 8) | b;
  if (value > 0xFFFFFFFFULL) throw CodecError("Counter32 exceeds 32 bits");
  return static_cast<std::uint32_t>(value);
}

Oid decode_oid(std::span<const std::uint8_t> content) {
  if (content.empty()) throw CodecError("empty OID");
  Oid oid;
  std::size_t i = 0;
  bool first = true;
  while (i < content.size()) {
    std::uint64_t arc = 0;
    for (;;) {
      if (i >= content.size()) throw CodecError("truncated OID arc");
      const std::uint8_t b = content[i++];
      arc = (arc << 7) | (b & 0x7F);
      if (arc > 0xFFFFFFFFULL) throw CodecError("OID arc exceeds 32 bits");
      if ((b & 0x80) == 0) break;
    }
    if (first) {
      first = false;
      if (arc < 40) {
        oid.push_back(0);
        oid.push_back(static_cast<std::uint32_t>(arc));
      } else if (arc < 80) {
        oid.push_back(1);
        oid.push_back(static_cast<std::uint32_t>(arc - 40));
      } else {
        oid.push_back(2);
        oid.push_back(static_cast<std::uint32_t>(arc - 80));
      }
    } else {
      oid.push_back(static_cast<std::uint32_t>(arc));
    }
  }
  return oid;
}

Value decode_value(std::uint8_t tag, std::span<const std::uint8_t> content) {
  switch (tag) {
    case kTagNull:
      if (!content.empty()) throw CodecError("NULL with content");
      return Null{};
    case kTagInteger:
      return decode_int(content);
    case kTagOctetString:
      return std::string(content.begin(), content.end());
    case kTagOid:
      return decode_oid(content);
    case kTagCounter32:
      return Counter32{decode_uint32(content)};
    case kTagNoSuchObject:
      if (!content.empty()) throw CodecError("noSuchObject with content");
      return NoSuchObject{};
    default:
      throw CodecError("unsupported value tag");
  }
}

}  // namespace

std::string oid_to_string(const Oid& oid) {
  std::string out;
  for (std::size_t i = 0; i < oid.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(oid[i]);
  }
  return out;
}

Oid parse_oid(std::string_view dotted) {
  Oid oid;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    std::size_t dot = dotted.find('.', start);
    if (dot == std::string_view::npos) dot = dotted.size();
    std::uint32_t arc = 0;
    const auto [ptr, ec] =
        std::from_chars(dotted.data() + start, dotted.data() + dot, arc);
    if (ec != std::errc{} || ptr != dotted.data() + dot) {
      throw CodecError("invalid OID text '" + std::string(dotted) + "'");
    }
    oid.push_back(arc);
    if (dot == dotted.size()) break;
    start = dot + 1;
  }
  if (oid.size() < 2) throw CodecError("OID needs at least two arcs");
  return oid;
}

std::vector<std::uint8_t> encode(const Message& msg) {
  Bytes varbind_list;
  for (const VarBind& vb : msg.varbinds) {
    Bytes body;
    append_tlv(body, kTagOid, oid_content(vb.oid));
    const Bytes value = value_bytes(vb.value);
    body.insert(body.end(), value.begin(), value.end());
    append_tlv(varbind_list, kTagSequence, body);
  }

  Bytes pdu;
  append_tlv(pdu, kTagInteger, int_content(msg.request_id));
  append_tlv(pdu, kTagInteger, int_content(msg.error_status));
  append_tlv(pdu, kTagInteger, int_content(msg.error_index));
  append_tlv(pdu, kTagSequence, varbind_list);

  Bytes body;
  append_tlv(body, kTagInteger, int_content(msg.version));
  append_tlv(body, kTagOctetString,
             Bytes(msg.community.begin(), msg.community.end()));
  append_tlv(body, static_cast<std::uint8_t>(msg.pdu_type), pdu);

  Bytes out;
  append_tlv(out, kTagSequence, body);
  return out;
}

Message decode(std::span<const std::uint8_t> data) {
  Reader outer{data};
  const auto body = outer.expect(kTagSequence, "message SEQUENCE");
  if (!outer.done()) throw CodecError("trailing bytes after message");

  Reader msg_reader{body};
  Message msg;
  msg.version = decode_int(msg_reader.expect(kTagInteger, "version INTEGER"));
  const auto community =
      msg_reader.expect(kTagOctetString, "community OCTET STRING");
  msg.community.assign(community.begin(), community.end());

  const auto [pdu_tag, pdu_body] = msg_reader.read_tlv();
  if (pdu_tag == static_cast<std::uint8_t>(PduType::GetRequest)) {
    msg.pdu_type = PduType::GetRequest;
  } else if (pdu_tag == static_cast<std::uint8_t>(PduType::Response)) {
    msg.pdu_type = PduType::Response;
  } else {
    throw CodecError("unsupported PDU type");
  }
  if (!msg_reader.done()) throw CodecError("trailing bytes after PDU");

  Reader pdu{pdu_body};
  msg.request_id = decode_int(pdu.expect(kTagInteger, "request-id INTEGER"));
  msg.error_status =
      decode_int(pdu.expect(kTagInteger, "error-status INTEGER"));
  msg.error_index = decode_int(pdu.expect(kTagInteger, "error-index INTEGER"));
  const auto varbind_list =
      pdu.expect(kTagSequence, "variable-bindings SEQUENCE");
  if (!pdu.done()) throw CodecError("trailing bytes in PDU");

  Reader list{varbind_list};
  while (!list.done()) {
    const auto vb_body = list.expect(kTagSequence, "VarBind SEQUENCE");
    Reader vb_reader{vb_body};
    VarBind vb;
    vb.oid = decode_oid(vb_reader.expect(kTagOid, "VarBind OID"));
    const auto [value_tag, value_content] = vb_reader.read_tlv();
    vb.value = decode_value(value_tag, value_content);
    if (!vb_reader.done()) throw CodecError("trailing bytes in VarBind");
    msg.varbinds.push_back(std::move(vb));
  }
  return msg;
}

const std::array<Oid, 6>& icmp_oids() {
  // Canonical order iOM, iIM, iOU, iIU, iIE, iOE.
  static const std::array<Oid, 6> oids = {
      Oid{1, 3, 6, 1, 2, 1, 5, 14, 0},  // icmpOutMsgs
      Oid{1, 3, 6, 1, 2, 1, 5, 1, 0},   // icmpInMsgs
      Oid{1, 3, 6, 1, 2, 1, 5, 16, 0},  // icmpOutDestUnreachs
      Oid{1, 3, 6, 1, 2, 1, 5, 3, 0},   // icmpInDestUnreachs
      Oid{1, 3, 6, 1, 2, 1, 5, 8, 0},   // icmpInEchos
      Oid{1, 3, 6, 1, 2, 1, 5, 21, 0},  // icmpOutEchos
  };
  return oids;
}

}  // namespace mibguard::snmp
