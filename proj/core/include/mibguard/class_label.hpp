#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mibguard {

// The eight traffic classes. The integer order is fixed and is the
// tie-break order everywhere (argmax ties, ranking ties, ...).
enum class ClassLabel : std::uint8_t {
  Normal = 0,
  IcmpEcho,
  TcpSyn,
  UdpFlood,
  HttpFlood,
  Slowloris,
  Slowpost,
  BruteForce,
};

inline constexpr std::size_t kClassCount = 8;

constexpr std::size_t label_index(ClassLabel label) {
  return static_cast<std::size_t>(label);
}

constexpr std::array<ClassLabel, kClassCount> all_class_labels() {
  return {ClassLabel::Normal,    ClassLabel::IcmpEcho,  ClassLabel::TcpSyn,
          ClassLabel::UdpFlood,  ClassLabel::HttpFlood, ClassLabel::Slowloris,
          ClassLabel::Slowpost,  ClassLabel::BruteForce};
}

// Canonical name, e.g. "IcmpEcho".
std::string_view label_name(ClassLabel label);

// Case-insensitive parse. Accepts canonical names and the dataset's display
// strings ("ICMP-Echo Attack", "Brute Force Attack", ...). Unknown -> nullopt.
std::optional<ClassLabel> parse_label(std::string_view text);

}  // namespace mibguard
