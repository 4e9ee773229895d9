#include "mibguard/class_label.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>

namespace mibguard {
namespace {

constexpr std::array<std::string_view, kClassCount> kNames = {
    "Normal",    "IcmpEcho",  "TcpSyn",   "UdpFlood",
    "HttpFlood", "Slowloris", "Slowpost", "BruteForce"};

// Lowercased aliases: canonical names plus the dataset display strings.
constexpr std::pair<std::string_view, ClassLabel> kAliases[] = {
    {"normal", ClassLabel::Normal},
    {"icmpecho", ClassLabel::IcmpEcho},
    {"icmp-echo", ClassLabel::IcmpEcho},
    {"icmp_echo", ClassLabel::IcmpEcho},
    {"icmp-echo attack", ClassLabel::IcmpEcho},
    {"tcpsyn", ClassLabel::TcpSyn},
    {"tcp-syn", ClassLabel::TcpSyn},
    {"tcp_syn", ClassLabel::TcpSyn},
    {"tcp-syn attack", ClassLabel::TcpSyn},
    {"udpflood", ClassLabel::UdpFlood},
    {"udp-flood", ClassLabel::UdpFlood},
    {"udp_flood", ClassLabel::UdpFlood},
    {"udp flood", ClassLabel::UdpFlood},
    {"udp flood attack", ClassLabel::UdpFlood},
    {"httpflood", ClassLabel::HttpFlood},
    {"http-flood", ClassLabel::HttpFlood},
    {"http_flood", ClassLabel::HttpFlood},
    {"http flood", ClassLabel::HttpFlood},
    {"http flood attack", ClassLabel::HttpFlood},
    {"slowloris", ClassLabel::Slowloris},
    {"slowloris attack", ClassLabel::Slowloris},
    {"slowpost", ClassLabel::Slowpost},
    {"slowpost attack", ClassLabel::Slowpost},
    {"bruteforce", ClassLabel::BruteForce},
    {"brute-force", ClassLabel::BruteForce},
    {"brute_force", ClassLabel::BruteForce},
    {"brute force", ClassLabel::BruteForce},
    {"brute force attack", ClassLabel::BruteForce},
};

std::string lower_trimmed(std::string_view text) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string out(text.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

std::string_view label_name(ClassLabel label) {
  return kNames[label_index(label)];
}

std::optional<ClassLabel> parse_label(std::string_view text) {
  const std::string key = lower_trimmed(text);
  for (const auto& [alias, label] : kAliases) {
    if (key == alias) return label;
  }
  return std::nullopt;
}

}  // namespace mibguard
