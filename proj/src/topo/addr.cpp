#include "oshi/topo/addr.hpp"

#include <charconv>

#include <fmt/format.h>

namespace oshi::topo {

namespace {

bool parseUnsigned(std::string_view text, unsigned base, unsigned max, unsigned& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out, static_cast<int>(base));
  return ec == std::errc{} && ptr == text.data() + text.size() && out <= max;
}

}  // namespace

std::optional<Ipv4Addr> Ipv4Addr::parse(std::string_view text) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    const auto dot = text.find('.');
    const bool last = i == 3;
    if (last != (dot == std::string_view::npos)) return std::nullopt;
    unsigned octet = 0;
    if (!parseUnsigned(text.substr(0, dot), 10, 255, octet)) return std::nullopt;
    value = (value << 8) | octet;
    if (!last) text.remove_prefix(dot + 1);
  }
  return Ipv4Addr{value};
}

std::string Ipv4Addr::str() const {
  return fmt::format("{}.{}.{}.{}", value >> 24, (value >> 16) & 0xff, (value >> 8) & 0xff, value & 0xff);
}

std::optional<Ipv4Prefix> Ipv4Prefix::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto addr = Ipv4Addr::parse(text.substr(0, slash));
  unsigned len = 0;
  if (!addr || !parseUnsigned(text.substr(slash + 1), 10, 32, len)) return std::nullopt;
  return Ipv4Prefix{*addr, static_cast<int>(len)};
}

std::string Ipv4Prefix::str() const { return fmt::format("{}/{}", network.str(), length); }

std::optional<MacAddr> MacAddr::parse(std::string_view text) {
  std::uint64_t value = 0;
  for (int i = 0; i < 6; ++i) {
    const bool last = i == 5;
    const auto colon = text.find(':');
    if (last != (colon == std::string_view::npos)) return std::nullopt;
    const auto part = text.substr(0, colon);
    unsigned octet = 0;
    if (part.size() != 2 || !parseUnsigned(part, 16, 255, octet)) return std::nullopt;
    value = (value << 8) | octet;
    if (!last) text.remove_prefix(colon + 1);
  }
  return MacAddr{value};
}

std::string MacAddr::str() const {
  return fmt::format("{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}", octet(0), octet(1), octet(2), octet(3),
                     octet(4), octet(5));
}

}  // namespace oshi::topo
