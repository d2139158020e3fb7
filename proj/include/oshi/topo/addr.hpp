#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace oshi::topo {

struct Ipv4Addr {
  std::uint32_t value = 0;

  static std::optional<Ipv4Addr> parse(std::string_view text);
  static Ipv4Addr fromOctets(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    return Ipv4Addr{(std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d};
  }
  std::string str() const;

  auto operator<=>(const Ipv4Addr&) const = default;
};

struct Ipv4Prefix {
  Ipv4Addr network;
  int length = 32;

  static std::optional<Ipv4Prefix> parse(std::string_view text);
  std::uint32_t mask() const { return length == 0 ? 0 : ~std::uint32_t{0} << (32 - length); }
  bool contains(Ipv4Addr a) const { return (a.value & mask()) == (network.value & mask()); }
  std::string str() const;

  auto operator<=>(const Ipv4Prefix&) const = default;
};

// 48-bit MAC held in the low bits of a 64-bit integer.
struct MacAddr {
  std::uint64_t value = 0;

  static std::optional<MacAddr> parse(std::string_view text);
  static constexpr MacAddr broadcast() { return MacAddr{0xffffffffffffULL}; }
  std::string str() const;
  std::uint8_t octet(int i) const { return static_cast<std::uint8_t>(value >> (8 * (5 - i))); }
  bool isBroadcast() const { return value == 0xffffffffffffULL; }
  bool isMulticast() const { return (octet(0) & 0x01) != 0; }

  auto operator<=>(const MacAddr&) const = default;
};

}  // namespace oshi::topo
