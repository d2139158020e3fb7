#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace oshi::ctrl {

inline constexpr std::uint32_t kFirstLabel = 16;
inline constexpr std::uint32_t kLabelSpace = 1u << 20;

// Smallest-free MPLS label allocation per link key. The controller keys by
// "<link-id>/<receiving node>", so each direction of a link has its own space.
class LabelAllocator {
 public:
  struct LinkState {
    std::uint32_t nextLabel = kFirstLabel;  // every label >= nextLabel is free
    std::set<std::uint32_t> freed;          // free labels below nextLabel

    bool operator==(const LinkState&) const = default;
  };

  // Throws Error{LabelExhausted}.
  std::uint32_t allocate(const std::string& link);
  // Throws Error{InvalidArgument} if the label is not in use.
  void release(const std::string& link, std::uint32_t label);

  bool inUse(const std::string& link, std::uint32_t label) const;
  std::size_t inUseCount(const std::string& link) const;
  const std::map<std::string, LinkState>& perLink() const { return perLink_; }

  bool operator==(const LabelAllocator&) const = default;

 private:
  std::map<std::string, LinkState> perLink_;
};

}  // namespace oshi::ctrl
