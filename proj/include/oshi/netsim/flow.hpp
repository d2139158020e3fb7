#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oshi/netsim/frame.hpp"

namespace oshi::netsim {

using PortId = std::string;

// Partial match; absent fields are wildcards. `ethertype` is compared with
// Frame::ethertype, `vlan` with the outermost tag, `mplsLabel` with the top
// of the MPLS stack.
struct Match {
  std::optional<PortId> inPort;
  std::optional<std::uint16_t> ethertype;
  std::optional<std::uint16_t> vlan;
  std::optional<std::uint32_t> mplsLabel;
  std::optional<MacAddr> ethDst;

  bool matches(const PortId& port, const Frame& frame) const;
  bool operator==(const Match&) const = default;
};

namespace action {
struct Output {
  PortId port;
  bool operator==(const Output&) const = default;
};
struct GotoTable {
  int table = 1;
  bool operator==(const GotoTable&) const = default;
};
struct ToController {
  bool operator==(const ToController&) const = default;
};
// Push a label entry (ttl 255) and set the frame ethertype to `ethertype`.
struct PushMpls {
  std::uint32_t label = 0;
  std::uint16_t ethertype = kEthMpls;
  bool operator==(const PushMpls&) const = default;
};
// Pop the top entry; when the stack becomes empty the frame ethertype is set
// to `ethertype`.
struct PopMpls {
  std::uint16_t ethertype = kEthIpv4;
  bool operator==(const PopMpls&) const = default;
};
struct SetMplsLabel {
  std::uint32_t label = 0;
  bool operator==(const SetMplsLabel&) const = default;
};
struct SetEthSrc {
  MacAddr mac;
  bool operator==(const SetEthSrc&) const = default;
};
struct SetEthDst {
  MacAddr mac;
  bool operator==(const SetEthDst&) const = default;
};
struct ToIpEngine {
  bool operator==(const ToIpEngine&) const = default;
};
struct ToAce {
  std::string customerId;
  bool operator==(const ToAce&) const = default;
};
}  // namespace action

using Action = std::variant<action::Output, action::GotoTable, action::ToController, action::PushMpls,
                            action::PopMpls, action::SetMplsLabel, action::SetEthSrc, action::SetEthDst,
                            action::ToIpEngine, action::ToAce>;

bool isMplsAction(const Action& a);

using RuleId = std::uint64_t;

struct RuleCounters {
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  bool operator==(const RuleCounters&) const = default;
};

struct FlowRule {
  RuleId id = 0;
  int tableId = 0;
  int priority = 0;
  Match match;
  std::vector<Action> actions;
  std::string owner;  // "bootstrap" or the id of the service that installed it
  RuleCounters counters;

  // Equality ignoring counters.
  bool sameDefinition(const FlowRule& other) const {
    return id == other.id && tableId == other.tableId && priority == other.priority && match == other.match &&
           actions == other.actions && owner == other.owner;
  }
};

// Priority-ordered rule list (highest priority first, then oldest first).
class FlowTable {
 public:
  explicit FlowTable(int tableId = 0) : tableId_(tableId) {}

  int tableId() const { return tableId_; }

  // Throws Error{RuleConflict} if a rule with the same priority and match is
  // present, Error{InvalidArgument} for a misplaced GotoTable.
  void install(FlowRule rule);
  bool remove(RuleId id);

  FlowRule* lookup(const PortId& inPort, const Frame& frame);
  const FlowRule* find(RuleId id) const;

  const std::vector<FlowRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  void clearCounters();

  bool sameRules(const FlowTable& other) const;

 private:
  int tableId_;
  std::vector<FlowRule> rules_;
};

nlohmann::json toJson(const Match& m);
nlohmann::json toJson(const Action& a);
nlohmann::json toJson(const FlowRule& r, bool withCounters = false);
std::string ethertypeName(std::uint16_t ethertype);

}  // namespace oshi::netsim
