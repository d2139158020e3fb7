#include "oshi/netsim/flow.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "oshi/error.hpp"

namespace oshi::netsim {

bool Match::matches(const PortId& port, const Frame& frame) const {
  if (inPort && *inPort != port) return false;
  if (ethertype && *ethertype != frame.ethertype) return false;
  if (vlan && (frame.vlanTags.empty() || frame.vlanTags.front() != *vlan)) return false;
  if (mplsLabel && (frame.mplsStack.empty() || frame.mplsStack.front().label != *mplsLabel)) return false;
  if (ethDst && *ethDst != frame.ethDst) return false;
  return true;
}

bool isMplsAction(const Action& a) {
  return std::holds_alternative<action::PushMpls>(a) || std::holds_alternative<action::PopMpls>(a) ||
         std::holds_alternative<action::SetMplsLabel>(a);
}

void FlowTable::install(FlowRule rule) {
  rule.tableId = tableId_;
  for (std::size_t i = 0; i < rule.actions.size(); ++i) {
    if (const auto* g = std::get_if<action::GotoTable>(&rule.actions[i])) {
      if (tableId_ != 0 || g->table != 1 || i + 1 != rule.actions.size())
        throw Error(ErrorCode::InvalidArgument, "GotoTable is only allowed as the last action from table 0 to 1");
    }
  }
  for (const auto& r : rules_) {
    if (r.priority == rule.priority && r.match == rule.match)
      throw Error(ErrorCode::RuleConflict,
                  fmt::format("table {} already has a rule with priority {} and the same match", tableId_,
                              rule.priority),
                  r.owner);
  }
  auto pos = std::find_if(rules_.begin(), rules_.end(), [&](const FlowRule& r) { return r.priority < rule.priority; });
  rules_.insert(pos, std::move(rule));
}

bool FlowTable::remove(RuleId id) {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const FlowRule& r) { return r.id == id; });
  if (it == rules_.end()) return false;
  rules_.erase(it);
  return true;
}

FlowRule* FlowTable::lookup(const PortId& inPort, const Frame& frame) {
  for (auto& r : rules_)
    if (r.match.matches(inPort, frame)) return &r;
  return nullptr;
}

const FlowRule* FlowTable::find(RuleId id) const {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const FlowRule& r) { return r.id == id; });
  return it == rules_.end() ? nullptr : &*it;
}

void FlowTable::clearCounters() {
  for (auto& r : rules_) r.counters = {};
}

bool FlowTable::sameRules(const FlowTable& other) const {
  return tableId_ == other.tableId_ &&
         std::equal(rules_.begin(), rules_.end(), other.rules_.begin(), other.rules_.end(),
                    [](const FlowRule& a, const FlowRule& b) { return a.sameDefinition(b); });
}

std::string ethertypeName(std::uint16_t ethertype) { return fmt::format("0x{:04x}", ethertype); }

nlohmann::json toJson(const Match& m) {
  nlohmann::json j = nlohmann::json::object();
  if (m.inPort) j["inPort"] = *m.inPort;
  if (m.ethertype) j["ethertype"] = ethertypeName(*m.ethertype);
  if (m.vlan) j["vlan"] = *m.vlan;
  if (m.mplsLabel) j["mplsLabel"] = *m.mplsLabel;
  if (m.ethDst) j["ethDst"] = m.ethDst->str();
  return j;
}

nlohmann::json toJson(const Action& a) {
  using nlohmann::json;
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, action::Output>) return {{"type", "output"}, {"port", x.port}};
        if constexpr (std::is_same_v<T, action::GotoTable>) return {{"type", "gotoTable"}, {"table", x.table}};
        if constexpr (std::is_same_v<T, action::ToController>) return {{"type", "toController"}};
        if constexpr (std::is_same_v<T, action::PushMpls>)
          return {{"type", "pushMpls"}, {"label", x.label}, {"ethertype", ethertypeName(x.ethertype)}};
        if constexpr (std::is_same_v<T, action::PopMpls>)
          return {{"type", "popMpls"}, {"ethertype", ethertypeName(x.ethertype)}};
        if constexpr (std::is_same_v<T, action::SetMplsLabel>) return {{"type", "setMplsLabel"}, {"label", x.label}};
        if constexpr (std::is_same_v<T, action::SetEthSrc>) return {{"type", "setEthSrc"}, {"mac", x.mac.str()}};
        if constexpr (std::is_same_v<T, action::SetEthDst>) return {{"type", "setEthDst"}, {"mac", x.mac.str()}};
        if constexpr (std::is_same_v<T, action::ToIpEngine>) return {{"type", "toIpEngine"}};
        if constexpr (std::is_same_v<T, action::ToAce>) return {{"type", "toAce"}, {"customer", x.customerId}};
      },
      a);
}

nlohmann::json toJson(const FlowRule& r, bool withCounters) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : r.actions) actions.push_back(toJson(a));
  nlohmann::json j{{"id", r.id},           {"table", r.tableId}, {"priority", r.priority},
                   {"match", toJson(r.match)}, {"actions", actions}, {"owner", r.owner}};
  if (withCounters) j["counters"] = {{"packets", r.counters.packets}, {"bytes", r.counters.bytes}};
  return j;
}

}  // namespace oshi::netsim
