#include "oshi/ctrl/labels.hpp"

#include <string>

#include "oshi/error.hpp"

namespace oshi::ctrl {

std::uint32_t LabelAllocator::allocate(const std::string& link) {
  auto& s = perLink_[link];
  if (!s.freed.empty()) {
    auto label = *s.freed.begin();
    s.freed.erase(s.freed.begin());
    return label;
  }
  if (s.nextLabel >= kLabelSpace) throw Error(ErrorCode::LabelExhausted, "label space exhausted on " + link, link);
  return s.nextLabel++;
}

void LabelAllocator::release(const std::string& link, std::uint32_t label) {
  if (!inUse(link, label))
    throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(label) + " is not in use on " + link, link);
  auto it = perLink_.find(link);
  auto& s = it->second;
  s.freed.insert(label);
  // Keep the representation canonical: trailing free labels shrink nextLabel.
  while (!s.freed.empty() && *s.freed.rbegin() == s.nextLabel - 1) {
    s.freed.erase(std::prev(s.freed.end()));
    --s.nextLabel;
  }
  if (s.nextLabel == kFirstLabel) perLink_.erase(it);
}

bool LabelAllocator::inUse(const std::string& link, std::uint32_t label) const {
  auto it = perLink_.find(link);
  if (it == perLink_.end()) return false;
  return label >= kFirstLabel && label < it->second.nextLabel && !it->second.freed.count(label);
}

std::size_t LabelAllocator::inUseCount(const std::string& link) const {
  auto it = perLink_.find(link);
  if (it == perLink_.end()) return 0;
  return it->second.nextLabel - kFirstLabel - it->second.freed.size();
}

}  // namespace oshi::ctrl
