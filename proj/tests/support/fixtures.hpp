#pragma once

#include <string>

#include "oshi/topo/json_io.hpp"
#include "oshi/util/io.hpp"

namespace testing {

inline std::string fixturePath(const std::string& name) { return std::string(OSHI_FIXTURE_DIR) + "/" + name; }

inline std::string fixtureText(const std::string& name) { return oshi::util::readTextFile(fixturePath(name)); }

inline oshi::topo::TopologyModel fixtureModel(const std::string& name) {
  return oshi::topo::importJson(oshi::util::readJsonFile(fixturePath(name)));
}

}  // namespace testing
