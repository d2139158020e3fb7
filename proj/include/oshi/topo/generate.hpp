#pragma once

#include <cstdint>

#include "oshi/topo/model.hpp"

namespace oshi::topo {

// Seeded random OSHI topology: a random spanning tree over CR and PE nodes,
// every other CR/PE pair added with probability `extraEdgeProb`,
// `nCePerPe` customer edges per PE, and one controller ("ctl1") assigned to
// every OSHI node and attached by a control link to the first CR.
//
// Node ids: cr1..crN, pe1..peM, ce1..ceK, ctl1. Ports: eth0, eth1, ... in
// creation order. Throws Error{InvalidArgument} on bad counts.
TopologyModel generateRandom(int nCore, int nPe, int nCePerPe, double extraEdgeProb,
                             std::uint64_t seed);

}  // namespace oshi::topo
