#ifndef PROVSEG_PROVSEG_HPP
#define PROVSEG_PROVSEG_HPP

// Umbrella header for the spatial-provenance library: Bloom-filter provenance
// embedding, rake compression of the sparse filter, the segment-dictionary
// protocol, and the Monte Carlo feasibility harness.

#include "provseg/bitvec.hpp"
#include "provseg/bloom.hpp"
#include "provseg/config.hpp"
#include "provseg/packet.hpp"
#include "provseg/rake.hpp"
#include "provseg/rng.hpp"
#include "provseg/segment.hpp"
#include "provseg/sim.hpp"

#endif  // PROVSEG_PROVSEG_HPP
