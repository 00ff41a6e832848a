#pragma once

#include <cstdint>

#include "gatenet/circuit.hpp"

namespace gatenet {

/// Generates a valid pseudo-random benign circuit with num_cells +-10% gate
/// nodes drawn from {AND, OR, NOT} (plus DFF variants when allow_ff), plus a
/// small set of primary inputs and outputs. Wiring prefers so-far-unused
/// nets, which yields mostly tree-shaped logic with occasional reconvergence
/// (small fan-in cones with a long tail, as real netlists have). With
/// allow_ff, some flipflops are rewired to later nets to form sequential
/// feedback loops. Deterministic in (num_cells, seed, allow_ff).
Circuit gen_random_benign(int num_cells, uint64_t seed, bool allow_ff);

}  // namespace gatenet
