#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hiprl::eval {

// Co-simulation: drive random primitive sequences through the simulator while
// the same episode is tracked in the grounded planning formalism. Every
// successful world transition must be mirrored by an applicable ground action
// whose effects reproduce the abstract state; failed primitives and rotations
// must leave the abstraction untouched.

struct CosimReport {
  int sequences = 0;
  long primitives = 0;
  long ok_moves = 0;
  long ok_opens = 0;
  long ok_closes = 0;
  long ok_pickups = 0;
  long ok_puts = 0;
  std::vector<std::string> violations;  // empty means full agreement
};

CosimReport cosim_random_walks(std::uint64_t master_seed, int sequences,
                               int steps_per_sequence);

}  // namespace hiprl::eval
