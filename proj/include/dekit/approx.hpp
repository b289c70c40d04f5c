#pragma once

#include <random>

#include "dekit/eval.hpp"

namespace dekit {

// State approximation. Memory-cell leaves are dispatched before node
// recursion so that a cell is never torn apart as a plain cons; payloads
// compare by vec_approx, kinds must agree, bits by value_approx.
bool s_approx(const StateTree& s1, const StateTree& s2);

// Node with its first child removed.
StateTree state_tail(const StateTree& s);

// Counts the value slots (FF bits and payload elements) in a fixed
// pre-order traversal.
size_t state_slot_count(const StateTree& s);

// Replaces the slots at the given traversal indices by X.
StateTree state_weaken_slots(const StateTree& s,
                             const std::vector<bool>& mask);

// Independently replaces each slot by X with probability p; deterministic
// for a fixed seed. The result is always s_approx-below s.
StateTree weaken(const StateTree& s, double p, uint64_t seed);
Vec4 weaken(const Vec4& v, double p, uint64_t seed);

struct MonoViolation {
  uint64_t trial;
  std::string kind;  // "se" or "de"
  std::string weak_inputs;
  std::string strong_inputs;
  std::string weak_state;
  std::string strong_state;
  std::string position;
};

struct MonoReport {
  std::string module;
  uint64_t trials = 0;
  uint64_t seed = 0;
  std::vector<MonoViolation> violations;
  double elapsed_ms = 0;

  bool pass() const { return violations.empty(); }
};

// Draws a random state matching the shape: booleans with weight 0.45 each,
// X with weight 0.10; kinds come from the shape.
StateTree random_state(const StateShape& shape, std::mt19937_64& rng);
Vec4 random_inputs(size_t width, std::mt19937_64& rng);

// Randomized module monotonicity check: weakened inputs/state must yield
// outputs and next states approximated by the strong run's. Violations are
// greedily minimized before reporting. Deterministic for a fixed seed.
MonoReport check_monotonic(const Netlist& n, size_t at, uint64_t trials,
                           double p, uint64_t seed,
                           const EvalHooks* hooks = nullptr);

}  // namespace dekit
