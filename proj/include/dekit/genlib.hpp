#pragma once

#include "dekit/netlist.hpp"

namespace dekit {

// Accumulates generated modules. Generators are idempotent per parameter
// set: re-requesting a module returns the existing definition. Callers are
// placed before callees so the finalized sequence resolves forward.
class Builder {
 public:
  bool has(std::string_view name) const;
  // Adds the module unless one with the same name exists.
  const std::string& ensure(ModuleDef m);
  // Places a module ahead of everything emitted so far.
  void add_front(ModuleDef m);

  Netlist finalize() const;

 private:
  std::vector<ModuleDef> modules_;
};

inline constexpr unsigned kMaxGenWidth = 64;

// n parallel copies of a 1- or 2-input gate. Inputs A_0.. (and B_0..),
// outputs O_0...
std::string gen_pointwise(Builder& b, GateId gate, unsigned n);

// Ripple-carry adder: inputs CIN, A_0.., B_0..; outputs S_0.., COUT.
std::string gen_adder(Builder& b, unsigned n);

// Word mux: inputs S, A_0.., B_0..; outputs O_0..; S = T selects A.
std::string gen_mux(Builder& b, unsigned n);

// One-hot decoder: n inputs, 2^n outputs. n <= 6.
std::string gen_decoder(Builder& b, unsigned n);

// Load-enabled register: inputs LOAD, D_0..; outputs Q_0..
std::string gen_register(Builder& b, unsigned n);

// Wrapper around one MEM(RAM): inputs WE, A_0.., D_0..; outputs Q_0..
std::string gen_regfile(Builder& b, unsigned depth, unsigned width);

// ROM variant; writes are ignored by the memory semantics.
std::string gen_romfile(Builder& b, unsigned depth, unsigned width);

}  // namespace dekit
