#pragma once

#include <functional>

#include "dekit/netlist.hpp"

namespace dekit {

// Hierarchical sequential state of a module instance: one child per
// stateful occurrence, in occurrence order.
class StateTree {
 public:
  using Children = std::vector<StateTree>;

  StateTree() : v_(Children{}) {}

  static StateTree bit(Value4 b) { return StateTree(Variant{b}); }
  static StateTree cell(MemTree m) { return StateTree(Variant{std::move(m)}); }
  static StateTree node(Children ch) { return StateTree(Variant{std::move(ch)}); }

  bool is_bit() const { return std::holds_alternative<Value4>(v_); }
  bool is_cell() const { return std::holds_alternative<MemTree>(v_); }
  bool is_node() const { return std::holds_alternative<Children>(v_); }

  Value4 bit_value() const { return std::get<Value4>(v_); }
  const MemTree& cell_tree() const { return std::get<MemTree>(v_); }
  const Children& children() const { return std::get<Children>(v_); }

  bool operator==(const StateTree&) const = default;

 private:
  using Variant = std::variant<Value4, MemTree, Children>;
  explicit StateTree(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct FfBitShape {
  bool operator==(const FfBitShape&) const = default;
};

// State tree with leaves replaced by descriptors.
class StateShape {
 public:
  using Children = std::vector<StateShape>;

  StateShape() : v_(Children{}) {}

  static StateShape ff() { return StateShape(Variant{FfBitShape{}}); }
  static StateShape mem(MemRef m) { return StateShape(Variant{m}); }
  static StateShape node(Children ch) { return StateShape(Variant{std::move(ch)}); }

  bool is_ff() const { return std::holds_alternative<FfBitShape>(v_); }
  bool is_mem() const { return std::holds_alternative<MemRef>(v_); }
  bool is_node() const { return std::holds_alternative<Children>(v_); }

  const MemRef& mem_ref() const { return std::get<MemRef>(v_); }
  const Children& children() const { return std::get<Children>(v_); }

  bool operator==(const StateShape&) const = default;

 private:
  using Variant = std::variant<FfBitShape, MemRef, Children>;
  explicit StateShape(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Test hook: lets a harness replace the primitive gate table.
struct EvalHooks {
  std::function<std::optional<Value4>(GateId, std::span<const Value4>)>
      gate_override;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requires check_wf(n) to have passed.
StateShape state_shape(const Netlist& n, size_t at);

bool wf_state(const StateTree& s, const StateShape& shape);

// State matching the shape with every bit and payload set to fill.
StateTree fill_state(const StateShape& shape, Value4 fill);

// Combinational outputs of the module at `at` for the given inputs/state.
Vec4 se(const Netlist& n, size_t at, const Vec4& inputs, const StateTree& s,
        const EvalHooks* hooks = nullptr);

// Next state after one implicit clock edge.
StateTree de(const Netlist& n, size_t at, const Vec4& inputs,
             const StateTree& s, const EvalHooks* hooks = nullptr);

// Folds se/de over a cycle-by-cycle input trace.
std::pair<std::vector<Vec4>, StateTree> run(const Netlist& n, size_t at,
                                            const StateTree& s0,
                                            const std::vector<Vec4>& trace,
                                            const EvalHooks* hooks = nullptr);

// Nested parenthesized state text:
//   bit leaf    value character
//   cell leaf   "(" KIND depth width ")" then a fill vector or
//               "(" ("(" addr vec ")")* ")" with unlisted cells filled X
//   node        "(" child* ")"
std::string state_to_string(const StateTree& s);
StateTree state_from_string(std::string_view text);

}  // namespace dekit
