#pragma once

#include <iosfwd>
#include <variant>

#include "dekit/fourval.hpp"
#include "dekit/memory.hpp"

namespace dekit {

// Single edge-triggered flip-flop: 1 input (D), 1 output (Q).
struct FfRef {
  bool operator==(const FfRef&) const = default;
};

// Tree memory primitive. Inputs: we(1), addr(depth), din(width);
// outputs: dout(width).
struct MemRef {
  MemKind kind;
  unsigned depth;
  unsigned width;

  bool operator==(const MemRef&) const = default;
};

inline constexpr unsigned kMaxMemDepth = 16;
inline constexpr unsigned kMaxMemWidth = 64;

// What an occurrence instantiates: a gate, an FF, a memory, or a module
// defined later in the netlist.
using Ref = std::variant<GateId, FfRef, MemRef, std::string>;

struct Occurrence {
  std::string name;
  std::vector<std::string> outputs;
  Ref ref;
  std::vector<std::string> inputs;

  bool operator==(const Occurrence&) const = default;
};

struct ModuleDef {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Occurrence> occurrences;

  bool operator==(const ModuleDef&) const = default;
};

// Ordered module sequence; position 0 is the default top. A module may
// reference only modules at strictly later positions.
struct Netlist {
  std::vector<ModuleDef> modules;

  bool operator==(const Netlist&) const = default;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col);
  int line;
  int col;
};

Netlist parse_netlist(std::string_view text);
std::string print_netlist(const Netlist& n);

enum class WfClass {
  DuplicateModule,
  DuplicateOccurrence,
  DuplicateWire,
  UseBeforeDef,
  ArityMismatch,
  UnresolvedRef,
  BackwardRef,
  UndefinedOutput,
  BadName,
};

std::string_view wf_class_name(WfClass c);

struct WfViolation {
  WfClass cls;
  std::string module;
  std::string where;  // occurrence or wire name
  std::string message;
};

// Empty report iff the netlist satisfies every static hypothesis the
// evaluator relies on (defined-before-use, arities, forward refs, ...).
std::vector<WfViolation> check_wf(const Netlist& n);

// Index of the unique module with this name at a position > from.
std::optional<size_t> lookup(const Netlist& n, size_t from,
                             std::string_view name);

std::optional<size_t> find_module(const Netlist& n, std::string_view name);

struct RefArity {
  unsigned in;
  unsigned out;
  bool stateful;
};

// Arity and (transitive) statefulness of a reference seen from `from`.
// Unresolved module names yield nullopt.
std::optional<RefArity> ref_arity(const Netlist& n, size_t from,
                                  const Ref& ref);

bool module_stateful(const Netlist& n, size_t at);

}  // namespace dekit
