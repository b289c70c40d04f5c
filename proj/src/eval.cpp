#include "dekit/eval.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>

namespace dekit {

StateShape state_shape(const Netlist& n, size_t at) {
  StateShape::Children children;
  const ModuleDef& m = n.modules[at];
  for (const Occurrence& occ : m.occurrences) {
    if (std::holds_alternative<FfRef>(occ.ref)) {
      children.push_back(StateShape::ff());
    } else if (const auto* mem = std::get_if<MemRef>(&occ.ref)) {
      children.push_back(StateShape::mem(*mem));
    } else if (const auto* name = std::get_if<std::string>(&occ.ref)) {
      auto sub = lookup(n, at, *name);
      if (sub && module_stateful(n, *sub))
        children.push_back(state_shape(n, *sub));
    }
  }
  return StateShape::node(std::move(children));
}

bool wf_state(const StateTree& s, const StateShape& shape) {
  if (shape.is_ff()) return s.is_bit();
  if (shape.is_mem()) {
    if (!s.is_cell()) return false;
    const MemRef& d = shape.mem_ref();
    if (!mem_wf(s.cell_tree(), d.depth, d.width)) return false;
    for (uint64_t i = 0; i < (uint64_t{1} << d.depth); ++i)
      if (mem_cell_at(s.cell_tree(), i).kind != d.kind) return false;
    return true;
  }
  if (!s.is_node()) return false;
  const auto& sc = s.children();
  const auto& hc = shape.children();
  if (sc.size() != hc.size()) return false;
  for (size_t i = 0; i < sc.size(); ++i)
    if (!wf_state(sc[i], hc[i])) return false;
  return true;
}

StateTree fill_state(const StateShape& shape, Value4 fill) {
  if (shape.is_ff()) return StateTree::bit(fill);
  if (shape.is_mem()) {
    const MemRef& d = shape.mem_ref();
    return StateTree::cell(
        mem_make(d.kind, d.depth, d.width, Vec4(d.width, fill)));
  }
  StateTree::Children children;
  for (const StateShape& c : shape.children())
    children.push_back(fill_state(c, fill));
  return StateTree::node(std::move(children));
}

namespace {

struct ModuleResult {
  Vec4 outputs;
  StateTree next;  // valid only when requested
};

ModuleResult eval_module(const Netlist& n, size_t at, const Vec4& inputs,
                         const StateTree& s, bool want_next,
                         const EvalHooks* hooks) {
  const ModuleDef& m = n.modules[at];
  if (inputs.size() != m.inputs.size())
    throw EvalError("module " + m.name + ": expected " +
                    std::to_string(m.inputs.size()) + " inputs, got " +
                    std::to_string(inputs.size()));
  if (!s.is_node())
    throw EvalError("module " + m.name + ": state is not a node");

  std::unordered_map<std::string, Value4> env;
  env.reserve(m.inputs.size() + m.occurrences.size() * 2);
  for (size_t i = 0; i < m.inputs.size(); ++i) env[m.inputs[i]] = inputs[i];

  auto wire = [&](const std::string& name) -> Value4 {
    auto it = env.find(name);
    if (it == env.end())
      throw EvalError("module " + m.name + ": wire '" + name +
                      "' read while undefined");
    return it->second;
  };

  const auto& state_children = s.children();
  size_t state_idx = 0;
  auto next_state_child = [&](const Occurrence& occ) -> const StateTree& {
    if (state_idx >= state_children.size())
      throw EvalError("module " + m.name + ": state too short at occurrence " +
                      occ.name);
    return state_children[state_idx++];
  };

  // FF data and MEM write inputs are consumed only after the full wire
  // environment is known, so feedback through sequential elements works.
  struct PendingFf {
    const Occurrence* occ;
  };
  struct PendingMem {
    const Occurrence* occ;
    const MemRef* mem;
    const MemTree* tree;
  };
  std::vector<std::variant<StateTree, PendingFf, PendingMem>> next_parts;

  for (const Occurrence& occ : m.occurrences) {
    Vec4 outs;
    if (const auto* g = std::get_if<GateId>(&occ.ref)) {
      if (occ.inputs.size() != gate_arity(*g))
        throw EvalError("module " + m.name + ": arity mismatch at " + occ.name);
      Vec4 vals;
      vals.reserve(occ.inputs.size());
      for (const std::string& in : occ.inputs) vals.push_back(wire(in));
      std::optional<Value4> o;
      if (hooks && hooks->gate_override) o = hooks->gate_override(*g, vals);
      if (!o) o = gate_eval(*g, vals);
      outs.push_back(*o);
    } else if (std::holds_alternative<FfRef>(occ.ref)) {
      const StateTree& child = next_state_child(occ);
      if (!child.is_bit())
        throw EvalError("module " + m.name + ": FF state at " + occ.name +
                        " is not a bit");
      if (occ.inputs.size() != 1)
        throw EvalError("module " + m.name + ": arity mismatch at " + occ.name);
      outs.push_back(child.bit_value());
      if (want_next) next_parts.push_back(PendingFf{&occ});
    } else if (const auto* mem = std::get_if<MemRef>(&occ.ref)) {
      const StateTree& child = next_state_child(occ);
      if (!child.is_cell())
        throw EvalError("module " + m.name + ": MEM state at " + occ.name +
                        " is not a cell");
      if (occ.inputs.size() != 1 + mem->depth + mem->width)
        throw EvalError("module " + m.name + ": arity mismatch at " + occ.name);
      Vec4 addr;
      addr.reserve(mem->depth);
      for (unsigned i = 0; i < mem->depth; ++i)
        addr.push_back(wire(occ.inputs[1 + i]));
      outs = mem_read(child.cell_tree(), addr);
      if (want_next) next_parts.push_back(PendingMem{&occ, mem, &child.cell_tree()});
    } else {
      const std::string& name = std::get<std::string>(occ.ref);
      auto sub = lookup(n, at, name);
      if (!sub)
        throw EvalError("module " + m.name + ": unresolved reference '" +
                        name + "' at " + occ.name);
      Vec4 vals;
      vals.reserve(occ.inputs.size());
      for (const std::string& in : occ.inputs) vals.push_back(wire(in));
      bool stateful = module_stateful(n, *sub);
      static const StateTree kEmpty = StateTree::node({});
      const StateTree& child = stateful ? next_state_child(occ) : kEmpty;
      ModuleResult r =
          eval_module(n, *sub, vals, child, want_next && stateful, hooks);
      outs = std::move(r.outputs);
      if (want_next && stateful) next_parts.push_back(std::move(r.next));
    }

    if (outs.size() != occ.outputs.size())
      throw EvalError("module " + m.name + ": output arity mismatch at " +
                      occ.name);
    for (size_t i = 0; i < outs.size(); ++i) {
      if (env.count(occ.outputs[i]))
        throw EvalError("module " + m.name + ": wire '" + occ.outputs[i] +
                        "' defined twice");
      env[occ.outputs[i]] = outs[i];
    }
  }

  StateTree::Children next_children;
  next_children.reserve(next_parts.size());
  for (auto& part : next_parts) {
    if (auto* ready = std::get_if<StateTree>(&part)) {
      next_children.push_back(std::move(*ready));
    } else if (auto* ff = std::get_if<PendingFf>(&part)) {
      next_children.push_back(StateTree::bit(wire(ff->occ->inputs[0])));
    } else {
      auto& pm = std::get<PendingMem>(part);
      Value4 we = wire(pm.occ->inputs[0]);
      Vec4 addr, din;
      for (unsigned i = 0; i < pm.mem->depth; ++i)
        addr.push_back(wire(pm.occ->inputs[1 + i]));
      for (unsigned i = 0; i < pm.mem->width; ++i)
        din.push_back(wire(pm.occ->inputs[1 + pm.mem->depth + i]));
      next_children.push_back(
          StateTree::cell(mem_write(*pm.tree, addr, din, we)));
    }
  }

  if (state_idx != state_children.size())
    throw EvalError("module " + m.name + ": state has " +
                    std::to_string(state_children.size()) +
                    " children, used " + std::to_string(state_idx));

  ModuleResult result;
  result.outputs.reserve(m.outputs.size());
  for (const std::string& out : m.outputs) result.outputs.push_back(wire(out));
  if (want_next) result.next = StateTree::node(std::move(next_children));
  return result;
}

}  // namespace

Vec4 se(const Netlist& n, size_t at, const Vec4& inputs, const StateTree& s,
        const EvalHooks* hooks) {
  return eval_module(n, at, inputs, s, false, hooks).outputs;
}

StateTree de(const Netlist& n, size_t at, const Vec4& inputs,
             const StateTree& s, const EvalHooks* hooks) {
  return eval_module(n, at, inputs, s, true, hooks).next;
}

std::pair<std::vector<Vec4>, StateTree> run(const Netlist& n, size_t at,
                                            const StateTree& s0,
                                            const std::vector<Vec4>& trace,
                                            const EvalHooks* hooks) {
  std::vector<Vec4> outputs;
  outputs.reserve(trace.size());
  StateTree s = s0;
  for (const Vec4& in : trace) {
    outputs.push_back(se(n, at, in, s, hooks));
    s = de(n, at, in, s, hooks);
  }
  return {std::move(outputs), std::move(s)};
}

namespace {

void print_state(std::ostream& os, const StateTree& s) {
  if (s.is_bit()) {
    os << value_to_char(s.bit_value());
    return;
  }
  if (s.is_cell()) {
    const MemTree& m = s.cell_tree();
    unsigned depth = mem_depth(m);
    unsigned width = mem_width(m);
    const MemCell& first = mem_cell_at(m, 0);
    os << '(' << mem_kind_name(first.kind) << ' ' << depth << ' ' << width
       << ") ";
    bool uniform = true;
    for (uint64_t i = 1; i < (uint64_t{1} << depth) && uniform; ++i)
      uniform = mem_cell_at(m, i).payload == first.payload;
    if (uniform) {
      os << vec_to_string(first.payload);
    } else {
      os << '(';
      for (uint64_t i = 0; i < (uint64_t{1} << depth); ++i) {
        if (i) os << ' ';
        os << '(' << i << ' ' << vec_to_string(mem_cell_at(m, i).payload)
           << ')';
      }
      os << ')';
    }
    return;
  }
  os << '(';
  const auto& ch = s.children();
  for (size_t i = 0; i < ch.size(); ++i) {
    if (i) os << ' ';
    print_state(os, ch[i]);
  }
  os << ')';
}

struct StateParser {
  std::string_view text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) {
    throw EvalError("state text: " + msg + " at offset " +
                    std::to_string(pos));
  }

  void skip_ws() {
    while (pos < text.size()) {
      if (text[pos] == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool at_lparen() {
    skip_ws();
    return pos < text.size() && text[pos] == '(';
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      fail(std::string("expected '") + c + "'");
    ++pos;
  }

  std::string symbol() {
    skip_ws();
    std::string s;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_' || text[pos] == '-')) {
      s.push_back(static_cast<char>(
          std::toupper(static_cast<unsigned char>(text[pos]))));
      ++pos;
    }
    if (s.empty()) fail("expected a symbol");
    return s;
  }

  uint64_t nat() {
    std::string s = symbol();
    uint64_t v = 0;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail("expected a number");
      v = v * 10 + static_cast<uint64_t>(c - '0');
    }
    return v;
  }

  Vec4 vec() {
    std::string s = symbol();
    auto v = vec_from_string(s);
    if (!v) fail("expected a value vector");
    return *v;
  }

  StateTree parse() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    if (text[pos] != '(') {
      auto v = value_from_char(text[pos]);
      if (!v) fail("expected a value character");
      ++pos;
      return StateTree::bit(*v);
    }
    // Either a cell-leaf header or a node.
    size_t save = pos;
    ++pos;
    skip_ws();
    if (pos < text.size() &&
        std::isalpha(static_cast<unsigned char>(text[pos]))) {
      size_t sym_start = pos;
      std::string head = symbol();
      if (auto kind = mem_kind_by_name(head)) {
        unsigned depth = static_cast<unsigned>(nat());
        unsigned width = static_cast<unsigned>(nat());
        expect(')');
        skip_ws();
        if (at_lparen()) {
          expect('(');
          MemTree m = mem_make(*kind, depth, width, Vec4(width, Value4::X));
          while (at_lparen()) {
            expect('(');
            uint64_t addr = nat();
            Vec4 v = vec();
            if (v.size() != width) fail("cell payload width mismatch");
            if (addr >= (uint64_t{1} << depth)) fail("address out of range");
            expect(')');
            m = mem_poke(m, addr, v);
          }
          expect(')');
          return StateTree::cell(m);
        }
        Vec4 fill = vec();
        if (fill.size() != width) fail("fill width mismatch");
        return StateTree::cell(mem_make(*kind, depth, width, fill));
      }
      pos = sym_start;  // not a cell header; re-parse as node children
      (void)save;
    }
    // Node.
    StateTree::Children children;
    while (true) {
      skip_ws();
      if (pos >= text.size()) fail("unbalanced parentheses");
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      children.push_back(parse());
    }
    return StateTree::node(std::move(children));
  }
};

}  // namespace

std::string state_to_string(const StateTree& s) {
  std::ostringstream os;
  print_state(os, s);
  return os.str();
}

StateTree state_from_string(std::string_view text) {
  StateParser p{text};
  StateTree s = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return s;
}

}  // namespace dekit
