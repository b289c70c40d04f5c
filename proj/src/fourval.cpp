#include "dekit/fourval.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace dekit {

bool vec_approx(const Vec4& u, const Vec4& v) {
  if (u.size() != v.size()) return false;
  for (size_t i = 0; i < u.size(); ++i)
    if (!value_approx(u[i], v[i])) return false;
  return true;
}

bool is_boolean(const Vec4& v) {
  for (Value4 e : v)
    if (!is_boolean(e)) return false;
  return true;
}

namespace {

struct GateInfo {
  GateId id;
  std::string_view name;
  unsigned arity;
};

constexpr std::array<GateInfo, 11> kGateTable = {{
    {GateId::Vdd, "VDD", 0},
    {GateId::Vss, "VSS", 0},
    {GateId::Buf, "BUF", 1},
    {GateId::Not, "NOT", 1},
    {GateId::And2, "AND2", 2},
    {GateId::Or2, "OR2", 2},
    {GateId::Nand2, "NAND2", 2},
    {GateId::Nor2, "NOR2", 2},
    {GateId::Xor2, "XOR2", 2},
    {GateId::Xnor2, "XNOR2", 2},
    {GateId::Mux, "MUX", 3},
}};

const GateInfo& info(GateId g) { return kGateTable[static_cast<size_t>(g)]; }

}  // namespace

unsigned gate_arity(GateId g) { return info(g).arity; }

std::string_view gate_name(GateId g) { return info(g).name; }

std::optional<GateId> gate_by_name(std::string_view name) {
  for (const GateInfo& gi : kGateTable)
    if (gi.name == name) return gi.id;
  return std::nullopt;
}

bool gate_bool_apply(GateId g, std::span<const bool> args) {
  if (args.size() != gate_arity(g))
    throw std::invalid_argument("gate arity mismatch");
  switch (g) {
    case GateId::Vdd: return true;
    case GateId::Vss: return false;
    case GateId::Buf: return args[0];
    case GateId::Not: return !args[0];
    case GateId::And2: return args[0] && args[1];
    case GateId::Or2: return args[0] || args[1];
    case GateId::Nand2: return !(args[0] && args[1]);
    case GateId::Nor2: return !(args[0] || args[1]);
    case GateId::Xor2: return args[0] != args[1];
    case GateId::Xnor2: return args[0] == args[1];
    case GateId::Mux: return args[0] ? args[1] : args[2];
  }
  throw std::logic_error("bad GateId");
}

Value4 gate_eval(GateId g, std::span<const Value4> args) {
  const unsigned arity = gate_arity(g);
  if (args.size() != arity)
    throw std::invalid_argument("gate arity mismatch for " +
                                std::string(gate_name(g)));
  // Z reads as X; then enumerate completions of the unknown inputs.
  std::array<bool, 3> fixed{};
  std::vector<unsigned> unknown;
  for (unsigned i = 0; i < arity; ++i) {
    if (is_boolean(args[i]))
      fixed[i] = (args[i] == Value4::T);
    else
      unknown.push_back(i);
  }
  bool agreed = false;
  bool first = true;
  for (uint64_t mask = 0; mask < (uint64_t{1} << unknown.size()); ++mask) {
    std::array<bool, 3> a = fixed;
    for (size_t k = 0; k < unknown.size(); ++k)
      a[unknown[k]] = (mask >> k) & 1;
    bool r = gate_bool_apply(g, std::span<const bool>(a.data(), arity));
    if (first) {
      agreed = r;
      first = false;
    } else if (r != agreed) {
      return Value4::X;
    }
  }
  return agreed ? Value4::T : Value4::F;
}

std::optional<uint64_t> vec_to_nat(const Vec4& v) {
  uint64_t n = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!is_boolean(v[i])) return std::nullopt;
    if (v[i] == Value4::T) n |= uint64_t{1} << i;
  }
  return n;
}

Vec4 nat_to_vec(uint64_t n, unsigned width) {
  Vec4 v(width, Value4::F);
  for (unsigned i = 0; i < width && i < 64; ++i)
    if ((n >> i) & 1) v[i] = Value4::T;
  return v;
}

char value_to_char(Value4 v) {
  switch (v) {
    case Value4::F: return 'F';
    case Value4::T: return 'T';
    case Value4::X: return 'X';
    case Value4::Z: return 'Z';
  }
  return '?';
}

std::optional<Value4> value_from_char(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'F': return Value4::F;
    case 'T': return Value4::T;
    case 'X': return Value4::X;
    case 'Z': return Value4::Z;
    default: return std::nullopt;
  }
}

std::string vec_to_string(const Vec4& v) {
  std::string s;
  s.reserve(v.size());
  for (Value4 e : v) s.push_back(value_to_char(e));
  return s;
}

std::optional<Vec4> vec_from_string(std::string_view s) {
  Vec4 v;
  v.reserve(s.size());
  for (char c : s) {
    auto e = value_from_char(c);
    if (!e) return std::nullopt;
    v.push_back(*e);
  }
  return v;
}

}  // namespace dekit
