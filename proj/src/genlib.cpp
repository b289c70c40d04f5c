#include "dekit/genlib.hpp"

#include <stdexcept>

namespace dekit {

namespace {

std::string wire(const std::string& base, unsigned i) {
  return base + "_" + std::to_string(i);
}

std::vector<std::string> wires(const std::string& base, unsigned n) {
  std::vector<std::string> v;
  v.reserve(n);
  for (unsigned i = 0; i < n; ++i) v.push_back(wire(base, i));
  return v;
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

void check_width(unsigned n, unsigned limit = kMaxGenWidth) {
  if (n < 1 || n > limit)
    throw std::invalid_argument("generator width out of range");
}

}  // namespace

bool Builder::has(std::string_view name) const {
  for (const ModuleDef& m : modules_)
    if (m.name == name) return true;
  return false;
}

const std::string& Builder::ensure(ModuleDef m) {
  for (const ModuleDef& existing : modules_)
    if (existing.name == m.name) return existing.name;
  modules_.push_back(std::move(m));
  return modules_.back().name;
}

void Builder::add_front(ModuleDef m) {
  modules_.insert(modules_.begin(), std::move(m));
}

Netlist Builder::finalize() const { return Netlist{modules_}; }

std::string gen_pointwise(Builder& b, GateId gate, unsigned n) {
  unsigned arity = gate_arity(gate);
  if (arity != 1 && arity != 2)
    throw std::invalid_argument("gen_pointwise: gate must take 1 or 2 inputs");
  check_width(n);
  std::string name = std::string(gate_name(gate)) + "V_" + std::to_string(n);
  if (b.has(name)) return name;

  ModuleDef m;
  m.name = name;
  m.inputs = wires("A", n);
  if (arity == 2) append(m.inputs, wires("B", n));
  m.outputs = wires("O", n);
  for (unsigned i = 0; i < n; ++i) {
    Occurrence occ;
    occ.name = wire("G", i);
    occ.outputs = {wire("O", i)};
    occ.ref = gate;
    occ.inputs = {wire("A", i)};
    if (arity == 2) occ.inputs.push_back(wire("B", i));
    m.occurrences.push_back(std::move(occ));
  }
  return b.ensure(std::move(m));
}

std::string gen_adder(Builder& b, unsigned n) {
  check_width(n);
  std::string name = "ADDER_" + std::to_string(n);
  if (b.has(name)) return name;

  ModuleDef m;
  m.name = name;
  m.inputs = {"CIN"};
  append(m.inputs, wires("A", n));
  append(m.inputs, wires("B", n));
  m.outputs = wires("S", n);
  m.outputs.push_back("COUT");

  std::string carry = "CIN";
  for (unsigned i = 0; i < n; ++i) {
    std::string p = wire("P", i);   // a xor b
    std::string g = wire("G", i);   // a and b
    std::string t = wire("T", i);   // p and carry
    std::string cout = (i + 1 == n) ? "COUT" : wire("C", i + 1);
    m.occurrences.push_back(
        {wire("XP", i), {p}, GateId::Xor2, {wire("A", i), wire("B", i)}});
    m.occurrences.push_back(
        {wire("XS", i), {wire("S", i)}, GateId::Xor2, {p, carry}});
    m.occurrences.push_back(
        {wire("AG", i), {g}, GateId::And2, {wire("A", i), wire("B", i)}});
    m.occurrences.push_back({wire("AT", i), {t}, GateId::And2, {p, carry}});
    m.occurrences.push_back({wire("OC", i), {cout}, GateId::Or2, {g, t}});
    carry = cout;
  }
  return b.ensure(std::move(m));
}

std::string gen_mux(Builder& b, unsigned n) {
  check_width(n);
  std::string name = "MUXV_" + std::to_string(n);
  if (b.has(name)) return name;

  ModuleDef m;
  m.name = name;
  m.inputs = {"S"};
  append(m.inputs, wires("A", n));
  append(m.inputs, wires("B", n));
  m.outputs = wires("O", n);
  for (unsigned i = 0; i < n; ++i)
    m.occurrences.push_back({wire("M", i),
                             {wire("O", i)},
                             GateId::Mux,
                             {"S", wire("A", i), wire("B", i)}});
  return b.ensure(std::move(m));
}

std::string gen_decoder(Builder& b, unsigned n) {
  if (n < 1 || n > 6)
    throw std::invalid_argument("gen_decoder: n must be in 1..6");
  std::string name = "DECODER_" + std::to_string(n);
  if (b.has(name)) return name;

  ModuleDef m;
  m.name = name;
  m.inputs = wires("A", n);
  unsigned count = 1u << n;
  m.outputs = wires("Y", count);
  for (unsigned i = 0; i < n; ++i)
    m.occurrences.push_back(
        {wire("N", i), {wire("AN", i)}, GateId::Not, {wire("A", i)}});
  for (unsigned j = 0; j < count; ++j) {
    auto literal = [&](unsigned i) {
      return ((j >> i) & 1) ? wire("A", i) : wire("AN", i);
    };
    if (n == 1) {
      m.occurrences.push_back(
          {wire("B", j), {wire("Y", j)}, GateId::Buf, {literal(0)}});
      continue;
    }
    std::string acc = literal(0);
    for (unsigned i = 1; i < n; ++i) {
      std::string out = (i + 1 == n) ? wire("Y", j)
                                     : wire("T" + std::to_string(j), i);
      m.occurrences.push_back({wire("D" + std::to_string(j), i),
                               {out},
                               GateId::And2,
                               {acc, literal(i)}});
      acc = out;
    }
  }
  return b.ensure(std::move(m));
}

std::string gen_register(Builder& b, unsigned n) {
  check_width(n);
  std::string name = "REG_" + std::to_string(n);
  if (b.has(name)) return name;

  ModuleDef m;
  m.name = name;
  m.inputs = {"LOAD"};
  append(m.inputs, wires("D", n));
  m.outputs = wires("Q", n);
  for (unsigned i = 0; i < n; ++i) {
    // FF first so Q feeds the hold path; D is latched after the pass.
    m.occurrences.push_back(
        {wire("FF", i), {wire("Q", i)}, FfRef{}, {wire("M", i)}});
    m.occurrences.push_back({wire("MX", i),
                             {wire("M", i)},
                             GateId::Mux,
                             {"LOAD", wire("D", i), wire("Q", i)}});
  }
  return b.ensure(std::move(m));
}

namespace {

std::string gen_memfile(Builder& b, MemKind kind, unsigned depth,
                        unsigned width, const std::string& prefix) {
  if (depth > 8) throw std::invalid_argument("memfile depth limited to 8");
  check_width(width);
  std::string name =
      prefix + "_" + std::to_string(depth) + "_" + std::to_string(width);
  if (b.has(name)) return name;

  ModuleDef m;
  m.name = name;
  m.inputs = {"WE"};
  append(m.inputs, wires("A", depth));
  append(m.inputs, wires("D", width));
  m.outputs = wires("Q", width);
  Occurrence occ;
  occ.name = "MEM";
  occ.outputs = m.outputs;
  occ.ref = MemRef{kind, depth, width};
  occ.inputs = m.inputs;
  m.occurrences.push_back(std::move(occ));
  return b.ensure(std::move(m));
}

}  // namespace

std::string gen_regfile(Builder& b, unsigned depth, unsigned width) {
  return gen_memfile(b, MemKind::Ram, depth, width, "REGFILE");
}

std::string gen_romfile(Builder& b, unsigned depth, unsigned width) {
  return gen_memfile(b, MemKind::Rom, depth, width, "ROMFILE");
}

}  // namespace dekit
