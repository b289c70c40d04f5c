#include "dekit/minifm.hpp"

#include <cctype>
#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dekit {

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Add: return "ADD";
    case Opcode::And: return "AND";
    case Opcode::Or: return "OR";
    case Opcode::Xor: return "XOR";
    case Opcode::Not: return "NOT";
    case Opcode::Mov: return "MOV";
    case Opcode::Ldi: return "LDI";
    case Opcode::Bz: return "BZ";
  }
  return "?";
}

Vec4 encode(const Instr& i) {
  unsigned op = static_cast<unsigned>(i.op);
  unsigned mid;
  if (i.op == Opcode::Bz) {
    if (i.offset < -8 || i.offset > 7)
      throw std::invalid_argument("encode: BZ offset out of range");
    mid = static_cast<unsigned>(i.offset & 0xF);
  } else {
    if (i.rd > 3 || i.ra > 3)
      throw std::invalid_argument("encode: register out of range");
    mid = (i.rd << 2) | i.ra;
  }
  return nat_to_vec((op << 5) | (mid << 1), 8);
}

Instr decode(const Vec4& w) {
  if (w.size() != 8 || !is_boolean(w))
    throw std::invalid_argument("decode: expected a boolean 8-bit word");
  unsigned n = static_cast<unsigned>(*vec_to_nat(w));
  Instr i;
  i.op = static_cast<Opcode>((n >> 5) & 7);
  if (i.op == Opcode::Bz) {
    unsigned off = (n >> 1) & 0xF;
    i.offset = static_cast<int>(off) - ((off & 8) ? 16 : 0);
  } else {
    i.rd = (n >> 3) & 3;
    i.ra = (n >> 1) & 3;
  }
  return i;
}

ArchState arch_zero() {
  ArchState a;
  a.pc = nat_to_vec(0, 6);
  a.regs = mem_make(MemKind::Ram, 2, 8, Vec4(8, Value4::F));
  a.prog = mem_make(MemKind::Rom, 6, 8, Vec4(8, Value4::F));
  return a;
}

ArchState isa_step(const ArchState& a) {
  if (!is_boolean(a.pc) || !is_boolean(a.z) || !is_boolean(a.c))
    throw std::invalid_argument("isa_step: state must be boolean");
  Instr i = decode(mem_read(a.prog, a.pc));

  auto reg = [&](unsigned r) -> unsigned {
    auto v = vec_to_nat(mem_cell_at(a.regs, r).payload);
    if (!v) throw std::invalid_argument("isa_step: non-boolean register");
    return static_cast<unsigned>(*v);
  };

  ArchState next = a;
  unsigned pc = static_cast<unsigned>(*vec_to_nat(a.pc));
  unsigned pc_next = (pc + 1) & 63;

  if (i.op == Opcode::Bz) {
    if (a.z == Value4::T)
      pc_next = (pc + 1 + static_cast<unsigned>(i.offset)) & 63;
  } else {
    unsigned rd = reg(i.rd);
    unsigned ra = reg(i.ra);
    unsigned result = 0;
    switch (i.op) {
      case Opcode::Add: {
        unsigned sum = rd + ra;
        result = sum & 0xFF;
        next.c = (sum > 0xFF) ? Value4::T : Value4::F;
        break;
      }
      case Opcode::And: result = rd & ra; break;
      case Opcode::Or: result = rd | ra; break;
      case Opcode::Xor: result = rd ^ ra; break;
      case Opcode::Not: result = (~ra) & 0xFF; break;
      case Opcode::Mov: result = ra; break;
      case Opcode::Ldi: result = i.ra; break;
      case Opcode::Bz: break;
    }
    next.regs = mem_write(a.regs, nat_to_vec(i.rd, 2), nat_to_vec(result, 8),
                          Value4::T);
    next.z = (result == 0) ? Value4::T : Value4::F;
  }
  next.pc = nat_to_vec(pc_next, 6);
  return next;
}

namespace {

std::string wn(const std::string& base, unsigned i) {
  return base + "_" + std::to_string(i);
}

std::vector<std::string> wns(const std::string& base, unsigned n) {
  std::vector<std::string> v;
  for (unsigned i = 0; i < n; ++i) v.push_back(wn(base, i));
  return v;
}

std::vector<std::string> cat(std::vector<std::string> a,
                             const std::vector<std::string>& bparts) {
  a.insert(a.end(), bparts.begin(), bparts.end());
  return a;
}

}  // namespace

std::string build_cpu(Builder& b) {
  if (b.has("MINIFM")) return "MINIFM";

  std::string adder8 = gen_adder(b, 8);
  std::string adder6 = gen_adder(b, 6);
  std::string mux8 = gen_mux(b, 8);
  std::string mux6 = gen_mux(b, 6);
  std::string dec3 = gen_decoder(b, 3);
  std::string andv = gen_pointwise(b, GateId::And2, 8);
  std::string orv = gen_pointwise(b, GateId::Or2, 8);
  std::string xorv = gen_pointwise(b, GateId::Xor2, 8);
  std::string notv = gen_pointwise(b, GateId::Not, 8);

  ModuleDef m;
  m.name = "MINIFM";
  m.inputs = {"RESET"};
  m.outputs = wns("PC", 6);

  auto occ = [&](std::string name, std::vector<std::string> outs, Ref ref,
                 std::vector<std::string> ins) {
    m.occurrences.push_back(
        {std::move(name), std::move(outs), std::move(ref), std::move(ins)});
  };

  occ("K0", {"ZERO"}, GateId::Vss, {});
  occ("K1", {"ONE"}, GateId::Vdd, {});

  // Architectural and pipeline flip-flops; D wires resolve after the pass.
  occ("FPH", {"PHASE"}, FfRef{}, {"PHASE_NXT"});
  for (unsigned i = 0; i < 6; ++i)
    occ(wn("FPC", i), {wn("PC", i)}, FfRef{}, {wn("PC_NXT", i)});
  occ("FZ", {"Z"}, FfRef{}, {"Z_NXT"});
  occ("FC", {"C"}, FfRef{}, {"C_NXT"});
  for (unsigned i = 0; i < 8; ++i)
    occ(wn("FIR", i), {wn("IR", i)}, FfRef{}, {wn("IR_NXT", i)});
  for (unsigned i = 0; i < 8; ++i)
    occ(wn("FOP", i), {wn("OPL", i)}, FfRef{}, {wn("OPL_NXT", i)});

  // Program store, addressed by pc every cycle.
  occ("UPROG", wns("FW", 8), MemRef{MemKind::Rom, 6, 8},
      cat(cat({"ZERO"}, wns("PC", 6)), std::vector<std::string>(8, "ZERO")));

  // Register file address: ra of the fetched word during fetch, rd of the
  // held instruction during execute.
  occ("MRA0", {"RA_0"}, GateId::Mux, {"PHASE", "IR_3", "FW_1"});
  occ("MRA1", {"RA_1"}, GateId::Mux, {"PHASE", "IR_4", "FW_2"});
  occ("UREGS", wns("RD", 8), MemRef{MemKind::Ram, 2, 8},
      cat({"RWE", "RA_0", "RA_1"}, wns("RES", 8)));

  // Decode and ALU (execute-phase view: RD = rd value, OPL = ra value).
  occ("UDEC", wns("OPH", 8), dec3, {"IR_5", "IR_6", "IR_7"});
  occ("UADD", cat(wns("SUM", 8), {"ADDC"}), adder8,
      cat(cat({"ZERO"}, wns("RD", 8)), wns("OPL", 8)));
  occ("UAND", wns("ANDW", 8), andv, cat(wns("RD", 8), wns("OPL", 8)));
  occ("UOR", wns("ORW", 8), orv, cat(wns("RD", 8), wns("OPL", 8)));
  occ("UXOR", wns("XORW", 8), xorv, cat(wns("RD", 8), wns("OPL", 8)));
  occ("UNOT", wns("NOTW", 8), notv, wns("OPL", 8));

  // Result select by opcode bits (IR_5 = bit 0 of the opcode).
  std::vector<std::string> imm = {"IR_1", "IR_2", "ZERO", "ZERO",
                                  "ZERO", "ZERO", "ZERO", "ZERO"};
  std::vector<std::string> dontcare(8, "ZERO");
  occ("UM01", wns("P01", 8), mux8,
      cat(cat({"IR_5"}, wns("ANDW", 8)), wns("SUM", 8)));
  occ("UM23", wns("P23", 8), mux8,
      cat(cat({"IR_5"}, wns("XORW", 8)), wns("ORW", 8)));
  occ("UM45", wns("P45", 8), mux8,
      cat(cat({"IR_5"}, wns("OPL", 8)), wns("NOTW", 8)));
  occ("UM67", wns("P67", 8), mux8, cat(cat({"IR_5"}, dontcare), imm));
  occ("UQ03", wns("Q03", 8), mux8,
      cat(cat({"IR_6"}, wns("P23", 8)), wns("P01", 8)));
  occ("UQ47", wns("Q47", 8), mux8,
      cat(cat({"IR_6"}, wns("P67", 8)), wns("P45", 8)));
  occ("URES", wns("RES", 8), mux8,
      cat(cat({"IR_7"}, wns("Q47", 8)), wns("Q03", 8)));

  // Zero flag of the result.
  occ("OZ1", {"ZT_1"}, GateId::Or2, {"RES_0", "RES_1"});
  for (unsigned k = 2; k < 8; ++k)
    occ(wn("OZ", k), {wn("ZT", k)}, GateId::Or2, {wn("ZT", k - 1), wn("RES", k)});
  occ("NZ", {"Z_NEW"}, GateId::Not, {"ZT_7"});

  occ("NP7", {"NOP7W"}, GateId::Not, {"OPH_7"});
  occ("ATK", {"TAKEN"}, GateId::And2, {"OPH_7", "Z"});
  occ("NRS", {"NRSTW"}, GateId::Not, {"RESET"});

  // pc + 1, branch target, and the next pc.
  occ("UPCI", cat(wns("PP", 6), {"PPC"}), adder6,
      cat(cat({"ONE"}, wns("PC", 6)), std::vector<std::string>(6, "ZERO")));
  std::vector<std::string> off = {"IR_1", "IR_2", "IR_3",
                                  "IR_4", "IR_4", "IR_4"};
  occ("UPCT", cat(wns("TG", 6), {"TGC"}), adder6,
      cat(cat({"ZERO"}, wns("PP", 6)), off));
  occ("UPCE", wns("PCE", 6), mux6,
      cat(cat({"TAKEN"}, wns("TG", 6)), wns("PP", 6)));
  occ("UPCS", wns("PCS", 6), mux6,
      cat(cat({"PHASE"}, wns("PCE", 6)), wns("PC", 6)));
  for (unsigned i = 0; i < 6; ++i)
    occ(wn("APC", i), {wn("PC_NXT", i)}, GateId::And2, {"NRSTW", wn("PCS", i)});

  // Phase toggles; reset forces it (and pc/z/c) to the fetch phase.
  occ("NPH", {"PHT"}, GateId::Not, {"PHASE"});
  occ("APN", {"PHASE_NXT"}, GateId::And2, {"NRSTW", "PHT"});

  occ("AZL", {"Z_LOAD"}, GateId::And2, {"PHASE", "NOP7W"});
  occ("MZC", {"Z_CAND"}, GateId::Mux, {"Z_LOAD", "Z_NEW", "Z"});
  occ("AZN", {"Z_NXT"}, GateId::And2, {"NRSTW", "Z_CAND"});

  occ("ACL", {"C_LOAD"}, GateId::And2, {"PHASE", "OPH_0"});
  occ("MCC", {"C_CAND"}, GateId::Mux, {"C_LOAD", "ADDC", "C"});
  occ("ACN", {"C_NXT"}, GateId::And2, {"NRSTW", "C_CAND"});

  // Fetch phase captures the instruction and the ra operand.
  occ("UIRN", wns("IR_NXT", 8), mux8,
      cat(cat({"PHASE"}, wns("IR", 8)), wns("FW", 8)));
  occ("UOPN", wns("OPL_NXT", 8), mux8,
      cat(cat({"PHASE"}, wns("OPL", 8)), wns("RD", 8)));

  occ("AW1", {"WT1"}, GateId::And2, {"NOP7W", "NRSTW"});
  occ("AW2", {"RWE"}, GateId::And2, {"PHASE", "WT1"});

  b.add_front(std::move(m));
  return "MINIFM";
}

namespace {

// State-child layout of MINIFM, by stateful occurrence order.
constexpr size_t kPhase = 0;
constexpr size_t kPcBase = 1;
constexpr size_t kZ = 7;
constexpr size_t kC = 8;
constexpr size_t kIrBase = 9;
constexpr size_t kOplBase = 17;
constexpr size_t kProg = 25;
constexpr size_t kRegs = 26;
constexpr size_t kStateChildren = 27;

}  // namespace

ArchState project(const StateTree& s) {
  if (!s.is_node() || s.children().size() != kStateChildren)
    throw std::invalid_argument("project: not a MINIFM state");
  const auto& ch = s.children();
  if (ch[kPhase].bit_value() != Value4::F)
    throw std::invalid_argument("project: mid-instruction state");
  ArchState a;
  a.pc.resize(6);
  for (unsigned i = 0; i < 6; ++i) a.pc[i] = ch[kPcBase + i].bit_value();
  a.z = ch[kZ].bit_value();
  a.c = ch[kC].bit_value();
  a.prog = ch[kProg].cell_tree();
  a.regs = ch[kRegs].cell_tree();
  return a;
}

StateTree inject(const ArchState& a) {
  StateTree::Children ch(kStateChildren, StateTree::bit(Value4::F));
  ch[kPhase] = StateTree::bit(Value4::F);
  for (unsigned i = 0; i < 6; ++i) ch[kPcBase + i] = StateTree::bit(a.pc[i]);
  ch[kZ] = StateTree::bit(a.z);
  ch[kC] = StateTree::bit(a.c);
  ch[kProg] = StateTree::cell(a.prog);
  ch[kRegs] = StateTree::cell(a.regs);
  return StateTree::node(std::move(ch));
}

namespace {

std::string mem_image_text(const MemTree& m) {
  std::ostringstream os;
  unsigned depth = mem_depth(m);
  for (uint64_t i = 0; i < (uint64_t{1} << depth); ++i)
    os << i << ' ' << vec_to_string(mem_cell_at(m, i).payload) << '\n';
  return os.str();
}

}  // namespace

EquivReport equiv_check(uint64_t programs, uint64_t steps, uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  EquivReport report;
  report.programs = programs;
  report.steps = steps;
  report.seed = seed;

  Builder b;
  build_cpu(b);
  Netlist n = b.finalize();
  size_t top = *find_module(n, "MINIFM");
  const Vec4 no_reset = {Value4::F};

  for (uint64_t p = 0; p < programs; ++p) {
    std::mt19937_64 rng(seed + p * 0x9E3779B97F4A7C15ULL + 1);
    auto byte = [&] { return static_cast<unsigned>(rng() & 0xFF); };

    ArchState arch = arch_zero();
    arch.pc = nat_to_vec(rng() & 63, 6);
    arch.z = (rng() & 1) ? Value4::T : Value4::F;
    arch.c = (rng() & 1) ? Value4::T : Value4::F;
    for (uint64_t r = 0; r < 4; ++r)
      arch.regs = mem_poke(arch.regs, r, nat_to_vec(byte(), 8));
    for (uint64_t w = 0; w < 64; ++w)
      arch.prog = mem_poke(arch.prog, w, nat_to_vec(byte(), 8));

    StateTree s = inject(arch);
    for (uint64_t step = 0; step < steps; ++step) {
      ArchState expected = isa_step(arch);
      s = de(n, top, no_reset, s);
      s = de(n, top, no_reset, s);
      ArchState actual = project(s);

      std::string field;
      std::string exp_text, act_text;
      if (actual.pc != expected.pc) {
        field = "pc";
        exp_text = vec_to_string(expected.pc);
        act_text = vec_to_string(actual.pc);
      } else if (actual.z != expected.z) {
        field = "z";
        exp_text = std::string(1, value_to_char(expected.z));
        act_text = std::string(1, value_to_char(actual.z));
      } else if (actual.c != expected.c) {
        field = "c";
        exp_text = std::string(1, value_to_char(expected.c));
        act_text = std::string(1, value_to_char(actual.c));
      } else if (!(actual.regs == expected.regs)) {
        field = "regs";
        exp_text = mem_image_text(expected.regs);
        act_text = mem_image_text(actual.regs);
      } else if (!(actual.prog == expected.prog)) {
        field = "prog";
        exp_text = "(unchanged rom)";
        act_text = "(modified rom)";
      }
      if (!field.empty()) {
        report.mismatches.push_back({p, step, field, exp_text, act_text,
                                     mem_image_text(arch.prog)});
        break;
      }
      arch = expected;
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return report;
}

std::string assemble(std::string_view text) {
  std::ostringstream out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  uint64_t addr = 0;

  auto fail = [&](const std::string& msg) -> void {
    throw std::invalid_argument("assemble: line " + std::to_string(lineno) +
                                ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto sc = line.find(';'); sc != std::string::npos) line.resize(sc);
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    std::istringstream ls(line);
    std::string mnemonic;
    if (!(ls >> mnemonic)) continue;

    Instr i;
    auto reg = [&](const std::string& tok) -> unsigned {
      if (tok.size() != 2 || tok[0] != 'R' || tok[1] < '0' || tok[1] > '3')
        fail("bad register '" + tok + "'");
      return static_cast<unsigned>(tok[1] - '0');
    };

    if (mnemonic == "BZ") {
      i.op = Opcode::Bz;
      int off;
      if (!(ls >> off)) fail("BZ needs an offset");
      if (off < -8 || off > 7) fail("BZ offset out of range");
      i.offset = off;
    } else if (mnemonic == "LDI") {
      i.op = Opcode::Ldi;
      std::string rd, imm;
      if (!(ls >> rd >> imm)) fail("LDI needs rd and #imm");
      i.rd = reg(rd);
      if (imm.empty() || imm[0] != '#') fail("LDI immediate must start with #");
      int v = std::stoi(imm.substr(1));
      if (v < 0 || v > 3) fail("LDI immediate out of range (0..3)");
      i.ra = static_cast<unsigned>(v);
    } else {
      static const std::pair<std::string_view, Opcode> table[] = {
          {"ADD", Opcode::Add}, {"AND", Opcode::And}, {"OR", Opcode::Or},
          {"XOR", Opcode::Xor}, {"NOT", Opcode::Not}, {"MOV", Opcode::Mov}};
      const Opcode* op = nullptr;
      for (const auto& [name, code] : table)
        if (mnemonic == name) op = &code;
      if (!op) fail("unknown mnemonic '" + mnemonic + "'");
      i.op = *op;
      std::string rd, ra;
      if (!(ls >> rd >> ra)) fail("expected two registers");
      i.rd = reg(rd);
      i.ra = reg(ra);
    }
    if (addr >= 64) fail("program too long (max 64 words)");
    out << addr << ' ' << vec_to_string(encode(i)) << '\n';
    ++addr;
  }
  return out.str();
}

}  // namespace dekit
