#pragma once

#include "dekit/eval.hpp"
#include "dekit/genlib.hpp"

namespace dekit {

// Programmer-visible state of the mini machine. Behavioral execution keeps
// every field boolean.
struct ArchState {
  Vec4 pc;       // width 6, word address into prog
  MemTree regs;  // RAM, depth 2, width 8
  Value4 z = Value4::F;
  Value4 c = Value4::F;
  MemTree prog;  // ROM, depth 6, width 8

  bool operator==(const ArchState&) const = default;
};

enum class Opcode : uint8_t {
  Add = 0,
  And = 1,
  Or = 2,
  Xor = 3,
  Not = 4,
  Mov = 5,
  Ldi = 6,
  Bz = 7,
};

std::string_view opcode_name(Opcode op);

// 8-bit encoding: bits [7:5] op, [4:3] rd, [2:1] ra, [0] zero.
// BZ reuses bits [4:1] as a signed offset.
struct Instr {
  Opcode op = Opcode::Add;
  unsigned rd = 0;  // 0..3
  unsigned ra = 0;  // 0..3
  int offset = 0;   // BZ only, -8..7

  bool operator==(const Instr&) const = default;
};

Vec4 encode(const Instr& i);
Instr decode(const Vec4& w);

// Zeroed architectural state (pc 0, registers 0, program ROM all zero).
ArchState arch_zero();

// The behavioral specification: one instruction.
ArchState isa_step(const ArchState& a);

// Emits the MINIFM top module (front of the builder) plus the generator
// modules it instantiates. Input: RESET. Outputs: PC_0..PC_5.
// One instruction takes two evaluator cycles: fetch then execute.
std::string build_cpu(Builder& b);

// Abstraction map between netlist state and architectural state. Requires
// wf_state and the phase flip-flop at F (instruction boundary).
ArchState project(const StateTree& s);
StateTree inject(const ArchState& a);

struct EquivMismatch {
  uint64_t program;
  uint64_t step;
  std::string field;                 // pc | z | c | regs | prog
  std::string expected;
  std::string actual;
  std::string program_image;        // memory-image text of the ROM
};

struct EquivReport {
  uint64_t programs = 0;
  uint64_t steps = 0;
  uint64_t seed = 0;
  std::vector<EquivMismatch> mismatches;
  double elapsed_ms = 0;

  bool pass() const { return mismatches.empty(); }
};

// Random programs and start states; per step asserts that projecting the
// netlist after two cycles equals one behavioral step.
EquivReport equiv_check(uint64_t programs, uint64_t steps, uint64_t seed);

// Tiny assembler: one instruction per line ("ADD R0,R1", "LDI R2,#3",
// "BZ -2"), ';' comments. Produces memory-image text for the program ROM.
std::string assemble(std::string_view text);

}  // namespace dekit
