#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dekit {

// Four-valued signal domain. X is "unknown", Z is "floating".
enum class Value4 : uint8_t { F = 0, T = 1, X = 2, Z = 3 };

inline constexpr Value4 kAllValues[4] = {Value4::F, Value4::T, Value4::X,
                                         Value4::Z};

// LSB-first vector of four-valued signals; index 0 is bit 0.
using Vec4 = std::vector<Value4>;

// Approximation order: X below everything, T/F/Z pairwise incomparable.
constexpr bool value_approx(Value4 a, Value4 b) {
  return a == Value4::X || a == b;
}

bool vec_approx(const Vec4& u, const Vec4& v);

constexpr bool is_boolean(Value4 v) { return v == Value4::F || v == Value4::T; }
bool is_boolean(const Vec4& v);

// Primitive combinational gates. Arity is fixed per gate; one output each.
enum class GateId : uint8_t {
  Vdd,
  Vss,
  Buf,
  Not,
  And2,
  Or2,
  Nand2,
  Nor2,
  Xor2,
  Xnor2,
  Mux,  // (select, then, else); select = T picks `then`
};

inline constexpr GateId kAllGates[] = {
    GateId::Vdd,  GateId::Vss,  GateId::Buf,  GateId::Not,
    GateId::And2, GateId::Or2,  GateId::Nand2, GateId::Nor2,
    GateId::Xor2, GateId::Xnor2, GateId::Mux};

unsigned gate_arity(GateId g);
std::string_view gate_name(GateId g);
std::optional<GateId> gate_by_name(std::string_view name);

// Boolean function of the gate; args must match arity.
bool gate_bool_apply(GateId g, std::span<const bool> args);

// Monotone extension: Z inputs read as X; the result is the agreement of
// the boolean function over all completions of unknown inputs.
// Never returns Z.
Value4 gate_eval(GateId g, std::span<const Value4> args);

// Returns nullopt for vectors containing X or Z.
std::optional<uint64_t> vec_to_nat(const Vec4& v);

Vec4 nat_to_vec(uint64_t n, unsigned width);

char value_to_char(Value4 v);
std::optional<Value4> value_from_char(char c);

std::string vec_to_string(const Vec4& v);
// Parses a contiguous run of value characters, case-insensitive.
std::optional<Vec4> vec_from_string(std::string_view s);

}  // namespace dekit
