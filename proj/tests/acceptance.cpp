// Acceptance gate: one line per criterion, nonzero exit on any failure.
// argv[1] is the path to the command-line tool (used by the determinism
// criterion).

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "dekit/approx.hpp"
#include "dekit/genlib.hpp"
#include "dekit/minifm.hpp"
#include "json.hpp"

using namespace dekit;

namespace {

std::string g_cli;
int g_failures = 0;

struct Criterion {
  const char* name;
  double limit_ms;
  std::chrono::steady_clock::time_point t0;
  bool ok = true;
  std::string detail;

  Criterion(const char* name, double limit_ms)
      : name(name), limit_ms(limit_ms), t0(std::chrono::steady_clock::now()) {}

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }

  ~Criterion() {
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    if (ms > limit_ms) {
      ok = false;
      if (detail.empty()) detail = "time limit exceeded";
    }
    std::printf("%-4s %s (%.0f ms)%s%s\n", ok ? "pass" : "FAIL", name, ms,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
  }
};

// ---- independent helpers -------------------------------------------------

std::vector<Vec4> approx_completions(const Vec4& v) {
  std::vector<Vec4> out{Vec4{}};
  for (Value4 e : v) {
    std::vector<Value4> opts;
    if (e == Value4::X || e == Value4::Z)
      opts = {Value4::F, Value4::T};
    else
      opts = {e};
    std::vector<Vec4> next;
    for (const Vec4& p : out)
      for (Value4 o : opts) {
        Vec4 q = p;
        q.push_back(o);
        next.push_back(q);
      }
    out = std::move(next);
  }
  return out;
}

// Read oracle: pointwise agreement over every boolean completion of the
// address; STUB cells contribute all-X.
Vec4 oracle_read(const MemTree& m, const Vec4& addr) {
  unsigned w = mem_width(m);
  std::vector<Vec4> seen;
  for (const Vec4& a : approx_completions(addr)) {
    const MemCell& c = mem_cell_at(m, *vec_to_nat(a));
    seen.push_back(c.kind == MemKind::Stub ? Vec4(w, Value4::X) : c.payload);
  }
  Vec4 out = seen.front();
  for (const Vec4& s : seen)
    for (size_t i = 0; i < out.size(); ++i)
      if (out[i] != s[i]) out[i] = Value4::X;
  // Agreement keeps booleans only; an agreed Z still reads as X.
  if (seen.size() > 1)
    for (Value4& e : out)
      if (!is_boolean(e)) e = Value4::X;
  return out;
}

MemTree random_mem(std::mt19937_64& rng, unsigned depth, unsigned width) {
  MemKind kind = static_cast<MemKind>(rng() % 3);
  MemTree m = mem_make(kind, depth, width, Vec4(width, Value4::F));
  for (uint64_t a = 0; a < (uint64_t{1} << depth); ++a) {
    Vec4 p(width);
    for (Value4& e : p) e = kAllValues[rng() % 4];
    m = mem_poke(m, a, p);
  }
  return m;
}

Vec4 random_vec(std::mt19937_64& rng, size_t n) {
  Vec4 v(n);
  for (Value4& e : v) e = kAllValues[rng() % 4];
  return v;
}

// Weakens some positions of a strong artifact to X.
Vec4 weaken_vec(std::mt19937_64& rng, const Vec4& v) {
  Vec4 w = v;
  for (Value4& e : w)
    if (rng() % 3 == 0) e = Value4::X;
  return w;
}

MemTree weaken_mem(std::mt19937_64& rng, const MemTree& m, unsigned depth) {
  MemTree w = m;
  for (uint64_t a = 0; a < (uint64_t{1} << depth); ++a)
    w = mem_poke(w, a, weaken_vec(rng, mem_cell_at(m, a).payload));
  return w;
}

StateTree random_shaped_state(std::mt19937_64& rng, int budget) {
  switch (rng() % (budget > 0 ? 3 : 2)) {
    case 0:
      return StateTree::bit(kAllValues[rng() % 4]);
    case 1:
      return StateTree::cell(random_mem(rng, rng() % 3, 1 + rng() % 3));
    default: {
      StateTree::Children ch;
      for (size_t i = 0, n = rng() % 4; i < n; ++i)
        ch.push_back(random_shaped_state(rng, budget - 1));
      return StateTree::node(std::move(ch));
    }
  }
}

std::string run_command(const std::string& cmd, int& exit_code) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    exit_code = -1;
    return out;
  }
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  int st = pclose(p);
  exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

// ---- criteria ------------------------------------------------------------

void criterion_lattice() {
  Criterion c("gate lattice laws + gate monotonicity (exhaustive)", 1000);
  for (Value4 a : kAllValues) {
    c.require(value_approx(a, a), "reflexivity");
    for (Value4 b : kAllValues) {
      if (value_approx(a, b) && value_approx(b, a))
        c.require(a == b, "antisymmetry");
      for (Value4 d : kAllValues)
        if (value_approx(a, b) && value_approx(b, d))
          c.require(value_approx(a, d), "transitivity");
    }
  }
  // X is the unique bottom; T/F/Z pairwise incomparable.
  for (Value4 a : kAllValues) {
    c.require(value_approx(Value4::X, a), "X below everything");
    for (Value4 b : kAllValues)
      if (a != b && a != Value4::X)
        c.require(!value_approx(a, b), "maximal elements incomparable");
  }
  // Gate monotonicity over all approx-related argument tuples.
  for (GateId g : kAllGates) {
    unsigned ar = gate_arity(g);
    uint64_t tuples = 1;
    for (unsigned i = 0; i < 2 * ar; ++i) tuples *= 4;
    for (uint64_t t = 0; t < tuples; ++t) {
      uint64_t k = t;
      Vec4 weak(ar), strong(ar);
      bool related = true;
      for (unsigned i = 0; i < ar; ++i) {
        weak[i] = kAllValues[k % 4];
        k /= 4;
        strong[i] = kAllValues[k % 4];
        k /= 4;
        related = related && value_approx(weak[i], strong[i]);
      }
      if (!related) continue;
      Value4 w = gate_eval(g, weak), s = gate_eval(g, strong);
      c.require(value_approx(w, s),
                std::string("gate ") + std::string(gate_name(g)));
      c.require(w != Value4::Z && s != Value4::Z, "gates never emit Z");
    }
  }
}

void criterion_s_approx() {
  Criterion c("state approximation laws (10^4 randomized)", 10000);
  std::mt19937_64 rng(101);
  for (int i = 0; i < 10000; ++i) {
    StateTree strong = random_shaped_state(rng, 3);
    size_t slots = state_slot_count(strong);
    std::vector<bool> m1(slots), m2(slots);
    for (size_t k = 0; k < slots; ++k) {
      m2[k] = rng() % 3 == 0;
      m1[k] = m2[k] || rng() % 3 == 0;
    }
    StateTree mid = state_weaken_slots(strong, m2);
    StateTree weak = state_weaken_slots(strong, m1);
    c.require(s_approx(strong, strong), "reflexivity");
    c.require(s_approx(mid, strong) && s_approx(weak, mid), "construction");
    c.require(s_approx(weak, strong), "transitivity");
    if (weak.is_node() && !weak.children().empty())
      c.require(s_approx(state_tail(weak), state_tail(strong)),
                "tail preservation");
  }
}

void criterion_memory() {
  Criterion c("memory oracle suite", 30000);
  std::mt19937_64 rng(202);
  // Exhaustive for depth <= 2, width <= 2 over addresses, write data, we.
  for (unsigned depth = 0; depth <= 2; ++depth)
    for (unsigned width = 1; width <= 2; ++width)
      for (int rep = 0; rep < 24; ++rep) {
        MemTree strong = random_mem(rng, depth, width);
        MemTree weak = weaken_mem(rng, strong, depth);
        c.require(mem_approx(weak, strong), "weaken_mem construction");
        uint64_t addrs = 1;
        for (unsigned i = 0; i < depth; ++i) addrs *= 4;
        uint64_t vals = 1;
        for (unsigned i = 0; i < width; ++i) vals *= 4;
        for (uint64_t ai = 0; ai < addrs; ++ai) {
          Vec4 addr(depth);
          uint64_t k = ai;
          for (unsigned i = 0; i < depth; ++i) {
            addr[i] = kAllValues[k % 4];
            k /= 4;
          }
          c.require(mem_read(strong, addr) == oracle_read(strong, addr),
                    "unknown-address read oracle");
          Vec4 weak_addr = weaken_vec(rng, addr);
          c.require(vec_approx(mem_read(weak, weak_addr),
                               mem_read(strong, addr)),
                    "read monotonicity");
          for (uint64_t vi = 0; vi < vals; ++vi) {
            Vec4 val(width);
            uint64_t kv = vi;
            for (unsigned i = 0; i < width; ++i) {
              val[i] = kAllValues[kv % 4];
              kv /= 4;
            }
            for (Value4 we : kAllValues) {
              MemTree ws = mem_write(strong, addr, val, we);
              c.require(mem_wf(ws, depth, width), "write preserves shape");
              c.require(mem_approx(mem_write(weak, weak_addr,
                                             weaken_vec(rng, val), we),
                                   ws),
                        "write monotonicity");
              if (auto a = vec_to_nat(addr); a && we == Value4::T) {
                const MemCell& cell = mem_cell_at(strong, *a);
                const MemCell& after = mem_cell_at(ws, *a);
                if (cell.kind == MemKind::Ram)
                  c.require(after.payload == val, "read-after-write");
                else
                  c.require(after == cell, "ROM/STUB immutability");
              }
              if (we == Value4::F)
                c.require(ws == strong, "we=F identity");
            }
          }
        }
      }
  // Fuzzed cases for deeper trees.
  for (int i = 0; i < 10000; ++i) {
    unsigned depth = 3 + rng() % 4;  // 3..6
    unsigned width = 1 + rng() % 4;
    MemTree strong = random_mem(rng, depth, width);
    MemTree weak = weaken_mem(rng, strong, depth);
    Vec4 addr = random_vec(rng, depth);
    Vec4 val = random_vec(rng, width);
    Value4 we = kAllValues[rng() % 4];
    c.require(mem_read(strong, addr) == oracle_read(strong, addr),
              "fuzzed read oracle");
    c.require(vec_approx(mem_read(weak, weaken_vec(rng, addr)),
                         mem_read(strong, addr)),
              "fuzzed read monotonicity");
    MemTree ws = mem_write(strong, addr, val, we);
    c.require(mem_wf(ws, depth, width), "fuzzed write shape");
    c.require(mem_approx(mem_write(weak, weaken_vec(rng, addr),
                                   weaken_vec(rng, val), we),
                         ws),
              "fuzzed write monotonicity");
    if (auto a = vec_to_nat(addr); a && we == Value4::T &&
                                   mem_cell_at(strong, *a).kind ==
                                       MemKind::Ram)
      c.require(mem_cell_at(ws, *a).payload == val, "fuzzed read-after-write");
  }
}

void criterion_module_monotonicity() {
  Criterion c("module monotonicity, 1000 trials per module", 60000);
  Builder b;
  build_cpu(b);
  gen_adder(b, 1);
  gen_adder(b, 4);
  gen_adder(b, 8);
  gen_mux(b, 8);
  gen_decoder(b, 4);
  gen_register(b, 8);
  gen_regfile(b, 2, 8);
  Netlist n = b.finalize();
  const char* targets[] = {"ADDER_1",  "ADDER_4", "ADDER_8",     "MUXV_8",
                           "DECODER_4", "REG_8",   "REGFILE_2_8", "MINIFM"};
  for (const char* t : targets) {
    auto at = find_module(n, t);
    c.require(at.has_value(), std::string("missing module ") + t);
    if (!at) continue;
    MonoReport r = check_monotonic(n, *at, 1000, 0.3, 7);
    c.require(r.pass(), std::string(t) + ": " +
                            std::to_string(r.violations.size()) +
                            " violation(s)");
  }
  // Sensitivity: a broken and2 row must be caught with a witness.
  EvalHooks hooks;
  hooks.gate_override =
      [](GateId g, std::span<const Value4> args) -> std::optional<Value4> {
    if (g == GateId::And2 && args[0] == Value4::F && args[1] == Value4::X)
      return Value4::T;
    return std::nullopt;
  };
  auto at = find_module(n, "ADDER_4");
  MonoReport r = check_monotonic(n, *at, 1000, 0.3, 7, &hooks);
  c.require(!r.pass(), "fault injection went undetected");
  if (!r.pass()) {
    const MonoViolation& v = r.violations.front();
    c.require(!v.position.empty() && !v.weak_inputs.empty() &&
                  !v.strong_inputs.empty(),
              "violation lacks a witness");
  }
}

void criterion_adder() {
  Criterion c("adder = integer addition (exhaustive n<=6, random n=32)",
              30000);
  for (unsigned n = 1; n <= 6; ++n) {
    Builder b;
    std::string name = gen_adder(b, n);
    Netlist net = b.finalize();
    size_t at = *find_module(net, name);
    for (uint64_t a = 0; a < (uint64_t{1} << n); ++a)
      for (uint64_t bv = 0; bv < (uint64_t{1} << n); ++bv)
        for (int cin = 0; cin < 2; ++cin) {
          Vec4 in{cin ? Value4::T : Value4::F};
          Vec4 av = nat_to_vec(a, n), bb = nat_to_vec(bv, n);
          in.insert(in.end(), av.begin(), av.end());
          in.insert(in.end(), bb.begin(), bb.end());
          Vec4 out = se(net, at, in, StateTree::node({}));
          c.require(vec_to_nat(out) == a + bv + cin, "exhaustive mismatch");
        }
  }
  Builder b;
  std::string name = gen_adder(b, 32);
  Netlist net = b.finalize();
  size_t at = *find_module(net, name);
  std::mt19937_64 rng(303);
  for (int i = 0; i < 10000; ++i) {
    uint64_t a = rng() & 0xFFFFFFFFu, bv = rng() & 0xFFFFFFFFu;
    int cin = rng() & 1;
    Vec4 in{cin ? Value4::T : Value4::F};
    Vec4 av = nat_to_vec(a, 32), bb = nat_to_vec(bv, 32);
    in.insert(in.end(), av.begin(), av.end());
    in.insert(in.end(), bb.begin(), bb.end());
    c.require(vec_to_nat(se(net, at, in, StateTree::node({}))) == a + bv + cin,
              "random mismatch at n=32");
  }
}

void criterion_cpu() {
  Criterion c("cpu vs behavioral model (500 programs x 64 steps)", 120000);
  EquivReport r = equiv_check(500, 64, 2026);
  c.require(r.pass(), std::to_string(r.mismatches.size()) + " mismatch(es)");
  // decode is a bijection between even words and instructions.
  for (unsigned w = 0; w < 256; ++w) {
    Instr i = decode(nat_to_vec(w, 8));
    c.require(*vec_to_nat(encode(i)) == (w & 0xFEu), "encode(decode) identity");
    c.require(decode(encode(i)) == i, "decode(encode) identity");
  }
}

void criterion_wf_corpus() {
  Criterion c("malformed netlists rejected with the right class", 5000);
  const std::pair<const char*, WfClass> corpus[] = {
      {"(M (A) (O) ((G (O) AND2 (A W))))", WfClass::UseBeforeDef},
      {"(M (A) (O) ((G1 (W) BUF (A)) (G2 (W) NOT (A)) (G3 (O) BUF (W))))",
       WfClass::DuplicateWire},
      {"(M (A) (O) ((G (W) BUF (A)) (G (O) NOT (W))))",
       WfClass::DuplicateOccurrence},
      {"(M (A B C) (O) ((G (O) AND2 (A B C))))", WfClass::ArityMismatch},
      {"(M (A) (O) ((G (O) NOSUCH (A))))", WfClass::UnresolvedRef},
      {"(FIRST (A) (O) ((G (O) BUF (A))))"
       "(SECOND (A) (O) ((G (O) FIRST (A))))",
       WfClass::BackwardRef},
      {"(M (A) (O) ((G (O) M (A))))", WfClass::BackwardRef},
      {"(M (A) (O B) ((G (O) BUF (A))))", WfClass::UndefinedOutput},
  };
  for (const auto& [text, cls] : corpus) {
    auto report = check_wf(parse_netlist(text));
    bool found = false;
    for (const auto& v : report) found = found || v.cls == cls;
    c.require(found, std::string("expected ") + std::string(wf_class_name(cls)));
  }
  // Every generated netlist must be accepted.
  Builder b;
  build_cpu(b);
  for (unsigned n = 1; n <= 8; ++n) {
    gen_adder(b, n);
    gen_mux(b, n);
    gen_register(b, n);
    gen_regfile(b, 2, n);
    if (n <= 6) gen_decoder(b, n);
  }
  c.require(check_wf(b.finalize()).empty(), "generated netlist rejected");
}

void criterion_round_trip() {
  Criterion c("parse/print identity on generated netlists", 5000);
  std::vector<Netlist> nets;
  {
    Builder b;
    build_cpu(b);
    nets.push_back(b.finalize());
  }
  for (unsigned n : {1u, 3u, 8u}) {
    Builder b;
    gen_adder(b, n);
    gen_mux(b, n);
    gen_register(b, n);
    gen_regfile(b, 2, n);
    gen_romfile(b, 2, n);
    nets.push_back(b.finalize());
  }
  for (const Netlist& n : nets) {
    std::string text = print_netlist(n);
    c.require(parse_netlist(text) == n, "round trip changed the netlist");
    c.require(print_netlist(parse_netlist(text)) == text,
              "printing is not a fixed point");
  }
}

void criterion_determinism() {
  Criterion c("identical JSON for repeated seeded runs", 60000);
  if (g_cli.empty()) {
    c.require(false, "no CLI path given");
    return;
  }
  std::string net_path = "accept_adder8.net";
  int code = 0;
  run_command(g_cli + " gen adder --n 8 -o " + net_path, code);
  c.require(code == 0, "gen failed");

  auto strip = [&](const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    j.erase("elapsed_ms");
    return j.dump(2);
  };
  std::string mono_cmd =
      g_cli + " mono " + net_path + " --trials 200 --seed 5 --format json";
  int c1, c2;
  std::string a = run_command(mono_cmd, c1), b = run_command(mono_cmd, c2);
  c.require(c1 == 0 && c2 == 0, "mono exited nonzero");
  c.require(!a.empty() && strip(a) == strip(b), "mono output differs");

  std::string eq_cmd =
      g_cli + " cpu-equiv --programs 5 --steps 8 --seed 9 --format json";
  std::string e1 = run_command(eq_cmd, c1), e2 = run_command(eq_cmd, c2);
  c.require(c1 == 0 && c2 == 0, "cpu-equiv exited nonzero");
  c.require(!e1.empty() && strip(e1) == strip(e2), "cpu-equiv output differs");
  std::remove(net_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  criterion_lattice();
  criterion_s_approx();
  criterion_memory();
  criterion_module_monotonicity();
  criterion_adder();
  criterion_cpu();
  criterion_round_trip();
  criterion_wf_corpus();
  criterion_determinism();
  if (g_failures == 0) {
    std::puts("all acceptance criteria pass");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
