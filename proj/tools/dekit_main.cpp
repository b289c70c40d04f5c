#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dekit/approx.hpp"
#include "dekit/genlib.hpp"
#include "dekit/minifm.hpp"
#include "json.hpp"

namespace {

using dekit::Netlist;
using dekit::StateShape;
using dekit::StateTree;
using dekit::Value4;
using dekit::Vec4;
using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

Netlist load_checked(const std::string& path) {
  Netlist n = dekit::parse_netlist(slurp(path));
  auto report = dekit::check_wf(n);
  if (!report.empty()) {
    std::ostringstream os;
    os << path << ": netlist is not well-formed:";
    for (const auto& v : report)
      os << "\n  [" << dekit::wf_class_name(v.cls) << "] " << v.module << "/"
         << v.where << ": " << v.message;
    throw std::runtime_error(os.str());
  }
  return n;
}

size_t top_index(const Netlist& n, const std::string& top) {
  if (top.empty()) {
    if (n.modules.empty()) throw std::runtime_error("netlist has no modules");
    return 0;
  }
  auto at = dekit::find_module(n, top);
  if (!at) throw std::runtime_error("no module named '" + top + "'");
  return *at;
}

int cmd_check(const std::string& path) {
  Netlist n = dekit::parse_netlist(slurp(path));
  auto report = dekit::check_wf(n);
  for (const auto& v : report)
    std::cout << "[" << dekit::wf_class_name(v.cls) << "] " << v.module << "/"
              << v.where << ": " << v.message << "\n";
  if (report.empty()) {
    std::cout << "ok: " << n.modules.size() << " module(s) well-formed\n";
    return 0;
  }
  return 1;
}

// Applies a memory image to the first memory leaf of the state.
StateTree apply_mem_init(const StateTree& s, const StateShape& shape,
                         const std::string& image, bool& done) {
  if (done) return s;
  if (shape.is_mem()) {
    const dekit::MemRef& d = shape.mem_ref();
    done = true;
    return StateTree::cell(dekit::mem_from_image(
        d.kind, d.depth, d.width, Vec4(d.width, Value4::F), image));
  }
  if (!shape.is_node()) return s;
  StateTree::Children ch = s.children();
  for (size_t i = 0; i < ch.size() && !done; ++i)
    ch[i] = apply_mem_init(ch[i], shape.children()[i], image, done);
  return StateTree::node(std::move(ch));
}

int cmd_sim(const std::string& path, const std::string& top,
            const std::string& stim_path, const std::string& state_path,
            const std::string& mem_init_path) {
  Netlist n = load_checked(path);
  size_t at = top_index(n, top);
  StateShape shape = dekit::state_shape(n, at);

  StateTree s = state_path.empty()
                    ? dekit::fill_state(shape, Value4::F)
                    : dekit::state_from_string(slurp(state_path));
  if (!dekit::wf_state(s, shape))
    throw std::runtime_error("state does not match the module's state shape");
  if (!mem_init_path.empty()) {
    bool done = false;
    s = apply_mem_init(s, shape, slurp(mem_init_path), done);
    if (!done)
      throw std::runtime_error("--mem-init given but the module has no memory");
  }

  std::istringstream stim(slurp(stim_path));
  std::string line;
  int lineno = 0;
  while (std::getline(stim, line)) {
    ++lineno;
    if (auto sc = line.find(';'); sc != std::string::npos) line.resize(sc);
    while (!line.empty() && std::isspace((unsigned char)line.back()))
      line.pop_back();
    if (line.empty()) continue;
    auto in = dekit::vec_from_string(line);
    if (!in || in->size() != n.modules[at].inputs.size())
      throw std::runtime_error("stimulus line " + std::to_string(lineno) +
                               ": expected " +
                               std::to_string(n.modules[at].inputs.size()) +
                               " value characters");
    std::cout << dekit::vec_to_string(dekit::se(n, at, *in, s)) << "\n";
    s = dekit::de(n, at, *in, s);
  }
  std::cerr << "final state: " << dekit::state_to_string(s) << "\n";
  return 0;
}

ordered_json mono_to_json(const dekit::MonoReport& r) {
  ordered_json j;
  j["command"] = "mono";
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["pass"] = r.pass();
  j["violations"] = ordered_json::array();
  for (const auto& v : r.violations) {
    ordered_json w;
    w["trial"] = v.trial;
    w["kind"] = v.kind;
    w["module"] = r.module;
    w["position"] = v.position;
    w["witness"] = {{"weak_inputs", v.weak_inputs},
                    {"strong_inputs", v.strong_inputs},
                    {"weak_state", v.weak_state},
                    {"strong_state", v.strong_state}};
    j["violations"].push_back(std::move(w));
  }
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

void print_mono_text(const dekit::MonoReport& r) {
  std::cout << "module " << r.module << ": " << r.trials << " trials, seed "
            << r.seed << ", " << r.violations.size() << " violation(s)"
            << (r.pass() ? " [pass]" : " [FAIL]") << "\n";
  for (const auto& v : r.violations) {
    std::cout << "  trial " << v.trial << " (" << v.kind << ") at "
              << v.position << "\n"
              << "    weak inputs:   " << v.weak_inputs << "\n"
              << "    strong inputs: " << v.strong_inputs << "\n"
              << "    weak state:    " << v.weak_state << "\n"
              << "    strong state:  " << v.strong_state << "\n";
  }
}

int cmd_mono(const std::string& path, const std::string& top, uint64_t trials,
             uint64_t seed, double p, const std::string& format) {
  Netlist n = load_checked(path);
  size_t at = top_index(n, top);
  dekit::MonoReport r = dekit::check_monotonic(n, at, trials, p, seed);
  if (format == "json")
    std::cout << mono_to_json(r).dump(2) << "\n";
  else
    print_mono_text(r);
  return r.pass() ? 0 : 1;
}

ordered_json equiv_to_json(const dekit::EquivReport& r) {
  ordered_json j;
  j["command"] = "cpu-equiv";
  j["seed"] = r.seed;
  j["trials"] = r.programs;
  j["pass"] = r.pass();
  j["violations"] = ordered_json::array();
  for (const auto& m : r.mismatches) {
    ordered_json w;
    w["trial"] = m.program;
    w["kind"] = "step-" + std::to_string(m.step);
    w["module"] = "MINIFM";
    w["position"] = m.field;
    w["witness"] = {{"expected", m.expected},
                    {"actual", m.actual},
                    {"program", m.program_image}};
    j["violations"].push_back(std::move(w));
  }
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

int cmd_equiv(uint64_t programs, uint64_t steps, uint64_t seed,
              const std::string& format) {
  dekit::EquivReport r = dekit::equiv_check(programs, steps, seed);
  if (format == "json") {
    std::cout << equiv_to_json(r).dump(2) << "\n";
  } else {
    std::cout << "cpu-equiv: " << r.programs << " programs x " << r.steps
              << " steps, seed " << r.seed << ", " << r.mismatches.size()
              << " mismatch(es)" << (r.pass() ? " [pass]" : " [FAIL]") << "\n";
    for (const auto& m : r.mismatches)
      std::cout << "  program " << m.program << " step " << m.step
                << " field " << m.field << ": expected " << m.expected
                << ", got " << m.actual << "\n";
  }
  return r.pass() ? 0 : 1;
}

int cmd_gen(const std::string& what, unsigned width, unsigned depth,
            unsigned mem_width, const std::string& out_path) {
  dekit::Builder b;
  if (what == "adder") {
    dekit::gen_adder(b, width);
  } else if (what == "mux") {
    dekit::gen_mux(b, width);
  } else if (what == "decoder") {
    dekit::gen_decoder(b, width);
  } else if (what == "register") {
    dekit::gen_register(b, width);
  } else if (what == "regfile") {
    dekit::gen_regfile(b, depth, mem_width);
  } else if (what == "romfile") {
    dekit::gen_romfile(b, depth, mem_width);
  } else if (what == "cpu") {
    dekit::build_cpu(b);
  } else {
    throw std::runtime_error("unknown generator '" + what + "'");
  }
  spit(out_path, dekit::print_netlist(b.finalize()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"de-kit: four-valued hierarchical netlist toolkit"};
  app.require_subcommand(1);

  std::string file, top, stim, state, mem_init, out, format = "text";
  uint64_t seed = 0, trials = 1000, programs = 500, steps = 64;
  double p = 0.3;
  unsigned width = 8, depth = 2, mem_width = 8;

  auto* check = app.add_subcommand("check", "well-formedness report");
  check->add_option("file", file)->required();

  auto* sim = app.add_subcommand("sim", "cycle-by-cycle simulation");
  sim->add_option("file", file)->required();
  sim->add_option("--top", top, "top module (default: first)");
  sim->add_option("--stim", stim, "stimulus file")->required();
  sim->add_option("--state", state, "initial state file");
  sim->add_option("--mem-init", mem_init, "memory image for the first memory");

  auto* mono = app.add_subcommand("mono", "randomized monotonicity check");
  mono->add_option("file", file)->required();
  mono->add_option("--top", top);
  mono->add_option("--trials", trials);
  mono->add_option("--seed", seed);
  mono->add_option("--p", p, "weakening probability");
  mono->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* gen = app.add_subcommand("gen", "emit a generated netlist");
  std::string what;
  gen->add_option("what", what,
                  "adder|mux|decoder|register|regfile|romfile|cpu")
      ->required();
  gen->add_option("--n", width, "bit width / decoder inputs");
  gen->add_option("--depth", depth, "memory address bits");
  gen->add_option("--width", mem_width, "memory word width");
  gen->add_option("-o,--out", out, "output file (default stdout)");

  auto* equiv = app.add_subcommand("cpu-equiv", "ISA vs netlist correspondence");
  equiv->add_option("--programs", programs);
  equiv->add_option("--steps", steps);
  equiv->add_option("--seed", seed);
  equiv->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* as = app.add_subcommand("asm", "assemble to a memory image");
  as->add_option("file", file)->required();
  as->add_option("-o,--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::stringstream out_s, err_s;
    int code = app.exit(e, out_s, err_s);
    std::cout << out_s.str();
    std::cerr << err_s.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(file);
    if (sim->parsed()) return cmd_sim(file, top, stim, state, mem_init);
    if (mono->parsed()) return cmd_mono(file, top, trials, seed, p, format);
    if (gen->parsed()) return cmd_gen(what, width, depth, mem_width, out);
    if (equiv->parsed()) return cmd_equiv(programs, steps, seed, format);
    if (as->parsed()) {
      spit(out, dekit::assemble(slurp(file)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
