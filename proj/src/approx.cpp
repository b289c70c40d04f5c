#include "dekit/approx.hpp"

#include <chrono>
#include <stdexcept>

namespace dekit {

bool s_approx(const StateTree& s1, const StateTree& s2) {
  // Memory cells first, then nodes, then bits.
  if (s1.is_cell() || s2.is_cell())
    return s1.is_cell() && s2.is_cell() &&
           mem_approx(s1.cell_tree(), s2.cell_tree());
  if (s1.is_node() || s2.is_node()) {
    if (!s1.is_node() || !s2.is_node()) return false;
    const auto& c1 = s1.children();
    const auto& c2 = s2.children();
    if (c1.size() != c2.size()) return false;
    for (size_t i = 0; i < c1.size(); ++i)
      if (!s_approx(c1[i], c2[i])) return false;
    return true;
  }
  return value_approx(s1.bit_value(), s2.bit_value());
}

StateTree state_tail(const StateTree& s) {
  if (!s.is_node() || s.children().empty())
    throw std::invalid_argument("state_tail: expected a nonempty node");
  return StateTree::node(
      StateTree::Children(s.children().begin() + 1, s.children().end()));
}

namespace {

// Applies f to every value slot in a fixed pre-order traversal.
template <typename F>
MemTree map_mem(const MemTree& m, F& f) {
  if (m.is_leaf()) {
    MemCell c = m.cell();
    for (Value4& v : c.payload) v = f(v);
    return MemTree::leaf(std::move(c));
  }
  MemTree l = map_mem(m.left(), f);
  return MemTree::node(std::move(l), map_mem(m.right(), f));
}

template <typename F>
StateTree map_state(const StateTree& s, F& f) {
  if (s.is_bit()) return StateTree::bit(f(s.bit_value()));
  if (s.is_cell()) return StateTree::cell(map_mem(s.cell_tree(), f));
  StateTree::Children children;
  children.reserve(s.children().size());
  for (const StateTree& c : s.children()) children.push_back(map_state(c, f));
  return StateTree::node(std::move(children));
}

}  // namespace

size_t state_slot_count(const StateTree& s) {
  size_t count = 0;
  auto f = [&](Value4 v) {
    ++count;
    return v;
  };
  map_state(s, f);
  return count;
}

StateTree state_weaken_slots(const StateTree& s,
                             const std::vector<bool>& mask) {
  size_t idx = 0;
  auto f = [&](Value4 v) {
    bool hit = idx < mask.size() && mask[idx];
    ++idx;
    return hit ? Value4::X : v;
  };
  return map_state(s, f);
}

StateTree weaken(const StateTree& s, double p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  auto f = [&](Value4 v) { return coin(rng) ? Value4::X : v; };
  return map_state(s, f);
}

Vec4 weaken(const Vec4& v, double p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  Vec4 out = v;
  for (Value4& e : out)
    if (coin(rng)) e = Value4::X;
  return out;
}

namespace {

Value4 draw_value(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  if (r < 0.45) return Value4::F;
  if (r < 0.90) return Value4::T;
  return Value4::X;
}

}  // namespace

StateTree random_state(const StateShape& shape, std::mt19937_64& rng) {
  StateTree s = fill_state(shape, Value4::F);
  auto f = [&](Value4) { return draw_value(rng); };
  return map_state(s, f);
}

Vec4 random_inputs(size_t width, std::mt19937_64& rng) {
  Vec4 v(width, Value4::F);
  for (Value4& e : v) e = draw_value(rng);
  return v;
}

namespace {

// First position where the weak run fails to approximate the strong run.
std::optional<std::string> approx_diff(const StateTree& s1,
                                       const StateTree& s2,
                                       const std::string& path) {
  if (s_approx(s1, s2)) return std::nullopt;
  if (s1.is_node() && s2.is_node() &&
      s1.children().size() == s2.children().size()) {
    for (size_t i = 0; i < s1.children().size(); ++i)
      if (auto d = approx_diff(s1.children()[i], s2.children()[i],
                               path + "." + std::to_string(i)))
        return d;
  }
  return path;
}

struct TrialCase {
  Vec4 strong_inputs;
  StateTree strong_state;
  std::vector<bool> mask;  // input slots first, then state slots
};

struct TrialOutcome {
  std::optional<std::string> se_position;
  std::optional<std::string> de_position;

  bool violated() const { return se_position || de_position; }
};

Vec4 weak_inputs_of(const TrialCase& t) {
  Vec4 w = t.strong_inputs;
  for (size_t i = 0; i < w.size(); ++i)
    if (t.mask[i]) w[i] = Value4::X;
  return w;
}

StateTree weak_state_of(const TrialCase& t) {
  std::vector<bool> state_mask(t.mask.begin() + t.strong_inputs.size(),
                               t.mask.end());
  return state_weaken_slots(t.strong_state, state_mask);
}

TrialOutcome run_trial(const Netlist& n, size_t at, const TrialCase& t,
                       const Vec4& strong_out, const StateTree& strong_next,
                       const EvalHooks* hooks) {
  Vec4 wi = weak_inputs_of(t);
  StateTree ws = weak_state_of(t);
  TrialOutcome out;
  Vec4 weak_out = se(n, at, wi, ws, hooks);
  for (size_t i = 0; i < weak_out.size(); ++i) {
    if (!value_approx(weak_out[i], strong_out[i])) {
      out.se_position = "output[" + std::to_string(i) + "]";
      break;
    }
  }
  StateTree weak_next = de(n, at, wi, ws, hooks);
  out.de_position = approx_diff(weak_next, strong_next, "state");
  return out;
}

}  // namespace

MonoReport check_monotonic(const Netlist& n, size_t at, uint64_t trials,
                           double p, uint64_t seed, const EvalHooks* hooks) {
  auto t0 = std::chrono::steady_clock::now();
  MonoReport report;
  report.module = n.modules[at].name;
  report.trials = trials;
  report.seed = seed;

  StateShape shape = state_shape(n, at);
  size_t input_count = n.modules[at].inputs.size();

  for (uint64_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + trial * 0x9E3779B97F4A7C15ULL + 1);
    TrialCase t;
    t.strong_inputs = random_inputs(input_count, rng);
    t.strong_state = random_state(shape, rng);

    size_t slots = input_count + state_slot_count(t.strong_state);
    std::bernoulli_distribution coin(p);
    t.mask.resize(slots);
    for (size_t i = 0; i < slots; ++i) t.mask[i] = coin(rng);

    Vec4 strong_out = se(n, at, t.strong_inputs, t.strong_state, hooks);
    StateTree strong_next = de(n, at, t.strong_inputs, t.strong_state, hooks);

    TrialOutcome outcome = run_trial(n, at, t, strong_out, strong_next, hooks);
    if (!outcome.violated()) continue;

    // Greedy witness minimization: re-strengthen weakened slots one at a
    // time while the violation persists.
    for (size_t i = 0; i < slots; ++i) {
      if (!t.mask[i]) continue;
      t.mask[i] = false;
      TrialOutcome retry = run_trial(n, at, t, strong_out, strong_next, hooks);
      if (retry.violated())
        outcome = retry;
      else
        t.mask[i] = true;
    }

    MonoViolation v;
    v.trial = trial;
    v.kind = outcome.se_position ? "se" : "de";
    v.position = outcome.se_position ? *outcome.se_position
                                     : *outcome.de_position;
    v.weak_inputs = vec_to_string(weak_inputs_of(t));
    v.strong_inputs = vec_to_string(t.strong_inputs);
    v.weak_state = state_to_string(weak_state_of(t));
    v.strong_state = state_to_string(t.strong_state);
    report.violations.push_back(std::move(v));
  }

  auto t1 = std::chrono::steady_clock::now();
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return report;
}

}  // namespace dekit
