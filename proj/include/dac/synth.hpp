#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_set>
#include <vector>

#include "dac/core.hpp"
#include "dac/divide.hpp"
#include "dac/transform.hpp"

namespace dac {

class Deadline {
 public:
  Deadline() : end_(std::chrono::steady_clock::time_point::max()) {}
  explicit Deadline(double seconds)
      : end_(std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds))) {}
  bool expired() const { return std::chrono::steady_clock::now() >= end_; }

 private:
  std::chrono::steady_clock::time_point end_;
};

struct OutputRef {
  int example = 0;
  std::uint32_t id = 0;
  auto operator<=>(const OutputRef&) const = default;
};

struct SynthesisExample {
  Segmentation input;
  Segmentation output;
  Value output_value;
  SceneContext ctx;
};

// all training examples of one task segmented under one decomposition function
struct SynthesisContext {
  Domain domain = Domain::grid;
  TransformGrammar grammar;
  std::vector<SynthesisExample> examples;
  std::vector<std::pair<int, int>> slots;  // (example, index into input components)
  Deadline deadline;
  std::uint64_t candidates = 0;
  bool timed_out = false;

  SynthesisContext() = default;
  SynthesisContext(const SynthesisContext&) = delete;
  SynthesisContext& operator=(const SynthesisContext&) = delete;

  void add_example(const Value& input, Segmentation in, Segmentation out, Value out_value) {
    SceneContext ctx;
    if (auto* g = std::get_if<Grid>(&input)) {
      ctx.height = g->height();
      ctx.width = g->width();
    }
    examples.push_back({std::move(in), std::move(out), std::move(out_value), ctx});
  }

  // fixes context pointers and the slot order once all examples are added
  void finalize() {
    slots.clear();
    for (std::size_t l = 0; l < examples.size(); ++l) {
      auto& e = examples[l];
      e.ctx.input = &e.input;
      for (std::size_t i = 0; i < e.input.components.size(); ++i)
        slots.push_back({static_cast<int>(l), static_cast<int>(i)});
    }
  }

  const Component& slot_component(std::size_t s) const { return examples[slots[s].first].input.components[slots[s].second]; }
  const SceneContext& slot_context(std::size_t s) const { return examples[slots[s].first].ctx; }
  std::optional<std::size_t> slot_of(int example, std::uint32_t id) const {
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s].first == example && slot_component(s).id == id) return s;
    return std::nullopt;
  }
};

using SlotValues = std::vector<std::optional<Component>>;

struct CoverageRecord {
  std::vector<Label> labels;          // per slot
  std::vector<OutputRef> covered;     // output components reconstructed exactly
  std::vector<std::pair<std::uint32_t, OutputRef>> matches;  // (slot, output) for every exact match

  std::vector<std::size_t> with(Label l) const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < labels.size(); ++s)
      if (labels[s] == l) out.push_back(s);
    return out;
  }
};

struct SlotOutcome {
  Label label = Label::neutral;
  std::vector<std::uint32_t> matched;
};

inline SlotOutcome label_output(const std::optional<Component>& v, const SynthesisExample& ex) {
  SlotOutcome out;
  if (!v) return out;
  for (const auto& o : ex.output.components)
    if (v->same_content(o)) out.matched.push_back(o.id);
  if (!out.matched.empty()) {
    out.label = Label::positive;
    return out;
  }
  if (!v->is_grid()) {
    out.label = v->text().content.empty() ? Label::neutral : Label::negative;
    return out;
  }
  const auto& truth = std::get<Grid>(ex.output_value);
  for (const auto& x : v->grid().cells)
    if (truth.in_bounds(x.row, x.col) && truth.at(x.row, x.col) != x.color) {
      out.label = Label::negative;
      break;
    }
  return out;
}

inline CoverageRecord coverage_of(const SlotValues& values, const SynthesisContext& ctx) {
  CoverageRecord rec;
  rec.labels.resize(values.size());
  for (std::size_t s = 0; s < values.size(); ++s) {
    auto o = label_output(values[s], ctx.examples[ctx.slots[s].first]);
    rec.labels[s] = o.label;
    for (auto id : o.matched) {
      rec.covered.push_back({ctx.slots[s].first, id});
      rec.matches.push_back({static_cast<std::uint32_t>(s), {ctx.slots[s].first, id}});
    }
  }
  std::sort(rec.covered.begin(), rec.covered.end());
  rec.covered.erase(std::unique(rec.covered.begin(), rec.covered.end()), rec.covered.end());
  return rec;
}

inline SlotValues run_on_slots(const TransformProgram& p, const SynthesisContext& ctx) {
  SlotValues out;
  for (std::size_t s = 0; s < ctx.slots.size(); ++s) out.push_back(execute(p, ctx.slot_component(s), ctx.slot_context(s)));
  return out;
}

inline CoverageRecord coverage(const TransformProgram& p, const SynthesisContext& ctx) {
  return coverage_of(run_on_slots(p, ctx), ctx);
}

struct Candidate {
  TransformProgram program;
  SlotValues values;
  CoverageRecord coverage;
  std::vector<std::pair<int, int>> order;  // (primitive index, option) per step
};

inline bool better_candidate(const Candidate& a, const Candidate& b) {
  if (a.coverage.covered.size() != b.coverage.covered.size())
    return a.coverage.covered.size() > b.coverage.covered.size();
  if (a.program.length() != b.program.length()) return a.program.length() < b.program.length();
  if (a.program.cost() != b.program.cost()) return a.program.cost() < b.program.cost();
  return a.order < b.order;
}

namespace detail {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xbf58476d1ce4e5b9ULL;
  return h ^ (h >> 31);
}

inline std::uint64_t signature(const SlotValues& vs) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (const auto& v : vs) {
    if (!v) {
      h = mix(h, 0xdeadULL);
      continue;
    }
    if (v->is_grid()) {
      h = mix(h, v->grid().cells.size());
      for (const auto& x : v->grid().cells)
        h = mix(h, (static_cast<std::uint64_t>(x.row + 64) << 20) | (static_cast<std::uint64_t>(x.col + 64) << 8) |
                       static_cast<std::uint64_t>(x.color));
    } else {
      h = mix(h, std::hash<std::string>{}(v->text().content));
    }
  }
  return h;
}

}  // namespace detail

struct LearnResult {
  Candidate best;
  bool known = false;       // best is one of the supplied known programs
  std::size_t known_index = 0;
};

// Enumerates chains up to depth in canonical order, keeping one program per observational
// equivalence class over all training input components. Survivors reproduce the target from the
// pivot; the winner reconstructs the most output components.
inline std::optional<LearnResult> learn_transformation(SynthesisContext& ctx, std::size_t pivot, const Component& target,
                                                       int depth, const std::vector<Candidate>* known = nullptr) {
  struct State {
    TransformProgram program;
    std::vector<std::pair<int, int>> order;
    SlotValues values;
  };
  const bool strings = ctx.domain == Domain::string;
  std::vector<Candidate> survivors;
  std::unordered_set<std::uint64_t> seen;

  State root;
  for (std::size_t s = 0; s < ctx.slots.size(); ++s) root.values.push_back(ctx.slot_component(s));
  ++ctx.candidates;
  seen.insert(detail::signature(root.values));
  if (root.values[pivot]->same_content(target)) survivors.push_back({root.program, root.values, {}, root.order});

  std::vector<State> level;
  level.push_back(std::move(root));
  for (int len = 1; len <= depth && !level.empty(); ++len) {
    std::vector<State> next;
    for (const auto& st : level) {
      const Component& pv = *st.values[pivot];
      for (std::size_t pi = 0; pi < ctx.grammar.primitives.size(); ++pi) {
        const auto& prim = ctx.grammar.primitives[pi];
        if (prim.op == Op::replace_text && !st.program.steps.empty()) continue;
        const int options = prim.options == 0 ? static_cast<int>(pv.size()) : prim.options;
        const int first = prim.options == 0 ? 1 : 0;
        for (int opt = first; opt < options + first; ++opt) {
          if ((ctx.candidates & 255) == 0 && ctx.deadline.expired()) {
            ctx.timed_out = true;
            return std::nullopt;
          }
          auto step = fill_hole(prim, opt, pv, target, ctx.slot_context(pivot));
          if (!step) continue;
          State child{st.program, st.order, {}};
          child.program.steps.push_back(*step);
          child.order.push_back({static_cast<int>(pi), opt});
          ++ctx.candidates;
          auto pivot_out = execute(*step, pv, ctx.slot_context(pivot));
          if (!pivot_out) continue;
          const bool standalone = prim.op == Op::replace_text;
          if (strings && !standalone &&
              !string_reachable(pivot_out->text().content, target.text().content, depth - len))
            continue;
          child.values.resize(st.values.size());
          for (std::size_t s = 0; s < st.values.size(); ++s) {
            if (s == pivot)
              child.values[s] = pivot_out;
            else if (st.values[s])
              child.values[s] = execute(*step, *st.values[s], ctx.slot_context(s));
          }
          if (!seen.insert(detail::signature(child.values)).second) continue;
          if (pivot_out->same_content(target)) survivors.push_back({child.program, child.values, {}, child.order});
          if (len < depth && !standalone) next.push_back(std::move(child));
        }
      }
    }
    level = std::move(next);
  }

  std::optional<LearnResult> best;
  auto consider = [&](Candidate c, bool is_known, std::size_t idx) {
    if (!best || better_candidate(c, best->best)) best = LearnResult{std::move(c), is_known, idx};
  };
  for (auto& c : survivors) {
    c.coverage = coverage_of(c.values, ctx);
    consider(std::move(c), false, 0);
  }
  if (known)
    for (std::size_t k = 0; k < known->size(); ++k) {
      const auto& kc = (*known)[k];
      if (kc.values[pivot] && kc.values[pivot]->same_content(target)) consider(kc, true, k);
    }
  return best;
}

}  // namespace dac
