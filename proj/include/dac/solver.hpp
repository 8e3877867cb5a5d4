#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dac/align.hpp"
#include "dac/concept.hpp"
#include "dac/config.hpp"
#include "dac/divide.hpp"
#include "dac/encode.hpp"
#include "dac/log.hpp"
#include "dac/rank.hpp"
#include "dac/synth.hpp"
#include "dac/transform.hpp"

namespace dac {

struct TransformationRule {
  Dnf condition;
  TransformProgram program;
  std::vector<std::pair<OutputRef, std::uint32_t>> provenance;  // (output component, input component id)

  std::string render() const { return "if " + condition.render() + " then " + program.render(); }
};

enum class CanvasPolicy { input, produced, fixed };

inline std::string to_string(CanvasPolicy p) {
  switch (p) {
    case CanvasPolicy::input: return "input";
    case CanvasPolicy::produced: return "produced";
    case CanvasPolicy::fixed: return "fixed";
  }
  return "input";
}

struct SolutionProgram {
  DecompositionFunction delta;
  std::vector<TransformationRule> rules;
  CanvasPolicy canvas = CanvasPolicy::input;
  int fixed_height = 0;
  int fixed_width = 0;

  std::string render() const {
    std::string s;
    for (const auto& r : rules) s += r.render() + "\n";
    return s;
  }

  std::size_t primitive_count() const {
    std::size_t n = 0;
    for (const auto& r : rules) n += r.program.length();
    return n;
  }
};

enum class SolveStatus { solved, unsolvable, timeout };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved: return "solved";
    case SolveStatus::unsolvable: return "unsolvable";
    case SolveStatus::timeout: return "timeout";
  }
  return "unsolvable";
}

struct SolveStats {
  std::uint64_t candidates = 0;
  std::uint64_t synthesis_loops = 0;
  std::uint64_t correspondences_total = 0;
  std::uint64_t correspondences_explored = 0;
  std::uint64_t decompositions_tried = 0;
  bool greedy_alignment = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::unsolvable;
  std::optional<SolutionProgram> program;
  SolveStats stats;
  std::vector<std::string> ledger;  // best partial ledger, rendered programs
  double wall_time = 0.0;
};

namespace detail {

inline Color canvas_background(const DecompositionFunction& f, const Value& input) {
  if (f.background == BackgroundPolicy::constant) return f.background_color;
  if (f.background == BackgroundPolicy::inferred) return infer_background_color(std::get<Grid>(input));
  return 0;
}

inline CanvasSpec make_canvas(const DecompositionFunction& f, CanvasPolicy policy, int fixed_h, int fixed_w,
                              const Value& input, const std::vector<Component>& parts) {
  if (!std::holds_alternative<Grid>(input)) return TextCanvas{};
  const auto& g = std::get<Grid>(input);
  GridCanvas c{g.height(), g.width(), canvas_background(f, input)};
  for (const auto& p : parts)
    if (p.is_background()) {
      Box b = p.grid().bbox();
      c.height = b.bottom() + 1;
      c.width = b.right() + 1;
      c.background = dominant_color(p.grid());
      return c;
    }
  if (policy == CanvasPolicy::produced && !parts.empty()) {
    int h = 0, w = 0;
    for (const auto& p : parts) {
      Box b = p.grid().bbox();
      h = std::max(h, b.bottom() + 1);
      w = std::max(w, b.right() + 1);
    }
    c.height = h;
    c.width = w;
  } else if (policy == CanvasPolicy::fixed) {
    c.height = fixed_h;
    c.width = fixed_w;
  }
  return c;
}

inline bool compose_matches(const DecompositionFunction& f, CanvasPolicy policy, int fh, int fw, const Value& input,
                            const std::vector<Component>& parts, const Value& expected) {
  auto canvas = make_canvas(f, policy, fh, fw, input, parts);
  if (auto* gc = std::get_if<GridCanvas>(&canvas); gc && (gc->height <= 0 || gc->width <= 0)) return false;
  return value_equals(compose(parts, canvas).value, expected);
}

struct LedgerEntry {
  Candidate candidate;
  std::vector<std::pair<OutputRef, std::uint32_t>> provenance;
};

// state shared by one decomposition function's search loop
struct DeltaState {
  const Task& task;
  const Config& cfg;
  DecompositionFunction f;
  SynthesisContext ctx;
  std::vector<FeatureVector> slot_features;
  BooleanEncoding encoding;

  DeltaState(const Task& t, const Config& c, const DecompositionFunction& d) : task(t), cfg(c), f(d) {}
};

}  // namespace detail

// Set covers of the universe (columns of covers) whose members each cover the first element left
// uncovered by the earlier ones, ordered by size, total program length, then member indices.
// The search stops after node_budget expansions and returns what it found.
inline std::vector<std::vector<std::size_t>> enumerate_covers(const std::vector<std::vector<char>>& covers,
                                                              const std::vector<std::size_t>& lengths,
                                                              std::size_t max_covers,
                                                              std::size_t node_budget = 20000) {
  std::vector<std::vector<std::size_t>> out;
  if (covers.empty()) return out;
  const std::size_t u = covers.front().size(), words = (u + 63) / 64, n = covers.size();
  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> sets(n, Bits(words, 0));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t i = 0; i < u; ++i)
      if (covers[p][i]) sets[p][i / 64] |= std::uint64_t{1} << (i % 64);
  Bits all(words, ~std::uint64_t{0});
  if (u % 64) all.back() = (std::uint64_t{1} << (u % 64)) - 1;

  std::size_t nodes = 0;
  std::vector<std::size_t> chosen;
  std::set<std::vector<std::size_t>> found;
  std::size_t k = 0;
  std::function<void(const Bits&)> rec = [&](const Bits& open) {
    if (out.size() + found.size() >= max_covers || ++nodes > node_budget) return;
    std::size_t first = u, uncovered = 0;
    for (std::size_t w = 0; w < words; ++w) {
      if (open[w] && first == u) first = w * 64 + static_cast<std::size_t>(std::countr_zero(open[w]));
      uncovered += static_cast<std::size_t>(std::popcount(open[w]));
    }
    if (first == u) {
      if (chosen.size() == k) {
        auto c = chosen;
        std::sort(c.begin(), c.end());
        found.insert(std::move(c));
      }
      return;
    }
    if (chosen.size() == k) return;
    // every remaining pick covers at most `best` of the open elements
    std::size_t best = 0;
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t gain = 0;
      for (std::size_t w = 0; w < words; ++w) gain += static_cast<std::size_t>(std::popcount(sets[p][w] & open[w]));
      best = std::max(best, gain);
    }
    if (best == 0 || (uncovered + best - 1) / best > k - chosen.size()) return;
    Bits next(words);
    for (std::size_t p = 0; p < n; ++p) {
      if (!(sets[p][first / 64] >> (first % 64) & 1) || std::find(chosen.begin(), chosen.end(), p) != chosen.end())
        continue;
      for (std::size_t w = 0; w < words; ++w) next[w] = open[w] & ~sets[p][w];
      chosen.push_back(p);
      rec(next);
      chosen.pop_back();
    }
  };
  auto total = [&](const std::vector<std::size_t>& c) {
    std::size_t len = 0;
    for (auto p : c) len += lengths[p];
    return len;
  };
  for (k = 1; k <= n && out.size() < max_covers && nodes <= node_budget; ++k) {
    found.clear();
    rec(all);
    std::vector<std::vector<std::size_t>> ordered(found.begin(), found.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [&](const auto& x, const auto& y) { return total(x) < total(y); });
    out.insert(out.end(), ordered.begin(), ordered.end());
  }
  return out;
}

// Chooses a minimum set of ledger programs covering every output component, learns a DNF per
// program and verifies end-to-end reconstruction of all training outputs.
inline std::optional<SolutionProgram> minimal_rule_set(const std::vector<detail::LedgerEntry>& ledger,
                                                       detail::DeltaState& st, const Deadline& deadline) {
  const auto& ctx = st.ctx;
  std::vector<OutputRef> universe;
  for (std::size_t l = 0; l < ctx.examples.size(); ++l)
    for (const auto& o : ctx.examples[l].output.components) universe.push_back({static_cast<int>(l), o.id});
  std::sort(universe.begin(), universe.end());
  const std::size_t u = universe.size();
  std::vector<std::vector<char>> covers(ledger.size(), std::vector<char>(u, 0));
  for (std::size_t p = 0; p < ledger.size(); ++p)
    for (const auto& o : ledger[p].candidate.coverage.covered) {
      auto it = std::lower_bound(universe.begin(), universe.end(), o);
      if (it != universe.end() && *it == o) covers[p][it - universe.begin()] = 1;
    }

  auto learn = [&](std::size_t p) -> std::optional<DnfResult> {
    try {
      return learn_dnf(st.encoding, ledger[p].candidate.coverage.labels, st.cfg.j, st.cfg.w);
    } catch (const Infeasible&) {
      return std::nullopt;
    }
  };
  std::map<std::size_t, std::optional<DnfResult>> dnf_cache;
  auto dnf_of = [&](std::size_t p) -> const std::optional<DnfResult>& {
    auto it = dnf_cache.find(p);
    if (it == dnf_cache.end()) it = dnf_cache.emplace(p, learn(p)).first;
    return it->second;
  };

  std::vector<std::pair<CanvasPolicy, std::pair<int, int>>> policies = {{CanvasPolicy::input, {0, 0}}};
  if (st.task.domain == Domain::grid) {
    policies.push_back({CanvasPolicy::produced, {0, 0}});
    const auto& g0 = std::get<Grid>(st.task.train.front().output);
    bool same = true;
    for (const auto& e : st.task.train) {
      const auto& g = std::get<Grid>(e.output);
      same = same && g.height() == g0.height() && g.width() == g0.width();
    }
    if (same) policies.push_back({CanvasPolicy::fixed, {g0.height(), g0.width()}});
  }

  // per program, per learned conjunction: which slots it fires on
  std::map<std::size_t, std::vector<std::vector<char>>> fire_cache;
  auto conj_fires = [&](std::size_t p) -> const std::vector<std::vector<char>>& {
    auto it = fire_cache.find(p);
    if (it != fire_cache.end()) return it->second;
    std::vector<std::vector<char>> out;
    for (const auto& conj : dnf_of(p)->columns) {
      std::vector<char> f(ctx.slots.size(), 0);
      for (std::size_t s = 0; s < ctx.slots.size(); ++s) {
        bool all = true;
        for (int c : conj.columns) all = all && st.encoding.rows[s][c];
        f[s] = all;
      }
      out.push_back(std::move(f));
    }
    return fire_cache.emplace(p, std::move(out)).first->second;
  };

  using Fires = std::vector<std::vector<char>>;
  auto fires_of = [&](const std::vector<std::size_t>& progs, const std::vector<std::size_t>& combo) {
    Fires fires(progs.size(), std::vector<char>(ctx.slots.size(), 0));
    for (std::size_t r = 0; r < progs.size(); ++r) {
      const auto& cf = conj_fires(progs[r]);
      for (std::size_t s = 0; s < ctx.slots.size(); ++s) {
        if (!ledger[progs[r]].candidate.values[s]) continue;
        for (std::size_t k = 0; k < combo[r] && !fires[r][s]; ++k) fires[r][s] = cf[k][s];
      }
    }
    return fires;
  };
  // every output component must be an exact match of some firing rule
  auto reaches_all = [&](const std::vector<std::size_t>& progs, const Fires& fires) {
    std::vector<char> hit(u, 0);
    for (std::size_t r = 0; r < progs.size(); ++r)
      for (const auto& [s, o] : ledger[progs[r]].candidate.coverage.matches)
        if (fires[r][s]) hit[std::lower_bound(universe.begin(), universe.end(), o) - universe.begin()] = 1;
    return std::count(hit.begin(), hit.end(), 0) == 0;
  };

  auto verify = [&](const std::vector<std::size_t>& progs,
                    const std::vector<std::size_t>& combo) -> std::optional<std::size_t> {
    auto fires = fires_of(progs, combo);
    if (!reaches_all(progs, fires)) return std::nullopt;
    std::vector<std::vector<Component>> parts(ctx.examples.size());
    for (std::size_t s = 0; s < ctx.slots.size(); ++s)
      for (std::size_t r = 0; r < progs.size(); ++r)
        if (fires[r][s]) parts[ctx.slots[s].first].push_back(*ledger[progs[r]].candidate.values[s]);
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
      bool ok = true;
      for (std::size_t l = 0; l < ctx.examples.size() && ok; ++l)
        ok = detail::compose_matches(st.f, policies[pi].first, policies[pi].second.first, policies[pi].second.second,
                                     st.task.train[l].input, parts[l], st.task.train[l].output);
      if (ok) return pi;
    }
    return std::nullopt;
  };

  std::vector<std::size_t> lengths;
  for (const auto& e : ledger) lengths.push_back(e.candidate.program.length());
  for (const auto& cover : enumerate_covers(covers, lengths, st.cfg.max_covers)) {
    if (deadline.expired()) return std::nullopt;
    std::vector<const DnfResult*> results;
    bool feasible = true;
    for (auto p : cover) {
      const auto& d = dnf_of(p);
      if (!d) {
        feasible = false;
        break;
      }
      results.push_back(&*d);
    }
    if (!feasible) continue;
    // firing only grows with more conjunctions, so the full DNFs bound every truncation
    std::vector<std::size_t> full;
    for (const auto* r : results) full.push_back(r->dnf.conjunctions.size());
    if (!reaches_all(cover, fires_of(cover, full))) continue;

    // prefix truncations of each DNF, largest total first
    std::vector<std::vector<std::size_t>> combos;
    std::vector<std::size_t> cur(cover.size());
    std::function<void(std::size_t)> gen = [&](std::size_t i) {
      if (combos.size() >= st.cfg.max_truncations * 4) return;
      if (i == cover.size()) {
        combos.push_back(cur);
        return;
      }
      for (std::size_t t = results[i]->dnf.conjunctions.size(); t >= 1; --t) {
        cur[i] = t;
        gen(i + 1);
      }
    };
    gen(0);
    std::stable_sort(combos.begin(), combos.end(), [](const auto& a, const auto& b) {
      std::size_t sa = 0, sb = 0;
      for (auto x : a) sa += x;
      for (auto x : b) sb += x;
      return sa > sb;
    });
    if (combos.size() > st.cfg.max_truncations) combos.resize(st.cfg.max_truncations);
    for (const auto& combo : combos) {
      auto policy = verify(cover, combo);
      if (!policy) continue;
      std::vector<Dnf> dnfs;
      for (std::size_t i = 0; i < cover.size(); ++i) {
        Dnf d = results[i]->dnf;
        d.conjunctions.resize(combo[i]);
        dnfs.push_back(std::move(d));
      }
      SolutionProgram sol;
      sol.delta = st.f;
      sol.canvas = policies[*policy].first;
      sol.fixed_height = policies[*policy].second.first;
      sol.fixed_width = policies[*policy].second.second;
      for (std::size_t i = 0; i < cover.size(); ++i)
        sol.rules.push_back({dnfs[i], ledger[cover[i]].candidate.program, ledger[cover[i]].provenance});
      return sol;
    }
  }
  return std::nullopt;
}

inline Value predict(const SolutionProgram& sol, const Value& input) {
  Segmentation seg = apply(sol.delta, input, Side::input, 0);
  auto fvs = scene_features(seg);
  SceneContext ctx{&seg, 0, 0};
  if (auto* g = std::get_if<Grid>(&input)) {
    ctx.height = g->height();
    ctx.width = g->width();
  }
  std::vector<Component> parts;
  for (std::size_t i = 0; i < seg.components.size(); ++i)
    for (const auto& rule : sol.rules)
      if (rule.condition.eval(fvs[i]))
        if (auto out = execute(rule.program, seg.components[i], ctx)) parts.push_back(std::move(*out));
  auto canvas = detail::make_canvas(sol.delta, sol.canvas, sol.fixed_height, sol.fixed_width, input, parts);
  if (auto* gc = std::get_if<GridCanvas>(&canvas); gc && (gc->height <= 0 || gc->width <= 0)) {
    const auto& g = std::get<Grid>(input);
    gc->height = g.height();
    gc->width = g.width();
  }
  return compose(std::move(parts), canvas).value;
}

namespace detail {

enum class LoopOutcome { solved, exhausted, timeout };

inline LoopOutcome run_delta(DeltaState& st, const Deadline& deadline, SolveStats& stats,
                             std::optional<SolutionProgram>& best, std::vector<std::string>& ledger_out) {
  auto& ctx = st.ctx;
  const auto& task = st.task;
  const auto& cfg = st.cfg;
  ctx.domain = task.domain;
  ctx.grammar = task.domain == Domain::grid ? arc_transform_grammar() : string_transform_grammar();
  ctx.deadline = deadline;
  for (std::size_t l = 0; l < task.train.size(); ++l) {
    const auto& e = task.train[l];
    const int li = static_cast<int>(l);
    ctx.add_example(e.input, apply(st.f, e.input, Side::input, li), apply(st.f, e.output, Side::output, li), e.output);
  }
  ctx.finalize();
  for (const auto& ex : ctx.examples) {
    auto fv = scene_features(ex.input);
    st.slot_features.insert(st.slot_features.end(), fv.begin(), fv.end());
  }
  st.encoding = encode_components(st.slot_features);

  std::vector<OutputRef> frontier;
  for (std::size_t l = 0; l < ctx.examples.size(); ++l)
    for (const auto* c : choose_order(ctx.examples[l].output)) frontier.push_back({static_cast<int>(l), c->id});
  const std::size_t total_outputs = frontier.size();

  std::vector<std::optional<Alignment>> alignments(ctx.examples.size());
  std::map<OutputRef, std::deque<std::uint32_t>> corr;
  std::set<OutputRef> explored, covered;
  std::vector<LedgerEntry> ledger;
  std::vector<Candidate> known;
  bool changed = false;
  std::size_t next_check = 0;  // cover search reruns once the ledger grows by ~1/16
  const std::uint64_t base_candidates = stats.candidates;

  auto finish = [&](LoopOutcome o) {
    stats.candidates = base_candidates + ctx.candidates;
    if (ledger.size() >= ledger_out.size()) {
      ledger_out.clear();
      for (const auto& e : ledger) ledger_out.push_back(e.candidate.program.render());
    }
    return o;
  };

  // true when the search can stop with `best`
  auto check = [&](const Deadline& dl) {
    auto sol = minimal_rule_set(ledger, st, dl);
    if (!sol) return false;
    if (!cfg.exhaustive) {
      best = std::move(sol);
      return true;
    }
    auto better = [](const SolutionProgram& a, const SolutionProgram& b) {
      if (a.rules.size() != b.rules.size()) return a.rules.size() < b.rules.size();
      return a.primitive_count() < b.primitive_count();
    };
    if (!best || better(*sol, *best)) best = std::move(sol);
    return false;
  };

  while (!frontier.empty()) {
    if (deadline.expired()) return finish(LoopOutcome::timeout);
    auto pick = std::find_if(frontier.begin(), frontier.end(), [&](const OutputRef& o) { return !covered.count(o); });
    if (pick == frontier.end()) pick = frontier.begin();
    const OutputRef o = *pick;
    if (!explored.count(o)) {
      explored.insert(o);
      auto& al = alignments[o.example];
      if (!al) {
        const auto& ex = ctx.examples[o.example];
        al = align_example(ex.input, ex.output, st.f, o.example, cfg);
        stats.greedy_alignment = stats.greedy_alignment || al->greedy;
      }
      auto& q = corr[o];
      for (auto [id, score] : al->table[o.id]) q.push_back(id);
      stats.correspondences_total += q.size();
    }
    auto& q = corr[o];
    if (q.empty()) {
      frontier.erase(std::find(frontier.begin(), frontier.end(), o));
      continue;
    }
    const std::uint32_t oi = q.front();
    q.pop_front();
    ++stats.correspondences_explored;
    ++stats.synthesis_loops;
    auto pivot = ctx.slot_of(o.example, oi);
    const Component* target = ctx.examples[o.example].output.find(o.id);
    auto res = pivot ? learn_transformation(ctx, *pivot, *target, cfg.depth, &known) : std::nullopt;
    if (ctx.timed_out) return finish(LoopOutcome::timeout);
    if (res) {
      auto dup = std::find_if(ledger.begin(), ledger.end(),
                              [&](const LedgerEntry& e) { return e.candidate.program == res->best.program; });
      if (res->known || dup != ledger.end()) {
        std::size_t k = res->known ? res->known_index : static_cast<std::size_t>(dup - ledger.begin());
        ledger[k].provenance.push_back({o, oi});
      } else {
        log_line(2, "loop " + std::to_string(stats.synthesis_loops) + ": " + res->best.program.render());
        ledger.push_back({res->best, {{o, oi}}});
        known.push_back(res->best);
        for (const auto& c : res->best.coverage.covered) covered.insert(c);
        changed = true;
      }
    }
    if (q.empty()) {
      auto it = std::find(frontier.begin(), frontier.end(), o);
      if (it != frontier.end()) frontier.erase(it);
    }
    if (changed && covered.size() == total_outputs && (ledger.size() >= next_check || frontier.empty())) {
      changed = false;
      next_check = ledger.size() + std::max<std::size_t>(1, ledger.size() / 16);
      if (check(deadline)) return finish(LoopOutcome::solved);
    }
  }
  return finish(best ? LoopOutcome::solved : LoopOutcome::exhausted);
}

}  // namespace detail

inline SolveResult solve_task(const Task& task, const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  task.validate();
  cfg.validate();
  SolveResult result;
  Deadline deadline(cfg.timeout);
  std::vector<DecompositionFunction> deltas;
  if (cfg.ablation == Ablation::no_divide) {
    deltas.push_back(DecompositionFunction::whole_value(task.domain));
  } else {
    auto grammar = task.domain == Domain::grid ? arc_decomposition_grammar() : string_decomposition_grammar();
    for (auto& r : extract_and_rank(grammar, task, cfg)) {
      result.stats.candidates += r.report.candidates;
      log_line(2, "rank " + r.f.name() + " " + std::to_string(r.report.score));
      deltas.push_back(r.f);
    }
  }
  result.status = SolveStatus::unsolvable;
  for (const auto& f : deltas) {
    if (deadline.expired()) {
      result.status = SolveStatus::timeout;
      break;
    }
    ++result.stats.decompositions_tried;
    log_line(1, "decomposition " + f.name());
    detail::DeltaState st(task, cfg, f);
    std::optional<SolutionProgram> best;
    auto outcome = detail::run_delta(st, deadline, result.stats, best, result.ledger);
    if (best) {
      result.program = std::move(best);
      result.status = SolveStatus::solved;
      break;
    }
    if (outcome == detail::LoopOutcome::timeout) {
      result.status = SolveStatus::timeout;
      break;
    }
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace dac
