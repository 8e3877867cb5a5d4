#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dac/align.hpp"
#include "dac/config.hpp"
#include "dac/divide.hpp"
#include "dac/synth.hpp"

namespace dac {

// example ascending, size descending, id ascending
inline std::vector<const Component*> choose_order(const Segmentation& seg) {
  std::vector<const Component*> out;
  for (const auto& c : seg.components) out.push_back(&c);
  std::stable_sort(out.begin(), out.end(), [](const Component* a, const Component* b) {
    if (a->size() != b->size()) return a->size() > b->size();
    return a->id < b->id;
  });
  return out;
}

inline std::uint64_t alignment_seed(std::uint64_t seed, const DecompositionFunction& f, int example) {
  std::uint64_t h = seed ^ 0x6a09e667f3bcc909ULL;
  for (const auto& c : f.constraints())
    for (unsigned char ch : c) h = (h ^ ch) * 0x100000001b3ULL;
  return h ^ (static_cast<std::uint64_t>(example + 1) * 0x9e3779b97f4a7c15ULL);
}

inline Alignment align_example(const Segmentation& in, const Segmentation& out, const DecompositionFunction& f,
                               int example, const Config& cfg) {
  if (cfg.ablation == Ablation::no_align) return random_ranking(in, out, alignment_seed(cfg.seed, f, example));
  return align_scenes(in, out, cfg.align());
}

struct UsefulnessReport {
  double score = 0.0;
  bool success = false;
  int program_cost = 0;
  std::size_t outputs = 0;
  std::size_t inputs = 0;
  std::uint64_t candidates = 0;
};

// additive log form: success dominates, then probe program length, the 2^-|c| prior and the
// alignment ambiguity M * log2(N)
inline double usefulness_score(const DecompositionFunction& f, const UsefulnessReport& r, const UsefulnessWeights& w) {
  const double prior = w.constraint * static_cast<double>(f.constraints().size()) +
                       w.alignment * static_cast<double>(r.outputs) * std::log2(std::max<double>(1.0, r.inputs));
  return (r.success ? w.success - w.program_cost * r.program_cost : 0.0) - prior;
}

inline UsefulnessReport usefulness(const DecompositionFunction& f, const Example& first, const Config& cfg) {
  UsefulnessReport r;
  SynthesisContext ctx;
  ctx.domain = domain_of(first.input);
  ctx.grammar = ctx.domain == Domain::grid ? arc_transform_grammar() : string_transform_grammar();
  ctx.add_example(first.input, apply(f, first.input, Side::input, 0), apply(f, first.output, Side::output, 0),
                  first.output);
  ctx.finalize();
  const auto& ex = ctx.examples[0];
  r.outputs = ex.output.components.size();
  r.inputs = ex.input.components.size();
  const auto& w = cfg.usefulness;
  if (r.outputs > 0 && r.inputs > 0) {
    const Component* o1 = choose_order(ex.output).front();
    auto table = align_example(ex.input, ex.output, f, 0, cfg).table;
    auto slot = ctx.slot_of(0, table[o1->id].front().first);
    if (slot) {
      auto res = learn_transformation(ctx, *slot, *o1, w.probe_depth);
      if (res) {
        r.success = true;
        r.program_cost = res->best.program.cost();
      }
    }
  }
  r.candidates = ctx.candidates;
  r.score = usefulness_score(f, r, w);
  return r;
}

struct RankedDecomposition {
  DecompositionFunction f;
  UsefulnessReport report;
};

namespace detail {

inline std::string segmentation_key(const Segmentation& seg) {
  std::string k;
  for (const auto& c : seg.components) {
    k += c.is_background() ? "b" : "o";
    if (c.is_grid())
      for (const auto& x : c.grid().cells) k += std::to_string(x.row) + "," + std::to_string(x.col) + "," + std::to_string(x.color) + ";";
    else
      k += std::to_string(c.text().begin) + ":" + c.text().content;
    k += "|";
  }
  return k;
}

}  // namespace detail

// decomposition functions segmenting the probe example identically share one probe; the
// constraint prior still differs per function
inline std::vector<RankedDecomposition> extract_and_rank(const DecompositionGrammar& g, const Task& task,
                                                         const Config& cfg) {
  auto lang = g.language();
  if (lang.empty()) throw EmptyLanguage("decomposition grammar derives nothing");
  const auto& first = task.train.front();
  std::map<std::string, UsefulnessReport> memo;
  std::vector<RankedDecomposition> out;
  for (const auto& f : lang) {
    std::string key = detail::segmentation_key(apply(f, first.input, Side::input, 0)) + "#" +
                      detail::segmentation_key(apply(f, first.output, Side::output, 0));
    auto it = memo.find(key);
    if (it == memo.end()) {
      out.push_back({f, usefulness(f, first, cfg)});
      memo.emplace(key, out.back().report);
      continue;
    }
    UsefulnessReport r = it->second;
    r.candidates = 0;
    r.score = usefulness_score(f, r, cfg.usefulness);
    out.push_back({f, r});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedDecomposition& a, const RankedDecomposition& b) {
    if (a.report.score != b.report.score) return a.report.score > b.report.score;
    auto ca = a.f.constraints(), cb = b.f.constraints();
    if (ca.size() != cb.size()) return ca.size() < cb.size();
    return ca < cb;
  });
  return out;
}

}  // namespace dac
