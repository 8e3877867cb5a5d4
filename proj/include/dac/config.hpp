#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "dac/align.hpp"
#include "dac/core.hpp"

namespace dac {

enum class Ablation { none, no_align, no_divide };

inline std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::none: return "none";
    case Ablation::no_align: return "no-align";
    case Ablation::no_divide: return "no-divide";
  }
  return "none";
}

inline Ablation parse_ablation(const std::string& s) {
  if (s == "none") return Ablation::none;
  if (s == "no-align") return Ablation::no_align;
  if (s == "no-divide") return Ablation::no_divide;
  throw std::invalid_argument("unknown ablation: " + s);
}

// weights of the additive log-form usefulness estimate
struct UsefulnessWeights {
  double success = 1e6;
  double program_cost = 1.0;
  double constraint = 1.0;
  double alignment = 1.0;
  int probe_depth = 1;
};

struct Config {
  Domain domain = Domain::grid;
  int depth = 4;
  double timeout = 120.0;
  double w0 = 1.0;
  double w1 = 0.5;
  bool dedup = false;
  int j = 3;
  double w = 0.0;  // <= 0 selects m + 1
  Ablation ablation = Ablation::none;
  std::uint64_t seed = 0;
  bool exhaustive = false;
  UsefulnessWeights usefulness;
  std::size_t mh_budget = 2000;
  std::size_t max_covers = 2000;
  std::size_t max_truncations = 256;

  void validate() const {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (!(timeout > 0)) throw std::invalid_argument("timeout must be positive");
    if (!(w0 > w1) || w1 < 0) throw std::invalid_argument("weights need w0 > w1 >= 0");
    if (j < 1) throw std::invalid_argument("j must be >= 1");
  }

  AlignConfig align() const {
    AlignConfig a;
    a.w0 = w0;
    a.w1 = w1;
    a.dedup = dedup;
    a.mh_budget = mh_budget;
    return a;
  }
};

}  // namespace dac
