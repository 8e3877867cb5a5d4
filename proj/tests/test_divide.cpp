#include <gtest/gtest.h>

#include <random>
#include <set>

#include "dac/divide.hpp"
#include "dac/io.hpp"
#include "dac/rank.hpp"

using namespace dac;

namespace {

DecompositionFunction atoms(Domain d, std::set<std::string> a) { return *DecompositionFunction::from_atoms(d, a); }

std::set<std::pair<int, int>> cell_set(const Component& c) {
  std::set<std::pair<int, int>> s;
  for (const auto& x : c.grid().cells) s.insert({x.row, x.col});
  return s;
}

}  // namespace

TEST(Grammar, ArcLanguageHasFifteenFunctions) {
  auto lang = arc_decomposition_grammar().language();
  EXPECT_EQ(lang.size(), 15u);
  bool found = false;
  for (const auto& f : lang)
    found = found || f.constraints() == std::vector<std::string>{"direct-neighbors", "mono-colored"};
  EXPECT_TRUE(found);
}

TEST(Grammar, StringLanguageIsEveryDelimiterSubsetPlusTotalSplit) {
  auto lang = string_decomposition_grammar().language();
  EXPECT_EQ(lang.size(), 256u);  // 255 nonempty subsets of 8 atoms + total split
  std::set<std::vector<std::string>> names;
  for (const auto& f : lang) names.insert(f.constraints());
  EXPECT_EQ(names.size(), lang.size());
}

TEST(Grammar, NoDerivationThrowsEmptyLanguage) {
  DecompositionGrammar g;
  g.domain = Domain::grid;
  g.start = "S";
  g.rules["S"] = {{"UNDEFINED"}};
  Task t{"t", Domain::grid, {{Grid::from_rows({{0}}), Grid::from_rows({{0}})}}, {}};
  EXPECT_THROW(extract_and_rank(g, t, Config{}), EmptyLanguage);
}

TEST(Grammar, SingleDerivationRanksFirst) {
  DecompositionGrammar g;
  g.domain = Domain::grid;
  g.start = "S";
  g.rules["S"] = {{"pixels"}};
  Task t{"t", Domain::grid, {{Grid::from_rows({{1}}), Grid::from_rows({{1}})}}, {}};
  auto r = extract_and_rank(g, t, Config{});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].f.constraints(), std::vector<std::string>{"pixels"});
}

TEST(ExtractAndRank, OutputIsPermutationOfLanguage) {
  auto task = load_arc_task(DAC_FIXTURES "/square_to_plus.json");
  auto g = arc_decomposition_grammar();
  auto ranked = extract_and_rank(g, task, Config{});
  auto lang = g.language();
  ASSERT_EQ(ranked.size(), lang.size());
  std::set<std::vector<std::string>> a, b;
  for (const auto& r : ranked) a.insert(r.f.constraints());
  for (const auto& f : lang) b.insert(f.constraints());
  EXPECT_EQ(a, b);
}

TEST(ExtractAndRank, CommaDelimiterBeatsTotalSplit) {
  auto task = load_string_task(DAC_FIXTURES "/uppercase_list.json", 2);
  Config cfg;
  cfg.domain = Domain::string;
  auto ranked = extract_and_rank(string_decomposition_grammar(), task, cfg);
  auto pos = [&](const std::vector<std::string>& c) {
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (ranked[i].f.constraints() == c) return i;
    return ranked.size();
  };
  EXPECT_LT(pos({"delim-comma"}), pos({"total-split"}));
}

TEST(Apply, MonoDirectTwoRows) {
  auto seg = dac::apply(atoms(Domain::grid, {"mono-colored", "direct-neighbors"}), Grid::from_rows({{1, 1}, {0, 0}}));
  ASSERT_EQ(seg.components.size(), 2u);
  EXPECT_EQ(seg.background(), nullptr);
  EXPECT_EQ(cell_set(seg.components[0]), (std::set<std::pair<int, int>>{{0, 0}, {0, 1}}));
  EXPECT_EQ(seg.components[0].grid().cells[0].color, 1);
  EXPECT_EQ(cell_set(seg.components[1]), (std::set<std::pair<int, int>>{{1, 0}, {1, 1}}));
  EXPECT_EQ(seg.components[1].grid().cells[0].color, 0);
}

TEST(Apply, CommaSplitKeepsDelimiter) {
  auto seg = dac::apply(atoms(Domain::string, std::set<std::string>{"delim-comma"}), std::string("08.30 Stop at bakery,09.00 Buy flowers"));
  ASSERT_EQ(seg.components.size(), 2u);
  EXPECT_EQ(seg.components[0].text().content, "08.30 Stop at bakery,");
  EXPECT_EQ(seg.components[1].text().content, "09.00 Buy flowers");
  EXPECT_EQ(seg.components[1].text().begin, 21);
  EXPECT_EQ(seg.components[0].text().index_back, 1);
}

TEST(Apply, SinglePixelUnderEveryFunction) {
  for (const auto& f : arc_decomposition_grammar().language()) {
    if (f.background != BackgroundPolicy::none) continue;
    auto seg = dac::apply(f, Grid::from_rows({{4}}));
    ASSERT_EQ(seg.components.size(), 1u);
    EXPECT_EQ(seg.components[0].grid().cells, (std::vector<Cell>{{0, 0, 4}}));
  }
}

TEST(Apply, DiagonalJoinsCorners) {
  Grid g = Grid::from_rows({{1, 0}, {0, 1}});
  EXPECT_EQ(dac::apply(atoms(Domain::grid, {"mono-colored", "diagonal-neighbors", "background-constant-0"}), g)
                .components.size(),
            2u);  // background + one diagonal object
  EXPECT_EQ(dac::apply(atoms(Domain::grid, {"mono-colored", "direct-neighbors", "background-constant-0"}), g)
                .components.size(),
            3u);
}

TEST(Apply, MulticolorMergesTouchingColors) {
  Grid g = Grid::from_rows({{1, 2}, {0, 0}});
  auto seg = dac::apply(atoms(Domain::grid, {"multicolor", "direct-neighbors", "background-inferred"}), g);
  ASSERT_EQ(seg.components.size(), 2u);
  EXPECT_TRUE(seg.components[0].is_background());
  EXPECT_EQ(seg.components[1].size(), 2u);
}

TEST(InferBackground, Examples) {
  EXPECT_EQ(infer_background_color(Grid::from_rows({{0, 0}, {0, 3}})), 0);
  EXPECT_EQ(infer_background_color(Grid::from_rows({{5}})), 5);
  EXPECT_EQ(infer_background_color(Grid::from_rows({{1, 2}, {2, 1}})), 1);
}

TEST(FromAtoms, RejectsInvalidCombinations) {
  EXPECT_FALSE(DecompositionFunction::from_atoms(Domain::grid, {"pixels", "direct-neighbors"}));
  EXPECT_FALSE(DecompositionFunction::from_atoms(Domain::grid, {"mono-colored"}));
  EXPECT_FALSE(DecompositionFunction::from_atoms(Domain::string, {}));
  EXPECT_FALSE(DecompositionFunction::from_atoms(Domain::string, {"total-split", "delim-comma"}));
  EXPECT_TRUE(DecompositionFunction::from_atoms(Domain::grid, {"pixels", "background-inferred"}));
}

// non-background components are disjoint and, with the background, cover every cell
TEST(Property, GridPartition) {
  std::mt19937_64 rng(7);
  auto lang = arc_decomposition_grammar().language();
  for (int trial = 0; trial < 200; ++trial) {
    int h = 1 + rng() % 10, w = 1 + rng() % 10;
    int colors = 1 + rng() % 4;
    std::vector<std::vector<int>> rows(h, std::vector<int>(w));
    for (auto& row : rows)
      for (auto& v : row) v = rng() % colors;
    Grid g = Grid::from_rows(rows);
    for (const auto& f : lang) {
      auto seg = dac::apply(f, g);
      std::vector<int> hits(h * w, 0);
      for (const auto& c : seg.components) {
        if (c.is_background()) continue;
        for (const auto& x : c.grid().cells) {
          ++hits[x.row * w + x.col];
          EXPECT_EQ(x.color, g.at(x.row, x.col));
        }
      }
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          EXPECT_LE(hits[r * w + c], 1);
          if (!hits[r * w + c]) ASSERT_NE(seg.background(), nullptr);
        }
      // the round trip through compose restores the grid
      CanvasSpec canvas = GridCanvas{h, w, seg.background() ? seg.background()->grid().cells[0].color : 0};
      EXPECT_EQ(compose(seg.components, canvas).value, Value(g));
    }
  }
}

TEST(Property, StringRoundTrip) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "ab1 ,.:;-/Z";
  auto lang = string_decomposition_grammar().language();
  for (int trial = 0; trial < 100; ++trial) {
    std::string s;
    int n = 1 + rng() % 20;
    for (int i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    for (const auto& f : lang) {
      auto seg = dac::apply(f, s);
      std::string joined;
      for (const auto& c : seg.components) joined += c.text().content;
      EXPECT_EQ(joined, s);
      EXPECT_EQ(compose(seg.components, TextCanvas{}).value, Value(s));
    }
  }
}
