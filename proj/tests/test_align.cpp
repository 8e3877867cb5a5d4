#include <gtest/gtest.h>

#include <set>

#include "dac/align.hpp"
#include "dac/io.hpp"

using namespace dac;

namespace {

struct Analogy {
  SceneEncoding solar, atom;
  int sun, planet, nucleus, electron;
};

// solar system as base, atom as target; the atom also carries a misleading temperature relation
Analogy solar_atom() {
  Analogy a;
  auto& s = a.solar;
  a.sun = s.add_entity(0, "sun");
  a.planet = s.add_entity(1, "planet");
  s.add_attribute("yellow", a.sun);
  int s_mass = s.add_relation("greater_mass", {a.sun, a.planet});
  int s_orbits = s.add_relation("orbits", {a.planet, a.sun});
  s.add_relation("cause", {s_mass, s_orbits});
  s.add_relation("greater_temperature", {a.sun, a.planet});
  s.finalize();

  auto& t = a.atom;
  a.nucleus = t.add_entity(0, "nucleus");
  a.electron = t.add_entity(1, "electron");
  int t_mass = t.add_relation("greater_mass", {a.nucleus, a.electron});
  int t_orbits = t.add_relation("orbits", {a.electron, a.nucleus});
  t.add_relation("cause", {t_mass, t_orbits});
  t.add_relation("greater_temperature", {a.electron, a.nucleus});
  t.finalize();
  return a;
}

std::set<std::string> functors(const Gmap& g, const MatchSet& ms, const SceneEncoding& base) {
  std::set<std::string> out;
  for (int m : g.mhs) out.insert(base[ms.mhs[m].base].functor);
  return out;
}

}  // namespace

TEST(Sme, SolarSystemAtomTopGmap) {
  auto a = solar_atom();
  auto ms = build_match_hypotheses(a.solar, a.atom);
  auto res = derive_gmaps(ms);
  ASSERT_FALSE(res.gmaps.empty());
  EXPECT_FALSE(res.budget_exceeded);
  const Gmap* top = &res.gmaps[0];
  for (const auto& g : res.gmaps)
    if (g.score > top->score) top = &g;
  EXPECT_EQ(top->entity_map, (std::vector<Binding>{{a.sun, a.nucleus}, {a.planet, a.electron}}));
  auto fs = functors(*top, ms, a.solar);
  EXPECT_TRUE(fs.count("orbits"));
  EXPECT_TRUE(fs.count("greater_mass"));
  EXPECT_TRUE(fs.count("cause"));
  EXPECT_FALSE(fs.count("greater_temperature"));
}

TEST(Sme, OrbitsFormsMh) {
  SceneEncoding b, t;
  int e = b.add_entity(0, "electron"), n = b.add_entity(1, "nucleus");
  b.add_relation("orbits", {e, n});
  b.finalize();
  int p = t.add_entity(0, "planet"), s = t.add_entity(1, "sun");
  t.add_relation("orbits", {p, s});
  t.finalize();
  auto ms = build_match_hypotheses(b, t);
  int relation_mhs = 0;
  for (const auto& mh : ms.mhs) relation_mhs += !mh.entity;
  EXPECT_EQ(relation_mhs, 1);
}

TEST(Sme, AttributesDoNotFormPredicateMhs) {
  SceneEncoding b, t;
  b.add_attribute("green", b.add_entity(0, "x"));
  b.finalize();
  t.add_attribute("green", t.add_entity(0, "y"));
  t.finalize();
  MhcRuleSet printed{false, false};
  EXPECT_EQ(build_match_hypotheses(b, t, printed).size(), 0u);
  MhcRuleSet relaxed{true, false};
  EXPECT_EQ(build_match_hypotheses(b, t, relaxed).size(), 2u);  // attribute mh plus its entity mh
}

TEST(Sme, EmptyTargetGivesNoMhs) {
  auto a = solar_atom();
  SceneEncoding empty;
  empty.finalize();
  EXPECT_EQ(build_match_hypotheses(a.solar, empty).size(), 0u);
  EXPECT_TRUE(derive_gmaps(build_match_hypotheses(a.solar, empty)).gmaps.empty());
}

TEST(Sme, ContradictoryBindingsStaySeparate) {
  SceneEncoding b, t;
  int x = b.add_entity(0, "a");
  b.add_relation("p", {x});
  b.add_relation("q", {x});
  b.finalize();
  int tx = t.add_entity(0, "x"), ty = t.add_entity(1, "y");
  t.add_relation("p", {tx});
  t.add_relation("q", {ty});
  t.finalize();
  auto ms = build_match_hypotheses(b, t);
  auto res = derive_gmaps(ms);
  ASSERT_EQ(res.gmaps.size(), 2u);
  for (const auto& g : res.gmaps) {
    EXPECT_EQ(g.entity_map.size(), 1u);
    EXPECT_TRUE(one_to_one(g.entity_map));
  }
}

TEST(Sme, SingleMhSingleGmap) {
  MatchSet ms;
  ms.mhs.push_back({0, 0, 1.0, 0, true, {}});
  ms.index();
  auto res = derive_gmaps(ms);
  ASSERT_EQ(res.gmaps.size(), 1u);
  EXPECT_EQ(res.gmaps[0].mhs, std::vector<int>{0});
}

TEST(Score, SingleMhIsOmegaZero) {
  MatchSet ms;
  ms.mhs.push_back({0, 0, 0.0, 1, true, {}});
  ms.index();
  Gmap g{{0}, {0}, {}, 0};
  EXPECT_DOUBLE_EQ(score(g, ms, 1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(score(g, ms, 2.0, 0.5), 2.0);
}

TEST(Score, TwoLevelHandComputation) {
  MatchSet ms;
  ms.mhs.push_back({0, 0, 1.0, 1, false, {1}});
  ms.mhs.push_back({1, 1, 1.0, 2, true, {}});
  ms.index();
  Gmap g{{0, 1}, {0}, {}, 0};
  EXPECT_DOUBLE_EQ(score(g, ms, 1.0, 0.5), 1 * 1 + 0.5 + 1 * 2 + 0.5);
}

TEST(Score, RejectsBadWeights) {
  MatchSet ms;
  ms.mhs.push_back({0, 0, 1.0, 1, true, {}});
  ms.index();
  Gmap g{{0}, {0}, {}, 0};
  EXPECT_THROW(score(g, ms, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(score(g, ms, 1.0, -0.1), std::invalid_argument);
}

TEST(Score, NestedBeatsFlat) {
  // nested: relation over relation over entity; flat: three sibling predicates on entities
  MatchSet nested;
  nested.mhs.push_back({0, 0, 0.0, 0, false, {1}});
  nested.mhs.push_back({1, 1, 0.0, 1, false, {2}});
  nested.mhs.push_back({2, 2, 0.0, 2, true, {}});
  nested.index();
  MatchSet flat;
  flat.mhs.push_back({0, 0, 0.0, 0, false, {2}});
  flat.mhs.push_back({1, 1, 0.0, 0, false, {2}});
  flat.mhs.push_back({2, 2, 0.0, 1, true, {}});
  flat.index();
  auto gn = derive_gmaps(nested).gmaps, gf = derive_gmaps(flat).gmaps;
  ASSERT_EQ(gn.size(), 1u);
  ASSERT_EQ(gf.size(), 1u);
  EXPECT_GT(gn[0].score, gf[0].score);
}

TEST(Rank, PositionMatchedSquareFirst) {
  auto task = load_arc_task(DAC_FIXTURES "/square_to_plus.json");
  auto f = *DecompositionFunction::from_atoms(Domain::grid, {"mono-colored", "direct-neighbors", "background-constant-0"});
  const auto& ex = task.train[1];  // two squares and a plus
  auto in = dac::apply(f, ex.input, Side::input, 1), out = dac::apply(f, ex.output, Side::output, 1);
  auto al = align_scenes(in, out);
  EXPECT_TRUE(al.encoded);
  for (const auto& o : out.components) {
    if (o.is_background()) continue;
    const Component* best = in.find(al.table[o.id].front().first);
    ASSERT_NE(best, nullptr);
    EXPECT_EQ(best->grid().bbox().row, o.grid().bbox().row);
    EXPECT_EQ(best->grid().bbox().col, o.grid().bbox().col);
  }
}

TEST(Rank, BackfillInIdOrder) {
  CorrTable t;
  finish_ranking(t, {4, 2, 9}, {1});
  EXPECT_EQ(t[1], (CorrList{{4, 0.0}, {2, 0.0}, {9, 0.0}}));
}

TEST(Rank, OneToOne) {
  auto f = *DecompositionFunction::from_atoms(Domain::grid, {"pixels"});
  auto in = dac::apply(f, Grid::from_rows({{1}})), out = dac::apply(f, Grid::from_rows({{2}}), Side::output);
  auto al = align_scenes(in, out);
  ASSERT_EQ(al.table.size(), 1u);
  EXPECT_EQ(al.table.begin()->second.size(), 1u);
}

TEST(Rank, EveryInputListedOncePerOutput) {
  auto task = load_arc_task(DAC_FIXTURES "/square_to_plus.json");
  auto f = *DecompositionFunction::from_atoms(Domain::grid, {"pixels", "background-inferred"});
  auto in = dac::apply(f, task.train[0].input), out = dac::apply(f, task.train[0].output, Side::output);
  for (const auto& al : {align_scenes(in, out), random_ranking(in, out, 3)})
    for (const auto& [o, list] : al.table) {
      std::set<std::uint32_t> ids;
      for (auto [i, s] : list) ids.insert(i);
      EXPECT_EQ(ids.size(), in.components.size());
      EXPECT_EQ(list.size(), in.components.size());
    }
}

TEST(Rank, GreedyFallbackStillRanks) {
  auto task = load_arc_task(DAC_FIXTURES "/square_to_plus.json");
  auto f = *DecompositionFunction::from_atoms(Domain::grid, {"mono-colored", "direct-neighbors", "background-constant-0"});
  auto in = dac::apply(f, task.train[1].input), out = dac::apply(f, task.train[1].output, Side::output);
  AlignConfig cfg;
  cfg.mh_budget = 1;
  auto al = align_scenes(in, out, cfg);
  EXPECT_TRUE(al.greedy);
  EXPECT_EQ(al.table.size(), out.components.size());
}
