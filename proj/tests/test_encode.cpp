#include <gtest/gtest.h>

#include "dac/divide.hpp"
#include "dac/encode.hpp"

using namespace dac;

namespace {

DecompositionFunction objects_on_black() {
  return *DecompositionFunction::from_atoms(Domain::grid, {"mono-colored", "direct-neighbors", "background-constant-0"});
}

bool has_relation(const SceneEncoding& enc, const std::string& functor, std::uint32_t a, std::uint32_t b) {
  for (const auto& e : enc.expressions())
    if (e.kind == ExprKind::relation && e.functor == functor && enc[e.args[0]].component == a &&
        enc[e.args[1]].component == b)
      return true;
  return false;
}

}  // namespace

TEST(Features, SolidSquareInFiveObjectScene) {
  Grid g = Grid::from_rows({{3, 3, 0, 1, 0, 2},
                            {3, 3, 0, 0, 0, 0},
                            {0, 0, 0, 4, 0, 5},
                            {0, 0, 0, 0, 0, 0}});
  auto seg = dac::apply(objects_on_black(), g);
  ASSERT_EQ(seg.components.size(), 6u);  // background + 5 objects
  auto fv = features(seg.components[1], seg);
  EXPECT_EQ(fv.integer("color"), 3);
  EXPECT_EQ(fv.integer("size"), 4);
  EXPECT_EQ(fv.integer("width"), 2);
  EXPECT_EQ(fv.integer("height"), 2);
  EXPECT_TRUE(fv.flag("filled"));
  EXPECT_EQ(fv.integer("num_colors"), 1);
  EXPECT_EQ(fv.integer("row_origin_bbox"), 0);
  EXPECT_EQ(fv.integer("ranked_size"), 1);  // largest object, after the background
}

TEST(Features, TimeSubstring) {
  auto seg = dac::apply(*DecompositionFunction::from_atoms(Domain::string, {"delim-space"}), std::string("08.30 Lunch"));
  auto fv = features(seg.components[0], seg);
  EXPECT_EQ(fv.integer("length"), 6);  // "08.30 " keeps its delimiter
  seg = dac::apply(*DecompositionFunction::from_atoms(Domain::string, {"delim-comma"}), std::string("08.30"));
  fv = features(seg.components[0], seg);
  EXPECT_EQ(fv.integer("length"), 5);
  EXPECT_FALSE(fv.flag("all_digits"));
  EXPECT_EQ(fv.integer("number_of_digits"), 4);
  EXPECT_EQ(fv.integer("index_front"), 0);
  EXPECT_FALSE(fv.flag("starts_with_upper"));
}

TEST(Features, SinglePixel) {
  auto seg = dac::apply(objects_on_black(), Grid::from_rows({{0, 0}, {0, 6}}));
  auto fv = features(seg.components[1], seg);
  EXPECT_EQ(fv.integer("size"), 1);
  EXPECT_EQ(fv.integer("width"), 1);
  EXPECT_EQ(fv.integer("height"), 1);
  EXPECT_TRUE(fv.flag("filled"));
}

TEST(Features, TableOrderAndCount) {
  auto seg = dac::apply(objects_on_black(), Grid::from_rows({{1}}));
  EXPECT_EQ(scene_features(seg)[0].items.size(), 15u);
  auto sseg = dac::apply(DecompositionFunction::whole_value(Domain::string), std::string("ab"));
  EXPECT_EQ(scene_features(sseg)[0].items.size(), 14u);
}

TEST(Features, ShapeString) {
  GridPart plus{{{0, 1, 7}, {1, 0, 7}, {1, 1, 7}, {1, 2, 7}, {2, 1, 7}}};
  EXPECT_EQ(Shape::of(plus).str(), "[010/111/010]");
}

TEST(Encode, AdjacentObjectsAreLeftOfAndConnected) {
  auto seg = dac::apply(objects_on_black(), Grid::from_rows({{1, 2}}));
  auto enc = encode_scene(seg);
  EXPECT_TRUE(has_relation(enc, "left-of", 1, 2));
  EXPECT_FALSE(has_relation(enc, "left-of", 2, 1));
  EXPECT_TRUE(has_relation(enc, "EC", 1, 2));
}

TEST(Encode, SingleComponentHasNoRelations) {
  auto seg = dac::apply(DecompositionFunction::whole_value(Domain::grid), Grid::from_rows({{1, 2}}));
  auto enc = encode_scene(seg);
  EXPECT_EQ(enc.count(ExprKind::entity), 1);
  EXPECT_EQ(enc.count(ExprKind::relation), 0);
}

TEST(Encode, TwoObjectStructure) {
  // a red bar beside a blue bar of equal width
  auto seg = dac::apply(objects_on_black(), Grid::from_rows({{2, 2, 0, 1, 1}}));
  auto enc = encode_scene(seg);
  EXPECT_EQ(enc.count(ExprKind::entity), 3);
  int width_eqs = 0;
  for (const auto& e : enc.expressions())
    if (e.kind == ExprKind::equivalence && enc[e.args[0]].functor == "width") {
      EXPECT_EQ(e.functor, "=ARITH");
      ++width_eqs;
    }
  EXPECT_EQ(width_eqs, 3);
  auto dump = enc.dump();
  EXPECT_NE(dump.find("(color=2 o1)"), std::string::npos);
  EXPECT_NE(dump.find("(color=1 o2)"), std::string::npos);
  EXPECT_NE(dump.find("(=ARITH (width o1) 2)"), std::string::npos);
  EXPECT_NE(dump.find("(left-of o1 o2)"), std::string::npos);
  EXPECT_NE(dump.find("(DC o1 o2)"), std::string::npos);
}

TEST(Encode, DepthsFromRoots) {
  auto seg = dac::apply(objects_on_black(), Grid::from_rows({{2}}));
  auto enc = encode_scene(seg);
  for (int i = 0; i < enc.size(); ++i) {
    const auto& e = enc[i];
    if (e.kind == ExprKind::equivalence || e.kind == ExprKind::relation) EXPECT_EQ(e.depth, 0);
    if (e.kind == ExprKind::function) EXPECT_EQ(e.depth, 1);
  }
}

TEST(Rcc8, Relations) {
  GridPart a{{{0, 0, 1}}}, b{{{0, 1, 1}}}, c{{{5, 5, 1}}};
  EXPECT_EQ(rcc8(a, b), Rcc8::EC);
  EXPECT_EQ(rcc8(a, c), Rcc8::DC);
  EXPECT_EQ(rcc8(a, a), Rcc8::EQ);
  GridPart big;
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) big.cells.push_back({r, col, 1});
  GridPart center{{{1, 1, 1}}};
  EXPECT_EQ(rcc8(center, big), Rcc8::NTPP);
  EXPECT_EQ(rcc8(a, big), Rcc8::TPP);
  EXPECT_EQ(rcc8(big, a), Rcc8::TPPi);
  GridPart ab{{{0, 0, 1}, {0, 1, 1}}}, bc{{{0, 1, 1}, {0, 2, 1}}};
  EXPECT_EQ(rcc8(ab, bc), Rcc8::PO);
}
