#include <gtest/gtest.h>

#include "dac/transform.hpp"

using namespace dac;

namespace {

Component grid_comp(std::vector<Cell> cells, std::uint32_t id = 1) {
  Component c{id, Side::input, 0, GridPart{std::move(cells)}};
  c.grid().normalize();
  return c;
}

Component text_comp(std::string s) { return Component{0, Side::input, 0, TextPart{std::move(s)}}; }

const PrimitiveDescriptor& prim(const TransformGrammar& g, Op op) {
  for (const auto& p : g.primitives)
    if (p.op == op) return p;
  throw std::logic_error("missing primitive");
}

std::vector<Cell> square(int r0, int c0, int n, Color color) {
  std::vector<Cell> out;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.push_back({r0 + r, c0 + c, color});
  return out;
}

}  // namespace

TEST(Execute, IdentityChain) {
  auto c = grid_comp({{1, 1, 4}, {1, 2, 5}});
  auto out = execute(TransformProgram{}, c, SceneContext{});
  ASSERT_TRUE(out);
  EXPECT_TRUE(out->same_content(c));
  EXPECT_EQ(TransformProgram{}.render(), "o.identity()");
}

TEST(Execute, Uppercase) {
  auto out = execute(Step{Op::to_uppercase}, text_comp("abC,"), SceneContext{});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->text().content, "ABC,");
}

TEST(Execute, Rotate180ReversesWithinBox) {
  auto c = grid_comp({{2, 3, 1}, {3, 3, 2}});  // 2x1: 1 over 2
  Step s{Op::rotate};
  s.a = 2;
  auto out = execute(s, c, SceneContext{});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->grid().cells, (std::vector<Cell>{{2, 3, 2}, {3, 3, 1}}));
}

TEST(Execute, Rotate90Clockwise) {
  // row 0: a b  ->  column layout after a clockwise quarter turn: a over b
  auto c = grid_comp({{0, 0, 1}, {0, 1, 2}});
  Step s{Op::rotate};
  s.a = 1;
  auto out = execute(s, c, SceneContext{});
  ASSERT_TRUE(out);
  EXPECT_EQ(out->grid().cells, (std::vector<Cell>{{0, 0, 1}, {1, 0, 2}}));
}

TEST(Execute, StringSlicers) {
  SceneContext ctx;
  Step take{Op::take_from_front, 5};
  EXPECT_EQ(execute(take, text_comp("08.30 Stop at bakery,"), ctx)->text().content, "08.30");
  Step back{Op::take_from_back, 3};
  EXPECT_EQ(execute(back, text_comp("abcdef"), ctx)->text().content, "def");
  Step drop{Op::drop_first, 6};
  EXPECT_FALSE(execute(drop, text_comp("abcdef"), ctx));  // would leave nothing
  Step drop_last{Op::drop_last, 1};
  EXPECT_EQ(execute(drop_last, text_comp("ab,"), ctx)->text().content, "ab");
  EXPECT_EQ(execute(Step{Op::add_comma}, text_comp("a"), ctx)->text().content, "a,");
  EXPECT_EQ(execute(Step{Op::capitalize_first}, text_comp("abc"), ctx)->text().content, "Abc");
}

TEST(Execute, BorderInnerComplement) {
  auto sq = grid_comp(square(0, 0, 3, 7));
  Step border{Op::border};
  border.a = 2;
  auto b = execute(border, sq, SceneContext{});
  ASSERT_TRUE(b);
  int red = 0;
  for (const auto& x : b->grid().cells) red += x.color == 2;
  EXPECT_EQ(red, 8);
  auto in = execute(Step{Op::inner}, sq, SceneContext{});
  ASSERT_TRUE(in);
  EXPECT_EQ(in->grid().cells, (std::vector<Cell>{{1, 1, 7}}));
  EXPECT_FALSE(execute(Step{Op::complement}, sq, SceneContext{}));  // solid box has no complement
}

TEST(Execute, ReplaceByOtherCentersReference) {
  Segmentation scene;
  scene.components.push_back(grid_comp(square(0, 0, 3, 7), 1));
  scene.components.push_back(grid_comp({{5, 6, 7}, {6, 5, 7}, {6, 6, 7}, {6, 7, 7}, {7, 6, 7}}, 2));
  SceneContext ctx{&scene, 10, 10};
  Step s{Op::replace, static_cast<int>(Reference::other)};
  auto out = execute(s, scene.components[0], ctx);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->grid().cells, (std::vector<Cell>{{0, 1, 7}, {1, 0, 7}, {1, 1, 7}, {1, 2, 7}, {2, 1, 7}}));
  EXPECT_EQ(out->id, 1u);
}

TEST(Execute, MoveInSlidesToObstacle) {
  Segmentation scene;
  scene.components.push_back(grid_comp({{0, 0, 1}}, 1));
  scene.components.push_back(grid_comp({{0, 4, 2}}, 2));
  SceneContext ctx{&scene, 1, 6};
  Step s{Op::move, static_cast<int>(MoveMode::in)};
  s.a = static_cast<int>(Direction::right);
  auto out = execute(s, scene.components[0], ctx);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->grid().cells, (std::vector<Cell>{{0, 3, 1}}));
}

TEST(FillHole, ScaleByThree) {
  auto g = arc_transform_grammar();
  auto from = grid_comp({{2, 2, 4}});
  auto to = grid_comp(square(2, 2, 3, 4));
  auto s = fill_hole(prim(g, Op::scale), 0, from, to, SceneContext{});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->a, 3);
  auto out = execute(*s, from, SceneContext{});
  ASSERT_TRUE(out);
  EXPECT_TRUE(out->same_content(to));
}

TEST(FillHole, ScaleNonIntegerFails) {
  auto g = arc_transform_grammar();
  EXPECT_FALSE(fill_hole(prim(g, Op::scale), 0, grid_comp(square(0, 0, 2, 4)), grid_comp(square(0, 0, 3, 4)),
                         SceneContext{}));
}

TEST(FillHole, MoveToDisplacement) {
  auto g = arc_transform_grammar();
  auto from = grid_comp({{1, 1, 3}, {1, 2, 3}});
  auto to = grid_comp({{4, 0, 3}, {4, 1, 3}});
  auto s = fill_hole(prim(g, Op::move), static_cast<int>(MoveMode::by), from, to, SceneContext{});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->a, 3);
  EXPECT_EQ(s->b, -1);
  auto t = fill_hole(prim(g, Op::move), static_cast<int>(MoveMode::to), from, to, SceneContext{});
  ASSERT_TRUE(t);
  EXPECT_TRUE(execute(*t, from, SceneContext{})->same_content(to));
  EXPECT_FALSE(fill_hole(prim(g, Op::move), 0, from, from, SceneContext{}));
}

TEST(FillHole, ColorFromTarget) {
  auto g = arc_transform_grammar();
  auto s = fill_hole(prim(g, Op::color), 0, grid_comp({{0, 0, 7}}), grid_comp({{0, 0, 3}}), SceneContext{});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->render(), "color(green)");
}

TEST(FillHole, CutNeedsOneVanishedColor) {
  auto g = arc_transform_grammar();
  auto from = grid_comp({{0, 0, 1}, {0, 1, 2}});
  auto s = fill_hole(prim(g, Op::cut), 0, from, grid_comp({{0, 0, 1}}), SceneContext{});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->a, 2);
  EXPECT_FALSE(fill_hole(prim(g, Op::cut), 0, from, from, SceneContext{}));
}

TEST(Reachable, SoundForAppendingChains) {
  EXPECT_TRUE(string_reachable("08.30 Stop at bakery,", "08.30,", 2));
  EXPECT_TRUE(string_reachable("abc", "ABC", 1));
  EXPECT_FALSE(string_reachable("abc", "xyz", 4));
  EXPECT_FALSE(string_reachable("abc", "abc,,", 1));
  EXPECT_TRUE(string_reachable("abc", "abc,,", 2));
}

TEST(Render, StepsAndPrograms) {
  TransformProgram p;
  p.steps.push_back(Step{Op::replace, static_cast<int>(Reference::other)});
  Step c{Op::color};
  c.a = 3;
  p.steps.push_back(c);
  EXPECT_EQ(p.render(), "o.replace_by(other).color(green)");
  EXPECT_EQ(p.length(), 2u);
}
