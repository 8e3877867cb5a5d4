#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dac/core.hpp"
#include "dac/divide.hpp"
#include "dac/encode.hpp"

namespace dac {

enum class Op : std::uint8_t {
  border, inner, color, shape, replace, cut, denoise, move, scale, rotate, mirror, complement,
  drop_first, drop_last, take_from_front, take_from_back, to_uppercase, to_lowercase, capitalize_first,
  add_space, add_dot, add_comma, replace_text
};

enum class Reference { most_colorful, largest, other };
enum class MoveMode { by, to, in };
enum class Direction { up, down, left, right };
enum class SlotFill { none, enumerated, analytic, hole };

inline const std::array<std::string, 10> kColorNames = {"black", "blue",    "red",    "green", "yellow",
                                                        "grey",  "magenta", "orange", "azure", "maroon"};

inline std::string color_name(int c) { return c >= 0 && c < kColorCount ? kColorNames[c] : std::to_string(c); }

// a primitive application with all arguments bound
struct Step {
  Op op = Op::color;
  int option = 0;  // enumerated choice: Reference, MoveMode, or n for the string slicers
  int a = 0;       // color, row offset/target, scale numerator, quarter turns, axis, direction
  int b = 0;       // col offset/target, scale denominator
  Shape mask;
  std::string text;

  bool operator==(const Step& o) const {
    return op == o.op && option == o.option && a == o.a && b == o.b && mask == o.mask && text == o.text;
  }

  int cost() const {
    if (op == Op::shape) return 1 + mask.height * mask.width;
    if (op == Op::replace_text) return 1 + static_cast<int>(text.size());
    return 1;
  }

  std::string render() const {
    static const char* refs[] = {"most_colorful", "largest", "other"};
    static const char* dirs[] = {"up", "down", "left", "right"};
    auto n = std::to_string(option);
    switch (op) {
      case Op::border: return "border(" + color_name(a) + ")";
      case Op::inner: return "inner()";
      case Op::color: return "color(" + color_name(a) + ")";
      case Op::shape: return "shape(" + mask.str() + ")";
      case Op::replace: return std::string("replace_by(") + refs[option] + ")";
      case Op::cut: return "cut(" + color_name(a) + ")";
      case Op::denoise: return "denoise()";
      case Op::move:
        if (option == static_cast<int>(MoveMode::by)) return "move_by(" + std::to_string(a) + "," + std::to_string(b) + ")";
        if (option == static_cast<int>(MoveMode::to)) return "move_to(" + std::to_string(a) + "," + std::to_string(b) + ")";
        return std::string("move_in(") + dirs[a] + ")";
      case Op::scale: return "scale(" + (b == 1 ? std::to_string(a) : "1/" + std::to_string(b)) + ")";
      case Op::rotate: return "rotate(" + std::to_string(90 * a) + ")";
      case Op::mirror: return std::string("mirror(") + (a == 0 ? "h" : "v") + ")";
      case Op::complement: return "complement()";
      case Op::drop_first: return "drop_first(" + n + ")";
      case Op::drop_last: return "drop_last(" + n + ")";
      case Op::take_from_front: return "take_from_front(" + n + ")";
      case Op::take_from_back: return "take_from_back(" + n + ")";
      case Op::to_uppercase: return "to_uppercase()";
      case Op::to_lowercase: return "to_lowercase()";
      case Op::capitalize_first: return "capitalize_first()";
      case Op::add_space: return "add_space()";
      case Op::add_dot: return "add_dot()";
      case Op::add_comma: return "add_comma()";
      case Op::replace_text: return "replace(\"" + text + "\")";
    }
    return "?";
  }
};

struct TransformProgram {
  std::vector<Step> steps;

  std::size_t length() const { return steps.size(); }
  int cost() const {
    int c = 0;
    for (const auto& s : steps) c += s.cost();
    return c;
  }
  std::string render() const {
    if (steps.empty()) return "o.identity()";
    std::string s = "o";
    for (const auto& st : steps) s += "." + st.render();
    return s;
  }
  bool operator==(const TransformProgram&) const = default;
};

struct PrimitiveDescriptor {
  std::string name;
  Op op;
  SlotFill fill = SlotFill::none;
  int options = 1;  // enumerated alternatives; 0 means 1..length of the current value
};

struct TransformGrammar {
  Domain domain = Domain::grid;
  std::vector<PrimitiveDescriptor> primitives;
};

inline TransformGrammar arc_transform_grammar() {
  return {Domain::grid,
          {{"border", Op::border, SlotFill::hole, 1},
           {"inner", Op::inner, SlotFill::none, 1},
           {"color", Op::color, SlotFill::analytic, 1},
           {"shape", Op::shape, SlotFill::analytic, 1},
           {"replace", Op::replace, SlotFill::enumerated, 3},
           {"cut", Op::cut, SlotFill::hole, 1},
           {"denoise", Op::denoise, SlotFill::none, 1},
           {"move", Op::move, SlotFill::hole, 3},
           {"scale", Op::scale, SlotFill::hole, 1},
           {"rotate", Op::rotate, SlotFill::hole, 1},
           {"mirror", Op::mirror, SlotFill::hole, 1},
           {"complement", Op::complement, SlotFill::none, 1}}};
}

inline TransformGrammar string_transform_grammar() {
  return {Domain::string,
          {{"drop_first", Op::drop_first, SlotFill::enumerated, 0},
           {"drop_last", Op::drop_last, SlotFill::enumerated, 0},
           {"take_from_front", Op::take_from_front, SlotFill::enumerated, 0},
           {"take_from_back", Op::take_from_back, SlotFill::enumerated, 0},
           {"to_uppercase", Op::to_uppercase, SlotFill::none, 1},
           {"to_lowercase", Op::to_lowercase, SlotFill::none, 1},
           {"capitalize_first", Op::capitalize_first, SlotFill::none, 1},
           {"add_space", Op::add_space, SlotFill::none, 1},
           {"add_dot", Op::add_dot, SlotFill::none, 1},
           {"add_comma", Op::add_comma, SlotFill::none, 1},
           {"replace", Op::replace_text, SlotFill::analytic, 1}}};
}

struct SceneContext {
  const Segmentation* input = nullptr;
  int height = 0;
  int width = 0;
};

namespace detail {

inline std::set<std::pair<int, int>> positions(const GridPart& p) {
  std::set<std::pair<int, int>> s;
  for (const auto& x : p.cells) s.insert({x.row, x.col});
  return s;
}

inline Component with_cells(const Component& src, std::vector<Cell> cells) {
  Component c = src;
  c.grid().cells = std::move(cells);
  c.grid().normalize();
  return c;
}

inline std::vector<Cell> relative(const GridPart& p) {
  Box b = p.bbox();
  std::vector<Cell> out;
  for (const auto& x : p.cells) out.push_back({x.row - b.row, x.col - b.col, x.color});
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Cell> outline(const GridPart& p) {
  auto pos = positions(p);
  std::vector<Cell> out;
  static constexpr int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
  for (const auto& x : p.cells)
    for (int k = 0; k < 4; ++k)
      if (!pos.count({x.row + dr[k], x.col + dc[k]})) {
        out.push_back(x);
        break;
      }
  return out;
}

inline const Component* select_reference(Reference ref, const Component& self, const SceneContext& ctx) {
  if (!ctx.input) return nullptr;
  const Component* best = nullptr;
  Shape own = Shape::of(self.grid());
  for (const auto& c : ctx.input->components) {
    if (c.is_background()) continue;
    if (ref == Reference::most_colorful) {
      auto score = [](const Component& x) { return std::pair{count_colors(x.grid()), x.size()}; };
      if (!best || score(c) > score(*best)) best = &c;
    } else if (ref == Reference::largest) {
      if (!best || c.size() > best->size()) best = &c;
    } else {
      if (c.id == self.id || Shape::of(c.grid()) == own) continue;
      if (!best || c.size() > best->size()) best = &c;
    }
  }
  return best;
}

inline std::vector<Cell> rotate_cells(const GridPart& p, int quarter_turns) {
  Box b = p.bbox();
  std::vector<Cell> out;
  for (const auto& x : p.cells) {
    int r = x.row - b.row, c = x.col - b.col, h = b.height, w = b.width;
    int nr = r, nc = c;
    for (int k = 0; k < quarter_turns; ++k) {
      int tr = nc, tc = h - 1 - nr;
      nr = tr;
      nc = tc;
      std::swap(h, w);
    }
    out.push_back({b.row + nr, b.col + nc, x.color});
  }
  return out;
}

inline bool blocked(const std::vector<Cell>& cells, const std::set<std::pair<int, int>>& obstacles, int h, int w) {
  for (const auto& x : cells)
    if (x.row < 0 || x.col < 0 || x.row >= h || x.col >= w || obstacles.count({x.row, x.col})) return true;
  return false;
}

inline std::vector<Cell> shifted(const std::vector<Cell>& cells, int dr, int dc) {
  std::vector<Cell> out = cells;
  for (auto& x : out) {
    x.row += dr;
    x.col += dc;
  }
  return out;
}

inline std::vector<Cell> slide(const Component& v, Direction d, const SceneContext& ctx) {
  static constexpr int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
  std::set<std::pair<int, int>> obstacles;
  if (ctx.input)
    for (const auto& c : ctx.input->components)
      if (!c.is_background() && c.id != v.id)
        for (const auto& x : c.grid().cells) obstacles.insert({x.row, x.col});
  auto cur = v.grid().cells;
  const int k = static_cast<int>(d);
  for (int guard = 0; guard < 2 * kMaxGridSide + 2; ++guard) {
    auto next = shifted(cur, dr[k], dc[k]);
    if (blocked(next, obstacles, ctx.height, ctx.width)) break;
    cur = std::move(next);
  }
  return cur;
}

inline std::string fold(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace detail

// executes one bound step; nullopt is an execution error
inline std::optional<Component> execute(const Step& s, const Component& v, const SceneContext& ctx) {
  using namespace detail;
  if (!v.is_grid()) {
    std::string t = v.text().content;
    const int n = s.option, len = static_cast<int>(t.size());
    switch (s.op) {
      case Op::drop_first:
        if (n < 1 || n >= len) return std::nullopt;
        t = t.substr(n);
        break;
      case Op::drop_last:
        if (n < 1 || n >= len) return std::nullopt;
        t = t.substr(0, len - n);
        break;
      case Op::take_from_front:
        if (n < 1 || n > len) return std::nullopt;
        t = t.substr(0, n);
        break;
      case Op::take_from_back:
        if (n < 1 || n > len) return std::nullopt;
        t = t.substr(len - n);
        break;
      case Op::to_uppercase:
        for (auto& ch : t) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        break;
      case Op::to_lowercase:
        for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        break;
      case Op::capitalize_first:
        if (t.empty()) return std::nullopt;
        t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
        break;
      case Op::add_space: t += ' '; break;
      case Op::add_dot: t += '.'; break;
      case Op::add_comma: t += ','; break;
      case Op::replace_text: t = s.text; break;
      default: return std::nullopt;
    }
    Component out = v;
    out.text().content = std::move(t);
    return out;
  }

  const auto& p = v.grid();
  if (p.cells.empty()) return std::nullopt;
  Box b = p.bbox();
  std::vector<Cell> cells;
  switch (s.op) {
    case Op::border: {
      auto edge = outline(p);
      std::set<std::pair<int, int>> on;
      for (const auto& x : edge) on.insert({x.row, x.col});
      cells = p.cells;
      for (auto& x : cells)
        if (on.count({x.row, x.col})) x.color = s.a;
      break;
    }
    case Op::inner: {
      auto edge = outline(p);
      std::set<std::pair<int, int>> on;
      for (const auto& x : edge) on.insert({x.row, x.col});
      for (const auto& x : p.cells)
        if (!on.count({x.row, x.col})) cells.push_back(x);
      break;
    }
    case Op::color:
      cells = p.cells;
      for (auto& x : cells) x.color = s.a;
      break;
    case Op::shape: {
      std::map<std::pair<int, int>, Color> old;
      for (const auto& x : p.cells) old[{x.row, x.col}] = x.color;
      Color fill = dominant_color(p);
      for (int r = 0; r < s.mask.height; ++r)
        for (int c = 0; c < s.mask.width; ++c) {
          if (!s.mask.at(r, c)) continue;
          auto it = old.find({b.row + r, b.col + c});
          cells.push_back({b.row + r, b.col + c, it == old.end() ? fill : it->second});
        }
      break;
    }
    case Op::replace: {
      const Component* ref = select_reference(static_cast<Reference>(s.option), v, ctx);
      if (!ref) return std::nullopt;
      Box rb = ref->grid().bbox();
      int dr = b.row + (b.height - rb.height) / 2 - rb.row;
      int dc = b.col + (b.width - rb.width) / 2 - rb.col;
      cells = shifted(ref->grid().cells, dr, dc);
      break;
    }
    case Op::cut:
      for (const auto& x : p.cells)
        if (x.color != s.a) cells.push_back(x);
      break;
    case Op::denoise: {
      std::map<std::pair<int, int>, Color> at;
      for (const auto& x : p.cells) at[{x.row, x.col}] = x.color;
      for (const auto& x : p.cells) {
        bool kept = false;
        for (int dr = -1; dr <= 1 && !kept; ++dr)
          for (int dc = -1; dc <= 1 && !kept; ++dc) {
            if (!dr && !dc) continue;
            auto it = at.find({x.row + dr, x.col + dc});
            kept = it != at.end() && it->second == x.color;
          }
        if (kept) cells.push_back(x);
      }
      break;
    }
    case Op::move:
      if (s.option == static_cast<int>(MoveMode::by))
        cells = shifted(p.cells, s.a, s.b);
      else if (s.option == static_cast<int>(MoveMode::to))
        cells = shifted(p.cells, s.a - b.row, s.b - b.col);
      else
        cells = slide(v, static_cast<Direction>(s.a), ctx);
      break;
    case Op::scale:
      if (s.b == 1) {
        for (const auto& x : p.cells)
          for (int i = 0; i < s.a; ++i)
            for (int j = 0; j < s.a; ++j)
              cells.push_back({b.row + (x.row - b.row) * s.a + i, b.col + (x.col - b.col) * s.a + j, x.color});
      } else {
        if (b.height % s.b || b.width % s.b) return std::nullopt;
        for (const auto& x : p.cells)
          if ((x.row - b.row) % s.b == 0 && (x.col - b.col) % s.b == 0)
            cells.push_back({b.row + (x.row - b.row) / s.b, b.col + (x.col - b.col) / s.b, x.color});
      }
      break;
    case Op::rotate:
      cells = rotate_cells(p, s.a);
      break;
    case Op::mirror:
      for (const auto& x : p.cells)
        if (s.a == 0)
          cells.push_back({x.row, b.col + b.width - 1 - (x.col - b.col), x.color});
        else
          cells.push_back({b.row + b.height - 1 - (x.row - b.row), x.col, x.color});
      break;
    case Op::complement: {
      auto pos = positions(p);
      Color fill = dominant_color(p);
      for (int r = b.row; r <= b.bottom(); ++r)
        for (int c = b.col; c <= b.right(); ++c)
          if (!pos.count({r, c})) cells.push_back({r, c, fill});
      break;
    }
    default: return std::nullopt;
  }
  if (cells.empty()) return std::nullopt;
  return with_cells(v, std::move(cells));
}

inline std::optional<Component> execute(const TransformProgram& prog, const Component& v, const SceneContext& ctx) {
  std::optional<Component> cur = v;
  for (const auto& s : prog.steps) {
    cur = execute(s, *cur, ctx);
    if (!cur) return std::nullopt;
  }
  return cur;
}

// binds the argument slots of a primitive against the target; nullopt is a hole error
inline std::optional<Step> fill_hole(const PrimitiveDescriptor& prim, int option, const Component& v,
                                     const Component& target, const SceneContext& ctx) {
  using namespace detail;
  Step s;
  s.op = prim.op;
  s.option = option;
  if (!v.is_grid()) {
    if (prim.op == Op::replace_text) s.text = target.text().content;
    return s;
  }
  const auto& p = v.grid();
  const auto& t = target.grid();
  if (p.cells.empty() || t.cells.empty()) return std::nullopt;
  Box b = p.bbox(), tb = t.bbox();
  switch (prim.op) {
    case Op::border: {
      std::map<std::pair<int, int>, Color> at;
      for (const auto& x : t.cells) at[{x.row, x.col}] = x.color;
      std::optional<Color> c;
      for (const auto& x : outline(p)) {
        auto it = at.find({x.row, x.col});
        if (it == at.end() || (c && *c != it->second)) return std::nullopt;
        c = it->second;
      }
      if (!c) return std::nullopt;
      s.a = *c;
      return s;
    }
    case Op::color: s.a = dominant_color(t); return s;
    case Op::shape: s.mask = Shape::of(t); return s;
    case Op::cut: {
      std::set<Color> have, want;
      for (const auto& x : p.cells) have.insert(x.color);
      for (const auto& x : t.cells) want.insert(x.color);
      std::vector<Color> gone;
      for (Color c : have)
        if (!want.count(c)) gone.push_back(c);
      if (gone.size() != 1 || have.size() < 2) return std::nullopt;
      s.a = gone.front();
      return s;
    }
    case Op::move: {
      int dr = tb.row - b.row, dc = tb.col - b.col;
      if (!dr && !dc) return std::nullopt;
      if (option == static_cast<int>(MoveMode::by)) {
        s.a = dr;
        s.b = dc;
      } else if (option == static_cast<int>(MoveMode::to)) {
        s.a = tb.row;
        s.b = tb.col;
      } else {
        if (dr && dc) return std::nullopt;
        Direction d = dr < 0 ? Direction::up : dr > 0 ? Direction::down : dc < 0 ? Direction::left : Direction::right;
        auto moved = slide(v, d, ctx);
        GridPart q{moved, false};
        Box mb = q.bbox();
        if (mb.row != tb.row || mb.col != tb.col) return std::nullopt;
        s.a = static_cast<int>(d);
      }
      return s;
    }
    case Op::scale: {
      if (tb.height % b.height == 0 && tb.width % b.width == 0 && tb.height / b.height == tb.width / b.width &&
          tb.height > b.height) {
        s.a = tb.height / b.height;
        s.b = 1;
        return s;
      }
      if (b.height % tb.height == 0 && b.width % tb.width == 0 && b.height / tb.height == b.width / tb.width &&
          b.height > tb.height) {
        s.a = 1;
        s.b = b.height / tb.height;
        return s;
      }
      return std::nullopt;
    }
    case Op::rotate:
    case Op::mirror: {
      const int n = prim.op == Op::rotate ? 3 : 2;
      auto want = relative(t);
      Shape want_mask = Shape::of(t);
      std::optional<int> by_mask;
      for (int k = 0; k < n; ++k) {
        Step probe = s;
        probe.a = prim.op == Op::rotate ? k + 1 : k;
        auto out = execute(probe, v, ctx);
        if (!out || out->grid().cells == p.cells) continue;
        if (relative(out->grid()) == want) return probe;
        if (!by_mask && Shape::of(out->grid()) == want_mask) by_mask = probe.a;
      }
      if (!by_mask) return std::nullopt;
      s.a = *by_mask;
      return s;
    }
    default: return s;
  }
}

// sound reachability test for string chains: every primitive keeps a case-changed substring
// and appends at most one separator per step
inline bool string_reachable(const std::string& value, const std::string& target, int remaining) {
  auto v = detail::fold(value), t = detail::fold(target);
  const int n = static_cast<int>(t.size());
  for (int j = n; j >= 0 && n - j <= remaining; --j) {
    if (j < n) {
      char ch = t[j];
      if (ch != ' ' && ch != '.' && ch != ',') return false;
    }
    if (v.find(t.substr(0, j)) != std::string::npos) return true;
  }
  return false;
}

}  // namespace dac
