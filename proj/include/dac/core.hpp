#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dac {

using Color = int;

inline constexpr int kMaxGridSide = 30;
inline constexpr int kColorCount = 10;

struct DomainMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyCanvas : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, Color fill = 0)
      : height_(height), width_(width), cells_(static_cast<std::size_t>(height) * width, fill) {}

  static Grid from_rows(const std::vector<std::vector<int>>& rows) {
    if (rows.empty() || rows.front().empty()) throw ValidationError("grid must be nonempty");
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    if (h > kMaxGridSide || w > kMaxGridSide) throw ValidationError("grid exceeds 30x30");
    Grid g(h, w);
    for (int r = 0; r < h; ++r) {
      if (static_cast<int>(rows[r].size()) != w) throw ValidationError("grid is not rectangular");
      for (int c = 0; c < w; ++c) {
        const int v = rows[r][c];
        if (v < 0 || v >= kColorCount) throw ValidationError("color out of range: " + std::to_string(v));
        g.set(r, c, v);
      }
    }
    return g;
  }

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return cells_.empty(); }
  bool in_bounds(int r, int c) const { return r >= 0 && c >= 0 && r < height_ && c < width_; }
  Color at(int r, int c) const { return cells_[static_cast<std::size_t>(r) * width_ + c]; }
  void set(int r, int c, Color v) { cells_[static_cast<std::size_t>(r) * width_ + c] = v; }
  const std::vector<Color>& data() const { return cells_; }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> out(height_, std::vector<int>(width_));
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) out[r][c] = at(r, c);
    return out;
  }

  bool operator==(const Grid&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Color> cells_;
};

using Value = std::variant<Grid, std::string>;

enum class Domain { grid, string };

inline Domain domain_of(const Value& v) { return std::holds_alternative<Grid>(v) ? Domain::grid : Domain::string; }

inline bool value_equals(const Value& a, const Value& b) { return a == b; }

struct Example {
  Value input;
  Value output;
};

struct Task {
  std::string id;
  Domain domain = Domain::grid;
  std::vector<Example> train;
  std::vector<Example> test;

  void validate() const {
    if (train.empty()) throw ValidationError("task has no training examples");
    auto check = [&](const Example& e) {
      if (domain_of(e.input) != domain || domain_of(e.output) != domain)
        throw ValidationError("example domain differs from task domain");
      if (domain == Domain::string && std::get<std::string>(e.input).empty())
        throw ValidationError("string task input is empty");
    };
    for (const auto& e : train) check(e);
    for (const auto& e : test) check(e);
  }
};

enum class Side { input, output };

enum class Label : std::int8_t { neutral, positive, negative };

struct Cell {
  int row = 0;
  int col = 0;
  Color color = 0;
  auto operator<=>(const Cell&) const = default;
};

struct Box {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
  bool operator==(const Box&) const = default;
  int bottom() const { return row + height - 1; }
  int right() const { return col + width - 1; }
};

// cells are kept sorted by (row, col) and unique by position
struct GridPart {
  std::vector<Cell> cells;
  bool background = false;

  void normalize() {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end(),
                            [](const Cell& a, const Cell& b) { return a.row == b.row && a.col == b.col; }),
                cells.end());
  }

  Box bbox() const {
    if (cells.empty()) return {};
    int r0 = cells.front().row, r1 = r0, c0 = cells.front().col, c1 = c0;
    for (const auto& x : cells) {
      r0 = std::min(r0, x.row);
      r1 = std::max(r1, x.row);
      c0 = std::min(c0, x.col);
      c1 = std::max(c1, x.col);
    }
    return {r0, c0, r1 - r0 + 1, c1 - c0 + 1};
  }

  bool operator==(const GridPart& o) const { return cells == o.cells; }
};

struct TextPart {
  std::string content;
  int begin = 0;        // char offset in the source value
  int index_front = 0;  // ordinal counted from the first component
  int index_back = 0;   // ordinal counted from the last component

  bool operator==(const TextPart& o) const { return content == o.content; }
};

struct Component {
  std::uint32_t id = 0;
  Side side = Side::input;
  int example = 0;
  std::variant<GridPart, TextPart> payload;

  bool is_grid() const { return std::holds_alternative<GridPart>(payload); }
  const GridPart& grid() const { return std::get<GridPart>(payload); }
  GridPart& grid() { return std::get<GridPart>(payload); }
  const TextPart& text() const { return std::get<TextPart>(payload); }
  TextPart& text() { return std::get<TextPart>(payload); }
  bool is_background() const { return is_grid() && grid().background; }

  std::size_t size() const { return is_grid() ? grid().cells.size() : text().content.size(); }

  // equality of produced content, ignoring provenance
  bool same_content(const Component& o) const {
    if (is_grid() != o.is_grid()) return false;
    return is_grid() ? grid().cells == o.grid().cells : text().content == o.text().content;
  }
};

struct GridCanvas {
  int height = 0;
  int width = 0;
  Color background = 0;
};

struct TextCanvas {};

using CanvasSpec = std::variant<GridCanvas, TextCanvas>;

struct Composed {
  Value value;
  bool clipped = false;
};

inline Composed compose(std::vector<Component> parts, const CanvasSpec& canvas) {
  const bool grid_canvas = std::holds_alternative<GridCanvas>(canvas);
  for (const auto& p : parts)
    if (p.is_grid() != grid_canvas) throw DomainMismatch("component kind differs from canvas kind");
  std::stable_sort(parts.begin(), parts.end(), [](const Component& a, const Component& b) { return a.id < b.id; });

  if (grid_canvas) {
    const auto& gc = std::get<GridCanvas>(canvas);
    if (gc.height <= 0 || gc.width <= 0) throw EmptyCanvas("canvas has zero area");
    Grid g(gc.height, gc.width, gc.background);
    bool clipped = false;
    for (const auto& p : parts)
      for (const auto& x : p.grid().cells) {
        if (g.in_bounds(x.row, x.col))
          g.set(x.row, x.col, x.color);
        else
          clipped = true;
      }
    return {std::move(g), clipped};
  }

  std::stable_sort(parts.begin(), parts.end(),
                   [](const Component& a, const Component& b) { return a.text().begin < b.text().begin; });
  std::string s;
  for (const auto& p : parts) s += p.text().content;
  return {std::move(s), false};
}

}  // namespace dac
