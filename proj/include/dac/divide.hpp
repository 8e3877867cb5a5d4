#pragma once

#include <array>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "dac/core.hpp"

namespace dac {

struct EmptyLanguage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ObjectMode { pixels, mono, multi };
enum class Neighborhood { direct, diagonal };
enum class BackgroundPolicy { none, constant, inferred };

inline constexpr std::array<char, 7> kDelimiterChars = {' ', ',', '.', ':', ';', '-', '/'};
inline constexpr int kDigitBit = 7;
inline const std::array<std::string, 8> kDelimiterAtoms = {"delim-space", "delim-comma",  "delim-dot",
                                                           "delim-colon", "delim-semicolon", "delim-hyphen",
                                                           "delim-slash", "delim-digit"};

struct DecompositionFunction {
  Domain domain = Domain::grid;
  ObjectMode objects = ObjectMode::mono;
  Neighborhood neighborhood = Neighborhood::direct;
  BackgroundPolicy background = BackgroundPolicy::none;
  Color background_color = 0;
  unsigned delimiters = 0;  // bit i set for kDelimiterAtoms[i]
  bool total = false;
  bool whole = false;  // one component per example

  static DecompositionFunction whole_value(Domain d) {
    DecompositionFunction f;
    f.domain = d;
    f.whole = true;
    return f;
  }

  std::vector<std::string> constraints() const {
    std::vector<std::string> out;
    if (whole) return {"whole"};
    if (domain == Domain::grid) {
      if (objects == ObjectMode::pixels) {
        out.push_back("pixels");
      } else {
        out.push_back(objects == ObjectMode::mono ? "mono-colored" : "multicolor");
        out.push_back(neighborhood == Neighborhood::direct ? "direct-neighbors" : "diagonal-neighbors");
      }
      if (background == BackgroundPolicy::constant)
        out.push_back("background-constant-" + std::to_string(background_color));
      else if (background == BackgroundPolicy::inferred)
        out.push_back("background-inferred");
    } else {
      if (total) return {"total-split"};
      for (int i = 0; i < 8; ++i)
        if (delimiters & (1u << i)) out.push_back(kDelimiterAtoms[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string name() const {
    std::string s = "{";
    auto c = constraints();
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + c[i];
    return s + "}";
  }

  bool operator==(const DecompositionFunction& o) const { return constraints() == o.constraints() && domain == o.domain; }

  static std::optional<DecompositionFunction> from_atoms(Domain d, const std::set<std::string>& atoms) {
    DecompositionFunction f;
    f.domain = d;
    if (atoms.count("whole")) return atoms.size() == 1 ? std::optional(whole_value(d)) : std::nullopt;
    if (d == Domain::grid) {
      int object_atoms = 0, neigh_atoms = 0, bg_atoms = 0;
      for (const auto& a : atoms) {
        if (a == "pixels") {
          f.objects = ObjectMode::pixels;
          ++object_atoms;
        } else if (a == "mono-colored") {
          f.objects = ObjectMode::mono;
          ++object_atoms;
        } else if (a == "multicolor") {
          f.objects = ObjectMode::multi;
          ++object_atoms;
        } else if (a == "direct-neighbors") {
          f.neighborhood = Neighborhood::direct;
          ++neigh_atoms;
        } else if (a == "diagonal-neighbors") {
          f.neighborhood = Neighborhood::diagonal;
          ++neigh_atoms;
        } else if (a == "background-inferred") {
          f.background = BackgroundPolicy::inferred;
          ++bg_atoms;
        } else if (a.rfind("background-constant-", 0) == 0) {
          f.background = BackgroundPolicy::constant;
          f.background_color = std::stoi(a.substr(20));
          ++bg_atoms;
        } else {
          return std::nullopt;
        }
      }
      if (object_atoms != 1 || bg_atoms > 1) return std::nullopt;
      if ((f.objects == ObjectMode::pixels) != (neigh_atoms == 0) || neigh_atoms > 1) return std::nullopt;
      return f;
    }
    if (atoms.count("total-split")) {
      if (atoms.size() != 1) return std::nullopt;
      f.total = true;
      return f;
    }
    for (const auto& a : atoms) {
      auto it = std::find(kDelimiterAtoms.begin(), kDelimiterAtoms.end(), a);
      if (it == kDelimiterAtoms.end()) return std::nullopt;
      f.delimiters |= 1u << (it - kDelimiterAtoms.begin());
    }
    if (f.delimiters == 0) return std::nullopt;
    return f;
  }
};

// Symbols starting with an uppercase letter are nonterminals.
struct DecompositionGrammar {
  Domain domain = Domain::grid;
  std::string start;
  std::map<std::string, std::vector<std::vector<std::string>>> rules;

  static bool is_nonterminal(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

  std::vector<std::set<std::string>> sentences(const std::string& symbol) const {
    if (!is_nonterminal(symbol)) return {{symbol}};
    auto it = rules.find(symbol);
    if (it == rules.end()) return {};
    std::vector<std::set<std::string>> out;
    for (const auto& alt : it->second) {
      std::vector<std::set<std::string>> acc = {{}};
      for (const auto& sym : alt) {
        std::vector<std::set<std::string>> next;
        for (const auto& tail : sentences(sym))
          for (const auto& head : acc) {
            auto s = head;
            s.insert(tail.begin(), tail.end());
            next.push_back(std::move(s));
          }
        acc = std::move(next);
      }
      out.insert(out.end(), acc.begin(), acc.end());
    }
    return out;
  }

  // distinct valid decomposition functions, in derivation order
  std::vector<DecompositionFunction> language() const {
    std::vector<DecompositionFunction> out;
    std::set<std::vector<std::string>> seen;
    for (const auto& s : sentences(start)) {
      auto f = DecompositionFunction::from_atoms(domain, s);
      if (!f) continue;
      if (seen.insert(f->constraints()).second) out.push_back(*f);
    }
    return out;
  }
};

inline DecompositionGrammar arc_decomposition_grammar() {
  DecompositionGrammar g;
  g.domain = Domain::grid;
  g.start = "S";
  g.rules["S"] = {{"OBJECT", "BG"}};
  g.rules["OBJECT"] = {{"pixels"}, {"COLOR", "NEIGH"}};
  g.rules["COLOR"] = {{"mono-colored"}, {"multicolor"}};
  g.rules["NEIGH"] = {{"direct-neighbors"}, {"diagonal-neighbors"}};
  g.rules["BG"] = {{}, {"background-constant-0"}, {"background-inferred"}};
  return g;
}

inline DecompositionGrammar string_decomposition_grammar() {
  DecompositionGrammar g;
  g.domain = Domain::string;
  g.start = "S";
  std::vector<std::string> subset;
  for (int i = 0; i < 8; ++i) {
    std::string nt = "D" + std::to_string(i);
    g.rules[nt] = {{}, {kDelimiterAtoms[i]}};
    subset.push_back(nt);
  }
  g.rules["S"] = {{"total-split"}, subset};
  return g;
}

inline Color infer_background_color(const Grid& g) {
  std::array<int, kColorCount> counts{};
  for (Color c : g.data()) ++counts[c];
  return static_cast<Color>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

struct Segmentation {
  int example = 0;
  Side side = Side::input;
  std::vector<Component> components;  // background first when present

  const Component* background() const {
    return !components.empty() && components.front().is_background() ? &components.front() : nullptr;
  }
  const Component* find(std::uint32_t id) const {
    for (const auto& c : components)
      if (c.id == id) return &c;
    return nullptr;
  }
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

inline bool is_delimiter(unsigned mask, char ch) {
  for (int i = 0; i < 7; ++i)
    if ((mask & (1u << i)) && kDelimiterChars[i] == ch) return true;
  return (mask & (1u << kDigitBit)) && std::isdigit(static_cast<unsigned char>(ch));
}

inline Segmentation segment_grid(const DecompositionFunction& f, const Grid& g, Side side, int example) {
  Segmentation seg{example, side, {}};
  const int h = g.height(), w = g.width();
  if (f.whole) {
    Component c{0, side, example, GridPart{}};
    for (int r = 0; r < h; ++r)
      for (int col = 0; col < w; ++col) c.grid().cells.push_back({r, col, g.at(r, col)});
    seg.components.push_back(std::move(c));
    return seg;
  }
  std::optional<Color> bg;
  if (f.background == BackgroundPolicy::constant) bg = f.background_color;
  if (f.background == BackgroundPolicy::inferred) bg = infer_background_color(g);

  auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };
  auto foreground = [&](int r, int c) { return !bg || g.at(r, c) != *bg; };
  DisjointSet ds(static_cast<std::size_t>(h) * w);
  if (f.objects != ObjectMode::pixels) {
    std::vector<std::pair<int, int>> offsets = {{0, 1}, {1, 0}};
    if (f.neighborhood == Neighborhood::diagonal) {
      offsets.push_back({1, 1});
      offsets.push_back({1, -1});
    }
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        if (!foreground(r, c)) continue;
        for (auto [dr, dc] : offsets) {
          int r2 = r + dr, c2 = c + dc;
          if (!g.in_bounds(r2, c2) || !foreground(r2, c2)) continue;
          if (f.objects == ObjectMode::mono && g.at(r, c) != g.at(r2, c2)) continue;
          ds.unite(idx(r, c), idx(r2, c2));
        }
      }
  }

  if (bg) {
    Component b{0, side, example, GridPart{{}, true}};
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) b.grid().cells.push_back({r, c, *bg});
    seg.components.push_back(std::move(b));
  }
  // roots are the raster-first cell of their set, so raster order of roots gives ids
  std::map<std::size_t, std::size_t> slot;
  std::vector<GridPart> parts;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (!foreground(r, c)) continue;
      auto root = ds.find(idx(r, c));
      auto [it, fresh] = slot.emplace(root, parts.size());
      if (fresh) parts.emplace_back();
      parts[it->second].cells.push_back({r, c, g.at(r, c)});
    }
  std::uint32_t next = 1;
  for (auto& p : parts) seg.components.push_back(Component{next++, side, example, std::move(p)});
  return seg;
}

inline Segmentation segment_string(const DecompositionFunction& f, const std::string& s, Side side, int example) {
  Segmentation seg{example, side, {}};
  std::vector<std::pair<int, std::string>> pieces;
  if (f.whole) {
    pieces.push_back({0, s});
  } else {
    std::string cur;
    int begin = 0;
    for (int i = 0; i < static_cast<int>(s.size()); ++i) {
      if (cur.empty()) begin = i;
      cur += s[i];
      if (f.total || is_delimiter(f.delimiters, s[i])) {
        pieces.push_back({begin, cur});
        cur.clear();
      }
    }
    if (!cur.empty()) pieces.push_back({begin, cur});
  }
  const int n = static_cast<int>(pieces.size());
  for (int i = 0; i < n; ++i)
    seg.components.push_back(Component{static_cast<std::uint32_t>(i), side, example,
                                       TextPart{pieces[i].second, pieces[i].first, i, n - 1 - i}});
  return seg;
}

inline Segmentation apply(const DecompositionFunction& f, const Value& v, Side side = Side::input, int example = 0) {
  if (std::holds_alternative<Grid>(v)) return segment_grid(f, std::get<Grid>(v), side, example);
  return segment_string(f, std::get<std::string>(v), side, example);
}

}  // namespace dac
