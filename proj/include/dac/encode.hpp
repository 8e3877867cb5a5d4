#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dac/core.hpp"
#include "dac/divide.hpp"

namespace dac {

struct Shape {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> mask;  // row-major occupancy of the bounding box

  auto operator<=>(const Shape&) const = default;

  bool at(int r, int c) const { return mask[static_cast<std::size_t>(r) * width + c] != 0; }

  std::string str() const {
    std::string s = "[";
    for (int r = 0; r < height; ++r) {
      if (r) s += '/';
      for (int c = 0; c < width; ++c) s += at(r, c) ? '1' : '0';
    }
    return s + "]";
  }

  static Shape of(const GridPart& p) {
    Box b = p.bbox();
    Shape s{b.height, b.width, std::vector<std::uint8_t>(static_cast<std::size_t>(b.height) * b.width, 0)};
    for (const auto& x : p.cells) s.mask[static_cast<std::size_t>(x.row - b.row) * b.width + (x.col - b.col)] = 1;
    return s;
  }
};

using FeatureValue = std::variant<std::int64_t, bool, std::string, Shape>;

enum class FeatureKind { attribute, function };

inline std::string equivalence_type(const FeatureValue& v) {
  if (std::holds_alternative<Shape>(v)) return "=2D";
  if (std::holds_alternative<std::string>(v)) return "=STR";
  return "=ARITH";
}

inline std::string to_string(const FeatureValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  return std::get<Shape>(v).str();
}

struct Feature {
  std::string name;
  FeatureKind kind;
  FeatureValue value;
};

struct FeatureVector {
  std::vector<Feature> items;

  const FeatureValue* get(const std::string& name) const {
    for (const auto& f : items)
      if (f.name == name) return &f.value;
    return nullptr;
  }
  std::int64_t integer(const std::string& name) const { return std::get<std::int64_t>(*get(name)); }
  bool flag(const std::string& name) const { return std::get<bool>(*get(name)); }
};

inline Color dominant_color(const GridPart& p) {
  std::array<int, kColorCount> counts{};
  for (const auto& x : p.cells) ++counts[x.color];
  return static_cast<Color>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

inline int count_colors(const GridPart& p) {
  std::array<bool, kColorCount> seen{};
  for (const auto& x : p.cells) seen[x.color] = true;
  return static_cast<int>(std::count(seen.begin(), seen.end(), true));
}

namespace detail {

// dense rank of key among distinct keys; descending puts the largest key at rank 0
template <class K>
std::vector<std::int64_t> dense_rank(const std::vector<K>& keys, bool descending) {
  std::vector<K> distinct = keys;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (descending) std::reverse(distinct.begin(), distinct.end());
  std::vector<std::int64_t> out;
  for (const auto& k : keys) out.push_back(std::find(distinct.begin(), distinct.end(), k) - distinct.begin());
  return out;
}

template <class K>
std::vector<std::int64_t> group_counts(const std::vector<K>& keys) {
  std::map<K, std::int64_t> n;
  for (const auto& k : keys) ++n[k];
  std::vector<std::int64_t> out;
  for (const auto& k : keys) out.push_back(n[k]);
  return out;
}

inline bool all_of(const std::string& s, int (*pred)(int)) {
  if (s.empty()) return false;
  for (unsigned char ch : s)
    if (!pred(ch)) return false;
  return true;
}

inline std::int64_t count_if(const std::string& s, int (*pred)(int)) {
  std::int64_t n = 0;
  for (unsigned char ch : s) n += pred(ch) ? 1 : 0;
  return n;
}

}  // namespace detail

inline std::vector<FeatureVector> grid_scene_features(const Segmentation& seg) {
  const auto& comps = seg.components;
  std::vector<Color> colors;
  std::vector<std::int64_t> sizes;
  std::vector<Shape> shapes;
  for (const auto& c : comps) {
    colors.push_back(dominant_color(c.grid()));
    sizes.push_back(static_cast<std::int64_t>(c.grid().cells.size()));
    shapes.push_back(Shape::of(c.grid()));
  }
  auto color_n = detail::group_counts(colors);
  auto shape_n = detail::group_counts(shapes);
  auto rc = detail::dense_rank(color_n, true), rcr = detail::dense_rank(color_n, false);
  auto rs = detail::dense_rank(sizes, true), rsr = detail::dense_rank(sizes, false);
  auto rh = detail::dense_rank(shape_n, true), rhr = detail::dense_rank(shape_n, false);

  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& p = comps[i].grid();
    Box b = p.bbox();
    using K = FeatureKind;
    using I = std::int64_t;
    FeatureVector v;
    v.items = {
        {"color", K::attribute, I{colors[i]}},
        {"num_colors", K::function, I{count_colors(p)}},
        {"row_origin_bbox", K::function, I{b.row}},
        {"col_origin_bbox", K::function, I{b.col}},
        {"shape", K::function, shapes[i]},
        {"size", K::function, sizes[i]},
        {"width", K::function, I{b.width}},
        {"height", K::function, I{b.height}},
        {"ranked_color", K::function, rc[i]},
        {"ranked_color_rev", K::function, rcr[i]},
        {"ranked_size", K::function, rs[i]},
        {"ranked_size_rev", K::function, rsr[i]},
        {"ranked_shape", K::function, rh[i]},
        {"ranked_shape_rev", K::function, rhr[i]},
        {"filled", K::attribute, static_cast<std::int64_t>(p.cells.size()) == I{b.height} * b.width},
    };
    out.push_back(std::move(v));
  }
  return out;
}

inline FeatureVector string_features(const TextPart& t) {
  using K = FeatureKind;
  using I = std::int64_t;
  const auto& s = t.content;
  FeatureVector v;
  v.items = {
      {"content", K::function, s},
      {"index_front", K::function, I{t.index_front}},
      {"index_back", K::function, I{t.index_back}},
      {"index_even", K::attribute, t.index_front % 2 == 0},
      {"length", K::function, static_cast<I>(s.size())},
      {"number_of_uppers", K::function, detail::count_if(s, ::isupper)},
      {"number_of_lowers", K::function, detail::count_if(s, ::islower)},
      {"number_of_digits", K::function, detail::count_if(s, ::isdigit)},
      {"number_of_alphas", K::function, detail::count_if(s, ::isalpha)},
      {"number_of_alnums", K::function, detail::count_if(s, ::isalnum)},
      {"all_upper", K::attribute, detail::all_of(s, ::isupper)},
      {"all_lower", K::attribute, detail::all_of(s, ::islower)},
      {"all_digits", K::attribute, detail::all_of(s, ::isdigit)},
      {"starts_with_upper", K::attribute, !s.empty() && std::isupper(static_cast<unsigned char>(s[0])) != 0},
  };
  return v;
}

inline std::vector<FeatureVector> scene_features(const Segmentation& seg) {
  if (seg.components.empty()) return {};
  if (seg.components.front().is_grid()) return grid_scene_features(seg);
  std::vector<FeatureVector> out;
  for (const auto& c : seg.components) out.push_back(string_features(c.text()));
  return out;
}

inline FeatureVector features(const Component& c, const Segmentation& scene) {
  auto all = scene_features(scene);
  for (std::size_t i = 0; i < scene.components.size(); ++i)
    if (scene.components[i].id == c.id) return all[i];
  throw std::invalid_argument("component not in scene");
}

enum class ExprKind { entity, attribute, function, equivalence, relation, constant };

struct Expression {
  ExprKind kind = ExprKind::entity;
  std::string functor;  // entity name or constant literal for leaves
  std::vector<int> args;
  int depth = 0;
  std::uint32_t component = 0;
};

class SceneEncoding {
 public:
  int add_entity(std::uint32_t component, std::string name = {}) {
    if (name.empty()) name = "o" + std::to_string(component);
    int i = push({ExprKind::entity, std::move(name), {}, 0, component});
    entity_index_[component] = i;
    return i;
  }
  int add_attribute(std::string functor, int entity) { return push({ExprKind::attribute, std::move(functor), {entity}}); }
  int add_function(std::string functor, int entity) { return push({ExprKind::function, std::move(functor), {entity}}); }
  int add_constant(std::string literal) { return push({ExprKind::constant, std::move(literal), {}}); }
  int add_equivalence(std::string type, int function, int constant) {
    return push({ExprKind::equivalence, std::move(type), {function, constant}});
  }
  int add_relation(std::string functor, std::vector<int> args) {
    return push({ExprKind::relation, std::move(functor), std::move(args)});
  }
  void set_features(int entity, FeatureVector v) { features_[entity] = std::move(v); }

  // depth = shortest distance from any root
  void finalize() {
    const int n = static_cast<int>(exprs_.size());
    parents_.assign(n, {});
    for (int i = 0; i < n; ++i)
      for (int a : exprs_[i].args) parents_[a].push_back(i);
    roots_.clear();
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    for (int i = 0; i < n; ++i)
      if (parents_[i].empty()) {
        roots_.push_back(i);
        dist[i] = 0;
        q.push(i);
      }
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      for (int a : exprs_[i].args)
        if (dist[a] < 0) {
          dist[a] = dist[i] + 1;
          q.push(a);
        }
    }
    for (int i = 0; i < n; ++i) exprs_[i].depth = dist[i];
  }

  const std::vector<Expression>& expressions() const { return exprs_; }
  const Expression& operator[](int i) const { return exprs_[i]; }
  int size() const { return static_cast<int>(exprs_.size()); }
  const std::vector<int>& roots() const { return roots_; }
  const std::vector<int>& parents(int i) const { return parents_[i]; }
  const std::map<std::uint32_t, int>& entity_index() const { return entity_index_; }
  const FeatureVector* entity_features(int entity) const {
    auto it = features_.find(entity);
    return it == features_.end() ? nullptr : &it->second;
  }

  int count(ExprKind k) const {
    return static_cast<int>(std::count_if(exprs_.begin(), exprs_.end(), [k](const Expression& e) { return e.kind == k; }));
  }

  std::string render(int i) const {
    const auto& e = exprs_[i];
    if (e.kind == ExprKind::entity || e.kind == ExprKind::constant) return e.functor;
    std::string s = "(" + e.functor;
    for (int a : e.args) s += " " + render(a);
    return s + ")";
  }

  // one root predicate per line
  std::string dump() const {
    std::ostringstream os;
    for (int r : roots_)
      if (exprs_[r].kind != ExprKind::entity) os << render(r) << "\n";
    return os.str();
  }

 private:
  int push(Expression e) {
    exprs_.push_back(std::move(e));
    return static_cast<int>(exprs_.size()) - 1;
  }

  std::vector<Expression> exprs_;
  std::vector<std::vector<int>> parents_;
  std::vector<int> roots_;
  std::map<std::uint32_t, int> entity_index_;
  std::map<int, FeatureVector> features_;
};

enum class Rcc8 { DC, EC, PO, EQ, TPP, NTPP, TPPi, NTPPi };

inline const char* rcc8_name(Rcc8 r) {
  switch (r) {
    case Rcc8::DC: return "DC";
    case Rcc8::EC: return "EC";
    case Rcc8::PO: return "PO";
    case Rcc8::EQ: return "EQ";
    case Rcc8::TPP: return "TPP";
    case Rcc8::NTPP: return "NTPP";
    case Rcc8::TPPi: return "TPPi";
    case Rcc8::NTPPi: return "NTPPi";
  }
  return "?";
}

namespace detail {

struct CellSet {
  std::vector<std::pair<int, int>> cells;
  std::vector<std::pair<int, int>> sorted;

  explicit CellSet(const GridPart& p) {
    for (const auto& x : p.cells) cells.push_back({x.row, x.col});
    sorted = cells;
    std::sort(sorted.begin(), sorted.end());
  }
  bool has(int r, int c) const { return std::binary_search(sorted.begin(), sorted.end(), std::pair{r, c}); }
};

inline bool touches_outside(const CellSet& a, const CellSet& b) {
  static constexpr int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
  for (auto [r, c] : a.cells)
    for (int k = 0; k < 4; ++k)
      if (!b.has(r + dr[k], c + dc[k])) return true;
  return false;
}

}  // namespace detail

inline Rcc8 rcc8(const GridPart& pa, const GridPart& pb) {
  detail::CellSet a(pa), b(pb);
  std::size_t shared = 0;
  for (auto [r, c] : a.cells) shared += b.has(r, c) ? 1 : 0;
  if (shared == 0) {
    static constexpr int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    for (auto [r, c] : a.cells)
      for (int k = 0; k < 4; ++k)
        if (b.has(r + dr[k], c + dc[k])) return Rcc8::EC;
    return Rcc8::DC;
  }
  const bool a_in_b = shared == a.cells.size(), b_in_a = shared == b.cells.size();
  if (a_in_b && b_in_a) return Rcc8::EQ;
  if (a_in_b) return detail::touches_outside(a, b) ? Rcc8::TPP : Rcc8::NTPP;
  if (b_in_a) return detail::touches_outside(b, a) ? Rcc8::TPPi : Rcc8::NTPPi;
  return Rcc8::PO;
}

inline void add_feature_nodes(SceneEncoding& enc, int entity, const FeatureVector& fv) {
  for (const auto& f : fv.items) {
    if (f.kind == FeatureKind::attribute) {
      enc.add_attribute(f.name + "=" + to_string(f.value), entity);
    } else {
      int fn = enc.add_function(f.name, entity);
      enc.add_equivalence(equivalence_type(f.value), fn, enc.add_constant(to_string(f.value)));
    }
  }
}

inline SceneEncoding encode_scene(const Segmentation& seg) {
  SceneEncoding enc;
  auto fvs = scene_features(seg);
  std::vector<int> ents;
  for (std::size_t i = 0; i < seg.components.size(); ++i) {
    int e = enc.add_entity(seg.components[i].id);
    ents.push_back(e);
    enc.set_features(e, fvs[i]);
    if (seg.components[i].is_background()) enc.add_attribute("background", e);
    add_feature_nodes(enc, e, fvs[i]);
  }
  const auto& cs = seg.components;
  const std::size_t n = cs.size();
  if (n > 0 && cs.front().is_grid()) {
    std::vector<Box> boxes;
    for (const auto& c : cs) boxes.push_back(c.grid().bbox());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const Box &a = boxes[i], &b = boxes[j];
        if (2 * a.col + a.width < 2 * b.col + b.width) enc.add_relation("left-of", {ents[i], ents[j]});
        if (2 * a.row + a.height < 2 * b.row + b.height) enc.add_relation("above-of", {ents[i], ents[j]});
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Rcc8 r = rcc8(cs[i].grid(), cs[j].grid());
        if (r == Rcc8::TPPi || r == Rcc8::NTPPi)
          enc.add_relation(r == Rcc8::TPPi ? "TPP" : "NTPP", {ents[j], ents[i]});
        else
          enc.add_relation(rcc8_name(r), {ents[i], ents[j]});
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        enc.add_relation("precedes", {ents[i], ents[j]});
        if (j == i + 1) enc.add_relation("adjacent", {ents[i], ents[j]});
      }
  }
  enc.finalize();
  return enc;
}

}  // namespace dac
