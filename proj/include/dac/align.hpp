#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dac/encode.hpp"

namespace dac {

struct MhcRuleSet {
  bool match_attributes = false;       // the printed constructor rule excludes attributes
  bool entities_by_attribute = true;   // entities sharing an attribute value form an mh
};

struct MatchHypothesis {
  int base = 0;
  int target = 0;
  double sim = 1.0;
  int depth = 0;
  bool entity = false;
  std::vector<int> children;
};

using Binding = std::pair<int, int>;  // base entity expr -> target entity expr

struct MatchSet {
  std::vector<MatchHypothesis> mhs;
  std::vector<std::vector<int>> closure;      // sorted, includes self
  std::vector<std::vector<Binding>> bindings; // sorted

  std::size_t size() const { return mhs.size(); }

  // recompute closures and bindings, e.g. after building mhs by hand
  void index() {
    const std::size_t n = mhs.size();
    closure.assign(n, {});
    bindings.assign(n, {});
    std::vector<char> done(n, 0);
    std::function<void(int)> visit = [&](int i) {
      if (done[i]) return;
      done[i] = 1;
      std::vector<int> cl = {i};
      std::vector<Binding> bs;
      if (mhs[i].entity) bs.push_back({mhs[i].base, mhs[i].target});
      for (int c : mhs[i].children) {
        visit(c);
        cl.insert(cl.end(), closure[c].begin(), closure[c].end());
        bs.insert(bs.end(), bindings[c].begin(), bindings[c].end());
      }
      std::sort(cl.begin(), cl.end());
      cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
      std::sort(bs.begin(), bs.end());
      bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
      closure[i] = std::move(cl);
      bindings[i] = std::move(bs);
    };
    for (std::size_t i = 0; i < n; ++i) visit(static_cast<int>(i));
  }
};

inline bool one_to_one(const std::vector<Binding>& bs) {
  std::map<int, int> fwd, bwd;
  for (auto [b, t] : bs) {
    auto [f, fi] = fwd.emplace(b, t);
    if (!fi && f->second != t) return false;
    auto [r, ri] = bwd.emplace(t, b);
    if (!ri && r->second != b) return false;
  }
  return true;
}

inline bool compatible(const std::vector<Binding>& a, const std::vector<Binding>& b) {
  for (auto [ab, at] : a)
    for (auto [bb, bt] : b)
      if ((ab == bb) != (at == bt)) return false;
  return true;
}

inline double feature_similarity(const FeatureVector* a, const FeatureVector* b) {
  if (!a || !b || a->items.empty() || a->items.size() != b->items.size()) return 0.0;
  int same = 0;
  for (std::size_t i = 0; i < a->items.size(); ++i) same += a->items[i].value == b->items[i].value ? 1 : 0;
  return static_cast<double>(same) / a->items.size();
}

namespace detail {

class MhBuilder {
 public:
  MhBuilder(const SceneEncoding& base, const SceneEncoding& target, const MhcRuleSet& rules)
      : base_(base), target_(target), rules_(rules) {}

  std::optional<int> get(int b, int t) {
    auto key = std::pair{b, t};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto r = make(b, t);
    memo_[key] = r;
    return r;
  }

  MatchSet take() {
    set_.index();
    return std::move(set_);
  }

 private:
  std::optional<int> make(int b, int t) {
    const auto& eb = base_[b];
    const auto& et = target_[t];
    if (eb.kind != et.kind) return std::nullopt;
    MatchHypothesis mh{b, t, 1.0, std::min(eb.depth, et.depth), false, {}};
    if (eb.kind == ExprKind::entity) {
      mh.entity = true;
      mh.sim = feature_similarity(base_.entity_features(b), target_.entity_features(t));
      return push(std::move(mh), {{b, t}});
    }
    if (eb.kind == ExprKind::constant) return std::nullopt;
    if (eb.functor != et.functor || eb.args.size() != et.args.size()) return std::nullopt;
    if (eb.kind == ExprKind::attribute && !rules_.match_attributes) return std::nullopt;
    std::vector<Binding> bs;
    for (std::size_t k = 0; k < eb.args.size(); ++k) {
      const auto& ab = base_[eb.args[k]];
      const auto& at = target_[et.args[k]];
      if (ab.kind == ExprKind::constant || at.kind == ExprKind::constant) {
        if (ab.kind != at.kind || ab.functor != at.functor) return std::nullopt;
        continue;
      }
      auto child = get(eb.args[k], et.args[k]);
      if (!child) return std::nullopt;
      mh.children.push_back(*child);
      const auto& cb = child_bindings_[*child];
      bs.insert(bs.end(), cb.begin(), cb.end());
    }
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    if (!one_to_one(bs)) return std::nullopt;
    return push(std::move(mh), std::move(bs));
  }

  int push(MatchHypothesis mh, std::vector<Binding> bs) {
    set_.mhs.push_back(std::move(mh));
    child_bindings_.push_back(std::move(bs));
    return static_cast<int>(set_.mhs.size()) - 1;
  }

  const SceneEncoding& base_;
  const SceneEncoding& target_;
  const MhcRuleSet& rules_;
  MatchSet set_;
  std::vector<std::vector<Binding>> child_bindings_;
  std::map<std::pair<int, int>, std::optional<int>> memo_;
};

// constants stand in for their value, so equivalence nodes are grouped by the value they assert
inline std::string match_key(const SceneEncoding& enc, int i) {
  const auto& e = enc[i];
  std::string key = std::to_string(static_cast<int>(e.kind)) + "|" + e.functor + "|" + std::to_string(e.args.size());
  if (e.kind == ExprKind::equivalence)
    for (int a : e.args) key += "|" + (enc[a].kind == ExprKind::constant ? enc[a].functor : enc[a].functor + "()");
  return key;
}

}  // namespace detail

inline MatchSet build_match_hypotheses(const SceneEncoding& base, const SceneEncoding& target,
                                       const MhcRuleSet& rules = {}) {
  detail::MhBuilder builder(base, target, rules);
  std::map<std::string, std::vector<int>> target_by_key;
  for (int t = 0; t < target.size(); ++t) {
    auto k = target[t].kind;
    if (k == ExprKind::relation || k == ExprKind::equivalence || (k == ExprKind::attribute && rules.match_attributes))
      target_by_key[detail::match_key(target, t)].push_back(t);
  }
  for (int b = 0; b < base.size(); ++b) {
    auto k = base[b].kind;
    if (k != ExprKind::relation && k != ExprKind::equivalence && !(k == ExprKind::attribute && rules.match_attributes))
      continue;
    auto it = target_by_key.find(detail::match_key(base, b));
    if (it == target_by_key.end()) continue;
    for (int t : it->second) builder.get(b, t);
  }
  if (rules.entities_by_attribute) {
    std::map<int, std::vector<std::string>> battr, tattr;
    for (int i = 0; i < base.size(); ++i)
      if (base[i].kind == ExprKind::attribute) battr[base[i].args[0]].push_back(base[i].functor);
    for (int i = 0; i < target.size(); ++i)
      if (target[i].kind == ExprKind::attribute) tattr[target[i].args[0]].push_back(target[i].functor);
    for (auto& [b, fa] : battr) {
      std::sort(fa.begin(), fa.end());
      for (auto& [t, fb] : tattr) {
        std::sort(fb.begin(), fb.end());
        std::vector<std::string> shared;
        std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(shared));
        if (!shared.empty()) builder.get(b, t);
      }
    }
  }
  return builder.take();
}

struct Gmap {
  std::vector<int> mhs;     // sorted indices into the MatchSet
  std::vector<int> roots;   // mhs without a parent inside this gmap
  std::vector<Binding> entity_map;
  double score = 0.0;
};

struct GmapResult {
  std::vector<Gmap> gmaps;
  bool budget_exceeded = false;
};

struct AlignConfig {
  double w0 = 1.0;
  double w1 = 0.5;
  bool dedup = false;
  std::size_t mh_budget = 2000;
  std::size_t node_budget = 200000;   // Bron-Kerbosch calls
  std::size_t work_budget = 20000000;  // adjacency probes inside Bron-Kerbosch
  std::size_t max_cliques = 4096;
  std::size_t max_greedy = 256;  // greedy gmaps kept when the exact search is abandoned
  std::size_t pair_cap = 900;  // |I| * |R| above which the scene is not encoded
  MhcRuleSet rules;
};

inline double closure_score(const MatchSet& ms, int root, double w0, double w1) {
  double s = 0.0;
  for (int m : ms.closure[root]) s += w0 * ms.mhs[m].depth + w1 * ms.mhs[m].sim;
  return s;
}

inline double score(const Gmap& g, const MatchSet& ms, double w0, double w1, bool dedup = false) {
  if (!(w0 > w1) || w1 < 0) throw std::invalid_argument("gmap weights need w0 > w1 >= 0");
  if (dedup) {
    double s = 0.0;
    for (int m : g.mhs) s += w0 * ms.mhs[m].depth + w1 * ms.mhs[m].sim;
    return s;
  }
  double s = 0.0;
  for (int r : g.roots) s += closure_score(ms, r, w0, w1);
  return s;
}

namespace detail {

struct KernelGroup {
  std::vector<int> kernels;
  std::vector<Binding> bindings;
};

inline Gmap assemble(const MatchSet& ms, const std::vector<KernelGroup>& groups, const std::vector<int>& members) {
  Gmap g;
  for (int gi : members) {
    for (int k : groups[gi].kernels) g.mhs.insert(g.mhs.end(), ms.closure[k].begin(), ms.closure[k].end());
    g.entity_map.insert(g.entity_map.end(), groups[gi].bindings.begin(), groups[gi].bindings.end());
  }
  std::sort(g.mhs.begin(), g.mhs.end());
  g.mhs.erase(std::unique(g.mhs.begin(), g.mhs.end()), g.mhs.end());
  std::sort(g.entity_map.begin(), g.entity_map.end());
  g.entity_map.erase(std::unique(g.entity_map.begin(), g.entity_map.end()), g.entity_map.end());
  std::vector<char> child(ms.size(), 0);
  for (int m : g.mhs)
    for (int c : ms.mhs[m].children) child[c] = 1;
  for (int m : g.mhs)
    if (!child[m]) g.roots.push_back(m);
  return g;
}

}  // namespace detail

inline GmapResult derive_gmaps(const MatchSet& ms, const AlignConfig& cfg = {}) {
  GmapResult out;
  const int n = static_cast<int>(ms.size());
  if (n == 0) return out;
  std::vector<char> is_child(n, 0);
  for (const auto& mh : ms.mhs)
    for (int c : mh.children) is_child[c] = 1;

  std::vector<detail::KernelGroup> groups;
  std::map<std::vector<Binding>, int> group_of;
  for (int i = 0; i < n; ++i) {
    if (is_child[i]) continue;
    auto [it, fresh] = group_of.emplace(ms.bindings[i], static_cast<int>(groups.size()));
    if (fresh) groups.push_back({{}, ms.bindings[i]});
    groups[it->second].kernels.push_back(i);
  }
  const int g = static_cast<int>(groups.size());
  std::vector<std::vector<int>> cliques;
  bool exceeded = static_cast<std::size_t>(n) > cfg.mh_budget;
  if (!exceeded) {
    std::vector<std::vector<char>> adj(g, std::vector<char>(g, 0));
    for (int a = 0; a < g; ++a)
      for (int b = a + 1; b < g; ++b) adj[a][b] = adj[b][a] = compatible(groups[a].bindings, groups[b].bindings);
    std::size_t nodes = 0, work = 0;
    std::function<void(std::vector<int>&, std::vector<int>, std::vector<int>)> bk =
        [&](std::vector<int>& r, std::vector<int> p, std::vector<int> x) {
          if (exceeded) return;
          work += (p.size() + x.size()) * p.size() + 1;
          if (++nodes > cfg.node_budget || work > cfg.work_budget || cliques.size() >= cfg.max_cliques) {
            exceeded = true;
            return;
          }
          if (p.empty() && x.empty()) {
            cliques.push_back(r);
            std::sort(cliques.back().begin(), cliques.back().end());
            return;
          }
          int pivot = -1, best = -1;
          for (const auto* set : {&p, &x})
            for (int u : *set) {
              int d = 0;
              for (int v : p) d += adj[u][v];
              if (d > best) best = d, pivot = u;
            }
          std::vector<int> cand;
          for (int v : p)
            if (!adj[pivot][v]) cand.push_back(v);
          for (int v : cand) {
            std::vector<int> np, nx;
            for (int w : p)
              if (adj[v][w]) np.push_back(w);
            for (int w : x)
              if (adj[v][w]) nx.push_back(w);
            r.push_back(v);
            bk(r, std::move(np), std::move(nx));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.push_back(v);
          }
        };
    std::vector<int> r, p(g), x;
    std::iota(p.begin(), p.end(), 0);
    bk(r, p, x);
    if (exceeded) cliques.clear();
  }
  if (exceeded) {
    cliques.clear();
    std::vector<double> gs(g, 0.0);
    for (int a = 0; a < g; ++a)
      for (int k : groups[a].kernels) gs[a] += closure_score(ms, k, cfg.w0, cfg.w1);
    std::vector<int> order(g);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gs[a] > gs[b]; });
    // seeds in score order; each grows by every group consistent with the bindings so far
    std::vector<char> placed(g, 0);
    for (int seed : order) {
      if (placed[seed]) continue;
      if (cliques.size() >= cfg.max_greedy) break;
      std::map<int, int> b2t, t2b;
      auto fits = [&](int v) {
        for (auto [b, t] : groups[v].bindings) {
          auto i = b2t.find(b);
          if (i != b2t.end() && i->second != t) return false;
          auto k = t2b.find(t);
          if (k != t2b.end() && k->second != b) return false;
        }
        return true;
      };
      auto take = [&](int v) {
        for (auto [b, t] : groups[v].bindings) b2t[b] = t, t2b[t] = b;
      };
      std::vector<int> members = {seed};
      take(seed);
      for (int v : order)
        if (v != seed && fits(v)) {
          members.push_back(v);
          take(v);
        }
      for (int m : members) placed[m] = 1;
      std::sort(members.begin(), members.end());
      cliques.push_back(std::move(members));
    }
    std::sort(cliques.begin(), cliques.end());
    cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
  }
  std::sort(cliques.begin(), cliques.end());
  for (const auto& c : cliques) {
    Gmap gm = detail::assemble(ms, groups, c);
    gm.score = score(gm, ms, cfg.w0, cfg.w1, cfg.dedup);
    out.gmaps.push_back(std::move(gm));
  }
  out.budget_exceeded = exceeded;
  return out;
}

inline std::string dump_gmap(const Gmap& g, const MatchSet& ms, const SceneEncoding& base, const SceneEncoding& target) {
  std::ostringstream os;
  os << "score " << g.score << "\n";
  for (int m : g.mhs) os << "  " << base.render(ms.mhs[m].base) << " <-> " << target.render(ms.mhs[m].target) << "\n";
  for (auto [b, t] : g.entity_map) os << "  " << base[b].functor << " => " << target[t].functor << "\n";
  return os.str();
}

using CorrList = std::vector<std::pair<std::uint32_t, double>>;
using CorrTable = std::map<std::uint32_t, CorrList>;

struct Alignment {
  CorrTable table;
  bool greedy = false;
  bool encoded = true;
};

inline void finish_ranking(CorrTable& table, const std::vector<std::uint32_t>& inputs,
                           const std::vector<std::uint32_t>& outputs) {
  for (auto o : outputs) {
    auto& list = table[o];
    std::map<std::uint32_t, double> best;
    for (auto [i, s] : list) {
      auto [it, fresh] = best.emplace(i, s);
      if (!fresh) it->second = std::max(it->second, s);
    }
    list.assign(best.begin(), best.end());
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (auto i : inputs)
      if (!best.count(i)) list.push_back({i, 0.0});
  }
}

inline Alignment rank_correspondences(const SceneEncoding& enc_i, const SceneEncoding& enc_r, const AlignConfig& cfg = {}) {
  Alignment out;
  auto ms = build_match_hypotheses(enc_i, enc_r, cfg.rules);
  auto gm = derive_gmaps(ms, cfg);
  out.greedy = gm.budget_exceeded;
  std::vector<std::uint32_t> inputs, outputs;
  for (auto [id, e] : enc_i.entity_index()) inputs.push_back(id);
  for (auto [id, e] : enc_r.entity_index()) outputs.push_back(id);
  for (const auto& g : gm.gmaps)
    for (auto [b, t] : g.entity_map) out.table[enc_r[t].component].push_back({enc_i[b].component, g.score});
  finish_ranking(out.table, inputs, outputs);
  return out;
}

// scenes too large to encode fall back to plain feature similarity
inline Alignment rank_by_similarity(const Segmentation& in, const Segmentation& out_seg) {
  Alignment out;
  out.encoded = false;
  auto fi = scene_features(in), fr = scene_features(out_seg);
  std::vector<std::uint32_t> inputs, outputs;
  for (const auto& c : in.components) inputs.push_back(c.id);
  for (std::size_t j = 0; j < out_seg.components.size(); ++j) {
    outputs.push_back(out_seg.components[j].id);
    auto& list = out.table[out_seg.components[j].id];
    for (std::size_t i = 0; i < in.components.size(); ++i)
      list.push_back({in.components[i].id, feature_similarity(&fi[i], &fr[j])});
  }
  finish_ranking(out.table, inputs, outputs);
  return out;
}

inline Alignment align_scenes(const Segmentation& in, const Segmentation& out_seg, const AlignConfig& cfg = {}) {
  if (in.components.size() * out_seg.components.size() > cfg.pair_cap) return rank_by_similarity(in, out_seg);
  return rank_correspondences(encode_scene(in), encode_scene(out_seg), cfg);
}

inline Alignment random_ranking(const Segmentation& in, const Segmentation& out_seg, std::uint64_t seed) {
  Alignment out;
  out.encoded = false;
  for (const auto& o : out_seg.components) {
    CorrList list;
    for (const auto& c : in.components) list.push_back({c.id, 0.0});
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (o.id + 1)));
    std::shuffle(list.begin(), list.end(), rng);
    out.table[o.id] = std::move(list);
  }
  return out;
}

}  // namespace dac
