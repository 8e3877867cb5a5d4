#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dac/encode.hpp"
#include "dac/transform.hpp"

namespace dac {

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Literal {
  std::string feature;
  FeatureValue value;
  bool positive = true;

  bool eval(const FeatureVector& fv) const {
    const FeatureValue* v = fv.get(feature);
    return v && ((*v == value) == positive);
  }

  std::string render() const {
    std::string rhs = to_string(value);
    if (feature == "color")
      if (auto* c = std::get_if<std::int64_t>(&value)) rhs = color_name(static_cast<int>(*c));
    return "o." + feature + (positive ? " == " : " != ") + rhs;
  }

  bool operator==(const Literal&) const = default;
};

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    for (auto w : w_)
      if (w) return false;
    return true;
  }
  Bits operator&(const Bits& o) const {
    Bits r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
    return r;
  }
  bool operator==(const Bits&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

struct BooleanEncoding {
  std::vector<Literal> columns;
  std::vector<std::vector<char>> rows;  // n x m

  std::size_t n() const { return rows.size(); }
  std::size_t m() const { return columns.size(); }
};

// double one-hot: every observed (feature, value) yields an equality column and its negation
inline BooleanEncoding encode_components(const std::vector<FeatureVector>& fvs) {
  BooleanEncoding enc;
  if (fvs.empty()) return enc;
  for (const auto& f : fvs.front().items) {
    std::vector<FeatureValue> values;
    for (const auto& fv : fvs)
      if (const auto* v = fv.get(f.name)) values.push_back(*v);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (const auto& v : values) {
      enc.columns.push_back({f.name, v, true});
      enc.columns.push_back({f.name, v, false});
    }
  }
  for (const auto& fv : fvs) {
    std::vector<char> row;
    for (const auto& c : enc.columns) row.push_back(c.eval(fv));
    enc.rows.push_back(std::move(row));
  }
  return enc;
}

struct Conjunction {
  std::vector<int> columns;
  bool operator==(const Conjunction&) const = default;
};

struct ConjunctionResult {
  Conjunction conj;
  std::size_t covered = 0;
  bool exact = true;  // false when the node budget cut the search short
};

// Maximizes w * covered_positives - |S| with no negative covered, by depth-first branch and bound
// over column sets in increasing index order. Only literals that exclude a still-covered negative
// are added; any optimal set has that property, and the first optimum met is the
// lexicographically smallest.
inline std::optional<ConjunctionResult> solve_conjunction(const BooleanEncoding& x, const std::vector<std::size_t>& pos,
                                                          const std::vector<std::size_t>& neg, double w = 0,
                                                          std::size_t max_nodes = 200000) {
  if (pos.empty()) throw std::invalid_argument("solve_conjunction needs positives");
  const std::size_t m = x.m();
  if (w <= 0) w = static_cast<double>(m) + 1;
  std::vector<Bits> colp(m, Bits(pos.size())), coln(m, Bits(neg.size()));
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (x.rows[pos[i]][c]) colp[c].set(i);
    for (std::size_t i = 0; i < neg.size(); ++i)
      if (x.rows[neg[i]][c]) coln[c].set(i);
  }
  Bits allp(pos.size()), alln(neg.size());
  for (std::size_t i = 0; i < pos.size(); ++i) allp.set(i);
  for (std::size_t i = 0; i < neg.size(); ++i) alln.set(i);
  if (neg.empty()) return ConjunctionResult{{}, pos.size(), true};

  std::optional<ConjunctionResult> best;
  double best_value = 0;
  std::size_t nodes = 0;
  std::vector<int> cur;
  bool cut = false;
  auto value = [w](std::size_t cov, std::size_t size) { return w * static_cast<double>(cov) - static_cast<double>(size); };

  std::function<void(std::size_t, const Bits&, const Bits&)> dfs = [&](std::size_t start, const Bits& cp, const Bits& cn) {
    for (std::size_t c = start; c < m; ++c) {
      if (++nodes > max_nodes) {
        cut = true;
        return;
      }
      Bits ncn = cn & coln[c];
      if (ncn == cn) continue;
      Bits ncp = cp & colp[c];
      const std::size_t cov = ncp.count();
      if (cov == 0) continue;
      const std::size_t size = cur.size() + 1;
      const std::size_t min_size = size + (ncn.none() ? 0 : 1);
      if (best && value(cov, min_size) <= best_value) continue;
      cur.push_back(static_cast<int>(c));
      if (ncn.none()) {
        best = ConjunctionResult{{cur}, cov, true};
        best_value = value(cov, size);
      } else {
        dfs(c + 1, ncp, ncn);
      }
      cur.pop_back();
      if (cut) return;
    }
  };
  dfs(0, allp, alln);
  if (best) best->exact = !cut;
  return best;
}

struct Dnf {
  std::vector<std::vector<Literal>> conjunctions;

  bool eval(const FeatureVector& fv) const {
    for (const auto& conj : conjunctions) {
      bool all = true;
      for (const auto& l : conj)
        if (!l.eval(fv)) {
          all = false;
          break;
        }
      if (all) return true;
    }
    return false;
  }

  std::size_t literal_count() const {
    std::size_t n = 0;
    for (const auto& c : conjunctions) n += c.size();
    return n;
  }

  std::string render() const {
    if (conjunctions.empty()) return "false";
    std::string s;
    for (std::size_t i = 0; i < conjunctions.size(); ++i) {
      const auto& conj = conjunctions[i];
      std::string part;
      for (std::size_t k = 0; k < conj.size(); ++k) part += (k ? " and " : "") + conj[k].render();
      if (conj.empty()) part = "true";
      if (conjunctions.size() > 1 && conj.size() > 1) part = "(" + part + ")";
      s += (i ? " or " : "") + part;
    }
    return s;
  }

  bool operator==(const Dnf&) const = default;
};

struct DnfResult {
  Dnf dnf;
  std::vector<Conjunction> columns;
  bool perfect = false;
};

// labels: positives become P, negatives N, neutral rows impose nothing
inline DnfResult learn_dnf(const BooleanEncoding& x, const std::vector<Label>& labels, int j = 3, double w = 0) {
  if (j < 1) throw std::invalid_argument("learn_dnf needs j >= 1");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::positive) pos.push_back(i);
    if (labels[i] == Label::negative) neg.push_back(i);
  }
  DnfResult out;
  if (pos.empty()) throw Infeasible("no positive components");
  for (int it = 0; it < j && !pos.empty(); ++it) {
    auto conj = solve_conjunction(x, pos, neg, w);
    if (!conj) {
      if (it == 0) throw Infeasible("positives indistinguishable from negatives");
      break;
    }
    std::vector<Literal> lits;
    for (int c : conj->conj.columns) lits.push_back(x.columns[c]);
    std::vector<std::size_t> rest;
    for (auto p : pos) {
      bool covered = true;
      for (int c : conj->conj.columns) covered = covered && x.rows[p][c];
      if (!covered) rest.push_back(p);
    }
    pos = std::move(rest);
    out.dnf.conjunctions.push_back(std::move(lits));
    out.columns.push_back(conj->conj);
  }
  out.perfect = pos.empty();
  return out;
}

}  // namespace dac
