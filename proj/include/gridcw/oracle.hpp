#pragma once

#include "cwx.hpp"
#include "errors.hpp"
#include "grid.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gridcw {

// Exhaustive keeps every label partition a subexpression can end in.
// CoarseLabels keeps only the partition into neighbourhood classes, which is
// much faster and is cross-checked against Exhaustive in the tests.
enum class OracleMode { Exhaustive, CoarseLabels };

struct OracleLimits {
  int max_vertices = 8;
  int max_k = 4;
  OracleMode mode = OracleMode::Exhaustive;
};

struct OracleResult {
  int width = 0;
  CwExpression witness;
};

namespace detail {

using Mask = std::uint32_t;

inline int lowest(Mask m) { return std::countr_zero(m); }

class WidthSearch {
public:
  WidthSearch(const Graph& g, int k, bool linear, OracleMode mode)
      : n_(g.size()), k_(k), linear_(linear), mode_(mode), adj_(static_cast<std::size_t>(g.size()), 0) {
    for (int u = 0; u < n_; ++u)
      for (int v = 0; v < n_; ++v)
        if (g.has_edge(u, v))
          adj_[static_cast<std::size_t>(u)] |= Mask{1} << v;
    full_ = n_ == 32 ? ~Mask{0} : (Mask{1} << n_) - 1;
    states_.resize(std::size_t{1} << n_);
  }

  // Index of a state covering every vertex, or -1.
  int run() {
    for (Mask S = 1; S <= full_; ++S) {
      if (std::popcount(S) == 1) {
        add_state(S, {S}, Provenance{});
      } else if (coarse_classes(S).size() <= static_cast<std::size_t>(k_)) {
        expand(S);
      }
      if (S == full_)
        break;
    }
    auto& top = states_[full_];
    return top.list.empty() ? -1 : 0;
  }

  void build(CwExpression& e, const std::vector<GridVertex>& ids, int& out_root) {
    std::vector<int> labels;
    const auto& st = states_[full_].list[0];
    for (std::size_t c = 0; c < st.classes.size(); ++c)
      labels.push_back(static_cast<int>(c));
    out_root = emit(e, ids, full_, 0, labels);
  }

private:
  struct Provenance {
    Mask left = 0, right = 0;
    int left_state = -1, right_state = -1;
    std::vector<std::pair<int, int>> unions;  // (left class or -1, right class or -1)
    std::vector<int> target;                   // union class -> final class
  };
  struct State {
    std::vector<Mask> classes;
    Provenance from;
  };
  struct Bucket {
    std::vector<State> list;
    std::map<std::vector<Mask>, int> index;
  };

  Mask outside_sig(int v, Mask S) const { return adj_[static_cast<std::size_t>(v)] & ~S & full_; }
  Mask sig(Mask X, Mask S) const { return outside_sig(lowest(X), S); }

  bool homogeneous(Mask X, Mask S) const {
    Mask s = sig(X, S);
    for (Mask r = X; r; r &= r - 1)
      if (outside_sig(lowest(r), S) != s)
        return false;
    return true;
  }
  bool no_edges(Mask X, Mask Y) const {
    for (Mask r = X; r; r &= r - 1)
      if (adj_[static_cast<std::size_t>(lowest(r))] & Y)
        return false;
    return true;
  }
  bool complete(Mask X, Mask Y) const {
    for (Mask r = X; r; r &= r - 1)
      if ((adj_[static_cast<std::size_t>(lowest(r))] & Y) != Y)
        return false;
    return true;
  }

  std::vector<Mask> coarse_classes(Mask S) const {
    std::map<Mask, Mask> by_sig;
    for (Mask r = S; r; r &= r - 1) {
      int v = lowest(r);
      by_sig[outside_sig(v, S)] |= Mask{1} << v;
    }
    std::vector<Mask> out;
    for (auto& [s, m] : by_sig)
      out.push_back(m);
    std::sort(out.begin(), out.end());
    return out;
  }

  void add_state(Mask S, std::vector<Mask> classes, Provenance p) {
    std::sort(classes.begin(), classes.end());
    auto& b = states_[S];
    if (b.index.count(classes))
      return;
    b.index.emplace(classes, static_cast<int>(b.list.size()));
    b.list.push_back({std::move(classes), std::move(p)});
  }

  void expand(Mask S) {
    Mask low = S & (~S + 1);
    Mask rest = S & ~low;
    // S1 holds the lowest vertex, so each unordered split is seen once.
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      Mask S1 = low | sub, S2 = S & ~S1;
      if (S2 != 0 && (!linear_ || std::popcount(S1) == 1 || std::popcount(S2) == 1))
        combine(S, S1, S2);
      if (sub == 0)
        break;
      if (mode_ == OracleMode::CoarseLabels && !states_[S].list.empty())
        return;
    }
  }

  void combine(Mask S, Mask S1, Mask S2) {
    const auto& A = states_[S1].list;
    const auto& B = states_[S2].list;
    for (int ia = 0; ia < static_cast<int>(A.size()); ++ia)
      for (int ib = 0; ib < static_cast<int>(B.size()); ++ib) {
        const auto& L = A[static_cast<std::size_t>(ia)].classes;
        const auto& R = B[static_cast<std::size_t>(ib)].classes;
        std::vector<int> match(L.size(), -1);
        std::vector<char> used(R.size(), 0);
        int need = static_cast<int>(L.size() + R.size()) - k_;
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int matched) {
          if (mode_ == OracleMode::CoarseLabels && !states_[S].list.empty())
            return;
          if (i == L.size()) {
            if (matched >= need)
              try_union(S, S1, S2, ia, ib, match);
            return;
          }
          int remaining = static_cast<int>(L.size() - i);
          if (matched + remaining < need)
            return;
          for (std::size_t j = 0; j < R.size(); ++j) {
            if (used[j])
              continue;
            if (!no_edges(L[i], R[j]) || !homogeneous(L[i] | R[j], S))
              continue;
            used[j] = 1;
            match[i] = static_cast<int>(j);
            rec(i + 1, matched + 1);
            used[j] = 0;
            match[i] = -1;
          }
          rec(i + 1, matched);
        };
        rec(0, 0);
      }
  }

  void try_union(Mask S, Mask S1, Mask S2, int ia, int ib, const std::vector<int>& match) {
    const auto& L = states_[S1].list[static_cast<std::size_t>(ia)].classes;
    const auto& R = states_[S2].list[static_cast<std::size_t>(ib)].classes;
    std::vector<std::pair<int, int>> unions;
    std::vector<char> taken(R.size(), 0);
    for (std::size_t i = 0; i < L.size(); ++i) {
      unions.emplace_back(static_cast<int>(i), match[i]);
      if (match[i] >= 0)
        taken[static_cast<std::size_t>(match[i])] = 1;
    }
    for (std::size_t j = 0; j < R.size(); ++j)
      if (!taken[j])
        unions.emplace_back(-1, static_cast<int>(j));
    auto left_of = [&](const std::pair<int, int>& u) { return u.first < 0 ? Mask{0} : L[static_cast<std::size_t>(u.first)]; };
    auto right_of = [&](const std::pair<int, int>& u) { return u.second < 0 ? Mask{0} : R[static_cast<std::size_t>(u.second)]; };
    for (std::size_t i = 0; i < unions.size(); ++i)
      for (std::size_t j = i + 1; j < unions.size(); ++j) {
        Mask li = left_of(unions[i]), ri = right_of(unions[i]);
        Mask lj = left_of(unions[j]), rj = right_of(unions[j]);
        bool cross = !no_edges(li, rj) || !no_edges(ri, lj);
        if (cross && !complete(li | ri, lj | rj))
          return;
      }
    std::vector<Mask> q;
    for (auto& u : unions)
      q.push_back(left_of(u) | right_of(u));

    Provenance base;
    base.left = S1;
    base.right = S2;
    base.left_state = ia;
    base.right_state = ib;
    base.unions = unions;

    // Group union classes with equal outside neighbourhoods; any merge within a group is allowed.
    std::map<Mask, std::vector<int>> groups;
    for (std::size_t i = 0; i < q.size(); ++i)
      groups[sig(q[i], S)].push_back(static_cast<int>(i));
    if (mode_ == OracleMode::CoarseLabels) {
      base.target.assign(q.size(), 0);
      std::vector<Mask> merged;
      for (auto& [s, members] : groups) {
        Mask m = 0;
        for (int i : members) {
          m |= q[static_cast<std::size_t>(i)];
          base.target[static_cast<std::size_t>(i)] = static_cast<int>(merged.size());
        }
        merged.push_back(m);
      }
      finalize(S, merged, base);
      return;
    }
    std::vector<std::vector<int>> glist;
    for (auto& [s, members] : groups)
      glist.push_back(members);
    std::vector<int> block(q.size(), -1);
    // Blocks numbered from `start` belong to the current group.
    std::function<void(std::size_t, std::size_t, int, int)> rec = [&](std::size_t g, std::size_t pos, int blocks,
                                                                       int start) {
      if (g == glist.size()) {
        Provenance p = base;
        p.target = block;
        std::vector<Mask> merged(static_cast<std::size_t>(blocks), 0);
        for (std::size_t i = 0; i < q.size(); ++i)
          merged[static_cast<std::size_t>(block[i])] |= q[i];
        finalize(S, merged, p);
        return;
      }
      const auto& members = glist[g];
      if (pos == members.size()) {
        rec(g + 1, 0, blocks, blocks);
        return;
      }
      int i = members[pos];
      for (int b = start; b < blocks; ++b) {
        block[static_cast<std::size_t>(i)] = b;
        rec(g, pos + 1, blocks, start);
      }
      block[static_cast<std::size_t>(i)] = blocks;
      rec(g, pos + 1, blocks + 1, start);
      block[static_cast<std::size_t>(i)] = -1;
    };
    rec(0, 0, 0, 0);
  }

  // Stores the state with its classes in sorted order and targets remapped.
  void finalize(Mask S, const std::vector<Mask>& merged, Provenance p) {
    std::vector<int> order(merged.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return merged[static_cast<std::size_t>(a)] < merged[static_cast<std::size_t>(b)]; });
    std::vector<int> rank(merged.size());
    std::vector<Mask> sorted;
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
      sorted.push_back(merged[static_cast<std::size_t>(order[r])]);
    }
    for (int& t : p.target)
      t = rank[static_cast<std::size_t>(t)];
    add_state(S, std::move(sorted), std::move(p));
  }

  int emit(CwExpression& e, const std::vector<GridVertex>& ids, Mask S, int si, const std::vector<int>& labels) {
    const auto& st = states_[S].list[static_cast<std::size_t>(si)];
    if (std::popcount(S) == 1)
      return e.vert(ids[static_cast<std::size_t>(lowest(S))], labels[0]);
    const auto& p = st.from;
    std::vector<char> in_use(static_cast<std::size_t>(k_), 0);
    for (int l : labels)
      in_use[static_cast<std::size_t>(l)] = 1;
    std::vector<int> union_label(p.unions.size(), -1);
    std::vector<char> seen(labels.size(), 0);
    std::vector<int> free_labels;
    for (int l = 0; l < k_; ++l)
      if (!in_use[static_cast<std::size_t>(l)])
        free_labels.push_back(l);
    std::size_t next_free = 0;
    for (std::size_t u = 0; u < p.unions.size(); ++u) {
      int t = p.target[u];
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        union_label[u] = labels[static_cast<std::size_t>(t)];
      } else {
        if (next_free >= free_labels.size())
          throw InvariantError("oracle witness ran out of labels");
        union_label[u] = free_labels[next_free++];
      }
    }
    const auto& Lst = states_[p.left].list[static_cast<std::size_t>(p.left_state)];
    const auto& Rst = states_[p.right].list[static_cast<std::size_t>(p.right_state)];
    std::vector<int> left_labels(Lst.classes.size()), right_labels(Rst.classes.size());
    for (std::size_t u = 0; u < p.unions.size(); ++u) {
      if (p.unions[u].first >= 0)
        left_labels[static_cast<std::size_t>(p.unions[u].first)] = union_label[u];
      if (p.unions[u].second >= 0)
        right_labels[static_cast<std::size_t>(p.unions[u].second)] = union_label[u];
    }
    int l = emit(e, ids, p.left, p.left_state, left_labels);
    int r = emit(e, ids, p.right, p.right_state, right_labels);
    int node = e.unite(l, r);
    auto part = [&](std::size_t u, bool left) -> Mask {
      int c = left ? p.unions[u].first : p.unions[u].second;
      if (c < 0)
        return 0;
      return (left ? Lst : Rst).classes[static_cast<std::size_t>(c)];
    };
    for (std::size_t i = 0; i < p.unions.size(); ++i)
      for (std::size_t j = i + 1; j < p.unions.size(); ++j)
        if (!no_edges(part(i, true), part(j, false)) || !no_edges(part(i, false), part(j, true)))
          node = e.join(union_label[i], union_label[j], node);
    for (std::size_t u = 0; u < p.unions.size(); ++u) {
      int want = labels[static_cast<std::size_t>(p.target[u])];
      if (union_label[u] != want)
        node = e.relabel(union_label[u], want, node);
    }
    return node;
  }

  int n_, k_;
  bool linear_;
  OracleMode mode_;
  std::vector<Mask> adj_;
  Mask full_ = 0;
  std::vector<Bucket> states_;
};

} // namespace detail

// Smallest k <= max_k with a (linear) k-expression for g, with a witness over ids.
inline std::optional<OracleResult> exact_cwd(const Graph& g, const std::vector<GridVertex>& ids, int max_k,
                                             bool linear, OracleLimits limits = {}) {
  if (static_cast<int>(ids.size()) != g.size())
    throw InputError("need one vertex id per graph vertex");
  if (g.size() > limits.max_vertices)
    throw InputError("oracle handles at most " + std::to_string(limits.max_vertices) + " vertices, got " +
                     std::to_string(g.size()));
  if (limits.max_vertices > 20)
    throw InputError("oracle vertex limit cannot exceed 20");
  if (max_k > limits.max_k)
    throw InputError("oracle handles max_k up to " + std::to_string(limits.max_k));
  if (g.size() == 0)
    return OracleResult{};
  for (int k = 1; k <= max_k; ++k) {
    detail::WidthSearch s(g, k, linear, limits.mode);
    if (s.run() < 0)
      continue;
    OracleResult r;
    r.width = k;
    int root = -1;
    s.build(r.witness, ids, root);
    r.witness.set_root(root);
    return r;
  }
  return std::nullopt;
}

inline std::vector<GridVertex> default_ids(int n) {
  std::vector<GridVertex> ids;
  for (int i = 0; i < n; ++i)
    ids.push_back({1, i + 1});
  return ids;
}

inline std::optional<OracleResult> exact_cwd(const Graph& g, int max_k, bool linear, OracleLimits limits = {}) {
  return exact_cwd(g, default_ids(g.size()), max_k, linear, limits);
}

inline std::optional<OracleResult> exact_cwd(const GridGraph& g, int max_k, bool linear, OracleLimits limits = {}) {
  return exact_cwd(g.graph(), g.vertices(), max_k, linear, limits);
}

// evaluate(e) is isomorphic to g and e uses at most claimed_k labels.
inline bool verify_width_claim(const CwExpression& e, const Graph& g, int claimed_k) {
  LabelledGraph lg;
  try {
    lg = evaluate(e);
  } catch (const InputError&) {
    return false;
  }
  if (label_count(e) > claimed_k)
    return false;
  return isomorphic(lg.graph, g);
}

} // namespace gridcw
