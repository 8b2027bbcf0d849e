#pragma once

#include "cwx.hpp"
#include "delta_spec.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "neighbourhood.hpp"
#include "veins_panels.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gridcw {

struct LabelBudget {
  std::string formula;
  int value = 0;
  int J = 0, N = 0, M = 0, k = 0, ell = 0;

  std::string header(int used) const {
    return "# budget " + formula + " = " + std::to_string(value) + ", used = " + std::to_string(used);
  }
};

struct BuildResult {
  LinearExpression expr;
  LabelBudget budget;
};

// Row by row, bottom-up: the vertex of column x in the current row has label x-1,
// every earlier vertex of column x has label ell+x-1.
inline BuildResult build_rectangular_block(const DeltaSpec& d, int i, int j, int m, int n) {
  BuildResult out;
  out.budget.formula = "2l";
  out.budget.ell = m;
  out.budget.value = 2 * m;
  if (m <= 0 || n <= 0)
    return out;
  auto cur = [](int x) { return x; };
  auto earlier = [m](int x) { return m + x; };
  auto& e = out.expr;
  for (int r = j; r < j + n; ++r) {
    for (int x = 0; x < m; ++x) {
      GridVertex v{i + x, r};
      e.add(v, cur(x));
      for (int y = 0; y < x; ++y)
        if (adjacent(d, {i + y, r}, v))
          e.join(cur(x), cur(y));
      if (r > j)
        for (int y = 0; y < m; ++y)
          if (adjacent(d, {i + y, j}, v))
            e.join(cur(x), earlier(y));
    }
    for (int x = 0; x < m; ++x)
      e.relabel(cur(x), earlier(x));
  }
  return out;
}

inline BuildResult build_rectangular_block(const GridGraph& G) {
  if (G.size() == 0)
    return build_rectangular_block(G.spec(), 1, 1, 0, 0);
  int lo = G.min_col(), hi = G.max_col();
  auto rows = G.rows();
  auto full = GridGraph::rectangle(G.spec(), lo, rows.front(), hi - lo + 1, rows.back() - rows.front() + 1);
  if (full.size() != G.size())
    throw InputError("graph is not a full rectangle");
  return build_rectangular_block(G.spec(), lo, rows.front(), hi - lo + 1, rows.back() - rows.front() + 1);
}

namespace detail {

// Labels held by placed vertices, with join decisions checked for uniformity.
class LabelBook {
public:
  explicit LabelBook(const GridGraph& g) : g_(g) {}

  void add(LinearExpression& e, GridVertex v, int label) {
    e.add(v, label);
    holders_[label].push_back(v);
  }
  void relabel(LinearExpression& e, int from, int to) {
    if (from == to)
      return;
    auto it = holders_.find(from);
    if (it == holders_.end())
      return;
    auto moved = std::move(it->second);
    holders_.erase(it);
    e.relabel(from, to);
    auto& dst = holders_[to];
    dst.insert(dst.end(), moved.begin(), moved.end());
  }
  // Joins `label` (holding only v) to every other label whose holders are all adjacent to v.
  void connect(LinearExpression& e, GridVertex v, int label) {
    int vi = g_.require(v);
    for (auto& [l, hs] : holders_) {
      if (l == label || hs.empty())
        continue;
      int adj = 0;
      for (auto h : hs)
        adj += g_.adjacent(vi, g_.require(h));
      if (adj == 0)
        continue;
      if (adj != static_cast<int>(hs.size()))
        throw InvariantError("label " + std::to_string(l) + " is not uniform towards " + v.id() + " (" +
                             std::to_string(adj) + " of " + std::to_string(hs.size()) + " adjacent)");
      e.join(label, l);
    }
  }

private:
  const GridGraph& g_;
  std::map<int, std::vector<GridVertex>> holders_;
};

} // namespace detail

// Columns of G beyond J grouped by the row-1 neighbourhood among row-2 vertices over all of G's columns.
inline SimilarityPartition two_row_build_partition(const DeltaSpec& d, const GridGraph& G, int J) {
  auto cols = G.columns();
  std::map<std::vector<char>, std::vector<int>> by_sig;
  for (int x : cols) {
    if (x <= J)
      continue;
    std::vector<char> sig;
    for (int z : cols)
      sig.push_back(adjacent(d, {x, 1}, {z, 2}));
    by_sig[sig].push_back(x);
  }
  std::vector<std::vector<int>> classes;
  for (auto& [s, c] : by_sig)
    classes.push_back(c);
  return SimilarityPartition(std::move(classes));
}

inline BuildResult build_bounded_two_row(const DeltaSpec& d, const GridGraph& G, int J,
                                         const SimilarityPartition& partition) {
  if (J < 0)
    throw InputError("J must be >= 0");
  BuildResult out;
  const int N = partition.size();
  out.budget.formula = "2J+N+2";
  out.budget.J = J;
  out.budget.N = N;
  out.budget.value = 2 * J + N + 2;
  if (G.size() == 0)
    return out;
  for (int x = std::max(J + 1, G.min_col()); x < G.max_col(); ++x)
    if (d.alpha.letter(x) >= 2)
      throw InputError("alpha letter " + std::to_string(d.alpha.letter(x)) + " at column " + std::to_string(x) +
                       " lies beyond J=" + std::to_string(J));
  std::map<int, int> class_of;
  for (int c = 0; c < N; ++c)
    for (int x : partition[c])
      class_of[x] = c;
  for (int x : G.columns())
    if (x > J && !class_of.count(x))
      throw InputError("partition does not cover column " + std::to_string(x));

  const int a1 = 0, a2 = 1;
  auto c_label = [](int y) { return 2 + y - 1; };
  auto p_label = [J](int y) { return 2 + J + y - 1; };
  auto s_label = [J](int z) { return 2 + 2 * J + z; };
  auto final_label = [&](GridVertex v) { return v.col <= J ? p_label(v.col) : s_label(class_of[v.col]); };

  auto& e = out.expr;
  detail::LabelBook book(G);
  std::map<int, std::vector<GridVertex>> rows;
  for (auto v : G.vertices())
    rows[v.row].push_back(v);
  for (auto& [r, vs] : rows) {
    std::sort(vs.begin(), vs.end());
    std::vector<GridVertex> first, rest;
    for (auto v : vs)
      (v.col <= J ? first : rest).push_back(v);
    // First J columns: own labels, edges inside the row and to earlier rows.
    for (auto v : first) {
      book.add(e, v, c_label(v.col));
      book.connect(e, v, c_label(v.col));
    }
    std::optional<GridVertex> prev;
    int prev_label = -1;
    for (std::size_t t = 0; t < first.size(); ++t) {
      auto v = first[t];
      if (t + 1 == first.size()) {
        book.relabel(e, c_label(v.col), a2);
        prev = v;
        prev_label = a2;
      } else {
        book.relabel(e, c_label(v.col), p_label(v.col));
      }
    }
    for (auto v : rest) {
      int mine = prev_label == a2 ? a1 : a2;
      book.add(e, v, mine);
      book.connect(e, v, mine);
      if (prev)
        book.relabel(e, prev_label, final_label(*prev));
      prev = v;
      prev_label = mine;
    }
    if (prev)
      book.relabel(e, prev_label, final_label(*prev));
  }
  return out;
}

inline BuildResult build_bounded_two_row(const DeltaSpec& d, const GridGraph& G, int J) {
  return build_bounded_two_row(d, G, J, two_row_build_partition(d, G, J));
}

// Number of alpha letters 2 or 3 at columns lo..hi-1.
inline int count_23(const DeltaSpec& d, int lo, int hi) {
  int c = 0;
  for (int x = std::max(lo, 1); x < hi; ++x)
    c += d.alpha.letter(x) >= 2;
  return c;
}

struct PanelParameters {
  int M = 0;  // exceeds M^beta(n) for every n up to the last column
  int N = 0;  // exceeds N on every gap factor
  int J = 0;  // most letters 2 or 3 in one gap factor
  std::vector<std::pair<int, int>> gaps;
};

inline PanelParameters panel_parameters(const DeltaSpec& d, const PanelDecomposition& pd) {
  PanelParameters p;
  if (pd.ends.size() < 2)
    return p;
  int k = pd.k;
  int last = pd.ends.back();
  int mb = 0;
  for (int n = 1; n <= last; ++n)
    mb = std::max(mb, m_beta_incremental(d.beta, n));
  p.M = mb + 1;
  int nmax = 0;
  for (std::size_t i = 1; i < pd.ends.size(); ++i) {
    int lo = i == 1 ? pd.ends[0] + 1 : pd.ends[i - 1] - k + 1;
    int hi = pd.ends[i];
    lo = std::max(lo, 1);
    p.gaps.emplace_back(lo, hi);
    nmax = std::max(nmax, n_delta(d, interval(lo, hi)));
    p.J = std::max(p.J, count_23(d, lo, hi));
  }
  p.N = nmax + 1;
  return p;
}

struct PanelBuild {
  LinearExpression expr;
  LabelBudget budget;
  PanelDecomposition panels;
  PanelParameters params;
  std::vector<std::size_t> checkpoints;  // op count after each panel
  int peak_labels = 0;
};

namespace detail {

// Adds vertices in the given order; after each step the labels are exactly the
// classes of placed vertices with equal neighbourhoods among unplaced ones.
class SimilarityEngine {
public:
  explicit SimilarityEngine(const GridGraph& g) : g_(g), placed_(g.size()), outside_(g.size()) { outside_.set_all(); }

  void place(LinearExpression& e, GridVertex v) {
    int vi = g_.require(v);
    if (placed_.test(vi))
      throw InputError("vertex " + v.id() + " placed twice");
    int fresh = 0;
    while (classes_.count(fresh))
      ++fresh;
    e.add(v, fresh);
    for (auto& [l, members] : classes_) {
      int adj = 0;
      for (int u : members)
        adj += g_.adjacent(vi, u);
      if (adj == 0)
        continue;
      if (adj != static_cast<int>(members.size()))
        throw InvariantError("label class " + std::to_string(l) + " is not uniform towards " + v.id());
      e.join(fresh, l);
    }
    classes_[fresh] = {vi};
    placed_.set(vi);
    outside_.reset(vi);
    peak_ = std::max(peak_, static_cast<int>(classes_.size()));
    // Merge classes that now share their outside neighbourhood.
    std::map<Bitset, int> owner;
    std::vector<std::pair<int, int>> merges;
    for (auto& [l, members] : classes_) {
      Bitset sig = g_.graph().row(members.front());
      sig &= outside_;
      auto [it, fresh_sig] = owner.emplace(sig, l);
      if (!fresh_sig)
        merges.emplace_back(l, it->second);
    }
    for (auto [from, to] : merges) {
      e.relabel(from, to);
      auto& dst = classes_[to];
      dst.insert(dst.end(), classes_[from].begin(), classes_[from].end());
      classes_.erase(from);
    }
  }

  int peak() const { return peak_; }
  const std::map<int, std::vector<int>>& classes() const { return classes_; }

private:
  const GridGraph& g_;
  Bitset placed_, outside_;
  std::map<int, std::vector<int>> classes_;
  int peak_ = 0;
};

} // namespace detail

// Panels are built in order, each row by row bottom-up and left to right.
inline PanelBuild build_panel_expression(const DeltaSpec& d, const GridGraph& G, const KFactor& f,
                                         PanelOptions opt = {}) {
  PanelBuild out;
  out.panels = build_panels(d, G, f, opt);
  out.params = panel_parameters(d, out.panels);
  int k = f.width;
  out.budget.formula = "4k^2+MN+M+2J+2";
  out.budget.k = k;
  out.budget.M = out.params.M;
  out.budget.N = out.params.N;
  out.budget.J = out.params.J;
  out.budget.value = 4 * k * k + out.params.M * out.params.N + out.params.M + 2 * out.params.J + 2;
  detail::SimilarityEngine engine(G);
  for (const auto& panel : out.panels.panels) {
    auto order = panel;
    std::sort(order.begin(), order.end(), [](GridVertex a, GridVertex b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (auto v : order)
      engine.place(out.expr, v);
    out.checkpoints.push_back(out.expr.ops.size());
  }
  out.peak_labels = engine.peak();
  return out;
}

// Label classes after the first `ops` operations, as vertex sets.
inline std::vector<std::vector<GridVertex>> label_classes_after(const LinearExpression& e, std::size_t ops) {
  LinearExpression head;
  head.ops.assign(e.ops.begin(), e.ops.begin() + static_cast<std::ptrdiff_t>(std::min(ops, e.ops.size())));
  auto lg = evaluate(head);
  std::map<int, std::vector<GridVertex>> by;
  for (std::size_t i = 0; i < lg.vertices.size(); ++i)
    by[lg.labels[i]].push_back(lg.vertices[i]);
  std::vector<std::vector<GridVertex>> out;
  for (auto& [l, vs] : by)
    out.push_back(vs);
  return out;
}

// At every panel checkpoint the label classes equal the similarity classes of the built prefix.
inline bool panel_labels_match_similarity(const PanelBuild& b, const GridGraph& G) {
  for (std::size_t i = 0; i < b.checkpoints.size(); ++i) {
    auto prefix = b.panels.prefix(static_cast<int>(i) + 1);
    auto sim = similarity_partition(G, prefix);
    std::set<std::vector<GridVertex>> want;
    for (const auto& c : sim.classes()) {
      std::vector<GridVertex> vs;
      for (int x : c)
        vs.push_back(G.vertex(x));
      std::sort(vs.begin(), vs.end());
      want.insert(vs);
    }
    auto got_list = label_classes_after(b.expr, b.checkpoints[i]);
    std::set<std::vector<GridVertex>> got(got_list.begin(), got_list.end());
    if (got != want)
      return false;
  }
  return true;
}

} // namespace gridcw
