#pragma once

#include "delta_spec.hpp"
#include "errors.hpp"
#include "grid.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gridcw {

// Classes of a vertex set, each sorted, ordered by smallest member.
class SimilarityPartition {
public:
  SimilarityPartition() = default;
  explicit SimilarityPartition(std::vector<std::vector<int>> classes) : classes_(std::move(classes)) {
    for (auto& c : classes_)
      std::sort(c.begin(), c.end());
    std::sort(classes_.begin(), classes_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }

  int size() const { return static_cast<int>(classes_.size()); }
  const std::vector<std::vector<int>>& classes() const { return classes_; }
  const std::vector<int>& operator[](int i) const { return classes_[static_cast<std::size_t>(i)]; }

  // Index of the class holding x, or -1.
  int class_of(int x) const {
    for (int i = 0; i < size(); ++i)
      if (std::binary_search(classes_[static_cast<std::size_t>(i)].begin(),
                             classes_[static_cast<std::size_t>(i)].end(), x))
        return i;
    return -1;
  }

  // True when every class of *this lies inside a class of coarser.
  bool refines(const SimilarityPartition& coarser) const {
    for (const auto& c : classes_) {
      int k = coarser.class_of(c.front());
      if (k < 0)
        return false;
      for (int x : c)
        if (coarser.class_of(x) != k)
          return false;
    }
    return true;
  }

  bool operator==(const SimilarityPartition&) const = default;

private:
  std::vector<std::vector<int>> classes_;
};

// Partition of U by neighbourhood in V \ U.
inline SimilarityPartition similarity_partition(const Graph& g, std::vector<int> U) {
  std::sort(U.begin(), U.end());
  if (std::adjacent_find(U.begin(), U.end()) != U.end())
    throw InputError("vertex set has a repeated vertex");
  Bitset outside(g.size());
  outside.set_all();
  for (int u : U) {
    if (u < 0 || u >= g.size())
      throw InputError("vertex " + std::to_string(u) + " is not in the graph");
    outside.reset(u);
  }
  std::map<Bitset, std::size_t> seen;
  std::vector<std::vector<int>> classes;
  for (int u : U) {
    Bitset sig = g.row(u);
    sig &= outside;
    auto [it, fresh] = seen.emplace(std::move(sig), classes.size());
    if (fresh)
      classes.emplace_back();
    classes[it->second].push_back(u);
  }
  return SimilarityPartition(std::move(classes));
}

inline int mu(const Graph& g, const std::vector<int>& U) { return similarity_partition(g, U).size(); }

inline SimilarityPartition similarity_partition(const GridGraph& g, const std::vector<GridVertex>& U) {
  std::vector<int> idx;
  for (auto v : U) {
    auto i = g.index_of(v);
    if (!i)
      throw InputError("vertex " + v.id() + " is not in the graph");
    idx.push_back(*i);
  }
  return similarity_partition(g.graph(), idx);
}

// Classes of columns Q by the neighbourhood of their row-1 vertex among the
// row-2 vertices of the two-row graph on Q.
inline SimilarityPartition two_row_partition(const DeltaSpec& d, std::vector<int> Q) {
  std::sort(Q.begin(), Q.end());
  Q.erase(std::unique(Q.begin(), Q.end()), Q.end());
  std::map<std::vector<char>, std::size_t> seen;
  std::vector<std::vector<int>> classes;
  for (int x : Q) {
    std::vector<char> sig;
    for (int y : Q)
      sig.push_back(adjacent(d, {x, 1}, {y, 2}));
    auto [it, fresh] = seen.emplace(std::move(sig), classes.size());
    if (fresh)
      classes.emplace_back();
    classes[it->second].push_back(x);
  }
  return SimilarityPartition(std::move(classes));
}

inline int n_delta(const DeltaSpec& d, const std::vector<int>& Q) { return two_row_partition(d, Q).size(); }

inline std::vector<int> interval(int lo, int hi) {
  std::vector<int> q;
  for (int i = lo; i <= hi; ++i)
    q.push_back(i);
  return q;
}

// Bond graph on columns 1..n; vertex i-1 is column i.
inline Graph bond_graph(const BondSource& b, int n) {
  Graph g(n);
  for (int x = 1; x <= n; ++x)
    for (int y = x + 2; y <= n; ++y)
      if (b.contains(x, y))
        g.add_edge(x - 1, y - 1);
  return g;
}

// Partition of columns [1,m] by bond neighbourhood in [m+1,n], as column numbers.
inline SimilarityPartition bond_prefix_partition(const BondSource& b, int n, int m) {
  if (m < 0 || m > n)
    throw InputError("prefix length out of range");
  Graph g = bond_graph(b, n);
  auto p = similarity_partition(g, interval(0, m - 1));
  std::vector<std::vector<int>> cols;
  for (const auto& c : p.classes()) {
    cols.emplace_back();
    for (int x : c)
      cols.back().push_back(x + 1);
  }
  return SimilarityPartition(std::move(cols));
}

// max over m < n of mu(B([1,n]), [1,m]), straight from the definition.
inline int m_beta(const BondSource& b, int n) {
  if (n < 1)
    throw InputError("n must be >= 1");
  Graph g = bond_graph(b, n);
  int best = 0;
  for (int m = 1; m < n; ++m)
    best = std::max(best, mu(g, interval(0, m - 1)));
  return best;
}

// Same value by refining one partition while the prefix shrinks from n-1 to 1.
inline int m_beta_incremental(const BondSource& b, int n) {
  if (n < 1)
    throw InputError("n must be >= 1");
  if (n == 1)
    return 0;
  std::vector<int> cls(static_cast<std::size_t>(n + 1), 0);
  int best = 0;
  for (int m = n - 1; m >= 1; --m) {
    int pivot = m + 1;
    std::map<std::pair<int, int>, int> relabel;
    for (int x = 1; x <= m; ++x) {
      auto k = std::make_pair(cls[static_cast<std::size_t>(x)], static_cast<int>(b.contains(x, pivot)));
      auto [it, fresh] = relabel.emplace(k, static_cast<int>(relabel.size()));
      cls[static_cast<std::size_t>(x)] = it->second;
    }
    best = std::max(best, static_cast<int>(relabel.size()));
  }
  return best;
}

// For m < m2 < n: every class of [1,m] w.r.t. [m+1,n] sits inside a class of [1,m2] w.r.t. [m2+1,n].
inline bool check_refinement(const BondSource& b, int n, int m, int m2) {
  if (!(1 <= m && m < m2 && m2 < n))
    throw InputError("check_refinement needs 1 <= m < m2 < n");
  auto fine = bond_prefix_partition(b, n, m);
  auto coarse = bond_prefix_partition(b, n, m2);
  for (const auto& c : fine.classes()) {
    int k = coarse.class_of(c.front());
    for (int x : c)
      if (coarse.class_of(x) != k)
        return false;
  }
  return true;
}

inline bool check_m_le_n_plus_1(const DeltaSpec& d, int n) {
  return m_beta(d.beta, n) <= n_delta(d, interval(1, n)) + 1;
}

struct Curve {
  std::vector<std::pair<int, int>> points;

  std::string tsv() const {
    std::ostringstream out;
    for (auto [n, v] : points)
      out << n << "\t" << v << "\n";
    return out.str();
  }
  std::string sparkline() const {
    static const char* bars[] = {"▁", "▂", "▃", "▄",
                                 "▅", "▆", "▇", "█"};
    int hi = 0;
    for (auto [n, v] : points)
      hi = std::max(hi, v);
    std::string s;
    for (auto [n, v] : points)
      s += bars[hi == 0 ? 0 : (v * 7) / hi];
    return s;
  }
  int max_value() const {
    int hi = 0;
    for (auto [n, v] : points)
      hi = std::max(hi, v);
    return hi;
  }
};

inline Curve n_delta_curve(const DeltaSpec& d, int nmax) {
  Curve c;
  for (int n = 1; n <= nmax; ++n)
    c.points.emplace_back(n, n_delta(d, interval(1, n)));
  return c;
}

inline Curve m_beta_curve(const BondSource& b, int nmax) {
  Curve c;
  for (int n = 1; n <= nmax; ++n)
    c.points.emplace_back(n, m_beta(b, n));
  return c;
}

struct GapProbe {
  std::vector<int> ends;                    // t_0, t_1, ... (t_0 = 0)
  std::vector<std::pair<int, int>> gaps;    // q_1, q_2, ...
  std::vector<int> values;                  // N on each gap
  Curve curve;                              // running supremum
};

// Locates count occurrences of f with t_i > k + t_{i-1} (t_0 = 0) and measures N on
// the gaps q_1 = [1,t_1], q_i = [t_{i-1}-k+1, t_i].
inline GapProbe n_delta_star(const DeltaSpec& d, const KFactor& f, int count, int horizon) {
  int k = f.width;
  GapProbe out;
  out.ends.push_back(0);
  int best = 0;
  for (int i = 1; i <= count; ++i) {
    int prev = out.ends.back();
    // an occurrence starting at s ends at s+k-1, which must exceed k + prev
    auto s = find_next_occurrence(d, f, prev + 1, horizon);
    if (!s) {
      std::string last = prev == 0 ? std::string("none") : "ending at column " + std::to_string(prev);
      throw HorizonError("factor occurrence " + std::to_string(i) + " not found before column " +
                         std::to_string(horizon) + "; last located occurrence " + last);
    }
    int t = *s + k - 1;
    std::pair<int, int> q = i == 1 ? std::make_pair(1, t) : std::make_pair(prev - k + 1, t);
    int v = n_delta(d, interval(q.first, q.second));
    best = std::max(best, v);
    out.ends.push_back(t);
    out.gaps.push_back(q);
    out.values.push_back(v);
    out.curve.points.emplace_back(i, best);
  }
  return out;
}

} // namespace gridcw
