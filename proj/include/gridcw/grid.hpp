#pragma once

#include "delta_spec.hpp"
#include "errors.hpp"

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridcw {

class Bitset {
public:
  Bitset() = default;
  explicit Bitset(int n) : n_(n), w_(static_cast<std::size_t>((n + 63) / 64), 0) {}

  int size() const { return n_; }
  void set(int i) { w_[static_cast<std::size_t>(i >> 6)] |= bit(i); }
  void reset(int i) { w_[static_cast<std::size_t>(i >> 6)] &= ~bit(i); }
  bool test(int i) const { return (w_[static_cast<std::size_t>(i >> 6)] & bit(i)) != 0; }
  void set_all() {
    for (auto& x : w_)
      x = ~std::uint64_t{0};
    trim();
  }
  int count() const {
    int c = 0;
    for (auto x : w_)
      c += std::popcount(x);
    return c;
  }
  bool any() const {
    for (auto x : w_)
      if (x)
        return true;
    return false;
  }
  int first() const { return next(0); }
  // Smallest set index >= i, or -1.
  int next(int i) const {
    if (i >= n_)
      return -1;
    std::size_t k = static_cast<std::size_t>(i >> 6);
    std::uint64_t cur = w_[k] & (~std::uint64_t{0} << (i & 63));
    while (true) {
      if (cur)
        return static_cast<int>(k * 64) + std::countr_zero(cur);
      if (++k == w_.size())
        return -1;
      cur = w_[k];
    }
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = first(); i >= 0; i = next(i + 1))
      out.push_back(i);
    return out;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t k = 0; k < w_.size(); ++k)
      w_[k] &= o.w_[k];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) {
    for (std::size_t k = 0; k < w_.size(); ++k)
      w_[k] |= o.w_[k];
    return *this;
  }
  Bitset& and_not(const Bitset& o) {
    for (std::size_t k = 0; k < w_.size(); ++k)
      w_[k] &= ~o.w_[k];
    return *this;
  }
  bool operator==(const Bitset&) const = default;
  auto operator<=>(const Bitset& o) const { return w_ <=> o.w_; }
  const std::vector<std::uint64_t>& words() const { return w_; }

private:
  static std::uint64_t bit(int i) { return std::uint64_t{1} << (i & 63); }
  void trim() {
    if (n_ % 64 && !w_.empty())
      w_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Simple undirected graph on vertices 0..n-1 with a dense adjacency matrix.
class Graph {
public:
  Graph() = default;
  explicit Graph(int n) : rows_(static_cast<std::size_t>(n), Bitset(n)) {}

  int size() const { return static_cast<int>(rows_.size()); }
  void add_edge(int u, int v) {
    if (u == v)
      throw InputError("self loop on vertex " + std::to_string(u));
    rows_[static_cast<std::size_t>(u)].set(v);
    rows_[static_cast<std::size_t>(v)].set(u);
  }
  bool has_edge(int u, int v) const { return rows_[static_cast<std::size_t>(u)].test(v); }
  const Bitset& row(int u) const { return rows_[static_cast<std::size_t>(u)]; }
  int degree(int u) const { return row(u).count(); }
  int edge_count() const {
    int c = 0;
    for (const auto& r : rows_)
      c += r.count();
    return c / 2;
  }
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < size(); ++u)
      for (int v = row(u).next(u + 1); v >= 0; v = row(u).next(v + 1))
        out.emplace_back(u, v);
    return out;
  }
  Graph induced(const std::vector<int>& keep) const {
    Graph h(static_cast<int>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a)
      for (std::size_t b = a + 1; b < keep.size(); ++b)
        if (has_edge(keep[a], keep[b]))
          h.add_edge(static_cast<int>(a), static_cast<int>(b));
    return h;
  }
  bool operator==(const Graph&) const = default;

private:
  std::vector<Bitset> rows_;
};

struct GridVertex {
  int col = 1;
  int row = 1;
  auto operator<=>(const GridVertex&) const = default;
  std::string id() const { return std::to_string(col) + "_" + std::to_string(row); }
};

inline bool adjacent(const DeltaSpec& d, GridVertex u, GridVertex v) {
  if (u == v)
    throw InputError("adjacency query on a single vertex " + u.id());
  if (u.col == v.col)
    return d.gamma.letter(u.col) == 1;
  if (u.col > v.col)
    std::swap(u, v);
  if (v.col == u.col + 1) {
    switch (d.alpha.letter(u.col)) {
    case 0:
      return u.row == v.row;
    case 1:
      return u.row != v.row;
    case 2:
      return u.row >= v.row;
    default:
      return u.row < v.row;
    }
  }
  return d.beta.contains(u.col, v.col);
}

class GridGraph {
public:
  GridGraph() = default;

  static GridGraph induced(const DeltaSpec& d, std::vector<GridVertex> vs) {
    std::sort(vs.begin(), vs.end());
    if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
      throw InputError("duplicate vertex in vertex set");
    for (auto v : vs)
      if (v.col < 1 || v.row < 1)
        throw InputError("vertex " + v.id() + " outside the grid");
    GridGraph g;
    g.spec_ = d;
    g.verts_ = std::move(vs);
    g.g_ = Graph(static_cast<int>(g.verts_.size()));
    for (std::size_t i = 0; i < g.verts_.size(); ++i) {
      g.index_[key(g.verts_[i])] = static_cast<int>(i);
      for (std::size_t j = 0; j < i; ++j)
        if (gridcw::adjacent(d, g.verts_[i], g.verts_[j]))
          g.g_.add_edge(static_cast<int>(i), static_cast<int>(j));
    }
    return g;
  }

  // m columns starting at i, n rows starting at j.
  static GridGraph rectangle(const DeltaSpec& d, int i, int j, int m, int n) {
    if (i < 1 || j < 1 || m < 0 || n < 0)
      throw InputError("rectangle needs i,j >= 1 and m,n >= 0");
    std::vector<GridVertex> vs;
    for (int x = i; x < i + m; ++x)
      for (int y = j; y < j + n; ++y)
        vs.push_back({x, y});
    return induced(d, vs);
  }

  static GridGraph two_row(const DeltaSpec& d, const std::vector<int>& columns) {
    std::vector<GridVertex> vs;
    for (int c : columns) {
      vs.push_back({c, 1});
      vs.push_back({c, 2});
    }
    return induced(d, vs);
  }

  const DeltaSpec& spec() const { return spec_; }
  int size() const { return static_cast<int>(verts_.size()); }
  const std::vector<GridVertex>& vertices() const { return verts_; }
  GridVertex vertex(int i) const { return verts_[static_cast<std::size_t>(i)]; }
  const Graph& graph() const { return g_; }
  bool adjacent(int a, int b) const { return g_.has_edge(a, b); }

  std::optional<int> index_of(GridVertex v) const {
    auto it = index_.find(key(v));
    if (it == index_.end())
      return std::nullopt;
    return it->second;
  }
  int require(GridVertex v) const {
    auto i = index_of(v);
    if (!i)
      throw InputError("vertex " + v.id() + " not in graph");
    return *i;
  }
  bool contains(GridVertex v) const { return index_of(v).has_value(); }

  std::vector<int> columns() const {
    std::vector<int> c;
    for (auto v : verts_)
      if (c.empty() || c.back() != v.col)
        c.push_back(v.col);
    return c;
  }
  std::vector<int> rows() const {
    std::vector<int> r;
    for (auto v : verts_)
      r.push_back(v.row);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
  }
  int min_col() const { return verts_.empty() ? 0 : verts_.front().col; }
  int max_col() const { return verts_.empty() ? 0 : verts_.back().col; }
  int max_row() const {
    int r = 0;
    for (auto v : verts_)
      r = std::max(r, v.row);
    return r;
  }

  std::vector<int> indices_in_columns(int lo, int hi) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (verts_[static_cast<std::size_t>(i)].col >= lo && verts_[static_cast<std::size_t>(i)].col <= hi)
        out.push_back(i);
    return out;
  }

  GridGraph restrict_columns(int lo, int hi) const {
    std::vector<GridVertex> vs;
    for (auto v : verts_)
      if (v.col >= lo && v.col <= hi)
        vs.push_back(v);
    return induced(spec_, vs);
  }

  GridGraph with_spec(const DeltaSpec& d) const { return induced(d, verts_); }

private:
  static std::uint64_t key(GridVertex v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.col)) << 32) |
           static_cast<std::uint32_t>(v.row);
  }

  DeltaSpec spec_;
  std::vector<GridVertex> verts_;
  std::unordered_map<std::uint64_t, int> index_;
  Graph g_;
};

// Induced subgraph search. Returns needle index -> haystack index, or nullopt.
// Throws BudgetError after `budget` search nodes.
inline std::optional<std::vector<int>> contains_induced(const Graph& haystack, const Graph& needle,
                                                        long long budget = 10'000'000) {
  int nh = needle.size(), ng = haystack.size();
  if (nh == 0)
    return std::vector<int>{};
  if (nh > ng)
    return std::nullopt;

  // Place vertices so that each one (after the first of a component) touches a placed one.
  std::vector<int> order;
  std::vector<char> placed(static_cast<std::size_t>(nh), 0);
  while (static_cast<int>(order.size()) < nh) {
    int best = -1, best_links = -1, best_deg = -1;
    for (int u = 0; u < nh; ++u) {
      if (placed[static_cast<std::size_t>(u)])
        continue;
      int links = 0;
      for (int p : order)
        links += needle.has_edge(u, p);
      int deg = needle.degree(u);
      if (links > best_links || (links == best_links && deg > best_deg)) {
        best = u;
        best_links = links;
        best_deg = deg;
      }
    }
    placed[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
  }

  std::vector<int> map(static_cast<std::size_t>(nh), -1);
  Bitset used(ng);
  long long nodes = 0;
  std::function<bool(int)> place = [&](int depth) -> bool {
    if (depth == nh)
      return true;
    if (++nodes > budget)
      throw BudgetError("induced subgraph search exceeded budget of " + std::to_string(budget) +
                        " nodes");
    int u = order[static_cast<std::size_t>(depth)];
    Bitset cand(ng);
    cand.set_all();
    cand.and_not(used);
    for (int d = 0; d < depth; ++d) {
      int p = order[static_cast<std::size_t>(d)];
      int x = map[static_cast<std::size_t>(p)];
      if (needle.has_edge(u, p))
        cand &= haystack.row(x);
      else
        cand.and_not(haystack.row(x));
    }
    int need_deg = needle.degree(u);
    for (int x = cand.first(); x >= 0; x = cand.next(x + 1)) {
      if (haystack.degree(x) < need_deg)
        continue;
      map[static_cast<std::size_t>(u)] = x;
      used.set(x);
      if (place(depth + 1))
        return true;
      used.reset(x);
    }
    map[static_cast<std::size_t>(u)] = -1;
    return false;
  };
  if (place(0))
    return map;
  return std::nullopt;
}

inline bool isomorphic(const Graph& a, const Graph& b, long long budget = 10'000'000) {
  if (a.size() != b.size() || a.edge_count() != b.edge_count())
    return false;
  return contains_induced(a, b, budget).has_value();
}

// Edge list: header "grid <cols> <rows>", one "c1 r1 c2 r2" line per edge and
// one "c r" line per isolated vertex.
inline std::string to_edge_list(const GridGraph& g) {
  std::ostringstream out;
  out << "grid " << g.max_col() << " " << g.max_row() << "\n";
  for (auto [a, b] : g.graph().edges()) {
    auto u = g.vertex(a), v = g.vertex(b);
    out << u.col << " " << u.row << " " << v.col << " " << v.row << "\n";
  }
  for (int i = 0; i < g.size(); ++i)
    if (g.graph().degree(i) == 0)
      out << g.vertex(i).col << " " << g.vertex(i).row << "\n";
  return out.str();
}

struct EdgeListGraph {
  std::vector<GridVertex> vertices;  // sorted
  Graph graph;
};

inline EdgeListGraph parse_edge_list(const std::string& text) {
  std::vector<std::pair<GridVertex, GridVertex>> edges;
  std::vector<GridVertex> verts;
  std::istringstream in(text);
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    std::size_t pos = offset;
    offset += line.size() + 1;
    if (auto h = line.find('#'); h != std::string::npos)
      line = line.substr(0, h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;)
      tok.push_back(t);
    if (tok.empty() || tok[0] == "grid")
      continue;
    std::vector<int> v;
    for (auto& t : tok)
      v.push_back(detail::parse_int(t, pos));
    for (int x : v)
      if (x < 1)
        throw ParseError("coordinates must be >= 1", pos);
    if (v.size() == 2) {
      verts.push_back({v[0], v[1]});
    } else if (v.size() == 4) {
      GridVertex a{v[0], v[1]}, b{v[2], v[3]};
      if (a == b)
        throw ParseError("self loop", pos);
      edges.push_back({a, b});
      verts.push_back(a);
      verts.push_back(b);
    } else {
      throw ParseError("expected 'c r' or 'c1 r1 c2 r2'", pos);
    }
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  EdgeListGraph out{verts, Graph(static_cast<int>(verts.size()))};
  auto idx = [&](GridVertex v) {
    return static_cast<int>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
  };
  for (auto [a, b] : edges)
    out.graph.add_edge(idx(a), idx(b));
  return out;
}

inline std::string dot_name(GridVertex v) {
  return "v_" + std::to_string(v.col) + "_" + std::to_string(v.row);
}

// DOT export; `colour` may map vertex index to a DOT colour name.
inline std::string to_dot(const GridGraph& g,
                          const std::function<std::string(int)>& colour = nullptr) {
  std::ostringstream out;
  out << "graph G {\n";
  for (int i = 0; i < g.size(); ++i) {
    auto v = g.vertex(i);
    out << "  " << dot_name(v) << " [pos=\"" << v.col << "," << v.row << "!\"";
    if (colour) {
      auto c = colour(i);
      if (!c.empty())
        out << ", style=filled, fillcolor=" << c;
    }
    out << "];\n";
  }
  for (auto [a, b] : g.graph().edges())
    out << "  " << dot_name(g.vertex(a)) << " -- " << dot_name(g.vertex(b)) << ";\n";
  out << "}\n";
  return out.str();
}

} // namespace gridcw
