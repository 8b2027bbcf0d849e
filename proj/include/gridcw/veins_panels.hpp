#pragma once

#include "delta_spec.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "neighbourhood.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gridcw {

struct Vein {
  int start = 1;
  std::vector<int> rows;  // one per consecutive column from start

  int length() const { return static_cast<int>(rows.size()); }
  GridVertex at(int col) const { return {col, rows[static_cast<std::size_t>(col - start)]}; }
  std::vector<GridVertex> vertices() const {
    std::vector<GridVertex> out;
    for (int i = 0; i < length(); ++i)
      out.push_back({start + i, rows[static_cast<std::size_t>(i)]});
    return out;
  }
  bool operator==(const Vein&) const = default;
};

struct FatVein {
  Vein base;
  std::vector<int> upper;             // w per column
  std::vector<GridVertex> members;    // sorted
  std::vector<int> lowest, highest;   // actual member rows per column

  bool contains(GridVertex v) const { return std::binary_search(members.begin(), members.end(), v); }
};

// Upper border of a vein with bottom rows u over letters alpha (one per column step).
inline std::vector<int> upper_border(const std::vector<int>& u, const std::vector<int>& alpha) {
  if (u.empty())
    return {};
  if (alpha.size() + 1 < u.size())
    throw InputError("upper border needs one alpha letter per column step");
  std::vector<int> w(u.size());
  w[0] = u[0];
  for (std::size_t x = 1; x < u.size(); ++x) {
    int a = alpha[x - 1];
    if (a == 2)
      w[x] = u[x - 1];
    else if (a == 0)
      w[x] = w[x - 1];
    else
      throw InputError("upper border needs alpha letters in {0,2}; apply alpha_plus first");
  }
  return w;
}

namespace detail {

inline void require_window(const GridGraph& g, int j, int k) {
  if (k < 1)
    throw InputError("window width must be >= 1");
  for (auto v : g.vertices())
    if (v.col < j || v.col > j + k - 1)
      throw InputError("vertex " + v.id() + " lies outside the window columns");
  for (int x = j; x < j + k - 1; ++x) {
    int a = g.spec().alpha.letter(x);
    if (a != 0 && a != 2)
      throw InputError("window alpha letter at column " + std::to_string(x) +
                       " is not in {0,2}; apply alpha_plus first");
  }
}

inline std::map<int, std::vector<int>> rows_by_column(const GridGraph& g) {
  std::map<int, std::vector<int>> out;
  for (auto v : g.vertices())
    out[v.col].push_back(v.row);
  for (auto& [c, r] : out)
    std::sort(r.begin(), r.end());
  return out;
}

} // namespace detail

inline FatVein make_fat_vein(const GridGraph& g, const Vein& v) {
  FatVein f;
  f.base = v;
  std::vector<int> alpha;
  for (int i = 0; i + 1 < v.length(); ++i)
    alpha.push_back(g.spec().alpha.letter(v.start + i));
  f.upper = upper_border(v.rows, alpha);
  auto cols = detail::rows_by_column(g);
  for (int i = 0; i < v.length(); ++i) {
    int c = v.start + i;
    int lo = v.rows[static_cast<std::size_t>(i)], hi = f.upper[static_cast<std::size_t>(i)];
    int got_lo = 0, got_hi = 0;
    for (int r : cols[c])
      if (r >= lo && r <= hi) {
        f.members.push_back({c, r});
        if (!got_lo)
          got_lo = r;
        got_hi = r;
      }
    f.lowest.push_back(got_lo);
    f.highest.push_back(got_hi);
  }
  std::sort(f.members.begin(), f.members.end());
  return f;
}

// Every full vein of the window, for exhaustive checks on small windows.
inline std::vector<Vein> all_full_veins(const GridGraph& g, int j, int k) {
  detail::require_window(g, j, k);
  auto cols = detail::rows_by_column(g);
  std::vector<Vein> out;
  Vein cur;
  cur.start = j;
  std::vector<int> rows;
  auto rec = [&](auto&& self, int x) -> void {
    if (x == j + k) {
      out.push_back({j, rows});
      return;
    }
    for (int r : cols[x]) {
      if (x > j && !g.adjacent(g.require({x - 1, rows.back()}), g.require({x, r})))
        continue;
      rows.push_back(r);
      self(self, x + 1);
      rows.pop_back();
    }
  };
  rec(rec, j);
  return out;
}

struct SliceDecomposition {
  int j = 1, k = 0;
  std::vector<FatVein> veins;                  // numbered bottom-up
  std::vector<std::vector<GridVertex>> slices; // b+1 slices, bottom-up
  std::vector<GridVertex> unplaced;            // window vertices in neither a slice nor a fat vein

  int b() const { return static_cast<int>(veins.size()); }
  int right() const { return j + k - 1; }

  // Slice i has region 2i, fat vein i (1-based) has region 2i-1; -1 if absent.
  int region(GridVertex v) const {
    for (std::size_t i = 0; i < slices.size(); ++i)
      if (std::binary_search(slices[i].begin(), slices[i].end(), v))
        return 2 * static_cast<int>(i);
    for (std::size_t i = 0; i < veins.size(); ++i)
      if (veins[i].contains(v))
        return 2 * static_cast<int>(i) + 1;
    return -1;
  }
};

// Lowest full vein whose fat vein avoids `blocked`, by rows compared column by column from the left.
inline std::optional<Vein> lowest_independent_full_vein(const GridGraph& g, int j, int k,
                                                        const std::set<GridVertex>& blocked) {
  auto cols = detail::rows_by_column(g);
  std::set<std::tuple<int, int, int>> dead;  // (column, u, w) with no completion
  std::vector<int> rows;
  auto fat_clear = [&](int x, int lo, int hi) {
    for (int r : cols[x])
      if (r >= lo && r <= hi && blocked.count({x, r}))
        return false;
    return true;
  };
  auto rec = [&](auto&& self, int x, int w_prev) -> bool {
    if (x == j + k)
      return true;
    for (int r : cols[x]) {
      int w = r;
      if (x > j) {
        int up = rows.back();
        if (!g.adjacent(g.require({x - 1, up}), g.require({x, r})))
          continue;
        w = g.spec().alpha.letter(x - 1) == 2 ? up : w_prev;
      }
      if (dead.count({x, r, w}) || !fat_clear(x, r, w))
        continue;
      rows.push_back(r);
      if (self(self, x + 1, w))
        return true;
      rows.pop_back();
      dead.insert({x, r, w});
    }
    return false;
  };
  if (!rec(rec, j, 0))
    return std::nullopt;
  return Vein{j, rows};
}

inline SliceDecomposition maximal_independent_full_veins(const GridGraph& g, int j, int k) {
  detail::require_window(g, j, k);
  SliceDecomposition d;
  d.j = j;
  d.k = k;
  std::set<GridVertex> blocked;
  // Bounded by the row count: each fat vein takes at least one vertex per column.
  while (auto v = lowest_independent_full_vein(g, j, k, blocked)) {
    auto f = make_fat_vein(g, *v);
    blocked.insert(f.members.begin(), f.members.end());
    d.veins.push_back(std::move(f));
  }
  d.slices.assign(d.veins.size() + 1, {});
  for (auto v : g.vertices()) {
    if (blocked.count(v))
      continue;
    int x = v.col - j;
    int placed = -1;
    int b = d.b();
    for (int i = 0; i <= b; ++i) {
      bool above = i == 0 || v.row > d.veins[static_cast<std::size_t>(i - 1)].highest[static_cast<std::size_t>(x)];
      bool below = i == b || v.row < d.veins[static_cast<std::size_t>(i)].lowest[static_cast<std::size_t>(x)];
      if (above && below) {
        placed = i;
        break;
      }
    }
    if (placed < 0)
      d.unplaced.push_back(v);
    else
      d.slices[static_cast<std::size_t>(placed)].push_back(v);
  }
  for (auto& s : d.slices)
    std::sort(s.begin(), s.end());
  return d;
}

enum class StructColour { Blue, Yellow, Green, Pink, Red };

inline std::string to_string(StructColour c) {
  switch (c) {
  case StructColour::Blue:
    return "blue";
  case StructColour::Yellow:
    return "yellow";
  case StructColour::Green:
    return "green";
  case StructColour::Pink:
    return "pink";
  case StructColour::Red:
    return "red";
  }
  return "?";
}

struct StructuralColouring {
  SliceDecomposition decomposition;
  std::map<GridVertex, StructColour> colour;
  std::vector<int> t, s;  // per slice

  std::vector<GridVertex> of(StructColour c) const {
    std::vector<GridVertex> out;
    for (auto& [v, col] : colour)
      if (col == c)
        out.push_back(v);
    return out;
  }
};

inline StructuralColouring structural_colouring(const GridGraph& g, const SliceDecomposition& d) {
  StructuralColouring c;
  c.decomposition = d;
  std::set<GridVertex> fat;
  for (const auto& f : d.veins)
    fat.insert(f.members.begin(), f.members.end());
  const int j = d.j, last_part = d.j + d.k - 2;
  auto alpha = [&](int x) { return g.spec().alpha.letter(x); };

  for (std::size_t i = 0; i < d.slices.size(); ++i) {
    const auto& slice = d.slices[i];
    // Part veins from the slice's left column through vertices outside every fat vein.
    std::set<GridVertex> reached;
    std::vector<GridVertex> frontier;
    for (auto v : slice)
      if (v.col == j) {
        reached.insert(v);
        frontier.push_back(v);
      }
    for (int x = j; x < last_part && !frontier.empty(); ++x) {
      std::vector<GridVertex> next;
      for (auto v : g.vertices()) {
        if (v.col != x + 1 || fat.count(v) || reached.count(v))
          continue;
        int vi = g.require(v);
        for (auto p : frontier)
          if (g.adjacent(g.require(p), vi)) {
            reached.insert(v);
            next.push_back(v);
            break;
          }
      }
      frontier = std::move(next);
    }
    int t = j;
    bool any_green = false;
    for (auto v : slice)
      if (reached.count(v)) {
        c.colour[v] = StructColour::Green;
        any_green = true;
        t = std::max(t, v.col);
      }
    int s = j;
    if (any_green && t > j)
      for (int x = t - 1; x >= j; --x)
        if (alpha(x) == 2) {
          s = x;
          break;
        }
    if (!any_green)
      t = s = j;
    for (auto v : slice) {
      if (c.colour.count(v))
        continue;
      bool pink = false;
      if (v.col <= s)
        for (auto u : slice)
          if (u.col == v.col && u.row > v.row && c.colour.count(u) && c.colour[u] == StructColour::Green) {
            pink = true;
            break;
          }
      c.colour[v] = pink ? StructColour::Pink : StructColour::Red;
    }
    c.t.push_back(t);
    c.s.push_back(s);
  }
  for (std::size_t i = 0; i < d.veins.size(); ++i) {
    int s = c.s[i + 1];
    for (auto v : d.veins[i].members)
      c.colour[v] = (s > j && v.col <= s) ? StructColour::Blue : StructColour::Yellow;
  }
  return c;
}

inline StructuralColouring merge_green_pink(StructuralColouring c) {
  for (auto& [v, col] : c.colour)
    if (col == StructColour::Pink)
      col = StructColour::Green;
  return c;
}

struct LawViolation {
  GridVertex left_side;   // the blue, green or pink vertex
  GridVertex right_side;  // the red or yellow vertex
  std::string detail;
};

struct LawReport {
  bool ok = true;
  std::vector<LawViolation> violations;
};

// Checks the adjacency laws between red/yellow vertices and blue/green/pink
// vertices in neighbouring columns.
inline LawReport check_red_yellow_laws(const StructuralColouring& c, const GridGraph& g) {
  LawReport rep;
  const auto& d = c.decomposition;
  auto alpha = [&](int x) { return g.spec().alpha.letter(x); };
  for (auto& [v, vc] : c.colour) {
    if (vc != StructColour::Red && vc != StructColour::Yellow)
      continue;
    int rv = d.region(v);
    for (auto& [u, uc] : c.colour) {
      if (uc != StructColour::Blue && uc != StructColour::Green && uc != StructColour::Pink)
        continue;
      if (u.col != v.col - 1 && u.col != v.col + 1)
        continue;
      int ru = d.region(u);
      bool expect;
      if (u.col == v.col - 1)
        expect = alpha(u.col) == 2 && (vc == StructColour::Red ? ru > rv : ru >= rv);
      else
        expect = alpha(v.col) == 2 && (vc == StructColour::Red ? ru <= rv : ru < rv);
      bool actual = g.adjacent(g.require(u), g.require(v));
      if (actual != expect) {
        rep.ok = false;
        rep.violations.push_back({u, v,
                                  to_string(uc) + " " + u.id() + " and " + to_string(vc) + " " + v.id() +
                                      (actual ? " are adjacent" : " are not adjacent")});
      }
    }
  }
  return rep;
}

// For every same-column pair in U, similarity in g matches similarity in gplus.
inline bool same_column_similarity_invariance(const GridGraph& g, const GridGraph& gplus,
                                              const std::vector<GridVertex>& U) {
  if (g.vertices() != gplus.vertices())
    throw InputError("graphs must share a vertex set");
  std::set<GridVertex> inside(U.begin(), U.end());
  auto outside_nbhd = [&](const GridGraph& h, GridVertex v) {
    std::vector<GridVertex> out;
    int i = h.require(v);
    for (int w = 0; w < h.size(); ++w)
      if (!inside.count(h.vertex(w)) && w != i && h.adjacent(i, w))
        out.push_back(h.vertex(w));
    return out;
  };
  for (auto a : inside)
    for (auto b : inside)
      if (a < b && a.col == b.col) {
        bool sim_g = outside_nbhd(g, a) == outside_nbhd(g, b);
        bool sim_p = outside_nbhd(gplus, a) == outside_nbhd(gplus, b);
        if (sim_g != sim_p)
          return false;
      }
  return true;
}

// Map from the first k veins onto the k x k rectangle at (j,1), checked edge by edge.
inline std::optional<std::map<GridVertex, GridVertex>> independent_veins_embed_square(const SliceDecomposition& d,
                                                                                      const DeltaSpec& spec,
                                                                                      int k) {
  if (d.b() < k)
    return std::nullopt;
  std::map<GridVertex, GridVertex> phi;
  for (int y = 1; y <= k; ++y)
    for (int x = d.j; x < d.j + k; ++x)
      phi[d.veins[static_cast<std::size_t>(y - 1)].base.at(x)] = {x, y};
  for (auto& [a, pa] : phi)
    for (auto& [b, pb] : phi)
      if (a < b && adjacent(spec, a, b) != adjacent(spec, pa, pb))
        throw InvariantError("vein map breaks adjacency between " + a.id() + " and " + b.id());
  return phi;
}

struct PanelOptions {
  std::optional<int> max_gap;  // longest allowed run of columns without an occurrence
};

struct PanelWindow {
  int first = 0, last = 0;  // columns
  StructuralColouring colouring;
  std::vector<GridVertex> blue, yellow, green, red;
};

struct PanelDecomposition {
  int k = 0;
  std::vector<int> ends;  // t_0 .. t_omega
  std::vector<PanelWindow> windows;           // windows[i-1] is window i, for 1 <= i < omega
  std::vector<std::vector<GridVertex>> white; // white[i-1] is the white set of panel i
  std::vector<std::vector<GridVertex>> panels;

  int omega() const { return static_cast<int>(panels.size()); }

  std::vector<GridVertex> prefix(int i) const {
    std::vector<GridVertex> out;
    for (int p = 0; p < i; ++p)
      out.insert(out.end(), panels[static_cast<std::size_t>(p)].begin(), panels[static_cast<std::size_t>(p)].end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string report() const {
    std::ostringstream out;
    for (int i = 1; i <= omega(); ++i) {
      int lo = ends[static_cast<std::size_t>(i - 1)] + 1;
      int hi = ends[static_cast<std::size_t>(i)];
      std::size_t y = 0, r = 0, g = 0, b = 0;
      if (i >= 2) {
        y = windows[static_cast<std::size_t>(i - 2)].yellow.size();
        r = windows[static_cast<std::size_t>(i - 2)].red.size();
        lo = windows[static_cast<std::size_t>(i - 2)].first;
      }
      if (i - 1 < static_cast<int>(windows.size())) {
        g = windows[static_cast<std::size_t>(i - 1)].green.size();
        b = windows[static_cast<std::size_t>(i - 1)].blue.size();
      }
      out << i << "\t" << lo << "-" << hi << "\tyellow=" << y << " red=" << r
          << " white=" << white[static_cast<std::size_t>(i - 1)].size() << " green=" << g << " blue=" << b << "\n";
    }
    return out.str();
  }
};

inline PanelDecomposition build_panels(const DeltaSpec& spec, const GridGraph& G, const KFactor& f,
                                       PanelOptions opt = {}) {
  PanelDecomposition pd;
  pd.k = f.width;
  if (G.size() == 0)
    return pd;
  const int k = f.width;
  const int lo = G.min_col(), hi = G.max_col();
  pd.ends.push_back(lo - 1);
  for (;;) {
    int prev = pd.ends.back();
    auto s = find_next_occurrence(spec, f, prev + 1, hi - 1);
    int gap_end = s ? *s - 1 : hi;
    if (opt.max_gap && gap_end - prev > *opt.max_gap) {
      std::string last = pd.ends.size() == 1 ? std::string("none")
                                             : "ending at column " + std::to_string(prev);
      throw HorizonError("no factor occurrence within " + std::to_string(*opt.max_gap) + " columns after column " +
                         std::to_string(prev) + "; last located occurrence " + last);
    }
    if (!s)
      break;
    pd.ends.push_back(*s + k - 1);
  }
  pd.ends.push_back(hi);

  DeltaSpec plus = alpha_plus(spec);
  GridGraph Gp = G.with_spec(plus);
  int omega = static_cast<int>(pd.ends.size()) - 1;
  for (int i = 1; i < omega; ++i) {
    PanelWindow w;
    w.last = pd.ends[static_cast<std::size_t>(i)];
    w.first = w.last - k + 1;
    GridGraph win = Gp.restrict_columns(w.first, w.last);
    auto dec = maximal_independent_full_veins(win, w.first, k);
    w.colouring = merge_green_pink(structural_colouring(win, dec));
    if (!dec.unplaced.empty())
      throw InvariantError("window at column " + std::to_string(w.first) + " leaves vertex " +
                           dec.unplaced.front().id() + " outside every slice and fat vein");
    w.blue = w.colouring.of(StructColour::Blue);
    w.yellow = w.colouring.of(StructColour::Yellow);
    w.green = w.colouring.of(StructColour::Green);
    w.red = w.colouring.of(StructColour::Red);
    pd.windows.push_back(std::move(w));
  }
  for (int i = 1; i <= omega; ++i) {
    int a = pd.ends[static_cast<std::size_t>(i - 1)] + 1;
    int b = i < omega ? pd.ends[static_cast<std::size_t>(i)] - k : pd.ends[static_cast<std::size_t>(i)];
    std::vector<GridVertex> white;
    for (auto v : G.vertices())
      if (v.col >= a && v.col <= b)
        white.push_back(v);
    pd.white.push_back(white);
    std::vector<GridVertex> p;
    if (i >= 2) {
      const auto& prev = pd.windows[static_cast<std::size_t>(i - 2)];
      p.insert(p.end(), prev.yellow.begin(), prev.yellow.end());
      p.insert(p.end(), prev.red.begin(), prev.red.end());
    }
    p.insert(p.end(), white.begin(), white.end());
    if (i < omega) {
      const auto& cur = pd.windows[static_cast<std::size_t>(i - 1)];
      p.insert(p.end(), cur.green.begin(), cur.green.end());
      p.insert(p.end(), cur.blue.begin(), cur.blue.end());
    }
    std::sort(p.begin(), p.end());
    pd.panels.push_back(std::move(p));
  }
  return pd;
}

struct PanelBoundReport {
  bool ok = true;
  int bound = 0;
  std::vector<int> values;  // mu(G, prefix_i) for i = 1..omega
};

inline PanelBoundReport panel_similarity_bound(const PanelDecomposition& pd, const GridGraph& G, int M, int k) {
  PanelBoundReport r;
  r.bound = M + 2 * k * k;
  for (int i = 1; i <= pd.omega(); ++i) {
    int m = similarity_partition(G, pd.prefix(i)).size();
    r.values.push_back(m);
    if (m >= r.bound)
      r.ok = false;
  }
  return r;
}

} // namespace gridcw
