#pragma once

#include "cwx.hpp"
#include "delta_spec.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "neighbourhood.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gridcw {

enum class PairingKind { Matched, Unmatched, Neither };

inline std::string to_string(PairingKind k) {
  switch (k) {
  case PairingKind::Matched:
    return "matched";
  case PairingKind::Unmatched:
    return "unmatched";
  case PairingKind::Neither:
    return "neither";
  }
  return "?";
}

namespace detail {

// Maximum bipartite matching, left side 0..nl-1; ok(l, r) says whether l may take r.
template <class Ok>
int max_matching(int nl, int nr, Ok ok, std::vector<int>* match_of_left = nullptr) {
  std::vector<int> right_owner(static_cast<std::size_t>(nr), -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, int l) -> bool {
    for (int r = 0; r < nr; ++r) {
      if (!ok(l, r) || seen[static_cast<std::size_t>(r)])
        continue;
      seen[static_cast<std::size_t>(r)] = 1;
      int& o = right_owner[static_cast<std::size_t>(r)];
      if (o < 0 || self(self, o)) {
        o = l;
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (int l = 0; l < nl; ++l) {
    seen.assign(static_cast<std::size_t>(nr), 0);
    size += augment(augment, l);
  }
  if (match_of_left) {
    match_of_left->assign(static_cast<std::size_t>(nl), -1);
    for (int r = 0; r < nr; ++r)
      if (right_owner[static_cast<std::size_t>(r)] >= 0)
        (*match_of_left)[static_cast<std::size_t>(right_owner[static_cast<std::size_t>(r)])] = r;
  }
  return size;
}

} // namespace detail

// U[i] is paired with W[i] when the pairing is matched or unmatched.
struct DistinguishedPairing {
  std::vector<GridVertex> U, W;
  PairingKind kind = PairingKind::Neither;
  bool exhaustive = true;

  int size() const { return static_cast<int>(U.size()); }

  // Empty string when every invariant holds, else the first failure.
  std::string check(const GridGraph& G) const {
    if (U.size() != W.size())
      return "|U| != |W|";
    std::set<GridVertex> us(U.begin(), U.end()), ws(W.begin(), W.end());
    if (us.size() != U.size() || ws.size() != W.size())
      return "repeated vertex";
    for (auto w : W)
      if (us.count(w))
        return "U and W share " + w.id();
    std::vector<int> ui, wi;
    for (auto u : U)
      ui.push_back(G.require(u));
    for (auto w : W)
      wi.push_back(G.require(w));
    std::set<std::vector<char>> sigs;
    for (int u : ui) {
      std::vector<char> s;
      for (int w : wi)
        s.push_back(G.adjacent(u, w));
      if (!sigs.insert(s).second)
        return "two vertices of U have the same neighbourhood in W";
    }
    for (std::size_t i = 0; i < U.size(); ++i) {
      bool adj = G.adjacent(ui[i], wi[i]);
      if (kind == PairingKind::Matched && !adj)
        return "matched pair " + U[i].id() + "," + W[i].id() + " is not adjacent";
      if (kind == PairingKind::Unmatched && adj)
        return "unmatched pair " + U[i].id() + "," + W[i].id() + " is adjacent";
    }
    std::vector<GridVertex> all(U);
    all.insert(all.end(), W.begin(), W.end());
    auto sub = GridGraph::induced(G.spec(), all);
    if (similarity_partition(sub, U).size() != size())
      return "similarity class count differs from |U|";
    return {};
  }

  std::string text() const {
    std::string s = to_string(kind) + " r=" + std::to_string(size()) + (exhaustive ? "" : " (greedy)") + "\n  U:";
    for (auto u : U)
      s += " " + u.id();
    s += "\n  W:";
    for (auto w : W)
      s += " " + w.id();
    return s;
  }
};

namespace detail {

struct PairingSearch {
  const GridGraph& G;
  std::vector<int> blue, nonblue;

  // Blue vertices grouped by neighbourhood in W; one representative each.
  std::vector<int> representatives(const std::vector<int>& W) const {
    std::map<std::vector<char>, int> rep;
    for (int b : blue) {
      std::vector<char> s;
      for (int w : W)
        s.push_back(G.adjacent(b, w));
      rep.emplace(s, b);
    }
    std::vector<int> out;
    for (auto& [s, b] : rep)
      out.push_back(b);
    return out;
  }

  // A pairing with |U| = |W| = W.size() respecting `want`, if one exists.
  std::optional<DistinguishedPairing> realise(const std::vector<int>& W, PairingKind want) const {
    auto reps = representatives(W);
    int r = static_cast<int>(W.size());
    if (static_cast<int>(reps.size()) < r)
      return std::nullopt;
    DistinguishedPairing p;
    p.kind = want;
    if (want == PairingKind::Neither) {
      for (int i = 0; i < r; ++i) {
        p.U.push_back(G.vertex(reps[static_cast<std::size_t>(i)]));
        p.W.push_back(G.vertex(W[static_cast<std::size_t>(i)]));
      }
      return p;
    }
    bool adj_wanted = want == PairingKind::Matched;
    std::vector<int> m;
    int got = max_matching(
        r, static_cast<int>(reps.size()),
        [&](int wi, int ri) {
          return G.adjacent(W[static_cast<std::size_t>(wi)], reps[static_cast<std::size_t>(ri)]) == adj_wanted;
        },
        &m);
    if (got < r)
      return std::nullopt;
    for (int i = 0; i < r; ++i) {
      p.U.push_back(G.vertex(reps[static_cast<std::size_t>(m[static_cast<std::size_t>(i)])]));
      p.W.push_back(G.vertex(W[static_cast<std::size_t>(i)]));
    }
    return p;
  }
};

} // namespace detail

struct PairingSearchOptions {
  PairingKind kind = PairingKind::Neither;
  int exhaustive_limit = 16;         // largest nonblue set searched exhaustively
  long long budget = 1'000'000;      // subsets examined before falling back to greedy
};

// Largest distinguished pairing with U inside blue and W inside nonblue.
inline DistinguishedPairing find_largest_pairing(const GridGraph& G, const std::vector<GridVertex>& blue,
                                                 const std::vector<GridVertex>& nonblue,
                                                 PairingSearchOptions opt = {}) {
  std::set<GridVertex> bs(blue.begin(), blue.end());
  for (auto v : nonblue)
    if (bs.count(v))
      throw InputError("vertex " + v.id() + " is both blue and nonblue");
  detail::PairingSearch s{G, {}, {}};
  for (auto v : blue)
    s.blue.push_back(G.require(v));
  for (auto v : nonblue)
    s.nonblue.push_back(G.require(v));
  std::sort(s.blue.begin(), s.blue.end());
  std::sort(s.nonblue.begin(), s.nonblue.end());
  DistinguishedPairing best;
  best.kind = opt.kind;
  if (s.blue.empty())
    return best;

  const int n = static_cast<int>(s.nonblue.size());
  const int max_r = std::min<int>(n, static_cast<int>(s.blue.size()));
  long long examined = 0;
  bool within = n <= opt.exhaustive_limit;
  if (within) {
    // Subsets of each size, largest first; the first realisable one wins.
    for (int r = max_r; r >= 1 && within; --r) {
      std::vector<int> pick(static_cast<std::size_t>(r));
      for (int i = 0; i < r; ++i)
        pick[static_cast<std::size_t>(i)] = i;
      while (true) {
        if (++examined > opt.budget) {
          within = false;
          break;
        }
        std::vector<int> W;
        for (int i : pick)
          W.push_back(s.nonblue[static_cast<std::size_t>(i)]);
        if (auto p = s.realise(W, opt.kind))
          return *p;
        int i = r - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - r + i)
          --i;
        if (i < 0)
          break;
        ++pick[static_cast<std::size_t>(i)];
        for (int t = i + 1; t < r; ++t)
          pick[static_cast<std::size_t>(t)] = pick[static_cast<std::size_t>(t - 1)] + 1;
      }
    }
    if (within)
      return best;
  }
  // Greedy: grow W by the vertex splitting the most classes, keep the best realisable prefix.
  std::vector<int> W, rest = s.nonblue;
  while (!rest.empty()) {
    std::size_t pick = 0;
    std::size_t most = 0;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      auto T = W;
      T.push_back(rest[i]);
      auto c = s.representatives(T).size();
      if (c > most) {
        most = c;
        pick = i;
      }
    }
    W.push_back(rest[pick]);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pick));
    if (auto p = s.realise(W, opt.kind); p && p->size() > best.size())
      best = *p;
    if (s.representatives(W).size() < W.size())
      break;
  }
  best.exhaustive = false;
  return best;
}

struct CoupleSet {
  std::vector<int> P;

  explicit CoupleSet(std::vector<int> p) : P(std::move(p)) {
    std::sort(P.begin(), P.end());
    for (std::size_t i = 1; i < P.size(); ++i)
      if (P[i] - P[i - 1] <= 2)
        throw InputError("couple set members " + std::to_string(P[i - 1]) + " and " + std::to_string(P[i]) +
                         " are within 2 of each other");
  }

  int size() const { return static_cast<int>(P.size()); }

  static bool dense(const BondSource& b, int x, int y) { return b.contains(x, y + 1) && b.contains(x + 1, y); }
  static bool sparse(const BondSource& b, int x, int y) { return !b.contains(x, y + 1) && !b.contains(x + 1, y); }

  // First pair of members that is dense (or sparse), if any.
  std::optional<std::pair<int, int>> find_pair(const BondSource& b, bool want_dense) const {
    for (std::size_t i = 0; i < P.size(); ++i)
      for (std::size_t j = i + 1; j < P.size(); ++j)
        if (want_dense ? dense(b, P[i], P[j]) : sparse(b, P[i], P[j]))
          return std::make_pair(P[i], P[j]);
    return std::nullopt;
  }
};

enum class Polarity { BlueLeft, BlueRight };

struct BlueNonbluePair {
  GridVertex blue, nonblue;
  bool adjacent = false;

  Polarity polarity() const { return blue.col < nonblue.col ? Polarity::BlueLeft : Polarity::BlueRight; }
  int link() const { return std::min(blue.col, nonblue.col); }
  std::string text() const {
    return "{" + blue.id() + "," + nonblue.id() + "} " + (adjacent ? "adjacent" : "non-adjacent") +
           (polarity() == Polarity::BlueLeft ? " blue-left" : " blue-right");
  }
};

enum class CaseKind { Case1, Case2, NotApplicable };

inline std::string to_string(CaseKind k) {
  switch (k) {
  case CaseKind::Case1:
    return "case-1";
  case CaseKind::Case2:
    return "case-2";
  case CaseKind::NotApplicable:
    return "neither-applicable";
  }
  return "?";
}

struct BlueRun {
  int row = 0, lo = 0, hi = 0;
  int length() const { return hi - lo + 1; }
};

struct CaseReport {
  CaseKind kind = CaseKind::NotApplicable;
  int column = 0;        // C_b
  bool swapped = false;  // red took the role of blue
  std::optional<Polarity> side;            // Case 1: polarity shared by the pairs
  std::vector<BlueNonbluePair> pairs;      // Case 1 evidence, one per row
  int row_right = 0, row_left = 0;         // Case 2: R_r and R_l
  BlueRun run;                             // Case 2: longest of the two runs
  std::string note;

  std::string text() const {
    std::ostringstream out;
    out << "case: " << to_string(kind);
    if (kind != CaseKind::NotApplicable)
      out << " column " << column << (swapped ? " (colours swapped)" : "");
    out << "\n";
    if (kind == CaseKind::Case1)
      for (const auto& p : pairs)
        out << "  pair " << p.text() << "\n";
    if (kind == CaseKind::Case2)
      out << "  R_r=" << row_right << " R_l=" << row_left << " run row " << run.row << " columns " << run.lo << "-"
          << run.hi << " length " << run.length() << "\n";
    if (!note.empty())
      out << "  " << note << "\n";
    return out.str();
  }
};

namespace detail {

inline AuditColour colour_of(const AuditColouring& c, GridVertex v) {
  int i = c.index_of(v);
  return i < 0 ? AuditColour::White : c.colour[static_cast<std::size_t>(i)];
}

inline AuditColouring swap_colours(AuditColouring c) {
  for (auto& x : c.colour)
    if (x == AuditColour::Blue)
      x = AuditColour::Red;
    else if (x == AuditColour::Red)
      x = AuditColour::Blue;
  return c;
}

} // namespace detail

// Case analysis at a node for the square H with columns lo..hi and rows 1..n.
inline CaseReport classify_case(const AuditColouring& colouring, const GridGraph& H) {
  CaseReport rep;
  auto rows = H.rows();
  auto cols = H.columns();
  if (rows.size() < 3 || cols.empty()) {
    rep.note = "fewer than 3 rows";
    return rep;
  }
  const int rlo = rows.front() + 1, rhi = rows.back() - 1;
  const int clo = cols.front(), chi = cols.back();
  const int n = static_cast<int>(rows.size());
  auto non_white_column = [&](const AuditColouring& c, int x) {
    for (int y = rlo; y <= rhi; ++y)
      if (detail::colour_of(c, {x, y}) == AuditColour::White)
        return false;
    return true;
  };
  auto blue_count = [&](const AuditColouring& c, int x) {
    int k = 0;
    for (int y = rlo; y <= rhi; ++y)
      k += detail::colour_of(c, {x, y}) == AuditColour::Blue;
    return k;
  };
  // C_b: first non-white column with at least n/2 - 1 blue interior vertices, colours swapped if needed.
  std::optional<AuditColouring> use;
  for (int pass = 0; pass < 2 && !use; ++pass) {
    auto c = pass == 0 ? colouring : detail::swap_colours(colouring);
    for (int x : cols)
      if (non_white_column(c, x) && 2 * blue_count(c, x) >= n - 2) {
        rep.column = x;
        rep.swapped = pass == 1;
        use = c;
        break;
      }
  }
  if (!use) {
    rep.note = "no non-white column in the interior rows";
    return rep;
  }
  const auto& c = *use;
  const int b = rep.column;
  auto blue = [&](int x, int y) { return detail::colour_of(c, {x, y}) == AuditColour::Blue; };
  std::vector<int> blue_rows;
  for (int y = rlo; y <= rhi; ++y)
    if (blue(b, y))
      blue_rows.push_back(y);
  std::optional<int> full_right, full_left;
  for (int y : blue_rows) {
    bool right = true, left = true;
    for (int x = b + 1; x <= chi; ++x)
      right = right && blue(x, y);
    for (int x = clo; x < b; ++x)
      left = left && blue(x, y);
    if (right && !full_right)
      full_right = y;
    if (left && !full_left)
      full_left = y;
  }
  if (full_right && full_left) {
    rep.kind = CaseKind::Case2;
    rep.row_right = *full_right;
    rep.row_left = *full_left;
    BlueRun r{*full_right, b, chi}, l{*full_left, clo, b};
    // Extend each run while the row stays blue.
    while (r.lo > clo && blue(r.lo - 1, r.row))
      --r.lo;
    while (l.hi < chi && blue(l.hi + 1, l.row))
      ++l.hi;
    rep.run = r.length() >= l.length() ? r : l;
    return rep;
  }
  rep.kind = CaseKind::Case1;
  rep.side = !full_right ? Polarity::BlueLeft : Polarity::BlueRight;
  for (int y : blue_rows) {
    if (*rep.side == Polarity::BlueLeft) {
      int x = b;
      while (blue(x + 1, y))
        ++x;
      GridVertex u{x, y}, w{x + 1, y};
      rep.pairs.push_back({u, w, H.adjacent(H.require(u), H.require(w))});
    } else {
      int x = b;
      while (blue(x - 1, y))
        --x;
      GridVertex u{x, y}, w{x - 1, y};
      rep.pairs.push_back({u, w, H.adjacent(H.require(u), H.require(w))});
    }
  }
  return rep;
}

// Empty string when the report's evidence is consistent with the colouring.
inline std::string check_case_report(const CaseReport& rep, const AuditColouring& colouring, const GridGraph& H) {
  if (rep.kind == CaseKind::NotApplicable)
    return {};
  auto c = rep.swapped ? detail::swap_colours(colouring) : colouring;
  auto rows = H.rows();
  auto cols = H.columns();
  int n = static_cast<int>(rows.size());
  auto col = [&](GridVertex v) { return detail::colour_of(c, v); };
  if (rep.kind == CaseKind::Case1) {
    if (2 * static_cast<int>(rep.pairs.size()) < n - 2)
      return "fewer than n/2 - 1 rows with a pair";
    std::set<int> seen_rows;
    for (const auto& p : rep.pairs) {
      if (col(p.blue) != AuditColour::Blue || col(p.nonblue) == AuditColour::Blue)
        return "pair " + p.text() + " has wrong colours";
      if (p.blue.row != p.nonblue.row || std::abs(p.blue.col - p.nonblue.col) != 1)
        return "pair " + p.text() + " is not horizontal";
      if (p.polarity() != *rep.side)
        return "pair " + p.text() + " has the other polarity";
      if (p.adjacent != H.adjacent(H.require(p.blue), H.require(p.nonblue)))
        return "pair " + p.text() + " adjacency is wrong";
      if (!seen_rows.insert(p.blue.row).second)
        return "two pairs on row " + std::to_string(p.blue.row);
    }
    return {};
  }
  for (int x = rep.column; x <= cols.back(); ++x)
    if (col({x, rep.row_right}) != AuditColour::Blue)
      return "row R_r is not blue right of C_b";
  for (int x = cols.front(); x <= rep.column; ++x)
    if (col({x, rep.row_left}) != AuditColour::Blue)
      return "row R_l is not blue left of C_b";
  for (int x = rep.run.lo; x <= rep.run.hi; ++x)
    if (col({x, rep.run.row}) != AuditColour::Blue)
      return "run is not blue";
  if (2 * rep.run.length() < n + 1)
    return "run shorter than (n+1)/2";
  return {};
}

struct LinkFindings {
  bool applicable = false;
  std::string hypothesis;  // "blue-blue" or "blue-nonblue"
  std::optional<BlueNonbluePair> adjacent_pair, nonadjacent_pair;
  std::optional<GridVertex> fifth;  // the extra vertex s when it was needed

  std::string text() const {
    if (!applicable)
      return "not-applicable";
    std::string s = hypothesis;
    if (adjacent_pair)
      s += " adjacent " + adjacent_pair->text();
    if (nonadjacent_pair)
      s += " non-adjacent " + nonadjacent_pair->text();
    if (fifth)
      s += " via s=" + fifth->id();
    return s;
  }
};

// Blue-nonblue pairs on the link between columns y and y+1 of H (rows lo..hi).
inline LinkFindings link_pair_extraction(const GridGraph& H, const AuditColouring& c, int y) {
  LinkFindings out;
  auto rows = H.rows();
  if (rows.size() < 3)
    return out;
  const int lo = rows.front(), hi = rows.back();
  auto colour = [&](GridVertex v) { return detail::colour_of(c, v); };
  auto is_blue = [&](GridVertex v) { return H.contains(v) && colour(v) == AuditColour::Blue; };
  auto is_nonblue = [&](GridVertex v) { return H.contains(v) && colour(v) != AuditColour::Blue; };
  auto adj = [&](GridVertex a, GridVertex b) { return H.adjacent(H.require(a), H.require(b)); };
  auto record = [&](GridVertex a, GridVertex b) {
    BlueNonbluePair p = is_blue(a) ? BlueNonbluePair{a, b, adj(a, b)} : BlueNonbluePair{b, a, adj(a, b)};
    auto& slot = p.adjacent ? out.adjacent_pair : out.nonadjacent_pair;
    if (!slot)
      slot = p;
  };
  auto first_nonblue = [&](int x, int skip) -> std::optional<GridVertex> {
    for (int r = lo; r <= hi; ++r)
      if (r != skip && is_nonblue({x, r}))
        return GridVertex{x, r};
    return std::nullopt;
  };
  // The top and bottom rows supply s: a nonblue s pairs with the blue of the other column,
  // a blue s with the nonblue there.
  auto fifth = [&](std::vector<GridVertex> other_blue, std::vector<GridVertex> other_nonblue, int x) {
    for (int r : {hi, lo}) {
      GridVertex s{x, r};
      if (!H.contains(s))
        continue;
      auto& partners = is_blue(s) ? other_nonblue : other_blue;
      for (auto p : partners) {
        bool a = adj(s, p);
        if ((a && !out.adjacent_pair) || (!a && !out.nonadjacent_pair)) {
          record(s, p);
          out.fifth = s;
          return;
        }
      }
    }
  };

  for (int r = lo + 1; r < hi; ++r) {
    GridVertex b1{y, r}, b2{y + 1, r};
    if (!is_blue(b1) || !is_blue(b2))
      continue;
    auto n1 = first_nonblue(y + 1, r), n2 = first_nonblue(y, r);
    if (!n1 || !n2)
      continue;
    out.applicable = true;
    out.hypothesis = "blue-blue";
    record(b1, *n1);
    record(b2, *n2);
    if (H.spec().alpha.letter(y) >= 2 && !(out.adjacent_pair && out.nonadjacent_pair)) {
      fifth({b2}, {*n1}, y);
      if (!(out.adjacent_pair && out.nonadjacent_pair))
        fifth({b1}, {*n2}, y + 1);
    }
    return out;
  }
  for (int r = lo + 1; r < hi; ++r) {
    for (int side = 0; side < 2; ++side) {
      GridVertex b1{side == 0 ? y : y + 1, r}, n1{side == 0 ? y + 1 : y, r};
      if (!is_blue(b1) || !is_nonblue(n1))
        continue;
      auto n2 = first_nonblue(b1.col, r);
      if (!n2)
        continue;
      out.applicable = true;
      out.hypothesis = "blue-nonblue";
      record(b1, n1);
      fifth({b1}, {*n2}, n1.col);
      return out;
    }
  }
  return out;
}

// Pairs from distinct links of a couple set, combined into one pairing.
inline DistinguishedPairing assemble_cross_link_pairing(const CoupleSet& P, const std::vector<BlueNonbluePair>& pairs,
                                                        const BondSource& beta, bool matched) {
  if (static_cast<int>(pairs.size()) != P.size())
    throw InputError("need one pair per link");
  std::set<int> links(P.P.begin(), P.P.end());
  std::set<int> used;
  for (const auto& p : pairs) {
    if (p.blue.row != p.nonblue.row || std::abs(p.blue.col - p.nonblue.col) != 1)
      throw InputError("pair " + p.text() + " is not a horizontal link pair");
    if (!links.count(p.link()) || !used.insert(p.link()).second)
      throw InputError("pair " + p.text() + " does not match a distinct couple-set link");
    if (p.polarity() != pairs.front().polarity())
      throw InputError("pair " + p.text() + " has a different polarity");
    if (p.adjacent != matched)
      throw InputError("pair " + p.text() + (matched ? " is not adjacent" : " is adjacent"));
  }
  if (auto bad = P.find_pair(beta, matched))
    throw InputError(std::string(matched ? "beta is dense" : "beta is sparse") + " on couple-set pair (" +
                     std::to_string(bad->first) + "," + std::to_string(bad->second) + ")");
  DistinguishedPairing out;
  out.kind = matched ? PairingKind::Matched : PairingKind::Unmatched;
  for (const auto& p : pairs) {
    out.U.push_back(p.blue);
    out.W.push_back(p.nonblue);
  }
  return out;
}

inline long long ramsey_threshold(int r) {
  if (r < 2)
    throw InputError("ramsey threshold needs r >= 2");
  return 1LL << (2 * r - 3);
}
inline long long case1_n(int r) {
  if (r < 1 || r > 15)
    throw InputError("case-1 threshold needs 1 <= r <= 15");
  return 9LL << (4 * r - 1);
}
inline long long case2_m23(int r) {
  if (r < 1 || r > 30)
    throw InputError("case-2 threshold needs 1 <= r <= 30");
  return 3LL << (2 * r);
}

struct MonoSubset {
  std::vector<int> Q;
  bool clique = false;  // every pair dense; otherwise no pair dense
};

// An r-subset of P on which the density graph is complete or empty.
inline std::optional<MonoSubset> mono_density_subset(const CoupleSet& P, const BondSource& beta, int r,
                                                     long long budget = 10'000'000) {
  if (r < 1)
    throw InputError("r must be >= 1");
  const int n = P.size();
  if (r > n)
    return std::nullopt;
  std::vector<std::vector<char>> d(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            CoupleSet::dense(beta, P.P[static_cast<std::size_t>(i)], P.P[static_cast<std::size_t>(j)]);
  long long steps = 0;
  std::vector<int> pick;
  auto rec = [&](auto&& self, int from, bool want) -> bool {
    if (static_cast<int>(pick.size()) == r)
      return true;
    for (int i = from; i < n; ++i) {
      if (++steps > budget)
        return false;
      bool ok = true;
      for (int j : pick)
        ok = ok && (d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) == want;
      if (!ok)
        continue;
      pick.push_back(i);
      if (self(self, i + 1, want))
        return true;
      pick.pop_back();
    }
    return false;
  };
  for (bool want : {true, false}) {
    pick.clear();
    if (rec(rec, 0, want)) {
      MonoSubset m;
      m.clique = want;
      for (int i : pick)
        m.Q.push_back(P.P[static_cast<std::size_t>(i)]);
      return m;
    }
  }
  return std::nullopt;
}

struct AuditReport {
  bool applicable = false;
  int node = -1, column = 0, depth = 0;
  AuditColouring colouring;
  CaseReport case_report;
  DistinguishedPairing pairing;
  int blue_labels = 0;
  bool holds = true;

  std::string text(const GridGraph& H) const {
    std::ostringstream out;
    if (!applicable) {
      out << "audit: not-applicable\n";
      return out.str();
    }
    out << "node " << node << " depth " << depth << " full column " << column << "\n";
    out << "colours per column (blue/red/white):\n";
    for (int x : H.columns()) {
      int b = 0, r = 0, w = 0;
      for (int y : H.rows()) {
        auto c = detail::colour_of(colouring, {x, y});
        (c == AuditColour::Blue ? b : c == AuditColour::Red ? r : w)++;
      }
      out << "  " << x << "\t" << b << "/" << r << "/" << w << "\n";
    }
    out << case_report.text();
    out << "pairing " << pairing.text() << "\n";
    out << "blue labels " << blue_labels << " >= pairing size " << pairing.size() << ": " << (holds ? "yes" : "NO")
        << "\n";
    return out.str();
  }
};

inline AuditReport audit_expression(const CwExpression& e, const GridGraph& H, PairingSearchOptions opt = {}) {
  AuditReport rep;
  auto v = validate_against(e, H);
  if (!v.ok)
    throw InputError("expression does not build the square");
  auto at = lowest_full_column_node(e, H);
  if (!at)
    return rep;
  rep.applicable = true;
  rep.node = at->node;
  rep.column = at->column;
  rep.depth = at->depth;
  rep.colouring = colour_at_node(e, at->node, H.vertices());
  rep.case_report = classify_case(rep.colouring, H);
  std::vector<GridVertex> blue, nonblue;
  std::set<int> labels;
  for (std::size_t i = 0; i < rep.colouring.vertices.size(); ++i) {
    if (rep.colouring.colour[i] == AuditColour::Blue) {
      blue.push_back(rep.colouring.vertices[i]);
      labels.insert(*rep.colouring.label[i]);
    } else {
      nonblue.push_back(rep.colouring.vertices[i]);
    }
  }
  rep.blue_labels = static_cast<int>(labels.size());
  rep.pairing = find_largest_pairing(H, blue, nonblue, opt);
  rep.holds = rep.blue_labels >= rep.pairing.size();
  return rep;
}

namespace detail {

// A labelled subtree whose labels are 0..classes-1, one per outside-neighbourhood class.
struct Piece {
  int node = -1;
  std::vector<int> members;          // graph indices
  std::vector<std::vector<int>> classes;
};

} // namespace detail

// Random valid expression: pieces are united at random, edges across are joined
// eagerly and classes with equal outside neighbourhoods merged.
inline CwExpression random_expression(const GridGraph& G, std::mt19937_64& rng, bool linear = false) {
  CwExpression e;
  const int n = G.size();
  if (n == 0)
    return e;
  Bitset all(n);
  all.set_all();
  auto outside_sig = [&](const std::vector<int>& members, int v) {
    Bitset out = all;
    for (int m : members)
      out.reset(m);
    Bitset s = G.graph().row(v);
    s &= out;
    return s;
  };
  std::vector<detail::Piece> pieces;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i : order)
    pieces.push_back({e.vert(G.vertex(i), 0), {i}, {{i}}});

  while (pieces.size() > 1) {
    std::size_t a, b;
    if (linear) {
      a = 0;
      b = 1;
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
      a = pick(rng);
      do
        b = pick(rng);
      while (b == a);
    }
    auto A = pieces[a], B = pieces[b];
    int ca = static_cast<int>(A.classes.size()), cb = static_cast<int>(B.classes.size());
    int nb = B.node;
    for (int l = cb - 1; l >= 0; --l)
      nb = e.relabel(l, l + ca, nb);
    int node = e.unite(A.node, nb);
    detail::Piece P;
    P.members = A.members;
    P.members.insert(P.members.end(), B.members.begin(), B.members.end());
    P.classes = A.classes;
    P.classes.insert(P.classes.end(), B.classes.begin(), B.classes.end());
    for (int i = 0; i < ca; ++i)
      for (int j = 0; j < cb; ++j)
        if (G.adjacent(A.classes[static_cast<std::size_t>(i)].front(), B.classes[static_cast<std::size_t>(j)].front()))
          node = e.join(i, ca + j, node);
    // Merge classes with equal outside neighbourhoods into the lowest label, then compact.
    std::map<Bitset, int> owner;
    std::vector<int> target(P.classes.size());
    for (std::size_t l = 0; l < P.classes.size(); ++l) {
      auto [it, fresh] = owner.emplace(outside_sig(P.members, P.classes[l].front()), static_cast<int>(l));
      target[l] = it->second;
    }
    std::vector<std::vector<int>> merged;
    std::map<int, int> compact;
    for (std::size_t l = 0; l < P.classes.size(); ++l) {
      int t = target[l];
      if (!compact.count(t)) {
        compact[t] = static_cast<int>(merged.size());
        merged.emplace_back();
      }
      auto& dst = merged[static_cast<std::size_t>(compact[t])];
      dst.insert(dst.end(), P.classes[l].begin(), P.classes[l].end());
    }
    for (std::size_t l = 0; l < P.classes.size(); ++l) {
      int to = compact[target[l]];
      if (to != static_cast<int>(l))
        node = e.relabel(static_cast<int>(l), to, node);
    }
    P.classes = std::move(merged);
    P.node = node;
    std::size_t hi = std::max(a, b), lo = std::min(a, b);
    pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(hi));
    pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(lo));
    pieces.insert(pieces.begin(), P);
  }
  e.set_root(pieces.front().node);
  return e;
}

} // namespace gridcw
