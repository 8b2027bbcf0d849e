#include "gridcw/gridcw.hpp"
#include "reference.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace gridcw;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& run) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  failures += !o.pass;
  std::printf("%s %d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ref::Spec reference_spec(const std::string& name) {
  using B = ref::Bond;
  if (name == "bipartite-permutation")
    return {"", "2", "", "0", {B::Empty, 0, {}}};
  if (name == "unit-interval")
    return {"", "2", "", "1", {B::Empty, 0, {}}};
  if (name == "bichain")
    return {"", "23", "", "0", {B::Bichain, 0, {}}};
  if (name == "split-permutation")
    return {"", "23", "", "01", {B::Split, 0, {}}};
  if (name == "periodic-01")
    return {"", "01", "", "0", {B::Empty, 0, {}}};
  if (name == "recurrent-0123")
    return {"", "0123", "", "0", {B::Empty, 0, {}}};
  if (name == "example-1")
    return {"", "0", "", "1", {B::Empty, 0, {}}};
  if (name == "example-2")
    return {"", "1", "", "0", {B::Star, 1, {}}};
  if (name == "example-3")
    return {"", "23", "", "0", {B::Offset, 2, {}}};
  if (name == "example-4")
    return {"", "0", "", "0", {B::OddDiff, 0, {}}};
  if (name == "example-5")
    return {"", "1", "", "1", {B::EvenDiff, 0, {}}};
  if (name == "example-6")
    return {"", "2", "", "0", {B::Range, 4, {}}};
  throw InputError("no reference for " + name);
}

std::string word(std::mt19937& rng, const char* alphabet, int base, int len) {
  std::string w;
  for (int i = 0; i < len; ++i)
    w += alphabet[rng() % static_cast<unsigned>(base)];
  return w;
}

BondSource random_bonds(std::mt19937& rng, int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int x = 1; x <= n; ++x)
    for (int y = x + 2; y <= n; ++y)
      if (rng() % 5 == 0)
        pairs.emplace_back(x, y);
  return BondSource::explicit_pairs(pairs);
}

GridGraph random_subgraph(std::mt19937& rng, const DeltaSpec& d, int cols, int rows, int pct) {
  std::vector<GridVertex> vs;
  for (int x = 1; x <= cols; ++x)
    for (int y = 1; y <= rows; ++y)
      if (static_cast<int>(rng() % 100) < pct)
        vs.push_back({x, y});
  return GridGraph::induced(d, vs);
}

struct PanelFixture {
  DeltaSpec d;
  KFactor f;
  GridGraph G;
};

// Free-certified panel inputs with k = 3, shared by the builder and panel-bound criteria.
std::vector<PanelFixture> panel_fixtures() {
  std::vector<PanelFixture> out;
  std::mt19937 rng(41);
  const char* names[] = {"bipartite-permutation", "recurrent-0123", "example-3", "unit-interval"};
  while (out.size() < 20) {
    auto d = catalog_entry(names[out.size() % 4]).spec();
    auto f = extract_k_factor(d, 1, 3);
    auto H = GridGraph::rectangle(d, f.start, 1, 3, 3);
    auto G = random_subgraph(rng, d, 15, 5, 45);
    if (!contains_induced(G.graph(), H.graph()).has_value())
      out.push_back({d, f, G});
  }
  return out;
}

Outcome criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream bad;
  int rows = 0;
  for (const auto& e : catalog()) {
    if (e.table != 2)
      continue;
    ++rows;
    auto beta = e.spec().beta;
    int bound = *e.m_beta_bound, peak = 0;
    std::vector<int> over, short_of;
    for (int n = 2; n <= 50; ++n) {
      int m = m_beta(beta, n);
      peak = std::max(peak, m);
      if (m > bound)
        over.push_back(n);
      if (n >= 5 && m != bound)
        short_of.push_back(n);
    }
    if (!over.empty() || !short_of.empty())
      bad << " " << e.name << " bound " << bound << " computed max " << peak << " (" << over.size()
          << " n above, " << short_of.size() << " n >= 5 not equal)";
  }
  double secs = since(t0);
  std::string d = std::to_string(rows) + " rows, n=2..50";
  if (secs >= 5)
    bad << " runtime " << secs << "s";
  return {bad.str().empty(), bad.str().empty() ? d + ", all bounds exact" : d + ";" + bad.str()};
}

Outcome criterion2() {
  std::ostringstream bad;
  auto zero = DeltaSpec::make("0", BondSource::empty(), "0");
  for (int n = 1; n <= 30; ++n)
    if (n_delta(zero, interval(1, n)) != 1)
      bad << " 000 at n=" << n;
  struct Case {
    const char *alpha, *gamma;
  };
  for (auto c : {Case{"2", "0"}, Case{"1", "0"}, Case{"3", "0"}, Case{"0", "1"}}) {
    auto d = DeltaSpec::make(c.alpha, BondSource::empty(), c.gamma);
    int prev = n_delta(d, interval(1, 1));
    for (int n = 2; n <= 30; ++n) {
      int v = n_delta(d, interval(1, n));
      if (v <= prev) {
        bad << " alpha=" << c.alpha << " gamma=" << c.gamma << " stalls at n=" << n;
        break;
      }
      prev = v;
    }
  }
  auto what = bad.str();
  return {what.empty(), what.empty() ? "5 probes up to n=30 exact" : what.substr(1)};
}

Outcome criterion3() {
  int violations = 0;
  long long checks = 0;
  std::ostringstream first;
  auto note = [&](const std::string& s) {
    if (violations++ == 0)
      first << s;
  };
  auto run = [&](const DeltaSpec& d, const std::string& tag) {
    for (int n = 2; n <= 30; ++n) {
      ++checks;
      if (!check_m_le_n_plus_1(d, n))
        note(tag + " M<=N+1 at n=" + std::to_string(n));
    }
    for (int n = 4; n <= 30; n += 13)
      for (int m = 1; m < n - 1; ++m)
        for (int m2 = m + 1; m2 < n; ++m2) {
          ++checks;
          if (!check_refinement(d.beta, n, m, m2))
            note(tag + " refinement n=" + std::to_string(n) + " m=" + std::to_string(m) + " m'=" + std::to_string(m2));
        }
  };
  for (const auto& e : catalog())
    run(e.spec(), e.name);
  std::mt19937 rng(3);
  for (int t = 0; t < 200; ++t) {
    auto a = word(rng, "0123", 4, 1 + static_cast<int>(rng() % 4));
    auto g = word(rng, "01", 2, 1 + static_cast<int>(rng() % 2));
    run(DeltaSpec::make(a, random_bonds(rng, 30), g), "random bonds #" + std::to_string(t));
  }
  std::string d = std::to_string(checks) + " checks over 12 catalog specs and 200 random bond sets";
  return {violations == 0, violations == 0 ? d + ", zero violations"
                                           : d + ", " + std::to_string(violations) + " violations, first: " + first.str()};
}

Outcome criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  int fails = 0;
  std::ostringstream first;
  auto fail = [&](const std::string& s) {
    if (fails++ == 0)
      first << s;
  };
  std::mt19937 rng(4);
  const auto& cat = catalog();
  for (int t = 0; t < 100; ++t) {
    const auto& e = cat[rng() % cat.size()];
    auto d = e.spec();
    int i = 1 + static_cast<int>(rng() % 6), j = 1 + static_cast<int>(rng() % 4);
    int m = 1 + static_cast<int>(rng() % 6), n = 1 + static_cast<int>(rng() % 8);
    auto r = build_rectangular_block(d, i, j, m, n);
    if (!validate_against(r.expr, GridGraph::rectangle(d, i, j, m, n)).ok || label_count(r.expr) > r.budget.value)
      fail("block " + e.name);
  }
  const BondSource bonds[] = {BondSource::empty(), BondSource::offset(2), BondSource::parity_odd_diff(),
                              BondSource::range(3)};
  for (int t = 0; t < 50; ++t) {
    auto prefix = word(rng, "0123", 4, static_cast<int>(rng() % 4));
    DeltaSpec d;
    d.alpha = WordSource::from_strings(prefix, word(rng, "01", 2, 1 + static_cast<int>(rng() % 3)), 3);
    d.gamma = WordSource::from_strings("", word(rng, "01", 2, 1 + static_cast<int>(rng() % 2)), 1);
    d.beta = bonds[t % 4];
    auto G = random_subgraph(rng, d, 8, 5, 70);
    auto r = build_bounded_two_row(d, G, static_cast<int>(prefix.size()));
    if (!validate_against(r.expr, G).ok || label_count(r.expr) > r.budget.value)
      fail("two-row #" + std::to_string(t));
  }
  for (const auto& fx : panel_fixtures()) {
    auto b = build_panel_expression(fx.d, fx.G, fx.f);
    if (!validate_against(b.expr, fx.G).ok || label_count(b.expr) > b.budget.value)
      fail("panel " + fx.d.name);
  }
  double secs = since(t0);
  if (secs >= 60)
    fail("runtime " + std::to_string(secs) + "s");
  std::string d = "100 block, 50 two-row, 20 panel instances";
  return {fails == 0, fails == 0 ? d + ", all valid within budget" : d + ", " + std::to_string(fails) + " failures, first: " + first.str()};
}

Outcome criterion5() {
  std::mt19937 rng(5);
  int violations = 0, certified = 0, embedded = 0, unknown = 0;
  std::ostringstream first;
  auto note = [&](const std::string& s) {
    if (violations++ == 0)
      first << s;
  };
  for (int t = 0; t < 50; ++t) {
    int k = 2 + static_cast<int>(rng() % 5);
    auto raw = DeltaSpec::make(word(rng, "0123", 4, k), BondSource::empty(), "0");
    auto d = alpha_plus(raw);
    auto g = random_subgraph(rng, d, k, 8, 50);
    std::string tag = "window #" + std::to_string(t) + " alpha=" + d.alpha.period_text().substr(0, static_cast<std::size_t>(k - 1));
    auto dec = maximal_independent_full_veins(g, 1, k);
    std::set<GridVertex> seen;
    for (const auto& f : dec.veins)
      for (auto v : f.members)
        if (!seen.insert(v).second)
          note(tag + ": fat veins share " + v.id());
    try {
      auto H = GridGraph::rectangle(d, 1, 1, k, k);
      if (!contains_induced(g.graph(), H.graph()).has_value()) {
        ++certified;
        if (dec.b() > k - 1)
          note(tag + ": Free but b=" + std::to_string(dec.b()));
      }
    } catch (const BudgetError&) {
      ++unknown;
    }
    if (dec.b() >= k) {
      ++embedded;
      if (!independent_veins_embed_square(dec, d, k))
        note(tag + ": b >= k but the square does not embed");
    }
    auto c = structural_colouring(g, dec);
    for (auto& [v, col] : c.colour)
      if (v.col == k && (col == StructColour::Green || col == StructColour::Pink))
        note(tag + ": " + to_string(col) + " in the rightmost column at " + v.id());
    auto laws = check_red_yellow_laws(c, g);
    if (!laws.ok)
      note(tag + ": law violation " + laws.violations.front().detail);
  }
  std::string d = "50 windows (" + std::to_string(certified) + " certified free, " + std::to_string(unknown) +
                  " undecided, " + std::to_string(embedded) + " with b >= k)";
  return {violations == 0, violations == 0 ? d + ", zero violations"
                                           : d + ", " + std::to_string(violations) + " violations, first: " + first.str()};
}

Outcome criterion6() {
  std::mt19937 rng(6);
  int violations = 0;
  for (int t = 0; t < 50; ++t) {
    std::string a;
    do
      a = word(rng, "0123", 4, 4);
    while (a.find('1') == std::string::npos || a.find('3') == std::string::npos);
    auto d = DeltaSpec::make(a, BondSource::empty(), "0");
    auto g = random_subgraph(rng, d, 5, 5, 70);
    std::vector<GridVertex> U;
    for (auto v : g.vertices())
      if (rng() % 2)
        U.push_back(v);
    violations += !same_column_similarity_invariance(g, g.with_spec(alpha_plus(d)), U);
  }
  return {violations == 0, "50 instances, " + std::to_string(violations) + " violations"};
}

Outcome criterion7() {
  int violations = 0, panels = 0;
  for (const auto& fx : panel_fixtures()) {
    auto pd = build_panels(fx.d, fx.G, fx.f);
    auto params = panel_parameters(fx.d, pd);
    int M = std::max(params.M, 1);
    auto r = panel_similarity_bound(pd, fx.G, M, fx.f.width);
    panels += static_cast<int>(r.values.size());
    violations += !r.ok;
  }
  return {violations == 0, "20 fixtures, " + std::to_string(panels) + " panel prefixes, " + std::to_string(violations) +
                               " fixtures over the bound"};
}

Outcome criterion8() {
  std::ostringstream bad;
  auto width = [](const Graph& g, bool linear) {
    auto r = exact_cwd(g, 4, linear);
    return r ? r->width : -1;
  };
  if (width(Graph(1), false) != 1)
    bad << " vertex";
  for (int n = 2; n <= 5; ++n) {
    Graph k(n);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        k.add_edge(a, b);
    if (width(k, false) != 2)
      bad << " K" << n;
  }
  Graph p4(4), c5(5);
  for (int i = 0; i < 3; ++i)
    p4.add_edge(i, i + 1);
  for (int i = 0; i < 5; ++i)
    c5.add_edge(i, (i + 1) % 5);
  if (width(p4, false) != 3)
    bad << " P4";
  if (width(c5, false) != 3)
    bad << " C5";
  std::mt19937 rng(8);
  int lin_bad = 0, mono_bad = 0;
  for (int t = 0; t < 100; ++t) {
    int n = 2 + static_cast<int>(rng() % 5);
    Graph g(n);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng() % 2)
          g.add_edge(a, b);
    lin_bad += width(g, true) < width(g, false);
  }
  for (int n = 1; n <= 5; ++n) {
    int pairs = n * (n - 1) / 2;
    for (int mask = 0; mask < (1 << pairs); ++mask) {
      Graph g(n);
      int bit = 0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b, ++bit)
          if (mask >> bit & 1)
            g.add_edge(a, b);
      int w = width(g, false);
      for (int drop = 0; drop < n && n > 1; ++drop) {
        std::vector<int> keep;
        for (int v = 0; v < n; ++v)
          if (v != drop)
            keep.push_back(v);
        mono_bad += width(g.induced(keep), false) > w;
      }
    }
  }
  if (lin_bad)
    bad << " lcw<cwd on " << lin_bad;
  if (mono_bad)
    bad << " monotonicity broken on " << mono_bad;
  return {bad.str().empty(), bad.str().empty() ? "fixed values exact, 100 linear samples, all labelled graphs up to 5 vertices"
                                               : bad.str()};
}

Outcome criterion9() {
  auto d = DeltaSpec::make("1", BondSource::empty(), "0");
  auto H = GridGraph::rectangle(d, 1, 1, 4, 4);
  std::vector<CwExpression> exprs;
  auto opt = exact_cwd(H, 6, false, {16, 6, OracleMode::CoarseLabels});
  if (!opt)
    return {false, "oracle found no expression with at most 6 labels"};
  exprs.push_back(opt->witness);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t)
    exprs.push_back(random_expression(H, rng, t % 2));
  int violations = 0, inexact = 0;
  for (const auto& e : exprs) {
    auto rep = audit_expression(e, H);
    if (!rep.applicable || !rep.holds)
      ++violations;
    inexact += !rep.pairing.exhaustive;
  }
  std::string what = "oracle width " + std::to_string(opt->width) + " plus 20 random expressions";
  if (inexact)
    return {false, what + ", " + std::to_string(inexact) + " pairing searches not exhaustive"};
  return {violations == 0, what + ", " + std::to_string(violations) + " violations"};
}

Outcome criterion10() {
  std::ostringstream bad;
  for (const auto& e : catalog()) {
    auto d = load_delta_spec(std::string(GRIDCW_SOURCE_DIR) + "/catalog/" + e.name + ".delta");
    auto rep = classify(d, 24);
    bool periodic_kind = d.beta.kind() != BondKind::Star;
    if (periodic_kind && rep.recurrent != Verdict::Yes)
      bad << " " << e.name << " not recurrent";
    auto s = reference_spec(e.name);
    auto G = GridGraph::rectangle(d, 1, 1, 6, 6);
    for (int a = 0; a < G.size(); ++a)
      for (int b = a + 1; b < G.size(); ++b) {
        auto u = G.vertex(a), v = G.vertex(b);
        if (G.adjacent(a, b) != ref::adjacent(s, u.col, u.row, v.col, v.row)) {
          bad << " " << e.name << " differs at " << u.id() << "," << v.id();
          a = G.size();
          break;
        }
      }
  }
  return {bad.str().empty(), bad.str().empty() ? "12 entries parse, classify and match on 6x6" : bad.str()};
}

} // namespace

int main() {
  report(1, "bond-graph bounds", criterion1);
  report(2, "two-row probes", criterion2);
  report(3, "proposition suite", criterion3);
  report(4, "builder round-trips", criterion4);
  report(5, "vein and slice structure", criterion5);
  report(6, "same-column similarity invariance", criterion6);
  report(7, "panel similarity bound", criterion7);
  report(8, "oracle ground truth", criterion8);
  report(9, "audit label inequality", criterion9);
  report(10, "catalog integrity", criterion10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
