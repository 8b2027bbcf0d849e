#pragma once

#include "errors.hpp"
#include "grid.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gridcw {

enum class NodeKind { Vertex, Join, Relabel, Union };

struct CwNode {
  NodeKind kind = NodeKind::Vertex;
  GridVertex id;     // Vertex
  int a = 0, b = 0;  // label of a Vertex in a; Join/Relabel labels
  int left = -1;     // child of Join/Relabel, left child of Union
  int right = -1;
};

// Final labels and edges after evaluation. Vertices sorted.
struct LabelledGraph {
  std::vector<GridVertex> vertices;
  std::vector<int> labels;
  Graph graph;

  int index_of(GridVertex v) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v)
      return -1;
    return static_cast<int>(it - vertices.begin());
  }
  std::set<std::pair<GridVertex, GridVertex>> edge_set() const {
    std::set<std::pair<GridVertex, GridVertex>> s;
    for (auto [a, b] : graph.edges())
      s.insert({vertices[static_cast<std::size_t>(a)], vertices[static_cast<std::size_t>(b)]});
    return s;
  }
};

// Expression tree stored as an arena; children always precede their parents.
class CwExpression {
public:
  int vert(GridVertex id, int label) {
    check_label(label);
    CwNode n;
    n.kind = NodeKind::Vertex;
    n.id = id;
    n.a = label;
    return push(n);
  }
  int join(int i, int j, int child) {
    check_label(i);
    check_label(j);
    if (i == j)
      throw InputError("join needs two different labels, got " + std::to_string(i) + " twice");
    CwNode n;
    n.kind = NodeKind::Join;
    n.a = i;
    n.b = j;
    n.left = adopt(child);
    return push(n);
  }
  int relabel(int i, int j, int child) {
    check_label(i);
    check_label(j);
    CwNode n;
    n.kind = NodeKind::Relabel;
    n.a = i;
    n.b = j;
    n.left = adopt(child);
    return push(n);
  }
  int unite(int l, int r) {
    if (l == r)
      throw InputError("union of a node with itself");
    CwNode n;
    n.kind = NodeKind::Union;
    n.left = adopt(l);
    n.right = adopt(r);
    return push(n);
  }

  void set_root(int r) {
    if (r < -1 || r >= size())
      throw InputError("root out of range");
    root_ = r;
  }
  int root() const { return root_; }
  bool empty() const { return root_ < 0; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const CwNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  // Nodes reachable from the root in arena (children-first) order.
  std::vector<int> reachable() const {
    std::vector<int> out;
    if (root_ < 0)
      return out;
    std::vector<char> mark(nodes_.size(), 0);
    mark[static_cast<std::size_t>(root_)] = 1;
    for (int i = root_; i >= 0; --i) {
      if (!mark[static_cast<std::size_t>(i)])
        continue;
      const auto& n = node(i);
      if (n.left >= 0)
        mark[static_cast<std::size_t>(n.left)] = 1;
      if (n.right >= 0)
        mark[static_cast<std::size_t>(n.right)] = 1;
    }
    for (int i = 0; i <= root_; ++i)
      if (mark[static_cast<std::size_t>(i)])
        out.push_back(i);
    return out;
  }

  std::vector<int> parents() const {
    std::vector<int> p(nodes_.size(), -1);
    for (int i = 0; i < size(); ++i) {
      if (node(i).left >= 0)
        p[static_cast<std::size_t>(node(i).left)] = i;
      if (node(i).right >= 0)
        p[static_cast<std::size_t>(node(i).right)] = i;
    }
    return p;
  }

private:
  static void check_label(int l) {
    if (l < 0)
      throw InputError("labels must be non-negative, got " + std::to_string(l));
  }
  int adopt(int child) {
    if (child < 0 || child >= size())
      throw InputError("child node " + std::to_string(child) + " does not exist");
    if (used_[static_cast<std::size_t>(child)])
      throw InputError("node " + std::to_string(child) + " already has a parent");
    used_[static_cast<std::size_t>(child)] = 1;
    return child;
  }
  int push(const CwNode& n) {
    nodes_.push_back(n);
    used_.push_back(0);
    root_ = size() - 1;
    return root_;
  }

  std::vector<CwNode> nodes_;
  std::vector<char> used_;
  int root_ = -1;
};

enum class OpKind { Add, Join, Relabel };

struct LinearOp {
  OpKind kind = OpKind::Add;
  GridVertex id;
  int a = 0, b = 0;
  bool operator==(const LinearOp&) const = default;
};

struct LinearExpression {
  std::vector<LinearOp> ops;

  void add(GridVertex id, int label) { ops.push_back({OpKind::Add, id, label, 0}); }
  void join(int i, int j) {
    if (i == j)
      throw InputError("join needs two different labels, got " + std::to_string(i) + " twice");
    ops.push_back({OpKind::Join, {}, i, j});
  }
  void relabel(int i, int j) { ops.push_back({OpKind::Relabel, {}, i, j}); }
  bool operator==(const LinearExpression&) const = default;
};

namespace detail {

// Evaluates the subtree under `top`; shared by whole-tree and per-node evaluation.
inline LabelledGraph evaluate_from(const CwExpression& e, int top) {
  LabelledGraph out;
  if (top < 0)
    return out;
  std::vector<char> in(static_cast<std::size_t>(e.size()), 0);
  in[static_cast<std::size_t>(top)] = 1;
  for (int i = top; i >= 0; --i) {
    if (!in[static_cast<std::size_t>(i)])
      continue;
    const auto& n = e.node(i);
    if (n.left >= 0)
      in[static_cast<std::size_t>(n.left)] = 1;
    if (n.right >= 0)
      in[static_cast<std::size_t>(n.right)] = 1;
  }
  std::vector<GridVertex> ids;
  std::unordered_map<int, int> slot_of_node;
  for (int i = 0; i <= top; ++i)
    if (in[static_cast<std::size_t>(i)] && e.node(i).kind == NodeKind::Vertex) {
      slot_of_node[i] = static_cast<int>(ids.size());
      ids.push_back(e.node(i).id);
    }
  {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end())
      throw InputError("duplicate vertex id " + dup->id());
  }
  int nv = static_cast<int>(ids.size());
  std::vector<int> label(static_cast<std::size_t>(nv), 0);
  Graph g(nv);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(top + 1));
  for (int i = 0; i <= top; ++i) {
    if (!in[static_cast<std::size_t>(i)])
      continue;
    const auto& n = e.node(i);
    auto& mine = members[static_cast<std::size_t>(i)];
    switch (n.kind) {
    case NodeKind::Vertex: {
      int s = slot_of_node[i];
      label[static_cast<std::size_t>(s)] = n.a;
      mine.push_back(s);
      break;
    }
    case NodeKind::Join: {
      mine = std::move(members[static_cast<std::size_t>(n.left)]);
      std::vector<int> li, lj;
      for (int s : mine) {
        if (label[static_cast<std::size_t>(s)] == n.a)
          li.push_back(s);
        else if (label[static_cast<std::size_t>(s)] == n.b)
          lj.push_back(s);
      }
      for (int x : li)
        for (int y : lj)
          g.add_edge(x, y);
      break;
    }
    case NodeKind::Relabel:
      mine = std::move(members[static_cast<std::size_t>(n.left)]);
      for (int s : mine)
        if (label[static_cast<std::size_t>(s)] == n.a)
          label[static_cast<std::size_t>(s)] = n.b;
      break;
    case NodeKind::Union: {
      mine = std::move(members[static_cast<std::size_t>(n.left)]);
      auto& other = members[static_cast<std::size_t>(n.right)];
      mine.insert(mine.end(), other.begin(), other.end());
      other.clear();
      break;
    }
    }
  }
  std::vector<int> order(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i)
    order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return ids[static_cast<std::size_t>(x)] < ids[static_cast<std::size_t>(y)];
  });
  std::vector<int> pos(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i)
    pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  out.graph = Graph(nv);
  for (int i = 0; i < nv; ++i) {
    out.vertices.push_back(ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    out.labels.push_back(label[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  }
  for (auto [a, b] : g.edges())
    out.graph.add_edge(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]);
  return out;
}

} // namespace detail

inline LabelledGraph evaluate(const CwExpression& e) { return detail::evaluate_from(e, e.root()); }

inline LabelledGraph evaluate_subtree(const CwExpression& e, int node) {
  if (node < 0 || node >= e.size())
    throw InputError("node " + std::to_string(node) + " does not exist");
  return detail::evaluate_from(e, node);
}

inline LabelledGraph evaluate(const LinearExpression& e) {
  std::vector<GridVertex> ids;
  std::vector<int> label;
  std::map<GridVertex, int> seen;
  std::vector<std::pair<int, int>> edges;
  std::map<int, std::vector<int>> by_label;
  for (const auto& op : e.ops) {
    switch (op.kind) {
    case OpKind::Add: {
      if (op.a < 0)
        throw InputError("labels must be non-negative");
      if (!seen.emplace(op.id, static_cast<int>(ids.size())).second)
        throw InputError("duplicate vertex id " + op.id.id());
      by_label[op.a].push_back(static_cast<int>(ids.size()));
      ids.push_back(op.id);
      label.push_back(op.a);
      break;
    }
    case OpKind::Join: {
      if (op.a == op.b)
        throw InputError("join needs two different labels");
      auto i = by_label.find(op.a), j = by_label.find(op.b);
      if (i == by_label.end() || j == by_label.end())
        break;
      for (int x : i->second)
        for (int y : j->second)
          edges.emplace_back(x, y);
      break;
    }
    case OpKind::Relabel: {
      if (op.a == op.b)
        break;
      auto i = by_label.find(op.a);
      if (i == by_label.end())
        break;
      auto moved = std::move(i->second);
      by_label.erase(i);
      for (int x : moved)
        label[static_cast<std::size_t>(x)] = op.b;
      auto& dst = by_label[op.b];
      dst.insert(dst.end(), moved.begin(), moved.end());
      break;
    }
    }
  }
  LabelledGraph out;
  out.vertices.reserve(seen.size());
  std::vector<int> pos(ids.size());
  int k = 0;
  for (auto& [id, slot] : seen) {
    out.vertices.push_back(id);
    out.labels.push_back(label[static_cast<std::size_t>(slot)]);
    pos[static_cast<std::size_t>(slot)] = k++;
  }
  out.graph = Graph(static_cast<int>(ids.size()));
  for (auto [x, y] : edges)
    if (!out.graph.has_edge(pos[static_cast<std::size_t>(x)], pos[static_cast<std::size_t>(y)]))
      out.graph.add_edge(pos[static_cast<std::size_t>(x)], pos[static_cast<std::size_t>(y)]);
  return out;
}

inline int label_count(const CwExpression& e) {
  std::set<int> labels;
  for (int i : e.reachable()) {
    const auto& n = e.node(i);
    labels.insert(n.a);
    if (n.kind == NodeKind::Join || n.kind == NodeKind::Relabel)
      labels.insert(n.b);
  }
  return static_cast<int>(labels.size());
}

inline int label_count(const LinearExpression& e) {
  std::set<int> labels;
  for (const auto& op : e.ops) {
    labels.insert(op.a);
    if (op.kind != OpKind::Add)
      labels.insert(op.b);
  }
  return static_cast<int>(labels.size());
}

// Caterpillar tree: each new vertex is united on the right of what was built so far.
inline CwExpression to_tree(const LinearExpression& e) {
  CwExpression t;
  int cur = -1;
  for (const auto& op : e.ops) {
    switch (op.kind) {
    case OpKind::Add: {
      int leaf = t.vert(op.id, op.a);
      cur = cur < 0 ? leaf : t.unite(cur, leaf);
      break;
    }
    case OpKind::Join:
      if (cur >= 0)
        cur = t.join(op.a, op.b, cur);
      break;
    case OpKind::Relabel:
      if (cur >= 0)
        cur = t.relabel(op.a, op.b, cur);
      break;
    }
  }
  t.set_root(cur);
  return t;
}

// Number of vertex leaves under each node (indexed by arena position).
inline std::vector<int> leaf_counts(const CwExpression& e) {
  std::vector<int> c(static_cast<std::size_t>(e.size()), 0);
  for (int i = 0; i < e.size(); ++i) {
    const auto& n = e.node(i);
    if (n.kind == NodeKind::Vertex)
      c[static_cast<std::size_t>(i)] = 1;
    else if (n.kind == NodeKind::Union)
      c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(n.left)] + c[static_cast<std::size_t>(n.right)];
    else
      c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(n.left)];
  }
  return c;
}

// Every Union has a child subtree holding a single vertex, so the Unions form a path.
inline bool is_caterpillar(const CwExpression& e) {
  auto c = leaf_counts(e);
  for (int i : e.reachable()) {
    const auto& n = e.node(i);
    if (n.kind == NodeKind::Union && c[static_cast<std::size_t>(n.left)] > 1 &&
        c[static_cast<std::size_t>(n.right)] > 1)
      return false;
  }
  return true;
}

struct ValidationResult {
  bool ok = false;
  std::vector<std::pair<GridVertex, GridVertex>> missing;  // in target, not built
  std::vector<std::pair<GridVertex, GridVertex>> extra;    // built, not in target
};

inline ValidationResult validate_against(const LabelledGraph& built, const GridGraph& target) {
  for (auto v : built.vertices)
    if (!target.contains(v))
      throw InputError("expression vertex " + v.id() + " is not in the target graph");
  for (auto v : target.vertices())
    if (built.index_of(v) < 0)
      throw InputError("target vertex " + v.id() + " is never created by the expression");
  ValidationResult r;
  auto have = built.edge_set();
  std::set<std::pair<GridVertex, GridVertex>> want;
  for (auto [a, b] : target.graph().edges())
    want.insert({target.vertex(a), target.vertex(b)});
  std::set_difference(want.begin(), want.end(), have.begin(), have.end(), std::back_inserter(r.missing));
  std::set_difference(have.begin(), have.end(), want.begin(), want.end(), std::back_inserter(r.extra));
  r.ok = r.missing.empty() && r.extra.empty();
  return r;
}

inline ValidationResult validate_against(const CwExpression& e, const GridGraph& target) {
  return validate_against(evaluate(e), target);
}
inline ValidationResult validate_against(const LinearExpression& e, const GridGraph& target) {
  return validate_against(evaluate(e), target);
}

enum class AuditColour { White, Blue, Red };

struct AuditColouring {
  int node = -1;
  std::vector<GridVertex> vertices;          // full vertex set, sorted
  std::vector<AuditColour> colour;           // per vertex
  std::vector<std::optional<int>> label;     // label at the node, white vertices have none

  int index_of(GridVertex v) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    if (it == vertices.end() || *it != v)
      return -1;
    return static_cast<int>(it - vertices.begin());
  }
  std::vector<int> of_colour(AuditColour c) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < colour.size(); ++i)
      if (colour[i] == c)
        out.push_back(static_cast<int>(i));
    return out;
  }
};

// Left child blue, right child red, everything else white.
inline AuditColouring colour_at_node(const CwExpression& e, int node, std::vector<GridVertex> full) {
  if (node < 0 || node >= e.size() || e.node(node).kind != NodeKind::Union)
    throw InputError("node " + std::to_string(node) + " is not a union node");
  std::sort(full.begin(), full.end());
  full.erase(std::unique(full.begin(), full.end()), full.end());
  AuditColouring c;
  c.node = node;
  c.vertices = full;
  c.colour.assign(full.size(), AuditColour::White);
  c.label.assign(full.size(), std::nullopt);
  auto paint = [&](int child, AuditColour col) {
    auto lg = evaluate_subtree(e, child);
    for (std::size_t i = 0; i < lg.vertices.size(); ++i) {
      int k = c.index_of(lg.vertices[i]);
      if (k < 0)
        throw InputError("vertex " + lg.vertices[i].id() + " missing from the full vertex set");
      c.colour[static_cast<std::size_t>(k)] = col;
      c.label[static_cast<std::size_t>(k)] = lg.labels[i];
    }
  };
  paint(e.node(node).left, AuditColour::Blue);
  paint(e.node(node).right, AuditColour::Red);
  return c;
}

struct FullColumnNode {
  int node = -1;
  int column = 0;  // a column whose interior rows the subtree holds
  int depth = 0;
};

// Deepest Union whose subtree holds every vertex of some column in the interior
// rows of H (all rows but the lowest and highest); leftmost on ties.
inline std::optional<FullColumnNode> lowest_full_column_node(const CwExpression& e, const GridGraph& H) {
  auto rows = H.rows();
  if (rows.size() <= 2 || e.empty())
    return std::nullopt;
  int lo = rows.front(), hi = rows.back();
  std::map<int, std::vector<int>> interior;  // column -> H indices
  for (int i = 0; i < H.size(); ++i) {
    auto v = H.vertex(i);
    if (v.row > lo && v.row < hi)
      interior[v.col].push_back(i);
  }
  if (interior.empty())
    return std::nullopt;

  std::vector<Bitset> sub(static_cast<std::size_t>(e.size()), Bitset(H.size()));
  for (int i = 0; i < e.size(); ++i) {
    const auto& n = e.node(i);
    auto& s = sub[static_cast<std::size_t>(i)];
    if (n.kind == NodeKind::Vertex) {
      if (auto k = H.index_of(n.id))
        s.set(*k);
    } else {
      s = sub[static_cast<std::size_t>(n.left)];
      if (n.right >= 0)
        s |= sub[static_cast<std::size_t>(n.right)];
    }
  }
  std::vector<int> depth(static_cast<std::size_t>(e.size()), 0);
  std::vector<int> preorder;
  {
    std::vector<int> stack{e.root()};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      preorder.push_back(i);
      const auto& n = e.node(i);
      if (n.right >= 0) {
        depth[static_cast<std::size_t>(n.right)] = depth[static_cast<std::size_t>(i)] + 1;
        stack.push_back(n.right);
      }
      if (n.left >= 0) {
        depth[static_cast<std::size_t>(n.left)] = depth[static_cast<std::size_t>(i)] + 1;
        stack.push_back(n.left);
      }
    }
  }
  std::optional<FullColumnNode> best;
  for (int i : preorder) {
    if (e.node(i).kind != NodeKind::Union)
      continue;
    const auto& s = sub[static_cast<std::size_t>(i)];
    for (const auto& [col, members] : interior) {
      bool all = std::all_of(members.begin(), members.end(), [&](int k) { return s.test(k); });
      if (!all)
        continue;
      int d = depth[static_cast<std::size_t>(i)];
      if (!best || d > best->depth)
        best = FullColumnNode{i, col, d};
      break;
    }
  }
  return best;
}

// ---- text formats ----

inline std::string to_text(const CwExpression& e) {
  if (e.empty())
    return "";
  std::string out;
  // (node, stage): stage 0 opens, 1 between children, 2 closes
  std::vector<std::pair<int, int>> stack{{e.root(), 0}};
  while (!stack.empty()) {
    auto [i, stage] = stack.back();
    stack.pop_back();
    const auto& n = e.node(i);
    if (stage == 0) {
      switch (n.kind) {
      case NodeKind::Vertex:
        out += "(vert " + n.id.id() + " " + std::to_string(n.a) + ")";
        continue;
      case NodeKind::Join:
        out += "(eta " + std::to_string(n.a) + " " + std::to_string(n.b) + " ";
        break;
      case NodeKind::Relabel:
        out += "(rho " + std::to_string(n.a) + " " + std::to_string(n.b) + " ";
        break;
      case NodeKind::Union:
        out += "(oplus ";
        break;
      }
      stack.push_back({i, n.kind == NodeKind::Union ? 1 : 2});
      stack.push_back({n.left, 0});
    } else if (stage == 1) {
      out += " ";
      stack.push_back({i, 2});
      stack.push_back({n.right, 0});
    } else {
      out += ")";
    }
  }
  return out;
}

namespace detail {

struct Cursor {
  const std::string& s;
  std::size_t p = 0;

  void skip() {
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p])))
      ++p;
  }
  bool done() {
    skip();
    return p >= s.size();
  }
  std::string word() {
    skip();
    std::size_t b = p;
    while (p < s.size() && !std::isspace(static_cast<unsigned char>(s[p])) && s[p] != '(' && s[p] != ')')
      ++p;
    if (b == p)
      throw ParseError("expected a token", b);
    return s.substr(b, p - b);
  }
  int integer() {
    skip();
    std::size_t b = p;
    return parse_int(word(), b);
  }
  void expect(char c) {
    skip();
    if (p >= s.size() || s[p] != c)
      throw ParseError(std::string("expected '") + c + "'", p);
    ++p;
  }
};

inline GridVertex parse_vertex_id(const std::string& tok, std::size_t pos) {
  auto u = tok.find('_');
  if (u == std::string::npos)
    throw ParseError("vertex id must look like <col>_<row>, got '" + tok + "'", pos);
  GridVertex v{parse_int(tok.substr(0, u), pos), parse_int(tok.substr(u + 1), pos)};
  if (v.col < 1 || v.row < 1)
    throw ParseError("vertex coordinates must be >= 1", pos);
  return v;
}

} // namespace detail

inline CwExpression parse_expression(const std::string& text) {
  CwExpression e;
  detail::Cursor cur{text};
  if (cur.done())
    return e;
  struct Frame {
    NodeKind kind;
    int a, b;
    std::vector<int> kids;
    std::size_t pos;
  };
  std::vector<Frame> stack;
  int root = -1;
  auto complete = [&](int node, std::size_t pos) {
    if (stack.empty()) {
      if (root >= 0)
        throw ParseError("trailing expression", pos);
      root = node;
      return;
    }
    auto& f = stack.back();
    std::size_t cap = f.kind == NodeKind::Union ? 2 : 1;
    if (f.kids.size() >= cap)
      throw ParseError("too many children", pos);
    f.kids.push_back(node);
  };
  while (!cur.done()) {
    std::size_t pos = cur.p;
    char c = text[cur.p];
    if (root >= 0 && stack.empty())
      throw ParseError("trailing text after expression", pos);
    if (c == '(') {
      ++cur.p;
      std::string kw = cur.word();
      try {
        if (kw == "vert") {
          std::size_t idpos = (cur.skip(), cur.p);
          auto id = detail::parse_vertex_id(cur.word(), idpos);
          int label = cur.integer();
          cur.expect(')');
          complete(e.vert(id, label), pos);
        } else if (kw == "eta" || kw == "rho") {
          int a = cur.integer();
          int b = cur.integer();
          if (kw == "eta" && a == b)
            throw ParseError("eta with equal labels " + std::to_string(a), pos);
          stack.push_back({kw == "eta" ? NodeKind::Join : NodeKind::Relabel, a, b, {}, pos});
        } else if (kw == "oplus") {
          stack.push_back({NodeKind::Union, 0, 0, {}, pos});
        } else {
          throw ParseError("unknown form '" + kw + "'", pos);
        }
      } catch (const ParseError&) {
        throw;
      } catch (const InputError& ex) {
        throw ParseError(ex.what(), pos);
      }
    } else if (c == ')') {
      ++cur.p;
      if (stack.empty())
        throw ParseError("unbalanced ')'", pos);
      Frame f = std::move(stack.back());
      stack.pop_back();
      std::size_t need = f.kind == NodeKind::Union ? 2 : 1;
      if (f.kids.size() != need)
        throw ParseError("form opened here has " + std::to_string(f.kids.size()) + " children, needs " +
                             std::to_string(need),
                         f.pos);
      int node = -1;
      try {
        if (f.kind == NodeKind::Union)
          node = e.unite(f.kids[0], f.kids[1]);
        else if (f.kind == NodeKind::Join)
          node = e.join(f.a, f.b, f.kids[0]);
        else
          node = e.relabel(f.a, f.b, f.kids[0]);
      } catch (const InputError& ex) {
        throw ParseError(ex.what(), f.pos);
      }
      complete(node, pos);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  }
  if (!stack.empty())
    throw ParseError("unterminated form", stack.back().pos);
  e.set_root(root);
  return e;
}

inline std::string to_text(const LinearExpression& e) {
  std::string out;
  for (const auto& op : e.ops) {
    switch (op.kind) {
    case OpKind::Add:
      out += "add " + op.id.id() + " " + std::to_string(op.a) + "\n";
      break;
    case OpKind::Join:
      out += "join " + std::to_string(op.a) + " " + std::to_string(op.b) + "\n";
      break;
    case OpKind::Relabel:
      out += "relabel " + std::to_string(op.a) + " " + std::to_string(op.b) + "\n";
      break;
    }
  }
  return out;
}

inline LinearExpression parse_linear(const std::string& text) {
  LinearExpression e;
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
    if (tok.empty())
      continue;
    if (tok.size() != 3)
      throw ParseError("expected three fields", pos);
    if (tok[0] == "add") {
      int label = detail::parse_int(tok[2], pos);
      if (label < 0)
        throw ParseError("labels must be non-negative", pos);
      e.add(detail::parse_vertex_id(tok[1], pos), label);
    } else if (tok[0] == "join" || tok[0] == "relabel") {
      int a = detail::parse_int(tok[1], pos), b = detail::parse_int(tok[2], pos);
      if (a < 0 || b < 0)
        throw ParseError("labels must be non-negative", pos);
      if (tok[0] == "join") {
        if (a == b)
          throw ParseError("join with equal labels " + std::to_string(a), pos);
        e.join(a, b);
      } else {
        e.relabel(a, b);
      }
    } else {
      throw ParseError("unknown operation '" + tok[0] + "'", pos);
    }
  }
  return e;
}

} // namespace gridcw
