#include "gridcw/gridcw.hpp"

#include <CLI11.hpp>

#include <array>
#include <iostream>
#include <sstream>

using namespace gridcw;

namespace {

enum Exit { Ok = 0, False = 2, Input = 3, Budget = 4, Invariant = 5 };

std::array<int, 4> parse_rect(const std::string& s) {
  std::array<int, 4> r{};
  std::istringstream in(s);
  std::string tok;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(in, tok, ','))
      throw InputError("--rect expects i,j,m,n");
    try {
      std::size_t used = 0;
      r[static_cast<std::size_t>(i)] = std::stoi(tok, &used);
      if (used != tok.size())
        throw InputError("");
    } catch (const std::exception&) {
      throw InputError("--rect expects four integers, got '" + s + "'");
    }
  }
  if (std::getline(in, tok))
    throw InputError("--rect expects exactly four integers");
  if (r[0] < 1 || r[1] < 1 || r[2] < 0 || r[3] < 0)
    throw InputError("--rect needs i,j >= 1 and m,n >= 0");
  return r;
}

// Vertex set from --rect or an edge-list file; edges come from the spec.
GridGraph load_target(const DeltaSpec& d, const std::string& rect, const std::string& file) {
  if (!rect.empty() && !file.empty())
    throw InputError("give either --rect or --target, not both");
  if (!rect.empty()) {
    auto r = parse_rect(rect);
    return GridGraph::rectangle(d, r[0], r[1], r[2], r[3]);
  }
  if (file.empty())
    throw InputError("a target is required (--rect or --target)");
  return GridGraph::induced(d, parse_edge_list(read_text_file(file)).vertices);
}

bool looks_like_tree(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto h = line.find('#');
    if (h != std::string::npos)
      line = line.substr(0, h);
    auto p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos)
      return line[p] == '(';
  }
  return false;
}

CwExpression load_expression(const std::string& file) {
  auto text = read_text_file(file);
  return looks_like_tree(text) ? parse_expression(text) : to_tree(parse_linear(text));
}

void print_linear(const LinearExpression& e, const LabelBudget& b) {
  std::cout << b.header(label_count(e)) << "\n" << to_text(e);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid graph clique-width toolkit"};
  app.require_subcommand(1);

  std::string spec_file, rect, target, curve, method, expr_file, edges_file, name;
  bool dot = false, edge_list = false, linear = false;
  int max_n = 30, k = 2, start = 1, J = -1, square = 0, max_k = 4, depth = 24, horizon = 10000;
  int max_gap = 0;

  auto* build = app.add_subcommand("build", "export a rectangle of the grid graph");
  build->add_option("--spec", spec_file, "delta-spec file")->required();
  build->add_option("--rect", rect, "i,j,m,n")->required();
  auto* fdot = build->add_flag("--dot", dot, "DOT output");
  build->add_flag("--edges", edge_list, "edge-list output (default)")->excludes(fdot);

  auto* params = app.add_subcommand("params", "print a parameter curve as TSV");
  params->add_option("--spec", spec_file, "delta-spec file")->required();
  params->add_option("--curve", curve, "curve")->required()->check(CLI::IsMember({"n-delta", "m-beta", "n-delta-star"}));
  params->add_option("--max", max_n, "largest n (or number of gaps)")->check(CLI::PositiveNumber);
  params->add_option("--k", k, "factor width for n-delta-star")->check(CLI::PositiveNumber);
  params->add_option("--start", start, "factor start column for n-delta-star")->check(CLI::PositiveNumber);
  params->add_option("--horizon", horizon, "search horizon for n-delta-star")->check(CLI::PositiveNumber);

  auto* expr = app.add_subcommand("expr", "build a linear clique-width expression");
  expr->add_option("--spec", spec_file, "delta-spec file")->required();
  expr->add_option("--method", method, "construction")->required()->check(CLI::IsMember({"block", "two-row", "panel"}));
  expr->add_option("--rect", rect, "target rectangle i,j,m,n");
  expr->add_option("--target", target, "target vertex set as an edge-list file");
  expr->add_option("--J", J, "two-row: columns with letters 2/3 (default: alpha prefix length)");
  expr->add_option("--k", k, "panel: factor width")->check(CLI::PositiveNumber);
  expr->add_option("--start", start, "panel: factor start column")->check(CLI::PositiveNumber);
  expr->add_option("--max-gap", max_gap, "panel: largest allowed gap between factor copies")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "check that an expression builds the target");
  verify->add_option("--spec", spec_file, "delta-spec file")->required();
  verify->add_option("--expr", expr_file, "expression file (tree or linear)")->required();
  verify->add_option("--rect", rect, "target rectangle i,j,m,n");
  verify->add_option("--target", target, "target vertex set as an edge-list file");

  auto* audit = app.add_subcommand("audit", "label audit at the lowest full-column union");
  audit->add_option("--spec", spec_file, "delta-spec file")->required();
  audit->add_option("--expr", expr_file, "expression file (tree or linear)")->required();
  audit->add_option("--square", square, "side of the square H(n,n)")->required()->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle", "exact clique-width of a small graph");
  oracle->add_option("--edges", edges_file, "edge-list file")->required();
  oracle->add_option("--max-k", max_k, "largest width tried")->check(CLI::Range(1, 4));
  oracle->add_flag("--linear", linear, "linear clique-width");

  auto* cat = app.add_subcommand("catalog", "list catalog entries or print one spec");
  cat->add_option("--name", name, "entry name");

  auto* cls = app.add_subcommand("classify", "classification report for a spec");
  cls->add_option("--spec", spec_file, "delta-spec file")->required();
  cls->add_option("--depth", depth, "probe depth")->check(CLI::Range(4, 2000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? Ok : Input;
  }

  try {
    if (*cat) {
      if (name.empty()) {
        for (const auto& e : catalog())
          std::cout << e.name << "\ttable " << e.table << " row " << e.row << "\t" << e.provenance << "\n";
      } else {
        std::cout << catalog_entry(name).text;
      }
      return Ok;
    }
    if (*oracle) {
      auto g = parse_edge_list(read_text_file(edges_file));
      auto r = exact_cwd(g.graph, g.vertices, max_k, linear);
      if (!r) {
        std::cout << "width > " << max_k << "\n";
        return Ok;
      }
      std::cout << "# width " << r->width << (linear ? " (linear)" : "") << "\n" << to_text(r->witness) << "\n";
      return Ok;
    }

    auto d = load_delta_spec(spec_file);
    if (*build) {
      auto r = parse_rect(rect);
      auto g = GridGraph::rectangle(d, r[0], r[1], r[2], r[3]);
      std::cout << (dot ? to_dot(g) : to_edge_list(g));
      return Ok;
    }
    if (*params) {
      Curve c;
      if (curve == "n-delta")
        c = n_delta_curve(d, max_n);
      else if (curve == "m-beta")
        c = m_beta_curve(d.beta, max_n);
      else
        c = n_delta_star(d, extract_k_factor(d, start, k), max_n, horizon).curve;
      std::cout << c.tsv();
      return Ok;
    }
    if (*expr) {
      if (method == "block") {
        if (rect.empty())
          throw InputError("block method needs --rect");
        auto r = parse_rect(rect);
        auto b = build_rectangular_block(d, r[0], r[1], r[2], r[3]);
        print_linear(b.expr, b.budget);
        return Ok;
      }
      auto G = load_target(d, rect, target);
      if (method == "two-row") {
        int j = J >= 0 ? J : static_cast<int>(d.alpha.prefix().size());
        auto b = build_bounded_two_row(d, G, j);
        print_linear(b.expr, b.budget);
        return Ok;
      }
      PanelOptions opt;
      if (max_gap > 0)
        opt.max_gap = max_gap;
      auto b = build_panel_expression(d, G, extract_k_factor(d, start, k), opt);
      print_linear(b.expr, b.budget);
      return Ok;
    }
    if (*verify) {
      auto G = load_target(d, rect, target);
      auto v = validate_against(load_expression(expr_file), G);
      for (auto [a, b] : v.missing)
        std::cout << "missing " << a.id() << " " << b.id() << "\n";
      for (auto [a, b] : v.extra)
        std::cout << "extra " << a.id() << " " << b.id() << "\n";
      std::cout << (v.ok ? "valid" : "invalid") << "\n";
      return v.ok ? Ok : False;
    }
    if (*audit) {
      auto H = GridGraph::rectangle(d, 1, 1, square, square);
      auto rep = audit_expression(load_expression(expr_file), H);
      std::cout << rep.text(H);
      return rep.holds ? Ok : False;
    }
    if (*cls) {
      std::cout << classify(d, depth).text();
      return Ok;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Input;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Budget;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return Invariant;
  }
  return Ok;
}
