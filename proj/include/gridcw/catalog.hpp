#pragma once

#include "delta_spec.hpp"
#include "errors.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gridcw {

struct CatalogEntry {
  std::string name;
  int table = 0;  // 1: previously known classes, 2: new examples
  int row = 0;
  std::string text;                 // contents of catalog/<name>.delta
  std::optional<int> m_beta_bound;  // published bound, table 2 only
  std::string provenance;

  DeltaSpec spec() const { return parse_delta_spec(text); }
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"bipartite-permutation", 1, 1, "name bipartite-permutation\nalpha period=2\nbeta empty\ngamma period=0\n",
       std::nullopt, "bipartite permutation graphs"},
      {"unit-interval", 1, 2, "name unit-interval\nalpha period=2\nbeta empty\ngamma period=1\n", std::nullopt,
       "unit interval graphs"},
      {"bichain", 1, 3, "name bichain\nalpha period=23\nbeta table1-bichain\ngamma period=0\n", std::nullopt,
       "bichain graphs, bonds (2x, 2x+2y+1)"},
      {"split-permutation", 1, 4, "name split-permutation\nalpha period=23\nbeta table1-split\ngamma period=01\n",
       std::nullopt, "split permutation graphs, bonds (2x, y) with y > 2x+1"},
      {"periodic-01", 1, 5, "name periodic-01\nalpha period=01\nbeta empty\ngamma period=0\n", std::nullopt,
       "representative of the periodic alpha over {0,1} family"},
      {"recurrent-0123", 1, 6, "name recurrent-0123\nalpha period=0123\nbeta empty\ngamma period=0\n", std::nullopt,
       "representative of the recurrent alpha over {0,1,2,3} family"},
      {"example-1", 2, 1, "name example-1\nalpha period=0\nbeta empty\ngamma period=1\n", 1, "new example 1"},
      {"example-2", 2, 2, "name example-2\nalpha period=1\nbeta star c=1\ngamma period=0\n", 2,
       "new example 2, bonds (1, x+2)"},
      {"example-3", 2, 3, "name example-3\nalpha period=23\nbeta offset d=2\ngamma period=0\n", 3,
       "new example 3, bonds (x, x+2)"},
      {"example-4", 2, 4, "name example-4\nalpha period=0\nbeta parity-odd-diff\ngamma period=0\n", 3,
       "new example 4, bonds with |x-y| != 1 and x-y odd"},
      {"example-5", 2, 5, "name example-5\nalpha period=1\nbeta parity-even-diff\ngamma period=1\n", 2,
       "new example 5, bonds with x != y and x-y even"},
      {"example-6", 2, 6, "name example-6\nalpha period=2\nbeta range n=4\ngamma period=0\n", 4,
       "new example 6, bonds with 1 < |x-y| <= 4"},
  };
  return entries;
}

inline const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name)
      return e;
  throw InputError("no catalog entry named '" + name + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline DeltaSpec load_delta_spec(const std::string& path) { return parse_delta_spec(read_text_file(path)); }

} // namespace gridcw
