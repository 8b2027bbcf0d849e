#pragma once

#include "errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <iterator>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gridcw {

// An infinite word given as prefix followed by a repeating period.
// Letters are 1-indexed.
class WordSource {
public:
  WordSource() : period_{0}, max_letter_(1) {}
  WordSource(std::vector<int> prefix, std::vector<int> period, int max_letter)
      : prefix_(std::move(prefix)), period_(std::move(period)), max_letter_(max_letter) {
    if (period_.empty())
      throw InputError("word period must be non-empty");
    for (int c : prefix_)
      check_letter(c);
    for (int c : period_)
      check_letter(c);
  }

  static WordSource periodic(const std::string& period, int max_letter) {
    return WordSource({}, digits(period, max_letter), max_letter);
  }
  static WordSource from_strings(const std::string& prefix, const std::string& period,
                                 int max_letter) {
    return WordSource(digits(prefix, max_letter), digits(period, max_letter), max_letter);
  }

  int letter(int i) const {
    if (i < 1)
      throw InputError("word index must be >= 1, got " + std::to_string(i));
    int p = static_cast<int>(prefix_.size());
    if (i <= p)
      return prefix_[i - 1];
    return period_[static_cast<std::size_t>((i - p - 1) % static_cast<int>(period_.size()))];
  }

  const std::vector<int>& prefix() const { return prefix_; }
  const std::vector<int>& period() const { return period_; }
  int max_letter() const { return max_letter_; }

  std::string prefix_text() const { return join(prefix_); }
  std::string period_text() const { return join(period_); }

  bool operator==(const WordSource&) const = default;

  static std::vector<int> digits(const std::string& s, int max_letter) {
    std::vector<int> out;
    for (char ch : s) {
      if (ch < '0' || ch > '9')
        throw InputError(std::string("not a digit: '") + ch + "'");
      int c = ch - '0';
      if (c > max_letter)
        throw InputError("letter " + std::to_string(c) + " outside alphabet {0.." +
                         std::to_string(max_letter) + "}");
      out.push_back(c);
    }
    return out;
  }

private:
  void check_letter(int c) const {
    if (c < 0 || c > max_letter_)
      throw InputError("letter " + std::to_string(c) + " outside alphabet {0.." +
                       std::to_string(max_letter_) + "}");
  }
  static std::string join(const std::vector<int>& w) {
    std::string s;
    for (int c : w)
      s.push_back(static_cast<char>('0' + c));
    return s;
  }

  std::vector<int> prefix_;
  std::vector<int> period_;
  int max_letter_;
};

enum class BondKind { Empty, Explicit, Offset, Range, ParityOddDiff, ParityEvenDiff, Bichain, Split, Star };

// A symmetric set of column pairs at distance > 1.
class BondSource {
public:
  BondSource() = default;

  static BondSource empty() { return {}; }
  static BondSource explicit_pairs(const std::vector<std::pair<int, int>>& pairs) {
    BondSource b;
    b.kind_ = BondKind::Explicit;
    for (auto [x, y] : pairs) {
      if (x < 1 || y < 1)
        throw InputError("bond columns must be >= 1");
      if (std::abs(x - y) <= 1)
        throw InputError("bond (" + std::to_string(x) + "," + std::to_string(y) +
                         ") joins columns at distance <= 1");
      b.pairs_.insert({std::min(x, y), std::max(x, y)});
    }
    return b;
  }
  static BondSource offset(int d) {
    if (d <= 1)
      throw InputError("offset bond needs d > 1");
    return rule(BondKind::Offset, d);
  }
  static BondSource range(int n) {
    if (n <= 1)
      throw InputError("range bond needs n > 1");
    return rule(BondKind::Range, n);
  }
  static BondSource parity_odd_diff() { return rule(BondKind::ParityOddDiff, 0); }
  static BondSource parity_even_diff() { return rule(BondKind::ParityEvenDiff, 0); }
  static BondSource bichain() { return rule(BondKind::Bichain, 0); }
  static BondSource split() { return rule(BondKind::Split, 0); }
  static BondSource star(int c) {
    if (c < 1)
      throw InputError("star bond needs c >= 1");
    return rule(BondKind::Star, c);
  }

  BondKind kind() const { return kind_; }
  int parameter() const { return param_; }
  const std::set<std::pair<int, int>>& pairs() const { return pairs_; }

  bool contains(int x, int y) const {
    if (x < 1 || y < 1)
      return false;
    int lo = std::min(x, y), hi = std::max(x, y), d = hi - lo;
    if (d <= 1)
      return false;
    switch (kind_) {
    case BondKind::Empty:
      return false;
    case BondKind::Explicit:
      return pairs_.count({lo, hi}) != 0;
    case BondKind::Offset:
      return d == param_;
    case BondKind::Range:
      return d <= param_;
    case BondKind::ParityOddDiff:
      return d % 2 == 1;
    case BondKind::ParityEvenDiff:
      return d % 2 == 0;
    case BondKind::Bichain:
      return lo % 2 == 0 && d % 2 == 1;
    case BondKind::Split:
      return lo % 2 == 0;
    case BondKind::Star:
      return lo == param_ || hi == param_;
    }
    return false;
  }

  bool is_empty() const {
    return kind_ == BondKind::Empty || (kind_ == BondKind::Explicit && pairs_.empty());
  }

  // Shift s such that contains(x,y) == contains(x+s,y+s) for all x,y >= 1,
  // or nullopt when no such shift exists.
  std::optional<int> shift_period() const {
    switch (kind_) {
    case BondKind::Empty:
    case BondKind::Offset:
    case BondKind::Range:
    case BondKind::ParityOddDiff:
    case BondKind::ParityEvenDiff:
      return 1;
    case BondKind::Bichain:
    case BondKind::Split:
      return 2;
    case BondKind::Explicit:
      if (pairs_.empty())
        return 1;
      return std::nullopt;
    case BondKind::Star:
      return std::nullopt;
    }
    return std::nullopt;
  }

  // Largest column mentioned by an explicit bond set (0 otherwise).
  int max_explicit_column() const { return pairs_.empty() ? 0 : std::prev(pairs_.end())->second; }

  std::string text() const {
    switch (kind_) {
    case BondKind::Empty:
      return "empty";
    case BondKind::Explicit: {
      std::string s = "explicit";
      bool first = true;
      for (auto [x, y] : pairs_) {
        s += first ? " " : ";";
        s += "(" + std::to_string(x) + "," + std::to_string(y) + ")";
        first = false;
      }
      return s;
    }
    case BondKind::Offset:
      return "offset d=" + std::to_string(param_);
    case BondKind::Range:
      return "range n=" + std::to_string(param_);
    case BondKind::ParityOddDiff:
      return "parity-odd-diff";
    case BondKind::ParityEvenDiff:
      return "parity-even-diff";
    case BondKind::Bichain:
      return "table1-bichain";
    case BondKind::Split:
      return "table1-split";
    case BondKind::Star:
      return "star c=" + std::to_string(param_);
    }
    return "empty";
  }

  bool operator==(const BondSource&) const = default;

private:
  static BondSource rule(BondKind k, int p) {
    BondSource b;
    b.kind_ = k;
    b.param_ = p;
    return b;
  }

  BondKind kind_ = BondKind::Empty;
  int param_ = 0;
  std::set<std::pair<int, int>> pairs_;
};

struct DeltaSpec {
  WordSource alpha{{}, {0}, 3};
  WordSource gamma{{}, {0}, 1};
  BondSource beta;
  std::string name;

  static DeltaSpec make(const std::string& alpha_period, BondSource beta,
                        const std::string& gamma_period, std::string name = {}) {
    DeltaSpec d;
    d.alpha = WordSource::periodic(alpha_period, 3);
    d.gamma = WordSource::periodic(gamma_period, 1);
    d.beta = std::move(beta);
    d.name = std::move(name);
    return d;
  }

  bool operator==(const DeltaSpec&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline int parse_int(const std::string& s, std::size_t pos) {
  if (s.empty())
    throw ParseError("expected integer", pos);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad integer '" + s + "'", pos);
  }
  if (used != s.size())
    throw ParseError("bad integer '" + s + "'", pos);
  return v;
}

// Reads "key=value" and returns value.
inline std::string keyed(const std::string& tok, const std::string& key, std::size_t pos) {
  if (tok.rfind(key + "=", 0) != 0)
    throw ParseError("expected '" + key + "=...', got '" + tok + "'", pos);
  return tok.substr(key.size() + 1);
}

inline WordSource parse_word(const std::string& rest, int max_letter, std::size_t pos) {
  std::istringstream in(rest);
  std::string a, b, extra;
  in >> a >> b;
  if (in >> extra)
    throw ParseError("trailing text '" + extra + "'", pos);
  std::string prefix, period;
  if (b.empty()) {
    period = keyed(a, "period", pos);
  } else {
    prefix = keyed(a, "prefix", pos);
    period = keyed(b, "period", pos);
  }
  try {
    return WordSource::from_strings(prefix, period, max_letter);
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), pos);
  }
}

inline BondSource parse_bonds(const std::string& rest, std::size_t pos) {
  std::istringstream in(rest);
  std::string kind;
  in >> kind;
  std::string tail;
  std::getline(in, tail);
  tail = trim(tail);
  try {
    if (kind == "empty" || kind.empty()) {
      if (!tail.empty())
        throw ParseError("unexpected text after 'empty'", pos);
      return BondSource::empty();
    }
    if (kind == "explicit") {
      std::vector<std::pair<int, int>> pairs;
      std::string compact;
      for (char ch : tail)
        if (ch != ' ' && ch != '\t')
          compact.push_back(ch);
      std::size_t i = 0;
      while (i < compact.size()) {
        if (compact[i] != '(')
          throw ParseError("expected '(' in explicit bond list", pos);
        auto close = compact.find(')', i);
        auto comma = compact.find(',', i);
        if (close == std::string::npos || comma == std::string::npos || comma > close)
          throw ParseError("malformed bond pair", pos);
        int x = parse_int(compact.substr(i + 1, comma - i - 1), pos);
        int y = parse_int(compact.substr(comma + 1, close - comma - 1), pos);
        pairs.emplace_back(x, y);
        i = close + 1;
        if (i < compact.size()) {
          if (compact[i] != ';')
            throw ParseError("expected ';' between bond pairs", pos);
          ++i;
        }
      }
      return BondSource::explicit_pairs(pairs);
    }
    if (kind == "offset")
      return BondSource::offset(parse_int(keyed(tail, "d", pos), pos));
    if (kind == "range")
      return BondSource::range(parse_int(keyed(tail, "n", pos), pos));
    if (kind == "star")
      return BondSource::star(parse_int(keyed(tail, "c", pos), pos));
    BondSource b;
    if (kind == "parity-odd-diff")
      b = BondSource::parity_odd_diff();
    else if (kind == "parity-even-diff")
      b = BondSource::parity_even_diff();
    else if (kind == "table1-bichain")
      b = BondSource::bichain();
    else if (kind == "table1-split")
      b = BondSource::split();
    else
      throw ParseError("unknown bond kind '" + kind + "'", pos);
    if (!tail.empty())
      throw ParseError("unexpected text after '" + kind + "'", pos);
    return b;
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), pos);
  }
}

} // namespace detail

inline DeltaSpec parse_delta_spec(const std::string& text) {
  DeltaSpec d;
  bool seen_alpha = false, seen_gamma = false, seen_beta = false, seen_name = false;
  std::size_t offset = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::size_t pos = offset;
    offset += raw.size() + 1;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos)
      line = line.substr(0, h);
    line = detail::trim(line);
    if (line.empty())
      continue;
    auto sp = line.find_first_of(" \t");
    std::string key = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? std::string{} : detail::trim(line.substr(sp));
    auto once = [&](bool& seen) {
      if (seen)
        throw ParseError("duplicate '" + key + "' line", pos);
      seen = true;
    };
    if (key == "alpha") {
      once(seen_alpha);
      d.alpha = detail::parse_word(rest, 3, pos);
    } else if (key == "gamma") {
      once(seen_gamma);
      d.gamma = detail::parse_word(rest, 1, pos);
    } else if (key == "beta") {
      once(seen_beta);
      d.beta = detail::parse_bonds(rest, pos);
    } else if (key == "name") {
      once(seen_name);
      d.name = rest;
    } else {
      throw ParseError("unknown keyword '" + key + "'", pos);
    }
  }
  if (!seen_alpha)
    throw ParseError("missing 'alpha' line", offset);
  if (!seen_gamma)
    throw ParseError("missing 'gamma' line", offset);
  return d;
}

inline std::string to_text(const DeltaSpec& d) {
  std::string s;
  if (!d.name.empty())
    s += "name " + d.name + "\n";
  s += "alpha prefix=" + d.alpha.prefix_text() + " period=" + d.alpha.period_text() + "\n";
  s += "beta " + d.beta.text() + "\n";
  s += "gamma prefix=" + d.gamma.prefix_text() + " period=" + d.gamma.period_text() + "\n";
  return s;
}

// Replaces every 1 by 0 and every 3 by 2 in the alpha word.
inline DeltaSpec alpha_plus(const DeltaSpec& d) {
  auto lift = [](std::vector<int> w) {
    for (int& c : w)
      if (c == 1 || c == 3)
        c -= 1;
    return w;
  };
  DeltaSpec out = d;
  out.alpha = WordSource(lift(d.alpha.prefix()), lift(d.alpha.period()), 3);
  return out;
}

// The restriction of a spec to columns [start, start+width-1], rebased to 0.
struct KFactor {
  int start = 1;
  int width = 0;
  std::vector<int> alpha;                  // width-1 letters
  std::vector<std::pair<int, int>> bonds;  // rebased, a < b, sorted
  std::vector<int> gamma;                  // width letters
};

inline KFactor extract_k_factor(const DeltaSpec& d, int j, int k) {
  if (j < 1)
    throw InputError("factor start must be >= 1");
  if (k < 1)
    throw InputError("factor width must be >= 1");
  KFactor f;
  f.start = j;
  f.width = k;
  for (int i = 0; i < k - 1; ++i)
    f.alpha.push_back(d.alpha.letter(j + i));
  for (int i = 0; i < k; ++i)
    f.gamma.push_back(d.gamma.letter(j + i));
  for (int a = 0; a < k; ++a)
    for (int b = a + 2; b < k; ++b)
      if (d.beta.contains(j + a, j + b))
        f.bonds.emplace_back(a, b);
  return f;
}

inline bool factors_equal(const KFactor& f, const KFactor& g) {
  if (f.width != g.width)
    throw InputError("factor widths differ: " + std::to_string(f.width) + " vs " +
                     std::to_string(g.width));
  return f.alpha == g.alpha && f.gamma == g.gamma && f.bonds == g.bonds;
}

inline bool factor_matches_at(const DeltaSpec& d, const KFactor& f, int j) {
  for (int i = 0; i < f.width - 1; ++i)
    if (d.alpha.letter(j + i) != f.alpha[static_cast<std::size_t>(i)])
      return false;
  for (int i = 0; i < f.width; ++i)
    if (d.gamma.letter(j + i) != f.gamma[static_cast<std::size_t>(i)])
      return false;
  std::size_t next = 0;
  for (int a = 0; a < f.width; ++a)
    for (int b = a + 2; b < f.width; ++b) {
      bool want = next < f.bonds.size() && f.bonds[next] == std::pair<int, int>{a, b};
      if (want)
        ++next;
      if (d.beta.contains(j + a, j + b) != want)
        return false;
    }
  return true;
}

// Smallest j > after with j+k-1 <= horizon where f occurs.
inline std::optional<int> find_next_occurrence(const DeltaSpec& d, const KFactor& f, int after,
                                               int horizon) {
  if (after >= horizon)
    return std::nullopt;
  for (int j = std::max(after + 1, 1); j + f.width - 1 <= horizon; ++j)
    if (factor_matches_at(d, f, j))
      return j;
  return std::nullopt;
}

// Number of letters 2 or 3 among alpha_1..alpha_{n-1}.
inline int m23(const DeltaSpec& d, int n) {
  int c = 0;
  for (int i = 1; i < n; ++i)
    c += d.alpha.letter(i) >= 2;
  return c;
}

struct RecurrenceVerdict {
  bool recurrent = false;
  int witness_start = 0;  // a factor that occurs only finitely often
  int witness_width = 0;
  std::string reason;
};

// Recurrence of a prefix+periodic spec. Such a spec is recurrent exactly when it
// is purely periodic, so it is enough to compare position i with i+L over the prefix.
inline RecurrenceVerdict decide_recurrence(const DeltaSpec& d) {
  RecurrenceVerdict v;
  auto bond_period = d.beta.shift_period();
  if (!bond_period) {
    if (d.beta.kind() == BondKind::Star) {
      v.witness_start = d.beta.parameter();
      v.witness_width = 3;
      v.reason = "column " + std::to_string(d.beta.parameter()) +
                 " is bonded to every column; a window holding such a bond occurs finitely often";
    } else {
      auto last = *std::prev(d.beta.pairs().end());
      v.witness_start = last.first;
      v.witness_width = last.second - last.first + 1;
      v.reason = "finite bond set; the window around its last bond occurs finitely often";
    }
    return v;
  }
  int la = static_cast<int>(d.alpha.period().size());
  int lg = static_cast<int>(d.gamma.period().size());
  int L = std::lcm(std::lcm(la, lg), *bond_period);
  int p0 = static_cast<int>(std::max(d.alpha.prefix().size(), d.gamma.prefix().size()));
  for (int i = 1; i <= p0; ++i) {
    if (d.alpha.letter(i) != d.alpha.letter(i + L) || d.gamma.letter(i) != d.gamma.letter(i + L)) {
      v.witness_start = 1;
      v.witness_width = p0 + L + 1;
      v.reason = "position " + std::to_string(i) + " differs from position " +
                 std::to_string(i + L) + "; the word is not purely periodic";
      return v;
    }
  }
  v.recurrent = true;
  v.reason = "purely periodic with period " + std::to_string(L);
  return v;
}

} // namespace gridcw
