#pragma once

#include "delta_spec.hpp"
#include "neighbourhood.hpp"

#include <string>
#include <vector>

namespace gridcw {

enum class Verdict { Yes, No, NoEvidence, Undecidable };

inline std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::Yes:
    return "yes";
  case Verdict::No:
    return "no";
  case Verdict::NoEvidence:
    return "no-evidence";
  case Verdict::Undecidable:
    return "undecidable-for-spec-kind";
  }
  return "?";
}

struct ClassificationReport {
  bool eventually01 = false;
  int last23 = 0;  // J: last alpha index holding 2 or 3 (0 if none); meaningful when eventually01
  std::vector<int> m23_counts;  // m23(n) for n = 1..probe_depth
  Verdict recurrent = Verdict::Undecidable;
  std::string recurrent_evidence;
  Verdict in_delta = Verdict::NoEvidence;
  std::string in_delta_evidence;
  Verdict in_delta_min = Verdict::NoEvidence;
  std::vector<std::string> in_delta_min_evidence;
  Curve n_curve;
  Curve m_curve;

  std::string text() const {
    std::string s;
    s += "eventually01: " + std::string(eventually01 ? "yes" : "no");
    if (eventually01)
      s += " (J=" + std::to_string(last23) + ")";
    s += "\n";
    s += "m23(" + std::to_string(m23_counts.size()) + "): " +
         std::to_string(m23_counts.empty() ? 0 : m23_counts.back()) + "\n";
    s += "recurrent: " + to_string(recurrent) + " (" + recurrent_evidence + ")\n";
    s += "in-Delta: " + to_string(in_delta) + " (" + in_delta_evidence + ")\n";
    s += "in-Delta-min: " + to_string(in_delta_min) + "\n";
    for (const auto& e : in_delta_min_evidence)
      s += "  " + e + "\n";
    s += "N curve: " + n_curve.sparkline() + "\n";
    s += "M curve: " + m_curve.sparkline() + "\n";
    return s;
  }
};

inline bool has_23(const std::vector<int>& w) {
  for (int c : w)
    if (c >= 2)
      return true;
  return false;
}

inline ClassificationReport classify(const DeltaSpec& d, int probe_depth) {
  if (probe_depth < 4)
    throw InputError("probe depth must be >= 4");
  ClassificationReport r;

  r.eventually01 = !has_23(d.alpha.period());
  if (r.eventually01) {
    const auto& p = d.alpha.prefix();
    for (int i = static_cast<int>(p.size()); i >= 1; --i)
      if (p[static_cast<std::size_t>(i - 1)] >= 2) {
        r.last23 = i;
        break;
      }
  }
  for (int n = 1; n <= probe_depth; ++n)
    r.m23_counts.push_back(m23(d, n));

  auto rec = decide_recurrence(d);
  r.recurrent = rec.recurrent ? Verdict::Yes : Verdict::No;
  r.recurrent_evidence = rec.reason;
  if (!rec.recurrent)
    r.recurrent_evidence += "; witness factor at column " + std::to_string(rec.witness_start) +
                            " of width " + std::to_string(rec.witness_width);

  r.n_curve = n_delta_curve(d, probe_depth);
  r.m_curve = m_beta_curve(d.beta, probe_depth);
  int half = r.n_curve.points[static_cast<std::size_t>((probe_depth + 1) / 2 - 1)].second;
  int full = r.n_curve.points.back().second;
  if (!r.eventually01) {
    r.in_delta = Verdict::Yes;
    r.in_delta_evidence = "alpha period contains 2 or 3";
  } else if (full >= half + 2) {
    r.in_delta = Verdict::Yes;
    r.in_delta_evidence = "probe: N([1," + std::to_string(probe_depth) + "]) = " + std::to_string(full) +
                          " grew by >= 2 over the second half of the probe (evidence, not proof)";
  } else {
    r.in_delta = Verdict::NoEvidence;
    r.in_delta_evidence = "probe: N([1," + std::to_string(probe_depth) + "]) = " + std::to_string(full) +
                          ", no growth over the second half";
  }

  r.in_delta_min_evidence.push_back("recurrent: " + to_string(r.recurrent));
  bool m_bounded_kind = true;  // every supported bond kind has bounded M
  r.in_delta_min_evidence.push_back("M bounded: yes (bond kind " + d.beta.text() + "), curve max " +
                                    std::to_string(r.m_curve.max_value()) + " up to n=" +
                                    std::to_string(probe_depth));
  if (r.recurrent == Verdict::Yes)
    r.in_delta_min_evidence.push_back(
        "gap N bounded: yes (purely periodic, so every gap between factor copies has bounded length)");
  else
    r.in_delta_min_evidence.push_back("gap N bounded: not established (not recurrent)");
  r.in_delta_min_evidence.push_back("in-Delta: " + to_string(r.in_delta));

  if (r.recurrent == Verdict::No)
    r.in_delta_min = Verdict::No;
  else if (r.in_delta == Verdict::Yes && m_bounded_kind)
    r.in_delta_min = Verdict::Yes;
  else
    r.in_delta_min = Verdict::NoEvidence;
  return r;
}

} // namespace gridcw
