#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sigma/checker.hpp"
#include "sigma/io.hpp"
#include "sigma/net_sum.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

inline nlohmann::ordered_json budget_json(const Budget& b) {
  return {{"max_finite_size", b.max_finite_size},
          {"max_omega_elems", b.max_omega_elems},
          {"max_blocks", b.caps.max_blocks},
          {"max_block_size", b.caps.max_block_size},
          {"max_omega_splits", b.caps.max_omega_splits},
          {"trials", b.trials}};
}

template <class E>
nlohmann::ordered_json witness_json(const Witness<E>& w, const ElementSyntax<E>& syntax) {
  nlohmann::ordered_json out;
  out["family"] = format_family(w.family, syntax);
  if (w.other) out["other"] = format_family(*w.other, syntax);
  if (w.blocks) {
    auto blocks = nlohmann::ordered_json::array();
    for (const auto& [b, m] : w.blocks->entries()) {
      blocks.push_back({{"block", format_family(b, syntax)}, {"multiplicity", m.str()}});
    }
    out["blocks"] = std::move(blocks);
  }
  if (w.element) out["element"] = syntax.format(*w.element);
  if (!w.note.empty()) out["note"] = w.note;
  return out;
}

/// One JSON object per law, in the order the laws were run.
template <class E>
std::vector<nlohmann::ordered_json> report_lines(const LawReport<E>& report, const ElementSyntax<E>& syntax) {
  std::vector<nlohmann::ordered_json> out;
  for (const auto& r : report.laws) {
    nlohmann::ordered_json line;
    line["instance"] = report.instance;
    line["law"] = r.law;
    line["verdict"] = to_string(r.verdict);
    if (r.witness) line["witness"] = witness_json(*r.witness, syntax);
    line["cases"] = r.cases;
    line["budget"] = budget_json(report.budget);
    line["seed"] = report.budget.seed;
    out.push_back(std::move(line));
  }
  return out;
}

inline nlohmann::ordered_json net_verdict_json(const NetVerdict& v) {
  nlohmann::ordered_json out;
  if (const auto* c = std::get_if<Converged>(&v)) {
    out["verdict"] = "converged";
    out["value"] = c->value;
    out["error_bound"] = c->error_bound;
    out["terms"] = c->terms;
  } else if (const auto* d = std::get_if<Diverged>(&v)) {
    out["verdict"] = "diverged";
    out["reason"] = d->reason;
    out["witness"] = {{"sign", d->witness.sign > 0 ? "positive" : "negative"},
                      {"prefix", d->witness.prefix},
                      {"count", d->witness.count},
                      {"sum", d->witness.sum},
                      {"compared_with", "empty subfamily"}};
    out["threshold"] = d->threshold;
    if (!d->checkpoint_sums.empty()) out["checkpoint_sums"] = d->checkpoint_sums;
  } else {
    out["verdict"] = "inconclusive";
    out["terms"] = std::get<Inconclusive>(v).terms;
  }
  return out;
}

}  // namespace sigma
