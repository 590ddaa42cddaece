#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sigma/family.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

enum class Verdict { pass, fail, truncated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::truncated: return "truncated";
  }
  return "?";
}

/// Everything needed to replay a law violation with direct sum calls.
template <class E>
struct Witness {
  Family<E> family;
  /// Companion family: the offending subfamily, the stripped or padded
  /// family, the inverse image, ...
  std::optional<Family<E>> other;
  std::optional<Family<Family<E>>> blocks;
  std::optional<E> element;
  std::string note;

  friend bool operator==(const Witness&, const Witness&) = default;
};

template <class E>
struct LawResult {
  std::string law;
  Verdict verdict = Verdict::pass;
  std::optional<Witness<E>> witness;
  /// Individual implications evaluated (family × partition, family ×
  /// subfamily, ...).
  std::size_t cases = 0;
};

template <class E>
struct LawReport {
  std::string instance;
  Budget budget;
  std::vector<LawResult<E>> laws;
  /// Flavors whose laws were all run and none failed, in the order weak,
  /// strong, ft, group.
  std::vector<Flavor> satisfied;

  const LawResult<E>* find(const std::string& law) const {
    for (const auto& r : laws) {
      if (r.law == law) return &r;
    }
    return nullptr;
  }
  bool satisfies(Flavor f) const { return std::find(satisfied.begin(), satisfied.end(), f) != satisfied.end(); }
  bool any_failure() const {
    return std::any_of(laws.begin(), laws.end(), [](const auto& r) { return r.verdict == Verdict::fail; });
  }
};

namespace laws {

inline const std::vector<std::string>& weak() {
  static const std::vector<std::string> v{"singleton", "neutral", "bracketing", "flattening"};
  return v;
}
inline const std::vector<std::string>& strong() {
  static const std::vector<std::string> v{"subsummability", "strong_bracketing", "strong_flattening",
                                          "zero_sum_all_zero"};
  return v;
}
inline const std::vector<std::string>& finitely_total() {
  static const std::vector<std::string> v{"finite_totality"};
  return v;
}
inline const std::vector<std::string>& group() {
  static const std::vector<std::string> v{"inverses", "inversion_hom", "inverse_cancellation"};
  return v;
}

/// Laws that make up a flavor, including the laws of the flavors below it.
inline std::vector<std::string> for_flavor(Flavor f) {
  std::vector<std::string> out = weak();
  auto append = [&](const std::vector<std::string>& more) { out.insert(out.end(), more.begin(), more.end()); };
  switch (f) {
    case Flavor::weak: break;
    case Flavor::strong: append(strong()); break;
    case Flavor::finitely_total: append(finitely_total()); break;
    case Flavor::sigma_group:
      append(finitely_total());
      append(group());
      break;
  }
  return out;
}

}  // namespace laws

namespace detail {

template <class E>
struct ProbeOutcome {
  std::optional<Witness<E>> violation;
  bool truncated = false;
  std::size_t cases = 0;
};

template <class E>
using Probe = std::function<ProbeOutcome<E>(const Family<E>&)>;

/// The family {Σ x_j} of block sums, or nullopt when some block is not
/// summable.
template <class E>
std::optional<Family<E>> block_sums(const SigmaInstance<E>& X, const Family<Family<E>>& blocks) {
  Family<E> out;
  for (const auto& [block, m] : blocks.entries()) {
    auto s = X.sum_unchecked(block);
    if (!s) return std::nullopt;
    out.add(*s, m);
  }
  return out;
}

template <class E>
Probe<E> singleton_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    if (!f.is_finite() || f.finite_size() != 1) return out;
    out.cases = 1;
    const E& x = f.finite_part().begin()->first;
    if (X.sum_unchecked(f) != SumResult<E>(x)) out.violation = Witness<E>{f, std::nullopt, std::nullopt, x, ""};
    return out;
  };
}

template <class E>
Probe<E> neutral_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    out.cases = 1;
    if (f.empty()) {
      if (X.sum_unchecked(f) != SumResult<E>(X.zero())) {
        out.violation = Witness<E>{f, std::nullopt, std::nullopt, std::nullopt, "empty family does not sum to zero"};
      }
      return out;
    }
    if (!X.sum_unchecked(f)) return out;
    Family<E> stripped = strip_zeros(X, f);
    if (!X.sum_unchecked(stripped)) {
      out.violation = Witness<E>{f, stripped, std::nullopt, std::nullopt, "nonzero part not summable"};
    }
    return out;
  };
}

/// Σx ≃ v ⟹ Σ{Σx_j} ≃ v over partitions of the given shape.
template <class E>
Probe<E> bracketing_probe(const SigmaInstance<E>& X, PartitionShape shape, PartitionCaps caps) {
  return [X, shape, caps](const Family<E>& f) {
    ProbeOutcome<E> out;
    const auto total = X.sum_unchecked(f);
    if (!total) return out;
    auto parts = enumerate_partitions(f, shape, caps);
    out.truncated = parts.truncated;
    for (const auto& p : parts.partitions) {
      auto sums = block_sums(X, p.blocks);
      if (!sums) continue;
      ++out.cases;
      if (X.sum_unchecked(*sums) != total) {
        out.violation = Witness<E>{f, *sums, p.blocks, std::nullopt, ""};
        return out;
      }
    }
    return out;
  };
}

/// Σ{Σx_j} ≃ v ⟹ Σx ≃ v over partitions of the given shape.
template <class E>
Probe<E> flattening_probe(const SigmaInstance<E>& X, PartitionShape shape, PartitionCaps caps) {
  return [X, shape, caps](const Family<E>& f) {
    ProbeOutcome<E> out;
    auto parts = enumerate_partitions(f, shape, caps);
    out.truncated = parts.truncated;
    std::optional<SumResult<E>> total;
    for (const auto& p : parts.partitions) {
      auto sums = block_sums(X, p.blocks);
      if (!sums) continue;
      auto outer = X.sum_unchecked(*sums);
      if (!outer) continue;
      ++out.cases;
      if (!total) total = X.sum_unchecked(f);
      if (*total != outer) {
        out.violation = Witness<E>{f, *sums, p.blocks, std::nullopt, ""};
        return out;
      }
    }
    return out;
  };
}

template <class E>
Probe<E> subsummability_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    if (!X.sum_unchecked(f)) return out;
    auto subs = enumerate_subfamilies(f);
    out.truncated = subs.truncated;
    for (const auto& g : subs.subfamilies) {
      ++out.cases;
      if (!X.sum_unchecked(g)) {
        out.violation = Witness<E>{f, g, std::nullopt, std::nullopt, "subfamily not summable"};
        return out;
      }
    }
    return out;
  };
}

/// Consequence of strong flattening: a family summing to 0 consists of 0s.
template <class E>
Probe<E> zero_sum_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    out.cases = 1;
    if (X.sum_unchecked(f) != SumResult<E>(X.zero())) return out;
    for (const auto& [e, m] : f.entries()) {
      if (e != X.zero()) {
        out.violation = Witness<E>{f, std::nullopt, std::nullopt, e, "sums to zero with a nonzero element"};
        return out;
      }
    }
    return out;
  };
}

template <class E>
Probe<E> finite_totality_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    if (!f.is_finite()) return out;
    out.cases = 1;
    if (!X.sum_unchecked(f)) out.violation = Witness<E>{f, std::nullopt, std::nullopt, std::nullopt, "finite family not summable"};
    return out;
  };
}

template <class E>
Probe<E> inverses_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    if (!f.is_finite() || f.finite_size() != 1) return out;
    out.cases = 1;
    const E& x = f.finite_part().begin()->first;
    if (!X.inversion()) {
      out.violation = Witness<E>{f, std::nullopt, std::nullopt, x, "no inversion installed"};
      return out;
    }
    const E y = (*X.inversion())(x);
    Family<E> pair = disjoint_union(f, Family<E>{y});
    if (!X.contains(y) || X.sum_unchecked(pair) != SumResult<E>(X.zero())) {
      out.violation = Witness<E>{f, pair, std::nullopt, x, "x + inverse(x) is not zero"};
    }
    return out;
  };
}

template <class E>
Probe<E> inversion_hom_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    if (!X.inversion()) return out;
    const auto s = X.sum_unchecked(f);
    if (!s) return out;
    out.cases = 1;
    const auto& inv = *X.inversion();
    Family<E> image = map_family<E>(inv, f);
    if (X.sum_unchecked(image) != SumResult<E>(inv(*s))) {
      out.violation = Witness<E>{f, image, std::nullopt, std::nullopt, "inversion does not preserve the sum"};
    }
    return out;
  };
}

template <class E>
Probe<E> inverse_cancellation_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    if (!X.inversion() || !X.sum_unchecked(f)) return out;
    out.cases = 1;
    Family<E> both = disjoint_union(f, map_family<E>(*X.inversion(), f));
    if (X.sum_unchecked(both) != SumResult<E>(X.zero())) {
      out.violation = Witness<E>{f, both, std::nullopt, std::nullopt, "x + inverse(x) does not sum to zero"};
    }
    return out;
  };
}

/// Σ(x ⊎ {0:k}) ≃ Σx for k ∈ {1, 2, ω}, and Σ(x without 0s) ≃ Σx.
template <class E>
Probe<E> padding_probe(const SigmaInstance<E>& X) {
  return [X](const Family<E>& f) {
    ProbeOutcome<E> out;
    const auto s = X.sum_unchecked(f);
    if (!s) return out;
    std::vector<Family<E>> variants;
    for (Multiplicity k : {Multiplicity(1), Multiplicity(2), kOmega}) {
      variants.push_back(disjoint_union(f, Family<E>::repeated(X.zero(), k)));
    }
    variants.push_back(strip_zeros(X, f));
    for (const auto& g : variants) {
      ++out.cases;
      if (X.sum_unchecked(g) != s) {
        out.violation = Witness<E>{f, g, std::nullopt, std::nullopt, "zero padding changes the sum"};
        return out;
      }
    }
    return out;
  };
}

template <class E>
Probe<E> probe_for(const std::string& law, const SigmaInstance<E>& X, const Budget& budget) {
  const auto& caps = budget.caps;
  if (law == "singleton") return singleton_probe(X);
  if (law == "neutral") return neutral_probe(X);
  if (law == "bracketing") return bracketing_probe(X, PartitionShape::bracketing, caps);
  if (law == "flattening") return flattening_probe(X, PartitionShape::flattening, caps);
  if (law == "subsummability") return subsummability_probe(X);
  if (law == "strong_bracketing") return bracketing_probe(X, PartitionShape::unconstrained, caps);
  if (law == "strong_flattening") return flattening_probe(X, PartitionShape::unconstrained, caps);
  if (law == "zero_sum_all_zero") return zero_sum_probe(X);
  if (law == "finite_totality") return finite_totality_probe(X);
  if (law == "inverses") return inverses_probe(X);
  if (law == "inversion_hom") return inversion_hom_probe(X);
  if (law == "inverse_cancellation") return inverse_cancellation_probe(X);
  if (law == "padding") return padding_probe(X);
  throw InputError("unknown law '" + law + "'");
}

/// Uniform draw in [0, n) from raw 64-bit output; unlike the standard
/// distributions its result is the same on every standard library.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

/// Families just beyond the exhaustive region: finite size max+1 or max+2,
/// occasionally with one ω entry.
template <class E>
std::vector<Family<E>> random_families(const std::vector<E>& samples, const Budget& budget) {
  std::vector<Family<E>> out;
  if (samples.empty()) return out;
  std::mt19937_64 rng(budget.seed);
  for (std::size_t t = 0; t < budget.trials; ++t) {
    Family<E> f;
    const std::size_t size = budget.max_finite_size + 1 + bounded(rng, 2);
    for (std::size_t i = 0; i < size; ++i) f.add(samples[bounded(rng, samples.size())], 1);
    if (budget.max_omega_elems > 0 && bounded(rng, 3) == 0) f.add(samples[bounded(rng, samples.size())], kOmega);
    out.push_back(std::move(f));
  }
  return out;
}

/// One-step simplifications of a family, smallest first.
template <class E>
std::vector<Family<E>> shrink_candidates(const Family<E>& f) {
  std::vector<Family<E>> out;
  for (const auto& [e, m] : f.entries()) {
    if (m.is_omega()) {
      out.push_back(f.without(e));
      out.push_back(Family<E>(f.without(e)).add(e, 1));
      out.push_back(Family<E>(f.without(e)).add(e, 2));
    } else {
      Family<E> g = f.without(e);
      g.add(e, m.finite() - 1);
      out.push_back(std::move(g));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class E>
Witness<E> shrink(const Probe<E>& probe, Witness<E> w) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& g : shrink_candidates(w.family)) {
      auto outcome = probe(g);
      if (outcome.violation) {
        w = std::move(*outcome.violation);
        progress = true;
        break;
      }
    }
  }
  return w;
}

template <class E>
LawResult<E> run_law(const std::string& law, const SigmaInstance<E>& X, const Budget& budget,
                     const std::vector<Family<E>>& exhaustive, const std::vector<Family<E>>& random) {
  LawResult<E> result;
  result.law = law;
  const Probe<E> probe = probe_for(law, X, budget);
  bool truncated = false;
  for (const auto& f : exhaustive) {
    auto outcome = probe(f);
    result.cases += outcome.cases;
    truncated = truncated || outcome.truncated;
    if (outcome.violation) {
      result.verdict = Verdict::fail;
      result.witness = std::move(outcome.violation);
      return result;
    }
  }
  for (const auto& f : random) {
    auto outcome = probe(f);
    result.cases += outcome.cases;
    truncated = truncated || outcome.truncated;
    if (outcome.violation) {
      result.verdict = Verdict::fail;
      result.witness = shrink(probe, std::move(*outcome.violation));
      return result;
    }
  }
  result.verdict = truncated ? Verdict::truncated : Verdict::pass;
  return result;
}

}  // namespace detail

/// Runs the named laws against `X`. Families are visited in enumeration
/// order, so the witness of a failure found exhaustively is the first
/// violating family; failures found by random trials are shrunk.
template <class E>
LawReport<E> check_laws(const SigmaInstance<E>& X, const std::vector<std::string>& law_names, const Budget& budget) {
  LawReport<E> report;
  report.instance = X.name();
  report.budget = budget;
  const auto exhaustive = budget_families(X, budget);
  const auto random = detail::random_families(X.carrier().samples(), budget);
  for (const auto& law : law_names) report.laws.push_back(detail::run_law(law, X, budget, exhaustive, random));

  for (Flavor f : {Flavor::weak, Flavor::strong, Flavor::finitely_total, Flavor::sigma_group}) {
    bool ok = true;
    for (const auto& law : laws::for_flavor(f)) {
      const auto* r = report.find(law);
      ok = ok && r && r->verdict != Verdict::fail;
    }
    if (ok) report.satisfied.push_back(f);
  }
  return report;
}

template <class E>
LawReport<E> check_weak(const SigmaInstance<E>& X, const Budget& budget) {
  return check_laws(X, laws::for_flavor(Flavor::weak), budget);
}

template <class E>
LawReport<E> check_strong(const SigmaInstance<E>& X, const Budget& budget) {
  return check_laws(X, laws::for_flavor(Flavor::strong), budget);
}

/// Weak laws plus finite totality; the group laws are added when `X` has an
/// inversion installed.
template <class E>
LawReport<E> check_ft_and_group(const SigmaInstance<E>& X, const Budget& budget) {
  return check_laws(X, laws::for_flavor(X.inversion() ? Flavor::sigma_group : Flavor::finitely_total), budget);
}

template <class E>
LawReport<E> check_flavor(const SigmaInstance<E>& X, Flavor flavor, const Budget& budget) {
  return check_laws(X, laws::for_flavor(flavor), budget);
}

/// Neutral-element padding over every family in the budget.
template <class E>
LawResult<E> check_padding(const SigmaInstance<E>& X, const Budget& budget) {
  return detail::run_law<E>("padding", X, budget, budget_families(X, budget), {});
}

/// Re-evaluates a reported witness with direct sum calls; true iff it still
/// demonstrates a violation of `law`.
template <class E>
bool replay(const SigmaInstance<E>& X, const std::string& law, const Witness<E>& w) {
  const auto& f = w.family;
  const auto s = X.sum(f);
  if (law == "singleton") return w.element && s != SumResult<E>(*w.element);
  if (law == "neutral") {
    if (f.empty()) return s != SumResult<E>(X.zero());
    return s && w.other && *w.other == strip_zeros(X, f) && !X.sum(*w.other);
  }
  if (law == "bracketing" || law == "strong_bracketing" || law == "flattening" || law == "strong_flattening") {
    if (!w.blocks || recombine(*w.blocks) != f) return false;
    auto sums = detail::block_sums(X, *w.blocks);
    if (!sums) return false;
    const auto outer = X.sum(*sums);
    const bool bracketing = law.find("bracketing") != std::string::npos;
    if (law == "bracketing") {
      for (const auto& [b, m] : w.blocks->entries()) {
        if (!b.is_finite()) return false;
      }
    }
    if (law == "flattening" && !w.blocks->is_finite()) return false;
    return bracketing ? (s && outer != s) : (outer && s != outer);
  }
  if (law == "subsummability") return s && w.other && is_subfamily(*w.other, f) && !X.sum(*w.other);
  if (law == "zero_sum_all_zero") return s == SumResult<E>(X.zero()) && w.element && f.contains(*w.element) && *w.element != X.zero();
  if (law == "finite_totality") return f.is_finite() && !s;
  if (law == "inverses") {
    if (!X.inversion()) return true;
    if (!w.element) return false;
    const E y = (*X.inversion())(*w.element);
    return !X.contains(y) || X.sum(Family<E>{*w.element, y}) != SumResult<E>(X.zero());
  }
  if (law == "inversion_hom") {
    const auto& inv = *X.inversion();
    return s && X.sum(map_family<E>(inv, f)) != SumResult<E>(inv(*s));
  }
  if (law == "inverse_cancellation") {
    return s && X.sum(disjoint_union(f, map_family<E>(*X.inversion(), f))) != SumResult<E>(X.zero());
  }
  if (law == "padding") return w.other && s && X.sum(*w.other) != s;
  throw InputError("unknown law '" + law + "'");
}

}  // namespace sigma
