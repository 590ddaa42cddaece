#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigma/errors.hpp"
#include "sigma/family.hpp"

namespace sigma {

/// The value of a partial sum: a defined element or nothing. Comparing two
/// results with == is exactly Kleene equality.
template <class E>
using SumResult = std::optional<E>;

template <class E>
bool kleene_equal(const SumResult<E>& a, const SumResult<E>& b) {
  return a == b;
}

enum class Flavor { weak, strong, finitely_total, sigma_group };

inline const char* to_string(Flavor f) {
  switch (f) {
    case Flavor::weak: return "weak";
    case Flavor::strong: return "strong";
    case Flavor::finitely_total: return "ft";
    case Flavor::sigma_group: return "group";
  }
  return "?";
}

inline std::optional<Flavor> parse_flavor(std::string_view s) {
  for (Flavor f : {Flavor::weak, Flavor::strong, Flavor::finitely_total, Flavor::sigma_group}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

/// Enumeration bounds shared by every budgeted check. Identical budgets give
/// identical verdicts.
struct Budget {
  std::size_t max_finite_size = 4;
  std::size_t max_omega_elems = 1;
  PartitionCaps caps{};
  std::size_t trials = 16;
  std::uint64_t seed = 0;

  friend bool operator==(const Budget&, const Budget&) = default;
};

/// Pointwise minimum: the region covered by both budgets.
inline Budget intersect(const Budget& a, const Budget& b) {
  Budget out;
  out.max_finite_size = std::min(a.max_finite_size, b.max_finite_size);
  out.max_omega_elems = std::min(a.max_omega_elems, b.max_omega_elems);
  out.caps.max_blocks = std::min(a.caps.max_blocks, b.caps.max_blocks);
  out.caps.max_block_size = std::min(a.caps.max_block_size, b.caps.max_block_size);
  out.caps.max_omega_splits = std::min(a.caps.max_omega_splits, b.caps.max_omega_splits);
  out.trials = std::min(a.trials, b.trials);
  out.seed = a.seed;
  return out;
}

/// Budget used to certify the structural maps that constructions hand out.
inline Budget construction_budget() {
  Budget b;
  b.max_finite_size = 3;
  b.max_omega_elems = 1;
  b.trials = 0;
  return b;
}

/// A carrier set: either an explicit finite list or a membership predicate
/// with a finite list of samples used for enumeration.
template <class E>
class Carrier {
 public:
  static Carrier finite(std::vector<E> elements) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    Carrier c;
    c.finite_ = true;
    c.samples_ = std::move(elements);
    return c;
  }

  static Carrier symbolic(std::function<bool(const E&)> member, std::vector<E> samples) {
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    Carrier c;
    c.member_ = std::move(member);
    c.samples_ = std::move(samples);
    return c;
  }

  bool is_finite() const { return finite_; }
  bool contains(const E& e) const {
    if (finite_) return std::binary_search(samples_.begin(), samples_.end(), e);
    return member_(e);
  }
  /// All elements of a finite carrier; the sample list of a symbolic one.
  const std::vector<E>& samples() const { return samples_; }

 private:
  bool finite_ = false;
  std::function<bool(const E&)> member_;
  std::vector<E> samples_;
};

/// A Σ-monoid candidate: carrier, neutral element, partial summation rule and
/// declared flavor. Copies share one immutable definition.
template <class E>
class SigmaInstance {
 public:
  using element_type = E;
  using Rule = std::function<SumResult<E>(const Family<E>&)>;
  using Inversion = std::function<E(const E&)>;

  SigmaInstance(std::string name, Carrier<E> carrier, E zero, Rule rule, Flavor declared,
                std::optional<Inversion> inversion = std::nullopt)
      : def_(std::make_shared<const Definition>(Definition{std::move(name), std::move(carrier), std::move(zero),
                                                           std::move(rule), declared, std::move(inversion)})) {}

  const std::string& name() const { return def_->name; }
  const Carrier<E>& carrier() const { return def_->carrier; }
  const E& zero() const { return def_->zero; }
  Flavor declared_flavor() const { return def_->declared; }
  const std::optional<Inversion>& inversion() const { return def_->inversion; }

  bool contains(const E& e) const { return def_->carrier.contains(e); }

  /// Throws InputError when an element lies outside the carrier.
  SumResult<E> sum(const Family<E>& f) const {
    for (const auto& [e, m] : f.entries()) {
      if (!def_->carrier.contains(e)) throw InputError("element outside the carrier of " + def_->name);
    }
    return def_->rule(f);
  }

  /// The rule without the carrier check, for callers that already know the
  /// family is well-formed.
  SumResult<E> sum_unchecked(const Family<E>& f) const { return def_->rule(f); }

  bool same_as(const SigmaInstance& other) const { return def_ == other.def_; }

 private:
  struct Definition {
    std::string name;
    Carrier<E> carrier;
    E zero;
    Rule rule;
    Flavor declared;
    std::optional<Inversion> inversion;
  };
  std::shared_ptr<const Definition> def_;
};

/// Families over the instance's samples within `budget`, in enumeration order.
template <class E>
std::vector<Family<E>> budget_families(const SigmaInstance<E>& inst, const Budget& budget) {
  const auto& samples = inst.carrier().samples();
  if (samples.empty()) throw UnsupportedError("carrier of " + inst.name() + " has no samples to enumerate");
  return enumerate_families(samples, budget.max_finite_size, budget.max_omega_elems);
}

template <class E>
struct HomVerdict {
  bool ok = true;
  /// First violating summable family in enumeration order.
  std::optional<Family<E>> counterexample;
  std::size_t families_checked = 0;
};

/// Does `map` preserve every defined sum of X within the budget?
/// Σ_X x ≃ v must imply Σ_Y (map x) ≃ map(v); images outside Y's carrier
/// count as violations.
template <class E, class F, class Fn>
HomVerdict<E> check_hom(Fn&& map, const SigmaInstance<E>& X, const SigmaInstance<F>& Y, const Budget& budget) {
  HomVerdict<E> out;
  for (const auto& fam : budget_families(X, budget)) {
    ++out.families_checked;
    const SumResult<E> sx = X.sum_unchecked(fam);
    if (!sx) continue;
    const Family<F> image = map_family<F>(map, fam);
    const F target = std::invoke(map, *sx);
    bool inside = Y.contains(target);
    for (const auto& [y, m] : image.entries()) inside = inside && Y.contains(y);
    if (!inside || Y.sum_unchecked(image) != SumResult<F>(target)) {
      out.ok = false;
      out.counterexample = fam;
      return out;
    }
  }
  return out;
}

/// A structure-preserving map together with the budget within which the
/// preservation law was checked. On finite sources the map is tabulated.
template <class E, class F>
class Hom {
 public:
  using Map = std::function<F(const E&)>;

  Hom(std::string name, SigmaInstance<E> source, SigmaInstance<F> target, Map map,
      std::optional<Budget> verified_budget)
      : name_(std::move(name)),
        source_(std::move(source)),
        target_(std::move(target)),
        map_(std::move(map)),
        verified_(verified_budget) {
    if (source_.carrier().is_finite()) {
      auto table = std::make_shared<std::map<E, F>>();
      for (const auto& x : source_.carrier().samples()) table->emplace(x, map_(x));
      table_ = table;
      map_ = [table, fallback = map_](const E& x) {
        auto it = table->find(x);
        return it == table->end() ? fallback(x) : it->second;
      };
    }
  }

  F operator()(const E& x) const { return map_(x); }

  const std::string& name() const { return name_; }
  const SigmaInstance<E>& source() const { return source_; }
  const SigmaInstance<F>& target() const { return target_; }
  const Map& map() const { return map_; }
  bool verified() const { return verified_.has_value(); }
  const std::optional<Budget>& verified_budget() const { return verified_; }
  /// Lookup table, present when the source carrier is finite.
  const std::map<E, F>* table() const { return table_.get(); }

 private:
  std::string name_;
  SigmaInstance<E> source_;
  SigmaInstance<F> target_;
  Map map_;
  std::optional<Budget> verified_;
  std::shared_ptr<const std::map<E, F>> table_;
};

/// Certifies `map` at `budget`; throws ConstructionError on a violation.
template <class E, class F>
Hom<E, F> verify_hom(std::string name, std::function<F(const E&)> map, const SigmaInstance<E>& X,
                     const SigmaInstance<F>& Y, const Budget& budget) {
  auto verdict = check_hom(map, X, Y, budget);
  if (!verdict.ok) throw ConstructionError(name + " is not a homomorphism " + X.name() + " -> " + Y.name());
  return Hom<E, F>(std::move(name), X, Y, std::move(map), budget);
}

/// g ∘ f. The composite inherits the intersection of both budgets and is
/// only marked verified when both parts are.
template <class E, class F, class G>
Hom<E, G> compose(const Hom<F, G>& g, const Hom<E, F>& f) {
  if (!f.target().same_as(g.source())) {
    throw ConstructionError("cannot compose " + g.name() + " after " + f.name() + ": target/source mismatch");
  }
  std::optional<Budget> budget;
  if (f.verified() && g.verified()) budget = intersect(*f.verified_budget(), *g.verified_budget());
  auto fm = f.map();
  auto gm = g.map();
  return Hom<E, G>(g.name() + "." + f.name(), f.source(), g.target(), [fm, gm](const E& x) { return gm(fm(x)); },
                   budget);
}

/// Removes every copy of the neutral element.
template <class E>
Family<E> strip_zeros(const SigmaInstance<E>& inst, const Family<E>& f) {
  return f.without(inst.zero());
}

}  // namespace sigma
