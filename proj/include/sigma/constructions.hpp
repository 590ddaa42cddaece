#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/instances.hpp"
#include "sigma/io.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

// ---------------------------------------------------------------------------
// Products and pairings

template <class A, class B>
using PairElement = std::pair<A, B>;

template <class A, class B>
struct ProductInstance {
  SigmaInstance<PairElement<A, B>> instance;
  Hom<PairElement<A, B>, A> first;
  Hom<PairElement<A, B>, B> second;
};

namespace detail {

template <class A, class B>
std::vector<PairElement<A, B>> cartesian(const std::vector<A>& xs, const std::vector<B>& ys) {
  std::vector<PairElement<A, B>> out;
  out.reserve(xs.size() * ys.size());
  for (const auto& x : xs) {
    for (const auto& y : ys) out.emplace_back(x, y);
  }
  return out;
}

inline Flavor common_flavor(Flavor a, Flavor b) {
  if (a == b) return a;
  const bool ft_a = a == Flavor::finitely_total || a == Flavor::sigma_group;
  const bool ft_b = b == Flavor::finitely_total || b == Flavor::sigma_group;
  return ft_a && ft_b ? Flavor::finitely_total : Flavor::weak;
}

}  // namespace detail

/// X × Y, summable exactly when both projections are.
template <class A, class B>
ProductInstance<A, B> product(const SigmaInstance<A>& X, const SigmaInstance<B>& Y,
                              const Budget& budget = construction_budget()) {
  using P = PairElement<A, B>;
  auto samples = detail::cartesian(X.carrier().samples(), Y.carrier().samples());
  Carrier<P> carrier = X.carrier().is_finite() && Y.carrier().is_finite()
                           ? Carrier<P>::finite(std::move(samples))
                           : Carrier<P>::symbolic([X, Y](const P& p) { return X.contains(p.first) && Y.contains(p.second); },
                                                  std::move(samples));
  auto rule = [X, Y](const Family<P>& f) -> SumResult<P> {
    auto sx = X.sum_unchecked(map_family<A>([](const P& p) { return p.first; }, f));
    if (!sx) return std::nullopt;
    auto sy = Y.sum_unchecked(map_family<B>([](const P& p) { return p.second; }, f));
    if (!sy) return std::nullopt;
    return P(*sx, *sy);
  };
  std::optional<typename SigmaInstance<P>::Inversion> inversion;
  if (X.inversion() && Y.inversion()) {
    inversion = [ix = *X.inversion(), iy = *Y.inversion()](const P& p) { return P(ix(p.first), iy(p.second)); };
  }
  SigmaInstance<P> inst(X.name() + "x" + Y.name(), std::move(carrier), P(X.zero(), Y.zero()), rule,
                        detail::common_flavor(X.declared_flavor(), Y.declared_flavor()), inversion);
  auto first = verify_hom<P, A>("pi1", [](const P& p) { return p.first; }, inst, X, budget);
  auto second = verify_hom<P, B>("pi2", [](const P& p) { return p.second; }, inst, Y, budget);
  return {std::move(inst), std::move(first), std::move(second)};
}

/// The map a ↦ (f(a), g(a)) into a product built from f's and g's targets.
template <class C, class A, class B>
Hom<C, PairElement<A, B>> pairing(const Hom<C, A>& f, const Hom<C, B>& g, const ProductInstance<A, B>& P,
                                  const Budget& budget = construction_budget()) {
  if (!f.source().same_as(g.source())) throw ConstructionError("pairing needs a common source");
  if (!P.first.target().same_as(f.target()) || !P.second.target().same_as(g.target())) {
    throw ConstructionError("pairing targets differ from the product factors");
  }
  auto fm = f.map();
  auto gm = g.map();
  return verify_hom<C, PairElement<A, B>>(
      "<" + f.name() + "," + g.name() + ">", [fm, gm](const C& c) { return PairElement<A, B>(fm(c), gm(c)); },
      f.source(), P.instance, budget);
}

// ---------------------------------------------------------------------------
// Equalisers

/// The agreement set {x | f(x) = g(x)} with X's sum restricted to it: a
/// family is summable iff its X-sum exists and lies in the set.
template <class E, class F>
Restriction<E, E> equaliser(const Hom<E, F>& f, const Hom<E, F>& g, const Budget& budget = construction_budget()) {
  if (!f.source().same_as(g.source()) || !f.target().same_as(g.target())) {
    throw ConstructionError("equaliser needs parallel homomorphisms");
  }
  const auto& X = f.source();
  auto fm = f.map();
  auto gm = g.map();
  auto agree = [X, fm, gm](const E& x) { return X.contains(x) && fm(x) == gm(x); };
  std::vector<E> samples;
  for (const auto& x : X.carrier().samples()) {
    if (agree(x)) samples.push_back(x);
  }
  Carrier<E> carrier = X.carrier().is_finite() ? Carrier<E>::finite(samples) : Carrier<E>::symbolic(agree, samples);
  auto identity = [](const E& x) { return x; };
  auto back = [agree](const E& x) -> std::optional<E> {
    if (!agree(x)) return std::nullopt;
    return x;
  };
  auto r = restrict_instance<E, E>(X, std::move(carrier), identity, back,
                                   "eq(" + f.name() + "," + g.name() + ")", X.declared_flavor(), budget);
  if (!X.inversion()) return r;
  // Parallel group homomorphisms commute with negation, so the agreement set
  // is closed under it.
  SigmaInstance<E> with_inv(r.instance.name(), r.instance.carrier(), r.instance.zero(),
                            [inst = r.instance](const Family<E>& fam) { return inst.sum_unchecked(fam); },
                            r.instance.declared_flavor(), X.inversion());
  auto inclusion = Hom<E, E>(r.embedding.name(), with_inv, X, identity, r.embedding.verified_budget());
  return {std::move(with_inv), std::move(inclusion)};
}

// ---------------------------------------------------------------------------
// Chain colimits

/// An element of the stage-indexed disjoint union.
template <class E>
struct Staged {
  std::size_t stage = 0;
  E value{};

  friend bool operator==(const Staged&, const Staged&) = default;
  friend bool operator<(const Staged& a, const Staged& b) {
    if (a.stage != b.stage) return a.stage < b.stage;
    return a.value < b.value;
  }
};

template <class E>
struct ChainColimit {
  SigmaInstance<Staged<E>> instance;
  /// injections[i] : X_i → colimit, x ↦ [x].
  std::vector<Hom<E, Staged<E>>> injections;
  /// Class of a stage element, represented by its minimal (stage, element).
  std::function<Staged<E>(std::size_t, const E&)> class_of;
};

/// Colimit of X_0 → X_1 → ... → X_n over finite carriers. Elements are
/// identified when their images agree at some later stage; a family of
/// classes is summable when, pushed to a common stage j, its image in some
/// X_k (k ≥ j) is summable.
template <class E>
ChainColimit<E> chain_colimit(const std::vector<SigmaInstance<E>>& stages, const std::vector<Hom<E, E>>& maps,
                              const Budget& budget = construction_budget()) {
  if (stages.empty()) throw ConstructionError("empty chain");
  if (maps.size() + 1 != stages.size()) throw ConstructionError("a chain of n stages needs n-1 maps");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!maps[i].source().same_as(stages[i]) || !maps[i].target().same_as(stages[i + 1])) {
      throw ConstructionError("chain map " + std::to_string(i) + " is not composable with its neighbours");
    }
    if (!maps[i].verified()) throw ConstructionError("chain map " + maps[i].name() + " is not verified");
  }
  for (const auto& s : stages) {
    if (!s.carrier().is_finite()) throw UnsupportedError("chain colimits need finite carriers");
  }

  struct Shared {
    std::vector<SigmaInstance<E>> stages;
    std::vector<std::function<E(const E&)>> maps;
    std::map<Staged<E>, Staged<E>> rep;  // element -> class representative
    E push(std::size_t from, std::size_t to, E x) const {
      for (std::size_t i = from; i < to; ++i) x = maps[i](x);
      return x;
    }
  };
  auto shared = std::make_shared<Shared>();
  shared->stages = stages;
  for (const auto& m : maps) shared->maps.push_back(m.map());

  const std::size_t last = stages.size() - 1;
  // With finitely many stages, agreement at some stage k is agreement at the
  // last stage, since later maps preserve it.
  std::map<E, Staged<E>> by_image;
  std::vector<Staged<E>> reps;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    for (const auto& x : stages[i].carrier().samples()) {
      const Staged<E> s{i, x};
      auto [it, fresh] = by_image.emplace(shared->push(i, last, x), s);
      if (fresh) reps.push_back(s);
      shared->rep.emplace(s, it->second);
    }
  }

  auto class_of = [shared](std::size_t stage, const E& x) {
    auto it = shared->rep.find(Staged<E>{stage, x});
    if (it == shared->rep.end()) throw InputError("element outside chain stage " + std::to_string(stage));
    return it->second;
  };

  auto rule = [shared, class_of, last](const Family<Staged<E>>& f) -> SumResult<Staged<E>> {
    std::size_t j = 0;
    for (const auto& [c, m] : f.entries()) j = std::max(j, c.stage);
    for (std::size_t k = j; k <= last; ++k) {
      Family<E> pushed;
      for (const auto& [c, m] : f.entries()) pushed.add(shared->push(c.stage, k, c.value), m);
      if (auto s = shared->stages[k].sum_unchecked(pushed)) return class_of(k, *s);
    }
    return std::nullopt;
  };

  Flavor flavor = stages.front().declared_flavor();
  for (const auto& s : stages) flavor = detail::common_flavor(flavor, s.declared_flavor());
  SigmaInstance<Staged<E>> inst("colim(" + stages.front().name() + "->...->" + stages.back().name() + ")",
                                Carrier<Staged<E>>::finite(reps), class_of(0, stages.front().zero()), rule, flavor);

  ChainColimit<E> out{inst, {}, class_of};
  for (std::size_t i = 0; i < stages.size(); ++i) {
    out.injections.push_back(verify_hom<E, Staged<E>>(
        "in" + std::to_string(i), [class_of, i](const E& x) { return class_of(i, x); }, stages[i], inst, budget));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The unit instance

enum class Unit : std::uint8_t { zero, one };

/// I = {0, 1}: Σ is 0 with no 1s, 1 with exactly one 1, undefined otherwise.
inline SigmaInstance<Unit> unit_instance() {
  auto rule = [](const Family<Unit>& f) -> SumResult<Unit> {
    const Multiplicity ones = f.count(Unit::one);
    if (ones.is_zero()) return Unit::zero;
    if (ones == Multiplicity(1)) return Unit::one;
    return std::nullopt;
  };
  return SigmaInstance<Unit>("I", Carrier<Unit>::finite({Unit::zero, Unit::one}), Unit::zero, rule, Flavor::weak);
}

inline ElementSyntax<Unit> unit_syntax() {
  return {[](const Unit& u) { return std::string(u == Unit::one ? "1" : "0"); },
          [](std::string_view s) {
            s = detail::trim(s);
            if (s == "0") return Unit::zero;
            if (s == "1") return Unit::one;
            throw ParseError("not an element of I: '" + std::string(s) + "'");
          }};
}

// ---------------------------------------------------------------------------
// Internal hom

/// A function X → Y on a finite carrier, stored as the images of X's
/// elements in carrier order.
template <class F>
struct HomTable {
  std::vector<F> values;

  friend bool operator==(const HomTable&, const HomTable&) = default;
  friend bool operator<(const HomTable& a, const HomTable& b) { return a.values < b.values; }
};

template <class E, class F>
struct InternalHom {
  SigmaInstance<HomTable<F>> instance;
  std::vector<E> domain;
  Budget certified_at;

  F apply(const HomTable<F>& h, const E& x) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), x);
    if (it == domain.end() || *it != x) throw InputError("argument outside the hom domain");
    return h.values[static_cast<std::size_t>(it - domain.begin())];
  }
  HomTable<F> tabulate(const std::function<F(const E&)>& h) const {
    HomTable<F> t;
    for (const auto& x : domain) t.values.push_back(h(x));
    return t;
  }
};

/// [X, Y]: every function between the finite carriers that passes check_hom
/// at `budget`, summed pointwise. A family of homs is summable when every
/// pointwise family is and the resulting function is again in the carrier.
template <class E, class F>
InternalHom<E, F> internal_hom(const SigmaInstance<E>& X, const SigmaInstance<F>& Y, const Budget& budget,
                               std::size_t max_functions = 1u << 16) {
  if (!X.carrier().is_finite() || !Y.carrier().is_finite()) {
    throw UnsupportedError("internal hom needs finite carriers");
  }
  const auto& xs = X.carrier().samples();
  const auto& ys = Y.carrier().samples();
  double total = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) total *= static_cast<double>(ys.size());
  if (total > static_cast<double>(max_functions)) throw UnsupportedError("too many functions to enumerate");

  std::vector<HomTable<F>> homs;
  std::vector<std::size_t> digits(xs.size(), 0);
  while (true) {
    HomTable<F> t;
    for (std::size_t d : digits) t.values.push_back(ys[d]);
    auto fn = [&xs, &t](const E& x) {
      return t.values[static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin())];
    };
    if (check_hom(fn, X, Y, budget).ok) homs.push_back(std::move(t));
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == ys.size()) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  if (homs.empty()) throw ConstructionError("no function " + X.name() + " -> " + Y.name() + " passes at this budget");

  HomTable<F> zero;
  for (std::size_t i = 0; i < xs.size(); ++i) zero.values.push_back(Y.zero());

  auto rule = [Y, homs, n = xs.size()](const Family<HomTable<F>>& f) -> SumResult<HomTable<F>> {
    HomTable<F> s;
    for (std::size_t i = 0; i < n; ++i) {
      Family<F> column;
      for (const auto& [h, m] : f.entries()) column.add(h.values[i], m);
      auto v = Y.sum_unchecked(column);
      if (!v) return std::nullopt;
      s.values.push_back(*v);
    }
    if (!std::binary_search(homs.begin(), homs.end(), s)) return std::nullopt;
    return s;
  };
  SigmaInstance<HomTable<F>> inst("[" + X.name() + "," + Y.name() + "]", Carrier<HomTable<F>>::finite(homs), zero,
                                  rule, Flavor::weak);
  return {std::move(inst), xs, budget};
}

// ---------------------------------------------------------------------------
// Bilinearity

template <class A, class B>
struct BilinearVerdict {
  bool ok = true;
  /// Set when h(a, -) fails: the fixed first argument and the violating
  /// family in the second slot.
  std::optional<A> fixed_first;
  std::optional<Family<B>> second_family;
  /// Set when h(-, b) fails.
  std::optional<B> fixed_second;
  std::optional<Family<A>> first_family;
};

/// h is Σ-bilinear when h(a, -) and h(-, b) are homomorphisms for every a
/// and b. First-slot-fixed maps are checked first, in carrier order.
template <class A, class B, class C, class Fn>
BilinearVerdict<A, B> check_bilinear(Fn&& h, const SigmaInstance<A>& X, const SigmaInstance<B>& Y,
                                     const SigmaInstance<C>& Z, const Budget& budget) {
  BilinearVerdict<A, B> out;
  for (const auto& a : X.carrier().samples()) {
    auto v = check_hom([&](const B& b) { return std::invoke(h, a, b); }, Y, Z, budget);
    if (!v.ok) {
      out.ok = false;
      out.fixed_first = a;
      out.second_family = v.counterexample;
      return out;
    }
  }
  for (const auto& b : Y.carrier().samples()) {
    auto v = check_hom([&](const A& a) { return std::invoke(h, a, b); }, X, Z, budget);
    if (!v.ok) {
      out.ok = false;
      out.fixed_second = b;
      out.first_family = v.counterexample;
      return out;
    }
  }
  return out;
}

/// l_X(0, x) = 0, l_X(1, x) = x.
template <class E>
std::function<E(const Unit&, const E&)> left_unitor(const SigmaInstance<E>& X) {
  return [zero = X.zero()](const Unit& i, const E& x) { return i == Unit::one ? x : zero; };
}

/// r_X(x, 0) = 0, r_X(x, 1) = x.
template <class E>
std::function<E(const E&, const Unit&)> right_unitor(const SigmaInstance<E>& X) {
  return [zero = X.zero()](const E& x, const Unit& i) { return i == Unit::one ? x : zero; };
}

/// ev(h, y) = h(y) for the internal hom [Y, Z].
template <class E, class F>
std::function<F(const HomTable<F>&, const E&)> evaluation(const InternalHom<E, F>& hom) {
  return [hom](const HomTable<F>& h, const E& x) { return hom.apply(h, x); };
}

/// The unitor square: g(r(x, i), y) = g(x, l(i, y)) for all x, i, y. The two
/// Cartesian paths ((x,i),y) ↦ (r(x,i), y) and ↦ (x, l(i,y)) differ when
/// i = 0; they agree after any bilinear g, which sends both (0, y) and
/// (x, 0) to 0. Returns false when g is not bilinear at `budget` or some
/// triple disagrees.
template <class A, class B, class C, class Fn>
bool check_unitor_coherence(Fn&& g, const SigmaInstance<A>& X, const SigmaInstance<B>& Y, const SigmaInstance<C>& Z,
                            const Budget& budget) {
  if (!check_bilinear<A, B, C>(g, X, Y, Z, budget).ok) return false;
  const auto r = right_unitor(X);
  const auto l = left_unitor(Y);
  for (const auto& x : X.carrier().samples()) {
    for (Unit i : {Unit::zero, Unit::one}) {
      for (const auto& y : Y.carrier().samples()) {
        if (std::invoke(g, r(x, i), y) != std::invoke(g, x, l(i, y))) return false;
      }
    }
  }
  return true;
}

}  // namespace sigma
