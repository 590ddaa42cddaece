#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

// ---------------------------------------------------------------------------
// Element types

/// The three-element carrier {0, +, -}; ordered 0 < + < -.
enum class Pm : std::uint8_t { zero, plus, minus };

/// A subset of a finite universe of named points.
struct ParitySet {
  std::set<std::string> members;

  ParitySet() = default;
  ParitySet(std::initializer_list<std::string> m) : members(m) {}
  explicit ParitySet(std::set<std::string> m) : members(std::move(m)) {}

  friend bool operator==(const ParitySet&, const ParitySet&) = default;
  friend auto operator<=>(const ParitySet& a, const ParitySet& b) { return a.members <=> b.members; }
};

/// An exact rational number.
class ExactReal {
 public:
  using Rep = boost::multiprecision::cpp_rational;

  ExactReal() = default;
  ExactReal(long long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  ExactReal(long long num, long long den) {
    if (den == 0) throw InputError("zero denominator");
    v_ = Rep(num, den);
  }
  explicit ExactReal(Rep v) : v_(std::move(v)) {}

  /// Accepts integers, `p/q` and decimals such as `-0.25` or `.5`.
  static ExactReal parse(std::string_view text) {
    std::string s(text);
    auto bad = [&] { return ParseError("not a number: '" + s + "'"); };
    if (s.empty()) throw bad();
    auto digits_ok = [](std::string_view d, bool allow_empty) {
      if (d.empty()) return allow_empty;
      for (char c : d) {
        if (c < '0' || c > '9') return false;
      }
      return true;
    };
    // cpp_int's string constructor reads a leading 0 as an octal prefix.
    auto decimal = [](std::string_view d) {
      while (d.size() > 1 && d.front() == '0') d.remove_prefix(1);
      return boost::multiprecision::cpp_int(std::string(d.empty() ? "0" : d));
    };
    bool negative = false;
    std::string_view body(s);
    if (body.front() == '-' || body.front() == '+') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    Rep value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
      auto num = body.substr(0, slash);
      auto den = body.substr(slash + 1);
      if (!digits_ok(num, false) || !digits_ok(den, false)) throw bad();
      const boost::multiprecision::cpp_int n = decimal(num), d = decimal(den);
      if (d == 0) throw bad();
      value = Rep(n, d);
    } else {
      auto dot = body.find('.');
      auto whole = body.substr(0, dot);
      auto frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
      if (!digits_ok(whole, dot != std::string_view::npos) || !digits_ok(frac, true)) throw bad();
      if (whole.empty() && frac.empty()) throw bad();
      const boost::multiprecision::cpp_int n = decimal(std::string(whole) + std::string(frac));
      boost::multiprecision::cpp_int d = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) d *= 10;
      value = Rep(n, d);
    }
    return ExactReal(negative ? Rep(-value) : value);
  }

  const Rep& rep() const { return v_; }
  bool is_integer() const { return boost::multiprecision::denominator(v_) == 1; }
  double to_double() const { return v_.convert_to<double>(); }
  /// `n` or `p/q` in lowest terms.
  std::string str() const { return v_.str(); }

  friend ExactReal operator+(const ExactReal& a, const ExactReal& b) { return ExactReal(Rep(a.v_ + b.v_)); }
  friend ExactReal operator-(const ExactReal& a, const ExactReal& b) { return ExactReal(Rep(a.v_ - b.v_)); }
  friend ExactReal operator*(const ExactReal& a, const ExactReal& b) { return ExactReal(Rep(a.v_ * b.v_)); }
  friend ExactReal operator-(const ExactReal& a) { return ExactReal(Rep(-a.v_)); }
  friend bool operator==(const ExactReal& a, const ExactReal& b) { return a.v_.compare(b.v_) == 0; }
  friend std::strong_ordering operator<=>(const ExactReal& a, const ExactReal& b) {
    const int c = a.v_.compare(b.v_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

 private:
  Rep v_;
};

/// N ∪ {∞}.
struct ExtNat {
  std::uint64_t value = 0;
  bool infinite = false;

  static constexpr ExtNat inf() { return ExtNat{0, true}; }

  friend constexpr bool operator==(ExtNat a, ExtNat b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
  friend constexpr std::strong_ordering operator<=>(ExtNat a, ExtNat b) {
    if (a.infinite || b.infinite) return a.infinite <=> b.infinite;
    return a.value <=> b.value;
  }
};

/// An element of a finite monoid given by its index in the monoid's table.
struct TableElement {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(TableElement, TableElement) = default;
};

// ---------------------------------------------------------------------------
// Instances

namespace detail {

inline std::optional<std::uint64_t> finite_count(Multiplicity m) {
  if (m.is_omega()) return std::nullopt;
  return m.finite();
}

}  // namespace detail

/// {0,+,-}: defined exactly when n₊ is finite and n₊ - n₋ ∈ {-1, 0, 1}.
inline SigmaInstance<Pm> pm_instance() {
  auto rule = [](const Family<Pm>& f) -> SumResult<Pm> {
    auto plus = detail::finite_count(f.count(Pm::plus));
    auto minus = detail::finite_count(f.count(Pm::minus));
    // n₊ finite together with n₊ = n₋ + d, d ∈ {-1,0,1}, forces n₋ finite.
    if (!plus || !minus) return std::nullopt;
    if (*plus == *minus) return Pm::zero;
    if (*plus == *minus + 1) return Pm::plus;
    if (*plus + 1 == *minus) return Pm::minus;
    return std::nullopt;
  };
  return SigmaInstance<Pm>("pm", Carrier<Pm>::finite({Pm::zero, Pm::plus, Pm::minus}), Pm::zero, rule, Flavor::weak);
}

/// All subsets of `universe`, summed by parity of occurrence counts. Defined
/// iff every point occurs finitely often.
inline SigmaInstance<ParitySet> powerset_parity_instance(const std::vector<std::string>& universe) {
  std::set<std::string> points(universe.begin(), universe.end());
  std::vector<ParitySet> subsets;
  std::vector<std::string> pts(points.begin(), points.end());
  if (pts.size() > 16) throw InputError("parity universe too large to enumerate");
  for (std::uint32_t mask = 0; mask < (1u << pts.size()); ++mask) {
    ParitySet s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (mask & (1u << i)) s.members.insert(pts[i]);
    }
    subsets.push_back(std::move(s));
  }
  auto rule = [points](const Family<ParitySet>& f) -> SumResult<ParitySet> {
    ParitySet out;
    for (const auto& x : points) {
      std::uint64_t n = 0;
      for (const auto& [a, m] : f.entries()) {
        if (!a.members.contains(x)) continue;
        if (m.is_omega()) return std::nullopt;
        n += m.finite();
      }
      if (n % 2 == 1) out.members.insert(x);
    }
    return out;
  };
  std::string name = "parity:";
  for (std::size_t i = 0; i < pts.size(); ++i) name += (i ? "," : "") + pts[i];
  return SigmaInstance<ParitySet>(name, Carrier<ParitySet>::finite(std::move(subsets)), ParitySet{}, rule,
                                  Flavor::weak);
}

inline std::vector<ExactReal> default_real_samples() {
  return {ExactReal(-1, 4), ExactReal(0), ExactReal(1, 2), ExactReal(3, 4)};
}

namespace detail {

/// Absolute convergence restricted to representable families: only 0 may be
/// repeated ω times.
inline SumResult<ExactReal> absolute_sum(const Family<ExactReal>& f) {
  for (const auto& e : f.omega_part()) {
    if (e != ExactReal(0)) return std::nullopt;
  }
  ExactReal total(0);
  for (const auto& [e, c] : f.finite_part()) total = total + e * ExactReal(static_cast<long long>(c));
  return total;
}

}  // namespace detail

/// The reals with absolutely convergent summation, in exact arithmetic.
/// `samples` drive enumeration; membership is all of Q.
inline SigmaInstance<ExactReal> real_abs_instance(std::vector<ExactReal> samples = default_real_samples()) {
  return SigmaInstance<ExactReal>(
      "real", Carrier<ExactReal>::symbolic([](const ExactReal&) { return true; }, std::move(samples)), ExactReal(0),
      detail::absolute_sum, Flavor::finitely_total, [](const ExactReal& x) { return -x; });
}

inline std::vector<ExactReal> default_int_samples() {
  return {ExactReal(-5), ExactReal(0), ExactReal(3), ExactReal(4), ExactReal(5)};
}

/// The integers as a Σ-group: finite sums, ω-parts only of 0, negation.
inline SigmaInstance<ExactReal> int_group_instance(std::vector<ExactReal> samples = default_int_samples()) {
  return SigmaInstance<ExactReal>(
      "int", Carrier<ExactReal>::symbolic([](const ExactReal& x) { return x.is_integer(); }, std::move(samples)),
      ExactReal(0), detail::absolute_sum, Flavor::sigma_group, [](const ExactReal& x) { return -x; });
}

inline std::vector<ExtNat> default_ext_nat_samples() { return {ExtNat{0}, ExtNat{1}, ExtNat{2}, ExtNat::inf()}; }

/// N ∪ {∞} with every family summable: the supremum of the finite partial
/// sums. A total strong reference instance.
inline SigmaInstance<ExtNat> ext_nat_instance(std::vector<ExtNat> samples = default_ext_nat_samples()) {
  auto rule = [](const Family<ExtNat>& f) -> SumResult<ExtNat> {
    for (const auto& e : f.omega_part()) {
      if (e != ExtNat{0}) return ExtNat::inf();
    }
    std::uint64_t total = 0;
    for (const auto& [e, c] : f.finite_part()) {
      if (e.infinite) return ExtNat::inf();
      total += e.value * c;
    }
    return ExtNat{total};
  };
  return SigmaInstance<ExtNat>("extnat", Carrier<ExtNat>::symbolic([](const ExtNat&) { return true; },
                                                                   std::move(samples)),
                               ExtNat{0}, rule, Flavor::strong);
}

/// Z/n with the discrete topology, computed arithmetically: defined iff only
/// 0 repeats ω times.
inline SigmaInstance<TableElement> cyclic_instance(std::uint32_t n) {
  if (n == 0) throw InputError("cyclic order must be positive");
  std::vector<TableElement> elems;
  for (std::uint32_t i = 0; i < n; ++i) elems.push_back(TableElement{i});
  auto rule = [n](const Family<TableElement>& f) -> SumResult<TableElement> {
    for (const auto& e : f.omega_part()) {
      if (e.index % n != 0) return std::nullopt;
    }
    std::uint64_t total = 0;
    for (const auto& [e, c] : f.finite_part()) total = (total + (e.index % n) * (c % n)) % n;
    return TableElement{static_cast<std::uint32_t>(total)};
  };
  return SigmaInstance<TableElement>("Z/" + std::to_string(n), Carrier<TableElement>::finite(std::move(elems)),
                                     TableElement{0}, rule, Flavor::sigma_group, [n](const TableElement& x) {
                                       return TableElement{(n - x.index % n) % n};
                                     });
}

template <class E, class F>
struct Restriction {
  SigmaInstance<E> instance;
  Hom<E, F> embedding;
};

/// Pulls Y's summation back along an injective `embed`: Σ x ≃ v iff
/// Σ_Y (embed x) ≃ embed(v). `preimage` inverts `embed` on its image; for
/// finite domains it may be omitted and is then tabulated.
template <class E, class F>
Restriction<E, F> restrict_instance(const SigmaInstance<F>& Y, Carrier<E> domain, std::function<F(const E&)> embed,
                                    std::function<std::optional<E>(const F&)> preimage = nullptr,
                                    std::string name = "", Flavor declared = Flavor::weak,
                                    const Budget& budget = construction_budget()) {
  const auto& samples = domain.samples();
  std::map<F, E> seen;
  for (const auto& x : samples) {
    const F y = embed(x);
    if (!Y.contains(y)) throw ConstructionError("embedding leaves the carrier of " + Y.name());
    auto [it, fresh] = seen.emplace(y, x);
    if (!fresh) throw ConstructionError("restriction embedding is not injective");
  }
  if (!preimage) {
    if (!domain.is_finite()) throw ConstructionError("symbolic restriction needs an explicit preimage");
    preimage = [seen](const F& y) -> std::optional<E> {
      auto it = seen.find(y);
      if (it == seen.end()) return std::nullopt;
      return it->second;
    };
  }
  auto zero = preimage(Y.zero());
  if (!zero || !domain.contains(*zero)) throw ConstructionError("the neutral element has no preimage");
  if (name.empty()) name = Y.name() + "|restricted";

  auto rule = [Y, embed, preimage, domain](const Family<E>& f) -> SumResult<E> {
    auto total = Y.sum_unchecked(map_family<F>(embed, f));
    if (!total) return std::nullopt;
    auto back = preimage(*total);
    if (!back || !domain.contains(*back)) return std::nullopt;
    return back;
  };
  SigmaInstance<E> inst(name, std::move(domain), *zero, rule, declared);
  Hom<E, F> hom = verify_hom<E, F>(name + "->" + Y.name(), embed, inst, Y, budget);
  return {std::move(inst), std::move(hom)};
}

inline std::vector<ExactReal> default_interval_samples() { return default_real_samples(); }

/// [-1, 1] ⊂ R: defined exactly when the real sum exists and stays inside.
inline Restriction<ExactReal, ExactReal> interval_instance(
    std::vector<ExactReal> samples = default_interval_samples()) {
  auto inside = [](const ExactReal& x) { return ExactReal(-1) <= x && x <= ExactReal(1); };
  return restrict_instance<ExactReal, ExactReal>(
      real_abs_instance(samples), Carrier<ExactReal>::symbolic(inside, samples),
      [](const ExactReal& x) { return x; },
      [inside](const ExactReal& y) -> std::optional<ExactReal> {
        if (!inside(y)) return std::nullopt;
        return y;
      },
      "real[-1,1]");
}

}  // namespace sigma
