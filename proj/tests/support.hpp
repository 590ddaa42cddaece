#pragma once

// Seeded generators and reference oracles for the test suites. The oracles
// expand families into explicit element lists and fold them directly,
// without going through the library's summation rules.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sigma/sigma.hpp"

namespace support {

using namespace sigma;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = rng_();
    } while (v >= limit);
    return v % n;
  }
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  /// Finite part of size ≤ max_finite, up to max_omega ω entries.
  template <class E>
  Family<E> family(const std::vector<E>& samples, std::size_t max_finite, std::size_t max_omega) {
    Family<E> f;
    const std::size_t n = below(max_finite + 1);
    for (std::size_t i = 0; i < n; ++i) f.add(pick(samples), 1);
    const std::size_t k = below(max_omega + 1);
    for (std::size_t i = 0; i < k; ++i) f.add(pick(samples), kOmega);
    return f;
  }

  template <class T>
  void shuffle(std::vector<T>& xs) {
    for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[below(i)]);
  }

 private:
  std::mt19937_64 rng_;
};

/// A family written out element by element; ω entries listed once.
template <class E>
struct Expanded {
  std::vector<E> finite;
  std::vector<E> omega;
};

template <class E>
Expanded<E> expand(const Family<E>& f) {
  Expanded<E> out;
  for (const auto& [e, c] : f.finite_part()) {
    for (std::uint64_t i = 0; i < c; ++i) out.finite.push_back(e);
  }
  for (const auto& e : f.omega_part()) out.omega.push_back(e);
  return out;
}

/// Example 3.3 read literally: count the signs one at a time.
inline SumResult<Pm> pm_oracle(const Family<Pm>& f) {
  const auto x = expand(f);
  for (Pm e : x.omega) {
    if (e != Pm::zero) return std::nullopt;
  }
  long long balance = 0;
  for (Pm e : x.finite) balance += e == Pm::plus ? 1 : e == Pm::minus ? -1 : 0;
  if (balance == 0) return Pm::zero;
  if (balance == 1) return Pm::plus;
  if (balance == -1) return Pm::minus;
  return std::nullopt;
}

/// Symmetric difference folded over the expanded family.
inline SumResult<ParitySet> parity_oracle(const Family<ParitySet>& f) {
  const auto x = expand(f);
  for (const auto& s : x.omega) {
    if (!s.members.empty()) return std::nullopt;
  }
  std::set<std::string> acc;
  for (const auto& s : x.finite) {
    for (const auto& m : s.members) {
      if (!acc.erase(m)) acc.insert(m);
    }
  }
  return ParitySet(acc);
}

/// Plain rational addition; an ω-repeated nonzero term has no absolute sum.
inline SumResult<ExactReal> real_oracle(const Family<ExactReal>& f) {
  const auto x = expand(f);
  for (const auto& e : x.omega) {
    if (e != ExactReal(0)) return std::nullopt;
  }
  ExactReal::Rep acc = 0;
  for (const auto& e : x.finite) acc += e.rep();
  return ExactReal(acc);
}

inline SumResult<ExtNat> ext_nat_oracle(const Family<ExtNat>& f) {
  const auto x = expand(f);
  for (const auto& e : x.omega) {
    if (e.infinite || e.value > 0) return ExtNat::inf();
  }
  std::uint64_t acc = 0;
  for (const auto& e : x.finite) {
    if (e.infinite) return ExtNat::inf();
    acc += e.value;
  }
  return ExtNat{acc};
}

/// Repeated addition mod n; only 0 may repeat forever.
inline SumResult<TableElement> cyclic_oracle(std::uint32_t n, const Family<TableElement>& f) {
  const auto x = expand(f);
  for (const auto& e : x.omega) {
    if (e.index != 0) return std::nullopt;
  }
  std::uint32_t acc = 0;
  for (const auto& e : x.finite) acc = (acc + e.index) % n;
  return TableElement{acc};
}

/// All partitions of a finite family, by assigning labelled copies to
/// blocks in restricted-growth order and collapsing duplicates.
template <class E>
std::set<Family<Family<E>>> brute_force_partitions(const Family<E>& f) {
  const auto items = expand(f).finite;
  std::set<Family<Family<E>>> out;
  std::vector<std::size_t> block_of(items.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t used) -> void {
    if (i == items.size()) {
      std::vector<Family<E>> blocks(used);
      for (std::size_t j = 0; j < items.size(); ++j) blocks[block_of[j]].add(items[j], 1);
      Family<Family<E>> p;
      for (auto& b : blocks) p.add(b, 1);
      out.insert(p);
      return;
    }
    for (std::size_t b = 0; b <= used; ++b) {
      block_of[i] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  rec(rec, 0, 0);
  return out;
}

/// {0,+,-} read as Z/3 with + = 1 and - = 2: every finite family sums.
inline SigmaInstance<Pm> pm_mod3_instance() {
  auto residue = [](Pm e) { return e == Pm::plus ? 1 : e == Pm::minus ? 2 : 0; };
  auto rule = [residue](const Family<Pm>& f) -> SumResult<Pm> {
    const auto x = expand(f);
    for (Pm e : x.omega) {
      if (e != Pm::zero) return std::nullopt;
    }
    int acc = 0;
    for (Pm e : x.finite) acc = (acc + residue(e)) % 3;
    return acc == 0 ? Pm::zero : acc == 1 ? Pm::plus : Pm::minus;
  };
  return SigmaInstance<Pm>("pm-mod3", Carrier<Pm>::finite({Pm::zero, Pm::plus, Pm::minus}), Pm::zero, rule,
                           Flavor::finitely_total);
}

inline std::vector<ExactReal> reals(std::initializer_list<const char*> xs) {
  std::vector<ExactReal> out;
  for (const char* x : xs) out.push_back(ExactReal::parse(x));
  return out;
}

}  // namespace support
