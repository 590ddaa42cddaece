#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace sigma {

namespace detail {

/// Three-way comparison built from `<` only, so element types need not
/// provide `<=>` (std::pair, boost types, ...).
template <class T>
std::strong_ordering compare_by_less(const T& a, const T& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace detail

/// A multiplicity in N ∪ {ω}. Addition and multiplication absorb into ω,
/// except that 0 · ω = 0.
class Multiplicity {
 public:
  constexpr Multiplicity() = default;
  constexpr Multiplicity(std::uint64_t n) : count_(n) {}  // NOLINT(google-explicit-constructor)

  static constexpr Multiplicity omega() {
    Multiplicity m;
    m.omega_ = true;
    return m;
  }

  constexpr bool is_omega() const { return omega_; }
  constexpr bool is_zero() const { return !omega_ && count_ == 0; }
  /// Only meaningful when !is_omega().
  constexpr std::uint64_t finite() const { return count_; }

  friend constexpr Multiplicity operator+(Multiplicity a, Multiplicity b) {
    if (a.omega_ || b.omega_) return omega();
    return Multiplicity(a.count_ + b.count_);
  }
  friend constexpr Multiplicity operator*(Multiplicity a, Multiplicity b) {
    if (a.is_zero() || b.is_zero()) return Multiplicity(0);
    if (a.omega_ || b.omega_) return omega();
    return Multiplicity(a.count_ * b.count_);
  }
  friend constexpr bool operator==(Multiplicity a, Multiplicity b) {
    return a.omega_ == b.omega_ && (a.omega_ || a.count_ == b.count_);
  }
  friend constexpr std::strong_ordering operator<=>(Multiplicity a, Multiplicity b) {
    if (a.omega_ || b.omega_) return a.omega_ <=> b.omega_;
    return a.count_ <=> b.count_;
  }

  std::string str() const { return omega_ ? std::string("omega") : std::to_string(count_); }

 private:
  std::uint64_t count_ = 0;
  bool omega_ = false;
};

inline constexpr Multiplicity kOmega = Multiplicity::omega();

/// A countable family identified up to re-indexing: a finite multiset plus a
/// set of elements repeated countably infinitely often. The representation
/// is canonical, so structural equality is equality of families.
///
/// Families are ordered by (total size, number of ω entries, expanded finite
/// sequence, ω sequence), where total size counts each ω entry once. This is
/// the enumeration order used for counterexample search and for picking
/// class representatives.
template <class E>
class Family {
 public:
  using element_type = E;
  using Entry = std::pair<E, Multiplicity>;

  Family() = default;
  Family(std::initializer_list<E> finite) {
    for (const auto& e : finite) add(e, 1);
  }

  /// Canonicalizes a raw (element, count) list: counts merge, ω absorbs,
  /// zero counts vanish.
  static Family from_entries(std::span<const Entry> raw) {
    Family f;
    for (const auto& [e, m] : raw) f.add(e, m);
    return f;
  }
  static Family from_entries(std::initializer_list<Entry> raw) {
    return from_entries(std::span<const Entry>(raw.begin(), raw.size()));
  }
  static Family repeated(const E& e, Multiplicity m) {
    Family f;
    f.add(e, m);
    return f;
  }

  Family& add(const E& e, Multiplicity m) {
    if (m.is_zero() || omega_.contains(e)) return *this;
    if (m.is_omega()) {
      finite_.erase(e);
      omega_.insert(e);
    } else {
      finite_[e] += m.finite();
    }
    return *this;
  }

  Multiplicity count(const E& e) const {
    if (omega_.contains(e)) return kOmega;
    auto it = finite_.find(e);
    return it == finite_.end() ? Multiplicity(0) : Multiplicity(it->second);
  }
  bool contains(const E& e) const { return !count(e).is_zero(); }

  bool empty() const { return finite_.empty() && omega_.empty(); }
  bool is_finite() const { return omega_.empty(); }
  std::uint64_t finite_size() const {
    std::uint64_t n = 0;
    for (const auto& [e, c] : finite_) n += c;
    return n;
  }
  std::size_t omega_size() const { return omega_.size(); }
  /// Finite size plus one per ω entry.
  std::uint64_t total_size() const { return finite_size() + omega_.size(); }

  const std::map<E, std::uint64_t>& finite_part() const { return finite_; }
  const std::set<E>& omega_part() const { return omega_; }

  /// All entries in element order.
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    out.reserve(finite_.size() + omega_.size());
    auto fi = finite_.begin();
    auto oi = omega_.begin();
    while (fi != finite_.end() || oi != omega_.end()) {
      if (oi == omega_.end() || (fi != finite_.end() && fi->first < *oi)) {
        out.emplace_back(fi->first, Multiplicity(fi->second));
        ++fi;
      } else {
        out.emplace_back(*oi, kOmega);
        ++oi;
      }
    }
    return out;
  }
  std::vector<E> support() const {
    std::vector<E> out;
    for (const auto& [e, m] : entries()) out.push_back(e);
    return out;
  }

  Family scaled(Multiplicity m) const {
    Family out;
    for (const auto& [e, c] : entries()) out.add(e, c * m);
    return out;
  }
  /// Removes every copy of `e`.
  Family without(const E& e) const {
    Family out = *this;
    out.finite_.erase(e);
    out.omega_.erase(e);
    return out;
  }

  friend bool operator==(const Family& a, const Family& b) {
    return a.finite_ == b.finite_ && a.omega_ == b.omega_;
  }
  friend std::strong_ordering operator<=>(const Family& a, const Family& b) {
    if (auto c = a.total_size() <=> b.total_size(); c != 0) return c;
    if (auto c = a.omega_size() <=> b.omega_size(); c != 0) return c;
    if (auto c = compare_runs(a.finite_, b.finite_); c != 0) return c;
    return std::lexicographical_compare_three_way(a.omega_.begin(), a.omega_.end(),
                                                  b.omega_.begin(), b.omega_.end(),
                                                  detail::compare_by_less<E>);
  }

 private:
  // Lexicographic comparison of the expanded (sorted, repeated) sequences.
  static std::strong_ordering compare_runs(const std::map<E, std::uint64_t>& a,
                                           const std::map<E, std::uint64_t>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    std::uint64_t ra = ia == a.end() ? 0 : ia->second;
    std::uint64_t rb = ib == b.end() ? 0 : ib->second;
    while (ia != a.end() && ib != b.end()) {
      if (auto c = detail::compare_by_less(ia->first, ib->first); c != 0) return c;
      const std::uint64_t step = std::min(ra, rb);
      ra -= step;
      rb -= step;
      if (ra == 0 && ++ia != a.end()) ra = ia->second;
      if (rb == 0 && ++ib != b.end()) rb = ib->second;
    }
    if (ia == a.end() && ib == b.end()) return std::strong_ordering::equal;
    return ia == a.end() ? std::strong_ordering::less : std::strong_ordering::greater;
  }

  std::map<E, std::uint64_t> finite_;
  std::set<E> omega_;
};

template <class E>
Family<E> canonicalize(std::span<const typename Family<E>::Entry> raw) {
  return Family<E>::from_entries(raw);
}

template <class E>
Family<E> disjoint_union(const Family<E>& a, const Family<E>& b) {
  Family<E> out = a;
  for (const auto& [e, m] : b.entries()) out.add(e, m);
  return out;
}

/// count_sub(e) ≤ count_sup(e) everywhere, with ω ≤ ω.
template <class E>
bool is_subfamily(const Family<E>& sub, const Family<E>& sup) {
  for (const auto& [e, m] : sub.entries()) {
    if (m > sup.count(e)) return false;
  }
  return true;
}

/// Pointwise minimum of counts; meaningful for two subfamilies of a common
/// parent, where it is the subfamily on the shared indices.
template <class E>
Family<E> intersect(const Family<E>& a, const Family<E>& b) {
  Family<E> out;
  for (const auto& [e, m] : a.entries()) out.add(e, std::min(m, b.count(e)));
  return out;
}

/// The image family {h(x_i)}: counts of elements with the same image merge.
/// The element type of the result is deduced unless given explicitly.
template <class F = void, class E, class Fn>
auto map_family(Fn&& h, const Family<E>& f) {
  using R = std::conditional_t<std::is_void_v<F>, std::decay_t<std::invoke_result_t<Fn&, const E&>>, F>;
  Family<R> out;
  for (const auto& [e, m] : f.entries()) out.add(std::invoke(h, e), m);
  return out;
}

// ---------------------------------------------------------------------------
// Partitions

enum class PartitionShape {
  bracketing,    // every block finite, possibly infinitely many blocks
  flattening,    // finitely many blocks, blocks possibly infinite
  unconstrained  // both relaxations at once
};

inline const char* to_string(PartitionShape s) {
  switch (s) {
    case PartitionShape::bracketing: return "bracketing";
    case PartitionShape::flattening: return "flattening";
    case PartitionShape::unconstrained: return "unconstrained";
  }
  return "?";
}

struct PartitionCaps {
  std::size_t max_blocks = 4;        // block slots; an ω-repeated block is one slot
  std::size_t max_block_size = 4;    // finite size + one per ω entry
  std::size_t max_omega_splits = 2;  // slots that may share one ω element

  friend bool operator==(const PartitionCaps&, const PartitionCaps&) = default;
};

/// The blocks of a partition form a family of families: a block repeated
/// ω times is an ω entry.
template <class E>
struct Partition {
  Family<Family<E>> blocks;
  PartitionShape shape = PartitionShape::unconstrained;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Disjoint union of all blocks, honouring block multiplicities.
template <class E>
Family<E> recombine(const Family<Family<E>>& blocks) {
  Family<E> out;
  for (const auto& [block, m] : blocks.entries()) out = disjoint_union(out, block.scaled(m));
  return out;
}

template <class E>
Family<E> recombine(const Partition<E>& p) {
  return recombine(p.blocks);
}

/// The partition of a family into its singleton subfamilies.
template <class E>
Partition<E> singleton_partition(const Family<E>& f) {
  Partition<E> p;
  for (const auto& [e, m] : f.entries()) p.blocks.add(Family<E>{e}, m);
  return p;
}

template <class E>
struct PartitionEnumeration {
  std::vector<Partition<E>> partitions;
  /// Some partition of the requested shape lies outside the caps.
  bool truncated = false;
};

namespace detail {

template <class E>
class PartitionSearch {
 public:
  PartitionSearch(const Family<E>& f, PartitionShape shape, const PartitionCaps& caps)
      : shape_(shape), caps_(caps), entries_(f.entries()) {
    remaining_.resize(entries_.size(), 0);
    covered_.resize(entries_.size(), false);
    splits_.resize(entries_.size(), 0);
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      if (!entries_[j].second.is_omega()) remaining_[j] = entries_[j].second.finite();
    }
    std::vector<Multiplicity> counts(entries_.size());
    build_blocks(0, 0, counts);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      kinds_.push_back({&blocks_[i], i, false});
      if (shape_ != PartitionShape::flattening && only_omega_parents(blocks_[i])) kinds_.push_back({&blocks_[i], i, true});
    }
    uses_.assign(blocks_.size(), {0, false});
    for (const auto& k : kinds_) {
      Family<E> block;
      for (std::size_t j = 0; j < entries_.size(); ++j) block.add(entries_[j].first, (*k.counts)[j]);
      kind_blocks_.push_back(std::move(block));
    }
  }

  std::vector<Family<Family<E>>> run() {
    search(std::nullopt, 0);
    return std::move(found_);
  }

 private:
  struct Kind {
    const std::vector<Multiplicity>* counts;
    std::size_t block;
    bool repeated;  // slot repeated ω times
  };

  void build_blocks(std::size_t j, std::size_t size, std::vector<Multiplicity>& counts) {
    if (j == entries_.size()) {
      if (size > 0) blocks_.push_back(counts);
      return;
    }
    const Multiplicity parent = entries_[j].second;
    const std::uint64_t finite_cap =
        parent.is_omega() ? caps_.max_block_size : std::min<std::uint64_t>(parent.finite(), caps_.max_block_size);
    for (std::uint64_t c = 0; c <= finite_cap && size + c <= caps_.max_block_size; ++c) {
      counts[j] = c;
      build_blocks(j + 1, size + c, counts);
    }
    if (parent.is_omega() && shape_ != PartitionShape::bracketing && size + 1 <= caps_.max_block_size) {
      counts[j] = kOmega;
      build_blocks(j + 1, size + 1, counts);
    }
    counts[j] = 0;
  }

  bool only_omega_parents(const std::vector<Multiplicity>& b) const {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!b[j].is_zero() && !entries_[j].second.is_omega()) return false;
    }
    return true;
  }

  bool fits(const Kind& k) const {
    const auto& b = *k.counts;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_zero()) continue;
      if (entries_[j].second.is_omega()) {
        if (splits_[j] >= caps_.max_omega_splits) return false;
      } else if (b[j].finite() > remaining_[j]) {
        return false;
      }
    }
    return true;
  }

  void apply(const Kind& k, int dir, std::vector<bool>* saved) {
    const auto& b = *k.counts;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_zero()) continue;
      if (entries_[j].second.is_omega()) {
        splits_[j] += dir;
        if (dir > 0) {
          (*saved)[j] = covered_[j];
          if (k.repeated || b[j].is_omega()) covered_[j] = true;
        } else {
          covered_[j] = (*saved)[j];
        }
      } else {
        remaining_[j] = dir > 0 ? remaining_[j] - b[j].finite() : remaining_[j] + b[j].finite();
      }
    }
  }

  // Slot multisets correspond one-to-one to partitions: a block repeated ω
  // times never shares the partition with further copies of itself (see
  // `search`).
  void emit() {
    std::vector<std::size_t> key = slots_;
    std::sort(key.begin(), key.end());
    if (!seen_.insert(std::move(key)).second) return;
    Family<Family<E>> blocks;
    for (std::size_t s : slots_) blocks.add(kind_blocks_[s], kinds_[s].repeated ? kOmega : Multiplicity(1));
    found_.push_back(std::move(blocks));
  }

  // First entry that still needs a block: finite copies left over, or an ω
  // entry not yet repeated infinitely often.
  std::optional<std::size_t> first_needy() const {
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      if (entries_[j].second.is_omega() ? !covered_[j] : remaining_[j] != 0) return j;
    }
    return std::nullopt;
  }

  // While some entry is needy the next block must contain it, which makes
  // every partition reachable while keeping the branching small. Blocks
  // placed for the same needy entry, and the optional extra blocks added
  // once everything is covered, come in nondecreasing kind order so each
  // partition is generated once per distinct ordering of equal choices.
  void search(std::optional<std::size_t> prev_needy, std::size_t start) {
    const auto needy = first_needy();
    if (!needy) emit();
    if (slots_.size() == caps_.max_blocks) return;
    const std::size_t from = needy == prev_needy ? start : 0;
    for (std::size_t k = from; k < kinds_.size(); ++k) {
      const Kind& kind = kinds_[k];
      if (needy && (*kind.counts)[*needy].is_zero()) continue;
      auto& use = uses_[kind.block];
      // b repeated ω times absorbs any other copy of b.
      if (use.second || (kind.repeated && use.first > 0)) continue;
      if (!fits(kind)) continue;
      std::vector<bool> saved(entries_.size(), false);
      apply(kind, +1, &saved);
      slots_.push_back(k);
      ++use.first;
      use.second = kind.repeated;
      search(needy, k);
      use.second = false;
      --use.first;
      slots_.pop_back();
      apply(kind, -1, &saved);
    }
  }

  PartitionShape shape_;
  PartitionCaps caps_;
  std::vector<typename Family<E>::Entry> entries_;
  std::vector<std::uint64_t> remaining_;
  std::vector<bool> covered_;
  std::vector<std::size_t> splits_;
  std::vector<std::vector<Multiplicity>> blocks_;
  std::vector<Kind> kinds_;
  std::vector<std::size_t> slots_;
  std::vector<Family<E>> kind_blocks_;
  std::vector<std::pair<std::size_t, bool>> uses_;  // per block: copies placed, repeated copy placed
  std::set<std::vector<std::size_t>> seen_;
  std::vector<Family<Family<E>>> found_;
};

}  // namespace detail

/// Every partition of `f` of the given shape whose blocks respect `caps`,
/// each exactly once up to block reordering. Blocks are nonempty; the empty
/// family has exactly one (blockless) partition.
template <class E>
PartitionEnumeration<E> enumerate_partitions(const Family<E>& f, PartitionShape shape,
                                             const PartitionCaps& caps = {}) {
  PartitionEnumeration<E> out;
  for (auto& blocks : detail::PartitionSearch<E>(f, shape, caps).run()) {
    out.partitions.push_back(Partition<E>{std::move(blocks), shape});
  }
  const std::uint64_t n = f.finite_size();
  // An ω entry can always be split ω = ω + k for arbitrarily large k.
  out.truncated = !f.is_finite() || n > caps.max_blocks || n > caps.max_block_size;
  return out;
}

template <class E>
struct SubfamilyEnumeration {
  std::vector<Family<E>> subfamilies;
  bool truncated = false;
};

/// All subfamilies of `f` in enumeration order; an ω entry contributes the
/// counts 0..omega_cap and ω.
template <class E>
SubfamilyEnumeration<E> enumerate_subfamilies(const Family<E>& f, std::uint64_t omega_cap = 2) {
  SubfamilyEnumeration<E> out;
  const auto entries = f.entries();
  std::vector<Family<E>> acc{Family<E>{}};
  for (const auto& [e, m] : entries) {
    std::vector<Family<E>> next;
    const std::uint64_t top = m.is_omega() ? omega_cap : m.finite();
    for (const auto& g : acc) {
      for (std::uint64_t c = 0; c <= top; ++c) next.push_back(Family<E>(g).add(e, c));
      if (m.is_omega()) next.push_back(Family<E>(g).add(e, kOmega));
    }
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end());
  out.subfamilies = std::move(acc);
  out.truncated = !f.is_finite();
  return out;
}

/// Every family over `samples` with finite part of size ≤ max_finite and at
/// most max_omega ω entries, in enumeration order.
template <class E>
std::vector<Family<E>> enumerate_families(std::vector<E> samples, std::size_t max_finite,
                                          std::size_t max_omega) {
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const E& a, const E& b) { return !(a < b) && !(b < a); }),
                samples.end());
  std::vector<Family<E>> out;
  const std::size_t n = samples.size();
  std::vector<bool> is_omega(n, false);
  std::vector<std::uint64_t> counts(n, 0);

  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t j, std::size_t left) {
    if (j == n) {
      Family<E> f;
      for (std::size_t i = 0; i < n; ++i) f.add(samples[i], is_omega[i] ? kOmega : Multiplicity(counts[i]));
      out.push_back(std::move(f));
      return;
    }
    if (is_omega[j]) {
      fill(j + 1, left);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[j] = c;
      fill(j + 1, left - c);
    }
    counts[j] = 0;
  };

  std::function<void(std::size_t, std::size_t)> choose_omega = [&](std::size_t i, std::size_t left) {
    fill(0, max_finite);
    if (left == 0) return;
    for (std::size_t j = i; j < n; ++j) {
      is_omega[j] = true;
      choose_omega(j + 1, left - 1);
      is_omega[j] = false;
    }
  };

  choose_omega(0, max_omega);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sigma
