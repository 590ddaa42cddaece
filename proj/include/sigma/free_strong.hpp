#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sigma/checker.hpp"
#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

/// One ⤳ step: `source` is cut into `blocks`, each summable, and the result
/// is the family of block sums plus `empty_blocks` empty blocks (each of
/// which contributes a 0).
template <class E>
struct LeadsStep {
  Family<E> source;
  Family<Family<E>> blocks;
  Multiplicity empty_blocks = 0;

  friend bool operator==(const LeadsStep&, const LeadsStep&) = default;
};

/// The family a step leads to, or nullopt when a block is not summable or
/// the blocks do not recombine to the source.
template <class E>
std::optional<Family<E>> step_target(const SigmaInstance<E>& X, const LeadsStep<E>& step) {
  if (recombine(step.blocks) != step.source) return std::nullopt;
  auto sums = detail::block_sums(X, step.blocks);
  if (!sums) return std::nullopt;
  return disjoint_union(*sums, Family<E>::repeated(X.zero(), step.empty_blocks));
}

template <class E>
struct LeadsToVerdict {
  bool holds = false;
  std::optional<LeadsStep<E>> step;
  /// Partition caps clipped the search; a false answer is then not final.
  bool truncated = false;
};

namespace detail {

/// k with b = s ⊎ {0:k}, if any.
template <class E>
std::optional<Multiplicity> zero_padding(const Family<E>& s, const Family<E>& b, const E& zero) {
  if (s.without(zero) != b.without(zero)) return std::nullopt;
  const Multiplicity cs = s.count(zero), cb = b.count(zero);
  if (cs == cb) return Multiplicity(0);
  if (cs.is_omega()) return std::nullopt;
  if (cb.is_omega()) return kOmega;
  if (cb.finite() > cs.finite()) return Multiplicity(cb.finite() - cs.finite());
  return std::nullopt;
}

}  // namespace detail

/// a ⤳ b: some partition of `a` into summable blocks (empty blocks allowed)
/// has block sums exactly `b`.
template <class E>
LeadsToVerdict<E> leads_to(const SigmaInstance<E>& X, const Family<E>& a, const Family<E>& b,
                           const PartitionCaps& caps = {}) {
  LeadsToVerdict<E> out;
  auto parts = enumerate_partitions(a, PartitionShape::unconstrained, caps);
  out.truncated = parts.truncated;
  for (const auto& p : parts.partitions) {
    auto sums = detail::block_sums(X, p.blocks);
    if (!sums) continue;
    if (auto k = detail::zero_padding(*sums, b, X.zero())) {
      out.holds = true;
      out.step = LeadsStep<E>{a, p.blocks, *k};
      return out;
    }
  }
  return out;
}

/// One link of a zig-zag chain. Forward links are from ⤳ to; backward links
/// are to ⤳ from. `step` is always the witnessing partition of the
/// ⤳-source.
template <class E>
struct ChainLink {
  Family<E> from;
  Family<E> to;
  bool forward = true;
  LeadsStep<E> step;
};

template <class E>
struct CongruenceVerdict {
  bool related = false;
  /// Links from `a` to `b`; empty when a = b.
  std::vector<ChainLink<E>> chain;
  /// The search stopped at the depth limit with unexplored families left.
  bool depth_exhausted = false;
};

/// Replays every link of a chain with direct sum calls.
template <class E>
bool verify_chain(const SigmaInstance<E>& X, const Family<E>& a, const Family<E>& b,
                  const std::vector<ChainLink<E>>& chain) {
  Family<E> at = a;
  for (const auto& link : chain) {
    if (link.from != at) return false;
    const Family<E>& src = link.forward ? link.from : link.to;
    const Family<E>& dst = link.forward ? link.to : link.from;
    if (link.step.source != src) return false;
    auto target = step_target(X, link.step);
    if (!target || *target != dst) return false;
    at = link.to;
  }
  return at == b;
}

/// Chains a⊎b ~ a'⊎b' built from chains a ~ a' and b ~ b' by carrying the
/// untouched side along as singleton blocks.
template <class E>
std::vector<ChainLink<E>> congruent_union(const std::vector<ChainLink<E>>& left, const Family<E>& left_end,
                                          const std::vector<ChainLink<E>>& right, const Family<E>& right_start) {
  auto lift = [](const ChainLink<E>& link, const Family<E>& rest) {
    ChainLink<E> out;
    out.forward = link.forward;
    out.from = disjoint_union(link.from, rest);
    out.to = disjoint_union(link.to, rest);
    out.step.source = disjoint_union(link.step.source, rest);
    out.step.blocks = link.step.blocks;
    for (const auto& [e, m] : rest.entries()) out.step.blocks.add(Family<E>{e}, m);
    out.step.empty_blocks = link.step.empty_blocks;
    return out;
  };
  std::vector<ChainLink<E>> out;
  for (const auto& link : left) out.push_back(lift(link, right_start));
  for (const auto& link : right) out.push_back(lift(link, left_end));
  return out;
}

/// The ⤳ graph over a bounded universe of families. Classes are connected
/// components of the graph spanned by the universe and the families its
/// members lead to; families outside the graph are classified by a
/// depth-bounded forward search.
template <class E>
class Congruence {
 public:
  Congruence(SigmaInstance<E> X, const Budget& universe, std::size_t depth = 4)
      : X_(std::move(X)), budget_(universe), depth_(depth) {
    universe_ = budget_families(X_, budget_);
    for (const auto& f : universe_) node(f);
    for (const auto& f : universe_) {
      const std::size_t from = index_.at(f);
      for (const auto& link : successors(f)) {
        const std::size_t to = node(link.to);
        unite(from, to);
        predecessors_[link.to].push_back(link);
      }
    }
    close_under_union();
    // Representative: the least universe member of the component, or the
    // least member when the component has none.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const std::size_t r = find(i);
      auto [it, fresh] = rep_.emplace(r, i);
      if (fresh) continue;
      const bool cand_in_u = i < universe_.size();
      const bool cur_in_u = it->second < universe_.size();
      if ((cand_in_u && !cur_in_u) || (cand_in_u == cur_in_u && nodes_[i] < nodes_[it->second])) it->second = i;
    }
  }

  const SigmaInstance<E>& instance() const { return X_; }
  const Budget& budget() const { return budget_; }
  std::size_t depth() const { return depth_; }
  const std::vector<Family<E>>& universe() const { return universe_; }
  bool in_graph(const Family<E>& f) const { return index_.contains(f); }

  /// Canonical representative of the class of `f`.
  Family<E> representative(const Family<E>& f) const {
    if (auto it = index_.find(f); it != index_.end()) return nodes_[rep_.at(find(it->second))];
    std::lock_guard<std::mutex> lock(memo_mutex_);
    if (auto it = outside_.find(f); it != outside_.end()) return it->second;
    Family<E> best = f;
    std::set<Family<E>> seen{f};
    std::vector<Family<E>> layer{f};
    std::optional<Family<E>> hit;
    for (std::size_t d = 0; d < depth_ && !layer.empty() && !hit; ++d) {
      std::vector<Family<E>> next;
      for (const auto& g : layer) {
        for (const auto& link : successors(g)) {
          if (!seen.insert(link.to).second) continue;
          if (auto it = index_.find(link.to); it != index_.end()) {
            hit = nodes_[rep_.at(find(it->second))];
            break;
          }
          best = std::min(best, link.to);
          next.push_back(link.to);
        }
        if (hit) break;
      }
      layer = std::move(next);
    }
    Family<E> out = hit ? *hit : best;
    outside_.emplace(f, out);
    return out;
  }

  /// Zig-zag search from a to b through at most `depth` links. Forward links
  /// are explored from every family; backward links only from families the
  /// graph has edges into.
  CongruenceVerdict<E> equivalent(const Family<E>& a, const Family<E>& b) const {
    CongruenceVerdict<E> out;
    if (a == b) {
      out.related = true;
      return out;
    }
    std::map<Family<E>, std::optional<ChainLink<E>>> parent{{a, std::nullopt}};
    std::vector<Family<E>> layer{a};
    for (std::size_t d = 0; d < depth_ && !layer.empty(); ++d) {
      std::vector<Family<E>> next;
      for (const auto& g : layer) {
        std::vector<ChainLink<E>> links = successors(g);
        if (auto it = predecessors_.find(g); it != predecessors_.end()) {
          for (const auto& p : it->second) links.push_back(ChainLink<E>{g, p.from, false, p.step});
        }
        for (auto& link : links) {
          if (parent.contains(link.to)) continue;
          parent.emplace(link.to, link);
          if (link.to == b) {
            for (Family<E> at = b; parent.at(at); at = parent.at(at)->from) out.chain.push_back(*parent.at(at));
            std::reverse(out.chain.begin(), out.chain.end());
            out.related = true;
            return out;
          }
          next.push_back(link.to);
        }
      }
      layer = std::move(next);
    }
    out.depth_exhausted = !layer.empty();
    return out;
  }

  /// Classes meeting the universe, each listed by its universe members.
  std::vector<std::vector<Family<E>>> classes() const {
    std::map<std::size_t, std::vector<Family<E>>> by_root;
    for (std::size_t i = 0; i < universe_.size(); ++i) by_root[find(i)].push_back(universe_[i]);
    std::vector<std::vector<Family<E>>> out;
    for (auto& [r, members] : by_root) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Forward ⤳ links out of `f`: every partition into summable blocks,
  /// with 0, 1 or ω extra empty blocks.
  std::vector<ChainLink<E>> successors(const Family<E>& f) const {
    std::vector<ChainLink<E>> out;
    std::set<Family<E>> targets;
    for (const auto& p : enumerate_partitions(f, PartitionShape::unconstrained, budget_.caps).partitions) {
      auto sums = detail::block_sums(X_, p.blocks);
      if (!sums) continue;
      for (Multiplicity k : {Multiplicity(0), Multiplicity(1), kOmega}) {
        Family<E> to = disjoint_union(*sums, Family<E>::repeated(X_.zero(), k));
        if (to == f || !targets.insert(to).second) continue;
        out.push_back(ChainLink<E>{f, to, true, LeadsStep<E>{f, p.blocks, k}});
      }
    }
    return out;
  }

 private:
  std::size_t node(const Family<E>& f) {
    auto [it, fresh] = index_.emplace(f, nodes_.size());
    if (fresh) {
      nodes_.push_back(f);
      parent_.push_back(parent_.size());
    }
    return it->second;
  }
  // ⤳ is preserved by ⊎ and by ω-scaling (blocks recombine side by side),
  // so a ~ a' and b ~ b' give a⊎b ~ a'⊎b', and a ~ a' gives a·ω ~ a'·ω.
  // Pairs of universe members whose results are graph nodes are merged by
  // the classes of their operands until nothing changes.
  void close_under_union() {
    const std::size_t n = universe_.size();
    for (bool changed = true; changed;) {
      changed = false;
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> by_operands;
      std::map<std::size_t, std::size_t> by_scaled;
      auto merge_into = [&](auto& table, const auto& key, const Family<E>& result) {
        auto it = index_.find(result);
        if (it == index_.end()) return;
        auto [slot, fresh] = table.emplace(key, it->second);
        if (!fresh && find(slot->second) != find(it->second)) {
          unite(slot->second, it->second);
          changed = true;
        }
      };
      for (std::size_t i = 0; i < n; ++i) {
        merge_into(by_scaled, find(i), universe_[i].scaled(kOmega));
        for (std::size_t j = i; j < n; ++j) {
          const std::size_t ri = find(i), rj = find(j);
          merge_into(by_operands, std::pair(std::min(ri, rj), std::max(ri, rj)),
                     disjoint_union(universe_[i], universe_[j]));
        }
      }
    }
  }
  std::size_t find(std::size_t i) const {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  SigmaInstance<E> X_;
  Budget budget_;
  std::size_t depth_;
  std::vector<Family<E>> universe_;  // occupies node indices [0, universe_.size())
  std::vector<Family<E>> nodes_;
  std::map<Family<E>, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::map<std::size_t, std::size_t> rep_;  // root -> representative node
  std::map<Family<E>, std::vector<ChainLink<E>>> predecessors_;
  mutable std::mutex memo_mutex_;
  mutable std::map<Family<E>, Family<E>> outside_;
};

/// An element of a quotient of X* : a class, named by its representative.
template <class E>
struct QuotientClass {
  Family<E> rep;

  friend bool operator==(const QuotientClass&, const QuotientClass&) = default;
  friend auto operator<=>(const QuotientClass& a, const QuotientClass& b) { return a.rep <=> b.rep; }
};

template <class E>
struct QuotientInstance {
  SigmaInstance<QuotientClass<E>> instance;
  std::shared_ptr<const Congruence<E>> congruence;

  QuotientClass<E> class_of(const Family<E>& f) const { return {congruence->representative(f)}; }
};

/// A_f: classes [x] with f x summable in Y, summed by Σ^f{[x_i]} = [⊎ x_i]
/// when f(⊎ x_i) is summable.
template <class E, class F>
QuotientInstance<E> build_Af(const SigmaInstance<E>& X, const SigmaInstance<F>& Y, const Hom<E, F>& f,
                             const Budget& universe, std::size_t depth = 4) {
  if (!f.verified()) throw ConstructionError("build_Af needs a verified homomorphism");
  if (!f.source().same_as(X) || !f.target().same_as(Y)) throw ConstructionError("homomorphism does not run X -> Y");
  if (Y.declared_flavor() != Flavor::strong) throw ConstructionError(Y.name() + " is not declared strong");
  auto cong = std::make_shared<const Congruence<E>>(X, universe, depth);
  auto fm = f.map();
  auto admits = [Y, fm](const Family<E>& x) { return Y.sum_unchecked(map_family<F>(fm, x)).has_value(); };

  std::vector<QuotientClass<E>> samples;
  for (const auto& members : cong->classes()) {
    Family<E> rep = cong->representative(members.front());
    if (admits(rep)) samples.push_back({rep});
  }
  auto member = [cong, admits](const QuotientClass<E>& c) {
    return cong->representative(c.rep) == c.rep && admits(c.rep);
  };
  auto rule = [cong, admits](const Family<QuotientClass<E>>& fam) -> SumResult<QuotientClass<E>> {
    Family<E> all;
    for (const auto& [c, m] : fam.entries()) all = disjoint_union(all, c.rep.scaled(m));
    if (!admits(all)) return std::nullopt;
    return QuotientClass<E>{cong->representative(all)};
  };
  SigmaInstance<QuotientClass<E>> inst("A_" + f.name(), Carrier<QuotientClass<E>>::symbolic(member, samples),
                                       QuotientClass<E>{cong->representative(Family<E>{})}, rule, Flavor::strong);
  return {std::move(inst), cong};
}

/// Σ∩ over instances sharing an element type: the carrier is the
/// intersection, and a family is summable when every instance sums it to
/// the same value inside the intersection.
template <class E>
SigmaInstance<E> intersect_instances(const std::vector<SigmaInstance<E>>& parts) {
  if (parts.empty()) throw ConstructionError("intersection of no instances");
  for (const auto& p : parts) {
    if (p.zero() != parts.front().zero()) throw ConstructionError("instances disagree on the neutral element");
  }
  if (parts.size() == 1) return parts.front();
  auto member = [parts](const E& x) {
    return std::all_of(parts.begin(), parts.end(), [&](const auto& p) { return p.contains(x); });
  };
  std::vector<E> samples;
  for (const auto& x : parts.front().carrier().samples()) {
    if (member(x)) samples.push_back(x);
  }
  const bool finite = std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.carrier().is_finite(); });
  auto rule = [parts, member](const Family<E>& f) -> SumResult<E> {
    SumResult<E> common = parts.front().sum_unchecked(f);
    if (!common || !member(*common)) return std::nullopt;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].sum_unchecked(f) != common) return std::nullopt;
    }
    return common;
  };
  std::string name;
  for (const auto& p : parts) name += (name.empty() ? "" : "&") + p.name();
  Flavor flavor = parts.front().declared_flavor();
  for (const auto& p : parts) {
    if (p.declared_flavor() != flavor) flavor = Flavor::weak;
  }
  return SigmaInstance<E>(name, finite ? Carrier<E>::finite(samples) : Carrier<E>::symbolic(member, samples),
                          parts.front().zero(), rule, flavor);
}

template <class E, class F>
struct Factorization {
  Hom<E, QuotientClass<E>> eta;
  Hom<QuotientClass<E>, F> f_bar;
  bool eta_ok = false;
  bool f_bar_ok = false;
  /// f̄(η(x)) = f(x) for every carrier sample x.
  bool commutes = false;
  bool diagram_ok() const { return eta_ok && f_bar_ok && commutes; }
};

/// η : x ↦ [{x}] and f̄ : [x] ↦ Σ_Y f x, each checked at `budget`.
template <class E, class F>
Factorization<E, F> eta_and_factorize(const QuotientInstance<E>& A, const Hom<E, F>& f,
                                      const Budget& budget = construction_budget()) {
  const auto& X = f.source();
  const auto& Y = f.target();
  auto cong = A.congruence;
  auto eta_map = [cong](const E& x) { return QuotientClass<E>{cong->representative(Family<E>{x})}; };
  auto fm = f.map();
  auto f_bar_map = [Y, fm](const QuotientClass<E>& c) {
    auto s = Y.sum_unchecked(map_family<F>(fm, c.rep));
    if (!s) throw InputError("class outside A_f");
    return *s;
  };
  const bool eta_ok = check_hom(eta_map, X, A.instance, budget).ok;
  const bool f_bar_ok = check_hom(f_bar_map, A.instance, Y, budget).ok;
  bool commutes = true;
  for (const auto& x : X.carrier().samples()) commutes = commutes && f_bar_map(eta_map(x)) == fm(x);
  return {Hom<E, QuotientClass<E>>("eta", X, A.instance, eta_map, eta_ok ? std::optional(budget) : std::nullopt),
          Hom<QuotientClass<E>, F>("bar(" + f.name() + ")", A.instance, Y, f_bar_map,
                                   f_bar_ok ? std::optional(budget) : std::nullopt),
          eta_ok, f_bar_ok, commutes};
}

}  // namespace sigma
