#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sigma/checker.hpp"
#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/instances.hpp"
#include "sigma/io.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

/// |gen(i)| ≤ bound(i), and tail(n) ≥ Σ_{i ≥ n} bound(i): the mass left
/// once the first n terms are summed.
struct AbsoluteBound {
  std::function<double(std::uint64_t)> bound;
  std::function<double(std::uint64_t)> tail;
};

/// A countable real family given by a generator ℕ → ℝ.
struct GeneratorFamily {
  std::string description;
  std::function<double(std::uint64_t)> gen;
  std::optional<AbsoluteBound> certificate;
};

struct Converged {
  double value = 0;
  double error_bound = 0;
  std::uint64_t terms = 0;
};

/// A finite subfamily given as the terms of one sign among the first
/// `prefix` indices.
struct SignedSubfamily {
  int sign = 1;
  std::uint64_t prefix = 0;
  std::uint64_t count = 0;
  double sum = 0;
};

/// Evidence: `witness` and the empty subfamily have partial sums more than
/// `threshold` apart, or the one-signed sums kept growing by a steady amount
/// on every checkpoint listed in `checkpoint_sums`.
struct Diverged {
  SignedSubfamily witness;
  double threshold = 0;
  std::string reason;
  std::vector<double> checkpoint_sums;
};

struct Inconclusive {
  std::uint64_t terms = 0;
};

using NetVerdict = std::variant<Converged, Diverged, Inconclusive>;

struct NetOptions {
  std::uint64_t max_terms = std::uint64_t{1} << 22;
  /// One-signed partial sums past threshold_scale·(1 + |largest term|) count as divergence.
  double threshold_scale = 1e6;
  /// Uncertified probes: first checkpoint and growth factor between checkpoints.
  std::uint64_t first_checkpoint = 64;
  std::uint64_t checkpoint_factor = 4;
  /// Diverged when the last `steady_rounds` increment ratios are all at least this.
  double steady_ratio = 0.97;
  std::size_t steady_rounds = 4;
  /// The tail test runs only at multiples of `stride` (a cofinal subsequence of prefixes).
  std::uint64_t stride = 1;
};

/// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

namespace detail {

inline NetVerdict certified_sum(const GeneratorFamily& f, double eps, const NetOptions& opt) {
  const auto& cert = *f.certificate;
  CompensatedSum acc;
  const std::uint64_t stride = std::max<std::uint64_t>(1, opt.stride);
  for (std::uint64_t n = 0; n <= opt.max_terms; ++n) {
    if (n % stride == 0) {
      const double tail = cert.tail(n);
      if (tail < eps) return Converged{acc.value(), tail, n};
    }
    if (n == opt.max_terms) break;
    const double x = f.gen(n);
    if (!(std::abs(x) <= cert.bound(n))) {
      throw InputError(f.description + ": term " + std::to_string(n) + " exceeds its certified bound");
    }
    acc.add(x);
  }
  return Inconclusive{opt.max_terms};
}

inline NetVerdict probe_divergence(const GeneratorFamily& f, const NetOptions& opt) {
  CompensatedSum pos, neg;
  std::uint64_t pos_count = 0, neg_count = 0;
  double largest = 0;
  std::vector<double> pos_marks, neg_marks;
  std::uint64_t next_mark = std::max<std::uint64_t>(1, opt.first_checkpoint);

  auto steady = [&](const std::vector<double>& marks) {
    if (marks.size() < opt.steady_rounds + 2) return false;
    for (std::size_t k = marks.size() - opt.steady_rounds; k < marks.size(); ++k) {
      const double prev = marks[k - 1] - marks[k - 2];
      const double cur = marks[k] - marks[k - 1];
      if (!(prev > 0) || cur < opt.steady_ratio * prev) return false;
    }
    return true;
  };

  for (std::uint64_t n = 0; n < opt.max_terms; ++n) {
    const double x = f.gen(n);
    if (!std::isfinite(x)) throw InputError(f.description + ": term " + std::to_string(n) + " is not finite");
    largest = std::max(largest, std::abs(x));
    if (x > 0) {
      pos.add(x);
      ++pos_count;
    } else if (x < 0) {
      neg.add(-x);
      ++neg_count;
    }
    const double threshold = opt.threshold_scale * (1 + largest);
    const std::uint64_t prefix = n + 1;
    if (pos.value() > threshold) {
      return Diverged{{1, prefix, pos_count, pos.value()}, threshold, "threshold", {}};
    }
    if (neg.value() > threshold) {
      return Diverged{{-1, prefix, neg_count, -neg.value()}, threshold, "threshold", {}};
    }
    if (prefix == next_mark) {
      pos_marks.push_back(pos.value());
      neg_marks.push_back(neg.value());
      next_mark *= std::max<std::uint64_t>(2, opt.checkpoint_factor);
      // The gap between the witness and ∅ exceeds the growth seen so far, and
      // that growth is not slowing down.
      if (steady(pos_marks)) {
        return Diverged{{1, prefix, pos_count, pos.value()}, pos_marks.back() - pos_marks.front(), "steady growth",
                        pos_marks};
      }
      if (steady(neg_marks)) {
        return Diverged{{-1, prefix, neg_count, -neg.value()}, neg_marks.back() - neg_marks.front(),
                        "steady growth", neg_marks};
      }
    }
  }
  return Inconclusive{opt.max_terms};
}

}  // namespace detail

/// The limit of the net of finite partial sums. Certified families sum their
/// prefix until the tail bound drops below eps; others are probed for
/// divergence through their positive and negative parts.
inline NetVerdict extended_sum_real(const GeneratorFamily& f, double eps, const NetOptions& options = {}) {
  if (!(eps > 0)) throw InputError("tolerance must be positive");
  if (!f.gen) throw InputError("generator family has no generator");
  if (f.certificate) return detail::certified_sum(f, eps, options);
  return detail::probe_divergence(f, options);
}

inline GeneratorFamily geometric_family(double a, double r) {
  GeneratorFamily out;
  out.description = "geometric(" + std::to_string(a) + "," + std::to_string(r) + ")";
  out.gen = [a, r](std::uint64_t i) { return a * std::pow(r, static_cast<double>(i)); };
  if (std::abs(r) < 1) {
    const double ar = std::abs(a), rr = std::abs(r);
    out.certificate = AbsoluteBound{
        [ar, rr](std::uint64_t i) { return ar * std::pow(rr, static_cast<double>(i)) * (1 + 1e-12); },
        [ar, rr](std::uint64_t n) { return ar * std::pow(rr, static_cast<double>(n)) / (1 - rr) * (1 + 1e-12); }};
  }
  return out;
}

/// 1/(i+1)^p; certified for p > 1 through the integral bound.
inline GeneratorFamily power_family(double p) {
  GeneratorFamily out;
  out.description = "power(" + std::to_string(p) + ")";
  out.gen = [p](std::uint64_t i) { return std::pow(static_cast<double>(i + 1), -p); };
  if (p > 1) {
    out.certificate = AbsoluteBound{
        [p](std::uint64_t i) { return std::pow(static_cast<double>(i + 1), -p) * (1 + 1e-12); },
        [p](std::uint64_t n) {
          // Σ_{k ≥ n+1} k^{-p} ≤ (n+1)^{-p} + ∫_{n+1}^∞ x^{-p} dx
          const double m = static_cast<double>(n + 1);
          return (std::pow(m, -p) + std::pow(m, 1 - p) / (p - 1)) * (1 + 1e-12);
        }};
  }
  return out;
}

inline GeneratorFamily finite_family(std::vector<double> values) {
  GeneratorFamily out;
  std::string desc = "finite(";
  for (std::size_t i = 0; i < values.size(); ++i) desc += (i ? "," : "") + std::to_string(values[i]);
  out.description = desc + ")";
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  out.gen = [shared](std::uint64_t i) { return i < shared->size() ? (*shared)[i] : 0.0; };
  auto suffix = std::make_shared<std::vector<double>>(shared->size() + 1, 0.0);
  for (std::size_t i = shared->size(); i-- > 0;) (*suffix)[i] = (*suffix)[i + 1] + std::abs((*shared)[i]);
  out.certificate = AbsoluteBound{[shared](std::uint64_t i) { return i < shared->size() ? std::abs((*shared)[i]) : 0.0; },
                                  [suffix](std::uint64_t n) { return n < suffix->size() ? (*suffix)[n] : 0.0; }};
  return out;
}

/// (−1)^i/(i+1): conditionally but not absolutely convergent, so no certificate.
inline GeneratorFamily alternating_harmonic_family() {
  GeneratorFamily out;
  out.description = "alternating_harmonic";
  out.gen = [](std::uint64_t i) { return (i % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(i + 1); };
  return out;
}

/// `geometric(a, r)`, `power(p)`, `finite(x, ...)` or `alternating_harmonic`.
inline GeneratorFamily parse_generator(std::string_view text) {
  text = detail::trim(text);
  const auto open = text.find('(');
  const std::string name(detail::trim(text.substr(0, open)));
  std::vector<double> args;
  if (open != std::string_view::npos) {
    for (auto part : detail::split_top_level(detail::strip_delimiters(text.substr(open), '(', ')'))) {
      const std::string s(part);
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (s.empty() || used != s.size() || !std::isfinite(v)) throw ParseError("not a number: '" + s + "'");
      args.push_back(v);
    }
  }
  auto arity = [&](std::size_t n) {
    if (args.size() != n) throw ParseError(name + " takes " + std::to_string(n) + " argument(s)");
  };
  if (name == "geometric") {
    arity(2);
    return geometric_family(args[0], args[1]);
  }
  if (name == "power") {
    arity(1);
    return power_family(args[0]);
  }
  if (name == "finite") return finite_family(args);
  if (name == "alternating_harmonic") {
    if (open != std::string_view::npos && !args.empty()) throw ParseError("alternating_harmonic takes no arguments");
    return alternating_harmonic_family();
  }
  throw ParseError("unknown generator '" + name + "'");
}

/// The bijection that shuffles each block [kB, (k+1)B) by a seeded
/// permutation. Every prefix of whole blocks is mapped onto itself.
class BlockShuffle {
 public:
  BlockShuffle(std::uint64_t block, std::uint64_t seed) : block_(std::max<std::uint64_t>(1, block)), seed_(seed) {}

  std::uint64_t operator()(std::uint64_t i) const {
    const std::uint64_t k = i / block_;
    std::vector<std::uint64_t> perm(block_);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed_ ^ (k * 0x9E3779B97F4A7C15ULL));
    for (std::uint64_t j = block_ - 1; j > 0; --j) std::swap(perm[j], perm[detail::bounded(rng, j + 1)]);
    return k * block_ + perm[i % block_];
  }
  std::uint64_t block() const { return block_; }

 private:
  std::uint64_t block_;
  std::uint64_t seed_;
};

/// f ∘ π for a block shuffle π. The certificate's tail is taken from the
/// last block boundary at or before n.
inline GeneratorFamily reorder_within_blocks(const GeneratorFamily& f, std::uint64_t block, std::uint64_t seed) {
  BlockShuffle pi(block, seed);
  GeneratorFamily out;
  out.description = f.description + " shuffled(" + std::to_string(pi.block()) + "," + std::to_string(seed) + ")";
  out.gen = [g = f.gen, pi](std::uint64_t i) { return g(pi(i)); };
  if (f.certificate) {
    const auto cert = *f.certificate;
    const std::uint64_t b = pi.block();
    out.certificate = AbsoluteBound{[cert, pi](std::uint64_t i) { return cert.bound(pi(i)); },
                                    [cert, b](std::uint64_t n) { return cert.tail(n / b * b); }};
  }
  return out;
}

/// f and g spliced: even indices from f, odd from g.
inline GeneratorFamily interleave(const GeneratorFamily& f, const GeneratorFamily& g) {
  GeneratorFamily out;
  out.description = "interleave(" + f.description + ", " + g.description + ")";
  out.gen = [a = f.gen, b = g.gen](std::uint64_t i) { return i % 2 == 0 ? a(i / 2) : b(i / 2); };
  if (f.certificate && g.certificate) {
    const auto cf = *f.certificate, cg = *g.certificate;
    out.certificate = AbsoluteBound{
        [cf, cg](std::uint64_t i) { return i % 2 == 0 ? cf.bound(i / 2) : cg.bound(i / 2); },
        [cf, cg](std::uint64_t n) { return cf.tail((n + 1) / 2) + cg.tail(n / 2); }};
  }
  return out;
}

/// Term i is the sum of block [iB, (i+1)B) of f.
inline GeneratorFamily bracket_blocks(const GeneratorFamily& f, std::uint64_t block) {
  block = std::max<std::uint64_t>(1, block);
  GeneratorFamily out;
  out.description = f.description + " bracketed(" + std::to_string(block) + ")";
  out.gen = [g = f.gen, block](std::uint64_t i) {
    CompensatedSum s;
    for (std::uint64_t j = 0; j < block; ++j) s.add(g(i * block + j));
    return s.value();
  };
  if (f.certificate) {
    const auto cert = *f.certificate;
    out.certificate = AbsoluteBound{[cert, block](std::uint64_t i) {
                                      double s = 0;
                                      for (std::uint64_t j = 0; j < block; ++j) s += cert.bound(i * block + j);
                                      return s * (1 + 1e-12);
                                    },
                                    [cert, block](std::uint64_t n) { return cert.tail(n * block); }};
  }
  return out;
}

/// A finite commutative monoid given by its operation table.
class FiniteMonoid {
 public:
  FiniteMonoid(std::string name, std::vector<std::string> names, std::vector<std::vector<std::uint32_t>> table,
               std::uint32_t zero)
      : name_(std::move(name)), names_(std::move(names)), table_(std::move(table)), zero_(zero) {
    const std::size_t n = names_.size();
    if (n == 0) throw InputError(name_ + ": empty carrier");
    if (zero_ >= n) throw InputError(name_ + ": neutral element out of range");
    if (table_.size() != n) throw InputError(name_ + ": table has the wrong number of rows");
    for (const auto& row : table_) {
      if (row.size() != n) throw InputError(name_ + ": table row has the wrong length");
      for (auto v : row) {
        if (v >= n) throw InputError(name_ + ": table entry out of range");
      }
    }
    for (std::uint32_t a = 0; a < n; ++a) {
      if (op(zero_, a) != a) throw InputError(name_ + ": " + names_[zero_] + " is not neutral for " + names_[a]);
      for (std::uint32_t b = 0; b < n; ++b) {
        if (op(a, b) != op(b, a)) throw InputError(name_ + ": operation is not commutative");
        for (std::uint32_t c = 0; c < n; ++c) {
          if (op(op(a, b), c) != op(a, op(b, c))) throw InputError(name_ + ": operation is not associative");
        }
      }
    }
  }

  static FiniteMonoid cyclic(std::uint32_t n) {
    if (n == 0) throw InputError("cyclic order must be positive");
    std::vector<std::string> names;
    std::vector<std::vector<std::uint32_t>> table(n, std::vector<std::uint32_t>(n));
    for (std::uint32_t a = 0; a < n; ++a) {
      names.push_back(std::to_string(a));
      for (std::uint32_t b = 0; b < n; ++b) table[a][b] = (a + b) % n;
    }
    return FiniteMonoid("Z/" + std::to_string(n), std::move(names), std::move(table), 0);
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& names() const { return names_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
  TableElement zero() const { return {zero_}; }
  std::uint32_t op(std::uint32_t a, std::uint32_t b) const { return table_[a][b]; }

  /// x^k for a finite count k, by repeated squaring.
  std::uint32_t power(std::uint32_t x, std::uint64_t k) const {
    std::uint32_t acc = zero_;
    for (; k > 0; k >>= 1, x = op(x, x)) {
      if (k & 1) acc = op(acc, x);
    }
    return acc;
  }

 private:
  std::string name_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::uint32_t>> table_;
  std::uint32_t zero_;
};

/// Under the discrete topology the net of partial sums converges exactly
/// when it is eventually constant, i.e. when only finitely many terms are
/// nonzero.
inline SumResult<TableElement> extended_sum_discrete(const FiniteMonoid& M, const Family<TableElement>& f) {
  for (const auto& e : f.omega_part()) {
    if (e.index >= M.size()) return std::nullopt;
    if (e != M.zero()) return std::nullopt;
  }
  std::uint32_t acc = M.zero().index;
  for (const auto& [e, c] : f.finite_part()) {
    if (e.index >= M.size()) return std::nullopt;
    acc = M.op(acc, M.power(e.index, c));
  }
  return TableElement{acc};
}

inline SigmaInstance<TableElement> discrete_instance(const FiniteMonoid& M) {
  std::vector<TableElement> elems;
  for (std::uint32_t i = 0; i < M.size(); ++i) elems.push_back(TableElement{i});
  return SigmaInstance<TableElement>(M.name() + "/discrete", Carrier<TableElement>::finite(std::move(elems)), M.zero(),
                                     [M](const Family<TableElement>& f) { return extended_sum_discrete(M, f); },
                                     Flavor::finitely_total);
}

inline ElementSyntax<TableElement> monoid_syntax(const FiniteMonoid& M) { return named_syntax(M.names()); }

/// Every map between discrete spaces is continuous, so a monoid
/// homomorphism is all that is required.
inline bool is_monoid_hom(const FiniteMonoid& M, const FiniteMonoid& N, const std::function<std::uint32_t(std::uint32_t)>& h) {
  if (h(M.zero().index) != N.zero().index) return false;
  for (std::uint32_t a = 0; a < M.size(); ++a) {
    if (h(a) >= N.size()) return false;
    for (std::uint32_t b = 0; b < M.size(); ++b) {
      if (h(M.op(a, b)) != N.op(h(a), h(b))) return false;
    }
  }
  return true;
}

/// The weak and finitely-total suites over an extended-sum instance.
template <class E>
LawReport<E> check_hausdorff_axioms(const SigmaInstance<E>& X, const Budget& budget) {
  auto names = laws::weak();
  for (const auto& l : laws::finitely_total()) names.push_back(l);
  return check_laws(X, names, budget);
}

}  // namespace sigma
