// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Expected values come from the oracles in support.hpp or
// are written out by hand below.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace sigma;

namespace {

struct Outcome {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

template <class E>
std::string verdict_summary(const LawReport<E>& r) {
  std::ostringstream out;
  for (const auto& l : r.laws) out << l.law << "=" << to_string(l.verdict) << " ";
  return out.str();
}

Budget enumeration(std::size_t size, std::size_t omega, std::uint64_t seed = 7) {
  Budget b;
  b.max_finite_size = size;
  b.max_omega_elems = omega;
  b.seed = seed;
  return b;
}

// 1 ----------------------------------------------------------------------

Outcome weak_suites() {
  Outcome o;
  Budget b = enumeration(5, 1, 7);
  b.caps.max_blocks = 4;
  b.caps.max_block_size = 4;
  const auto start = std::chrono::steady_clock::now();
  auto run = [&](const auto& X) {
    const auto r = check_weak(X, b);
    o.require(!r.any_failure(), X.name() + " weak suite: " + verdict_summary(r));
    o.note(X.name() + ": " + verdict_summary(r));
  };
  run(pm_instance());
  run(powerset_parity_instance({"a", "b"}));
  run(real_abs_instance());
  run(int_group_instance());
  run(ext_nat_instance());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(seconds < 60, "runtime " + std::to_string(seconds) + " s exceeds 60 s");
  o.note("runtime " + std::to_string(seconds) + " s");
  return o;
}

// 2 ----------------------------------------------------------------------

template <class E>
const LawResult<E>* failing(const LawReport<E>& r, const std::string& law) {
  const auto* l = r.find(law);
  return l && l->verdict == Verdict::fail && l->witness ? l : nullptr;
}
template <class E>
const LawResult<E>* failing(LawReport<E>&&, const std::string&) = delete;

Outcome negative_witnesses() {
  Outcome o;
  const Budget b = enumeration(4, 1);

  const auto pm = pm_instance();
  const auto pm_report = check_strong(pm, b);
  const auto* sub = failing(pm_report, "subsummability");
  o.require(sub && sub->witness->family == Family<Pm>{Pm::plus, Pm::plus, Pm::minus} &&
                sub->witness->other == Family<Pm>{Pm::plus, Pm::plus},
            "pm subsummability witness ({+,+,-},{+,+})");

  const auto iv = interval_instance();
  const auto iv_report = check_strong(iv.instance, b);
  const auto* isub = failing(iv_report, "subsummability");
  o.require(isub && isub->witness->family == Family<ExactReal>{ExactReal(3, 4), ExactReal(1, 2), ExactReal(-1, 4)} &&
                isub->witness->other == Family<ExactReal>{ExactReal(3, 4), ExactReal(1, 2)},
            "interval subsummability witness ({0.75,0.5,-0.25},{0.75,0.5})");
  if (isub) {
    o.note("interval witness " + format_family(isub->witness->family, real_syntax()) + " / " +
           format_family(*isub->witness->other, real_syntax()));
  }

  const auto int_report = check_strong(int_group_instance(), b);
  const auto* zs = failing(int_report, "zero_sum_all_zero");
  o.require(zs && zs->witness->family == Family<ExactReal>{ExactReal(5), ExactReal(-5)},
            "int zero-sum witness {5,-5}");
  return o;
}

// 3 ----------------------------------------------------------------------

template <class E>
void padding_exhaustive(Outcome& o, const SigmaInstance<E>& X, const Budget& b) {
  std::size_t summable = 0;
  for (const auto& f : budget_families(X, b)) {
    const auto s = X.sum(f);
    if (!s) continue;
    ++summable;
    for (Multiplicity k : {Multiplicity(1), Multiplicity(2), kOmega}) {
      const auto padded = disjoint_union(f, Family<E>::repeated(X.zero(), k));
      if (X.sum(padded) != s) {
        o.require(false, X.name() + ": padding by " + k.str() + " zeros changes a sum");
        return;
      }
    }
    if (X.sum(f.without(X.zero())) != s) {
      o.require(false, X.name() + ": stripping zeros changes a sum");
      return;
    }
  }
  o.require(check_padding(X, b).verdict != Verdict::fail, X.name() + ": padding law reports a failure");
  o.note(X.name() + ": " + std::to_string(summable) + " summable families");
}

Outcome padding() {
  Outcome o;
  const Budget b = enumeration(4, 1);
  padding_exhaustive(o, pm_instance(), b);
  padding_exhaustive(o, powerset_parity_instance({"a", "b"}), b);
  padding_exhaustive(o, real_abs_instance(), b);
  padding_exhaustive(o, int_group_instance(), b);
  padding_exhaustive(o, ext_nat_instance(), b);
  padding_exhaustive(o, interval_instance().instance, b);
  padding_exhaustive(o, unit_instance(), b);
  for (std::uint32_t n : {1u, 2u, 3u, 4u, 6u}) padding_exhaustive(o, cyclic_instance(n), b);
  return o;
}

// 4 ----------------------------------------------------------------------

Outcome construction_flavors() {
  Outcome o;
  const Budget b = enumeration(3, 1);
  const auto cb = construction_budget();

  const auto en = ext_nat_instance();
  const auto en2 = product(en, en);
  o.require(en2.instance.declared_flavor() == Flavor::strong, "extnat x extnat declared strong");
  const auto sp = check_strong(en2.instance, b);
  o.require(!sp.any_failure(), "extnat x extnat strong suite: " + verdict_summary(sp));

  const auto id = verify_hom<ExtNat, ExtNat>("id", [](const ExtNat& x) { return x; }, en, en, cb);
  const auto twice = verify_hom<ExtNat, ExtNat>(
      "twice", [](const ExtNat& x) { return x.infinite ? x : ExtNat{2 * x.value}; }, en, en, cb);
  const auto se = check_strong(equaliser(id, twice).instance, b);
  o.require(!se.any_failure(), "eq(id, twice) on extnat strong suite: " + verdict_summary(se));

  const auto z2 = cyclic_instance(2), z3 = cyclic_instance(3), z4 = cyclic_instance(4);
  const auto fp = check_ft_and_group(product(z2, z3).instance, b);
  o.require(fp.satisfies(Flavor::finitely_total), "Z/2 x Z/3 ft suite: " + verdict_summary(fp));
  const auto rp = check_ft_and_group(product(real_abs_instance(), int_group_instance()).instance, b);
  o.require(rp.satisfies(Flavor::finitely_total), "real x int ft suite: " + verdict_summary(rp));
  const auto zid = verify_hom<TableElement, TableElement>("id", [](const TableElement& x) { return x; }, z4, z4, cb);
  const auto neg = verify_hom<TableElement, TableElement>(
      "neg", [](const TableElement& x) { return TableElement{(4 - x.index) % 4}; }, z4, z4, cb);
  const auto fe = check_ft_and_group(equaliser(zid, neg).instance, b);
  o.require(fe.satisfies(Flavor::finitely_total), "eq(id, neg) on Z/4 ft suite: " + verdict_summary(fe));

  const auto P = product(pm_instance(), pm_instance());
  std::size_t checked = 0, mismatches = 0;
  for (const auto& f : budget_families(P.instance, enumeration(4, 1))) {
    Family<Pm> left, right;
    for (const auto& [p, m] : f.entries()) {
      left.add(p.first, m);
      right.add(p.second, m);
    }
    const auto l = support::pm_oracle(left), r = support::pm_oracle(right);
    const SumResult<PairElement<Pm, Pm>> expected =
        l && r ? SumResult<PairElement<Pm, Pm>>(PairElement<Pm, Pm>(*l, *r)) : std::nullopt;
    ++checked;
    if (P.instance.sum(f) != expected) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " pm x pm families disagree with the projection oracle");
  o.note("pm x pm: " + std::to_string(checked) + " families cross-checked");
  return o;
}

// 5 ----------------------------------------------------------------------

Outcome internal_homs() {
  Outcome o;
  const auto I = unit_instance();
  const auto cb = construction_budget();
  const auto II = internal_hom(I, I, cb);
  const auto id = II.tabulate([](const Unit& u) { return u; });
  const auto zero = II.tabulate([](const Unit&) { return Unit::zero; });
  auto carrier = II.instance.carrier().samples();
  std::sort(carrier.begin(), carrier.end());
  auto expected = std::vector<HomTable<Unit>>{id, zero};
  std::sort(expected.begin(), expected.end());
  o.require(carrier == expected, "[I,I] carrier is {id, const0}");

  // Pointwise oracle: sum each column in I by counting ones.
  auto pointwise = [&](const Family<HomTable<Unit>>& f) -> SumResult<HomTable<Unit>> {
    HomTable<Unit> t;
    for (const auto& x : II.domain) {
      std::size_t ones = 0;
      bool infinite = false;
      for (const auto& [h, m] : f.entries()) {
        if (II.apply(h, x) != Unit::one) continue;
        if (m.is_omega()) infinite = true;
        else ones += m.finite();
      }
      if (infinite || ones > 1) return std::nullopt;
      t.values.push_back(ones == 1 ? Unit::one : Unit::zero);
    }
    if (std::find(carrier.begin(), carrier.end(), t) == carrier.end()) return std::nullopt;
    return t;
  };
  std::size_t families = 0;
  for (const auto& f : budget_families(II.instance, enumeration(2, 0))) {
    ++families;
    o.require(II.instance.sum(f) == pointwise(f), "[I,I] sum disagrees with the pointwise oracle");
  }
  for (const auto& f : budget_families(II.instance, enumeration(2, 1))) {
    o.require(II.instance.sum(f) == pointwise(f), "[I,I] sum disagrees with the pointwise oracle (omega)");
  }
  o.note(std::to_string(families) + " finite hom-families of size <= 2 checked");

  const auto Ipm = internal_hom(I, pm_instance(), cb);
  const auto r = check_weak(Ipm.instance, enumeration(4, 1));
  o.require(!r.any_failure(), "[I,pm] weak suite: " + verdict_summary(r));
  o.note("[I,pm]: " + std::to_string(Ipm.instance.carrier().samples().size()) + " homs; " + verdict_summary(r));
  return o;
}

// 6 ----------------------------------------------------------------------

template <class E>
void unitors_and_ev(Outcome& o, const SigmaInstance<E>& X, const Budget& b) {
  const auto I = unit_instance();
  o.require(check_bilinear<Unit, E, E>(left_unitor(X), I, X, X, b).ok, "l on " + X.name());
  o.require(check_bilinear<E, Unit, E>(right_unitor(X), X, I, X, b).ok, "r on " + X.name());
  const auto H = internal_hom(I, X, b);
  o.require(check_bilinear<HomTable<E>, Unit, E>(evaluation(H), H.instance, I, X, b).ok, "ev on [I," + X.name() + "]");
}

Outcome bilinearity() {
  Outcome o;
  const Budget b = construction_budget();
  unitors_and_ev(o, pm_instance(), b);
  unitors_and_ev(o, powerset_parity_instance({"a", "b"}), b);
  unitors_and_ev(o, unit_instance(), b);
  for (std::uint32_t n : {2u, 3u, 4u}) unitors_and_ev(o, cyclic_instance(n), b);
  const auto pm = pm_instance();
  const auto p1 = check_bilinear<Pm, Pm, Pm>([](const Pm& a, const Pm&) { return a; }, pm, pm, pm, b);
  o.require(!p1.ok && p1.fixed_first && p1.second_family, "pi_1 fails with a witness");
  if (p1.fixed_first && p1.second_family) {
    o.note("pi_1(" + pm_syntax().format(*p1.fixed_first) + ", -) breaks on " +
           format_family(*p1.second_family, pm_syntax()));
    // Replay: Σ of the witness exists, but the constant map's image does not sum to its value.
    const auto s = pm.sum(*p1.second_family);
    const auto image = map_family<Pm>([&](const Pm&) { return *p1.fixed_first; }, *p1.second_family);
    o.require(s && pm.sum(image) != SumResult<Pm>(*p1.fixed_first), "pi_1 witness replays");
  }
  return o;
}

// 7 ----------------------------------------------------------------------

Outcome free_strong() {
  Outcome o;
  // (a)
  const auto en = ext_nat_instance();
  const Congruence<ExtNat> steps(en, enumeration(0, 0), 1);
  std::size_t pairs = 0;
  for (const auto& a : budget_families(en, enumeration(3, 1))) {
    for (const auto& link : steps.successors(a)) {
      ++pairs;
      const auto t = step_target(en, link.step);
      o.require(t && *t == link.to, "extnat step replays");
      o.require(en.sum(link.to) == support::ext_nat_oracle(a), "extnat step changes the sum");
    }
  }
  o.note("(a) " + std::to_string(pairs) + " extnat steps");

  // (b) a ~ a', c ~ c' via sampled one-step links; the union chain must replay.
  const auto pm = pm_instance();
  const Congruence<Pm> cong(pm, enumeration(0, 0), 1);
  support::Gen gen(7);
  const auto& samples = pm.carrier().samples();
  auto step_from = [&](const Family<Pm>& f) -> std::vector<ChainLink<Pm>> {
    const auto links = cong.successors(f);
    if (links.empty()) return {};
    return {links[gen.below(links.size())]};
  };
  std::size_t sampled = 0;
  while (sampled < 200) {
    const auto a = gen.family(samples, 3, 0), c = gen.family(samples, 3, 0);
    const auto left = step_from(a), right = step_from(c);
    const auto a2 = left.empty() ? a : left.front().to;
    const auto c2 = right.empty() ? c : right.front().to;
    const auto chain = congruent_union(left, a2, right, c);
    o.require(verify_chain(pm, disjoint_union(a, c), disjoint_union(a2, c2), chain),
              "union chain for " + format_family(a, pm_syntax()) + " + " + format_family(c, pm_syntax()));
    ++sampled;
  }
  o.note("(b) " + std::to_string(sampled) + " sampled pairs");

  // (c)
  const auto f = verify_hom<Pm, ExtNat>("const0", [](const Pm&) { return ExtNat{0}; }, pm, en, construction_budget());
  const auto A = build_Af(pm, en, f, enumeration(3, 2));
  const auto strong = check_strong(A.instance, construction_budget());
  o.require(!strong.any_failure(), "A_f strong suite: " + verdict_summary(strong));
  o.note("(c) " + std::to_string(A.congruence->classes().size()) + " classes over " +
         std::to_string(A.congruence->universe().size()) + " families; " + verdict_summary(strong));
  const auto fac = eta_and_factorize(A, f);
  o.require(fac.eta_ok, "eta is a homomorphism");
  o.require(fac.f_bar_ok, "f_bar is a homomorphism");
  o.require(fac.commutes, "f = f_bar . eta");

  // (d)
  const Family<Pm> ppm{Pm::plus, Pm::plus, Pm::minus}, p{Pm::plus};
  o.require(A.class_of(ppm) == A.class_of(p), "[{+,+,-}] = [{+}]");
  const auto chain = A.congruence->equivalent(ppm, p);
  o.require(chain.related && verify_chain(pm, ppm, p, chain.chain), "chain {+,+,-} ~ {+} replays");
  o.note("(d) chain of " + std::to_string(chain.chain.size()) + " link(s), depth " +
         std::to_string(A.congruence->depth()));
  return o;
}

// 8 ----------------------------------------------------------------------

Outcome net_engine() {
  Outcome o;
  const double eps = 1e-9;
  const auto g = geometric_family(0.5, 0.5);
  support::Gen gen(8);
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t block = 1 + gen.below(64), seed = gen.below(1u << 30);
    const auto v = extended_sum_real(reorder_within_blocks(g, block, seed), eps);
    const auto* c = std::get_if<Converged>(&v);
    o.require(c && std::abs(c->value - 1.0) <= eps, "reordering " + std::to_string(i) + " within 1e-9 of 1");
    if (c) {
      lo = std::min(lo, c->value);
      hi = std::max(hi, c->value);
    }
  }
  o.require(hi - lo <= 2e-9, "spread across reorderings");
  std::ostringstream spread;
  spread << "spread " << hi - lo;
  o.note(spread.str());

  o.require(std::holds_alternative<Diverged>(extended_sum_real(alternating_harmonic_family(), eps)),
            "alternating harmonic diverges");

  const Budget b = enumeration(5, 2);
  for (std::uint32_t n : {2u, 4u}) {
    const auto M = FiniteMonoid::cyclic(n);
    const auto X = cyclic_instance(n);
    std::size_t count = 0;
    for (const auto& fam : budget_families(X, b)) {
      ++count;
      o.require(extended_sum_discrete(M, fam) == X.sum(fam), "Z/" + std::to_string(n) + " discrete sum");
      o.require(extended_sum_discrete(M, fam) == support::cyclic_oracle(n, fam), "Z/" + std::to_string(n) + " oracle");
    }
    o.note("Z/" + std::to_string(n) + ": " + std::to_string(count) + " families");
  }

  const auto z4 = FiniteMonoid::cyclic(4), z2 = FiniteMonoid::cyclic(2);
  auto h = [](const TableElement& x) { return TableElement{x.index % 2}; };
  o.require(is_monoid_hom(z4, z2, [](std::uint32_t x) { return x % 2; }), "x mod 2 is a monoid hom");
  std::size_t defined = 0;
  for (const auto& fam : budget_families(cyclic_instance(4), b)) {
    const auto s = extended_sum_discrete(z4, fam);
    if (!s) continue;
    ++defined;
    o.require(extended_sum_discrete(z2, map_family<TableElement>(h, fam)) == SumResult<TableElement>(h(*s)),
              "Z/4 -> Z/2 preserves " + format_family(fam, monoid_syntax(z4)));
  }
  o.note(std::to_string(defined) + " defined Z/4 extended sums mapped");
  return o;
}

// 9 ----------------------------------------------------------------------

std::string capture(const std::string& cmd, int& code) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome determinism() {
  Outcome o;
  const std::string path = SIGMA_SUM_PATH;
  for (const std::string flags : {"--instance pm --laws strong --seed 7",
                                  "--instance int --laws weak,strong,group --trials 32 --seed 3",
                                  "--instance parity:a,b --laws weak --max-size 5"}) {
    const std::string cmd = path + " check " + flags + " 2>/dev/null";
    int c1 = 0, c2 = 0;
    const auto a = capture(cmd, c1), b = capture(cmd, c2);
    o.require(!a.empty() && a == b && c1 == c2, "identical reports for: " + flags);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 weak suites on shipped instances", weak_suites},
      {"2 negative witnesses", negative_witnesses},
      {"3 padding with zeros", padding},
      {"4 constructions keep their flavor", construction_flavors},
      {"5 internal hom", internal_homs},
      {"6 bilinearity", bilinearity},
      {"7 free strong quotient", free_strong},
      {"8 net sums", net_engine},
      {"9 deterministic reports", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << '\n';
    for (const auto& n : o.notes) std::cout << "     " << n << '\n';
    failed += o.ok ? 0 : 1;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
