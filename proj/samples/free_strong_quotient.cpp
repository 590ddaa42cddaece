// The quotient A_f for a map into a strong instance, and the factorization
// of that map through it.
#include <iostream>

#include "sigma/sigma.hpp"

int main() {
  using namespace sigma;
  const auto extnat = ext_nat_instance();
  const auto id = verify_hom<ExtNat, ExtNat>("id", [](const ExtNat& x) { return x; }, extnat, extnat,
                                            construction_budget());
  Budget universe;
  universe.max_finite_size = 2;
  universe.max_omega_elems = 1;
  const auto A = build_Af(extnat, extnat, id, universe);
  const auto syntax = ext_nat_syntax();

  std::cout << A.congruence->classes().size() << " classes over " << A.congruence->universe().size()
            << " families\n";
  for (const auto& c : A.instance.carrier().samples()) std::cout << "  [" << format_family(c.rep, syntax) << "]\n";

  const Family<ExtNat> a{ExtNat{1}, ExtNat{1}}, b{ExtNat{2}};
  const auto chain = A.congruence->equivalent(a, b);
  std::cout << format_family(a, syntax) << " ~ " << format_family(b, syntax) << ": "
            << (chain.related ? "yes" : "no") << " in " << chain.chain.size() << " step(s)\n";

  const auto fac = eta_and_factorize(A, id);
  std::cout << "eta " << (fac.eta_ok ? "ok" : "fails") << ", f_bar " << (fac.f_bar_ok ? "ok" : "fails")
            << ", f = f_bar . eta " << (fac.commutes ? "holds" : "fails") << '\n';
  return fac.diagram_ok() ? 0 : 1;
}
