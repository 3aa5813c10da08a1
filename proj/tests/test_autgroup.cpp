#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "topgal/autgroup.hpp"
#include "topgal/fraisse.hpp"

using namespace topgal;

namespace {

// Oracle: bijections preserving and reflecting every relation of a single-sorted relational structure.
std::size_t brute_automorphism_count(const FiniteStructure& s) {
  std::vector<int> p(s.size());
  std::iota(p.begin(), p.end(), 0);
  std::size_t count = 0;
  do {
    bool ok = true;
    for (std::size_t r = 0; r < s.signature().relations().size() && ok; ++r)
      for (const auto& t : s.tuples(static_cast<int>(r))) {
        std::vector<int> img;
        for (int x : t) img.push_back(p[static_cast<std::size_t>(x)]);
        if (!s.holds(static_cast<int>(r), img)) ok = false;
      }
    count += ok;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

// Oracle: orbits of tuples by applying every group element.
std::size_t brute_orbit_count(const PermutationGroup& g, std::size_t k, bool distinct) {
  std::set<std::vector<int>> seen;
  std::size_t count = 0;
  std::vector<int> t(k, 0);
  const int n = static_cast<int>(g.degree());
  while (true) {
    std::set<int> s(t.begin(), t.end());
    if ((!distinct || s.size() == k) && !seen.count(t)) {
      ++count;
      for (const auto& p : g.elements()) {
        std::vector<int> img;
        for (int x : t) img.push_back(p[static_cast<std::size_t>(x)]);
        seen.insert(img);
      }
    }
    std::size_t i = k;
    while (i > 0 && t[i - 1] == n - 1) t[--i] = 0;
    if (i == 0) break;
    ++t[i - 1];
  }
  return count;
}

// Oracle: G-maps G/U → G/V correspond to cosets yV fixed by every element of U.
std::size_t brute_gmap_count(const Subgroup& u, const Subgroup& v) {
  const auto& g = *u.parent;
  std::set<std::set<int>> fixed;
  for (int y = 0; y < static_cast<int>(g.order()); ++y) {
    std::set<int> coset;
    for (int x : v.elements) coset.insert(g.multiply(y, x));
    bool ok = true;
    for (int w : u.elements) {
      std::set<int> moved;
      for (int c : coset) moved.insert(g.multiply(w, c));
      ok = ok && moved == coset;
    }
    if (ok) fixed.insert(coset);
  }
  return fixed.size();
}

Subgroup cyc(const GroupPtr& g, const std::string& c) {
  return generated_subgroup(g, {permutation_from_cycles(g->degree(), c)});
}

}  // namespace

TEST_CASE("cycle notation") {
  auto p = permutation_from_cycles(4, "(1 2)(3 4)");
  CHECK(p == Permutation{1, 0, 3, 2});
  CHECK(cycles_to_string(p) == "(1 2)(3 4)");
  CHECK(cycles_to_string(identity_permutation(3)) == "()");
  CHECK(permutation_from_cycles(3, "()") == identity_permutation(3));
  CHECK(cycles_to_string(permutation_from_cycles(3, "(1 2 3)")) == "(1 2 3)");
  CHECK_THROWS_AS(permutation_from_cycles(3, "(1 4)"), Error);
  CHECK_THROWS_AS(permutation_from_cycles(3, "(1 2)(2 3)"), Error);
  CHECK_THROWS_AS(permutation_from_cycles(3, "1 2"), Error);
  // q applied first
  auto a = permutation_from_cycles(3, "(1 2)"), b = permutation_from_cycles(3, "(2 3)");
  CHECK(compose_permutations(a, b) == permutation_from_cycles(3, "(1 2 3)"));
}

TEST_CASE("automorphism groups against brute force") {
  CHECK(automorphisms(share(make_graph(3, {{0, 1}, {1, 2}, {0, 2}})))->order() == 6);
  CHECK(automorphisms(share(make_graph(3, {{0, 1}, {1, 2}})))->order() == 2);
  for (std::size_t n = 0; n <= 5; ++n) {
    auto g = automorphisms(share(make_graph(n, {})));
    std::size_t fact = 1;
    for (std::size_t i = 2; i <= n; ++i) fact *= i;
    CHECK(g->order() == fact);
  }
  for (const auto& m : make_class("graphs")->members(5)) CHECK(automorphisms(m)->order() == brute_automorphism_count(*m));
  auto v4 = automorphisms(share(make_named_group("V4")));
  CHECK(v4->order() == 6);
  CHECK(automorphisms(share(make_named_group("Z8")))->order() == 4);
  CHECK(automorphisms(share(make_named_group("Q8")))->order() == 24);
  CHECK(v4->elements().front() == identity_permutation(4));
}

TEST_CASE("pointwise stabilizers") {
  auto s4 = symmetric_group(4);
  CHECK(s4->order() == 24);
  auto st = pointwise_stabilizer(s4, {0, 1});
  CHECK(st.order() == 2);
  CHECK(st.contains(s4->index_of(permutation_from_cycles(4, "(3 4)"))));
  CHECK(pointwise_stabilizer(s4, {}).order() == 24);
  CHECK_THROWS_AS(pointwise_stabilizer(s4, {4}), Error);
  // GL2(F2) fixing a nonzero vector
  auto v4 = automorphisms(share(make_named_group("V4")));
  CHECK(pointwise_stabilizer(v4, {1}).order() == 2);
  // h I_t h⁻¹ = I_{h(t)}
  for (const std::vector<int>& t : std::vector<std::vector<int>>{{0}, {0, 1}, {2, 0}, {3, 3}})
    for (int h = 0; h < static_cast<int>(s4->order()); ++h) {
      std::vector<int> ht;
      for (int x : t) ht.push_back(s4->element(h)[static_cast<std::size_t>(x)]);
      CHECK(pointwise_stabilizer(s4, ht).elements == conjugate(pointwise_stabilizer(s4, t), h).elements);
    }
}

TEST_CASE("orbits on tuples") {
  auto c5 = automorphisms(share(make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}})));
  CHECK(orbits(c5, 1).size() == 1);
  CHECK(orbits(c5, 2, true).size() == 2);
  CHECK(orbits(c5, 2).size() == 3);
  auto trivial = make_permutation_group(4, {});
  CHECK(orbits(trivial, 1).size() == 4);
  auto p4 = automorphisms(share(make_graph(4, {{0, 1}, {1, 2}, {2, 3}})));
  for (std::size_t k = 0; k <= 3; ++k)
    for (bool d : {false, true}) {
      CHECK(orbits(c5, k, d).size() == brute_orbit_count(*c5, k, d));
      CHECK(orbits(p4, k, d).size() == brute_orbit_count(*p4, k, d));
    }
  auto o = orbits(c5, 2);
  CHECK(o.front().representative == std::vector<int>{0, 0});
  for (const auto& orb : o) CHECK(orb.representative == *std::min_element(orb.members.begin(), orb.members.end()));
}

TEST_CASE("algebraic bases") {
  auto s3 = symmetric_group(3);
  std::vector<Subgroup> stabs;
  for (std::size_t k = 0; k <= 3; ++k)
    for (const auto& orb : orbits(s3, k))
      for (const auto& t : orb.members) stabs.push_back(pointwise_stabilizer(s3, t));
  CHECK(check_algebraic_base(s3, stabs).holds);
  auto bad = check_algebraic_base(s3, {cyc(s3, "(1 2)")});
  CHECK_FALSE(bad.holds);
  CHECK(bad.failure == "conjugation");
  CHECK(check_algebraic_base(s3, {whole_group(s3)}).holds);
  auto inter = check_algebraic_base(s3, {cyc(s3, "(1 2)"), cyc(s3, "(1 3)"), cyc(s3, "(2 3)")});
  CHECK_FALSE(inter.holds);
  CHECK(inter.failure == "intersection");

  // stabilizers of the tuples of a Fraisse stage
  auto chain = build_chain(make_class("graphs"), 2);
  auto g = automorphisms(chain.last().structure);
  std::vector<Subgroup> base;
  for (std::size_t k = 0; k <= 2; ++k)
    for (const auto& orb : orbits(g, k))
      for (const auto& t : orb.members) base.push_back(pointwise_stabilizer(g, t));
  CHECK(check_algebraic_base(g, base).holds);
}

TEST_CASE("coset arrows") {
  auto s3 = symmetric_group(3);
  auto u12 = cyc(s3, "(1 2)"), u13 = cyc(s3, "(1 3)"), u123 = cyc(s3, "(1 2 3)");
  auto e = trivial_subgroup(s3);

  auto self = hom_cosets(u12, u12);
  REQUIRE(self.size() == 1);
  CHECK(self.front().representative == PermutationGroup::identity());
  CHECK(is_iso_arrow(self.front()));
  CHECK(hom_cosets(e, u12).size() == 3);
  auto cross = hom_cosets(u12, u13);
  CHECK(cross.size() == brute_gmap_count(u12, u13));
  CHECK(cross.size() == 1);
  for (const auto& arr : cross) CHECK(is_iso_arrow(arr));
  CHECK(hom_cosets(u123, u12).empty());

  auto s4 = symmetric_group(4);
  auto u = cyc(s4, "(1 2)");
  auto v = generated_subgroup(s4, {permutation_from_cycles(4, "(1 2)"), permutation_from_cycles(4, "(3 4)")});
  CosetArrow proper{u, v, PermutationGroup::identity()};
  CHECK(is_valid_arrow(proper));
  CHECK_FALSE(is_iso_arrow(proper));

  // counts, identities and composition over all subgroup pairs of S4
  auto subs = all_subgroups(s4);
  for (const auto& a : subs) {
    auto ids = hom_cosets(a, a);
    CHECK(std::any_of(ids.begin(), ids.end(), [](const CosetArrow& x) { return x.representative == 0; }));
  }
  for (std::size_t i = 0; i < subs.size(); i += 3)
    for (std::size_t j = 0; j < subs.size(); j += 2) {
      auto first = hom_cosets(subs[i], subs[j]);
      CHECK(first.size() == brute_gmap_count(subs[i], subs[j]));
      for (std::size_t k = 0; k < subs.size(); k += 5)
        for (const auto& f : first)
          for (const auto& h : hom_cosets(subs[j], subs[k])) CHECK(is_valid_arrow(compose_arrows(f, h)));
    }
}

TEST_CASE("transitive G-sets and double cosets") {
  auto s3 = symmetric_group(3);
  auto u12 = cyc(s3, "(1 2)"), u13 = cyc(s3, "(1 3)"), u123 = cyc(s3, "(1 2 3)");
  CHECK(transitive_gsets_isomorphic(u12, u13));
  CHECK_FALSE(transitive_gsets_isomorphic(u12, u123));
  CHECK(transitive_gsets_isomorphic(u12, u12));

  auto dc = double_cosets(u12);
  CHECK(dc.count() == 2);
  std::multiset<std::size_t> sizes;
  for (const auto& c : dc.cosets) sizes.insert(c.size());
  CHECK(sizes == std::multiset<std::size_t>{2, 4});
  CHECK(double_cosets(trivial_subgroup(s3)).count() == 6);
  CHECK(double_cosets(whole_group(s3)).count() == 1);

  auto s4 = symmetric_group(4);
  for (const auto& h : all_subgroups(s4)) CHECK(double_cosets(h).count() == orbits_on_cosets(h, h));
}

TEST_CASE("subgroup lattices and discrete completeness") {
  CHECK(all_subgroups(symmetric_group(3)).size() == 6);
  CHECK(all_subgroups(symmetric_group(4)).size() == 30);
  CHECK(all_subgroups(automorphisms(share(make_named_group("V4")))).size() == 6);
  auto regular_v4 = make_permutation_group(4, {permutation_from_cycles(4, "(1 2)(3 4)"), permutation_from_cycles(4, "(1 3)(2 4)")});
  CHECK(all_subgroups(regular_v4).size() == 5);
  CHECK_THROWS_AS(all_subgroups(symmetric_group(6)), ResourceLimit);
  CHECK_THROWS_AS(subgroup_from_elements(symmetric_group(3), {identity_permutation(3), permutation_from_cycles(3, "(1 2 3)")}), Error);

  for (const auto& g : {make_permutation_group(1, {}), symmetric_group(3), regular_v4, symmetric_group(4)}) {
    auto r = is_complete_discrete(g);
    CHECK(r.holds);
    CHECK(r.families == g->order());
  }
}
