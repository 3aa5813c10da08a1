#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "topgal/galois.hpp"

using namespace topgal;

namespace {

ChainPtr chain_of(const std::string& cls, std::size_t rounds) {
  return std::make_shared<const StageChain>(build_chain(make_class(cls), rounds));
}

ArrowToLimit arrow_at(const ChainPtr& chain, std::size_t stage, const StructurePtr& src, std::vector<int> map) {
  return arrow_into(chain, stage, Embedding{src, chain->stages[stage].structure, std::move(map)});
}

// First edge / non-edge of a graph stage.
std::pair<int, int> find_pair(const FiniteStructure& g, bool adjacent) {
  for (int a = 0; a < static_cast<int>(g.size()); ++a)
    for (int b = 0; b < static_cast<int>(g.size()); ++b)
      if (a != b && g.holds(0, std::vector<int>{a, b}) == adjacent) return {a, b};
  FAIL("no such pair");
  return {-1, -1};
}

// Oracle: set partitions of k positions, counted by number of blocks.
void equality_patterns(std::size_t k, const std::function<void(std::size_t)>& visit) {
  std::vector<std::size_t> block(k, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == k) {
      visit(used);
      return;
    }
    for (std::size_t b = 0; b <= used; ++b) {
      block[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
}

// Oracle: pointed types with all m blocks distinguished = labeled structures on m points.
std::size_t brute_type_count(const std::string& cls, std::size_t k) {
  std::size_t total = 0;
  equality_patterns(k, [&](std::size_t m) {
    std::size_t labeled = 1;
    if (cls == "graphs")
      for (std::size_t i = 0; i < m * (m - 1) / 2; ++i) labeled *= 2;
    else if (cls == "linear_orders")
      for (std::size_t i = 2; i <= m; ++i) labeled *= i;
    total += labeled;
  });
  return total;
}

}  // namespace

TEST_CASE("splitting over generated substructures") {
  auto cls = make_class("graphs");
  auto g = share(make_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
  auto r = splits_over(*cls, g, {0, 1}, 2);
  CHECK(r.splits == Tri::yes);
  REQUIRE(r.witness);
  // the two copies of vertex 2 are distinct and non-adjacent in the free amalgam
  int c1 = r.witness->left.map[2], c2 = r.witness->right.map[2];
  CHECK(c1 != c2);
  CHECK_FALSE(r.witness->d->holds(0, std::vector<int>{c1, c2}));
  CHECK(splits_over(*cls, g, {0, 1}, 0).splits == Tri::no);

  auto ba = make_class("boolean_algebras");
  auto b2 = share(make_boolean_algebra(2));
  auto view = atom_view(*b2);
  REQUIRE(view);
  const int x = view->atoms[0], not_x = view->atoms[1];
  CHECK(splits_over(*ba, b2, {x}, not_x).splits == Tri::no);
  CHECK(splits_over(*ba, share(make_boolean_algebra(3)), {atom_view(make_boolean_algebra(3))->atoms[0]},
                    atom_view(make_boolean_algebra(3))->atoms[1])
            .splits == Tri::yes);
}

TEST_CASE("stabilizer containment and factorization in a graph stage") {
  auto chain = chain_of("graphs", 3);
  const std::size_t s = 3;
  const auto& stage = *chain->stages[s].structure;
  auto [a, b] = find_pair(stage, true);
  int c = -1;
  for (int v = 0; v < static_cast<int>(stage.size()) && c < 0; ++v)
    if (v != a && v != b) c = v;
  auto k1 = share(make_graph(1, {}));
  auto k2 = share(make_graph(2, {{0, 1}}));
  auto edge = arrow_at(chain, s, k2, {a, b});
  auto va = arrow_at(chain, s, k1, {a});
  auto vc = arrow_at(chain, s, k1, {c});

  CHECK(stabilizer_subset(edge, va) == Tri::yes);
  CHECK(stabilizer_subset(edge, vc) == Tri::no);
  CHECK(stabilizer_subset(va, edge) == Tri::no);
  CHECK(stabilizer_subset(edge, edge) == Tri::yes);

  auto f = factor(va, edge);
  CHECK(f.unique());
  REQUIRE(f.arrow);
  CHECK(f.arrow->map == std::vector<int>{0});
  CHECK(factor(edge, edge).unique());
  CHECK(factor(edge, edge).arrow->map == std::vector<int>{0, 1});
  CHECK(factor(vc, edge).count == 0);
  CHECK_FALSE(factor(vc, edge).arrow);

  SUBCASE("answers survive pushing to later stages") {
    auto ch = chain_of("graphs", 4);
    auto [p, q] = find_pair(*ch->stages[2].structure, true);
    auto e3 = arrow_at(ch, 2, k2, {p, q});
    auto v3 = arrow_at(ch, 2, k1, {p});
    for (std::size_t t : {2u, 3u, 4u}) {
      auto e = push_forward(e3, t), v = push_forward(v3, t);
      CHECK(stabilizer_subset(e, v) == Tri::yes);
      CHECK(stabilizer_subset(v, e) == Tri::no);
      CHECK(factor(v, e).unique());
      CHECK(conjugate_in_limit(e, e));
    }
  }
}

TEST_CASE("Boolean algebra complement is fixed by the stabilizer") {
  auto chain = chain_of("boolean_algebras", 3);
  const std::size_t s = 3;
  auto b2 = share(make_boolean_algebra(2));
  auto arrows = enumerate_embeddings(b2, chain->stages[s].structure);
  REQUIRE(arrows.size() >= 2);
  auto view = atom_view(*b2);
  const auto& xi_map = arrows.front().map;
  // chi picks the complement of the atom xi picks
  std::vector<int> chi_map;
  const int x = view->atoms[0], not_x = view->atoms[1];
  auto xi = arrow_at(chain, s, b2, xi_map);
  // swap the atoms of B2 and compose
  std::vector<int> swap(b2->size());
  for (std::size_t e = 0; e < b2->size(); ++e) {
    unsigned m = view->mask[e];
    unsigned sw = ((m & 1u) << 1) | ((m & 2u) >> 1);
    swap[e] = view->element_of_mask[sw];
  }
  for (std::size_t e = 0; e < b2->size(); ++e) chi_map.push_back(xi_map[static_cast<std::size_t>(swap[e])]);
  auto chi = arrow_at(chain, s, b2, chi_map);
  CHECK(chi_map[static_cast<std::size_t>(x)] == xi_map[static_cast<std::size_t>(not_x)]);
  CHECK(stabilizer_subset(xi, chi) == Tri::yes);
  CHECK(stabilizer_subset(chi, xi) == Tri::yes);
  auto f = factor(chi, xi);
  CHECK(f.unique());
  CHECK(f.arrow->map == swap);
}

TEST_CASE("strict monomorphisms with bounded quantifiers") {
  auto sets = class_slice(make_class("sets"), 5, false);
  auto f12 = enumerate_embeddings(share(make_set(1)), share(make_set(2))).front();
  auto r = strict_mono_bounded(sets, f12, 5);
  CHECK(r.holds);
  CHECK(r.cases > 0);

  auto le3 = discrete_context("sets_le3");
  auto f23 = enumerate_embeddings(share(make_set(2)), share(make_set(3))).front();
  auto w = strict_mono_bounded(le3, f23, 3);
  CHECK_FALSE(w.holds);
  CHECK(w.witness["g"] == Json(std::vector<int>{0, 1, 2}));
  CHECK(w.witness["factorizations"] == 0);

  // the same arrow in the untruncated class: false at bound 3, true from bound 4
  auto sets6 = class_slice(make_class("sets"), 6, false);
  CHECK_FALSE(strict_mono_bounded(sets6, f23, 3).holds);
  CHECK(strict_mono_bounded(sets6, f23, 4).holds);

  auto groups = class_slice(make_class("groups_small"), 8, false);
  auto z2z4 = enumerate_embeddings(share(make_cyclic_group(2)), share(make_cyclic_group(4))).front();
  CHECK(strict_mono_bounded(groups, z2z4, 8).holds);
}

TEST_CASE("conjugacy of arrows into a stage") {
  auto chain = chain_of("graphs", 4);
  const std::size_t s = 3;
  const auto& stage = *chain->stages[s].structure;
  auto k1 = share(make_graph(1, {}));
  auto k2 = share(make_graph(2, {{0, 1}}));
  auto [a, b] = find_pair(stage, true);
  int other = -1;
  for (int v = 0; v < static_cast<int>(stage.size()); ++v)
    if (v != a) other = v;
  CHECK(conjugate_in_limit(arrow_at(chain, s, k1, {a}), arrow_at(chain, s, k1, {other})));
  auto edges = enumerate_embeddings(k2, chain->stages[s].structure);
  REQUIRE(edges.size() >= 2);
  CHECK(conjugate_in_limit(arrow_at(chain, s, k2, edges.front().map), arrow_at(chain, s, k2, edges.back().map)));
  // an edge and a non-edge are never conjugate as pairs
  auto [p, q] = find_pair(stage, false);
  CHECK_FALSE(tuples_conjugate(*chain, s, {a, b}, {p, q}));
  CHECK(tuples_conjugate(*chain, s, {a, b}, {b, a}));
  CHECK_FALSE(tuples_conjugate(*chain, s, {a, a}, {a, b}));
}

TEST_CASE("discrete reductions and Galois objects") {
  auto le3 = discrete_context("sets_le3");
  auto r = discrete_reduction(le3);
  REQUIRE(r.object);
  CHECK(le3.objects[*r.object]->size() == 3);
  CHECK_FALSE(discrete_reduction(class_slice(make_class("sets"), 4, false)).object);
  auto v4 = discrete_context("v4");
  auto rv = discrete_reduction(v4);
  REQUIRE(rv.object);
  CHECK(v4.objects[*rv.object]->size() == 4);

  auto g = galois_objects_discrete(v4);
  bool v4_id = false, z2_in = false;
  for (const auto& c : g["candidates"]) {
    const auto n = c["arrow"].size();
    if (n == 4 && c["arrow"] == Json(std::vector<int>{0, 1, 2, 3})) v4_id = c["galois"].get<bool>();
    if (n == 2) z2_in = z2_in || c["galois"].get<bool>();
  }
  CHECK(v4_id);
  CHECK_FALSE(z2_in);

  auto rg = galois_objects(chain_of("graphs", 3), 2);
  CHECK(rg["galois_objects"].empty());
  CHECK(rg["candidates"].size() == 3);
}

TEST_CASE("discrete V4 correspondence against brute-force automorphisms") {
  auto v4 = discrete_context("v4");
  const std::size_t top = *discrete_reduction(v4).object;
  const auto& u = *v4.objects[top];
  // oracle: all bijections of V4 preserving the multiplication
  std::vector<std::vector<int>> auts;
  std::vector<int> p(u.size());
  std::iota(p.begin(), p.end(), 0);
  do
    if (is_embedding(u, u, p)) auts.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  CHECK(auts.size() == 6);
  auto fixes = [&](const std::vector<int>& a, const std::vector<int>& img) {
    return std::all_of(img.begin(), img.end(), [&](int y) { return a[static_cast<std::size_t>(y)] == y; });
  };
  std::size_t cases = 0;
  for (std::size_t c = 0; c < v4.size(); ++c)
    for (std::size_t d = 0; d < v4.size(); ++d)
      for (const auto& chi : v4.hom(c, top))
        for (const auto& xi : v4.hom(d, top)) {
          bool subset = true;
          for (const auto& a : auts)
            if (fixes(a, xi.map) && !fixes(a, chi.map)) subset = false;
          std::size_t through = 0;
          for (const auto& f : v4.hom(c, d))
            if (compose(f, xi).map == chi.map) ++through;
          CHECK(subset == (through == 1));
          ++cases;
        }
  CHECK(cases > 10);
}

TEST_CASE("discrete coherence matches orbit counts") {
  for (const auto& name : {"v4", "sets_le3", "sets_le4"}) {
    auto j = coherence_check_discrete(discrete_context(name));
    CHECK(j["equal"].get<bool>());
    for (const auto& e : j["arrows"]) CHECK(e["double_cosets"] == e["orbits_on_conjugates"]);
  }
  // sets ≤3: stabilizer of one point in S3 has 2 double cosets
  auto j = coherence_check_discrete(discrete_context("sets_le3"));
  bool seen = false;
  for (const auto& e : j["arrows"])
    if (e["arrow"].size() == 1) {
      CHECK(e["double_cosets"] == 2);
      seen = true;
    }
  CHECK(seen);
}

TEST_CASE("pointed types against equality-pattern enumeration") {
  CHECK(pointed_type_count(*make_class("sets"), 1) == 1);
  for (std::size_t k = 1; k <= 3; ++k) {
    CHECK(pointed_type_count(*make_class("sets"), k) == brute_type_count("sets", k));
    CHECK(pointed_type_count(*make_class("graphs"), k) == brute_type_count("graphs", k));
  }
  CHECK(brute_type_count("sets", 3) == 5);
  CHECK(brute_type_count("graphs", 3) == 15);
  CHECK(pointed_type_count(*make_class("linear_orders"), 2) == brute_type_count("linear_orders", 2));
  CHECK(brute_type_count("linear_orders", 2) == 3);
  CHECK_THROWS_AS(pointed_type_count(*make_class("groups_small"), 1), Error);
}

TEST_CASE("tuple orbits of stages equal pointed types") {
  for (std::size_t k = 1; k <= 3; ++k) {
    auto o = orbit_type_correspondence(make_class("sets"), k, 4, 4);
    CHECK(o.orbits == brute_type_count("sets", k));
    CHECK(o.equal());
  }
  for (std::size_t k = 1; k <= 2; ++k) {
    auto o = orbit_type_correspondence(make_class("linear_orders"), k, 4, 4);
    CHECK(o.orbits == brute_type_count("linear_orders", k));
  }
  auto j = coherence_check(make_class("graphs"), 3, 4, 4);
  CHECK(j["stable"].get<bool>());
  CHECK(j["orbits_equal_types"].get<bool>());
  std::vector<std::size_t> counts;
  for (const auto& c : j["counts"]) counts.push_back(c["orbits"].get<std::size_t>());
  CHECK(counts == std::vector<std::size_t>{1, 3, 15});
}

TEST_CASE("galois correspondence over built-in classes") {
  for (const auto& name : {"graphs", "sets", "linear_orders", "boolean_algebras"}) {
    CAPTURE(name);
    GaloisOptions opt;
    opt.jobs = 4;
    auto j = verify_galois_property(make_class(name), opt);
    CHECK(j["violations"].empty());
    CHECK(j["inconclusive"].empty());
    CHECK(j["cases"].get<std::size_t>() >= 100);
    CHECK(j["containments"].get<std::size_t>() > 0);
  }
  GaloisOptions one, four;
  one.size_bound = four.size_bound = 2;
  four.jobs = 4;
  CHECK(verify_galois_property(make_class("graphs"), one) == verify_galois_property(make_class("graphs"), four));
}
