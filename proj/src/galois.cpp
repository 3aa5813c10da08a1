#include "topgal/galois.hpp"

#include <algorithm>
#include <set>

#include "topgal/parallel.hpp"

namespace topgal {

ArrowToLimit arrow_into(const ChainPtr& chain, std::size_t stage, Embedding e) {
  if (stage >= chain->stages.size()) throw Error("arrow_into: no such stage");
  const auto& target = chain->stages[stage].structure;
  if (e.target != target && !is_embedding(*e.source, *target, e.map))
    throw Error("arrow_into: not an embedding into the stage");
  e.target = target;
  return ArrowToLimit{chain, stage, std::move(e)};
}

ArrowToLimit push_forward(const ArrowToLimit& a, std::size_t stage) {
  if (stage < a.stage || stage >= a.chain->stages.size()) throw Error("push_forward: bad stage");
  ArrowToLimit out = a;
  for (std::size_t s = a.stage + 1; s <= stage; ++s) {
    const auto& incl = a.chain->stages[s].inclusion->map;
    for (int& x : out.embedding.map) x = incl[static_cast<std::size_t>(x)];
  }
  out.stage = stage;
  out.embedding.target = a.chain->stages[stage].structure;
  return out;
}

namespace {

int position_in(const std::vector<int>& sorted, int x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it == sorted.end() || *it != x) return -1;
  return static_cast<int>(it - sorted.begin());
}

std::pair<ArrowToLimit, ArrowToLimit> common_stage(const ArrowToLimit& a, const ArrowToLimit& b) {
  if (a.chain != b.chain) throw Error("arrows into different chains");
  const std::size_t s = std::max(a.stage, b.stage);
  return {push_forward(a, s), push_forward(b, s)};
}

}  // namespace

SplitResult splits_over(const FraisseClass& cls, const StructurePtr& s, const std::vector<int>& base, int b) {
  auto gen_a = generated_substructure(s, base);
  if (position_in(gen_a.inclusion.map, b) >= 0) return {Tri::no, std::nullopt};
  std::vector<int> seed = base;
  seed.push_back(b);
  auto gen_b = generated_substructure(s, seed);
  std::vector<int> amap;
  for (int x : gen_a.inclusion.map) amap.push_back(position_in(gen_b.inclusion.map, x));
  Embedding a{gen_a.structure, gen_b.structure, amap};
  auto [tri, am] = cls.split(a, position_in(gen_b.inclusion.map, b));
  return {tri, am};
}

Tri stabilizer_subset(const ArrowToLimit& xi, const ArrowToLimit& chi) {
  auto [x, c] = common_stage(xi, chi);
  const auto& cls = *x.chain->cls;
  bool unknown = false;
  for (int b : c.embedding.map) {
    Tri t = splits_over(cls, x.embedding.target, x.embedding.map, b).splits;
    if (t == Tri::yes) return Tri::no;
    if (t == Tri::unknown) unknown = true;
  }
  return unknown ? Tri::unknown : Tri::yes;
}

Factorization factor(const ArrowToLimit& chi, const ArrowToLimit& xi) {
  auto [c, x] = common_stage(chi, xi);
  Factorization out;
  for (const auto& f : enumerate_embeddings(c.source(), x.source())) {
    bool ok = true;
    for (std::size_t i = 0; i < f.map.size() && ok; ++i)
      ok = x.embedding.map[static_cast<std::size_t>(f.map[i])] == c.embedding.map[i];
    if (!ok) continue;
    if (!out.arrow) out.arrow = f;
    ++out.count;
  }
  return out;
}

Json arrow_to_limit_json(const ArrowToLimit& a) {
  return {{"source", structure_to_json(*a.source())}, {"stage", a.stage}, {"image", a.embedding.map}};
}

// ---------------------------------------------------------------- Galois correspondence

Json verify_galois_property(const ClassPtr& cls, const GaloisOptions& opt) {
  auto chain = std::make_shared<const StageChain>(build_chain(cls, opt.rounds));
  const std::size_t last = chain->stages.size() - 1;
  const auto& target = chain->stages[last].structure;

  std::vector<ArrowToLimit> arrows;
  for (std::size_t m = 0; m <= opt.size_bound; ++m)
    for (const auto& member : cls->members(m)) {
      std::size_t kept = 0;
      visit_embeddings(*member, *target, [&](const std::vector<int>& map) {
        arrows.push_back(ArrowToLimit{chain, last, Embedding{member, target, map}});
        return ++kept < opt.max_arrows;
      });
    }

  // splitting table: element b of some image over the image of each arrow
  std::set<int> used;
  for (const auto& a : arrows) used.insert(a.embedding.map.begin(), a.embedding.map.end());
  const std::vector<int> points(used.begin(), used.end());
  std::vector<std::vector<Tri>> splits(arrows.size(), std::vector<Tri>(points.size(), Tri::no));
  parallel_for(arrows.size(), opt.jobs, [&](std::size_t i) {
    for (std::size_t p = 0; p < points.size(); ++p)
      splits[i][p] = splits_over(*cls, target, arrows[i].embedding.map, points[p]).splits;
  });

  struct Case {
    Tri subset;
    std::size_t factorizations;
  };
  const std::size_t n = arrows.size();
  std::vector<Case> cases(n * n);
  parallel_for(n, opt.jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      Tri sub = Tri::yes;
      for (int b : arrows[j].embedding.map) {
        Tri t = splits[i][static_cast<std::size_t>(position_in(points, b))];
        if (t == Tri::yes) {
          sub = Tri::no;
          break;
        }
        if (t == Tri::unknown) sub = Tri::unknown;
      }
      cases[i * n + j] = {sub, factor(arrows[j], arrows[i]).count};
    }
  });

  Json violations = Json::array(), inconclusive = Json::array();
  std::size_t containments = 0, agreements = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& c = cases[i * n + j];
      Json entry{{"xi", arrow_to_limit_json(arrows[i])},
                 {"chi", arrow_to_limit_json(arrows[j])},
                 {"stabilizer_subset", to_string(c.subset)},
                 {"factorizations", c.factorizations}};
      if (c.subset == Tri::unknown) {
        inconclusive.push_back(entry);
        continue;
      }
      if (c.subset == Tri::yes) ++containments;
      if ((c.subset == Tri::yes) == (c.factorizations == 1))
        ++agreements;
      else
        violations.push_back(entry);
    }
  Json sizes = Json::array();
  for (const auto& st : chain->stages) sizes.push_back(st.structure->size());
  return {{"theorem", "galois-correspondence"},
          {"class", cls->name()},
          {"size_bound", opt.size_bound},
          {"rounds", opt.rounds},
          {"max_arrows", opt.max_arrows},
          {"stage_sizes", sizes},
          {"arrows", n},
          {"cases", n * n},
          {"containments", containments},
          {"agreements", agreements},
          {"violations", violations},
          {"inconclusive", inconclusive}};
}

// ---------------------------------------------------------------- strict monomorphisms

StrictMonoResult strict_mono_bounded(const FiniteCategory& cat, const Embedding& f, std::size_t codomain_bound) {
  StrictMonoResult res;
  res.codomain_bound = codomain_bound;
  auto measure = [&](const FiniteStructure& s) { return cat.cls ? cat.cls->measure(s) : s.size(); };
  std::vector<StructurePtr> objs;
  for (const auto& o : cat.objects)
    if (measure(*o) <= codomain_bound) objs.push_back(o);
  std::stable_sort(objs.begin(), objs.end(),
                   [](const StructurePtr& a, const StructurePtr& b) { return a->size() > b->size(); });

  // pairs h ≠ k out of the codomain of f that agree after f
  std::vector<std::pair<std::vector<int>, std::vector<int>>> coequalizing;
  for (const auto& x : objs) {
    auto hs = enumerate_embeddings(f.target, x);
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (std::size_t j = i + 1; j < hs.size(); ++j)
        if (compose(f, hs[i]).map == compose(f, hs[j]).map) coequalizing.emplace_back(hs[i].map, hs[j].map);
  }
  for (const auto& e : objs)
    for (const auto& g : enumerate_embeddings(e, f.target)) {
      bool hypothesis = true;
      for (const auto& [h, k] : coequalizing) {
        for (std::size_t x = 0; x < g.map.size() && hypothesis; ++x)
          hypothesis = h[static_cast<std::size_t>(g.map[x])] == k[static_cast<std::size_t>(g.map[x])];
        if (!hypothesis) break;
      }
      if (!hypothesis) continue;
      ++res.cases;
      std::size_t through = 0;
      for (const auto& p : enumerate_embeddings(e, f.source))
        if (compose(p, f).map == g.map) ++through;
      if (through != 1) {
        res.holds = false;
        res.witness = {{"e", structure_to_json(*e)}, {"g", g.map}, {"factorizations", through}};
        return res;
      }
    }
  return res;
}

// ---------------------------------------------------------------- conjugacy of tuples

bool tuples_conjugate(const StructurePtr& stage, const FiniteStructure* next, const std::vector<int>& next_inclusion,
                      const std::vector<int>& t1, const std::vector<int>& t2) {
  if (t1.size() != t2.size()) return false;
  std::vector<int> dom, img;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if ((t1[i] == t1[j]) != (t2[i] == t2[j])) return false;
    if (std::find(dom.begin(), dom.end(), t1[i]) == dom.end()) {
      dom.push_back(t1[i]);
      img.push_back(t2[i]);
    }
  }
  if (!extends_to_isomorphism(*stage, dom, *stage, img)) return false;
  if (!next) return true;
  std::vector<int> dom_next, img_next;
  for (int x : dom) dom_next.push_back(next_inclusion[static_cast<std::size_t>(x)]);
  for (int y : img) img_next.push_back(next_inclusion[static_cast<std::size_t>(y)]);
  for (int x = 0; x < static_cast<int>(stage->size()); ++x) {
    if (std::find(dom.begin(), dom.end(), x) == dom.end() && !extends_one_point(stage, dom, *next, img_next, x))
      return false;
    if (std::find(img.begin(), img.end(), x) == img.end() && !extends_one_point(stage, img, *next, dom_next, x))
      return false;
  }
  return true;
}

bool tuples_conjugate(const StageChain& chain, std::size_t stage, const std::vector<int>& t1,
                      const std::vector<int>& t2) {
  const auto& s = chain.stages.at(stage).structure;
  if (stage + 1 < chain.stages.size()) {
    const auto& nx = chain.stages[stage + 1];
    return tuples_conjugate(s, nx.structure.get(), nx.inclusion->map, t1, t2);
  }
  return tuples_conjugate(s, nullptr, {}, t1, t2);
}

bool conjugate_in_limit(const ArrowToLimit& e1, const ArrowToLimit& e2) {
  auto [a, b] = common_stage(e1, e2);
  if (a.source()->size() != b.source()->size() || a.source()->label() != b.source()->label()) return false;
  // compare through a common labeling of the two sources
  auto iso = enumerate_embeddings(a.source(), b.source());
  if (iso.empty()) return false;
  std::vector<int> t2(a.embedding.map.size());
  for (std::size_t i = 0; i < t2.size(); ++i) t2[i] = b.embedding.map[static_cast<std::size_t>(iso.front().map[i])];
  return tuples_conjugate(*a.chain, a.stage, a.embedding.map, t2);
}

// ---------------------------------------------------------------- orbits and types

namespace {

std::vector<int> decode_tuple(std::size_t code, std::size_t n, std::size_t k) {
  std::vector<int> t(k);
  for (std::size_t i = k; i-- > 0;) {
    t[i] = static_cast<int>(code % n);
    code /= n;
  }
  return t;
}

std::size_t tuple_count(std::size_t n, std::size_t k) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total *= n;
    if (total > 4'000'000) throw ResourceLimit("too many tuples to enumerate");
  }
  return total;
}

CanonicalLabel pointed_key(const StructurePtr& s, const std::vector<int>& t) {
  auto gen = generated_substructure(s, t);
  std::vector<int> points;
  for (int x : t) points.push_back(position_in(gen.inclusion.map, x));
  return canonical_form_pointed(*gen.structure, points);
}

}  // namespace

std::size_t pointed_type_count(const FraisseClass& cls, std::size_t k) {
  if (!cls.signature().is_relational()) throw Error("pointed_type_count: relational classes only");
  std::set<CanonicalLabel> types;
  for (std::size_t m = 0; m <= k; ++m)
    for (const auto& member : cls.members(m)) {
      if (member->size() == 0) {
        if (k == 0) types.insert(canonical_form_pointed(*member, {}));
        continue;
      }
      const std::size_t total = tuple_count(member->size(), k);
      for (std::size_t c = 0; c < total; ++c) {
        auto t = decode_tuple(c, member->size(), k);
        std::set<int> covered(t.begin(), t.end());
        if (covered.size() != member->size()) continue;
        types.insert(canonical_form_pointed(*member, t));
      }
    }
  return types.size();
}

OrbitCount count_tuple_orbits(const FraisseClass& cls, const StructurePtr& stage, const FiniteStructure* next,
                              const std::vector<int>& next_inclusion, std::size_t k, std::size_t jobs) {
  OrbitCount out;
  out.k = k;
  out.types = pointed_type_count(cls, k);
  const std::size_t n = stage->size();
  if (n == 0) {
    out.orbits = k == 0 ? 1 : 0;
    return out;
  }
  const std::size_t total = tuple_count(n, k);
  std::vector<CanonicalLabel> keys(total);
  parallel_for(total, jobs, [&](std::size_t c) { keys[c] = pointed_key(stage, decode_tuple(c, n, k)); });

  std::map<CanonicalLabel, std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < total; ++c) groups[keys[c]].push_back(c);
  for (auto& [key, members] : groups) {
    // classes inside one pointed type: compare against each class representative in turn
    std::vector<std::size_t> pending = members;
    while (!pending.empty()) {
      ++out.orbits;
      const auto rep = decode_tuple(pending.front(), n, k);
      std::vector<char> joined(pending.size(), 0);
      parallel_for(pending.size(), jobs, [&](std::size_t i) {
        joined[i] = i == 0 || tuples_conjugate(stage, next, next_inclusion, rep, decode_tuple(pending[i], n, k));
      });
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < pending.size(); ++i)
        if (!joined[i]) rest.push_back(pending[i]);
      pending = std::move(rest);
    }
  }
  return out;
}

OrbitCount orbit_type_correspondence(const ClassPtr& cls, std::size_t k, std::size_t rounds, std::size_t jobs) {
  if (rounds < 1) throw Error("orbit_type_correspondence: at least one round needed");
  auto chain = build_chain(cls, rounds);
  const auto& nx = chain.stages[rounds];
  return count_tuple_orbits(*cls, chain.stages[rounds - 1].structure, nx.structure.get(), nx.inclusion->map, k, jobs);
}

Json coherence_check(const ClassPtr& cls, std::size_t k_max, std::size_t rounds, std::size_t jobs) {
  if (rounds < 1) throw Error("coherence_check: at least one round needed");
  auto chain = build_chain(cls, rounds);
  const auto& orbit_stage = chain.stages[rounds - 1].structure;
  const auto& nx = chain.stages[rounds];
  auto refined = extend_stage(*cls, nx, 1);
  std::vector<int> refined_incl;
  for (int x : nx.inclusion->map) refined_incl.push_back(refined.inclusion->map[static_cast<std::size_t>(x)]);

  Json counts = Json::array();
  bool stable = true, equal = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    auto a = count_tuple_orbits(*cls, orbit_stage, nx.structure.get(), nx.inclusion->map, k, jobs);
    auto b = count_tuple_orbits(*cls, orbit_stage, refined.structure.get(), refined_incl, k, jobs);
    stable = stable && a.orbits == b.orbits;
    equal = equal && a.equal();
    counts.push_back({{"k", k}, {"orbits", a.orbits}, {"types", a.types}, {"orbits_refined", b.orbits}});
  }
  return {{"theorem", "coherence"},
          {"class", cls->name()},
          {"rounds", rounds},
          {"orbit_stage_size", orbit_stage->size()},
          {"lookahead_size", nx.structure->size()},
          {"refined_lookahead_size", refined.structure->size()},
          {"counts", counts},
          {"stable", stable},
          {"orbits_equal_types", equal}};
}

Json coherence_check_discrete(const FiniteCategory& cat) {
  auto red = discrete_reduction(cat);
  if (!red.object) throw Error("coherence_check_discrete: " + red.reason);
  const std::size_t top = *red.object;
  auto g = automorphisms(cat.objects[top]);
  Json entries = Json::array();
  bool all_equal = true;
  for (std::size_t c = 0; c < cat.size(); ++c)
    for (const auto& chi : cat.hom(c, top)) {
      auto h = pointwise_stabilizer(g, chi.map);
      // arrows conjugate to chi, and the orbits of I_chi on them
      std::set<std::vector<int>> conj;
      for (const auto& p : g->elements()) {
        std::vector<int> img;
        for (int x : chi.map) img.push_back(p[static_cast<std::size_t>(x)]);
        conj.insert(img);
      }
      std::set<std::vector<int>> seen;
      std::size_t orbit_count = 0;
      for (const auto& a : conj) {
        if (seen.count(a)) continue;
        ++orbit_count;
        for (int e : h.elements) {
          std::vector<int> img;
          for (int x : a) img.push_back(g->element(e)[static_cast<std::size_t>(x)]);
          seen.insert(img);
        }
      }
      const std::size_t dc = double_cosets(h).count();
      all_equal = all_equal && dc == orbit_count;
      entries.push_back({{"object", structure_to_json(*cat.objects[c])},
                         {"arrow", chi.map},
                         {"double_cosets", dc},
                         {"orbits_on_conjugates", orbit_count}});
    }
  return {{"theorem", "coherence-discrete"},
          {"context", cat.name},
          {"group_order", g->order()},
          {"arrows", entries},
          {"equal", all_equal}};
}

// ---------------------------------------------------------------- Galois objects

Json galois_objects(const ChainPtr& chain, std::size_t size_bound) {
  const auto& cls = *chain->cls;
  const std::size_t last = chain->stages.size() - 1;
  const auto& target = chain->stages[last].structure;
  auto bottom = generated_substructure(target, std::vector<int>{});
  Json candidates = Json::array(), found = Json::array();
  for (std::size_t m = 0; m <= size_bound; ++m)
    for (const auto& member : cls.members(m)) {
      if (member->size() == bottom.structure->size()) continue;
      std::optional<std::vector<int>> arrow;
      visit_embeddings(*member, *target, [&](const std::vector<int>& map) {
        arrow = map;
        return false;
      });
      if (!arrow) continue;
      auto b1 = generated_substructure(target, *arrow);
      Tri galois = Tri::yes;
      Json moved = nullptr;
      for (int b : *arrow) {
        if (position_in(bottom.inclusion.map, b) >= 0) continue;
        auto b2 = generated_substructure(target, std::vector<int>{b});
        std::vector<int> f, g;
        for (int x : bottom.inclusion.map) {
          f.push_back(position_in(b1.inclusion.map, x));
          g.push_back(position_in(b2.inclusion.map, x));
        }
        KeepApart apart;
        const int bpos = position_in(b2.inclusion.map, b);
        for (int x = 0; x < static_cast<int>(b1.structure->size()); ++x) apart.emplace_back(x, bpos);
        bool escapes = false;
        auto st = cls.visit_amalgams(Embedding{bottom.structure, b1.structure, f},
                                     Embedding{bottom.structure, b2.structure, g},
                                     [&](const Amalgam&) {
                                       escapes = true;
                                       return false;
                                     },
                                     apart);
        if (escapes) {
          galois = Tri::no;
          moved = b;
          break;
        }
        if (st != SearchStatus::exhausted) galois = Tri::unknown;
      }
      Json entry{{"object", structure_to_json(*member)}, {"image", *arrow}, {"galois", to_string(galois)}};
      entry["moved_element"] = moved;
      candidates.push_back(entry);
      if (galois == Tri::yes) found.push_back(entry);
    }
  return {{"class", cls.name()}, {"size_bound", size_bound}, {"candidates", candidates}, {"galois_objects", found}};
}

Json galois_objects_discrete(const FiniteCategory& cat) {
  auto red = discrete_reduction(cat);
  if (!red.object) throw Error("galois_objects_discrete: " + red.reason);
  const std::size_t top = *red.object;
  const auto& aut_u = cat.hom(top, top);
  Json candidates = Json::array(), found = Json::array();
  for (std::size_t c = 0; c < cat.size(); ++c) {
    const auto& aut_c = cat.hom(c, c);
    for (const auto& f : cat.hom(c, top)) {
      bool galois = true;
      for (const auto& xi : aut_u) {
        std::size_t restrictions = 0;
        const auto xf = compose(f, xi).map;
        for (const auto& s : aut_c)
          if (compose(s, f).map == xf) ++restrictions;
        if (restrictions != 1) {
          galois = false;
          break;
        }
      }
      Json entry{{"object", structure_to_json(*cat.objects[c])}, {"arrow", f.map}, {"galois", galois}};
      candidates.push_back(entry);
      if (galois) found.push_back(entry);
    }
  }
  return {{"context", cat.name}, {"candidates", candidates}, {"galois_objects", found}};
}

}  // namespace topgal
