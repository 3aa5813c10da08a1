#include "topgal/imaginaries.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace topgal {

namespace {

// Post-composition tables for Hom(c, -): post[e][e2][h][f] = index of h∘f in hom(c, e2).
struct RepTable {
  const FiniteCategory* cat;
  std::size_t c;
  std::vector<std::size_t> hom_size;
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> post;

  RepTable(const FiniteCategory& category, std::size_t base) : cat(&category), c(base) {
    const std::size_t n = cat->size();
    std::vector<std::map<std::vector<int>, std::size_t>> index(n);
    for (std::size_t e = 0; e < n; ++e) {
      const auto& hs = cat->hom(c, e);
      hom_size.push_back(hs.size());
      for (std::size_t i = 0; i < hs.size(); ++i) index[e][hs[i].map] = i;
    }
    post.assign(n, std::vector<std::vector<std::vector<std::size_t>>>(n));
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t e2 = 0; e2 < n; ++e2)
        for (const auto& h : cat->hom(e, e2)) {
          std::vector<std::size_t> row;
          for (const auto& f : cat->hom(c, e)) row.push_back(index[e2].at(compose(f, h).map));
          post[e][e2].push_back(std::move(row));
        }
  }
};

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::vector<UnionFind> to_union_find(const RepresentableRelation& r) {
  std::vector<UnionFind> uf;
  for (const auto& cls : r.classes) {
    UnionFind u(cls.size());
    std::map<int, std::size_t> first;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      auto [it, fresh] = first.emplace(cls[i], i);
      if (!fresh) u.unite(it->second, i);
    }
    uf.push_back(std::move(u));
  }
  return uf;
}

// Closes the partitions under post-composition; true if anything merged.
bool close_functorial(const RepTable& t, std::vector<UnionFind>& uf) {
  bool any = false, changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < uf.size(); ++e)
      for (std::size_t f = 0; f < t.hom_size[e]; ++f) {
        const std::size_t g = uf[e].find(f);
        if (g == f) continue;
        for (std::size_t e2 = 0; e2 < uf.size(); ++e2)
          for (const auto& row : t.post[e][e2])
            if (uf[e2].unite(row[f], row[g])) changed = any = true;
      }
  }
  return any;
}

RepresentableRelation from_union_find(const CategoryPtr& cat, std::size_t c, std::vector<UnionFind>& uf) {
  RepresentableRelation r{cat, c, {}};
  for (auto& u : uf) {
    std::vector<int> cls(u.parent.size());
    std::map<std::size_t, int> id;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      auto [it, fresh] = id.emplace(u.find(i), static_cast<int>(id.size()));
      cls[i] = it->second;
    }
    r.classes.push_back(std::move(cls));
  }
  return r;
}

RepresentableRelation jat_closure_with(const RepTable& t, const RepresentableRelation& r) {
  auto uf = to_union_find(r);
  close_functorial(t, uf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < uf.size(); ++e)
      for (std::size_t f = 0; f < t.hom_size[e]; ++f)
        for (std::size_t g = f + 1; g < t.hom_size[e]; ++g) {
          if (uf[e].find(f) == uf[e].find(g)) continue;
          bool joined = false;
          for (std::size_t e2 = 0; e2 < uf.size() && !joined; ++e2)
            for (const auto& row : t.post[e][e2])
              if (uf[e2].find(row[f]) == uf[e2].find(row[g])) {
                joined = true;
                break;
              }
          if (joined) {
            uf[e].unite(f, g);
            changed = true;
          }
        }
    if (close_functorial(t, uf)) changed = true;
  }
  return from_union_find(r.cat, r.base, uf);
}

RepresentableRelation generated_with(const RepTable& t, const CategoryPtr& cat, std::size_t e, std::size_t h,
                                     std::size_t k) {
  std::vector<UnionFind> uf;
  for (std::size_t n : t.hom_size) uf.emplace_back(n);
  for (std::size_t e2 = 0; e2 < cat->size(); ++e2)
    for (const auto& row : t.post[e][e2]) uf[e2].unite(row[h], row[k]);
  close_functorial(t, uf);
  return from_union_find(cat, t.c, uf);
}

std::optional<std::pair<std::size_t, std::size_t>> atom_arrow_with(const RepresentableRelation& closed) {
  const auto& cat = *closed.cat;
  const std::size_t c = closed.base;
  for (std::size_t d = 0; d < cat.size(); ++d)
    for (std::size_t mi = 0; mi < cat.hom(d, c).size(); ++mi) {
      const auto& m = cat.hom(d, c)[mi].map;
      bool ok = true;
      for (std::size_t e = 0; e < cat.size() && ok; ++e) {
        const auto& hs = cat.hom(c, e);
        for (std::size_t f = 0; f < hs.size() && ok; ++f)
          for (std::size_t g = f + 1; g < hs.size() && ok; ++g) {
            bool agree = true;
            for (int x : m)
              if (hs[f].map[static_cast<std::size_t>(x)] != hs[g].map[static_cast<std::size_t>(x)]) agree = false;
            ok = agree == closed.related(e, f, g);
          }
      }
      if (ok) return std::make_pair(d, mi);
    }
  return std::nullopt;
}

}  // namespace

bool RepresentableRelation::refines(const RepresentableRelation& o) const {
  for (std::size_t e = 0; e < classes.size(); ++e)
    for (std::size_t f = 0; f < classes[e].size(); ++f)
      for (std::size_t g = f + 1; g < classes[e].size(); ++g)
        if (related(e, f, g) && !o.related(e, f, g)) return false;
  return true;
}

bool RepresentableRelation::is_diagonal() const {
  for (const auto& cls : classes)
    if (std::set<int>(cls.begin(), cls.end()).size() != cls.size()) return false;
  return true;
}

bool RepresentableRelation::is_total() const {
  for (const auto& cls : classes)
    if (std::set<int>(cls.begin(), cls.end()).size() > 1) return false;
  return true;
}

RepresentableRelation diagonal_relation(const CategoryPtr& cat, std::size_t c) {
  RepresentableRelation r{cat, c, {}};
  for (std::size_t e = 0; e < cat->size(); ++e) {
    std::vector<int> cls(cat->hom(c, e).size());
    std::iota(cls.begin(), cls.end(), 0);
    r.classes.push_back(std::move(cls));
  }
  return r;
}

RepresentableRelation total_relation(const CategoryPtr& cat, std::size_t c) {
  RepresentableRelation r{cat, c, {}};
  for (std::size_t e = 0; e < cat->size(); ++e) r.classes.emplace_back(cat->hom(c, e).size(), 0);
  return r;
}

RepresentableRelation functorial_closure(
    const CategoryPtr& cat, std::size_t c,
    const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& pairs) {
  RepTable t(*cat, c);
  std::vector<UnionFind> uf;
  for (std::size_t n : t.hom_size) uf.emplace_back(n);
  for (const auto& [e, f, g] : pairs) uf.at(e).unite(f, g);
  close_functorial(t, uf);
  return from_union_find(cat, c, uf);
}

bool is_functorial(const RepresentableRelation& r) {
  RepTable t(*r.cat, r.base);
  for (std::size_t e = 0; e < r.classes.size(); ++e)
    for (std::size_t f = 0; f < t.hom_size[e]; ++f)
      for (std::size_t g = 0; g < t.hom_size[e]; ++g) {
        if (!r.related(e, f, g)) continue;
        for (std::size_t e2 = 0; e2 < r.classes.size(); ++e2)
          for (const auto& row : t.post[e][e2])
            if (!r.related(e2, row[f], row[g])) return false;
      }
  return true;
}

RepresentableRelation jat_closure(const RepresentableRelation& r) {
  RepTable t(*r.cat, r.base);
  return jat_closure_with(t, r);
}

RepresentableRelation generated_relation(const CategoryPtr& cat, std::size_t c, std::size_t e, std::size_t h,
                                         std::size_t k) {
  RepTable t(*cat, c);
  return generated_with(t, cat, e, h, k);
}

RepresentableRelation join_relations(const RepresentableRelation& a, const RepresentableRelation& b) {
  if (a.base != b.base || a.cat != b.cat) throw Error("join_relations: different bases");
  RepTable t(*a.cat, a.base);
  auto uf = to_union_find(a);
  auto ub = to_union_find(b);
  for (std::size_t e = 0; e < uf.size(); ++e)
    for (std::size_t f = 0; f < t.hom_size[e]; ++f) uf[e].unite(f, ub[e].find(f));
  close_functorial(t, uf);
  return jat_closure_with(t, from_union_find(a.cat, a.base, uf));
}

std::vector<RepresentableRelation> closed_relations(const CategoryPtr& cat, std::size_t c, std::size_t cap) {
  RepTable t(*cat, c);
  std::set<RepresentableRelation> seen;
  std::vector<RepresentableRelation> out;
  auto add = [&](RepresentableRelation r) {
    if (!seen.insert(r).second) return false;
    if (out.size() >= cap) throw ResourceLimit("closed_relations: more than " + std::to_string(cap) + " relations");
    out.push_back(std::move(r));
    return true;
  };
  add(jat_closure_with(t, diagonal_relation(cat, c)));
  for (std::size_t e = 0; e < cat->size(); ++e)
    for (std::size_t h = 0; h < t.hom_size[e]; ++h)
      for (std::size_t k = h + 1; k < t.hom_size[e]; ++k) add(jat_closure_with(t, generated_with(t, cat, e, h, k)));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (out[i].refines(out[j]) || out[j].refines(out[i])) continue;
      auto uf = to_union_find(out[i]);
      auto ub = to_union_find(out[j]);
      for (std::size_t e = 0; e < uf.size(); ++e)
        for (std::size_t f = 0; f < t.hom_size[e]; ++f) uf[e].unite(f, ub[e].find(f));
      close_functorial(t, uf);
      add(jat_closure_with(t, from_union_find(cat, c, uf)));
    }
  return out;
}

Json relation_to_json(const RepresentableRelation& r) {
  Json family = Json::object();
  for (std::size_t e = 0; e < r.classes.size(); ++e) {
    std::map<int, std::vector<std::size_t>> blocks;
    for (std::size_t f = 0; f < r.classes[e].size(); ++f) blocks[r.classes[e][f]].push_back(f);
    Json bl = Json::array();
    for (const auto& [id, members] : blocks)
      if (members.size() > 1) bl.push_back(members);
    family[std::to_string(e)] = bl;
  }
  return {{"base", structure_to_json(*r.cat->objects[r.base])}, {"family", family}};
}

std::optional<std::pair<std::size_t, std::size_t>> find_atom_arrow(const RepresentableRelation& r) {
  return atom_arrow_with(jat_closure(r));
}

AtomicCheck atomic_complete_check_at(const CategoryPtr& cat, std::size_t c) {
  RepTable t(*cat, c);
  AtomicCheck out;
  out.bases = Json::array();
  std::set<RepresentableRelation> seen;
  Json entry{{"base", structure_to_json(*cat->objects[c])}, {"holds", true}, {"witness", nullptr}};
  for (std::size_t e = 0; e < cat->size() && out.holds; ++e)
    for (std::size_t h = 0; h < t.hom_size[e] && out.holds; ++h)
      for (std::size_t k = h + 1; k < t.hom_size[e] && out.holds; ++k) {
        auto r = jat_closure_with(t, generated_with(t, cat, e, h, k));
        if (!seen.insert(r).second) continue;
        ++out.relations;
        if (atom_arrow_with(r)) continue;
        out.holds = false;
        out.witness = {{"base", structure_to_json(*cat->objects[c])},
                       {"e", structure_to_json(*cat->objects[e])},
                       {"h", cat->hom(c, e)[h].map},
                       {"k", cat->hom(c, e)[k].map},
                       {"relation", relation_to_json(r)}};
        entry["holds"] = false;
        entry["witness"] = out.witness;
      }
  entry["relations"] = out.relations;
  out.bases.push_back(entry);
  return out;
}

AtomicCheck atomic_complete_check(const CategoryPtr& cat, std::size_t size_bound) {
  AtomicCheck out;
  out.bases = Json::array();
  for (std::size_t c = 0; c < cat->size(); ++c) {
    const auto& obj = *cat->objects[c];
    if ((cat->cls ? cat->cls->measure(obj) : obj.size()) > size_bound) continue;
    auto one = atomic_complete_check_at(cat, c);
    out.relations += one.relations;
    if (!one.holds && out.holds) {
      out.holds = false;
      out.witness = one.witness;
    }
    out.bases.push_back(one.bases.front());
  }
  return out;
}

Subgroup realized_subgroup(const GroupPtr& aut_u, const RepresentableRelation& r, std::size_t top, std::size_t xi) {
  const auto& hs = r.cat->hom(r.base, top);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < hs.size(); ++i) index[hs[i].map] = i;
  Subgroup u{aut_u, {}, std::nullopt};
  for (int z = 0; z < static_cast<int>(aut_u->order()); ++z) {
    std::vector<int> moved;
    for (int x : hs[xi].map) moved.push_back(aut_u->element(z)[static_cast<std::size_t>(x)]);
    if (r.related(top, xi, index.at(moved))) u.elements.push_back(z);
  }
  return u;
}

std::optional<Realization> subgroup_realization(const CategoryPtr& cat, const Subgroup& u) {
  auto red = discrete_reduction(*cat);
  if (!red.object) throw Error("subgroup_realization: " + red.reason);
  const std::size_t top = *red.object;
  for (std::size_t c = 0; c < cat->size(); ++c) {
    auto relations = closed_relations(cat, c);
    for (std::size_t xi = 0; xi < cat->hom(c, top).size(); ++xi)
      for (const auto& r : relations)
        if (realized_subgroup(u.parent, r, top, xi).elements == u.elements) return Realization{c, xi, r};
  }
  return std::nullopt;
}

ImageOfF image_of_F_subgroups(const FiniteCategory& cat, const StructurePtr& u) {
  ImageOfF out;
  out.u = u;
  out.group = automorphisms(u);
  out.collisions = Json::array();
  // one slice class per (object, image set)
  std::map<std::vector<int>, Json> owner;  // stabilizer elements → first class
  std::set<std::vector<int>> image_keys;
  for (std::size_t c = 0; c < cat.size(); ++c) {
    std::set<std::vector<int>> images;
    for (const auto& chi : enumerate_embeddings(cat.objects[c], u)) {
      std::vector<int> img = chi.map;
      std::sort(img.begin(), img.end());
      if (!images.insert(img).second) continue;
      ++out.slice_classes;
      auto stab = pointwise_stabilizer(out.group, chi.map);
      Json cls{{"object", structure_to_json(*cat.objects[c])}, {"image", img}};
      auto [it, fresh] = owner.emplace(stab.elements, cls);
      if (fresh) {
        out.image.push_back(stab);
      } else {
        out.collisions.push_back({{"first", it->second}, {"second", cls}, {"stabilizer_order", stab.order()}});
      }
    }
  }
  std::sort(out.image.begin(), out.image.end(), [](const Subgroup& a, const Subgroup& b) {
    return std::make_pair(a.order(), a.elements) < std::make_pair(b.order(), b.elements);
  });
  for (const auto& s : all_subgroups(out.group))
    if (!owner.count(s.elements)) out.missing.push_back(s);
  return out;
}

ImageOfF image_of_F_subgroups(const FiniteCategory& cat) {
  auto red = discrete_reduction(cat);
  if (!red.object) throw Error("image_of_F_subgroups: " + red.reason);
  return image_of_F_subgroups(cat, cat.objects[*red.object]);
}

Json image_to_json(const ImageOfF& im) {
  Json image = Json::array(), missing = Json::array();
  for (const auto& s : im.image) image.push_back({{"order", s.order()}, {"elements", subgroup_to_json(s)}});
  for (const auto& s : im.missing) missing.push_back({{"order", s.order()}, {"elements", subgroup_to_json(s)}});
  return {{"u", structure_to_json(*im.u)},
          {"group_order", im.group->order()},
          {"image", image},
          {"missing", missing},
          {"slice_classes", im.slice_classes},
          {"collisions", im.collisions},
          {"injective", im.injective()}};
}

// ---------------------------------------------------------------- Z/15

Z15Report z15_counterexample_verify(const Z15Instance& inst) {
  constexpr int n = 15;
  auto mod = [](long v) { return static_cast<int>(((v % n) + n) % n); };
  auto c = share(make_cyclic_group(n));
  auto c2 = share(group_product(*c, *c));
  auto unary = [&](int a) {
    std::vector<int> m;
    for (int x = 0; x < n; ++x) m.push_back(mod(long(a) * x));
    return m;
  };
  auto pair_map = [&](std::pair<int, int> ab) {
    std::vector<int> m;
    for (int x = 0; x < n; ++x) m.push_back(mod(long(ab.first) * x) * n + mod(long(ab.second) * x));
    return m;
  };
  const auto h = unary(inst.h), k = unary(inst.k), l = pair_map(inst.l), nn = pair_map(inst.n);
  Z15Report r;
  r.embeddings = is_embedding(*c, *c, h) && is_embedding(*c, *c, k) && is_embedding(*c, *c2, l) &&
                 is_embedding(*c, *c2, nn);
  std::vector<int> equalizer;
  for (int x = 0; x < n; ++x)
    if (h[static_cast<std::size_t>(x)] == k[static_cast<std::size_t>(x)]) equalizer.push_back(x);
  r.equalizer_trivial = equalizer == std::vector<int>{0};
  r.lm_equals_nm = std::all_of(equalizer.begin(), equalizer.end(), [&](int x) {
    return l[static_cast<std::size_t>(x)] == nn[static_cast<std::size_t>(x)];
  });
  // powers of the multiplier k up to its order mod 15
  std::vector<int> powers{1};
  while (true) {
    int next = mod(long(powers.back()) * inst.k);
    if (std::find(powers.begin(), powers.end(), next) != powers.end()) break;
    powers.push_back(next);
  }
  for (std::size_t p = 0; p < powers.size(); ++p)
    for (std::size_t q = 0; q < powers.size(); ++q)
      if (mod(long(powers[p]) * inst.l.first) == mod(long(powers[q]) * inst.n.first) &&
          mod(long(powers[p]) * inst.l.second) == mod(long(powers[q]) * inst.n.second))
        r.solutions.emplace_back(static_cast<int>(p), static_cast<int>(q));
  return r;
}

Json z15_to_json(const Z15Report& r) {
  Json sol = Json::array();
  for (auto [p, q] : r.solutions) sol.push_back({p, q});
  return {{"theorem", "z15-counterexample"},
          {"embeddings", r.embeddings},
          {"equalizer_trivial", r.equalizer_trivial},
          {"lm_equals_nm", r.lm_equals_nm},
          {"solutions", sol},
          {"counterexample", r.counterexample()}};
}

}  // namespace topgal
