#include "topgal/autgroup.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace topgal {

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation compose_permutations(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw Error("compose_permutations: degree mismatch");
  Permutation r(q.size());
  for (std::size_t x = 0; x < q.size(); ++x) r[x] = p[static_cast<std::size_t>(q[x])];
  return r;
}

Permutation inverse_permutation(const Permutation& p) {
  Permutation r(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) r[static_cast<std::size_t>(p[x])] = static_cast<int>(x);
  return r;
}

Permutation permutation_from_cycles(std::size_t n, const std::string& cycles) {
  Permutation p = identity_permutation(n);
  std::vector<int> cycle;
  std::string num;
  auto flush_num = [&] {
    if (num.empty()) return;
    int v = std::stoi(num) - 1;
    num.clear();
    if (v < 0 || v >= static_cast<int>(n)) throw Error("cycle entry out of range: " + std::to_string(v + 1));
    cycle.push_back(v);
  };
  bool open = false;
  for (char c : cycles) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (!open) throw Error("malformed cycle notation: " + cycles);
      num += c;
    } else if (c == '(') {
      if (open) throw Error("malformed cycle notation: " + cycles);
      open = true;
      cycle.clear();
    } else if (c == ')') {
      flush_num();
      if (!open) throw Error("malformed cycle notation: " + cycles);
      open = false;
      std::set<int> seen(cycle.begin(), cycle.end());
      if (seen.size() != cycle.size()) throw Error("repeated point in cycle: " + cycles);
      for (std::size_t i = 0; i < cycle.size(); ++i)
        p[static_cast<std::size_t>(cycle[i])] = cycle[(i + 1) % cycle.size()];
    } else if (c == ' ' || c == ',') {
      flush_num();
    } else {
      throw Error("malformed cycle notation: " + cycles);
    }
  }
  if (open) throw Error("malformed cycle notation: " + cycles);
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != identity_permutation(n)) throw Error("cycles are not disjoint: " + cycles);
  return p;
}

std::string cycles_to_string(const Permutation& p) {
  std::string out;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (seen[x] || p[x] == static_cast<int>(x)) continue;
    out += "(";
    std::size_t y = x;
    bool first = true;
    while (!seen[y]) {
      seen[y] = 1;
      if (!first) out += " ";
      out += std::to_string(y + 1);
      first = false;
      y = static_cast<std::size_t>(p[y]);
    }
    out += ")";
  }
  return out.empty() ? "()" : out;
}

namespace {

std::vector<Permutation> closure(std::size_t degree, const std::vector<Permutation>& gens) {
  std::set<Permutation> seen{identity_permutation(degree)};
  std::vector<Permutation> queue{identity_permutation(degree)};
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& s : gens) {
      auto q = compose_permutations(queue[i], s);
      if (seen.insert(q).second) queue.push_back(std::move(q));
    }
  return {seen.begin(), seen.end()};
}

}  // namespace

PermutationGroup::PermutationGroup(std::size_t degree, const std::vector<Permutation>& generators,
                                   StructurePtr acts_on)
    : degree_(degree), structure_(std::move(acts_on)) {
  for (const auto& g : generators) {
    if (g.size() != degree) throw Error("generator has wrong degree");
    std::vector<int> sorted = g;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != identity_permutation(degree)) throw Error("generator is not a permutation");
    if (g != identity_permutation(degree)) generators_.push_back(g);
  }
  elements_ = closure(degree, generators_);
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], static_cast<int>(i));
  inverses_.resize(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) inverses_[i] = index_of(inverse_permutation(elements_[i]));
}

int PermutationGroup::index_of(const Permutation& p) const {
  auto it = index_.find(p);
  return it == index_.end() ? -1 : it->second;
}

int PermutationGroup::multiply(int a, int b) const {
  return index_of(compose_permutations(element(a), element(b)));
}

GroupPtr make_permutation_group(std::size_t degree, const std::vector<Permutation>& generators, StructurePtr acts_on) {
  return std::make_shared<const PermutationGroup>(degree, generators, std::move(acts_on));
}

GroupPtr symmetric_group(std::size_t n) {
  std::vector<Permutation> gens;
  if (n >= 2) {
    Permutation t = identity_permutation(n);
    std::swap(t[0], t[1]);
    gens.push_back(t);
    Permutation c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<int>((i + 1) % n);
    gens.push_back(c);
  }
  return make_permutation_group(n, gens);
}

GroupPtr automorphisms(const StructurePtr& s) {
  // greedy generating set: add an automorphism whenever it escapes the current closure
  std::vector<Permutation> gens;
  std::set<Permutation> reached{identity_permutation(s->size())};
  visit_embeddings(*s, *s, [&](const std::vector<int>& map) {
    if (!reached.count(map)) {
      gens.push_back(map);
      auto all = closure(s->size(), gens);
      reached = std::set<Permutation>(all.begin(), all.end());
    }
    return true;
  });
  return make_permutation_group(s->size(), gens, s);
}

// ---------------------------------------------------------------- subgroups

bool Subgroup::contains(int g) const { return std::binary_search(elements.begin(), elements.end(), g); }

Subgroup whole_group(const GroupPtr& g) {
  std::vector<int> all(g->order());
  std::iota(all.begin(), all.end(), 0);
  return Subgroup{g, all, std::nullopt};
}

Subgroup trivial_subgroup(const GroupPtr& g) { return Subgroup{g, {PermutationGroup::identity()}, std::nullopt}; }

Subgroup pointwise_stabilizer(const GroupPtr& g, const std::vector<int>& tuple) {
  for (int t : tuple)
    if (t < 0 || t >= static_cast<int>(g->degree()))
      throw Error("pointwise_stabilizer: point " + std::to_string(t) + " outside the carrier");
  Subgroup u{g, {}, tuple};
  for (int i = 0; i < static_cast<int>(g->order()); ++i) {
    const auto& p = g->element(i);
    if (std::all_of(tuple.begin(), tuple.end(), [&](int t) { return p[static_cast<std::size_t>(t)] == t; }))
      u.elements.push_back(i);
  }
  return u;
}

Subgroup subgroup_from_elements(const GroupPtr& g, const std::vector<Permutation>& elems) {
  std::set<int> idx;
  for (const auto& p : elems) {
    int i = g->index_of(p);
    if (i < 0) throw Error("subgroup_from_elements: " + cycles_to_string(p) + " is not in the group");
    idx.insert(i);
  }
  if (!idx.count(PermutationGroup::identity())) throw Error("subgroup_from_elements: identity missing");
  for (int a : idx) {
    if (!idx.count(g->inverse(a))) throw Error("subgroup_from_elements: not closed under inverses");
    for (int b : idx)
      if (!idx.count(g->multiply(a, b))) throw Error("subgroup_from_elements: not closed under composition");
  }
  return Subgroup{g, {idx.begin(), idx.end()}, std::nullopt};
}

Subgroup generated_subgroup(const GroupPtr& g, const std::vector<Permutation>& gens) {
  std::vector<int> gi;
  for (const auto& p : gens) {
    int i = g->index_of(p);
    if (i < 0) throw Error("generated_subgroup: " + cycles_to_string(p) + " is not in the group");
    gi.push_back(i);
  }
  std::set<int> seen{PermutationGroup::identity()};
  std::vector<int> queue{PermutationGroup::identity()};
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (int s : gi) {
      int q = g->multiply(queue[i], s);
      if (seen.insert(q).second) queue.push_back(q);
    }
  return Subgroup{g, {seen.begin(), seen.end()}, std::nullopt};
}

Subgroup conjugate(const Subgroup& u, int a) {
  const auto& g = *u.parent;
  std::vector<int> out;
  for (int x : u.elements) out.push_back(g.multiply(g.multiply(a, x), g.inverse(a)));
  std::sort(out.begin(), out.end());
  std::optional<std::vector<int>> stab;
  if (u.stabilized) {
    // a I_t a⁻¹ = I_{a(t)}
    stab = std::vector<int>();
    for (int t : *u.stabilized) stab->push_back(g.element(a)[static_cast<std::size_t>(t)]);
  }
  return Subgroup{u.parent, out, stab};
}

namespace {

void same_parent(const Subgroup& u, const Subgroup& v, const char* what) {
  if (u.parent != v.parent) throw Error(std::string(what) + ": subgroups of different groups");
}

}  // namespace

Subgroup intersect(const Subgroup& u, const Subgroup& v) {
  same_parent(u, v, "intersect");
  Subgroup w{u.parent, {}, std::nullopt};
  std::set_intersection(u.elements.begin(), u.elements.end(), v.elements.begin(), v.elements.end(),
                        std::back_inserter(w.elements));
  return w;
}

bool is_subset(const Subgroup& u, const Subgroup& v) {
  same_parent(u, v, "is_subset");
  return std::includes(v.elements.begin(), v.elements.end(), u.elements.begin(), u.elements.end());
}

// ---------------------------------------------------------------- orbits

std::vector<Orbit> orbits(const GroupPtr& g, std::size_t k, bool distinct) {
  const std::size_t n = g->degree();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total *= std::max<std::size_t>(n, 1);
    if (total > 20'000'000) throw ResourceLimit("orbits: too many tuples");
  }
  if (n == 0 && k > 0) return {};
  auto decode = [&](std::size_t code) {
    std::vector<int> t(k);
    for (std::size_t i = k; i-- > 0;) {
      t[i] = static_cast<int>(code % n);
      code /= n;
    }
    return t;
  };
  auto encode = [&](const std::vector<int>& t) {
    std::size_t c = 0;
    for (int x : t) c = c * n + static_cast<std::size_t>(x);
    return c;
  };
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t c = 0; c < total; ++c) {
    auto t = decode(c);
    for (const auto& s : g->generators()) {
      std::vector<int> image(k);
      for (std::size_t i = 0; i < k; ++i) image[i] = s[static_cast<std::size_t>(t[i])];
      std::size_t a = find(c), b = find(encode(image));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<std::size_t, Orbit> by_root;
  for (std::size_t c = 0; c < total; ++c) {
    auto t = decode(c);
    if (distinct) {
      std::set<int> s(t.begin(), t.end());
      if (s.size() != t.size()) continue;
    }
    by_root[find(c)].members.push_back(t);
  }
  std::vector<Orbit> out;
  for (auto& [root, orb] : by_root) {
    orb.representative = orb.members.front();
    out.push_back(std::move(orb));
  }
  std::sort(out.begin(), out.end(), [](const Orbit& a, const Orbit& b) { return a.representative < b.representative; });
  return out;
}

// ---------------------------------------------------------------- algebraic bases

BaseCheck check_algebraic_base(const GroupPtr& g, const std::vector<Subgroup>& base) {
  BaseCheck res;
  std::set<std::vector<int>> members;
  for (const auto& u : base) {
    if (u.parent != g) throw Error("check_algebraic_base: subgroup of a different group");
    members.insert(u.elements);
  }
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i; j < base.size(); ++j) {
      auto w = intersect(base[i], base[j]);
      bool contains_member = std::any_of(base.begin(), base.end(), [&](const Subgroup& m) { return is_subset(m, w); });
      if (!contains_member) {
        res.holds = false;
        res.failure = "intersection";
        res.witness = {{"first", subgroup_to_json(base[i])}, {"second", subgroup_to_json(base[j])}};
        return res;
      }
    }
  for (const auto& u : base)
    for (const auto& s : g->generators()) {
      int a = g->index_of(s);
      auto c = conjugate(u, a);
      if (!members.count(c.elements)) {
        res.holds = false;
        res.failure = "conjugation";
        res.witness = {{"subgroup", subgroup_to_json(u)},
                       {"conjugator", element_to_json(*g, a)},
                       {"conjugate", subgroup_to_json(c)}};
        return res;
      }
    }
  return res;
}

// ---------------------------------------------------------------- coset calculus

int coset_representative(const Subgroup& v, int a) {
  int best = -1;
  for (int y : v.elements) {
    int x = v.parent->multiply(a, y);
    if (best < 0 || x < best) best = x;
  }
  return best;
}

namespace {

// a⁻¹ U a
std::vector<int> conjugate_by_inverse(const Subgroup& u, int a) {
  return conjugate(u, u.parent->inverse(a)).elements;
}

}  // namespace

bool is_valid_arrow(const CosetArrow& arr) {
  auto c = conjugate_by_inverse(arr.source, arr.representative);
  return std::includes(arr.target.elements.begin(), arr.target.elements.end(), c.begin(), c.end());
}

std::vector<CosetArrow> hom_cosets(const Subgroup& u, const Subgroup& v) {
  same_parent(u, v, "hom_cosets");
  std::vector<CosetArrow> out;
  for (int a = 0; a < static_cast<int>(u.parent->order()); ++a) {
    if (coset_representative(v, a) != a) continue;
    CosetArrow arr{u, v, a};
    if (is_valid_arrow(arr)) out.push_back(arr);
  }
  return out;
}

bool is_iso_arrow(const CosetArrow& arr) {
  return conjugate_by_inverse(arr.target, arr.representative) == arr.source.elements;
}

CosetArrow compose_arrows(const CosetArrow& first, const CosetArrow& second) {
  same_parent(first.source, second.target, "compose_arrows");
  if (!(first.target == second.source)) throw Error("compose_arrows: arrows do not compose");
  int rep = coset_representative(second.target, first.source.parent->multiply(first.representative, second.representative));
  return CosetArrow{first.source, second.target, rep};
}

bool are_conjugate(const Subgroup& u, const Subgroup& v) {
  same_parent(u, v, "are_conjugate");
  if (u.order() != v.order()) return false;
  for (int a = 0; a < static_cast<int>(u.parent->order()); ++a)
    if (conjugate(u, a).elements == v.elements) return true;
  return false;
}

bool transitive_gsets_isomorphic(const Subgroup& u, const Subgroup& v) { return are_conjugate(u, v); }

DoubleCosets double_cosets(const Subgroup& h) {
  const auto& g = *h.parent;
  DoubleCosets out;
  std::vector<char> seen(g.order(), 0);
  for (int a = 0; a < static_cast<int>(g.order()); ++a) {
    if (seen[static_cast<std::size_t>(a)]) continue;
    std::set<int> cell;
    for (int x : h.elements)
      for (int y : h.elements) cell.insert(g.multiply(g.multiply(x, a), y));
    for (int c : cell) seen[static_cast<std::size_t>(c)] = 1;
    out.representatives.push_back(a);
    out.cosets.emplace_back(cell.begin(), cell.end());
  }
  return out;
}

std::size_t orbits_on_cosets(const Subgroup& u, const Subgroup& v) {
  same_parent(u, v, "orbits_on_cosets");
  const auto& g = *u.parent;
  std::set<int> reps;
  for (int a = 0; a < static_cast<int>(g.order()); ++a) reps.insert(coset_representative(v, a));
  std::set<int> seen;
  std::size_t count = 0;
  for (int r : reps) {
    if (seen.count(r)) continue;
    ++count;
    for (int x : u.elements) seen.insert(coset_representative(v, g.multiply(x, r)));
  }
  return count;
}

std::vector<Subgroup> all_subgroups(const GroupPtr& g, std::size_t max_order) {
  if (g->order() > max_order)
    throw ResourceLimit("all_subgroups: group order " + std::to_string(g->order()) + " exceeds " +
                        std::to_string(max_order));
  std::vector<Subgroup> cyclic;
  std::set<std::vector<int>> seen;
  std::vector<std::pair<Subgroup, std::vector<Permutation>>> found;
  for (int a = 0; a < static_cast<int>(g->order()); ++a) {
    auto c = generated_subgroup(g, {g->element(a)});
    if (seen.insert(c.elements).second) {
      cyclic.push_back(c);
      found.emplace_back(c, std::vector<Permutation>{g->element(a)});
    }
  }
  std::vector<Permutation> cyclic_gen;
  for (const auto& [c, gens] : found) cyclic_gen.push_back(gens.front());
  for (std::size_t i = 0; i < found.size(); ++i)
    for (std::size_t c = 0; c < cyclic.size(); ++c) {
      if (is_subset(cyclic[c], found[i].first)) continue;
      auto gens = found[i].second;
      gens.push_back(cyclic_gen[c]);
      auto j = generated_subgroup(g, gens);
      if (seen.insert(j.elements).second) found.emplace_back(j, gens);
    }
  std::vector<Subgroup> out;
  for (auto& [s, gens] : found) out.push_back(s);
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    return std::make_pair(a.order(), a.elements) < std::make_pair(b.order(), b.elements);
  });
  return out;
}

CompletenessResult is_complete_discrete(const GroupPtr& g) {
  const auto subs = all_subgroups(g);
  CompletenessResult res;
  res.subgroups = subs.size();
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < subs.size(); ++i) index.emplace(subs[i].elements, i);

  // constraint (i, k, j, b): a_i·b·V_j = a_k·b·V_j with V_k = b V_j b⁻¹
  struct Constraint {
    std::size_t i, k, j;
    int b;
  };
  std::vector<std::vector<Constraint>> at(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i)
    for (std::size_t j = 0; j < subs.size(); ++j)
      for (int b = 0; b < static_cast<int>(g->order()); ++b) {
        auto c = conjugate(subs[i], g->inverse(b)).elements;
        if (!std::includes(subs[j].elements.begin(), subs[j].elements.end(), c.begin(), c.end())) continue;
        std::size_t k = index.at(conjugate(subs[j], b).elements);
        at[std::max(i, k)].push_back({i, k, j, b});
      }

  std::vector<std::vector<int>> choices(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    std::set<int> reps;
    for (int a = 0; a < static_cast<int>(g->order()); ++a) reps.insert(coset_representative(subs[i], a));
    choices[i].assign(reps.begin(), reps.end());
  }
  std::vector<int> family(subs.size(), -1);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == subs.size()) {
      ++res.families;
      std::size_t realizing = 0;
      for (int x = 0; x < static_cast<int>(g->order()); ++x) {
        bool ok = true;
        for (std::size_t u = 0; u < subs.size() && ok; ++u) ok = coset_representative(subs[u], x) == family[u];
        if (ok) ++realizing;
      }
      if (realizing == 1) ++res.realized;
      return;
    }
    for (int a : choices[i]) {
      family[i] = a;
      bool ok = true;
      for (const auto& c : at[i]) {
        const auto& v = subs[c.j];
        if (coset_representative(v, g->multiply(family[c.i], c.b)) !=
            coset_representative(v, g->multiply(family[c.k], c.b))) {
          ok = false;
          break;
        }
      }
      if (ok) rec(i + 1);
    }
    family[i] = -1;
  };
  rec(0);
  res.holds = res.families == res.realized && res.families == g->order();
  return res;
}

// ---------------------------------------------------------------- serialization

Json element_to_json(const PermutationGroup& g, int element) {
  if (g.structure()) return permutation_to_json(*g.structure(), g.element(element));
  return Json(g.element(element));
}

Json subgroup_to_json(const Subgroup& u) {
  Json j{{"order", u.order()}};
  if (u.stabilized) {
    j["stab"] = *u.stabilized;
  } else {
    Json elems = Json::array();
    for (int e : u.elements) elems.push_back(element_to_json(*u.parent, e));
    j["elements"] = elems;
  }
  return j;
}

Json arrow_to_json(const CosetArrow& arr) {
  return {{"source", subgroup_to_json(arr.source)},
          {"target", subgroup_to_json(arr.target)},
          {"representative", element_to_json(*arr.source.parent, arr.representative)},
          {"representative_cycles", cycles_to_string(arr.source.parent->element(arr.representative))},
          {"isomorphism", is_iso_arrow(arr)}};
}

}  // namespace topgal
