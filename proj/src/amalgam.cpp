#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "amalgam_impl.hpp"

namespace topgal {

namespace {

void check_span(const FraisseClass& cls, const Embedding& f, const Embedding& g) {
  if (f.source != g.source && !(*f.source == *g.source)) throw Error("amalgamate: the two embeddings have different sources");
  for (const auto* s : {f.source.get(), f.target.get(), g.target.get()})
    if (!(s->signature() == cls.signature())) throw SignatureMismatch("amalgamate: structure outside class " + cls.name());
}

}  // namespace

Amalgam normalize_amalgam(StructurePtr d, const Embedding& left, const Embedding& right) {
  const std::size_t n = d->size();
  std::vector<int> perm(n, -1);
  for (std::size_t i = 0; i < left.map.size(); ++i) perm[static_cast<std::size_t>(left.map[i])] = static_cast<int>(i);
  int next = static_cast<int>(left.map.size());
  for (std::size_t e = 0; e < n; ++e)
    if (perm[e] < 0) perm[e] = next++;
  bool identity = true;
  for (std::size_t e = 0; e < n; ++e) identity = identity && perm[e] == static_cast<int>(e);
  StructurePtr nd = identity ? d : share(relabel(*d, perm));
  std::vector<int> lmap(left.map.size()), rmap(right.map.size());
  std::iota(lmap.begin(), lmap.end(), 0);
  for (std::size_t i = 0; i < rmap.size(); ++i) rmap[i] = perm[static_cast<std::size_t>(right.map[i])];
  return {nd, Embedding{left.source, nd, std::move(lmap)}, Embedding{right.source, nd, std::move(rmap)}};
}

bool valid_amalgam(const FraisseClass& cls, const Embedding& f, const Embedding& g, const Amalgam& am) {
  if (!cls.contains(*am.d)) return false;
  if (!is_embedding(*f.target, *am.d, am.left.map) || !is_embedding(*g.target, *am.d, am.right.map)) return false;
  for (std::size_t a = 0; a < f.map.size(); ++a)
    if (am.left(f(static_cast<int>(a))) != am.right(g(static_cast<int>(a)))) return false;
  return true;
}

Json span_to_json(const Embedding& f, const Embedding& g) {
  return {{"A", structure_to_json(*f.source)},
          {"B1", structure_to_json(*f.target)},
          {"B2", structure_to_json(*g.target)},
          {"f", f.map},
          {"g", g.map}};
}

std::vector<Amalgam> amalgamate(const FraisseClass& cls, const Embedding& f, const Embedding& g) {
  check_span(cls, f, g);
  std::map<CanonicalLabel, Amalgam> found;
  cls.visit_amalgams(f, g, [&](const Amalgam& am) {
    std::vector<int> points = am.left.map;
    points.insert(points.end(), am.right.map.begin(), am.right.map.end());
    found.emplace(canonical_form_pointed(*am.d, points), am);
    return true;
  });
  std::vector<std::pair<std::pair<std::size_t, CanonicalLabel>, Amalgam>> keyed;
  for (auto& [label, am] : found) keyed.push_back({{cls.measure(*am.d), label}, am});
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Amalgam> out;
  for (auto& [k, am] : keyed) out.push_back(std::move(am));
  return out;
}

std::optional<Amalgam> preferred_amalgam(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                         const KeepApart& keep_apart) {
  check_span(cls, f, g);
  std::optional<Amalgam> found;
  cls.visit_amalgams(
      f, g,
      [&](const Amalgam& am) {
        found = am;
        return false;
      },
      keep_apart);
  return found;
}

namespace detail {

bool respects(const Amalgam& am, const KeepApart& keep_apart) {
  for (auto [x1, x2] : keep_apart)
    if (am.left(x1) == am.right(x2)) return false;
  return true;
}

// ---------------------------------------------------------------- free completion

SearchStatus free_completion_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                      const AmalgamVisitor& visit, const KeepApart& keep_apart) {
  const FiniteStructure& b1 = *f.target;
  const FiniteStructure& b2 = *g.target;
  const auto& sig = cls.signature();
  const int n1 = static_cast<int>(b1.size());
  const int n2 = static_cast<int>(b2.size());
  std::vector<int> m2(static_cast<std::size_t>(n2), -1);
  std::vector<char> shared1(static_cast<std::size_t>(n1), 0);
  for (std::size_t a = 0; a < f.map.size(); ++a) {
    m2[static_cast<std::size_t>(g.map[a])] = f.map[a];
    shared1[static_cast<std::size_t>(f.map[a])] = 1;
  }
  auto apart = [&](int x1, int x2) {
    return std::find(keep_apart.begin(), keep_apart.end(), std::make_pair(x1, x2)) != keep_apart.end();
  };
  for (auto [x1, x2] : keep_apart)
    if (m2[static_cast<std::size_t>(x2)] == x1) return SearchStatus::exhausted;
  std::vector<int> new2;
  for (int x = 0; x < n2; ++x)
    if (m2[static_cast<std::size_t>(x)] < 0) new2.push_back(x);
  std::vector<char> used1(static_cast<std::size_t>(n1), 0);
  bool stopped = false;

  auto complete = [&]() {
    // appended elements get fresh indices in B2 order
    std::vector<int> map = m2;
    std::vector<int> sorts = b1.element_sorts();
    for (int x : new2)
      if (map[static_cast<std::size_t>(x)] == -2) {
        map[static_cast<std::size_t>(x)] = static_cast<int>(sorts.size());
        sorts.push_back(b2.sort_of(x));
      }
    const int nd = static_cast<int>(sorts.size());
    std::vector<char> in2(static_cast<std::size_t>(nd), 0);
    for (int d : map) in2[static_cast<std::size_t>(d)] = 1;
    // tuples of B2 that land inside B1 must agree with B1
    std::vector<int> inside;
    for (int x = 0; x < n2; ++x)
      if (map[static_cast<std::size_t>(x)] < n1) inside.push_back(x);
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      const std::size_t ar = sig.relations()[r].arity.size();
      Tuple t(ar), m(ar);
      bool ok = true;
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (!ok) return;
        if (i == ar) {
          if (b1.holds(static_cast<int>(r), m) != b2.holds(static_cast<int>(r), t)) ok = false;
          return;
        }
        for (int x : inside) {
          t[i] = x;
          m[i] = map[static_cast<std::size_t>(x)];
          rec(i + 1);
        }
      };
      rec(0);
      if (!ok) return;
    }
    // mixed slots
    std::vector<std::pair<int, Tuple>> slots;
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      const auto& arity = sig.relations()[r].arity;
      Tuple t(arity.size());
      std::function<void(std::size_t, bool, bool)> rec = [&](std::size_t i, bool all1, bool all2) {
        if (i == arity.size()) {
          if (all1 || all2) return;
          if (cls.symmetric(static_cast<int>(r)) && t.size() == 2 && t[0] > t[1]) return;
          slots.emplace_back(static_cast<int>(r), t);
          return;
        }
        for (int e = 0; e < nd; ++e) {
          if (sorts[static_cast<std::size_t>(e)] != arity[i]) continue;
          t[i] = e;
          rec(i + 1, all1 && e < n1, all2 && in2[static_cast<std::size_t>(e)]);
        }
      };
      rec(0, true, true);
    }
    FiniteStructure base(sig, sorts);
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      for (const auto& t : b1.tuples(static_cast<int>(r))) base.add_tuple(static_cast<int>(r), t);
      for (const auto& t : b2.tuples(static_cast<int>(r))) {
        Tuple m(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) m[i] = map[static_cast<std::size_t>(t[i])];
        base.add_tuple(static_cast<int>(r), std::move(m));
      }
    }
    // choices in binary counting order, last slot fastest, all absent first
    std::vector<char> choice(slots.size(), 0);
    std::size_t leaves = 0;
    while (!stopped) {
      if (++leaves > (std::size_t{1} << 22)) throw ResourceLimit("free completion: too many relation choices");
      FiniteStructure d = base;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (choice[s]) {
          d.add_tuple(slots[s].first, slots[s].second);
          if (cls.symmetric(slots[s].first)) d.add_tuple(slots[s].first, {slots[s].second[1], slots[s].second[0]});
        }
      if (cls.contains(d)) {
        auto dp = share(std::move(d));
        std::vector<int> lmap(static_cast<std::size_t>(n1));
        std::iota(lmap.begin(), lmap.end(), 0);
        Amalgam am{dp, Embedding{f.target, dp, lmap}, Embedding{g.target, dp, map}};
        if (!visit(am)) stopped = true;
      }
      std::size_t i = slots.size();
      while (i > 0 && choice[i - 1]) choice[--i] = 0;
      if (i == 0) break;
      choice[i - 1] = 1;
    }
  };

  std::function<void(std::size_t)> ident = [&](std::size_t i) {
    if (stopped) return;
    if (i == new2.size()) {
      complete();
      return;
    }
    const int x = new2[i];
    m2[static_cast<std::size_t>(x)] = -2;
    ident(i + 1);
    for (int y = 0; y < n1 && !stopped; ++y) {
      if (shared1[static_cast<std::size_t>(y)] || used1[static_cast<std::size_t>(y)]) continue;
      if (b1.sort_of(y) != b2.sort_of(x) || apart(y, x)) continue;
      used1[static_cast<std::size_t>(y)] = 1;
      m2[static_cast<std::size_t>(x)] = y;
      ident(i + 1);
      used1[static_cast<std::size_t>(y)] = 0;
    }
    m2[static_cast<std::size_t>(x)] = -1;
  };
  ident(0);
  return stopped ? SearchStatus::stopped : SearchStatus::exhausted;
}

// ---------------------------------------------------------------- shuffles

SearchStatus shuffle_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                              const AmalgamVisitor& visit, const KeepApart& keep_apart) {
  const FiniteStructure& b1 = *f.target;
  const FiniteStructure& b2 = *g.target;
  auto sorted_by_order = [](const FiniteStructure& s) {
    std::vector<int> rank(s.size(), 0), out(s.size());
    for (const auto& t : s.tuples(0)) ++rank[static_cast<std::size_t>(t[1])];
    for (std::size_t e = 0; e < s.size(); ++e) out[static_cast<std::size_t>(rank[e])] = static_cast<int>(e);
    return out;
  };
  const std::vector<int> l1 = sorted_by_order(b1), l2 = sorted_by_order(b2);
  std::vector<int> a_of1(b1.size(), -1), a_of2(b2.size(), -1);
  for (std::size_t a = 0; a < f.map.size(); ++a) {
    a_of1[static_cast<std::size_t>(f.map[a])] = static_cast<int>(a);
    a_of2[static_cast<std::size_t>(g.map[a])] = static_cast<int>(a);
  }
  auto apart = [&](int x1, int x2) {
    return std::find(keep_apart.begin(), keep_apart.end(), std::make_pair(x1, x2)) != keep_apart.end();
  };
  std::vector<std::pair<int, int>> seq;  // merged order: (B1 element or -1, B2 element or -1)
  bool stopped = false;

  auto emit = [&]() {
    const int n1 = static_cast<int>(b1.size());
    std::vector<int> map(b2.size(), -1);
    int next = n1;
    std::vector<int> pos_of;  // D element -> position in seq
    for (const auto& [x1, x2] : seq)
      if (x2 >= 0) map[static_cast<std::size_t>(x2)] = x1 >= 0 ? x1 : -2;
    for (std::size_t x = 0; x < b2.size(); ++x)
      if (map[x] == -2) map[x] = next++;
    std::vector<int> position(static_cast<std::size_t>(next), 0);
    for (std::size_t p = 0; p < seq.size(); ++p) {
      int d = seq[p].first >= 0 ? seq[p].first : map[static_cast<std::size_t>(seq[p].second)];
      position[static_cast<std::size_t>(d)] = static_cast<int>(p);
    }
    FiniteStructure d(cls.signature(), static_cast<std::size_t>(next));
    for (int x = 0; x < next; ++x)
      for (int y = 0; y < next; ++y)
        if (position[static_cast<std::size_t>(x)] < position[static_cast<std::size_t>(y)]) d.add_tuple(0, {x, y});
    auto dp = share(std::move(d));
    std::vector<int> lmap(static_cast<std::size_t>(n1));
    std::iota(lmap.begin(), lmap.end(), 0);
    if (!visit(Amalgam{dp, Embedding{f.target, dp, lmap}, Embedding{g.target, dp, map}})) stopped = true;
  };

  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
    if (stopped) return;
    if (i == l1.size() && j == l2.size()) {
      emit();
      return;
    }
    const int h1 = i < l1.size() ? l1[i] : -1;
    const int h2 = j < l2.size() ? l2[j] : -1;
    const bool a1 = h1 >= 0 && a_of1[static_cast<std::size_t>(h1)] >= 0;
    const bool a2 = h2 >= 0 && a_of2[static_cast<std::size_t>(h2)] >= 0;
    auto step = [&](int x1, int x2, std::size_t ni, std::size_t nj) {
      seq.emplace_back(x1, x2);
      rec(ni, nj);
      seq.pop_back();
    };
    if (a1 && a2) {
      if (a_of1[static_cast<std::size_t>(h1)] == a_of2[static_cast<std::size_t>(h2)]) step(h1, h2, i + 1, j + 1);
      return;
    }
    if (h1 >= 0 && !a1) step(h1, -1, i + 1, j);
    if (h2 >= 0 && !a2) step(-1, h2, i, j + 1);
    if (h1 >= 0 && h2 >= 0 && !a1 && !a2 && !apart(h1, h2)) step(h1, h2, i + 1, j + 1);
  };
  rec(0, 0);
  return stopped ? SearchStatus::stopped : SearchStatus::exhausted;
}

// ---------------------------------------------------------------- Boolean algebras

Amalgam algebra_from_cover(const Embedding& f, const Embedding& g, const AtomView& v1, const AtomView& v2,
                           const std::vector<std::pair<int, int>>& cover) {
  auto d = share(make_boolean_algebra(cover.size()));
  std::vector<int> lmap(f.target->size()), rmap(g.target->size());
  for (std::size_t x = 0; x < lmap.size(); ++x) {
    unsigned m = 0;
    for (std::size_t i = 0; i < cover.size(); ++i)
      if (v1.mask[x] >> cover[i].first & 1) m |= 1u << i;
    lmap[x] = static_cast<int>(m);
  }
  for (std::size_t x = 0; x < rmap.size(); ++x) {
    unsigned m = 0;
    for (std::size_t i = 0; i < cover.size(); ++i)
      if (v2.mask[x] >> cover[i].second & 1) m |= 1u << i;
    rmap[x] = static_cast<int>(m);
  }
  return normalize_amalgam(d, Embedding{f.target, d, lmap}, Embedding{g.target, d, rmap});
}

SearchStatus atom_product_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                   const AmalgamVisitor& visit, const KeepApart& keep_apart) {
  (void)cls;
  auto va = atom_view(*f.source), v1 = atom_view(*f.target), v2 = atom_view(*g.target);
  if (!va || !v1 || !v2) throw Error("atom amalgam: not a Boolean algebra");
  auto fiber_owner = [&](const AtomView& vb, const Embedding& e) {
    std::vector<int> owner(vb.atoms.size(), -1);
    for (std::size_t a = 0; a < va->atoms.size(); ++a) {
      unsigned m = vb.mask[static_cast<std::size_t>(e(va->atoms[a]))];
      for (std::size_t p = 0; p < vb.atoms.size(); ++p)
        if (m >> p & 1) owner[p] = static_cast<int>(a);
    }
    return owner;
  };
  const auto own1 = fiber_owner(*v1, f), own2 = fiber_owner(*v2, g);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t p = 0; p < own1.size(); ++p)
    for (std::size_t q = 0; q < own2.size(); ++q)
      if (own1[p] == own2[q]) pairs.emplace_back(static_cast<int>(p), static_cast<int>(q));
  if (pairs.size() > 40) throw ResourceLimit("atom amalgam: fibered product too large");

  // preferred: per A-atom, a minimal cover pairing the fibers in order
  std::vector<std::pair<int, int>> preferred;
  for (std::size_t a = 0; a < va->atoms.size(); ++a) {
    std::vector<int> ps, qs;
    for (std::size_t p = 0; p < own1.size(); ++p)
      if (own1[p] == static_cast<int>(a)) ps.push_back(static_cast<int>(p));
    for (std::size_t q = 0; q < own2.size(); ++q)
      if (own2[q] == static_cast<int>(a)) qs.push_back(static_cast<int>(q));
    const std::size_t m = std::max(ps.size(), qs.size());
    for (std::size_t i = 0; i < m; ++i)
      preferred.emplace_back(ps[std::min(i, ps.size() - 1)], qs[std::min(i, qs.size() - 1)]);
  }
  std::sort(preferred.begin(), preferred.end());
  {
    Amalgam am = algebra_from_cover(f, g, *v1, *v2, preferred);
    if (respects(am, keep_apart) && !visit(am)) return SearchStatus::stopped;
  }

  // every other cover
  std::vector<int> cov1(own1.size(), 0), cov2(own2.size(), 0);
  std::vector<int> remaining1(own1.size(), 0), remaining2(own2.size(), 0);
  for (auto [p, q] : pairs) {
    ++remaining1[static_cast<std::size_t>(p)];
    ++remaining2[static_cast<std::size_t>(q)];
  }
  std::vector<std::pair<int, int>> chosen;
  bool stopped = false;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (stopped) return;
    if (i == pairs.size()) {
      for (int c : cov1)
        if (!c) return;
      for (int c : cov2)
        if (!c) return;
      if (chosen == preferred) return;
      Amalgam am = algebra_from_cover(f, g, *v1, *v2, chosen);
      if (respects(am, keep_apart) && !visit(am)) stopped = true;
      return;
    }
    auto [p, q] = pairs[i];
    auto& r1 = remaining1[static_cast<std::size_t>(p)];
    auto& r2 = remaining2[static_cast<std::size_t>(q)];
    --r1;
    --r2;
    // exclude, if both atoms can still be covered later
    if ((cov1[static_cast<std::size_t>(p)] || r1 > 0) && (cov2[static_cast<std::size_t>(q)] || r2 > 0)) rec(i + 1);
    ++cov1[static_cast<std::size_t>(p)];
    ++cov2[static_cast<std::size_t>(q)];
    chosen.emplace_back(p, q);
    rec(i + 1);
    chosen.pop_back();
    --cov1[static_cast<std::size_t>(p)];
    --cov2[static_cast<std::size_t>(q)];
    ++r1;
    ++r2;
  };
  rec(0);
  return stopped ? SearchStatus::stopped : SearchStatus::exhausted;
}

// ---------------------------------------------------------------- groups

namespace {

const std::vector<StructurePtr>& candidate_groups() {
  static const std::vector<StructurePtr> list = [] {
    std::vector<FiniteStructure> base;
    for (const auto& name : small_group_names()) base.push_back(make_named_group(name));
    // Products may repeat an isomorphism type; labeling large elementary abelian
    // groups is costly, so duplicates are kept and ordering is by size only.
    std::vector<StructurePtr> out;
    for (auto& g : base) out.push_back(share(g));
    for (std::size_t i = 0; i < base.size(); ++i)
      for (std::size_t j = i; j < base.size(); ++j)
        if (base[i].size() > 1 && base[j].size() > 1 && base[i].size() * base[j].size() <= 64)
          out.push_back(share(group_product(base[i], base[j])));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a->size() < b->size(); });
    return out;
  }();
  return list;
}

}  // namespace

SearchStatus group_identification_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                           const AmalgamVisitor& visit, const KeepApart& keep_apart,
                                           std::size_t cap) {
  (void)cls;
  const std::size_t n1 = f.target->size(), n2 = g.target->size();
  bool stopped = false;
  for (const auto& d : candidate_groups()) {
    if (d->size() > cap) break;
    if (d->size() % n1 || d->size() % n2) continue;
    visit_embeddings(*f.target, *d, [&](const std::vector<int>& left) {
      std::vector<int> partial(n2, -1);
      for (std::size_t a = 0; a < f.map.size(); ++a)
        partial[static_cast<std::size_t>(g.map[a])] = left[static_cast<std::size_t>(f.map[a])];
      visit_embeddings(
          *g.target, *d,
          [&](const std::vector<int>& right) {
            Amalgam am = normalize_amalgam(d, Embedding{f.target, d, left}, Embedding{g.target, d, right});
            if (respects(am, keep_apart) && !visit(am)) stopped = true;
            return !stopped;
          },
          partial);
      return !stopped;
    });
    if (stopped) return SearchStatus::stopped;
  }
  return SearchStatus::bounded;
}

}  // namespace detail
}  // namespace topgal
