#include <bit>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "amalgam_impl.hpp"
#include "topgal/fraisse.hpp"

namespace topgal {

std::string to_string(Tri t) {
  switch (t) {
    case Tri::no: return "false";
    case Tri::yes: return "true";
    default: return "inconclusive";
  }
}

// ---------------------------------------------------------------- base class

FraisseClass::FraisseClass(std::string name, Signature signature)
    : name_(std::move(name)), signature_(std::move(signature)) {}

const std::vector<StructurePtr>& FraisseClass::members(std::size_t measure) const {
  std::lock_guard lock(cache_mutex_);
  auto it = cache_.find(measure);
  if (it != cache_.end()) return it->second;
  std::vector<StructurePtr> list;
  if (!max_measure() || measure <= *max_measure()) list = enumerate(measure);
  std::sort(list.begin(), list.end(), [](const StructurePtr& a, const StructurePtr& b) { return a->label() < b->label(); });
  return cache_.emplace(measure, std::move(list)).first->second;
}

std::vector<StructurePtr> FraisseClass::members_upto(std::size_t measure) const {
  std::vector<StructurePtr> out;
  for (std::size_t m = 0; m <= measure; ++m) {
    const auto& level = members(m);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::vector<StructurePtr> FraisseClass::raw_one_point_extensions(const FiniteStructure& base) const {
  const auto& sig = signature();
  std::vector<StructurePtr> out;
  const int n = static_cast<int>(base.size());
  for (std::size_t sort = 0; sort < sig.sorts().size(); ++sort) {
    std::vector<int> sorts = base.element_sorts();
    sorts.push_back(static_cast<int>(sort));
    // slots: (relation, tuple) containing the new element n
    std::vector<std::pair<int, Tuple>> slots;
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      const auto& arity = sig.relations()[r].arity;
      Tuple t(arity.size());
      std::function<void(std::size_t, bool)> rec = [&](std::size_t i, bool has_new) {
        if (i == arity.size()) {
          if (!has_new) return;
          if (symmetric(static_cast<int>(r)) && t.size() == 2 && t[0] > t[1]) return;
          slots.emplace_back(static_cast<int>(r), t);
          return;
        }
        for (int e = 0; e <= n; ++e) {
          if (sorts[static_cast<std::size_t>(e)] != arity[i]) continue;
          t[i] = e;
          rec(i + 1, has_new || e == n);
        }
      };
      rec(0, false);
    }
    if (slots.size() > 20) throw ResourceLimit("too many relation slots for one-point extension");
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << slots.size()); ++m) {
      FiniteStructure s(sig, sorts);
      for (std::size_t r = 0; r < sig.relations().size(); ++r)
        for (const auto& t : base.tuples(static_cast<int>(r))) s.add_tuple(static_cast<int>(r), t);
      for (std::size_t i = 0; i < slots.size(); ++i)
        if (m >> i & 1) {
          s.add_tuple(slots[i].first, slots[i].second);
          if (symmetric(slots[i].first)) s.add_tuple(slots[i].first, {slots[i].second[1], slots[i].second[0]});
        }
      out.push_back(share(std::move(s)));
    }
  }
  return out;
}

std::vector<StructurePtr> FraisseClass::enumerate(std::size_t measure) const {
  if (!signature().functions().empty() || !signature().constants().empty())
    throw Error("class " + name() + " needs a dedicated enumerator");
  std::vector<StructurePtr> level;
  FiniteStructure empty(signature(), std::vector<int>{});
  if (ambient(empty)) level.push_back(share(empty));
  for (std::size_t m = 1; m <= measure; ++m) {
    std::map<CanonicalLabel, StructurePtr> next;
    for (const auto& s : level)
      for (auto& t : raw_one_point_extensions(*s))
        if (ambient(*t)) next.emplace(t->label(), t);
    level.clear();
    for (auto& [label, s] : next) level.push_back(s);
  }
  std::vector<StructurePtr> out;
  for (auto& s : level)
    if (contains(*s)) out.push_back(s);
  return out;
}

std::vector<Extension> FraisseClass::one_point_extensions(const StructurePtr& base) const {
  std::vector<int> points(base->size());
  std::iota(points.begin(), points.end(), 0);
  std::map<std::vector<int>, StructurePtr> seen;
  for (auto& t : raw_one_point_extensions(*base)) {
    if (!contains(*t)) continue;
    seen.emplace(canonical_form_pointed(*t, points).code, t);
  }
  std::vector<Extension> out;
  for (auto& [key, t] : seen) out.push_back({t, key});
  return out;
}

std::vector<std::vector<int>> FraisseClass::small_substructures(const FiniteStructure& a, std::size_t bound) const {
  std::set<std::vector<int>> found;
  const int n = static_cast<int>(a.size());
  std::vector<int> seed;
  std::function<void(int)> rec = [&](int start) {
    auto elems = close_under_functions(a, seed).sorted();
    if (!found.count(elems)) {
      FiniteStructure sub = induced(a, elems);
      if (measure(sub) <= bound) found.insert(elems);
    }
    if (seed.size() == bound) return;
    for (int e = start; e < n; ++e) {
      seed.push_back(e);
      rec(e + 1);
      seed.pop_back();
    }
  };
  rec(0);
  return {found.begin(), found.end()};
}

Substructure FraisseClass::bottom_of(const StructurePtr& member) const {
  return generated_substructure(member, std::vector<int>{});
}

std::pair<Tri, std::optional<Amalgam>> FraisseClass::split(const Embedding& a, int b) const {
  const auto img = a.image();
  if (std::binary_search(img.begin(), img.end(), b)) return {Tri::no, std::nullopt};
  std::optional<Amalgam> found;
  SearchStatus st = visit_amalgams(
      a, a,
      [&](const Amalgam& am) {
        found = am;
        return false;
      },
      KeepApart{{b, b}});
  if (found) return {Tri::yes, found};
  return {st == SearchStatus::exhausted ? Tri::no : Tri::unknown, std::nullopt};
}

// ---------------------------------------------------------------- signatures and builders

Signature graph_signature() { return Signature::single_sorted({{"E", 2}}); }
Signature order_signature() { return Signature::single_sorted({{"lt", 2}}); }
Signature set_signature() { return Signature::single_sorted(); }

Signature boolean_algebra_signature() {
  Signature sig;
  sig.add_sort("element");
  sig.add_function("meet", {0, 0}, 0);
  sig.add_function("join", {0, 0}, 0);
  sig.add_function("compl", {0}, 0);
  sig.add_constant("bot", 0);
  sig.add_constant("top", 0);
  return sig;
}

Signature group_signature() {
  Signature sig;
  sig.add_sort("element");
  sig.add_function("mul", {0, 0}, 0);
  sig.add_constant("e", 0);
  return sig;
}

FiniteStructure make_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  FiniteStructure g(graph_signature(), n);
  for (auto [a, b] : edges) {
    g.add_tuple(0, {a, b});
    g.add_tuple(0, {b, a});
  }
  return g;
}

FiniteStructure make_set(std::size_t n) { return FiniteStructure(set_signature(), n); }

FiniteStructure make_chain(std::size_t n) {
  FiniteStructure s(order_signature(), n);
  for (int i = 0; i < static_cast<int>(n); ++i)
    for (int j = i + 1; j < static_cast<int>(n); ++j) s.add_tuple(0, {i, j});
  return s;
}

FiniteStructure make_boolean_algebra(std::size_t atoms) {
  if (atoms > 12) throw ResourceLimit("Boolean algebra with more than 12 atoms");
  const int n = 1 << atoms;
  FiniteStructure s(boolean_algebra_signature(), static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    s.set_value(2, std::vector<int>{x}, (n - 1) & ~x);
    for (int y = 0; y < n; ++y) {
      s.set_value(0, std::vector<int>{x, y}, x & y);
      s.set_value(1, std::vector<int>{x, y}, x | y);
    }
  }
  s.set_constant(0, 0);
  s.set_constant(1, n - 1);
  return s;
}

FiniteStructure make_group(const std::vector<std::vector<int>>& table) {
  FiniteStructure s(group_signature(), table.size());
  for (std::size_t x = 0; x < table.size(); ++x)
    for (std::size_t y = 0; y < table.size(); ++y)
      s.set_value(0, std::vector<int>{static_cast<int>(x), static_cast<int>(y)}, table[x][y]);
  s.set_constant(0, 0);
  return s;
}

FiniteStructure make_cyclic_group(std::size_t n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) t[x][y] = static_cast<int>((x + y) % n);
  return make_group(t);
}

namespace {

// Group generated by permutations, elements sorted with the identity first.
FiniteStructure permutation_group(const std::vector<std::vector<int>>& gens) {
  const std::size_t deg = gens.front().size();
  std::vector<int> id(deg);
  std::iota(id.begin(), id.end(), 0);
  std::set<std::vector<int>> elems{id};
  std::vector<std::vector<int>> frontier{id};
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (auto& p : frontier)
      for (auto& g : gens) {
        std::vector<int> q(deg);
        for (std::size_t i = 0; i < deg; ++i) q[i] = g[static_cast<std::size_t>(p[i])];
        if (elems.insert(q).second) next.push_back(q);
      }
    frontier = std::move(next);
  }
  std::vector<std::vector<int>> list(elems.begin(), elems.end());  // identity is lexicographically least
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < list.size(); ++i) index[list[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> t(list.size(), std::vector<int>(list.size()));
  for (std::size_t a = 0; a < list.size(); ++a)
    for (std::size_t b = 0; b < list.size(); ++b) {
      std::vector<int> q(deg);
      for (std::size_t i = 0; i < deg; ++i) q[i] = list[a][static_cast<std::size_t>(list[b][i])];
      t[a][b] = index.at(q);
    }
  return make_group(t);
}

FiniteStructure quaternion_group() {
  // element = sign * 4 + unit, units 1, i, j, k
  static const int unit_mul[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sign_mul[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<std::vector<int>> t(8, std::vector<int>(8));
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int ux = x % 4, uy = y % 4;
      int sign = (x / 4 + y / 4 + sign_mul[ux][uy]) % 2;
      t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = sign * 4 + unit_mul[ux][uy];
    }
  return make_group(t);
}

FiniteStructure xor_group(int bits) {
  const int n = 1 << bits;
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = x ^ y;
  return make_group(t);
}

}  // namespace

FiniteStructure group_product(const FiniteStructure& a, const FiniteStructure& b) {
  const std::size_t nb = b.size();
  FiniteStructure s(group_signature(), a.size() * nb);
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y) {
      int u = a.apply(0, {static_cast<int>(x / nb), static_cast<int>(y / nb)});
      int v = b.apply(0, {static_cast<int>(x % nb), static_cast<int>(y % nb)});
      s.set_value(0, std::vector<int>{static_cast<int>(x), static_cast<int>(y)}, u * static_cast<int>(nb) + v);
    }
  s.set_constant(0, a.constant(0) * static_cast<int>(nb) + b.constant(0));
  return s;
}

std::vector<std::string> small_group_names() {
  return {"Z1", "Z2", "Z3", "Z4", "V4", "Z5", "Z6", "S3", "Z7", "Z8", "Z4xZ2", "Z2^3", "D4", "Q8"};
}

FiniteStructure make_named_group(const std::string& name) {
  if (name.size() == 2 && name[0] == 'Z' && name[1] >= '1' && name[1] <= '8')
    return make_cyclic_group(static_cast<std::size_t>(name[1] - '0'));
  if (name == "V4") return xor_group(2);
  if (name == "Z2^3") return xor_group(3);
  if (name == "Z4xZ2") return group_product(make_cyclic_group(4), make_cyclic_group(2));
  if (name == "S3") return permutation_group({{1, 0, 2}, {1, 2, 0}});
  if (name == "D4") return permutation_group({{1, 2, 3, 0}, {0, 3, 2, 1}});
  if (name == "Q8") return quaternion_group();
  throw Error("unknown group '" + name + "'");
}

std::optional<AtomView> atom_view(const FiniteStructure& s) {
  const auto& sig = s.signature();
  auto meet = sig.function_index("meet"), join = sig.function_index("join"), compl_ = sig.function_index("compl");
  auto bot = sig.constant_index("bot"), top = sig.constant_index("top");
  if (!meet || !join || !compl_ || !bot || !top) return std::nullopt;
  const int n = static_cast<int>(s.size());
  const int b0 = s.constant(*bot);
  AtomView v;
  for (int x = 0; x < n; ++x) {
    if (x == b0) continue;
    bool atom = true;
    for (int y = 0; y < n && atom; ++y) {
      int m = s.apply(*meet, {x, y});
      atom = m == b0 || m == x;
    }
    if (atom) v.atoms.push_back(x);
  }
  const std::size_t k = v.atoms.size();
  if (k > 16 || static_cast<std::size_t>(n) != (std::size_t{1} << k)) return std::nullopt;
  v.mask.assign(static_cast<std::size_t>(n), 0);
  v.element_of_mask.assign(static_cast<std::size_t>(n), -1);
  for (int x = 0; x < n; ++x) {
    unsigned m = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (s.apply(*meet, {v.atoms[i], x}) == v.atoms[i]) m |= 1u << i;
    if (v.element_of_mask[m] >= 0) return std::nullopt;
    v.mask[static_cast<std::size_t>(x)] = m;
    v.element_of_mask[m] = x;
  }
  const unsigned full = (1u << k) - 1;
  if (v.mask[static_cast<std::size_t>(b0)] != 0 || v.mask[static_cast<std::size_t>(s.constant(*top))] != full)
    return std::nullopt;
  for (int x = 0; x < n; ++x) {
    const unsigned mx = v.mask[static_cast<std::size_t>(x)];
    if (v.mask[static_cast<std::size_t>(s.apply(*compl_, {x}))] != (full & ~mx)) return std::nullopt;
    for (int y = 0; y < n; ++y) {
      const unsigned my = v.mask[static_cast<std::size_t>(y)];
      if (v.mask[static_cast<std::size_t>(s.apply(*meet, {x, y}))] != (mx & my)) return std::nullopt;
      if (v.mask[static_cast<std::size_t>(s.apply(*join, {x, y}))] != (mx | my)) return std::nullopt;
    }
  }
  return v;
}

// ---------------------------------------------------------------- concrete classes

namespace {

bool is_graph(const FiniteStructure& s) {
  for (const auto& t : s.tuples(0)) {
    if (t[0] == t[1]) return false;
    if (!s.holds(0, std::vector<int>{t[1], t[0]})) return false;
  }
  return true;
}

bool is_acyclic_graph(const FiniteStructure& s) {
  // union-find over undirected edges
  std::vector<int> parent(s.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int u) {
    while (parent[static_cast<std::size_t>(u)] != u) u = parent[static_cast<std::size_t>(u)];
    return u;
  };
  for (const auto& t : s.tuples(0)) {
    if (t[0] > t[1]) continue;
    int a = find(t[0]), b = find(t[1]);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
  }
  return true;
}

bool is_linear_order(const FiniteStructure& s) {
  const int n = static_cast<int>(s.size());
  for (int x = 0; x < n; ++x) {
    if (s.holds(0, std::vector<int>{x, x})) return false;
    for (int y = x + 1; y < n; ++y)
      if (s.holds(0, std::vector<int>{x, y}) == s.holds(0, std::vector<int>{y, x})) return false;
  }
  for (const auto& a : s.tuples(0))
    for (const auto& b : s.tuples(0))
      if (a[1] == b[0] && !s.holds(0, std::vector<int>{a[0], b[1]})) return false;
  return true;
}

using Predicate = std::function<bool(const FiniteStructure&)>;

/// Relational class amalgamated by free completion.
class RelationalClass : public FraisseClass {
 public:
  RelationalClass(std::string name, Signature sig, Predicate contains, Predicate ambient,
                  std::vector<int> symmetric_relations, std::optional<std::size_t> cap)
      : FraisseClass(std::move(name), std::move(sig)),
        contains_(std::move(contains)),
        ambient_(std::move(ambient)),
        symmetric_(std::move(symmetric_relations)),
        cap_(cap) {}

  std::string strategy() const override { return "free-completion-enumeration"; }
  bool contains(const FiniteStructure& s) const override {
    if (!(s.signature() == signature())) return false;
    if (cap_ && s.size() > *cap_) return false;
    return contains_(s);
  }
  std::optional<std::size_t> max_measure() const override { return cap_; }
  bool symmetric(int r) const override { return std::find(symmetric_.begin(), symmetric_.end(), r) != symmetric_.end(); }
  SearchStatus visit_amalgams(const Embedding& f, const Embedding& g, const AmalgamVisitor& visit,
                              const KeepApart& keep_apart) const override {
    return detail::free_completion_amalgams(*this, f, g, visit, keep_apart);
  }

 protected:
  bool ambient(const FiniteStructure& s) const override {
    if (cap_ && s.size() > *cap_) return false;
    return ambient_ ? ambient_(s) : contains(s);
  }

 private:
  Predicate contains_;
  Predicate ambient_;
  std::vector<int> symmetric_;
  std::optional<std::size_t> cap_;
};

class LinearOrders : public FraisseClass {
 public:
  LinearOrders() : FraisseClass("linear_orders", order_signature()) {}
  std::string strategy() const override { return "shuffle"; }
  bool contains(const FiniteStructure& s) const override {
    return s.signature() == signature() && is_linear_order(s);
  }
  SearchStatus visit_amalgams(const Embedding& f, const Embedding& g, const AmalgamVisitor& visit,
                              const KeepApart& keep_apart) const override {
    return detail::shuffle_amalgams(*this, f, g, visit, keep_apart);
  }

 protected:
  std::vector<StructurePtr> enumerate(std::size_t measure) const override { return {share(make_chain(measure))}; }
};

class BooleanAlgebras : public FraisseClass {
 public:
  BooleanAlgebras() : FraisseClass("boolean_algebras", boolean_algebra_signature()) {}
  std::string strategy() const override { return "atom-fibered-product"; }
  bool contains(const FiniteStructure& s) const override {
    if (!(s.signature() == signature()) || s.size() < 2) return false;
    return atom_view(s).has_value();
  }
  std::size_t measure(const FiniteStructure& s) const override {
    auto v = atom_view(s);
    return v ? v->atoms.size() : s.size();
  }
  SearchStatus visit_amalgams(const Embedding& f, const Embedding& g, const AmalgamVisitor& visit,
                              const KeepApart& keep_apart) const override {
    return detail::atom_product_amalgams(*this, f, g, visit, keep_apart);
  }

  // Extension types over S: the nonempty sets of S-atoms that get split in two.
  std::vector<Extension> one_point_extensions(const StructurePtr& base) const override {
    auto v = atom_view(*base);
    if (!v) throw Error("one_point_extensions: not a Boolean algebra");
    const std::size_t k = v->atoms.size();
    std::vector<Extension> out;
    for (unsigned split = 1; split < (1u << k); ++split) {
      // new atom list: atom i keeps position; split atoms get an extra atom appended
      std::vector<unsigned> image(k);  // S-atom i -> mask of T-atoms
      std::size_t next = k;
      for (std::size_t i = 0; i < k; ++i) {
        image[i] = 1u << i;
        if (split >> i & 1) image[i] |= 1u << next++;
      }
      FiniteStructure t = make_boolean_algebra(next);
      // S elements first, in S order; then the rest by mask
      std::vector<int> perm(t.size(), -1);
      std::vector<char> used(t.size(), 0);
      for (std::size_t e = 0; e < base->size(); ++e) {
        unsigned m = 0;
        for (std::size_t i = 0; i < k; ++i)
          if (v->mask[e] >> i & 1) m |= image[i];
        perm[m] = static_cast<int>(e);
        used[m] = 1;
      }
      int fresh = static_cast<int>(base->size());
      for (std::size_t m = 0; m < t.size(); ++m)
        if (!used[m]) perm[m] = fresh++;
      out.push_back({share(relabel(t, perm)), {static_cast<int>(split)}});
    }
    return out;
  }

  // Subalgebras correspond to partitions of the atom set.
  std::vector<std::vector<int>> small_substructures(const FiniteStructure& a, std::size_t bound) const override {
    auto v = atom_view(a);
    if (!v) throw Error("small_substructures: not a Boolean algebra");
    const std::size_t k = v->atoms.size();
    std::set<std::vector<int>> found;
    std::vector<int> block(k, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int blocks) {
      if (i == k) {
        std::vector<unsigned> bm(static_cast<std::size_t>(blocks), 0);
        for (std::size_t j = 0; j < k; ++j) bm[static_cast<std::size_t>(block[j])] |= 1u << j;
        std::vector<int> elems;
        for (unsigned sel = 0; sel < (1u << blocks); ++sel) {
          unsigned m = 0;
          for (int b = 0; b < blocks; ++b)
            if (sel >> b & 1) m |= bm[static_cast<std::size_t>(b)];
          elems.push_back(v->element_of_mask[m]);
        }
        std::sort(elems.begin(), elems.end());
        found.insert(elems);
        return;
      }
      for (int b = 0; b <= blocks && static_cast<std::size_t>(b) < bound; ++b) {
        block[i] = b;
        rec(i + 1, std::max(blocks, b + 1));
      }
    };
    if (k == 0) return {};
    rec(0, 0);
    return {found.begin(), found.end()};
  }

  std::pair<Tri, std::optional<Amalgam>> split(const Embedding& a, int b) const override;

 protected:
  std::vector<StructurePtr> enumerate(std::size_t measure) const override {
    if (measure == 0) return {};
    return {share(make_boolean_algebra(measure))};
  }
};

// Atom-level decision: b splits over A iff b is not a union of whole fibers
// over A-atoms; the witness swaps two B-atoms inside one fiber.
std::pair<Tri, std::optional<Amalgam>> BooleanAlgebras::split(const Embedding& a, int b) const {
  auto va = atom_view(*a.source);
  auto vb = atom_view(*a.target);
  if (!va || !vb) throw Error("split: not a Boolean algebra");
  const std::size_t kb = vb->atoms.size();
  const unsigned bm = vb->mask[static_cast<std::size_t>(b)];
  for (int alpha : va->atoms) {
    const unsigned fiber = vb->mask[static_cast<std::size_t>(a(alpha))];
    const unsigned inside = fiber & bm, outside = fiber & ~bm;
    if (inside == 0 || outside == 0) continue;
    int p = std::countr_zero(inside), q = std::countr_zero(outside);
    std::vector<std::pair<int, int>> cover;
    for (int i = 0; i < static_cast<int>(kb); ++i) {
      int j = i == p ? q : i == q ? p : i;
      cover.emplace_back(i, j);
    }
    std::sort(cover.begin(), cover.end());
    Amalgam am = detail::algebra_from_cover(a, a, *vb, *vb, cover);
    return {Tri::yes, am};
  }
  return {Tri::no, std::nullopt};
}

class SmallGroups : public FraisseClass {
 public:
  SmallGroups() : FraisseClass("groups_small", group_signature()) {}
  std::string strategy() const override { return "identification-search"; }
  bool exact_amalgams() const override { return false; }
  bool contains(const FiniteStructure& s) const override {
    if (!(s.signature() == signature()) || s.size() == 0) return false;
    const int n = static_cast<int>(s.size());
    const int e = s.constant(0);
    for (int x = 0; x < n; ++x) {
      if (s.apply(0, {e, x}) != x || s.apply(0, {x, e}) != x) return false;
      bool inverse = false;
      for (int y = 0; y < n && !inverse; ++y) inverse = s.apply(0, {x, y}) == e;
      if (!inverse) return false;
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          if (s.apply(0, {s.apply(0, {x, y}), z}) != s.apply(0, {x, s.apply(0, {y, z})})) return false;
    }
    return true;
  }
  SearchStatus visit_amalgams(const Embedding& f, const Embedding& g, const AmalgamVisitor& visit,
                              const KeepApart& keep_apart) const override {
    return detail::group_identification_amalgams(*this, f, g, visit, keep_apart,
                                                 f.target->size() * g.target->size());
  }
  std::vector<Extension> one_point_extensions(const StructurePtr&) const override {
    throw Error("groups_small does not support stage construction");
  }

 protected:
  std::vector<StructurePtr> enumerate(std::size_t measure) const override {
    if (measure > 8) throw ResourceLimit("groups_small enumerates orders up to 8");
    std::map<CanonicalLabel, StructurePtr> found;
    for (const auto& name : small_group_names()) {
      auto g = share(make_named_group(name));
      if (g->size() == measure) found.emplace(g->label(), g);
    }
    std::vector<StructurePtr> out;
    for (auto& [l, g] : found) out.push_back(g);
    return out;
  }
};

ClassPtr build_class(const std::string& name) {
  auto graphs = [](std::string nm, Predicate pred, bool ambient_graphs, std::optional<std::size_t> cap) {
    return std::make_shared<RelationalClass>(std::move(nm), graph_signature(), std::move(pred),
                                             ambient_graphs ? Predicate(is_graph) : Predicate(), std::vector<int>{0},
                                             cap);
  };
  auto always = [](const FiniteStructure&) { return true; };
  if (name == "sets") return std::make_shared<RelationalClass>("sets", set_signature(), always, nullptr, std::vector<int>{}, std::nullopt);
  if (name == "sets_le3") return std::make_shared<RelationalClass>("sets_le3", set_signature(), always, nullptr, std::vector<int>{}, 3);
  if (name == "graphs") return graphs("graphs", is_graph, false, std::nullopt);
  if (name == "graphs_le2") return graphs("graphs_le2", is_graph, false, 2);
  if (name == "forests")
    return graphs("forests", [](const FiniteStructure& s) { return is_graph(s) && is_acyclic_graph(s); }, false,
                  std::nullopt);
  if (name == "graphs_with_edge")
    return graphs("graphs_with_edge", [](const FiniteStructure& s) { return is_graph(s) && !s.tuples(0).empty(); },
                  true, std::nullopt);
  if (name == "cliques_or_edgeless")
    return graphs(
        "cliques_or_edgeless",
        [](const FiniteStructure& s) {
          const std::size_t n = s.size();
          return is_graph(s) && (s.tuples(0).empty() || s.tuples(0).size() == n * (n - 1));
        },
        true, std::nullopt);
  if (name == "linear_orders") return std::make_shared<LinearOrders>();
  if (name == "boolean_algebras") return std::make_shared<BooleanAlgebras>();
  if (name == "groups_small") return std::make_shared<SmallGroups>();
  return nullptr;
}

}  // namespace

std::vector<std::string> class_names() {
  return {"boolean_algebras", "cliques_or_edgeless", "forests",  "graphs",   "graphs_le2",
          "graphs_with_edge", "groups_small",        "linear_orders", "sets", "sets_le3"};
}

ClassPtr make_class(const std::string& name) {
  static std::mutex mutex;
  static std::map<std::string, ClassPtr> registry;
  std::lock_guard lock(mutex);
  auto it = registry.find(name);
  if (it != registry.end()) return it->second;
  ClassPtr cls = build_class(name);
  if (!cls) throw Error("unknown class '" + name + "'");
  registry.emplace(name, cls);
  return cls;
}

ClassPtr class_from_json(const Json& j) {
  if (!j.is_object()) throw Error("class file must hold a JSON object");
  const std::string name = j.value("name", std::string("user_class"));
  Signature sig = signature_from_json(j.at("signature"));
  if (!sig.is_relational()) throw Error("class files support relational signatures only");
  std::vector<StructurePtr> forbidden;
  if (j.contains("forbidden"))
    for (const auto& fj : j.at("forbidden")) {
      Json copy = fj;
      if (!copy.contains("signature")) copy["signature"] = j.at("signature");
      auto f = share(structure_from_json(copy));
      if (!(f->signature() == sig)) throw Error("forbidden structure has a different signature");
      forbidden.push_back(f);
    }
  std::optional<std::size_t> cap;
  if (j.contains("max_size")) cap = j.at("max_size").get<std::size_t>();
  std::vector<int> sym;
  if (j.contains("symmetric"))
    for (const auto& r : j.at("symmetric")) {
      auto idx = sig.relation_index(r.get<std::string>());
      if (!idx || sig.relations()[static_cast<std::size_t>(*idx)].arity.size() != 2)
        throw Error("symmetric flag needs a binary relation");
      sym.push_back(*idx);
    }
  auto contains = [forbidden, sym](const FiniteStructure& s) {
    for (int r : sym)
      for (const auto& t : s.tuples(r))
        if (!s.holds(r, std::vector<int>{t[1], t[0]})) return false;
    for (const auto& f : forbidden)
      if (embeds(*f, s)) return false;
    return true;
  };
  return std::make_shared<RelationalClass>(name, sig, contains, nullptr, sym, cap);
}

ClassPtr load_class_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open class file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error("malformed class file '" + path + "': " + e.what());
  }
  try {
    return class_from_json(j);
  } catch (const Json::exception& e) {
    throw Error("malformed class file '" + path + "': " + e.what());
  }
}

}  // namespace topgal
