#include "topgal/structures.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace topgal {

// ---------------------------------------------------------------- Signature

Signature Signature::single_sorted(std::vector<std::pair<std::string, int>> relations) {
  Signature sig;
  sig.add_sort("element");
  for (auto& [name, arity] : relations) sig.add_relation(name, std::vector<int>(static_cast<std::size_t>(arity), 0));
  return sig;
}

void Signature::check_fresh(const std::string& name) const {
  if (name.empty()) throw Error("empty symbol name");
  if (relation_index(name) || function_index(name) || constant_index(name))
    throw Error("duplicate symbol name '" + name + "'");
}

void Signature::check_sort(int s) const {
  if (s < 0 || static_cast<std::size_t>(s) >= sorts_.size()) throw Error("undeclared sort index " + std::to_string(s));
}

int Signature::add_sort(const std::string& name) {
  if (sort_index(name)) throw Error("duplicate sort '" + name + "'");
  sorts_.push_back(name);
  return static_cast<int>(sorts_.size()) - 1;
}

void Signature::add_relation(const std::string& name, std::vector<int> arity) {
  check_fresh(name);
  for (int s : arity) check_sort(s);
  relations_.push_back({name, std::move(arity)});
}

void Signature::add_function(const std::string& name, std::vector<int> inputs, int output) {
  check_fresh(name);
  for (int s : inputs) check_sort(s);
  check_sort(output);
  functions_.push_back({name, std::move(inputs), output});
}

void Signature::add_constant(const std::string& name, int sort) {
  check_fresh(name);
  check_sort(sort);
  constants_.push_back({name, sort});
}

namespace {
template <class T>
std::optional<int> find_named(const std::vector<T>& v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}
}  // namespace

std::optional<int> Signature::sort_index(const std::string& name) const {
  auto it = std::find(sorts_.begin(), sorts_.end(), name);
  if (it == sorts_.end()) return std::nullopt;
  return static_cast<int>(it - sorts_.begin());
}
std::optional<int> Signature::relation_index(const std::string& name) const { return find_named(relations_, name); }
std::optional<int> Signature::function_index(const std::string& name) const { return find_named(functions_, name); }
std::optional<int> Signature::constant_index(const std::string& name) const { return find_named(constants_, name); }

std::string Signature::fingerprint() const {
  std::ostringstream os;
  os << "S";
  for (auto& s : sorts_) os << ":" << s;
  for (auto& r : relations_) {
    os << ";R:" << r.name;
    for (int s : r.arity) os << "," << s;
  }
  for (auto& f : functions_) {
    os << ";F:" << f.name;
    for (int s : f.inputs) os << "," << s;
    os << ">" << f.output;
  }
  for (auto& c : constants_) os << ";C:" << c.name << "," << c.sort;
  return os.str();
}

std::string CanonicalLabel::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (char c : signature) mix(static_cast<unsigned char>(c));
  for (int v : code) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------- FiniteStructure

FiniteStructure::FiniteStructure(Signature signature, std::vector<int> element_sorts)
    : signature_(std::move(signature)), sorts_(std::move(element_sorts)) {
  for (int s : sorts_)
    if (s < 0 || static_cast<std::size_t>(s) >= signature_.sorts().size()) throw Error("element of undeclared sort");
  relations_.resize(signature_.relations().size());
  const std::size_t n = sorts_.size();
  for (auto& f : signature_.functions()) {
    std::size_t cells = 1;
    for (std::size_t i = 0; i < f.inputs.size(); ++i) {
      if (n != 0 && cells > (std::size_t{1} << 26) / n) throw ResourceLimit("function table too large");
      cells *= n;
    }
    functions_.emplace_back(n == 0 && !f.inputs.empty() ? 0 : cells, -1);
  }
  constants_.assign(signature_.constants().size(), -1);
}

FiniteStructure::FiniteStructure(Signature signature, std::size_t size)
    : FiniteStructure(std::move(signature), std::vector<int>(size, 0)) {}

std::size_t FiniteStructure::count_of_sort(int s) const {
  return static_cast<std::size_t>(std::count(sorts_.begin(), sorts_.end(), s));
}

void FiniteStructure::add_tuple(int relation, Tuple t) {
  const auto& sym = signature_.relations().at(static_cast<std::size_t>(relation));
  if (t.size() != sym.arity.size()) throw Error("arity mismatch for relation " + sym.name);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || static_cast<std::size_t>(t[i]) >= size() || sort_of(t[i]) != sym.arity[i])
      throw Error("ill-sorted tuple for relation " + sym.name);
  }
  relations_[static_cast<std::size_t>(relation)].insert(std::move(t));
  invalidate();
}

bool FiniteStructure::holds(int relation, std::span<const int> t) const {
  const auto& set = relations_[static_cast<std::size_t>(relation)];
  if (set.empty()) return false;
  return set.find(Tuple(t.begin(), t.end())) != set.end();
}

std::size_t FiniteStructure::table_index(int function, std::span<const int> args) const {
  std::size_t idx = 0;
  const std::size_t n = size();
  for (int a : args) idx = idx * n + static_cast<std::size_t>(a);
  (void)function;
  return idx;
}

void FiniteStructure::set_value(int function, std::span<const int> args, int value) {
  const auto& sym = signature_.functions().at(static_cast<std::size_t>(function));
  if (args.size() != sym.inputs.size()) throw Error("arity mismatch for function " + sym.name);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i] < 0 || static_cast<std::size_t>(args[i]) >= size() || sort_of(args[i]) != sym.inputs[i])
      throw Error("ill-sorted arguments for function " + sym.name);
  if (value < 0 || static_cast<std::size_t>(value) >= size() || sort_of(value) != sym.output)
    throw Error("ill-sorted value for function " + sym.name);
  functions_[static_cast<std::size_t>(function)][table_index(function, args)] = value;
  invalidate();
}

int FiniteStructure::apply(int function, std::span<const int> args) const {
  const auto& table = functions_[static_cast<std::size_t>(function)];
  for (int a : args)
    if (a < 0 || static_cast<std::size_t>(a) >= size()) return -1;
  const std::size_t idx = table_index(function, args);
  return idx < table.size() ? table[idx] : -1;
}

void FiniteStructure::set_constant(int constant, int e) {
  const auto& sym = signature_.constants().at(static_cast<std::size_t>(constant));
  if (e < 0 || static_cast<std::size_t>(e) >= size() || sort_of(e) != sym.sort)
    throw Error("ill-sorted value for constant " + sym.name);
  constants_[static_cast<std::size_t>(constant)] = e;
  invalidate();
}

void FiniteStructure::set_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != size()) throw Error("name list size mismatch");
  names_ = std::move(names);
}

std::string FiniteStructure::name_of(int e) const {
  if (names_.empty()) return std::to_string(e);
  return names_[static_cast<std::size_t>(e)];
}

std::vector<Tuple> FiniteStructure::argument_tuples(int f) const {
  const auto& inputs = signature_.functions()[static_cast<std::size_t>(f)].inputs;
  std::vector<std::vector<int>> choices;
  for (int s : inputs) {
    std::vector<int> c;
    for (std::size_t e = 0; e < size(); ++e)
      if (sorts_[e] == s) c.push_back(static_cast<int>(e));
    choices.push_back(std::move(c));
  }
  std::vector<Tuple> out;
  Tuple cur(inputs.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == inputs.size()) {
      out.push_back(cur);
      return;
    }
    for (int e : choices[i]) {
      cur[i] = e;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

void FiniteStructure::validate() const {
  for (std::size_t f = 0; f < functions_.size(); ++f) {
    const auto& sym = signature_.functions()[f];
    for (const auto& args : argument_tuples(static_cast<int>(f))) {
      int v = apply(static_cast<int>(f), args);
      if (v < 0) throw Error("function table of " + sym.name + " is not total");
      if (sort_of(v) != sym.output) throw Error("function " + sym.name + " has an ill-sorted value");
    }
  }
  for (std::size_t c = 0; c < constants_.size(); ++c)
    if (constants_[c] < 0) throw Error("constant " + signature_.constants()[c].name + " is unset");
}

const CanonicalLabel& FiniteStructure::label() const {
  std::lock_guard lock(cache_->mutex);
  if (!cache_->value) cache_->value = canonical_form(*this);
  return *cache_->value;
}

bool FiniteStructure::operator==(const FiniteStructure& o) const {
  return signature_ == o.signature_ && sorts_ == o.sorts_ && relations_ == o.relations_ &&
         functions_ == o.functions_ && constants_ == o.constants_;
}

// ---------------------------------------------------------------- Embedding

std::vector<int> Embedding::image() const {
  std::vector<int> img = map;
  std::sort(img.begin(), img.end());
  return img;
}

namespace {

// Calls fn on every tuple over `pool` of the given arity.
template <class Fn>
void for_each_tuple(std::size_t arity, const std::vector<int>& pool, Fn&& fn) {
  Tuple t(arity);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == arity) {
      fn(t);
      return;
    }
    for (int e : pool) {
      t[i] = e;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace

bool is_embedding(const FiniteStructure& a, const FiniteStructure& b, std::span<const int> map) {
  if (!(a.signature() == b.signature())) return false;
  if (map.size() != a.size()) return false;
  std::vector<char> used(b.size(), 0);
  for (std::size_t e = 0; e < a.size(); ++e) {
    int y = map[e];
    if (y < 0 || static_cast<std::size_t>(y) >= b.size()) return false;
    if (a.sort_of(static_cast<int>(e)) != b.sort_of(y)) return false;
    if (used[static_cast<std::size_t>(y)]) return false;
    used[static_cast<std::size_t>(y)] = 1;
  }
  std::vector<int> all(a.size());
  std::iota(all.begin(), all.end(), 0);
  const auto& sig = a.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    bool ok = true;
    for_each_tuple(sig.relations()[r].arity.size(), all, [&](const Tuple& t) {
      if (!ok) return;
      Tuple m(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) m[i] = map[static_cast<std::size_t>(t[i])];
      if (a.holds(static_cast<int>(r), t) != b.holds(static_cast<int>(r), m)) ok = false;
    });
    if (!ok) return false;
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    for (const auto& args : a.argument_tuples(static_cast<int>(f))) {
      Tuple m(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) m[i] = map[static_cast<std::size_t>(args[i])];
      int va = a.apply(static_cast<int>(f), args);
      if (va < 0 || b.apply(static_cast<int>(f), m) != map[static_cast<std::size_t>(va)]) return false;
    }
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c)
    if (map[static_cast<std::size_t>(a.constant(static_cast<int>(c)))] != b.constant(static_cast<int>(c))) return false;
  return true;
}

Embedding identity_embedding(const StructurePtr& s) {
  std::vector<int> map(s->size());
  std::iota(map.begin(), map.end(), 0);
  return {s, s, std::move(map)};
}

Embedding compose(const Embedding& f, const Embedding& g) {
  if (f.target != g.source && !(*f.target == *g.source)) throw Error("compose: codomain of f differs from domain of g");
  std::vector<int> map(f.map.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = g(f(static_cast<int>(i)));
  return {f.source, g.target, std::move(map)};
}

// ---------------------------------------------------------------- embedding search

namespace {

class EmbeddingSearch {
 public:
  EmbeddingSearch(const FiniteStructure& a, const FiniteStructure& b, const EmbeddingVisitor& visit)
      : a_(a), b_(b), visit_(visit), map_(a.size(), -1), used_(b.size(), 0) {
    const auto& sig = a.signature();
    touching_.resize(a.size());
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      for (auto& args : a.argument_tuples(static_cast<int>(f))) {
        Entry en{static_cast<int>(f), args, a.apply(static_cast<int>(f), args)};
        const std::size_t id = entries_.size();
        entries_.push_back(std::move(en));
        for (int x : entries_.back().args) touching_[static_cast<std::size_t>(x)].push_back(id);
        touching_[static_cast<std::size_t>(entries_.back().out)].push_back(id);
      }
    }
    for (auto& v : touching_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }

  void run(std::span<const int> partial) {
    if (!(a_.signature() == b_.signature())) throw SignatureMismatch("embedding search across different signatures");
    for (std::size_t s = 0; s < a_.signature().sorts().size(); ++s)
      if (a_.count_of_sort(static_cast<int>(s)) > b_.count_of_sort(static_cast<int>(s))) return;
    std::vector<int> trail;
    for (std::size_t c = 0; c < a_.signature().constants().size(); ++c)
      if (!assign(a_.constant(static_cast<int>(c)), b_.constant(static_cast<int>(c)), trail)) return;
    for (std::size_t x = 0; x < partial.size() && x < a_.size(); ++x)
      if (partial[x] >= 0 && !assign(static_cast<int>(x), partial[x], trail)) return;
    search();
  }

 private:
  struct Entry {
    int f;
    Tuple args;
    int out;
  };

  bool assign(int x, int y, std::vector<int>& trail) {
    std::vector<std::pair<int, int>> queue{{x, y}};
    while (!queue.empty()) {
      auto [u, v] = queue.back();
      queue.pop_back();
      int cur = map_[static_cast<std::size_t>(u)];
      if (cur >= 0) {
        if (cur != v) return false;
        continue;
      }
      if (v < 0 || static_cast<std::size_t>(v) >= b_.size() || used_[static_cast<std::size_t>(v)] ||
          a_.sort_of(u) != b_.sort_of(v))
        return false;
      map_[static_cast<std::size_t>(u)] = v;
      used_[static_cast<std::size_t>(v)] = 1;
      trail.push_back(u);
      assigned_.push_back(u);
      if (!relations_ok(u)) return false;
      for (std::size_t id : touching_[static_cast<std::size_t>(u)]) {
        const Entry& en = entries_[id];
        Tuple img(en.args.size());
        bool ready = true;
        for (std::size_t i = 0; i < en.args.size(); ++i) {
          img[i] = map_[static_cast<std::size_t>(en.args[i])];
          if (img[i] < 0) ready = false;
        }
        if (!ready) continue;
        queue.emplace_back(en.out, b_.apply(en.f, img));
      }
    }
    return true;
  }

  void undo(std::vector<int>& trail) {
    for (int u : trail) {
      used_[static_cast<std::size_t>(map_[static_cast<std::size_t>(u)])] = 0;
      map_[static_cast<std::size_t>(u)] = -1;
    }
    assigned_.resize(assigned_.size() - trail.size());
    trail.clear();
  }

  // Every relation tuple over assigned elements that mentions x must agree.
  bool relations_ok(int x) {
    const auto& rels = a_.signature().relations();
    for (std::size_t r = 0; r < rels.size(); ++r) {
      const std::size_t arity = rels[r].arity.size();
      Tuple t(arity), m(arity);
      bool ok = true;
      std::function<void(std::size_t, bool)> rec = [&](std::size_t i, bool has_x) {
        if (!ok) return;
        if (i == arity) {
          if (!has_x) return;
          if (a_.holds(static_cast<int>(r), t) != b_.holds(static_cast<int>(r), m)) ok = false;
          return;
        }
        for (int e : assigned_) {
          t[i] = e;
          m[i] = map_[static_cast<std::size_t>(e)];
          rec(i + 1, has_x || e == x);
        }
      };
      rec(0, false);
      if (!ok) return false;
    }
    return true;
  }

  bool search() {
    int x = -1;
    for (std::size_t i = 0; i < map_.size(); ++i)
      if (map_[i] < 0) {
        x = static_cast<int>(i);
        break;
      }
    if (x < 0) return visit_(map_);
    for (std::size_t y = 0; y < b_.size(); ++y) {
      if (used_[y] || b_.sort_of(static_cast<int>(y)) != a_.sort_of(x)) continue;
      std::vector<int> trail;
      bool cont = true;
      if (assign(x, static_cast<int>(y), trail)) cont = search();
      undo(trail);
      if (!cont) return false;
    }
    return true;
  }

  const FiniteStructure& a_;
  const FiniteStructure& b_;
  const EmbeddingVisitor& visit_;
  std::vector<int> map_;
  std::vector<char> used_;
  std::vector<int> assigned_;
  std::vector<Entry> entries_;
  std::vector<std::vector<std::size_t>> touching_;
};

}  // namespace

void visit_embeddings(const FiniteStructure& a, const FiniteStructure& b, const EmbeddingVisitor& visit,
                      std::span<const int> partial) {
  EmbeddingSearch search(a, b, visit);
  search.run(partial);
}

std::vector<Embedding> enumerate_embeddings(const StructurePtr& a, const StructurePtr& b) {
  std::vector<std::vector<int>> maps;
  visit_embeddings(*a, *b, [&](const std::vector<int>& m) {
    maps.push_back(m);
    return true;
  });
  std::sort(maps.begin(), maps.end());
  std::vector<Embedding> out;
  out.reserve(maps.size());
  for (auto& m : maps) out.push_back({a, b, std::move(m)});
  return out;
}

std::size_t count_embeddings(const FiniteStructure& a, const FiniteStructure& b) {
  std::size_t n = 0;
  visit_embeddings(a, b, [&](const std::vector<int>&) {
    ++n;
    return true;
  });
  return n;
}

bool embeds(const FiniteStructure& a, const FiniteStructure& b) {
  bool found = false;
  visit_embeddings(a, b, [&](const std::vector<int>&) {
    found = true;
    return false;
  });
  return found;
}

// ---------------------------------------------------------------- substructures

std::vector<int> Closure::sorted() const {
  std::vector<int> s = elements;
  std::sort(s.begin(), s.end());
  return s;
}

Closure close_under_functions(const FiniteStructure& b, std::span<const int> seed) {
  Closure cl;
  std::vector<int> pos(b.size(), -1);
  auto add = [&](int e) {
    if (pos[static_cast<std::size_t>(e)] >= 0) return false;
    pos[static_cast<std::size_t>(e)] = static_cast<int>(cl.elements.size());
    cl.elements.push_back(e);
    return true;
  };
  for (int e : seed) {
    if (e < 0 || static_cast<std::size_t>(e) >= b.size()) throw Error("seed element outside the carrier");
    add(e);
  }
  const auto& sig = b.signature();
  for (std::size_t c = 0; c < sig.constants().size(); ++c)
    if (add(b.constant(static_cast<int>(c)))) cl.steps.push_back({-1 - static_cast<int>(c), {}});
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      const auto& inputs = sig.functions()[f].inputs;
      const std::size_t arity = inputs.size();
      // snapshot: positions available at the start of this pass
      const std::size_t avail = cl.elements.size();
      std::vector<int> p(arity, 0);
      Tuple args(arity);
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == arity) {
          int v = b.apply(static_cast<int>(f), args);
          if (v < 0) throw Error("partial function table during closure");
          if (add(v)) {
            cl.steps.push_back({static_cast<int>(f), p});
            grew = true;
          }
          return;
        }
        for (std::size_t q = 0; q < avail; ++q) {
          int e = cl.elements[q];
          if (b.sort_of(e) != inputs[i]) continue;
          p[i] = static_cast<int>(q);
          args[i] = e;
          rec(i + 1);
        }
      };
      rec(0);
    }
  }
  return cl;
}

FiniteStructure induced(const FiniteStructure& b, std::span<const int> elements) {
  std::vector<int> pos(b.size(), -1);
  std::vector<int> sorts;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    pos[static_cast<std::size_t>(elements[i])] = static_cast<int>(i);
    sorts.push_back(b.sort_of(elements[i]));
  }
  FiniteStructure s(b.signature(), std::move(sorts));
  const auto& sig = b.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    for (const auto& t : b.tuples(static_cast<int>(r))) {
      Tuple m(t.size());
      bool inside = true;
      for (std::size_t i = 0; i < t.size() && inside; ++i) {
        m[i] = pos[static_cast<std::size_t>(t[i])];
        inside = m[i] >= 0;
      }
      if (inside) s.add_tuple(static_cast<int>(r), std::move(m));
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    for (const auto& args : s.argument_tuples(static_cast<int>(f))) {
      Tuple orig(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) orig[i] = elements[static_cast<std::size_t>(args[i])];
      int v = b.apply(static_cast<int>(f), orig);
      int pv = v < 0 ? -1 : pos[static_cast<std::size_t>(v)];
      if (pv < 0) throw Error("induced: element set is not closed under " + sig.functions()[f].name);
      s.set_value(static_cast<int>(f), args, pv);
    }
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    int pv = pos[static_cast<std::size_t>(b.constant(static_cast<int>(c)))];
    if (pv < 0) throw Error("induced: element set misses a constant");
    s.set_constant(static_cast<int>(c), pv);
  }
  if (b.has_names()) {
    std::vector<std::string> names;
    for (int e : elements) names.push_back(b.name_of(e));
    s.set_names(std::move(names));
  }
  return s;
}

Substructure generated_substructure(const StructurePtr& b, std::span<const int> seed) {
  std::vector<int> elems = close_under_functions(*b, seed).sorted();
  auto sub = share(induced(*b, elems));
  return {sub, Embedding{sub, b, elems}};
}

FiniteStructure relabel(const FiniteStructure& s, std::span<const int> perm) {
  const std::size_t n = s.size();
  std::vector<int> sorts(n);
  for (std::size_t e = 0; e < n; ++e) sorts[static_cast<std::size_t>(perm[e])] = s.sort_of(static_cast<int>(e));
  FiniteStructure out(s.signature(), std::move(sorts));
  const auto& sig = s.signature();
  for (std::size_t r = 0; r < sig.relations().size(); ++r)
    for (const auto& t : s.tuples(static_cast<int>(r))) {
      Tuple m(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) m[i] = perm[static_cast<std::size_t>(t[i])];
      out.add_tuple(static_cast<int>(r), std::move(m));
    }
  for (std::size_t f = 0; f < sig.functions().size(); ++f)
    for (const auto& args : s.argument_tuples(static_cast<int>(f))) {
      Tuple m(args.size());
      for (std::size_t i = 0; i < args.size(); ++i) m[i] = perm[static_cast<std::size_t>(args[i])];
      out.set_value(static_cast<int>(f), m, perm[static_cast<std::size_t>(s.apply(static_cast<int>(f), args))]);
    }
  for (std::size_t c = 0; c < sig.constants().size(); ++c)
    out.set_constant(static_cast<int>(c), perm[static_cast<std::size_t>(s.constant(static_cast<int>(c)))]);
  if (s.has_names()) {
    std::vector<std::string> names(n);
    for (std::size_t e = 0; e < n; ++e) names[static_cast<std::size_t>(perm[e])] = s.name_of(static_cast<int>(e));
    out.set_names(std::move(names));
  }
  return out;
}

bool extends_to_isomorphism(const FiniteStructure& a, std::span<const int> dom, const FiniteStructure& b,
                            std::span<const int> img) {
  if (dom.size() != img.size() || !(a.signature() == b.signature())) return false;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (a.sort_of(dom[i]) != b.sort_of(img[i])) return false;
    for (std::size_t j = 0; j < i; ++j)
      if ((dom[i] == dom[j]) != (img[i] == img[j])) return false;
  }
  Closure ca = close_under_functions(a, dom);
  // image of each closure position
  std::vector<int> mapped;
  std::vector<int> seen(b.size(), -1);
  const std::size_t nseed = ca.elements.size() - ca.steps.size();
  for (std::size_t q = 0; q < nseed; ++q) {
    int e = ca.elements[q];
    auto it = std::find(dom.begin(), dom.end(), e);
    mapped.push_back(img[static_cast<std::size_t>(it - dom.begin())]);
  }
  for (const auto& [f, argpos] : ca.steps) {
    int v;
    if (f < 0) {
      v = b.constant(-1 - f);
    } else {
      Tuple args(argpos.size());
      for (std::size_t i = 0; i < argpos.size(); ++i) args[i] = mapped[static_cast<std::size_t>(argpos[i])];
      v = b.apply(f, args);
    }
    if (v < 0) return false;
    mapped.push_back(v);
  }
  for (std::size_t q = 0; q < mapped.size(); ++q) {
    int& s = seen[static_cast<std::size_t>(mapped[q])];
    if (s >= 0) return false;
    s = static_cast<int>(q);
    if (a.sort_of(ca.elements[q]) != b.sort_of(mapped[q])) return false;
  }
  // homomorphism on all tuples over the closure, relations preserved and reflected
  std::vector<int> positions(mapped.size());
  std::iota(positions.begin(), positions.end(), 0);
  const auto& sig = a.signature();
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    bool ok = true;
    for_each_tuple(sig.functions()[f].inputs.size(), positions, [&](const Tuple& p) {
      if (!ok) return;
      Tuple ta(p.size()), tb(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        ta[i] = ca.elements[static_cast<std::size_t>(p[i])];
        tb[i] = mapped[static_cast<std::size_t>(p[i])];
        if (a.sort_of(ta[i]) != sig.functions()[f].inputs[i]) return;
      }
      int va = a.apply(static_cast<int>(f), ta);
      int vb = b.apply(static_cast<int>(f), tb);
      auto it = std::find(ca.elements.begin(), ca.elements.end(), va);
      if (it == ca.elements.end() || mapped[static_cast<std::size_t>(it - ca.elements.begin())] != vb) ok = false;
    });
    if (!ok) return false;
  }
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    bool ok = true;
    for_each_tuple(sig.relations()[r].arity.size(), positions, [&](const Tuple& p) {
      if (!ok) return;
      Tuple ta(p.size()), tb(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        ta[i] = ca.elements[static_cast<std::size_t>(p[i])];
        tb[i] = mapped[static_cast<std::size_t>(p[i])];
      }
      if (a.holds(static_cast<int>(r), ta) != b.holds(static_cast<int>(r), tb)) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

bool brute_force_isomorphic(const FiniteStructure& a, const FiniteStructure& b) {
  if (!(a.signature() == b.signature()) || a.size() != b.size()) return false;
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (is_embedding(a, b, perm)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace topgal
