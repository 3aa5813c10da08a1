// Canonical forms by individualization-refinement with automorphism pruning.
#include <algorithm>
#include <map>
#include <numeric>

#include "topgal/structures.hpp"

namespace topgal {
namespace {

struct Incidence {
  int kind;   // 0 relation position, 1 function argument, 2 function output
  int sym;
  int pos;
  std::size_t item;  // index into Refiner::items_
};

class Refiner {
 public:
  Refiner(const FiniteStructure& s, std::span<const int> points) : s_(s), n_(s.size()), inc_(s.size()) {
    const auto& sig = s.signature();
    for (std::size_t r = 0; r < sig.relations().size(); ++r)
      for (const auto& t : s.tuples(static_cast<int>(r))) {
        const std::size_t id = items_.size();
        items_.push_back(t);
        for (std::size_t i = 0; i < t.size(); ++i)
          inc_[static_cast<std::size_t>(t[i])].push_back({0, static_cast<int>(r), static_cast<int>(i), id});
      }
    for (std::size_t f = 0; f < sig.functions().size(); ++f)
      for (const auto& args : s.argument_tuples(static_cast<int>(f))) {
        Tuple item = args;
        item.push_back(s.apply(static_cast<int>(f), args));
        const std::size_t id = items_.size();
        items_.push_back(item);
        for (std::size_t i = 0; i < args.size(); ++i)
          inc_[static_cast<std::size_t>(args[i])].push_back({1, static_cast<int>(f), static_cast<int>(i), id});
        inc_[static_cast<std::size_t>(item.back())].push_back({2, static_cast<int>(f), 0, id});
      }
    std::vector<std::vector<int>> keys(n_);
    for (std::size_t e = 0; e < n_; ++e) keys[e].push_back(s.sort_of(static_cast<int>(e)));
    for (std::size_t c = 0; c < sig.constants().size(); ++c) {
      auto& k = keys[static_cast<std::size_t>(s.constant(static_cast<int>(c)))];
      k.push_back(-1);
      k.push_back(static_cast<int>(c));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& k = keys[static_cast<std::size_t>(points[i])];
      k.push_back(-2);
      k.push_back(static_cast<int>(i));
    }
    initial_ = rank(keys);
  }

  const std::vector<int>& initial() const { return initial_; }

  // Equitable refinement: iterate until the number of cells is stable.
  std::vector<int> refine(std::vector<int> color) const {
    std::size_t cells = count_cells(color);
    while (true) {
      std::vector<std::vector<int>> keys(n_);
      for (std::size_t e = 0; e < n_; ++e) {
        std::vector<std::vector<int>> ctx;
        ctx.reserve(inc_[e].size());
        for (const auto& in : inc_[e]) {
          std::vector<int> c{in.kind, in.sym, in.pos};
          for (int x : items_[in.item]) c.push_back(color[static_cast<std::size_t>(x)]);
          ctx.push_back(std::move(c));
        }
        std::sort(ctx.begin(), ctx.end());
        auto& k = keys[e];
        k.push_back(color[e]);
        for (auto& c : ctx) {
          k.push_back(static_cast<int>(c.size()));
          k.insert(k.end(), c.begin(), c.end());
        }
      }
      color = rank(keys);
      std::size_t now = count_cells(color);
      if (now == cells) return color;
      cells = now;
    }
  }

  std::vector<int> individualize(const std::vector<int>& color, int x) const {
    std::vector<std::vector<int>> keys(n_);
    const int c = color[static_cast<std::size_t>(x)];
    for (std::size_t e = 0; e < n_; ++e)
      keys[e] = {2 * color[e] + ((color[e] == c && static_cast<int>(e) != x) ? 1 : 0)};
    return rank(keys);
  }

  std::vector<int> encode(const std::vector<int>& lab, std::span<const int> points) const {
    const auto& sig = s_.signature();
    std::vector<int> inv(n_);
    for (std::size_t e = 0; e < n_; ++e) inv[static_cast<std::size_t>(lab[e])] = static_cast<int>(e);
    std::vector<int> code{static_cast<int>(n_)};
    for (std::size_t i = 0; i < n_; ++i) code.push_back(s_.sort_of(inv[i]));
    for (std::size_t r = 0; r < sig.relations().size(); ++r) {
      std::vector<Tuple> ts;
      for (const auto& t : s_.tuples(static_cast<int>(r))) {
        Tuple m(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) m[i] = lab[static_cast<std::size_t>(t[i])];
        ts.push_back(std::move(m));
      }
      std::sort(ts.begin(), ts.end());
      code.push_back(static_cast<int>(ts.size()));
      for (auto& t : ts) code.insert(code.end(), t.begin(), t.end());
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      const auto& inputs = sig.functions()[f].inputs;
      Tuple args(inputs.size());
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == inputs.size()) {
          Tuple orig(args.size());
          for (std::size_t j = 0; j < args.size(); ++j) orig[j] = inv[static_cast<std::size_t>(args[j])];
          int v = s_.apply(static_cast<int>(f), orig);
          code.push_back(v < 0 ? -1 : lab[static_cast<std::size_t>(v)]);
          return;
        }
        for (std::size_t p = 0; p < n_; ++p) {
          if (s_.sort_of(inv[p]) != inputs[i]) continue;
          args[i] = static_cast<int>(p);
          rec(i + 1);
        }
      };
      rec(0);
    }
    for (std::size_t c = 0; c < sig.constants().size(); ++c) {
      int e = s_.constant(static_cast<int>(c));
      code.push_back(e < 0 ? -1 : lab[static_cast<std::size_t>(e)]);
    }
    code.push_back(static_cast<int>(points.size()));
    for (int p : points) code.push_back(lab[static_cast<std::size_t>(p)]);
    return code;
  }

  std::size_t size() const { return n_; }

 private:
  static std::vector<int> rank(const std::vector<std::vector<int>>& keys) {
    std::vector<const std::vector<int>*> distinct;
    for (auto& k : keys) distinct.push_back(&k);
    std::sort(distinct.begin(), distinct.end(), [](auto* a, auto* b) { return *a < *b; });
    distinct.erase(std::unique(distinct.begin(), distinct.end(), [](auto* a, auto* b) { return *a == *b; }),
                   distinct.end());
    std::vector<int> out(keys.size());
    for (std::size_t e = 0; e < keys.size(); ++e) {
      auto it = std::lower_bound(distinct.begin(), distinct.end(), &keys[e], [](auto* a, auto* b) { return *a < *b; });
      out[e] = static_cast<int>(it - distinct.begin());
    }
    return out;
  }

  static std::size_t count_cells(const std::vector<int>& color) {
    std::vector<int> c = color;
    std::sort(c.begin(), c.end());
    return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
  }

  const FiniteStructure& s_;
  std::size_t n_;
  std::vector<Tuple> items_;
  std::vector<std::vector<Incidence>> inc_;
  std::vector<int> initial_;
};

class Search {
 public:
  Search(const FiniteStructure& s, std::span<const int> points) : ref_(s, points), points_(points) {}

  void run() {
    std::vector<int> path;
    descend(ref_.refine(ref_.initial()), path);
  }

  std::vector<int> best_code;
  std::vector<int> best_lab;

 private:
  void descend(const std::vector<int>& color, std::vector<int>& path) {
    const std::size_t n = ref_.size();
    // first smallest-color cell with more than one element
    std::vector<int> count(n, 0);
    for (int c : color) ++count[static_cast<std::size_t>(c)];
    int target = -1;
    for (std::size_t c = 0; c < n; ++c)
      if (count[c] > 1) {
        target = static_cast<int>(c);
        break;
      }
    if (target < 0) {
      leaf(color);
      return;
    }
    std::vector<int> explored;
    for (std::size_t x = 0; x < n; ++x) {
      if (color[x] != target) continue;
      if (!explored.empty() && equivalent_to_explored(static_cast<int>(x), explored, path)) continue;
      explored.push_back(static_cast<int>(x));
      path.push_back(static_cast<int>(x));
      descend(ref_.refine(ref_.individualize(color, static_cast<int>(x))), path);
      path.pop_back();
    }
  }

  // Orbit test under the found automorphisms that fix the current path pointwise.
  bool equivalent_to_explored(int x, const std::vector<int>& explored, const std::vector<int>& path) const {
    const std::size_t n = ref_.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int u) {
      while (parent[static_cast<std::size_t>(u)] != u) u = parent[static_cast<std::size_t>(u)];
      return u;
    };
    for (const auto& g : autos_) {
      bool fixes = std::all_of(path.begin(), path.end(), [&](int p) { return g[static_cast<std::size_t>(p)] == p; });
      if (!fixes) continue;
      for (std::size_t e = 0; e < n; ++e) parent[static_cast<std::size_t>(find(static_cast<int>(e)))] = find(g[e]);
    }
    const int rx = find(x);
    return std::any_of(explored.begin(), explored.end(), [&](int y) { return find(y) == rx; });
  }

  void leaf(const std::vector<int>& lab) {
    std::vector<int> code = ref_.encode(lab, points_);
    if (best_lab.empty() || code < best_code) {
      best_code = std::move(code);
      best_lab = lab;
      return;
    }
    if (code == best_code) {
      // lab^{-1} ∘ best_lab is an automorphism
      const std::size_t n = lab.size();
      std::vector<int> inv(n), g(n);
      for (std::size_t e = 0; e < n; ++e) inv[static_cast<std::size_t>(lab[e])] = static_cast<int>(e);
      for (std::size_t e = 0; e < n; ++e) g[e] = inv[static_cast<std::size_t>(best_lab[e])];
      autos_.push_back(std::move(g));
    }
  }

  Refiner ref_;
  std::span<const int> points_;
  std::vector<std::vector<int>> autos_;
};

}  // namespace

std::vector<int> canonical_labeling(const FiniteStructure& s, std::span<const int> points) {
  Search search(s, points);
  search.run();
  return search.best_lab;
}

CanonicalLabel canonical_form_pointed(const FiniteStructure& s, std::span<const int> points) {
  Search search(s, points);
  search.run();
  CanonicalLabel label;
  label.signature = s.signature().fingerprint() + "|points:" + std::to_string(points.size());
  label.code = search.best_code;
  return label;
}

CanonicalLabel canonical_form(const FiniteStructure& s) { return canonical_form_pointed(s, {}); }

}  // namespace topgal
