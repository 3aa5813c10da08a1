#include <algorithm>
#include <map>
#include <numeric>

#include "topgal/fraisse.hpp"

namespace topgal {

namespace {

std::string key_digest(const std::vector<int>& key) { return CanonicalLabel{"", key}.digest(); }

Json elements_json(const std::vector<int>& elems) { return Json(elems); }

// First embedding a -> b (a is generated by constants, so this is the only one).
Embedding bottom_into(const StructurePtr& bottom, const StructurePtr& target) {
  auto list = enumerate_embeddings(bottom, target);
  if (list.empty()) throw Error("bottom substructure does not embed");
  return list.front();
}

}  // namespace

Json axiom_to_json(const AxiomResult& r) {
  Json j{{"axiom", r.axiom}, {"holds", to_string(r.holds)}, {"cases", r.cases}};
  j["witness"] = r.witness;
  return j;
}

AxiomResult check_hp(const FraisseClass& cls, std::size_t n) {
  if (n < 1) throw Error("check_hp: n must be at least 1");
  AxiomResult res{"HP", Tri::yes, 0, nullptr};
  for (const auto& m : cls.members_upto(n)) {
    auto subs = cls.small_substructures(*m, cls.measure(*m));
    std::stable_sort(subs.begin(), subs.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (const auto& elems : subs) {
      if (elems.size() == m->size()) continue;
      ++res.cases;
      FiniteStructure sub = induced(*m, elems);
      if (!cls.contains(sub)) {
        res.holds = Tri::no;
        res.witness = {{"member", structure_to_json(*m)},
                       {"substructure", structure_to_json(sub)},
                       {"elements", elements_json(elems)}};
        return res;
      }
    }
  }
  return res;
}

AxiomResult check_jep(const FraisseClass& cls, std::size_t n) {
  if (n < 1) throw Error("check_jep: n must be at least 1");
  AxiomResult res{"JEP", Tri::yes, 0, nullptr};
  const auto list = cls.members_upto(n);
  Json inconclusive = Json::array();
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i; j < list.size(); ++j) {
      ++res.cases;
      auto bottom = cls.bottom_of(list[i]);
      Embedding f = bottom.inclusion;
      Embedding g = bottom_into(bottom.structure, list[j]);
      bool found = false;
      SearchStatus st = cls.visit_amalgams(f, g, [&](const Amalgam& am) {
        found = cls.measure(*am.d) <= 2 * n;
        return !found;
      });
      if (found) continue;
      Json pair{{"first", structure_to_json(*list[i])}, {"second", structure_to_json(*list[j])}};
      if (st == SearchStatus::exhausted && cls.exact_amalgams()) {
        res.holds = Tri::no;
        res.witness = pair;
        return res;
      }
      res.holds = Tri::unknown;
      inconclusive.push_back(pair);
    }
  if (res.holds == Tri::unknown) res.witness = {{"inconclusive", inconclusive}};
  return res;
}

AxiomResult check_ap(const FraisseClass& cls, std::size_t n) {
  if (n < 1) throw Error("check_ap: n must be at least 1");
  AxiomResult res{"AP", Tri::yes, 0, nullptr};
  const auto list = cls.members_upto(n);
  Json inconclusive = Json::array();
  for (const auto& a : list)
    for (const auto& b1 : list) {
      if (cls.measure(*b1) < cls.measure(*a)) continue;
      auto fs = enumerate_embeddings(a, b1);
      if (fs.empty()) continue;
      for (const auto& b2 : list) {
        if (cls.measure(*b2) < cls.measure(*a)) continue;
        auto gs = enumerate_embeddings(a, b2);
        for (const auto& f : fs)
          for (const auto& g : gs) {
            ++res.cases;
            bool found = false;
            SearchStatus st = cls.visit_amalgams(f, g, [&](const Amalgam&) {
              found = true;
              return false;
            });
            if (found) continue;
            if (st == SearchStatus::exhausted && cls.exact_amalgams()) {
              res.holds = Tri::no;
              res.witness = span_to_json(f, g);
              return res;
            }
            res.holds = Tri::unknown;
            inconclusive.push_back(span_to_json(f, g));
          }
      }
    }
  if (res.holds == Tri::unknown) res.witness = {{"inconclusive", inconclusive}};
  return res;
}

// ---------------------------------------------------------------- stages

LimitStage initial_stage(const FraisseClass& cls) {
  for (std::size_t m = 0; m <= 8; ++m) {
    const auto& level = cls.members(m);
    if (level.empty()) continue;
    LimitStage st;
    st.index = 0;
    st.structure = cls.bottom_of(level.front()).structure;
    return st;
  }
  throw Error("class " + cls.name() + " has no small members");
}

LimitStage extend_stage(const FraisseClass& cls, const LimitStage& stage, std::size_t bound) {
  const StructurePtr base = stage.structure;
  StructurePtr cur = base;
  Json log = Json::array();

  struct Item {
    CanonicalLabel label;
    std::vector<int> elems;
    StructurePtr sub;
  };
  std::vector<Item> items;
  for (auto& elems : cls.small_substructures(*base, bound)) {
    auto sub = share(induced(*base, elems));
    items.push_back({sub->label(), elems, sub});
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return std::tie(a.label, a.elems) < std::tie(b.label, b.elems); });

  for (const auto& item : items) {
    for (const auto& ext : cls.one_point_extensions(item.sub)) {
      std::vector<int> partial(ext.structure->size(), -1);
      for (std::size_t i = 0; i < item.elems.size(); ++i) partial[i] = item.elems[i];
      bool realized = false;
      visit_embeddings(
          *ext.structure, *cur,
          [&](const std::vector<int>&) {
            realized = true;
            return false;
          },
          partial);
      Json entry{{"substructure", item.elems}, {"substructure_label", item.label.digest()}, {"extension", key_digest(ext.key)}};
      if (realized) {
        entry["realized"] = "present";
        log.push_back(entry);
        continue;
      }
      std::vector<int> prefix(item.sub->size());
      std::iota(prefix.begin(), prefix.end(), 0);
      Embedding to_cur{item.sub, cur, item.elems};
      Embedding to_ext{item.sub, ext.structure, prefix};
      auto am = preferred_amalgam(cls, to_cur, to_ext);
      if (!am) throw AmalgamFailure("extend_stage: no amalgam for an extension problem", span_to_json(to_cur, to_ext));
      entry["realized"] = "added";
      entry["new_elements"] = am->d->size() - cur->size();
      log.push_back(entry);
      cur = am->d;
    }
  }
  LimitStage next;
  next.index = stage.index + 1;
  next.structure = cur;
  std::vector<int> incl(base->size());
  std::iota(incl.begin(), incl.end(), 0);
  next.inclusion = Embedding{base, cur, incl};
  next.extension_log = log;
  return next;
}

StageChain build_chain(const ClassPtr& cls, std::size_t rounds, std::size_t bound) {
  StageChain chain{cls, {initial_stage(*cls)}};
  for (std::size_t r = 1; r <= rounds; ++r)
    chain.stages.push_back(extend_stage(*cls, chain.stages.back(), bound ? bound : r));
  return chain;
}

StageChain single_stage_chain(const ClassPtr& cls, StructurePtr s) {
  LimitStage st;
  st.structure = std::move(s);
  return StageChain{cls, {st}};
}

CheckResult is_universal_upto(const StageChain& chain, std::size_t k) {
  CheckResult res;
  const auto& cls = *chain.cls;
  for (std::size_t m = 0; m <= k; ++m)
    for (const auto& member : cls.members(m)) {
      ++res.cases;
      if (!embeds(*member, *chain.last().structure)) {
        res.holds = false;
        res.witness = {{"member", structure_to_json(*member)}};
        return res;
      }
    }
  if (cls.max_measure() && k > *cls.max_measure())
    res.witness = {{"note", "no members above measure " + std::to_string(*cls.max_measure())}};
  return res;
}

bool extends_one_point(const StructurePtr& src, const std::vector<int>& dom, const FiniteStructure& dst,
                       const std::vector<int>& img, int x) {
  std::vector<int> seed = dom;
  seed.push_back(x);
  auto gen = generated_substructure(src, seed);
  std::vector<int> partial(gen.structure->size(), -1);
  for (std::size_t j = 0; j < gen.inclusion.map.size(); ++j) {
    auto at = std::find(dom.begin(), dom.end(), gen.inclusion.map[j]);
    if (at != dom.end()) partial[j] = img[static_cast<std::size_t>(at - dom.begin())];
  }
  bool found = false;
  visit_embeddings(
      *gen.structure, dst,
      [&](const std::vector<int>&) {
        found = true;
        return false;
      },
      partial);
  return found;
}

CheckResult is_ultrahomogeneous_upto(const StageChain& chain, std::size_t k) {
  CheckResult res;
  const auto& cls = *chain.cls;
  const std::size_t last = chain.stages.size() == 1 ? 1 : chain.stages.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const StructurePtr& src_ptr = chain.stages[i].structure;
    const auto& src = *src_ptr;
    const bool single = chain.stages.size() == 1;
    const auto& dst = single ? src : *chain.stages[i + 1].structure;
    std::vector<int> incl(src.size());
    if (single)
      std::iota(incl.begin(), incl.end(), 0);
    else
      incl = chain.stages[i + 1].inclusion->map;

    std::map<CanonicalLabel, std::vector<std::pair<std::vector<int>, StructurePtr>>> by_label;
    for (auto& elems : cls.small_substructures(src, k)) {
      auto sub = share(induced(src, elems));
      by_label[sub->label()].emplace_back(elems, sub);
    }
    for (const auto& [label, group] : by_label)
      for (const auto& [e1, s1] : group)
        for (const auto& [e2, s2] : group)
          for (const auto& p : enumerate_embeddings(s1, s2)) {
            std::vector<int> dom = e1, img(e1.size());
            for (std::size_t j = 0; j < e1.size(); ++j)
              img[j] = incl[static_cast<std::size_t>(e2[static_cast<std::size_t>(p.map[j])])];
            ++res.cases;
            for (int x = 0; x < static_cast<int>(src.size()); ++x) {
              if (std::binary_search(e1.begin(), e1.end(), x)) continue;
              const bool found = extends_one_point(src_ptr, dom, dst, img, x);
              if (!found) {
                std::vector<int> target(e1.size());
                for (std::size_t j = 0; j < e1.size(); ++j) target[j] = e2[static_cast<std::size_t>(p.map[j])];
                res.holds = false;
                res.witness = {{"stage", i}, {"domain", e1}, {"image", target}, {"point", x}};
                return res;
              }
            }
          }
  }
  return res;
}

Json chain_to_json(const StageChain& chain) {
  Json stages = Json::array();
  for (const auto& st : chain.stages) {
    Json j{{"index", st.index},
           {"size", st.structure->size()},
           {"measure", chain.cls->measure(*st.structure)},
           {"structure", structure_to_json(*st.structure)},
           {"extension_log", st.extension_log}};
    j["inclusion"] = st.inclusion ? Json(st.inclusion->map) : Json(nullptr);
    stages.push_back(j);
  }
  return {{"class", chain.cls->name()}, {"strategy", chain.cls->strategy()}, {"stages", stages}};
}

}  // namespace topgal
