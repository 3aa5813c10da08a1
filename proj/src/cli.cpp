#include "topgal/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "topgal/galois.hpp"
#include "topgal/imaginaries.hpp"

namespace topgal::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

ClassPtr resolve_class(const RunConfig& cfg) {
  if (!cfg.class_file.empty()) return load_class_file(cfg.class_file);
  if (cfg.class_name.empty()) throw UsageError("no class given (name or --class-file)");
  try {
    return make_class(cfg.class_name);
  } catch (const ResourceLimit&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

FiniteCategory resolve_context(const std::string& name) {
  try {
    return discrete_context(name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Json read_json_file(const std::string& path) {
  if (path.empty()) throw UsageError("no input file given");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
}

Json check_to_json(const CheckResult& r, std::size_t k) {
  return {{"k", k}, {"holds", r.holds}, {"cases", r.cases}, {"witness", r.witness}};
}

}  // namespace

// ---------------------------------------------------------------- commands

CommandResult cmd_check_class(const RunConfig& cfg) {
  auto cls = resolve_class(cfg);
  const std::size_t n = cfg.size.value_or(4);
  Json axioms = Json::array();
  bool any_no = false, any_unknown = false;
  for (const auto& r : {check_hp(*cls, n), check_jep(*cls, n), check_ap(*cls, n)}) {
    any_no = any_no || r.holds == Tri::no;
    any_unknown = any_unknown || r.holds == Tri::unknown;
    axioms.push_back(axiom_to_json(r));
  }
  CommandResult res;
  res.report = {{"command", "check-class"}, {"class", cls->name()}, {"size", n}, {"axioms", axioms},
                {"holds", !any_no && !any_unknown}};
  if (any_no)
    res.code = kFailure;
  else if (any_unknown) {
    res.code = kResource;
    res.warning = "some axiom is inconclusive within the amalgam search bound";
  }
  return res;
}

CommandResult cmd_build_limit(const RunConfig& cfg) {
  auto cls = resolve_class(cfg);
  const std::size_t rounds = cfg.rounds.value_or(3), bound = cfg.bound.value_or(0);
  CommandResult res;
  try {
    auto chain = build_chain(cls, rounds, bound);
    const std::size_t uk = bound > 0 ? bound : rounds, hk = cfg.k.value_or(2);
    auto uni = is_universal_upto(chain, uk);
    auto homog = is_ultrahomogeneous_upto(chain, hk);
    res.report = {{"command", "build-limit"},
                  {"class", cls->name()},
                  {"rounds", rounds},
                  {"bound", bound},
                  {"chain", chain_to_json(chain)},
                  {"certificates", {{"universal", check_to_json(uni, uk)}, {"ultrahomogeneous", check_to_json(homog, hk)}}}};
    if (!uni.holds || !homog.holds) res.code = kFailure;
  } catch (const AmalgamFailure& e) {
    res.code = kFailure;
    res.report = {{"command", "build-limit"}, {"class", cls->name()}, {"rounds", rounds}, {"error", e.what()},
                  {"span", e.span()}};
  }
  return res;
}

CommandResult cmd_verify(const RunConfig& cfg, const std::string& suite) {
  CommandResult res;
  if (suite == "galois") {
    auto cls = resolve_class(cfg);
    GaloisOptions opt;
    opt.size_bound = cfg.size.value_or(3);
    opt.rounds = cfg.rounds.value_or(3);
    opt.max_arrows = cfg.max_arrows.value_or(8);
    opt.jobs = cfg.jobs;
    res.report = verify_galois_property(cls, opt);
    if (!res.report["violations"].empty()) res.code = kFailure;
    if (!res.report["inconclusive"].empty()) res.warning = "inconclusive cases listed in the report";
  } else if (suite == "coherence") {
    if (!cfg.context.empty()) {
      res.report = coherence_check_discrete(resolve_context(cfg.context));
      if (!res.report["equal"].get<bool>()) res.code = kFailure;
    } else {
      res.report = coherence_check(resolve_class(cfg), cfg.k.value_or(3), cfg.rounds.value_or(4), cfg.jobs);
      if (!res.report["stable"].get<bool>() || !res.report["orbits_equal_types"].get<bool>()) res.code = kFailure;
    }
  } else if (suite == "imaginaries") {
    CategoryPtr cat;
    std::size_t size = cfg.size.value_or(2);
    Json scope;
    if (!cfg.context.empty()) {
      cat = std::make_shared<const FiniteCategory>(resolve_context(cfg.context));
      scope = {{"context", cfg.context}};
    } else {
      auto cls = resolve_class(cfg);
      const std::size_t codomain = cfg.codomain.value_or(size + 2);
      cat = std::make_shared<const FiniteCategory>(class_slice(cls, codomain, false));
      scope = {{"class", cls->name()}, {"codomain", codomain}};
    }
    auto a = atomic_complete_check(cat, size);
    res.report = {{"theorem", "atomic-completeness"}, {"scope", scope},         {"size", size},
                  {"bounded", true},                  {"atomically_complete", a.holds}, {"relations", a.relations},
                  {"witness", a.witness},             {"bases", a.bases}};
  } else if (suite == "atoms") {
    auto cat = std::make_shared<const FiniteCategory>(resolve_context(cfg.context.empty() ? "v4" : cfg.context));
    auto red = discrete_reduction(*cat);
    if (!red.object) throw UsageError("context has no discrete reduction: " + red.reason);
    const std::size_t top = *red.object;
    auto im = image_of_F_subgroups(*cat);
    Json subs = Json::array();
    bool all = true;
    for (const auto& u : all_subgroups(im.group)) {
      auto r = subgroup_realization(cat, u);
      const bool reproduced = r && realized_subgroup(im.group, r->relation, top, r->xi).elements == u.elements;
      all = all && reproduced;
      Json entry{{"subgroup", subgroup_to_json(u)}, {"order", u.order()}, {"realized", r.has_value()},
                 {"reproduced", reproduced}};
      if (r) {
        entry["base"] = structure_to_json(*cat->objects[r->base]);
        entry["xi"] = cat->hom(r->base, top)[r->xi].map;
        entry["relation"] = relation_to_json(r->relation);
        entry["diagonal"] = r->relation.is_diagonal();
      }
      subs.push_back(entry);
    }
    res.report = {{"theorem", "atoms"}, {"context", cat->name}, {"image_of_F", image_to_json(im)},
                  {"subgroups", subs},  {"all_realized", all}};
    if (!all) res.code = kFailure;
  } else if (suite == "discrete") {
    FiniteCategory cat = cfg.context.empty() && (!cfg.class_name.empty() || !cfg.class_file.empty())
                             ? class_slice(resolve_class(cfg), cfg.size.value_or(3), false)
                             : resolve_context(cfg.context.empty() ? "v4" : cfg.context);
    auto red = discrete_reduction(cat);
    res.report = {{"theorem", "discrete-galois"}, {"context", cat.name}};
    if (!red.object) {
      res.report["reduction"] = nullptr;
      res.report["reason"] = red.reason;
    } else {
      res.report["reduction"] = structure_to_json(*cat.objects[*red.object]);
      res.report["image_of_F"] = image_to_json(image_of_F_subgroups(cat));
      res.report["galois_objects"] = galois_objects_discrete(cat);
      res.report["coherence"] = coherence_check_discrete(cat);
    }
  } else if (suite == "z15") {
    auto r = z15_counterexample_verify();
    res.report = z15_to_json(r);
    res.report["message"] = r.counterexample() ? "counterexample confirmed" : "counterexample not confirmed";
    if (!r.counterexample()) res.code = kFailure;
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  return res;
}

CommandResult cmd_aut(const RunConfig& cfg) {
  auto s = share(structure_from_json(read_json_file(cfg.input)));
  auto g = automorphisms(s);
  Json gens = Json::array();
  for (const auto& p : g->generators()) gens.push_back(cycles_to_string(p));
  CommandResult res;
  res.report = {{"command", "aut"}, {"size", s->size()}, {"order", g->order()}, {"generators", gens}};
  return res;
}

CommandResult cmd_orbits(const RunConfig& cfg) {
  auto s = share(structure_from_json(read_json_file(cfg.input)));
  auto g = automorphisms(s);
  const std::size_t k = cfg.k.value_or(1);
  Json list = Json::array();
  for (const auto& o : orbits(g, k)) list.push_back({{"representative", o.representative}, {"size", o.members.size()}});
  CommandResult res;
  res.report = {{"command", "orbits"}, {"k", k}, {"group_order", g->order()}, {"count", list.size()}, {"orbits", list}};
  return res;
}

CommandResult cmd_cosets(const RunConfig& cfg) {
  auto j = read_json_file(cfg.input);
  std::size_t degree = 0;
  std::vector<Permutation> gens, ugens, vgens;
  try {
    degree = j.at("degree").get<std::size_t>();
    for (const auto& c : j.at("generators")) gens.push_back(permutation_from_cycles(degree, c.get<std::string>()));
    for (const auto& c : j.at("u")) ugens.push_back(permutation_from_cycles(degree, c.get<std::string>()));
    for (const auto& c : j.value("v", j.at("u"))) vgens.push_back(permutation_from_cycles(degree, c.get<std::string>()));
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed group file: ") + e.what());
  }
  auto g = make_permutation_group(degree, gens);
  auto u = generated_subgroup(g, ugens), v = generated_subgroup(g, vgens);
  Json arrows = Json::array();
  for (const auto& a : hom_cosets(u, v)) arrows.push_back(arrow_to_json(a));
  CommandResult res;
  res.report = {{"command", "cosets"},
                {"group_order", g->order()},
                {"u", subgroup_to_json(u)},
                {"v", subgroup_to_json(v)},
                {"hom_cosets", arrows},
                {"double_cosets_u", double_cosets(u).count()},
                {"double_cosets_v", double_cosets(v).count()},
                {"complete", is_complete_discrete(g).holds}};
  return res;
}

// ---------------------------------------------------------------- rendering

namespace {

void render(const Json& j, const std::string& indent, std::ostringstream& os) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    const bool flat = !v.is_structured() ||
                      (v.is_array() && std::none_of(v.begin(), v.end(), [](const Json& x) { return x.is_structured(); }));
    if (flat) {
      os << indent << it.key() << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    } else if (v.is_object()) {
      os << indent << it.key() << ":\n";
      render(v, indent + "  ", os);
    } else {
      os << indent << it.key() << ": " << v.size() << " entries\n";
      for (const auto& item : v) os << indent << "  - " << item.dump() << "\n";
    }
  }
}

}  // namespace

std::string render_text(const Json& report) {
  std::ostringstream os;
  if (report.is_object())
    render(report, "", os);
  else
    os << report.dump() << "\n";
  return os.str();
}

// ---------------------------------------------------------------- entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topological Galois theory workbench", "topgal"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file (key = value, [command] sections)");
  RunConfig cfg;
  std::string suite, positional_class;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--class", cfg.class_name, "class name");
    sub->add_option("--class-file", cfg.class_file, "JSON class file");
    sub->add_option("--context", cfg.context, "named discrete context");
    sub->add_option("--size", cfg.size, "member size bound");
    sub->add_option("--rounds", cfg.rounds, "stage rounds");
    sub->add_option("--bound", cfg.bound, "extension bound per round");
    sub->add_option("--k", cfg.k, "tuple arity / certificate bound");
    sub->add_option("--codomain", cfg.codomain, "codomain size bound");
    sub->add_option("--max-arrows", cfg.max_arrows, "arrows kept per source");
    sub->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* check = app.add_subcommand("check-class", "HP, JEP and AP up to --size");
  check->add_option("name", positional_class, "class name");
  common(check);
  auto* build = app.add_subcommand("build-limit", "stage chain with bounded certificates");
  build->add_option("name", positional_class, "class name");
  common(build);
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "galois | atoms | coherence | imaginaries | discrete | z15")
      ->required()
      ->check(CLI::IsMember({"galois", "atoms", "coherence", "imaginaries", "discrete", "z15"}));
  common(verify);
  auto* aut = app.add_subcommand("aut", "automorphism group of a structure file");
  aut->add_option("input", cfg.input, "structure JSON")->required();
  common(aut);
  auto* orb = app.add_subcommand("orbits", "orbits of the automorphism group on k-tuples");
  orb->add_option("input", cfg.input, "structure JSON")->required();
  common(orb);
  auto* cos = app.add_subcommand("cosets", "coset arrows and double cosets of a permutation group file");
  cos->add_option("input", cfg.input, "group JSON {degree, generators, u, v}")->required();
  common(cos);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (!positional_class.empty()) {
    if (!cfg.class_name.empty() && cfg.class_name != positional_class) {
      err << "error: class given twice\n";
      return kUsage;
    }
    cfg.class_name = positional_class;
  }

  CommandResult res;
  try {
    if (*check)
      res = cmd_check_class(cfg);
    else if (*build)
      res = cmd_build_limit(cfg);
    else if (*verify)
      res = cmd_verify(cfg, suite);
    else if (*aut)
      res = cmd_aut(cfg);
    else if (*orb)
      res = cmd_orbits(cfg);
    else
      res = cmd_cosets(cfg);
  } catch (const ResourceLimit& e) {
    err << "resource bound: " << e.what() << "\n";
    return kResource;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (cfg.format == "text")
    out << render_text(res.report);
  else
    out << res.report.dump(2) << "\n";
  if (!res.warning.empty()) err << "warning: " << res.warning << "\n";
  return res.code;
}

}  // namespace topgal::cli
