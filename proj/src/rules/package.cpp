#include "lpbot/rules/package.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "lpbot/logic/errors.hpp"
#include "lpbot/logic/knowledge_base.hpp"

namespace lpbot::rules {

namespace fs = std::filesystem;
using logic::Term;

const char* to_string(PackageLevel level) {
  switch (level) {
    case PackageLevel::game: return "game";
    case PackageLevel::map_type: return "map_type";
    case PackageLevel::map: return "map";
  }
  return "?";
}

const char* to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::undefined: return "undefined";
    case IssueKind::arity_mismatch: return "arity_mismatch";
    case IssueKind::undeclared_dynamic: return "undeclared_dynamic";
    case IssueKind::missing_entry: return "missing_entry";
    case IssueKind::missing_requirement: return "missing_requirement";
    case IssueKind::order: return "order";
  }
  return "?";
}

PredicateKey parse_indicator(const std::string& text) {
  auto slash = text.rfind('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == text.size())
    throw PackageError("bad predicate indicator '" + text + "'");
  std::size_t arity = 0;
  const char* first = text.data() + slash + 1;
  const char* last = text.data() + text.size();
  auto [end, ec] = std::from_chars(first, last, arity);
  if (ec != std::errc() || end != last) throw PackageError("bad predicate indicator '" + text + "'");
  return {text.substr(0, slash), arity};
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PackageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* field, bool required) {
  std::vector<std::string> out;
  if (!j.contains(field)) {
    if (required) throw PackageError(std::string("manifest lacks '") + field + "'");
    return out;
  }
  const auto& v = j.at(field);
  if (!v.is_array()) throw PackageError(std::string("manifest field '") + field + "' must be an array");
  for (const auto& e : v) {
    if (!e.is_string()) throw PackageError(std::string("manifest field '") + field + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

PackageManifest load_manifest(const fs::path& manifest_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw PackageError(manifest_path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw PackageError(manifest_path.string() + ": manifest must be an object");
  PackageManifest m;
  m.dir = manifest_path.parent_path();
  try {
    m.name = j.at("name").get<std::string>();
    std::string level = j.at("level").get<std::string>();
    if (level == "game")
      m.level = PackageLevel::game;
    else if (level == "map_type")
      m.level = PackageLevel::map_type;
    else if (level == "map")
      m.level = PackageLevel::map;
    else
      throw PackageError("unknown level '" + level + "'");
  } catch (const nlohmann::json::exception& e) {
    throw PackageError(manifest_path.string() + ": " + e.what());
  }
  m.files = string_list(j, "files", true);
  for (const auto& s : string_list(j, "entry", false)) m.entry.push_back(parse_indicator(s));
  for (const auto& s : string_list(j, "dynamic", false)) m.dynamic.push_back(parse_indicator(s));
  m.requires_packages = string_list(j, "requires", false);
  return m;
}

RulePackage load_package(const fs::path& manifest_path) {
  RulePackage p;
  p.manifest = load_manifest(manifest_path);
  for (const auto& file : p.manifest.files) {
    fs::path path = p.manifest.dir / file;
    std::string source = read_file(path);
    try {
      auto clauses = logic::parse_program(source);
      p.clauses.insert(p.clauses.end(), clauses.begin(), clauses.end());
    } catch (const logic::SyntaxError& e) {
      throw PackageError(path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                         e.what());
    }
  }
  return p;
}

std::vector<RulePackage> load_stack(const fs::path& dir, const std::vector<std::string>& names) {
  std::vector<RulePackage> out;
  for (const auto& name : names) out.push_back(load_package(dir / (name + ".json")));
  return out;
}

fs::path default_package_dir() { return fs::path(LPBOT_DATA_DIR) / "packages"; }

std::string ValidationIssue::str() const {
  std::string s = std::string(to_string(kind)) + " " + predicate.str() + " in package " + package;
  if (!context.empty()) s += " (clause of " + context + ")";
  if (!detail.empty()) s += ": " + detail;
  return s;
}

std::string ValidationReport::str() const {
  if (issues.empty()) return "ok\n";
  std::string s;
  for (const auto& i : issues) s += i.str() + "\n";
  return s;
}

namespace {

struct Reference {
  PredicateKey key;
  bool asserted = false;  // target of assert/retract
};

class BodyWalker {
 public:
  BodyWalker(const HostCatalog& host, std::vector<Reference>& out) : host_(host), out_(out) {}

  void goal(const Term& g) {
    if (!g.is_callable()) return;
    PredicateKey key{g.name(), g.arity()};
    if (logic::is_control(key)) {
      const std::string& n = key.name;
      if (n == "," || n == ";" || n == "->" || n == "forall") {
        goal(g.arg(0));
        goal(g.arg(1));
      } else if (n == "\\+" || n == "not" || n == "call" || n == "once") {
        goal(g.arg(0));
      } else if (n == "findall") {
        goal(g.arg(1));
      }
      return;
    }
    out_.push_back({key, false});
    if (auto it = host_.goal_args.find(key); it != host_.goal_args.end())
      for (std::size_t pos : it->second)
        if (pos < g.arity()) meta(g.arg(pos));
    if ((key.name == "assert" || key.name == "asserta" || key.name == "assertz" || key.name == "retract") &&
        key.arity == 1)
      modified(g.arg(0), true);
    if (key.name == "retractall" && key.arity == 1) modified(g.arg(0), false);
  }

 private:
  void meta(const Term& t) {
    if (t.is_functor("andThen", 1)) {
      goal(t.arg(0));
    } else if (t.is_functor(".", 2) || t.is_atom("[]")) {
      Term cur = t;
      while (cur.is_functor(".", 2)) {
        meta(cur.arg(0));
        cur = cur.arg(1);
      }
    } else {
      goal(t);
    }
  }

  void modified(const Term& t, bool may_be_rule) {
    Term head = (may_be_rule && t.is_functor(":-", 2)) ? t.arg(0) : t;
    if (head.is_callable()) out_.push_back({{head.name(), head.arity()}, true});
  }

  const HostCatalog& host_;
  std::vector<Reference>& out_;
};

}  // namespace

ValidationReport validate_stack(const std::vector<RulePackage>& stack, const HostCatalog& host) {
  ValidationReport report;
  std::set<PredicateKey> defined = host.predicates;
  std::set<PredicateKey> dynamic;
  std::set<std::string> loaded;
  std::set<std::tuple<int, std::string, PredicateKey, std::string>> seen;
  auto add = [&](IssueKind kind, const std::string& pkg, const PredicateKey& key, const std::string& ctx,
                 std::string detail) {
    if (seen.insert({static_cast<int>(kind), pkg, key, ctx}).second)
      report.issues.push_back({kind, pkg, key, ctx, std::move(detail)});
  };

  PackageLevel previous = PackageLevel::game;
  for (const auto& pkg : stack) {
    const auto& m = pkg.manifest;
    if (m.level < previous)
      add(IssueKind::order, m.name, {m.name, 0}, "",
          std::string(to_string(m.level)) + " package loaded after a " + to_string(previous) + " package");
    previous = std::max(previous, m.level);
    for (const auto& req : m.requires_packages)
      if (!loaded.count(req)) add(IssueKind::missing_requirement, m.name, {req, 0}, "", "required package not loaded before");

    for (const auto& c : pkg.clauses) defined.insert({c.head.name(), c.head.arity()});
    for (const auto& d : m.dynamic) {
      defined.insert(d);
      dynamic.insert(d);
    }

    for (const auto& c : pkg.clauses) {
      std::vector<Reference> refs;
      BodyWalker(host, refs).goal(c.body);
      std::string ctx = PredicateKey{c.head.name(), c.head.arity()}.str();
      for (const auto& r : refs) {
        if (r.asserted) {
          if (!dynamic.count(r.key))
            add(IssueKind::undeclared_dynamic, m.name, r.key, ctx, "modified at run time but not declared dynamic");
          continue;
        }
        if (defined.count(r.key)) continue;
        std::string others;
        for (const auto& d : defined)
          if (d.name == r.key.name) others += (others.empty() ? "" : ", ") + d.str();
        if (!others.empty())
          add(IssueKind::arity_mismatch, m.name, r.key, ctx, "only " + others + " is defined");
        else
          add(IssueKind::undefined, m.name, r.key, ctx, "no clauses, declaration or host predicate");
      }
    }
    for (const auto& e : m.entry)
      if (!defined.count(e)) add(IssueKind::missing_entry, m.name, e, "", "entry predicate is not defined");
    loaded.insert(m.name);
  }
  return report;
}

}  // namespace lpbot::rules
