#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpbot/logic/parser.hpp"
#include "lpbot/logic/term.hpp"

namespace lpbot::rules {

using logic::PredicateKey;

enum class PackageLevel { game, map_type, map };
const char* to_string(PackageLevel level);

class PackageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents of `<name>.json` next to the package's rule files.
struct PackageManifest {
  std::string name;
  PackageLevel level = PackageLevel::game;
  std::vector<std::string> files;
  std::vector<PredicateKey> entry;
  std::vector<PredicateKey> dynamic;
  std::vector<std::string> requires_packages;
  std::filesystem::path dir;
};

struct RulePackage {
  PackageManifest manifest;
  std::vector<logic::Clause> clauses;
};

/// Parses `name/arity`.
PredicateKey parse_indicator(const std::string& text);

PackageManifest load_manifest(const std::filesystem::path& manifest_path);
/// Reads and parses every rule file; syntax errors become PackageError
/// carrying file, line and column.
RulePackage load_package(const std::filesystem::path& manifest_path);
/// Loads `<dir>/<name>.json` for each name, in order.
std::vector<RulePackage> load_stack(const std::filesystem::path& dir, const std::vector<std::string>& names);

/// data/packages of the source tree.
std::filesystem::path default_package_dir();

/// Host predicates known to the validator.
struct HostCatalog {
  std::set<PredicateKey> predicates;
  /// Argument positions that hold goals, for host predicates taking them.
  std::map<PredicateKey, std::vector<std::size_t>> goal_args;
};

enum class IssueKind { undefined, arity_mismatch, undeclared_dynamic, missing_entry, missing_requirement, order };
const char* to_string(IssueKind kind);

struct ValidationIssue {
  IssueKind kind = IssueKind::undefined;
  std::string package;
  PredicateKey predicate;
  /// Predicate of the clause containing the reference.
  std::string context;
  std::string detail;

  std::string str() const;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string str() const;
};

/// Checks a package stack in load order.  A package may only use
/// predicates defined by itself, earlier packages or the host.
ValidationReport validate_stack(const std::vector<RulePackage>& stack, const HostCatalog& host);

}  // namespace lpbot::rules
