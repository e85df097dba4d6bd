#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "metanets/network.hpp"

namespace metanets {

// Line-oriented scenario format: [kind name] sections with key = value
// entries, mirroring the NetworkSpec fields one-to-one. Unknown keys are hard
// errors. Grammar in docs/scenario_format.md.

/// Syntactic form of a scenario file: ordered sections of ordered entries.
struct Document {
  struct Section {
    std::string kind;
    std::string name;  // empty for sim/output
    std::vector<std::pair<std::string, std::string>> entries;
    int line = 0;
  };
  std::vector<Section> sections;
};

struct ParseResult {
  NetworkSpec spec;
  std::vector<std::string> warnings;
};

/// Splits text into sections/entries. Throws ScenarioError on syntax errors.
Document parse_document(const std::string& text);

/// Semantic pass: builds the spec, rejecting unknown sections/keys and
/// malformed values. Warnings cover accepted-but-ignored parameters.
ParseResult build_spec(const Document& doc);

ParseResult parse_scenario(const std::string& text);
ParseResult load_scenario_file(const std::string& path);

/// Canonical serialization; parse(serialize(spec)) reproduces the spec
/// exactly (doubles are emitted with round-trip precision).
std::string serialize(const NetworkSpec& spec);

/// `head.key=value` override applied to a parsed document before the semantic
/// pass. `head` is an entity id, or a section kind when unique (e.g.
/// `station.dwell_steps=3750`), or `sim`/`output`.
void apply_override(Document& doc, const std::string& dotted_key, const std::string& value);

/// Names of the bundled scenarios ("paper-fig3", "paper-fig4", ...).
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
std::string builtin_text(const std::string& name);

/// The bundled service-station study network (shared by paper-fig3 and
/// paper-fig4, which differ only in their default output series).
NetworkSpec build_study_scenario();

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace metanets
