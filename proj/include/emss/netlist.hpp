#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace emss {

struct ResistorCard {
  std::string name;
  std::string node_a;
  std::string node_b;
  double ohms = 0.0;
  int line = 0;
};

// For current sources, `value` amps of conventional current flow from node_a
// through the source into node_b. For voltage sources node_a is the positive
// terminal.
struct SourceCard {
  std::string name;
  std::string node_a;
  std::string node_b;
  double value = 0.0;
  int line = 0;
};

class Netlist {
 public:
  std::vector<ResistorCard> resistors;
  std::vector<SourceCard> current_sources;
  std::vector<SourceCard> voltage_sources;

  // Dense node indexing over every label seen, ground included.
  int add_node(const std::string& name);
  int node_index(const std::string& name) const;  // -1 when absent
  const std::vector<std::string>& node_names() const { return node_names_; }
  int node_count() const { return static_cast<int>(node_names_.size()); }

  size_t element_count() const {
    return resistors.size() + current_sources.size() + voltage_sources.size();
  }

 private:
  std::vector<std::string> node_names_;
  std::unordered_map<std::string, int> node_index_;
};

inline constexpr const char* kGroundName = "0";

// SPICE subset: R/I/V element cards, `*` comments, `.op`/`.end` and other
// dot cards ignored, SI suffixes (k, m, u, n, p, meg) honored.
// Inline comments start at `$` or `;`.
Netlist parse_spice(std::istream& in);
Netlist parse_spice_file(const std::string& path);

// Round-trips through parse_spice for the supported dialect.
std::string serialize_spice(const Netlist& netlist);

// SPICE numeric literal with optional SI suffix; throws ParseError.
double parse_spice_value(const std::string& token, int line, int column);

// Zero-resistance elements merge their endpoint nodes; the reduced netlist
// drops them and rewrites every card onto canonical node names.
struct ShortCollapse {
  Netlist reduced;
  std::unordered_map<std::string, std::string> canonical;  // only merged names
  int merged_elements = 0;

  const std::string& resolve(const std::string& name) const {
    auto it = canonical.find(name);
    return it == canonical.end() ? name : it->second;
  }
};

ShortCollapse collapse_shorts(const Netlist& netlist);

}  // namespace emss
