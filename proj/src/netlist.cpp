#include "emss/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "emss/common.hpp"

namespace emss {

int Netlist::add_node(const std::string& name) {
  auto it = node_index_.find(name);
  if (it != node_index_.end()) return it->second;
  int id = static_cast<int>(node_names_.size());
  node_names_.push_back(name);
  node_index_.emplace(name, id);
  return id;
}

int Netlist::node_index(const std::string& name) const {
  auto it = node_index_.find(name);
  return it == node_index_.end() ? -1 : it->second;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '$' || line[i] == ';') break;  // inline comment
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
           line[i] != '$' && line[i] != ';')
      ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

}  // namespace

double parse_spice_value(const std::string& token, int line, int column) {
  if (token.empty()) throw ParseError("empty value", line, column);
  size_t used = 0;
  double v;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError("malformed value `" + token + "`", line, column);
  }
  std::string suffix = lower(token.substr(used));
  if (suffix.empty()) return v;
  // SPICE ignores trailing unit letters after a recognized suffix; we accept
  // only the bare suffixes the inputs use.
  if (suffix == "meg") return v * 1e6;
  if (suffix == "k") return v * 1e3;
  if (suffix == "m") return v * 1e-3;
  if (suffix == "u") return v * 1e-6;
  if (suffix == "n") return v * 1e-9;
  if (suffix == "p") return v * 1e-12;
  throw ParseError("unknown suffix `" + suffix + "` in value `" + token + "`",
                   line, column);
}

Netlist parse_spice(std::istream& in) {
  Netlist net;
  std::unordered_set<std::string> element_names;
  std::string line;
  int lineno = 0;
  bool ended = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (ended) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;

    std::vector<Token> tok = tokenize(line);
    if (tok.empty()) continue;

    const std::string head = lower(tok[0].text);
    if (head[0] == '.') {
      if (head == ".end") ended = true;
      // .op and any other dot card carry no elements
      continue;
    }

    char kind = head[0];
    if (kind != 'r' && kind != 'i' && kind != 'v')
      throw ParseError("unsupported element card `" + tok[0].text + "`",
                       lineno, tok[0].column);
    if (tok.size() < 4) {
      int col = tok.back().column + static_cast<int>(tok.back().text.size());
      throw ParseError("expected `name nodeA nodeB value`", lineno, col);
    }
    if (tok.size() > 4)
      throw ParseError("unexpected trailing token `" + tok[4].text + "`",
                       lineno, tok[4].column);

    if (!element_names.insert(lower(tok[0].text)).second)
      throw ParseError("duplicate element name `" + tok[0].text + "`", lineno,
                       tok[0].column);
    if (tok[1].text.empty() || tok[2].text.empty())
      throw ParseError("node label must be nonempty", lineno, tok[1].column);

    double value = parse_spice_value(tok[3].text, lineno, tok[3].column);
    net.add_node(tok[1].text);
    net.add_node(tok[2].text);

    if (kind == 'r') {
      if (value < 0.0 || !std::isfinite(value))
        throw ParseError("resistance must be >= 0", lineno, tok[3].column);
      net.resistors.push_back({tok[0].text, tok[1].text, tok[2].text, value,
                               lineno});
    } else if (kind == 'i') {
      net.current_sources.push_back({tok[0].text, tok[1].text, tok[2].text,
                                     value, lineno});
    } else {
      net.voltage_sources.push_back({tok[0].text, tok[1].text, tok[2].text,
                                     value, lineno});
    }
  }
  return net;
}

Netlist parse_spice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open netlist: " + path);
  return parse_spice(in);
}

std::string serialize_spice(const Netlist& netlist) {
  std::ostringstream out;
  char buf[64];
  auto value = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const ResistorCard& r : netlist.resistors)
    out << r.name << ' ' << r.node_a << ' ' << r.node_b << ' ' << value(r.ohms)
        << '\n';
  for (const SourceCard& s : netlist.current_sources)
    out << s.name << ' ' << s.node_a << ' ' << s.node_b << ' '
        << value(s.value) << '\n';
  for (const SourceCard& s : netlist.voltage_sources)
    out << s.name << ' ' << s.node_a << ' ' << s.node_b << ' '
        << value(s.value) << '\n';
  out << ".end\n";
  return out.str();
}

namespace {

// union-find over netlist node indices
struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // keep the smaller index as representative (first-seen name wins)
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

}  // namespace

ShortCollapse collapse_shorts(const Netlist& netlist) {
  ShortCollapse result;
  DisjointSet ds(netlist.node_count());
  int ground = netlist.node_index(kGroundName);

  for (const ResistorCard& r : netlist.resistors) {
    if (r.ohms == 0.0) {
      ds.unite(netlist.node_index(r.node_a), netlist.node_index(r.node_b));
      ++result.merged_elements;
    }
  }

  auto canonical_name = [&](const std::string& name) -> const std::string& {
    int idx = netlist.node_index(name);
    int rep = ds.find(idx);
    // ground absorbs anything merged into it
    if (ground >= 0 && ds.find(ground) == rep) rep = ground;
    return netlist.node_names()[rep];
  };

  for (int i = 0; i < netlist.node_count(); ++i) {
    const std::string& name = netlist.node_names()[i];
    const std::string& canon = canonical_name(name);
    if (canon != name) result.canonical.emplace(name, canon);
  }

  Netlist& out = result.reduced;
  for (const ResistorCard& r : netlist.resistors) {
    if (r.ohms == 0.0) continue;
    ResistorCard c = r;
    c.node_a = canonical_name(r.node_a);
    c.node_b = canonical_name(r.node_b);
    out.add_node(c.node_a);
    out.add_node(c.node_b);
    out.resistors.push_back(std::move(c));
  }
  for (const SourceCard& s : netlist.current_sources) {
    SourceCard c = s;
    c.node_a = canonical_name(s.node_a);
    c.node_b = canonical_name(s.node_b);
    out.add_node(c.node_a);
    out.add_node(c.node_b);
    out.current_sources.push_back(std::move(c));
  }
  for (const SourceCard& s : netlist.voltage_sources) {
    SourceCard c = s;
    c.node_a = canonical_name(s.node_a);
    c.node_b = canonical_name(s.node_b);
    out.add_node(c.node_a);
    out.add_node(c.node_b);
    out.voltage_sources.push_back(std::move(c));
  }
  return result;
}

}  // namespace emss
