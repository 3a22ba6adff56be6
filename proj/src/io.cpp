#include "msgw/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace msgw {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_tuple(const std::string& text, const std::string& what) {
  // "(i,j,...)"
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')')
    throw error(what + ": malformed tuple '" + text + "'");
  std::vector<int> out;
  std::stringstream ss(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(trim(item)));
    } catch (...) {
      throw error(what + ": bad element '" + item + "'");
    }
  }
  if (out.empty()) throw error(what + ": empty tuple");
  return out;
}

}  // namespace

StructurePtr read_structure(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "msgw-structure v1")
    throw error(what + ": expected header 'msgw-structure v1'");

  std::string name;
  int size = -1;
  struct RelLines {
    int arity;
    std::vector<std::vector<int>> tuples;
  };
  std::map<std::string, RelLines> rels;
  std::vector<std::pair<std::string, int>> consts;

  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto colon = t.find(':');
    if (colon == std::string::npos) throw error(what + ": expected 'key: value' in '" + t + "'");
    std::string key = trim(t.substr(0, colon));
    std::string val = trim(t.substr(colon + 1));
    if (key == "name") {
      name = val;
    } else if (key == "size") {
      size = std::stoi(val);
    } else if (key.rfind("relation ", 0) == 0) {
      std::string decl = trim(key.substr(9));
      auto slash = decl.find('/');
      if (slash == std::string::npos) throw error(what + ": relation needs name/arity");
      std::string rname = trim(decl.substr(0, slash));
      int arity = std::stoi(decl.substr(slash + 1));
      auto& rl = rels[rname];
      rl.arity = arity;
      std::stringstream ss(val);
      std::string tup;
      while (std::getline(ss, tup, ')')) {
        tup = trim(tup);
        if (tup.empty()) continue;
        rl.tuples.push_back(parse_tuple(tup + ")", what));
      }
    } else if (key.rfind("constant ", 0) == 0) {
      consts.emplace_back(trim(key.substr(9)), std::stoi(val));
    } else {
      throw error(what + ": unknown key '" + key + "'");
    }
  }
  if (size < 1) throw error(what + ": missing or bad size");

  std::vector<RelationDecl> rdecls;
  for (const auto& [rname, rl] : rels) rdecls.push_back({rname, rl.arity});
  std::vector<std::string> cnames;
  for (const auto& [cname, v] : consts) {
    (void)v;
    cnames.push_back(cname);
  }
  auto schema = std::make_shared<Schema>(rdecls, cnames);
  auto s = std::make_shared<Structure>(schema, size, name);
  for (const auto& [rname, rl] : rels)
    for (const auto& tup : rl.tuples) s->add_tuple(rname, tup);
  for (const auto& [cname, v] : consts) s->set_constant(cname, v);
  s->finalize();
  return s;
}

StructurePtr read_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open structure file '" + path + "'");
  return read_structure(in, path);
}

std::string write_structure(const Structure& s) {
  std::ostringstream os;
  os << "msgw-structure v1\n";
  if (!s.name().empty()) os << "name: " << s.name() << "\n";
  os << "size: " << s.size() << "\n";
  const auto& schema = *s.schema();
  for (std::size_t ri = 0; ri < schema.relations().size(); ++ri) {
    os << "relation " << schema.relations()[ri].name << "/" << schema.relations()[ri].arity
       << ":";
    for (const auto& tup : s.tuples(static_cast<int>(ri))) {
      os << " (";
      for (std::size_t i = 0; i < tup.size(); ++i) os << (i ? "," : "") << tup[i];
      os << ")";
    }
    os << "\n";
  }
  for (std::size_t ci = 0; ci < schema.constants().size(); ++ci)
    os << "constant " << schema.constants()[ci] << ": " << s.constant_value(static_cast<int>(ci))
       << "\n";
  return os.str();
}

Weighted parse_structure_spec(const std::string& spec) {
  Weighted w;
  std::string body = spec;
  auto star = spec.rfind('*');
  if (star != std::string::npos && star + 1 < spec.size()) {
    bool digits = true;
    for (std::size_t i = star + 1; i < spec.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(spec[i]))) digits = false;
    if (digits) {
      w.count = std::stoi(spec.substr(star + 1));
      body = spec.substr(0, star);
    }
  }
  if (body.rfind("LO:", 0) == 0) {
    w.structure = gen_linear_order(std::stoi(body.substr(3)));
    return w;
  }
  if (body.rfind("RT:", 0) == 0) {
    std::string list = trim(body.substr(3));
    if (list.size() < 2 || list.front() != '[' || list.back() != ']')
      throw error("RT spec needs a bracketed parent list, e.g. RT:[-,0,0,1,2]");
    std::vector<int> parents;
    std::stringstream ss(list.substr(1, list.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      parents.push_back(item == "-" ? -1 : std::stoi(item));
    }
    auto t = gen_rooted_tree(parents);
    auto named = std::make_shared<Structure>(*t);
    named->set_name("RT" + list);
    w.structure = named;
    return w;
  }
  w.structure = read_structure_file(body);
  return w;
}

std::string structure_digest(const Structure& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s.canonical_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  os << "msgw-report v1\n";
  os << "command: " << r.command << "\n";
  for (const auto& line : r.input_lines) os << "input: " << line << "\n";
  os << "winner: " << r.winner << "\n";
  os << "certificate: " << r.certificate << "\n";
  if (r.measure_value >= 0) os << "measure: " << r.measure_value << "\n";
  os << "nodes: " << r.nodes << "\n";
  os << "wall_ms: " << static_cast<long long>(r.wall_ms) << "\n";
  os << "engine: msgw " << r.engine_version << "\n";
  return os.str();
}

}  // namespace msgw
