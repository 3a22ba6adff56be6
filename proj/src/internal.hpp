// Shared internals of the game engines: compact pebbled structures keyed by
// a registry id, in deterministic input order.
#ifndef MSGW_SRC_INTERNAL_HPP
#define MSGW_SRC_INTERNAL_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "msgw/core.hpp"

namespace msgw::detail {

struct IPS {
  int sid = 0;
  Assignment a;

  bool operator<(const IPS& o) const {
    if (sid != o.sid) return sid < o.sid;
    return a < o.a;
  }
  bool operator==(const IPS& o) const { return sid == o.sid && a == o.a; }
};

using ISide = std::vector<IPS>;

struct Registry {
  std::vector<StructurePtr> structures;

  int add(const StructurePtr& s) {
    for (std::size_t i = 0; i < structures.size(); ++i)
      if (structures[i] == s) return static_cast<int>(i);
    if (!structures.empty() && !(*structures.front()->schema() == *s->schema()))
      throw error("all structures in a game must share one schema");
    structures.push_back(s);
    return static_cast<int>(structures.size()) - 1;
  }
  const Structure& at(int sid) const { return *structures[static_cast<std::size_t>(sid)]; }
  const StructurePtr& ptr(int sid) const { return structures[static_cast<std::size_t>(sid)]; }
};

inline void sort_dedup(ISide& side) {
  std::sort(side.begin(), side.end());
  side.erase(std::unique(side.begin(), side.end()), side.end());
}

inline void append_key(std::string& key, const ISide& side) {
  for (const auto& ps : side) {
    key += static_cast<char>('A' + ps.sid);
    for (auto v : ps.a.raw()) key += static_cast<char>(v + 2);
    key += ';';
  }
}

struct MsBase {
  Registry reg;
  std::uint64_t cap = 0;
  std::uint64_t nodes = 0;

  void charge(std::uint64_t n = 1) {
    nodes += n;
    if (nodes > cap) throw budget_error("search budget exceeded (node cap)");
  }

  bool match(const IPS& p, const IPS& q) const {
    return matching_pair_raw(reg.at(p.sid), p.a, reg.at(q.sid), q.a);
  }

  bool has_match(const ISide& L, const ISide& R) const {
    for (const auto& l : L)
      for (const auto& r : R)
        if (match(l, r)) return true;
    return false;
  }

  ISide expand(const ISide& side, int color) const {
    ISide out;
    for (const auto& ps : side) {
      int n = reg.at(ps.sid).size();
      for (int e = 0; e < n; ++e) {
        IPS q = ps;
        q.a.set(color, e);
        out.push_back(q);
      }
    }
    sort_dedup(out);
    return out;
  }

  bool occupied(const IPS& ps, int element) const {
    for (int c = 1; c <= kMaxColors; ++c)
      if (ps.a.get(c) == element) return true;
    for (int v : reg.at(ps.sid).constant_values())
      if (v == element) return true;
    return false;
  }

  std::vector<int> candidates(const IPS& ps, bool forbid_on_top) const {
    std::vector<int> out;
    int n = reg.at(ps.sid).size();
    for (int e = 0; e < n; ++e)
      if (!forbid_on_top || !occupied(ps, e)) out.push_back(e);
    return out;
  }
};

}  // namespace msgw::detail

#endif
