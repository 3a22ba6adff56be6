// msgw: a workbench for model-comparison games on finite relational
// structures. Decides who wins EF, multi-structural and syntactic games,
// synthesizes minimal separating sentences, classifies sentences, and plays
// the games interactively.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "msgw/games.hpp"
#include "msgw/io.hpp"
#include "msgw/synth.hpp"
#include "msgw/types.hpp"

using namespace msgw;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes are the machine contract.
enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kBudget = 2,
  kOracleMismatch = 3,
  kSpoiler = 10,
  kDuplicator = 11,
  kNoSeparator = 12,
};

struct Inputs {
  std::vector<Weighted> left, right;
};

Inputs load_inputs(const std::vector<std::string>& left, const std::vector<std::string>& right) {
  Inputs in;
  for (const auto& s : left) in.left.push_back(parse_structure_spec(s));
  for (const auto& s : right) in.right.push_back(parse_structure_spec(s));
  if (in.left.empty() || in.right.empty()) throw error("--left and --right are both required");
  return in;
}

std::vector<StructurePtr> plain(const std::vector<Weighted>& ws, const char* game) {
  std::vector<StructurePtr> out;
  for (const auto& w : ws) {
    if (w.count != 1)
      throw error(std::string("game '") + game + "' does not take multiplicities");
    out.push_back(w.structure);
  }
  return out;
}

void describe_inputs(const Inputs& in, RunReport& report) {
  for (const auto& w : in.left)
    report.input_lines.push_back("side=left name=" + w.structure->name() +
                                 " count=" + std::to_string(w.count) +
                                 " digest=" + structure_digest(*w.structure));
  for (const auto& w : in.right)
    report.input_lines.push_back("side=right name=" + w.structure->name() +
                                 " count=" + std::to_string(w.count) +
                                 " digest=" + structure_digest(*w.structure));
}

void emit_report(const RunReport& report, const std::string& report_file) {
  std::string text = format_report(report);
  std::cout << text;
  if (!report_file.empty()) {
    std::ofstream out(report_file);
    if (!out) throw error("cannot write report file '" + report_file + "'");
    out << text;
  }
}

OnTopPolicy parse_on_top(const std::string& s) {
  if (s == "any") return OnTopPolicy::Unrestricted;
  if (s == "no-left") return OnTopPolicy::ForbidLeft;
  if (s == "no-right") return OnTopPolicy::ForbidRight;
  if (s == "none") return OnTopPolicy::ForbidBoth;
  throw error("--on-top takes any, no-left, no-right or none");
}

FormulaPtr load_formula(const std::string& literal, const std::string& file) {
  std::string text = literal;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw error("cannot open formula file '" + file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) throw error("no formula given");
  return parse_formula(text, order_schema());
}

// ---------------------------------------------------------------------------
// decide

int cmd_decide(const std::string& game, const Inputs& in, int r, int k,
               const std::string& measure_name, bool exact, OnTopPolicy on_top,
               std::uint64_t node_cap, const std::string& report_file,
               const std::string& command_echo) {
  Budget budget;
  budget.node_cap = node_cap;
  RunReport report;
  report.command = command_echo;
  report.engine_version = kVersion;
  describe_inputs(in, report);

  auto t0 = std::chrono::steady_clock::now();
  Player winner;
  std::uint64_t nodes = 0;
  std::string cert_text;
  int measure_value = -1;

  std::string base = game;
  std::string sg_measure = measure_name;
  if (base.rfind("sg:", 0) == 0) {
    sg_measure = base.substr(3);
    base = "sg";
  }

  if (base == "ms" || base == "ms-no-on-top") {
    auto A = plain(in.left, base.c_str());
    auto B = plain(in.right, base.c_str());
    Decision d = base == "ms" && on_top == OnTopPolicy::Unrestricted
                     ? decide_ms(A, B, r, budget)
                     : decide_ms_no_on_top(A, B, r,
                                           on_top == OnTopPolicy::Unrestricted
                                               ? OnTopPolicy::ForbidBoth
                                               : on_top,
                                           budget);
    winner = d.winner;
    nodes = d.nodes;
  } else if (base == "ms-repebble" || base == "ms-hereditary") {
    if (k < 1) throw error("-k is required for " + base);
    auto A = plain(in.left, base.c_str());
    auto B = plain(in.right, base.c_str());
    Decision d = base == "ms-repebble" ? decide_ms_repebbling(A, B, r, k, budget)
                                       : decide_ms_hereditary(A, B, r, k, budget);
    winner = d.winner;
    nodes = d.nodes;
  } else if (base == "ms-no-dup") {
    Decision d = decide_ms_no_duplication(in.left, in.right, r, budget);
    winner = d.winner;
    nodes = d.nodes;
  } else if (base == "ef" || base == "ef-rk" || base == "pebble") {
    auto A = plain(in.left, base.c_str());
    auto B = plain(in.right, base.c_str());
    if (A.size() != 1 || B.size() != 1)
      throw error("game '" + base + "' takes exactly one structure per side");
    Decision d;
    if (base == "ef")
      d = decide_ef(A[0], B[0], r, budget);
    else if (base == "ef-rk") {
      if (k < 1) throw error("-k is required for ef-rk");
      d = decide_ef_rk(A[0], B[0], r, k, budget);
    } else {
      if (k < 1) throw error("-k is required for pebble");
      d = decide_pebble(A[0], B[0], k, budget);
    }
    winner = d.winner;
    nodes = d.nodes;
  } else if (base == "qvt" || base == "sg") {
    if (k < 1) throw error("-k is required for " + base);
    auto A = plain(in.left, base.c_str());
    auto B = plain(in.right, base.c_str());
    const MeasureSpec& m = base == "qvt" ? measure_qcount() : measure_by_name(sg_measure);
    std::vector<PebbledStructure> pa, pb;
    for (const auto& s : A) pa.emplace_back(s);
    for (const auto& s : B) pb.emplace_back(s);
    SgDecision d = decide_sg(pa, pb, r, k, m, exact ? SgMode::Exact : SgMode::AtMost, true,
                             budget);
    winner = d.winner;
    nodes = d.nodes;
    if (d.certificate) {
      // A certificate only ships after it re-verifies.
      if (!is_separating(d.certificate->formula, pa, pb))
        throw error("internal: certificate failed re-verification");
      cert_text = print_formula(d.certificate->formula);
      measure_value = d.certificate->measure_value;
    }
  } else {
    throw error("unknown game '" + game + "'");
  }

  auto t1 = std::chrono::steady_clock::now();
  report.winner = player_name(winner);
  report.certificate = cert_text;
  report.measure_value = measure_value;
  report.nodes = nodes;
  report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  emit_report(report, report_file);
  return winner == Player::Spoiler ? kSpoiler : kDuplicator;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const Inputs& in, int k, const std::string& measure_name, int r_max,
              std::uint64_t node_cap, const std::string& report_file,
              const std::string& command_echo) {
  Budget budget;
  budget.node_cap = node_cap;
  RunReport report;
  report.command = command_echo;
  report.engine_version = kVersion;
  describe_inputs(in, report);
  auto A = plain(in.left, "synth");
  auto B = plain(in.right, "synth");
  const MeasureSpec& m = measure_by_name(measure_name);

  auto t0 = std::chrono::steady_clock::now();
  auto result = min_measure(A, B, k, m, r_max, budget);
  auto t1 = std::chrono::steady_clock::now();
  report.nodes = result ? result->nodes : 0;
  report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (!result) {
    report.winner = "none";
    report.certificate = "";
    emit_report(report, report_file);
    std::cout << "no separating sentence with " << m.name << " <= " << r_max << "\n";
    return kNoSeparator;
  }
  std::vector<PebbledStructure> pa, pb;
  for (const auto& s : A) pa.emplace_back(s);
  for (const auto& s : B) pb.emplace_back(s);
  if (!is_separating(result->certificate.formula, pa, pb))
    throw error("internal: synthesized sentence failed re-verification");
  report.winner = "Spoiler";
  report.certificate = print_formula(result->certificate.formula);
  report.measure_value = result->value;
  emit_report(report, report_file);
  return kSpoiler;
}

// ---------------------------------------------------------------------------
// classify

int cmd_classify(const std::string& literal, const std::string& file, bool all_types) {
  FormulaPtr f = load_formula(literal, file);
  if (!is_prenex(f)) throw error("classify needs a prenex sentence");
  auto pos = classify_sentence(f, !all_types);
  auto neg = classify_negation(f, !all_types);
  std::cout << "sentence: " << print_formula(f) << "\n";
  std::cout << "psi: "
            << (pos.verdict == Replication::NonReplicating ? "NonReplicating" : "Replicating")
            << "\n";
  std::cout << "not-psi: "
            << (neg.verdict == Replication::NonReplicating ? "NonReplicating" : "Replicating")
            << "\n";
  auto sch = order_schema();
  for (const auto& [result, label] :
       {std::make_pair(&pos, "psi"), std::make_pair(&neg, "not-psi")}) {
    for (const auto& tv : result->types)
      if (!tv.non_replicating)
        std::cout << "offending type (" << label << "): " << tv.offending << " in "
                  << type_text(sch, tv.type.r, tv.type) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// play

std::string render_side(const std::vector<PebbledStructure>& side, const std::string& tag) {
  std::ostringstream os;
  for (std::size_t i = 0; i < side.size(); ++i) {
    const auto& ps = side[i];
    os << "  " << tag << i << " " << ps.structure->name() << ":";
    for (int e = 0; e < ps.structure->size(); ++e) {
      os << " " << e;
      std::string marks;
      for (int c = 1; c <= kMaxColors; ++c)
        if (ps.assignment.get(c) == e) marks += "x" + std::to_string(c);
      if (!marks.empty()) os << "[" << marks << "]";
    }
    os << "\n";
  }
  return os.str();
}

int read_int(std::istream& in, const std::string& prompt, int lo, int hi) {
  while (true) {
    std::cout << prompt << " ";
    std::cout.flush();
    std::string line;
    if (!std::getline(in, line)) throw error("input closed");
    if (line == "q") throw error("quit");
    try {
      int v = std::stoi(line);
      if (v >= lo && v <= hi) return v;
    } catch (...) {
    }
    std::cout << "  (enter a number in " << lo << ".." << hi << ", or q)\n";
  }
}

// The tree game: both players work on a list of open leaves. The engine
// plays Spoiler by re-solving each leaf and following a winning move, and
// plays Duplicator obliviously. Pebble placements and duplication are the
// only prompts a human Duplicator sees.
int play_qvt(const Inputs& in, int r, int k, bool human_spoiler, bool human_duplicator,
             Budget budget, const std::string& trace_file) {
  if (k < 1) throw error("-k is required for qvt");
  struct Leaf {
    std::vector<PebbledStructure> left, right;
    int counter = 0;
  };
  std::vector<Leaf> open;
  {
    Leaf root;
    for (const auto& w : plain(in.left, "play")) root.left.emplace_back(w);
    for (const auto& w : plain(in.right, "play")) root.right.emplace_back(w);
    root.counter = r;
    open.push_back(std::move(root));
  }
  std::ostringstream trace;
  auto solve = [&](const Leaf& leaf) {
    return decide_sg(leaf.left, leaf.right, leaf.counter, k, measure_qcount(),
                     SgMode::AtMost, true, budget);
  };
  auto close_atom_of = [&](const Leaf& leaf) -> FormulaPtr {
    // Zero-cost close: any atomic formula separating the leaf's sides.
    auto d = decide_sg(leaf.left, leaf.right, 0, k, measure_qcount(), SgMode::AtMost, true,
                       budget);
    if (d.winner != Player::Spoiler) return nullptr;
    // The certificate at budget 0 is quantifier-free but may be compound;
    // a single-atom close exists only when the formula is one atom.
    return d.certificate->formula->kind == Conn::Atom ? d.certificate->formula : nullptr;
  };
  auto show_leaf = [&](const Leaf& leaf, std::size_t idx) {
    std::cout << "open leaf #" << idx << " (budget " << leaf.counter << ")\n";
    std::cout << "left:\n" << render_side(leaf.left, "L");
    std::cout << "right:\n" << render_side(leaf.right, "R");
  };

  try {
    while (!open.empty()) {
      std::size_t li = 0;
      if (human_spoiler) {
        for (std::size_t i = 0; i < open.size(); ++i) show_leaf(open[i], i);
        li = open.size() == 1
                 ? 0
                 : static_cast<std::size_t>(read_int(
                       std::cin, "Spoiler: which open leaf?", 0,
                       static_cast<int>(open.size()) - 1));
      }
      Leaf leaf = open[li];

      // Pick the move.
      enum { Pebble, Split, Swap, Close, Resign } kind;
      bool on_left = true;
      int color = 1;
      if (human_spoiler) {
        std::cout << "moves: 0=pebble-left 1=pebble-right 2=split-left 3=split-right "
                     "4=swap 5=close 6=resign\n";
        int mv = read_int(std::cin, "Spoiler: move?", 0, 6);
        kind = mv <= 1 ? Pebble : (mv <= 3 ? Split : (mv == 4 ? Swap : (mv == 5 ? Close : Resign)));
        on_left = mv == 0 || mv == 2;
        if (kind == Pebble && leaf.counter < 1) {
          std::cout << "no pebble budget left on this leaf\n";
          continue;
        }
        if (kind == Pebble) color = read_int(std::cin, "pebble color (1.." + std::to_string(k) + ")?", 1, k);
      } else {
        // Engine Spoiler: follow a winning line when one exists; otherwise
        // spend pebbles while they last and then resign.
        auto d = solve(leaf);
        if (d.winner == Player::Spoiler) {
          const auto& root = *d.certificate->root;
          if (root.move == "close") {
            kind = Close;
          } else if (root.move == "pebble-left" || root.move == "pebble-right") {
            kind = Pebble;
            on_left = root.move == "pebble-left";
            color = root.color;
          } else if (root.move == "split-left" || root.move == "split-right") {
            kind = Split;
            on_left = root.move == "split-left";
          } else {
            kind = Swap;
          }
          // Splits and swaps are applied straight from the certificate.
          if (kind == Split) {
            Leaf one, two;
            one.left = root.children[0]->left;
            one.right = root.children[0]->right;
            one.counter = root.children[0]->counter;
            two.left = root.children[1]->left;
            two.right = root.children[1]->right;
            two.counter = root.children[1]->counter;
            open.erase(open.begin() + static_cast<std::ptrdiff_t>(li));
            open.push_back(one);
            open.push_back(two);
            trace << "split\n";
            std::cout << "Spoiler splits leaf #" << li << "\n";
            continue;
          }
          if (kind == Swap) {
            std::swap(leaf.left, leaf.right);
            open[li] = leaf;
            trace << "swap\n";
            std::cout << "Spoiler swaps leaf #" << li << "\n";
            continue;
          }
        } else if (leaf.counter >= 1) {
          kind = Pebble;
          on_left = true;
          color = 1;
        } else {
          kind = Resign;
        }
      }

      if (kind == Resign) {
        std::cout << "Spoiler resigns with " << open.size() << " open leaves.\n";
        trace << "winner: Duplicator\n";
        if (!trace_file.empty()) std::ofstream(trace_file) << trace.str();
        return kDuplicator;
      }

      if (kind == Close) {
        FormulaPtr atom = close_atom_of(leaf);
        if (!atom) {
          std::cout << "no atomic formula closes this leaf\n";
          if (!human_spoiler) {
            trace << "winner: Duplicator\n";
            if (!trace_file.empty()) std::ofstream(trace_file) << trace.str();
            return kDuplicator;
          }
          continue;
        }
        std::cout << "leaf #" << li << " closed with " << print_formula(atom) << "\n";
        trace << "close " << print_formula(atom) << "\n";
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(li));
        continue;
      }

      if (kind == Swap) {
        std::swap(leaf.left, leaf.right);
        open[li] = leaf;
        trace << "swap\n";
        continue;
      }

      if (kind == Split) {
        auto& side_ref = on_left ? leaf.left : leaf.right;
        int r1 = read_int(std::cin, "budget for part 1 (part 2 gets the rest)?", 0, leaf.counter);
        std::cout << "part 1 members (indices into the side, space separated, may be empty): ";
        std::cout.flush();
        std::string line;
        if (!std::getline(std::cin, line)) throw error("input closed");
        if (line == "q") throw error("quit");
        std::set<int> part1;
        std::stringstream ss(line);
        int v;
        while (ss >> v) part1.insert(v);
        Leaf one = leaf, two = leaf;
        auto& s1 = on_left ? one.left : one.right;
        auto& s2 = on_left ? two.left : two.right;
        s1.clear();
        s2.clear();
        for (std::size_t i = 0; i < side_ref.size(); ++i)
          (part1.count(static_cast<int>(i)) ? s1 : s2).push_back(side_ref[i]);
        one.counter = r1;
        two.counter = leaf.counter - r1;
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(li));
        open.push_back(one);
        open.push_back(two);
        trace << "split\n";
        continue;
      }

      // Pebble move: Spoiler places on one side, Duplicator answers on the
      // other (copying freely).
      auto& T = on_left ? leaf.left : leaf.right;
      auto& U = on_left ? leaf.right : leaf.left;
      std::vector<int> picks;
      if (human_spoiler) {
        for (std::size_t i = 0; i < T.size(); ++i)
          picks.push_back(read_int(std::cin, "  element for structure #" + std::to_string(i) + "?",
                                   0, T[i].structure->size() - 1));
      } else {
        auto d = solve(leaf);
        if (d.winner == Player::Spoiler && d.certificate->root->move != "close") {
          // Recover the placements from the certificate child: match each
          // structure by its assignment with the played color erased.
          const auto& root = *d.certificate->root;
          const auto& child_side = on_left ? root.children[0]->left : root.children[0]->right;
          for (const auto& ps : T) {
            int pick = 0;
            Assignment base = ps.assignment;
            base.erase(color);
            for (const auto& q : child_side) {
              if (q.structure != ps.structure) continue;
              Assignment qb = q.assignment;
              qb.erase(color);
              if (qb == base) {
                pick = std::max(0, q.assignment.get(color));
                break;
              }
            }
            picks.push_back(pick);
          }
        } else {
          picks.assign(T.size(), 0);  // losing position: spend the budget
        }
        std::cout << "Spoiler pebbles " << (on_left ? "left" : "right") << " with x" << color
                  << ":";
        for (int e : picks) std::cout << " " << e;
        std::cout << "\n";
      }
      for (std::size_t i = 0; i < T.size(); ++i) T[i] = T[i].with(color, picks[i]);
      trace << "pebble x" << color << (on_left ? " left:" : " right:");
      for (int e : picks) trace << " " << e;
      trace << "\n";

      if (human_duplicator) {
        std::vector<PebbledStructure> response;
        std::cout << "Duplicator responds on " << (on_left ? "right" : "left") << "\n";
        for (std::size_t i = 0; i < U.size(); ++i) {
          std::cout << "  placements for structure #" << i << " (list or 'all'): ";
          std::cout.flush();
          std::string line;
          if (!std::getline(std::cin, line)) throw error("input closed");
          if (line == "q") throw error("quit");
          bool any = false;
          if (line != "all" && !line.empty()) {
            std::stringstream ss(line);
            int e;
            while (ss >> e)
              if (e >= 0 && e < U[i].structure->size()) {
                response.push_back(U[i].with(color, e));
                any = true;
              }
          }
          if (!any)
            for (const auto& q : oblivious_responses(U[i], color)) response.push_back(q);
        }
        U = std::move(response);
      } else {
        U = expand_side(U, color);
      }
      leaf.counter -= 1;
      open[li] = leaf;
    }
  } catch (const error& e) {
    if (std::string(e.what()) == "quit") {
      std::cout << "session aborted\n";
      return kOk;
    }
    throw;
  }
  std::cout << "All leaves closed: Spoiler wins.\n";
  trace << "winner: Spoiler\n";
  if (!trace_file.empty()) std::ofstream(trace_file) << trace.str();
  return kSpoiler;
}

int cmd_play(const std::string& game, const Inputs& in, int r, int k, const std::string& side,
             OnTopPolicy on_top, std::uint64_t node_cap, const std::string& trace_file) {
  Budget budget;
  budget.node_cap = node_cap;
  bool human_spoiler = side == "spoiler";
  bool human_duplicator = side == "duplicator";
  if (side != "spoiler" && side != "duplicator" && side != "none")
    throw error("--side takes spoiler, duplicator or none");

  std::ostringstream trace;
  bool engine_optimal = true;

  if (game == "qvt")
    return play_qvt(in, r, k, human_spoiler, human_duplicator, budget, trace_file);
  if (game != "ms") throw error("play supports the games ms and qvt");

  MsPosition pos;
  for (const auto& w : plain(in.left, "play")) pos.left.emplace_back(w);
  for (const auto& w : plain(in.right, "play")) pos.right.emplace_back(w);
  pos.rounds_left = r;
  pos.next_color = 1;
  pos.policy = on_top;

  auto show = [&]() {
    if (pos.rounds_left > 0)
      std::cout << "--- round " << (r - pos.rounds_left + 1) << " of " << r << " (color x"
                << pos.next_color << ")\n";
    else
      std::cout << "--- final position\n";
    std::cout << "left:\n" << render_side(pos.left, "L");
    std::cout << "right:\n" << render_side(pos.right, "R");
  };

  try {
    while (pos.rounds_left > 0) {
      show();
      // Spoiler picks a side and one element per structure on it.
      bool play_left;
      std::vector<int> picks;
      auto forbidden = [&](const PebbledStructure& ps, int e) {
        bool forbid = pos.policy == OnTopPolicy::ForbidBoth ||
                      (play_left && pos.policy == OnTopPolicy::ForbidLeft) ||
                      (!play_left && pos.policy == OnTopPolicy::ForbidRight);
        return forbid && is_on_top(ps, e);
      };
      if (human_spoiler) {
        play_left = read_int(std::cin, "Spoiler: play side (0=left, 1=right)?", 0, 1) == 0;
        auto& side_ref = play_left ? pos.left : pos.right;
        for (std::size_t i = 0; i < side_ref.size(); ++i) {
          while (true) {
            int e = read_int(std::cin,
                             "  element for structure #" + std::to_string(i) + "?", 0,
                             side_ref[i].structure->size() - 1);
            if (forbidden(side_ref[i], e)) {
              std::cout << "  that element is occupied and on-top play is forbidden\n";
              continue;
            }
            picks.push_back(e);
            break;
          }
        }
      } else {
        // Engine Spoiler: find a winning placement by solving successors; if
        // none exists, fall back to the first legal one.
        bool found = false;
        for (int s = 0; s < 2 && !found; ++s) {
          play_left = s == 0;
          auto& T = play_left ? pos.left : pos.right;
          auto& U = play_left ? pos.right : pos.left;
          std::vector<int> idx(T.size(), 0);
          while (!found) {
            bool legal = true;
            for (std::size_t i = 0; i < T.size(); ++i)
              if (forbidden(T[i], idx[i])) legal = false;
            if (legal) {
              MsPosition succ;
              succ.rounds_left = pos.rounds_left - 1;
              succ.next_color = pos.next_color + 1;
              succ.policy = pos.policy;
              auto& st = play_left ? succ.left : succ.right;
              auto& su = play_left ? succ.right : succ.left;
              st = T;
              for (std::size_t i = 0; i < T.size(); ++i)
                st[i] = st[i].with(pos.next_color, idx[i]);
              su = expand_side(U, pos.next_color);
              try {
                if (!position_has_match(succ) ||
                    solve_ms_position(succ, budget) == Player::Spoiler) {
                  picks.assign(idx.begin(), idx.end());
                  found = true;
                  break;
                }
              } catch (const budget_error&) {
                engine_optimal = false;  // keep the first legal move instead
                picks.assign(idx.begin(), idx.end());
                found = true;
                break;
              }
            }
            std::size_t i = T.size();
            while (i > 0 && ++idx[i - 1] == T[i - 1].structure->size()) idx[--i] = 0;
            if (i == 0) break;
          }
        }
        if (!found) {
          // No winning move: play the first legal placement on the left.
          play_left = true;
          for (auto& ps : pos.left) {
            int pick = 0;
            while (forbidden(ps, pick) && pick + 1 < ps.structure->size()) ++pick;
            picks.push_back(pick);
          }
        }
        std::cout << "Spoiler plays " << (play_left ? "left" : "right") << ":";
        for (int e : picks) std::cout << " " << e;
        std::cout << "\n";
      }
      trace << "round " << (r - pos.rounds_left + 1) << " spoiler "
            << (play_left ? "left" : "right") << ":";
      for (int e : picks) trace << " " << e;
      trace << "\n";
      auto& T = play_left ? pos.left : pos.right;
      for (std::size_t i = 0; i < T.size(); ++i) T[i] = T[i].with(pos.next_color, picks[i]);

      // Duplicator responds on the other side.
      auto& U = play_left ? pos.right : pos.left;
      if (human_duplicator) {
        std::vector<PebbledStructure> response;
        std::cout << "Duplicator responds on " << (play_left ? "right" : "left") << "\n";
        for (std::size_t i = 0; i < U.size(); ++i) {
          std::cout << "  placements for structure #" << i << " (list of elements or 'all'): ";
          std::cout.flush();
          std::string line;
          if (!std::getline(std::cin, line)) throw error("input closed");
          if (line == "q") throw error("quit");
          if (line == "all" || line.empty()) {
            for (const auto& q : oblivious_responses(U[i], pos.next_color))
              response.push_back(q);
          } else {
            std::stringstream ss(line);
            int e;
            bool any = false;
            while (ss >> e) {
              if (e < 0 || e >= U[i].structure->size()) continue;
              response.push_back(U[i].with(pos.next_color, e));
              any = true;
            }
            if (!any)
              for (const auto& q : oblivious_responses(U[i], pos.next_color))
                response.push_back(q);
          }
        }
        U = std::move(response);
      } else {
        U = expand_side(U, pos.next_color);
        std::cout << "Duplicator copies and answers everywhere (oblivious)\n";
      }
      trace << "round " << (r - pos.rounds_left + 1) << " duplicator oblivious\n";

      pos.rounds_left -= 1;
      pos.next_color += 1;
      if (!position_has_match(pos)) {
        show();
        std::cout << "No matching pair remains: Spoiler wins.\n";
        trace << "winner: Spoiler\n";
        if (!trace_file.empty()) std::ofstream(trace_file) << trace.str();
        if (!engine_optimal) std::cout << "(non-optimal engine: budget was exceeded)\n";
        return kSpoiler;
      }
    }
  } catch (const error& e) {
    if (std::string(e.what()) == "quit") {
      std::cout << "session aborted\n";
      return kOk;
    }
    throw;
  }
  show();
  std::cout << "A matching pair survived " << r << " rounds: Duplicator wins.\n";
  trace << "winner: Duplicator\n";
  if (!trace_file.empty()) std::ofstream(trace_file) << trace.str();
  if (!engine_optimal) std::cout << "(non-optimal engine: budget was exceeded)\n";
  return kDuplicator;
}

// ---------------------------------------------------------------------------
// oracle-check

int cmd_oracle_check(std::uint64_t seed, int count, int max_size) {
  if (max_size > 8) throw error("oracle corpus size guard: --max-size must be <= 8");
  Budget budget;
  budget.node_cap = 60'000'000;
  int checked = 0;

  auto mismatch = [&](const std::string& what, const StructurePtr& a, const StructurePtr& b,
                      int r, int k, const std::string& m) {
    std::cerr << "MISMATCH in " << what << " (r=" << r << " k=" << k << " measure=" << m
              << ")\n";
    std::cerr << "left:\n" << write_structure(*a);
    std::cerr << "right:\n" << write_structure(*b);
    return kOracleMismatch;
  };

  // Built-in corpus: the small worked instances.
  {
    struct Item {
      StructurePtr a, b;
      int r, k;
      const MeasureSpec* m;
    };
    std::vector<Item> corpus = {
        {gen_linear_order(3), gen_linear_order(2), 3, 2, &measure_qcount()},
        {gen_linear_order(3), gen_linear_order(2), 2, 2, &measure_qcount()},
        {gen_linear_order(3), gen_linear_order(2), 2, 2, &measure_qrank()},
        {gen_linear_order(2), gen_linear_order(2), 2, 2, &measure_qcount()},
    };
    for (const auto& it : corpus) {
      std::vector<PebbledStructure> pa = {PebbledStructure(it.a)};
      std::vector<PebbledStructure> pb = {PebbledStructure(it.b)};
      Player fast = decide_sg(pa, pb, it.r, it.k, *it.m, SgMode::AtMost, false, budget).winner;
      Player naive = naive_oracle_sg(pa, pb, it.r, it.k, *it.m, SgMode::AtMost, budget);
      ++checked;
      if (fast != naive) return mismatch("built-in corpus", it.a, it.b, it.r, it.k, it.m->name);
    }
  }

  // Seeded random instances per measure.
  std::mt19937_64 rng(seed);
  auto random_structure = [&](int max_n) {
    std::uniform_int_distribution<int> size(1, max_n);
    int n = size(rng);
    auto s = std::make_shared<Structure>(order_schema(), n);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (bit(rng)) s->add_tuple("<", {i, j});
    s->finalize();
    return StructurePtr(s);
  };
  for (const MeasureSpec* m : {&measure_qcount(), &measure_qrank(), &measure_fsize()}) {
    for (int i = 0; i < count; ++i) {
      auto a = random_structure(std::min(3, max_size - 1));
      auto b = random_structure(std::min(2, max_size - a->size()));
      int r = m == &measure_fsize() ? 1 + static_cast<int>(rng() % 4)
                                    : static_cast<int>(rng() % 3);
      int k = 1 + static_cast<int>(rng() % 2);
      std::vector<PebbledStructure> pa = {PebbledStructure(a)};
      std::vector<PebbledStructure> pb = {PebbledStructure(b)};
      Player fast = decide_sg(pa, pb, r, k, *m, SgMode::AtMost, false, budget).winner;
      Player naive = naive_oracle_sg(pa, pb, r, k, *m, SgMode::AtMost, budget);
      ++checked;
      if (fast != naive) return mismatch("random corpus", a, b, r, k, m->name);
    }
  }

  // Oblivious vs adversarial Duplicator in the copying game, micro scale.
  for (int i = 0; i < count / 2; ++i) {
    auto a = random_structure(3);
    auto b = random_structure(2);
    for (int r = 1; r <= 2; ++r) {
      Player obl = decide_ms({a}, {b}, r, budget).winner;
      Player adv = decide_ms_adversarial_dup({a}, {b}, r, budget).winner;
      ++checked;
      if (obl != adv) return mismatch("duplicator strategies", a, b, r, 0, "ms");
    }
  }

  std::cout << "oracle check passed: " << checked << " comparisons\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msgw: model-comparison games on finite relational structures"};
  app.require_subcommand(1);
  std::ostringstream echo;
  for (int i = 1; i < argc; ++i) echo << (i > 1 ? " " : "") << argv[i];

  // gen
  auto* gen = app.add_subcommand("gen", "generate a structure file");
  std::string gen_spec, gen_out;
  gen->add_option("spec", gen_spec, "LO:n, RT:[parents] or a structure file")->required();
  gen->add_option("-o,--out", gen_out, "output file (default stdout)");

  // decide
  auto* decide = app.add_subcommand("decide", "decide a game");
  std::string game, measure = "qcount", on_top_s = "any", report_file;
  std::vector<std::string> left_specs, right_specs;
  int opt_r = 0, opt_k = 0;
  bool exact = false, at_most = false;
  std::uint64_t node_cap = 10'000'000;
  decide->add_option("game", game,
                     "ms | ms-no-on-top | ms-repebble | ms-hereditary | ms-no-dup | ef | "
                     "ef-rk | pebble | qvt | sg:<measure>")
      ->required();
  decide->add_option("--left", left_specs, "left structures")->required();
  decide->add_option("--right", right_specs, "right structures")->required();
  decide->add_option("-r", opt_r, "rounds / measure budget")->required();
  decide->add_option("-k", opt_k, "pebble colors / variables");
  decide->add_option("--measure", measure, "qcount | qrank | fsize");
  decide->add_flag("--exact", exact, "exact close semantics");
  decide->add_flag("--at-most", at_most, "budget close semantics (default)");
  decide->add_option("--on-top", on_top_s, "any | no-left | no-right | none");
  decide->add_option("--node-cap", node_cap, "search node cap");
  decide->add_option("--report", report_file, "write the report to a file");

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize a minimal separating sentence");
  std::vector<std::string> s_left, s_right;
  std::string s_measure = "qcount", s_report;
  int s_k = 0, s_rmax = 6;
  std::uint64_t s_cap = 10'000'000;
  synth->add_option("--left", s_left)->required();
  synth->add_option("--right", s_right)->required();
  synth->add_option("-k", s_k, "variable budget")->required();
  synth->add_option("--measure", s_measure, "qcount | qrank | fsize");
  synth->add_option("--rmax", s_rmax, "largest measure value to try");
  synth->add_option("--node-cap", s_cap);
  synth->add_option("--report", s_report);

  // classify
  auto* classify = app.add_subcommand("classify", "replication verdicts for a prenex sentence");
  std::string c_formula, c_file;
  bool c_all_types = false;
  classify->add_option("formula", c_formula, "sentence literal");
  classify->add_option("--file", c_file, "read the sentence from a file");
  classify->add_flag("--types-all", c_all_types,
                     "classify over all consistent types (default: order-consistent)");

  // play
  auto* play = app.add_subcommand("play", "play a game against the engine");
  std::string p_game = "ms", p_side = "spoiler", p_on_top = "any", p_trace;
  std::vector<std::string> p_left, p_right;
  int p_r = 0, p_k = 0;
  std::uint64_t p_cap = 10'000'000;
  play->add_option("game", p_game, "ms | qvt")->required();
  play->add_option("--left", p_left)->required();
  play->add_option("--right", p_right)->required();
  play->add_option("-r", p_r)->required();
  play->add_option("-k", p_k);
  play->add_option("--side", p_side, "spoiler | duplicator | none (engine both)");
  play->add_option("--on-top", p_on_top);
  play->add_option("--node-cap", p_cap);
  play->add_option("--trace", p_trace, "write a replayable trace file");

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "cross-check the solver against the oracle");
  std::uint64_t o_seed = 1;
  int o_count = 200, o_max = 5;
  oracle->add_option("--seed", o_seed);
  oracle->add_option("--count", o_count, "instances per measure");
  oracle->add_option("--max-size", o_max, "total universe bound");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      Weighted w = parse_structure_spec(gen_spec);
      std::string text = write_structure(*w.structure);
      if (gen_out.empty())
        std::cout << text;
      else {
        std::ofstream out(gen_out);
        if (!out) throw error("cannot write '" + gen_out + "'");
        out << text;
      }
      return kOk;
    }
    if (*decide) {
      if (exact && at_most) throw error("--exact and --at-most are mutually exclusive");
      return cmd_decide(game, load_inputs(left_specs, right_specs), opt_r, opt_k, measure,
                        exact, parse_on_top(on_top_s), node_cap, report_file, echo.str());
    }
    if (*synth)
      return cmd_synth(load_inputs(s_left, s_right), s_k, s_measure, s_rmax, s_cap, s_report,
                       echo.str());
    if (*classify) return cmd_classify(c_formula, c_file, c_all_types);
    if (*play)
      return cmd_play(p_game, load_inputs(p_left, p_right), p_r, p_k, p_side,
                      parse_on_top(p_on_top), p_cap, p_trace);
    if (*oracle) return cmd_oracle_check(o_seed, o_count, o_max);
  } catch (const budget_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
