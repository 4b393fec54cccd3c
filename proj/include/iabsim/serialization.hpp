#pragma once

// Plain-text records, one per line; '#' starts a comment.
//
//   topology:    id kind x y parent          (kind MBS|SBS|USER, parent -1 for MBSs)
//                "# degree_cap C" optionally fixes the cap (default: max SBS fan-out)
//   capacities:  link parent child capacity_bps
//   schedule:    duration link,link,...      ("-" for an empty slot)
//                "# theta_bps T iterations I converged B" summary

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iabsim/schedule_optimizer.hpp"
#include "iabsim/topology.hpp"

namespace iabsim {

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace io_detail {

inline std::ostream& precise(std::ostream& os) { return os << std::setprecision(17); }

// Calls fn(tokens, line_no) for each non-comment line; comment bodies go to on_comment.
template <class Fn, class CommentFn>
void for_each_record(std::istream& in, Fn fn, CommentFn on_comment) {
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (raw[first] == '#') {
      on_comment(raw.substr(first + 1), line_no);
      continue;
    }
    std::istringstream is(raw);
    std::vector<std::string> tokens;
    for (std::string t; is >> t;) tokens.push_back(t);
    fn(tokens, line_no);
  }
}

inline double number(const std::string& s, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("expected a number, got '" + s + "'", line);
  }
  if (pos != s.size()) throw FormatError("expected a number, got '" + s + "'", line);
  return v;
}

inline long integer(const std::string& s, int line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("expected an integer, got '" + s + "'", line);
  }
  if (pos != s.size()) throw FormatError("expected an integer, got '" + s + "'", line);
  return v;
}

}  // namespace io_detail

inline void write_topology(std::ostream& os, const Topology& t) {
  os << "# degree_cap " << t.degree_cap << "\n# id kind x y parent\n";
  io_detail::precise(os);
  for (const Node& n : t.nodes) {
    os << n.id << ' ' << to_string(n.kind) << ' ' << n.position.x << ' ' << n.position.y << ' '
       << t.parent[static_cast<std::size_t>(n.id)] << '\n';
  }
}

inline Topology read_topology(std::istream& in) {
  Topology t;
  std::optional<int> cap;
  io_detail::for_each_record(
      in,
      [&](const std::vector<std::string>& tok, int line) {
        if (tok.size() != 5) throw FormatError("topology record needs 5 fields", line);
        Node n;
        n.id = static_cast<NodeId>(io_detail::integer(tok[0], line));
        if (tok[1] == "MBS") n.kind = NodeKind::mbs;
        else if (tok[1] == "SBS") n.kind = NodeKind::sbs;
        else if (tok[1] == "USER") n.kind = NodeKind::user;
        else throw FormatError("unknown node kind '" + tok[1] + "'", line);
        n.position = {io_detail::number(tok[2], line), io_detail::number(tok[3], line)};
        if (n.id != static_cast<NodeId>(t.nodes.size())) throw FormatError("node ids must be 0, 1, 2, ...", line);
        t.nodes.push_back(n);
        t.parent.push_back(static_cast<NodeId>(io_detail::integer(tok[4], line)));
      },
      [&](const std::string& body, int line) {
        std::istringstream is(body);
        std::string key;
        if (is >> key && key == "degree_cap") {
          std::string v;
          if (!(is >> v)) throw FormatError("degree_cap needs a value", line);
          cap = static_cast<int>(io_detail::integer(v, line));
        }
      });
  if (cap) {
    t.degree_cap = *cap;
  } else {
    std::vector<int> fan(t.nodes.size(), 0);
    int most = 0;
    for (const Node& n : t.nodes) {
      const NodeId p = t.parent[static_cast<std::size_t>(n.id)];
      if (n.kind == NodeKind::sbs && p >= 0 && static_cast<std::size_t>(p) < fan.size()) {
        most = std::max(most, ++fan[static_cast<std::size_t>(p)]);
      }
    }
    t.degree_cap = std::max(1, most);
  }
  for (const Node& n : t.nodes) {
    if (n.kind != NodeKind::mbs) t.links.push_back({t.parent[static_cast<std::size_t>(n.id)], n.id});
  }
  validate_topology(t);
  return t;
}

inline void write_capacities(std::ostream& os, const Topology& t, const std::vector<double>& caps) {
  os << "# link parent child capacity_bps\n";
  io_detail::precise(os);
  for (std::size_t l = 0; l < t.links.size(); ++l) {
    os << l << ' ' << t.links[l].from << ' ' << t.links[l].to << ' ' << caps[l] << '\n';
  }
}

/// Reads capacities and checks them against the topology's links.
inline std::vector<double> read_capacities(std::istream& in, const Topology& t) {
  std::vector<double> caps(t.links.size(), std::nan(""));
  io_detail::for_each_record(
      in,
      [&](const std::vector<std::string>& tok, int line) {
        if (tok.size() != 4) throw FormatError("capacity record needs 4 fields", line);
        const long l = io_detail::integer(tok[0], line);
        if (l < 0 || static_cast<std::size_t>(l) >= caps.size()) throw FormatError("link id out of range", line);
        const Link& link = t.links[static_cast<std::size_t>(l)];
        if (io_detail::integer(tok[1], line) != link.from || io_detail::integer(tok[2], line) != link.to) {
          throw FormatError("link endpoints disagree with the topology", line);
        }
        const double c = io_detail::number(tok[3], line);
        if (!(c >= 0.0) || !std::isfinite(c)) throw FormatError("capacity must be finite and >= 0", line);
        caps[static_cast<std::size_t>(l)] = c;
      },
      [](const std::string&, int) {});
  for (std::size_t l = 0; l < caps.size(); ++l) {
    if (std::isnan(caps[l])) throw FormatError("missing capacity for link " + std::to_string(l), 0);
  }
  return caps;
}

struct ScheduleSummary {
  double theta_bps = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline void write_schedule(std::ostream& os, const Schedule& s, const std::optional<ScheduleSummary>& summary = {}) {
  io_detail::precise(os);
  if (summary) {
    os << "# theta_bps " << summary->theta_bps << " iterations " << summary->iterations << " converged "
       << (summary->converged ? 1 : 0) << '\n';
  }
  os << "# duration links\n";
  for (const Slot& slot : s.slots) {
    os << slot.duration << ' ';
    if (slot.activation.empty()) os << '-';
    for (std::size_t i = 0; i < slot.activation.size(); ++i) os << (i ? "," : "") << slot.activation[i];
    os << '\n';
  }
}

struct ScheduleFile {
  Schedule schedule;
  std::optional<ScheduleSummary> summary;
};

inline ScheduleFile read_schedule(std::istream& in) {
  ScheduleFile f;
  io_detail::for_each_record(
      in,
      [&](const std::vector<std::string>& tok, int line) {
        if (tok.size() != 2) throw FormatError("schedule record needs 'duration links'", line);
        Slot slot;
        slot.duration = io_detail::number(tok[0], line);
        if (tok[1] != "-") {
          std::istringstream is(tok[1]);
          for (std::string item; std::getline(is, item, ',');) {
            const long l = io_detail::integer(item, line);
            if (l < 0) throw FormatError("negative link id", line);
            slot.activation.push_back(static_cast<LinkId>(l));
          }
        }
        f.schedule.slots.push_back(std::move(slot));
      },
      [&](const std::string& body, int line) {
        std::istringstream is(body);
        std::string key;
        if (!(is >> key) || key != "theta_bps") return;
        ScheduleSummary s;
        std::string v, k2, v2, k3, v3;
        if (!(is >> v >> k2 >> v2 >> k3 >> v3) || k2 != "iterations" || k3 != "converged") {
          throw FormatError("malformed schedule summary", line);
        }
        s.theta_bps = io_detail::number(v, line);
        s.iterations = static_cast<int>(io_detail::integer(v2, line));
        s.converged = io_detail::integer(v3, line) != 0;
        f.summary = s;
      });
  return f;
}

template <class T, class Reader>
T read_file(const std::string& path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return reader(in);
  } catch (const FormatError& e) {
    throw std::runtime_error(path + ":" + e.what());
  }
}

}  // namespace iabsim
