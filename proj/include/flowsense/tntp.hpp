#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flowsense/errors.hpp"
#include "flowsense/network.hpp"

namespace flowsense {
namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Reads "<TAG> value" metadata lines up to <END OF METADATA>. If the
// data section starts without a terminator, the first data line is
// handed back through `pending`. Returns false if the stream ends
// before any metadata is seen.
inline bool read_metadata(std::istream& in, std::map<std::string, std::string>& meta,
                          std::string* pending = nullptr) {
  std::string line;
  bool saw_any = false;
  while (std::getline(in, line)) {
    const auto tilde = line.find('~');
    if (tilde != std::string::npos) line.erase(tilde);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() != '<') {
      if (pending) *pending = line;
      return saw_any;
    }
    const auto close = line.find('>');
    if (close == std::string::npos) throw ParseError("unterminated metadata tag: " + line);
    const std::string tag = trim(line.substr(1, close - 1));
    if (tag == "END OF METADATA") return true;
    meta[tag] = trim(line.substr(close + 1));
    saw_any = true;
  }
  return saw_any;
}

// line iterator that can replay the line read_metadata handed back
struct LineSource {
  std::istream& in;
  std::string pending;
  bool has_pending = false;

  bool next(std::string& line) {
    if (has_pending) {
      line = pending;
      has_pending = false;
      return true;
    }
    return static_cast<bool>(std::getline(in, line));
  }
};

inline long require_int_tag(const std::map<std::string, std::string>& meta,
                            const std::string& tag) {
  auto it = meta.find(tag);
  if (it == meta.end()) throw ParseError("missing <" + tag + "> in metadata header");
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw ParseError("non-numeric value for <" + tag + ">: " + it->second);
  }
}

}  // namespace detail

/// Parses the standard `_net.tntp` / `_trips.tntp` pair into a Network
/// (routes and incidence are generated separately). The TNTP link
/// columns map as b = free_flow_time, c = capacity, w = free_flow_time
/// * B, so that the table's t*(1 + B*(v/c)^power) equals b + w*(v/c)^4.
/// Only power == 4 is supported. OD pairs with zero demand (and
/// intrazonal origin == destination entries) are dropped.
inline Network parse_tntp(std::istream& net_file, std::istream& trips_file) {
  Network net;

  std::map<std::string, std::string> meta;
  detail::LineSource net_lines{net_file};
  if (!detail::read_metadata(net_file, meta, &net_lines.pending) || meta.empty())
    throw ParseError("network file has no metadata header");
  net_lines.has_pending = !net_lines.pending.empty();
  const long n_nodes = detail::require_int_tag(meta, "NUMBER OF NODES");
  const long n_links = detail::require_int_tag(meta, "NUMBER OF LINKS");
  const long first_thru = detail::require_int_tag(meta, "FIRST THRU NODE");
  if (n_nodes <= 0 || n_links <= 0)
    throw ParseError("node/link counts must be positive");
  net.num_nodes = static_cast<int>(n_nodes);
  net.first_thru_node = static_cast<int>(first_thru) - 1;

  std::string line;
  while (net_lines.next(line)) {
    const auto tilde = line.find('~');
    if (tilde != std::string::npos) line.erase(tilde);
    for (char& ch : line)
      if (ch == ';') ch = ' ';
    line = detail::trim(line);
    if (line.empty()) continue;

    std::istringstream row(line);
    long init = 0, term = 0;
    double capacity = 0, length = 0, fft = 0, bpr_b = 0, power = 0;
    if (!(row >> init >> term >> capacity >> length >> fft >> bpr_b >> power))
      throw ParseError("malformed link row: " + line);

    Link l;
    l.id = net.num_links();
    l.tail = static_cast<int>(init) - 1;
    l.head = static_cast<int>(term) - 1;
    if (l.tail < 0 || l.tail >= net.num_nodes || l.head < 0 || l.head >= net.num_nodes)
      throw ParseError("link row references node outside 1.." + std::to_string(net.num_nodes));
    if (capacity <= 0.0)
      throw ValidationError("link " + std::to_string(l.id) + ": capacity must be positive");
    if (fft < 0.0)
      throw ValidationError("link " + std::to_string(l.id) + ": negative free flow time");
    if (std::abs(power - 4.0) > 1e-9)
      throw ValidationError("link " + std::to_string(l.id) + ": BPR power " +
                            std::to_string(power) + " unsupported (cost model is quartic)");
    l.b = fft;
    l.c = capacity;
    l.w = fft * bpr_b;
    net.links.push_back(l);
  }
  if (net.num_links() != static_cast<int>(n_links))
    throw ParseError("link table has " + std::to_string(net.num_links()) +
                     " rows but header declares " + std::to_string(n_links));

  // Trips: "Origin <o>" blocks with "<d> : <flow>;" entries.
  std::map<std::string, std::string> trips_meta;
  detail::LineSource trip_lines{trips_file};
  detail::read_metadata(trips_file, trips_meta, &trip_lines.pending);
  trip_lines.has_pending = !trip_lines.pending.empty();
  std::map<std::pair<int, int>, double> od;
  long origin = -1;
  bool saw_block = false;
  while (trip_lines.next(line)) {
    const auto tilde = line.find('~');
    if (tilde != std::string::npos) line.erase(tilde);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::istringstream row(line);
    std::string word;
    row >> word;
    if (word == "Origin" || word == "origin" || word == "ORIGIN") {
      if (!(row >> origin) || origin < 1 || origin > n_nodes)
        throw ParseError("bad Origin line: " + line);
      saw_block = true;
      continue;
    }
    if (origin < 0) throw ParseError("trip entry before any Origin line: " + line);

    // destination entries, possibly several per line
    std::istringstream entries(line);
    std::string token;
    while (std::getline(entries, token, ';')) {
      token = detail::trim(token);
      if (token.empty()) continue;
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw ParseError("malformed trip entry: " + token);
      long dest = 0;
      double flow = 0.0;
      try {
        dest = std::stol(detail::trim(token.substr(0, colon)));
        flow = std::stod(detail::trim(token.substr(colon + 1)));
      } catch (const std::exception&) {
        throw ParseError("malformed trip entry: " + token);
      }
      if (dest < 1 || dest > n_nodes)
        throw ParseError("trip destination outside 1.." + std::to_string(n_nodes));
      if (flow < 0.0) throw ValidationError("negative demand for OD (" +
                                            std::to_string(origin) + ", " + std::to_string(dest) + ")");
      if (dest == origin) continue;  // intrazonal demand is not routable
      od[{static_cast<int>(origin) - 1, static_cast<int>(dest) - 1}] += flow;
    }
  }
  if (!saw_block) throw ParseError("trips file contains no Origin blocks");

  for (const auto& [pair, flow] : od) {
    if (flow <= 0.0) continue;  // zero-demand pairs are dropped
    net.od_pairs.push_back(pair);
    net.demand.push_back(flow);
  }

  net.validate();
  return net;
}

/// Parses a `_node.tntp` coordinate table into net.node_x / net.node_y.
/// Every node must receive a coordinate.
inline void parse_tntp_nodes(std::istream& node_file, Network& net) {
  net.node_x.assign(net.num_nodes, 0.0);
  net.node_y.assign(net.num_nodes, 0.0);
  std::vector<char> seen(net.num_nodes, 0);
  std::string line;
  int count = 0;
  while (std::getline(node_file, line)) {
    const auto tilde = line.find('~');
    if (tilde != std::string::npos) line.erase(tilde);
    for (char& ch : line)
      if (ch == ';') ch = ' ';
    line = detail::trim(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    long id = 0;
    double x = 0, y = 0;
    if (!(row >> id >> x >> y)) {
      // header line ("node X Y") or similar
      std::istringstream probe(line);
      std::string first;
      probe >> first;
      if (!first.empty() && !std::isdigit(static_cast<unsigned char>(first[0])))
        continue;
      throw ParseError("malformed node row: " + line);
    }
    if (id < 1 || id > net.num_nodes)
      throw ParseError("node id outside 1.." + std::to_string(net.num_nodes));
    net.node_x[id - 1] = x;
    net.node_y[id - 1] = y;
    if (!seen[id - 1]) ++count;
    seen[id - 1] = 1;
  }
  if (count != net.num_nodes)
    throw ParseError("node file covers " + std::to_string(count) + " of " +
                     std::to_string(net.num_nodes) + " nodes");
}

}  // namespace flowsense
