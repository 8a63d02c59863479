/*
   Copyright 2026 The delaynet Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "delaynet/netmodel.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace delaynet {

using nlohmann::json;

namespace {

bool valid_symbol_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string json_string(const json& j, const char* what) {
  if (!j.is_string()) throw NetworkError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

int json_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw NetworkError(std::string(what) + " must be an integer");
  return j.get<int>();
}

}  // namespace

std::string Coefficient::to_string() const {
  if (literal) return format_element(*literal);
  return symbol;
}

Coefficient parse_coefficient(const GaloisField& f, const json& j) {
  if (j.is_number_integer()) return Coefficient::constant(f.from_integer(j.get<std::int64_t>()));
  if (!j.is_string()) throw NetworkError("coefficient must be a string or an integer");
  std::string s = j.get<std::string>();
  if (looks_like_element_literal(s)) {
    try {
      return Coefficient::constant(parse_element(f, s));
    } catch (const std::exception& e) {
      throw NetworkError("bad coefficient literal '" + s + "': " + e.what());
    }
  }
  if (!valid_symbol_name(s)) throw NetworkError("bad LEC symbol name '" + s + "'");
  return Coefficient::named(s);
}

std::size_t NetworkSpec::source_index(const std::string& node) const {
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (sources[i].node == node) return i;
  throw NetworkError("unknown source '" + node + "'");
}

std::size_t NetworkSpec::sink_index(const std::string& node) const {
  for (std::size_t i = 0; i < sinks.size(); ++i)
    if (sinks[i].node == node) return i;
  throw NetworkError("unknown sink '" + node + "'");
}

namespace {

void validate(NetworkSpec& net) {
  std::map<std::string, int> node_ix;
  for (const auto& n : net.nodes) {
    if (!node_ix.emplace(n, static_cast<int>(node_ix.size())).second)
      throw NetworkError("duplicate node '" + n + "'");
  }
  auto need_node = [&](const std::string& n, const std::string& ctx) {
    if (!node_ix.count(n)) throw NetworkError(ctx + ": unknown node '" + n + "'");
  };
  std::set<std::string> ids;
  for (const auto& e : net.edges) {
    need_node(e.tail, "edge " + e.id);
    need_node(e.head, "edge " + e.id);
    if (e.delay < 1) throw NetworkError("edge " + e.id + ": delay must be at least 1");
    if (e.tail == e.head) throw NetworkError("edge " + e.id + ": self loop");
    if (!ids.insert(e.id).second) throw NetworkError("duplicate edge id '" + e.id + "'");
  }
  std::set<std::string> seen;
  for (const auto& s : net.sources) {
    need_node(s.node, "source");
    if (s.processes < 1) throw NetworkError("source " + s.node + ": processes must be at least 1");
    if (!seen.insert(s.node).second) throw NetworkError("duplicate source '" + s.node + "'");
  }
  seen.clear();
  for (const auto& s : net.sinks) {
    need_node(s.node, "sink");
    if (s.outputs < 1) throw NetworkError("sink " + s.node + ": outputs must be at least 1");
    if (!seen.insert(s.node).second) throw NetworkError("duplicate sink '" + s.node + "'");
  }
  for (const auto& c : net.connections) {
    std::size_t i = net.source_index(c.source);
    net.sink_index(c.sink);
    if (c.process < 0 || c.process >= net.sources[i].processes)
      throw NetworkError("connection (" + c.source + ", " + c.sink + ", " + std::to_string(c.process) +
                         "): no such process");
  }

  // Acyclicity (Kahn).
  std::vector<int> indeg(net.nodes.size(), 0);
  std::vector<std::vector<int>> out(net.nodes.size());
  for (const auto& e : net.edges) {
    out[static_cast<std::size_t>(node_ix[e.tail])].push_back(node_ix[e.head]);
    ++indeg[static_cast<std::size_t>(node_ix[e.head])];
  }
  std::deque<int> ready;
  for (std::size_t v = 0; v < indeg.size(); ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
  std::size_t visited = 0;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    ++visited;
    for (int w : out[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
  }
  if (visited != net.nodes.size()) throw NetworkError("network has a directed cycle");

  // Input override keys and sink outputs.
  std::map<std::string, std::vector<const EdgeSpec*>> in_edges;
  for (const auto& e : net.edges) in_edges[e.head].push_back(&e);
  for (auto& e : net.edges) {
    for (const auto& [key, coef] : e.inputs) {
      (void)coef;
      bool ok = false;
      if (key.size() > 1 && key[0] == 'x' &&
          std::all_of(key.begin() + 1, key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        for (const auto& s : net.sources)
          if (s.node == e.tail && std::stoi(key.substr(1)) < s.processes) ok = true;
      }
      for (const auto* u : in_edges[e.tail])
        if (u->id == key) ok = true;
      if (!ok) throw NetworkError("edge " + e.id + ": input '" + key + "' does not enter node " + e.tail);
    }
  }
  for (const auto& s : net.sinks) {
    int order = 0;
    for (auto& e : net.edges) {
      if (e.head != s.node) continue;
      if (!e.output) e.output = s.outputs == 1 ? 0 : order;
      if (*e.output < 0 || *e.output >= s.outputs)
        throw NetworkError("edge " + e.id + ": sink output " + std::to_string(*e.output) + " out of range");
      ++order;
    }
  }
}

}  // namespace

NetworkSpec parse_network(const json& j, FieldPtr field_override) {
  if (!j.is_object()) throw NetworkError("network must be a JSON object");
  NetworkSpec net;
  if (field_override) {
    net.field = field_override;
  } else if (j.contains("field")) {
    try {
      net.field = parse_field(json_string(j["field"], "field"));
    } catch (const NetworkError&) {
      throw;
    } catch (const std::exception& e) {
      throw NetworkError(std::string("bad field: ") + e.what());
    }
  } else {
    net.field = make_field(2, 1);
  }
  const GaloisField& f = *net.field;

  if (!j.contains("edges") || !j["edges"].is_array() || j["edges"].empty())
    throw NetworkError("network has no edges");
  std::vector<std::string> implied_nodes;
  auto note_node = [&](const std::string& n) {
    if (std::find(implied_nodes.begin(), implied_nodes.end(), n) == implied_nodes.end()) implied_nodes.push_back(n);
  };
  std::size_t index = 0;
  for (const auto& je : j["edges"]) {
    if (!je.is_object()) throw NetworkError("edge " + std::to_string(index) + " must be an object");
    EdgeSpec e;
    e.id = je.contains("id") ? json_string(je["id"], "edge id") : "e" + std::to_string(index);
    if (!je.contains("tail") || !je.contains("head")) throw NetworkError("edge " + e.id + " needs tail and head");
    e.tail = json_string(je["tail"], "tail");
    e.head = json_string(je["head"], "head");
    if (je.contains("delay")) e.delay = json_int(je["delay"], "delay");
    e.lec = je.contains("lec") ? parse_coefficient(f, je["lec"]) : Coefficient::constant(f.one());
    if (je.contains("in")) {
      if (!je["in"].is_object()) throw NetworkError("edge " + e.id + ": 'in' must be an object");
      for (const auto& [k, v] : je["in"].items()) e.inputs[k] = parse_coefficient(f, v);
    }
    if (je.contains("output")) e.output = json_int(je["output"], "output");
    e.out_lec = je.contains("out_lec") ? parse_coefficient(f, je["out_lec"]) : Coefficient::constant(f.one());
    note_node(e.tail);
    note_node(e.head);
    net.edges.push_back(std::move(e));
    ++index;
  }
  if (j.contains("nodes")) {
    if (!j["nodes"].is_array()) throw NetworkError("'nodes' must be an array");
    for (const auto& n : j["nodes"]) net.nodes.push_back(json_string(n, "node"));
  } else {
    net.nodes = implied_nodes;
  }
  auto endpoints = [&](const char* key, const char* count_key, auto& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw NetworkError(std::string("'") + key + "' must be an array");
    for (const auto& s : j[key]) {
      typename std::decay_t<decltype(out)>::value_type v;
      if (s.is_string()) {
        v.node = s.get<std::string>();
      } else if (s.is_object() && s.contains("node")) {
        v.node = json_string(s["node"], key);
        if (s.contains(count_key)) {
          if constexpr (std::is_same_v<decltype(v), SourceSpec>) {
            v.processes = json_int(s[count_key], count_key);
          } else {
            v.outputs = json_int(s[count_key], count_key);
          }
        }
      } else {
        throw NetworkError(std::string("bad entry in '") + key + "'");
      }
      out.push_back(v);
    }
  };
  endpoints("sources", "processes", net.sources);
  endpoints("sinks", "outputs", net.sinks);
  if (net.sources.empty()) throw NetworkError("network has no sources");
  if (net.sinks.empty()) throw NetworkError("network has no sinks");
  if (j.contains("connections")) {
    if (!j["connections"].is_array()) throw NetworkError("'connections' must be an array");
    for (const auto& c : j["connections"]) {
      Connection con;
      if (c.is_array() && (c.size() == 2 || c.size() == 3)) {
        con.source = json_string(c[0], "connection source");
        con.sink = json_string(c[1], "connection sink");
        if (c.size() == 3) con.process = json_int(c[2], "connection process");
      } else if (c.is_object()) {
        con.source = json_string(c.value("source", json()), "connection source");
        con.sink = json_string(c.value("sink", json()), "connection sink");
        if (c.contains("process")) con.process = json_int(c["process"], "connection process");
      } else {
        throw NetworkError("connection must be [source, sink, process]");
      }
      net.connections.push_back(con);
    }
  }
  validate(net);
  return net;
}

NetworkSpec parse_network_text(std::string_view text, FieldPtr field_override) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < upto; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw NetworkError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                       (pos == std::string::npos ? msg : msg.substr(pos)));
  }
  return parse_network(j, std::move(field_override));
}

NetworkSpec load_network(const std::string& path, FieldPtr field_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetworkError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_network_text(ss.str(), std::move(field_override));
  } catch (const NetworkError& e) {
    throw NetworkError(path + ": " + e.what());
  }
}

NetworkSpec normalize_delays(const NetworkSpec& net) {
  NetworkSpec out = net;
  out.edges.clear();
  const GaloisField& f = *net.field;
  std::set<std::string> names(net.nodes.begin(), net.nodes.end());
  for (const auto& e : net.edges) {
    if (e.delay < 1) throw NetworkError("edge " + e.id + ": delay must be at least 1");
    if (e.delay == 1) {
      out.edges.push_back(e);
      continue;
    }
    std::string prev = e.tail;
    std::string prev_id;
    for (int k = 1; k <= e.delay; ++k) {
      EdgeSpec s;
      s.tail = prev;
      s.delay = 1;
      if (k == e.delay) {
        s.id = e.id;
        s.head = e.head;
        s.output = e.output;
        s.out_lec = e.out_lec;
      } else {
        s.id = e.id + "/" + std::to_string(k);
        s.head = s.id;
        if (!names.insert(s.head).second) throw NetworkError("dummy node name clash: " + s.head);
        out.nodes.push_back(s.head);
        out.dummy_nodes.insert(s.head);
        s.out_lec = Coefficient::constant(f.one());
      }
      if (k == 1) {
        s.lec = e.lec;
        s.inputs = e.inputs;
      } else {
        s.lec = Coefficient::constant(f.one());
      }
      prev = s.head;
      out.edges.push_back(std::move(s));
    }
  }
  return out;
}

int min_cut(const NetworkSpec& net, const std::string& source, const std::string& sink) {
  std::map<std::string, int> ix;
  for (const auto& n : net.nodes) ix.emplace(n, static_cast<int>(ix.size()));
  if (!ix.count(source) || !ix.count(sink)) throw NetworkError("min_cut: unknown endpoint");
  const std::size_t n = ix.size();
  std::vector<std::vector<int>> cap(n, std::vector<int>(n, 0));
  for (const auto& e : net.edges) ++cap[static_cast<std::size_t>(ix[e.tail])][static_cast<std::size_t>(ix[e.head])];
  const int s = ix[source], t = ix[sink];
  if (s == t) return 0;
  int flow = 0;
  for (;;) {
    std::vector<int> parent(n, -1);
    parent[static_cast<std::size_t>(s)] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty() && parent[static_cast<std::size_t>(t)] < 0) {
      int v = q.front();
      q.pop();
      for (std::size_t w = 0; w < n; ++w) {
        if (parent[w] < 0 && cap[static_cast<std::size_t>(v)][w] > 0) {
          parent[w] = v;
          q.push(static_cast<int>(w));
        }
      }
    }
    if (parent[static_cast<std::size_t>(t)] < 0) return flow;
    for (int v = t; v != s; v = parent[static_cast<std::size_t>(v)]) {
      int u = parent[static_cast<std::size_t>(v)];
      --cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
      ++cap[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
    }
    ++flow;
  }
}

long BlockGeometry::block_of(long t) const { return floor_div(t - origin, k + d_max) + 1; }

LecAssignment LecAssignment::all(const FieldElement& v) {
  LecAssignment a;
  a.fallback = v;
  return a;
}

namespace {

// LEC values are always elements, so a bare "b" is the primitive element here.
FieldElement parse_value(const GaloisField& f, const json& v, const std::string& key) {
  try {
    if (v.is_number_integer()) return f.from_integer(v.get<std::int64_t>());
    if (v.is_string()) return parse_element(f, v.get<std::string>());
  } catch (const std::exception& e) {
    throw NetworkError("LEC '" + key + "': " + e.what());
  }
  throw NetworkError("LEC '" + key + "' must be a field element");
}

}  // namespace

LecAssignment LecAssignment::parse(const json& j, const GaloisField& f) {
  if (!j.is_object()) throw NetworkError("LEC assignment must be a JSON object");
  LecAssignment a;
  bool timed = false, blocked = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "_fallback") {
      a.fallback = parse_value(f, v, key);
      continue;
    }
    if (key == "_block") {
      a.geometry.k = v.value("k", 1L);
      a.geometry.d_max = v.value("d_max", 0L);
      a.geometry.origin = v.value("origin", 0L);
      a.geometry.count = v.value("count", 1L);
      blocked = true;
      continue;
    }
    LecSymbol s;
    try {
      s = LecSymbol::parse(key);
    } catch (const std::exception& e) {
      throw NetworkError("bad LEC key '" + key + "': " + e.what());
    }
    timed = timed || s.time.has_value();
    blocked = blocked || s.block.has_value();
    a.values.insert_or_assign(s, parse_value(f, v, key));
  }
  if (timed && blocked) throw NetworkError("LEC assignment mixes time and block indices");
  a.mode = timed ? LecMode::TimeVarying : blocked ? LecMode::Block : LecMode::TimeInvariant;
  return a;
}

LecAssignment LecAssignment::load(const std::string& path, const GaloisField& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetworkError("cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw NetworkError(path + ": " + e.what());
  }
  return parse(j, f);
}

FieldElement LecAssignment::lookup(const std::string& name, long time, long offset) const {
  LecSymbol key{name, std::nullopt, std::nullopt};
  if (mode == LecMode::TimeVarying) {
    key.time = time;
  } else if (mode == LecMode::Block) {
    key.block = geometry.block_of(time - offset);
  }
  if (auto it = values.find(key); it != values.end()) return it->second;
  if (mode != LecMode::TimeInvariant) {
    if (auto it = values.find(LecSymbol{name, std::nullopt, std::nullopt}); it != values.end()) return it->second;
  }
  if (fallback) return *fallback;
  throw ScheduleGap("no value for LEC " + key.to_string());
}

json LecAssignment::to_json() const {
  json j = json::object();
  for (const auto& [s, v] : values) j[s.to_string()] = format_element(v);
  if (fallback) j["_fallback"] = format_element(*fallback);
  if (mode == LecMode::Block) {
    j["_block"] = {{"k", geometry.k}, {"d_max", geometry.d_max}, {"origin", geometry.origin},
                   {"count", geometry.count}};
  }
  return j;
}

CompiledNetwork::CompiledNetwork(const NetworkSpec& net) : spec_(normalize_delays(net)) {
  const NetworkSpec& s = spec_;
  std::map<std::string, int> node_ix;
  for (const auto& n : s.nodes) node_ix.emplace(n, static_cast<int>(node_ix.size()));
  const std::size_t nn = node_ix.size();

  // Node topological order.
  std::vector<int> indeg(nn, 0);
  std::vector<std::vector<int>> succ(nn);
  for (const auto& e : s.edges) {
    succ[static_cast<std::size_t>(node_ix.at(e.tail))].push_back(node_ix.at(e.head));
    ++indeg[static_cast<std::size_t>(node_ix.at(e.head))];
  }
  std::vector<int> pos(nn, 0);
  std::deque<int> ready;
  for (std::size_t v = 0; v < nn; ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
  int counter = 0;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    pos[static_cast<std::size_t>(v)] = counter++;
    for (int w : succ[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
  }
  if (counter != static_cast<int>(nn)) throw NetworkError("network has a directed cycle");

  std::vector<std::size_t> order(s.edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pos[static_cast<std::size_t>(node_ix.at(s.edges[a].tail))] <
           pos[static_cast<std::size_t>(node_ix.at(s.edges[b].tail))];
  });
  std::vector<int> compiled_of(s.edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) compiled_of[order[k]] = static_cast<int>(k);

  process_offset_.resize(s.sources.size());
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    process_offset_[i] = static_cast<int>(process_source_.size());
    for (int k = 0; k < s.sources[i].processes; ++k) process_source_.push_back(i);
  }

  std::map<std::string, std::vector<int>> in_edges;  // node -> compiled edge indices
  for (std::size_t k = 0; k < order.size(); ++k) in_edges[s.edges[order[k]].head].push_back(static_cast<int>(k));

  edges_.resize(s.edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const EdgeSpec& es = s.edges[order[k]];
    UnitEdge& ue = edges_[k];
    ue.tail = node_ix.at(es.tail);
    ue.head = node_ix.at(es.head);
    ue.id = es.id;
    for (std::size_t i = 0; i < s.sources.size(); ++i) {
      if (s.sources[i].node != es.tail) continue;
      for (int p = 0; p < s.sources[i].processes; ++p) {
        auto it = es.inputs.find("x" + std::to_string(p));
        ue.inputs.push_back({true, process_offset_[i] + p, it != es.inputs.end() ? it->second : es.lec});
      }
    }
    for (int u : in_edges[es.tail]) {
      auto it = es.inputs.find(s.edges[order[static_cast<std::size_t>(u)]].id);
      ue.inputs.push_back({false, u, it != es.inputs.end() ? it->second : es.lec});
    }
  }

  taps_.resize(s.sinks.size());
  for (std::size_t j = 0; j < s.sinks.size(); ++j) {
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
      const EdgeSpec& es = s.edges[k];
      if (es.head != s.sinks[j].node) continue;
      taps_[j].push_back({compiled_of[k], es.output.value_or(0), es.out_lec});
    }
  }

  // Hop depths and per-source path lengths.
  std::vector<std::set<int>> depth(edges_.size());
  lengths_.assign(s.sources.size(), std::vector<std::set<int>>(s.sinks.size()));
  std::vector<std::vector<std::set<int>>> arrive(s.sources.size(), std::vector<std::set<int>>(edges_.size()));
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    for (const auto& in : edges_[k].inputs) {
      if (in.from_process) {
        depth[k].insert(0);
        arrive[process_source_[static_cast<std::size_t>(in.index)]][k].insert(1);
      } else {
        for (int d : depth[static_cast<std::size_t>(in.index)]) depth[k].insert(d + 1);
        for (std::size_t i = 0; i < s.sources.size(); ++i)
          for (int d : arrive[i][static_cast<std::size_t>(in.index)]) arrive[i][k].insert(d + 1);
      }
    }
    if (depth[k].size() > 1) layered_ = false;
    edges_[k].depth = depth[k].empty() ? 0 : *depth[k].begin();
  }
  for (std::size_t i = 0; i < s.sources.size(); ++i)
    for (std::size_t j = 0; j < s.sinks.size(); ++j)
      for (const auto& t : taps_[j])
        for (int d : arrive[i][static_cast<std::size_t>(t.edge)]) lengths_[i][j].insert(d);

  // Remaining hops to a sink output, in reverse order.
  for (std::size_t j = 0; j < taps_.size(); ++j) {
    for (const auto& t : taps_[j]) {
      UnitEdge& ue = edges_[static_cast<std::size_t>(t.edge)];
      ue.rem_min = 0;
      if (ue.rem_max < 0) ue.rem_max = 0;
    }
  }
  for (std::size_t k = edges_.size(); k-- > 0;) {
    const UnitEdge& ue = edges_[k];
    if (ue.rem_min < 0) continue;
    for (const auto& in : ue.inputs) {
      if (in.from_process) continue;
      UnitEdge& up = edges_[static_cast<std::size_t>(in.index)];
      up.rem_min = up.rem_min < 0 ? ue.rem_min + 1 : std::min(up.rem_min, ue.rem_min + 1);
      up.rem_max = std::max(up.rem_max, ue.rem_max + 1);
    }
  }

  bool any = false;
  int lo = std::numeric_limits<int>::max(), hi = 0;
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    for (std::size_t j = 0; j < s.sinks.size(); ++j) {
      if (lengths_[i][j].empty()) continue;
      any = true;
      lo = std::min(lo, *lengths_[i][j].begin());
      hi = std::max(hi, *lengths_[i][j].rbegin());
    }
  }
  d_min_ = any ? lo : 0;
  longest_ = any ? hi : 0;
  d_max_ = longest_ - d_min_;
}

std::vector<std::string> CompiledNetwork::symbols() const {
  std::set<std::string> out;
  for (const auto& e : edges_)
    for (const auto& in : e.inputs)
      if (!in.coef.is_literal()) out.insert(in.coef.symbol);
  for (const auto& ts : taps_)
    for (const auto& t : ts)
      if (!t.coef.is_literal()) out.insert(t.coef.symbol);
  return {out.begin(), out.end()};
}

std::vector<int> CompiledNetwork::sink_in_edges(std::size_t sink) const {
  std::vector<int> out;
  for (const auto& t : taps_.at(sink)) out.push_back(t.edge);
  return out;
}

int CompiledNetwork::edge_by_id(const std::string& id) const {
  for (std::size_t k = 0; k < edges_.size(); ++k)
    if (edges_[k].id == id) return static_cast<int>(k);
  throw NetworkError("unknown edge '" + id + "'");
}

FieldElement resolve(const Coefficient& c, const LecAssignment& lecs, long time, long offset,
                     const GaloisField& target) {
  if (c.literal) return embed(*c.literal, target);
  return embed(lecs.lookup(c.symbol, time, offset), target);
}

namespace {

// Impulse response of one process injected at raw time tau. Values are kept
// per edge and per path length; edge coefficients see the raw time the
// symbol enters the edge, taps see the normalized output time.
template <class R>
struct Impulse {
  // out[j][o][L]
  std::vector<std::vector<std::vector<std::optional<R>>>> out;
};

template <class R, class EdgeCoef, class TapCoef>
Impulse<R> propagate_impulse(const CompiledNetwork& net, int pid, long tau, EdgeCoef edge_coef, TapCoef tap_coef,
                             std::optional<std::pair<long, long>> window) {
  const auto& edges = net.edges();
  const std::size_t L = static_cast<std::size_t>(net.longest_path()) + 1;
  std::vector<std::vector<std::optional<R>>> z(edges.size(), std::vector<std::optional<R>>(L + 1));
  auto useful = [&](const UnitEdge& e, long entry) {
    if (e.rem_min < 0) return false;
    if (!window) return true;
    return entry + 1 + e.rem_max >= window->first && entry + 1 + e.rem_min <= window->second;
  };
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const UnitEdge& e = edges[k];
    for (std::size_t a = 0; a < e.inputs.size(); ++a) {
      const EdgeInput& in = e.inputs[a];
      if (in.from_process) {
        if (in.index != pid || !useful(e, tau)) continue;
        R c = edge_coef(k, a, tau);
        auto& slot = z[k][1];
        slot = slot ? R(*slot + c) : c;
        continue;
      }
      const auto& up = z[static_cast<std::size_t>(in.index)];
      for (std::size_t d = 1; d < L; ++d) {
        if (!up[d] || !useful(e, tau + static_cast<long>(d))) continue;
        R c = edge_coef(k, a, tau + static_cast<long>(d));
        R v = c * *up[d];
        auto& slot = z[k][d + 1];
        slot = slot ? R(*slot + v) : v;
      }
    }
  }
  Impulse<R> res;
  res.out.resize(net.num_sinks());
  for (std::size_t j = 0; j < net.num_sinks(); ++j) {
    res.out[j].assign(static_cast<std::size_t>(net.nu(j)), std::vector<std::optional<R>>(L + 1));
    for (std::size_t t = 0; t < net.taps()[j].size(); ++t) {
      const SinkTap& tap = net.taps()[j][t];
      const auto& zz = z[static_cast<std::size_t>(tap.edge)];
      for (std::size_t d = 1; d <= L; ++d) {
        if (!zz[d]) continue;
        long raw = tau + static_cast<long>(d);
        if (window && (raw < window->first || raw > window->second)) continue;
        R v = tap_coef(j, t, raw - net.d_min()) * *zz[d];
        auto& slot = res.out[j][static_cast<std::size_t>(tap.output)][d];
        slot = slot ? R(*slot + v) : v;
      }
    }
  }
  return res;
}

MultiPoly symbolic_coef(const Coefficient& c, const GaloisField& f, std::optional<long> time) {
  if (c.literal) return MultiPoly::constant(*c.literal);
  return MultiPoly::variable(f, LecSymbol{c.symbol, time, std::nullopt});
}

}  // namespace

PolyMatrix TransferSet::sink_matrix(std::size_t j) const {
  std::size_t rows = raw.empty() ? 0 : raw[0][j].rows();
  std::size_t cols = 0;
  for (const auto& r : raw) cols += r[j].cols();
  PolyMatrix m(*field, rows, cols);
  std::size_t c0 = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    PolyMatrix n = normalized(i, j);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < n.cols(); ++c) m(r, c0 + c) = n(r, c);
    c0 += n.cols();
  }
  return m;
}

TransferSet transfer_matrices(const CompiledNetwork& net, const LecAssignment& lecs, FieldPtr target) {
  if (lecs.mode != LecMode::TimeInvariant)
    throw std::invalid_argument("transfer_matrices needs a time-invariant LEC assignment");
  if (!target) target = net.spec().field;
  const GaloisField& f = *target;
  TransferSet ts;
  ts.field = target;
  ts.d_min = net.d_min();
  ts.d_max = net.d_max();
  // Coefficients resolved once.
  std::vector<std::vector<FieldElement>> ec(net.edges().size());
  for (std::size_t k = 0; k < net.edges().size(); ++k)
    for (const auto& in : net.edges()[k].inputs) ec[k].push_back(resolve(in.coef, lecs, 0, 0, f));
  std::vector<std::vector<FieldElement>> tc(net.num_sinks());
  for (std::size_t j = 0; j < net.num_sinks(); ++j)
    for (const auto& t : net.taps()[j]) tc[j].push_back(resolve(t.coef, lecs, 0, 0, f));

  ts.raw.assign(net.num_sources(), {});
  for (std::size_t i = 0; i < net.num_sources(); ++i) {
    for (std::size_t j = 0; j < net.num_sinks(); ++j)
      ts.raw[i].emplace_back(f, static_cast<std::size_t>(net.nu(j)), static_cast<std::size_t>(net.mu(i)));
    for (int p = 0; p < net.mu(i); ++p) {
      auto imp = propagate_impulse<FieldElement>(
          net, net.process_id(i, p), 0, [&](std::size_t k, std::size_t a, long) { return ec[k][a]; },
          [&](std::size_t j, std::size_t t, long) { return tc[j][t]; }, std::nullopt);
      for (std::size_t j = 0; j < net.num_sinks(); ++j)
        for (std::size_t o = 0; o < imp.out[j].size(); ++o)
          for (std::size_t d = 0; d < imp.out[j][o].size(); ++d)
            if (imp.out[j][o][d]) ts.raw[i][j](o, static_cast<std::size_t>(p)).add_term(*imp.out[j][o][d], d);
    }
  }
  return ts;
}

bool SymDelayPoly::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const MultiPoly& m) { return m.is_zero(); });
}

MultiPoly SymDelayPoly::at(const FieldElement& c) const {
  const GaloisField& f = c.field();
  MultiPoly acc(f);
  FieldElement pw = f.one();
  for (const auto& m : coeffs) {
    if (!m.is_zero()) acc += m.mapped(f) * pw;
    pw = pw * c;
  }
  return acc;
}

std::string SymDelayPoly::to_string() const {
  std::string s;
  for (std::size_t d = 0; d < coeffs.size(); ++d) {
    if (coeffs[d].is_zero()) continue;
    if (!s.empty()) s += " + ";
    std::string c = coeffs[d].to_string();
    bool single = coeffs[d].term_count() == 1;
    if (d == 0) {
      s += c;
    } else {
      if (!(single && c == "1")) s += (single ? c : "(" + c + ")") + "*";
      s += d == 1 ? "D" : "D^" + std::to_string(d);
    }
  }
  return s.empty() ? "0" : s;
}

SymDelayPoly SymbolicTransferSet::entry(std::size_t i, std::size_t j, std::size_t r, std::size_t c) const {
  SymDelayPoly p = raw.at(i).at(j).at(r).at(c);
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(d_min), p.coeffs.size());
  for (std::size_t d = 0; d < k; ++d)
    if (!p.coeffs[d].is_zero()) throw std::logic_error("transfer entry below the normalization offset");
  p.coeffs.erase(p.coeffs.begin(), p.coeffs.begin() + static_cast<long>(k));
  return p;
}

SymbolicTransferSet symbolic_transfer(const CompiledNetwork& net) {
  const GaloisField& f = net.field();
  SymbolicTransferSet ts;
  ts.field = net.spec().field;
  ts.d_min = net.d_min();
  ts.d_max = net.d_max();
  const std::size_t L = static_cast<std::size_t>(net.longest_path()) + 1;
  ts.raw.resize(net.num_sources());
  for (std::size_t i = 0; i < net.num_sources(); ++i) {
    ts.raw[i].resize(net.num_sinks());
    for (std::size_t j = 0; j < net.num_sinks(); ++j)
      ts.raw[i][j].assign(static_cast<std::size_t>(net.nu(j)),
                          std::vector<SymDelayPoly>(static_cast<std::size_t>(net.mu(i)),
                                                    SymDelayPoly{std::vector<MultiPoly>(L, MultiPoly(f))}));
    for (int p = 0; p < net.mu(i); ++p) {
      auto imp = propagate_impulse<MultiPoly>(
          net, net.process_id(i, p), 0,
          [&](std::size_t k, std::size_t a, long) {
            return symbolic_coef(net.edges()[k].inputs[a].coef, f, std::nullopt);
          },
          [&](std::size_t j, std::size_t t, long) { return symbolic_coef(net.taps()[j][t].coef, f, std::nullopt); },
          std::nullopt);
      for (std::size_t j = 0; j < net.num_sinks(); ++j)
        for (std::size_t o = 0; o < imp.out[j].size(); ++o)
          for (std::size_t d = 0; d < imp.out[j][o].size() && d < L; ++d)
            if (imp.out[j][o][d]) ts.raw[i][j][o][static_cast<std::size_t>(p)].coeffs[d] = *imp.out[j][o][d];
    }
  }
  return ts;
}

namespace {

// Accumulates the block matrix for every (i, j) from impulse responses.
template <class R, class Make, class EdgeCoef, class TapCoef, class Add>
void block_matrix(const CompiledNetwork& net, std::size_t n, EdgeCoef edge_coef, TapCoef tap_coef, Make make,
                  Add add) {
  if (n == 0) throw std::invalid_argument("block length must be positive");
  const long dmin = net.d_min();
  const long nn = static_cast<long>(n);
  std::pair<long, long> window{dmin, nn - 1 + dmin};
  for (std::size_t i = 0; i < net.num_sources(); ++i) {
    for (std::size_t j = 0; j < net.num_sinks(); ++j) make(i, j);
    for (int p = 0; p < net.mu(i); ++p) {
      const int pid = net.process_id(i, p);
      for (long tau = -net.d_max(); tau <= nn - 1; ++tau) {
        auto imp = propagate_impulse<R>(net, pid, tau, edge_coef, tap_coef, window);
        const long col_gen = nn - 1 - (((tau % nn) + nn) % nn);
        for (std::size_t j = 0; j < net.num_sinks(); ++j) {
          for (std::size_t o = 0; o < imp.out[j].size(); ++o) {
            for (std::size_t d = 0; d < imp.out[j][o].size(); ++d) {
              if (!imp.out[j][o][d]) continue;
              long t = tau + static_cast<long>(d) - dmin;
              long row_gen = nn - 1 - t;
              add(i, j, static_cast<std::size_t>(row_gen) * static_cast<std::size_t>(net.nu(j)) + o,
                  static_cast<std::size_t>(col_gen) * static_cast<std::size_t>(net.mu(i)) +
                      static_cast<std::size_t>(p),
                  *imp.out[j][o][d]);
            }
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<std::vector<FieldMatrix>> time_varying_block_matrix(const CompiledNetwork& net,
                                                                const LecAssignment& lecs, std::size_t n,
                                                                FieldPtr target) {
  if (!target) target = net.spec().field;
  const GaloisField& f = *target;
  std::vector<std::vector<FieldMatrix>> out(net.num_sources());
  block_matrix<FieldElement>(
      net, n,
      [&](std::size_t k, std::size_t a, long time) {
        return resolve(net.edges()[k].inputs[a].coef, lecs, time, net.edges()[k].depth, f);
      },
      [&](std::size_t j, std::size_t t, long time) { return resolve(net.taps()[j][t].coef, lecs, time, 0, f); },
      [&](std::size_t i, std::size_t j) {
        out[i].emplace_back(f, n * static_cast<std::size_t>(net.nu(j)), n * static_cast<std::size_t>(net.mu(i)));
      },
      [&](std::size_t i, std::size_t j, std::size_t r, std::size_t c, const FieldElement& v) {
        out[i][j](r, c) += v;
      });
  return out;
}

std::vector<std::vector<RationalMatrix>> time_varying_block_matrix_symbolic(const CompiledNetwork& net,
                                                                            std::size_t n) {
  const GaloisField& f = net.field();
  std::vector<std::vector<std::vector<MultiPoly>>> acc(net.num_sources());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> dims(net.num_sources());
  block_matrix<MultiPoly>(
      net, n,
      [&](std::size_t k, std::size_t a, long time) {
        return symbolic_coef(net.edges()[k].inputs[a].coef, f, time);
      },
      [&](std::size_t j, std::size_t t, long time) { return symbolic_coef(net.taps()[j][t].coef, f, time); },
      [&](std::size_t i, std::size_t j) {
        std::size_t r = n * static_cast<std::size_t>(net.nu(j)), c = n * static_cast<std::size_t>(net.mu(i));
        acc[i].emplace_back(r * c, MultiPoly(f));
        dims[i].emplace_back(r, c);
      },
      [&](std::size_t i, std::size_t j, std::size_t r, std::size_t c, const MultiPoly& v) {
        acc[i][j][r * dims[i][j].second + c] += v;
      });
  std::vector<std::vector<RationalMatrix>> out(net.num_sources());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (std::size_t j = 0; j < acc[i].size(); ++j) {
      auto [rows, cols] = dims[i][j];
      RationalMatrix m(f, rows, cols);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = RationalFn(acc[i][j][r * cols + c]);
      out[i].push_back(std::move(m));
    }
  }
  return out;
}

SimulationResult simulate(const CompiledNetwork& net, const LecAssignment& lecs, const GaloisField& target,
                          const std::vector<std::vector<FieldElement>>& inputs, const SimulationOptions& opt) {
  if (opt.t_end < opt.t_begin) throw std::invalid_argument("simulate: empty time range");
  const auto& edges = net.edges();
  const std::size_t T = static_cast<std::size_t>(opt.t_end - opt.t_begin + 1);
  const FieldElement zero = target.zero();
  SimulationResult res;
  res.t_begin = opt.t_begin;
  res.outputs.resize(net.num_sinks());
  for (std::size_t j = 0; j < net.num_sinks(); ++j)
    res.outputs[j].assign(static_cast<std::size_t>(net.nu(j)), std::vector<FieldElement>(T, zero));
  for (int e : opt.record_edges) {
    if (e < 0 || static_cast<std::size_t>(e) >= edges.size()) throw std::out_of_range("simulate: bad edge index");
    res.arrivals[e].assign(T, zero);
  }

  // Time-invariant coefficients are resolved once.
  const bool fixed = lecs.mode == LecMode::TimeInvariant;
  std::vector<std::vector<FieldElement>> ec(edges.size());
  std::vector<std::vector<FieldElement>> tc(net.num_sinks());
  if (fixed) {
    for (std::size_t k = 0; k < edges.size(); ++k)
      for (const auto& in : edges[k].inputs) ec[k].push_back(resolve(in.coef, lecs, 0, 0, target));
    for (std::size_t j = 0; j < net.num_sinks(); ++j)
      for (const auto& t : net.taps()[j]) tc[j].push_back(resolve(t.coef, lecs, 0, 0, target));
  }
  auto input_at = [&](int pid, long t) -> FieldElement {
    if (static_cast<std::size_t>(pid) >= inputs.size()) return zero;
    const auto& s = inputs[static_cast<std::size_t>(pid)];
    long k = t - opt.t_begin;
    if (k < 0 || static_cast<std::size_t>(k) >= s.size() || !s[static_cast<std::size_t>(k)].valid()) return zero;
    return embed(s[static_cast<std::size_t>(k)], target);
  };

  std::vector<FieldElement> cur(edges.size(), zero), next(edges.size(), zero);
  for (long t = opt.t_begin; t <= opt.t_end; ++t) {
    const std::size_t slot = static_cast<std::size_t>(t - opt.t_begin);
    for (std::size_t j = 0; j < net.num_sinks(); ++j) {
      for (std::size_t k = 0; k < net.taps()[j].size(); ++k) {
        const SinkTap& tap = net.taps()[j][k];
        const FieldElement& z = cur[static_cast<std::size_t>(tap.edge)];
        if (z.is_zero()) continue;
        if (opt.window && (t < opt.window->first || t > opt.window->second)) continue;
        FieldElement c = fixed ? tc[j][k] : resolve(tap.coef, lecs, t - net.d_min(), 0, target);
        res.outputs[j][static_cast<std::size_t>(tap.output)][slot] += c * z;
      }
    }
    for (auto& [e, v] : res.arrivals) v[slot] = cur[static_cast<std::size_t>(e)];
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const UnitEdge& e = edges[k];
      FieldElement acc = zero;
      bool live = e.rem_min >= 0;
      if (live && opt.window)
        live = t + 1 + e.rem_max >= opt.window->first && t + 1 + e.rem_min <= opt.window->second;
      if (live) {
        for (std::size_t a = 0; a < e.inputs.size(); ++a) {
          const EdgeInput& in = e.inputs[a];
          FieldElement v = in.from_process ? input_at(in.index, t) : cur[static_cast<std::size_t>(in.index)];
          if (v.is_zero()) continue;
          FieldElement c = fixed ? ec[k][a] : resolve(in.coef, lecs, t, e.depth, target);
          acc += c * v;
        }
      }
      next[k] = acc;
    }
    std::swap(cur, next);
  }
  return res;
}

}  // namespace delaynet
