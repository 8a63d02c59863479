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

// Helpers shared by the test binaries: fixtures, random DAGs and a path
// enumeration oracle written directly against NetworkSpec.

#ifndef DELAYNET_TEST_SUPPORT_HPP
#define DELAYNET_TEST_SUPPORT_HPP

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaynet/netmodel.hpp"

namespace delaynet::testing {

inline std::string fixture(const std::string& name) { return std::string(DELAYNET_FIXTURE_DIR) + "/" + name; }

inline FieldElement random_element(const GaloisField& f, std::mt19937_64& rng, bool nonzero = false) {
  std::uniform_int_distribution<std::uint64_t> d(nonzero ? 1 : 0, f.order() - 1);
  return f.element(d(rng));
}

struct RandomNetOptions {
  int max_nodes = 12;
  int max_delay = 3;
  bool symbols = true;
  bool multi = true;  // several processes / outputs
};

inline FieldPtr random_small_field(std::mt19937_64& rng) {
  static const std::vector<std::pair<unsigned, unsigned>> choices = {{2, 4}, {3, 2}, {7, 1}, {2, 3}, {5, 2}};
  auto [p, m] = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
  return make_field(p, m);
}

// A random acyclic network as JSON; nodes n0..n{N-1} in topological order.
inline nlohmann::json random_network_json(const GaloisField& f, std::mt19937_64& rng, const RandomNetOptions& o) {
  using nlohmann::json;
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = uni(4, o.max_nodes);
  const int ns = uni(1, std::min(3, n / 2));
  const int nt = uni(1, std::min(3, n - ns));
  json j;
  j["nodes"] = json::array();
  for (int v = 0; v < n; ++v) j["nodes"].push_back("n" + std::to_string(v));
  j["sources"] = json::array();
  std::vector<int> mu(static_cast<std::size_t>(n), 0), nu(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < ns; ++s) {
    mu[static_cast<std::size_t>(s)] = o.multi ? uni(1, 2) : 1;
    j["sources"].push_back({{"node", "n" + std::to_string(s)}, {"processes", mu[static_cast<std::size_t>(s)]}});
  }
  j["sinks"] = json::array();
  for (int t = n - nt; t < n; ++t) {
    nu[static_cast<std::size_t>(t)] = o.multi ? uni(1, 2) : 1;
    j["sinks"].push_back({{"node", "n" + std::to_string(t)}, {"outputs", nu[static_cast<std::size_t>(t)]}});
  }
  auto coef = [&]() -> json {
    if (o.symbols && uni(0, 2) > 0) return "g" + std::to_string(uni(0, 5));
    return format_element(random_element(f, rng, uni(0, 4) > 0));
  };
  j["edges"] = json::array();
  std::map<int, std::vector<std::string>> in_ids;
  int next_id = 0;
  std::vector<json> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (uni(0, 99) >= 35) continue;
      int copies = uni(0, 5) == 0 ? 2 : 1;
      for (int c = 0; c < copies; ++c) {
        json e = {{"id", "e" + std::to_string(next_id++)}, {"tail", "n" + std::to_string(a)},
                  {"head", "n" + std::to_string(b)}, {"delay", uni(1, o.max_delay)}, {"lec", coef()}};
        if (nu[static_cast<std::size_t>(b)] > 0) {
          e["output"] = uni(0, nu[static_cast<std::size_t>(b)] - 1);
          e["out_lec"] = coef();
        }
        json in = json::object();
        for (const auto& up : in_ids[a])
          if (uni(0, 3) == 0) in[up] = coef();
        for (int k = 0; k < mu[static_cast<std::size_t>(a)]; ++k)
          if (uni(0, 2) == 0) in["x" + std::to_string(k)] = coef();
        if (!in.empty()) e["in"] = in;
        in_ids[b].push_back(e["id"].get<std::string>());
        edges.push_back(e);
      }
    }
  }
  if (edges.empty()) {
    edges.push_back({{"id", "e0"}, {"tail", "n0"}, {"head", "n" + std::to_string(n - 1)}, {"delay", 1}, {"lec", coef()}});
    if (nu[static_cast<std::size_t>(n - 1)] > 0) edges.back()["output"] = 0;
  }
  j["edges"] = edges;
  j["field"] = f.descriptor();
  return j;
}

// Every source-to-sink path as (process, sink, output, edges, total delay).
struct PathRecord {
  int pid = 0;
  std::size_t sink = 0;
  int output = 0;
  std::vector<std::size_t> edges;  // indices into NetworkSpec::edges
  int length = 0;
};

inline std::vector<PathRecord> enumerate_paths(const NetworkSpec& net) {
  std::vector<PathRecord> out;
  std::map<std::string, std::size_t> sink_of;
  for (std::size_t j = 0; j < net.sinks.size(); ++j) sink_of[net.sinks[j].node] = j;
  int pid = 0;
  for (const auto& src : net.sources) {
    for (int k = 0; k < src.processes; ++k, ++pid) {
      std::vector<std::size_t> stack;
      std::function<void(std::size_t, int)> walk = [&](std::size_t e, int len) {
        stack.push_back(e);
        const EdgeSpec& es = net.edges[e];
        if (auto it = sink_of.find(es.head); it != sink_of.end())
          out.push_back({pid, it->second, es.output.value_or(0), stack, len + es.delay});
        for (std::size_t f = 0; f < net.edges.size(); ++f)
          if (net.edges[f].tail == es.head) walk(f, len + es.delay);
        stack.pop_back();
      };
      for (std::size_t e = 0; e < net.edges.size(); ++e)
        if (net.edges[e].tail == src.node) walk(e, 0);
    }
  }
  return out;
}

// Coefficient an edge applies to one of its inputs.
inline const Coefficient& input_coef(const EdgeSpec& e, const std::string& key) {
  auto it = e.inputs.find(key);
  return it == e.inputs.end() ? e.lec : it->second;
}

inline int process_local(const NetworkSpec& net, int pid) {
  for (const auto& s : net.sources) {
    if (pid < s.processes) return pid;
    pid -= s.processes;
  }
  return -1;
}

// Value of one path for an impulse injected at raw time tau; edge coefficients
// use their entry time, taps the normalized output time.
inline FieldElement path_gain(const NetworkSpec& net, const PathRecord& p, long tau, int d_min,
                              const std::function<FieldElement(const Coefficient&, long)>& value) {
  FieldElement g = value(input_coef(net.edges[p.edges[0]], "x" + std::to_string(process_local(net, p.pid))), tau);
  long t = tau + net.edges[p.edges[0]].delay;
  for (std::size_t h = 1; h < p.edges.size(); ++h) {
    const EdgeSpec& e = net.edges[p.edges[h]];
    g = g * value(input_coef(e, net.edges[p.edges[h - 1]].id), t);
    t += e.delay;
  }
  return g * value(net.edges[p.edges.back()].out_lec, t - d_min);
}

inline int oracle_d_min(const std::vector<PathRecord>& paths) {
  int m = -1;
  for (const auto& p : paths) m = m < 0 ? p.length : std::min(m, p.length);
  return m < 0 ? 0 : m;
}

// Random time-invariant values for the symbols g0..g5.
LecAssignment random_invariant(const GaloisField& f, std::mt19937_64& rng) {
  LecAssignment a;
  for (int k = 0; k < 6; ++k) a.set(LecSymbol{"g" + std::to_string(k), {}, {}}, random_element(f, rng));
  return a;
}

LecAssignment random_schedule(const GaloisField& f, std::mt19937_64& rng, long lo, long hi) {
  LecAssignment a;
  a.mode = LecMode::TimeVarying;
  for (int k = 0; k < 6; ++k)
    for (long t = lo; t <= hi; ++t) a.set(LecSymbol{"g" + std::to_string(k), t, {}}, random_element(f, rng));
  return a;
}

std::vector<std::vector<FieldElement>> random_inputs(const GaloisField& f, std::size_t procs, std::size_t len,
                                                     std::mt19937_64& rng) {
  std::vector<std::vector<FieldElement>> x(procs);
  for (auto& s : x)
    for (std::size_t t = 0; t < len; ++t) s.push_back(random_element(f, rng));
  return x;
}


// Block schedule over blocks 1..count with clock origin -d_max.
inline LecAssignment random_block_schedule(const GaloisField& f, std::mt19937_64& rng, long k, long d_max,
                                           long count) {
  LecAssignment a;
  a.mode = LecMode::Block;
  a.geometry = BlockGeometry{k, d_max, -d_max, count};
  for (int s = 0; s < 6; ++s)
    for (long l = 1; l <= count; ++l) a.set(LecSymbol{"g" + std::to_string(s), {}, l}, random_element(f, rng));
  return a;
}

// Random network in which every edge has a unique hop depth: nodes sit in
// layers, sources in layer 0, and an edge of delay d spans d layers.
inline nlohmann::json random_layered_json(const GaloisField& f, std::mt19937_64& rng, int sources, int sinks,
                                          int layers) {
  using nlohmann::json;
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<std::vector<std::string>> layer(static_cast<std::size_t>(layers + 1));
  json j;
  j["field"] = f.descriptor();
  j["sources"] = json::array();
  j["sinks"] = json::array();
  for (int s = 0; s < sources; ++s) {
    layer[0].push_back("S" + std::to_string(s + 1));
    j["sources"].push_back(layer[0].back());
  }
  for (int l = 1; l < layers; ++l)
    for (int v = uni(1, 2); v > 0; --v) layer[static_cast<std::size_t>(l)].push_back("L" + std::to_string(l) + "_" + std::to_string(v));
  for (int t = 0; t < sinks; ++t) j["sinks"].push_back("T" + std::to_string(t + 1));
  auto coef = [&]() -> json {
    if (uni(0, 2) > 0) return "g" + std::to_string(uni(0, 5));
    return format_element(random_element(f, rng, true));
  };
  json edges = json::array();
  int id = 0;
  auto add = [&](const std::string& a, const std::string& b, int d) {
    edges.push_back({{"id", "e" + std::to_string(id++)}, {"tail", a}, {"head", b}, {"delay", d}, {"lec", coef()}});
  };
  // Sinks hang off the last interior layers; every node gets one way in.
  for (int l = 1; l < layers; ++l) {
    for (const auto& v : layer[static_cast<std::size_t>(l)]) {
      int from = uni(std::max(0, l - 2), l - 1);
      while (layer[static_cast<std::size_t>(from)].empty()) --from;
      const auto& pool = layer[static_cast<std::size_t>(from)];
      add(pool[static_cast<std::size_t>(uni(0, static_cast<int>(pool.size()) - 1))], v, l - from);
      for (const auto& u : layer[static_cast<std::size_t>(l - 1)])
        if (uni(0, 2) == 0 && edges.back()["tail"] != u) add(u, v, 1);
    }
  }
  for (int t = 0; t < sinks; ++t) {
    const std::string sink = "T" + std::to_string(t + 1);
    int hooks = 0;
    for (int l = 0; l < layers; ++l)
      for (const auto& v : layer[static_cast<std::size_t>(l)])
        if (uni(0, 3) == 0) {
          add(v, sink, uni(1, 2));
          ++hooks;
        }
    if (hooks == 0) add(layer[static_cast<std::size_t>(layers - 1)][0], sink, 1);
  }
  for (const auto& src : layer[0]) {
    bool used = false;
    for (const auto& e : edges) used = used || e["tail"] == src;
    if (!used) add(src, layer[1][0], 1);
  }
  j["nodes"] = json::array();
  for (const auto& l : layer)
    for (const auto& v : l) j["nodes"].push_back(v);
  for (int t = 0; t < sinks; ++t) j["nodes"].push_back("T" + std::to_string(t + 1));
  j["edges"] = edges;
  return j;
}

}  // namespace delaynet::testing

#endif
