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


#include "delaynet/onoff.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace delaynet {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

const EdgeSpec& find_edge(const NetworkSpec& net, const std::string& id) {
  for (const auto& e : net.edges)
    if (e.id == id) return e;
  throw NetworkError("unknown edge '" + id + "'");
}

std::size_t desired_source(const NetworkSpec& net, std::size_t sink) {
  std::optional<std::size_t> out;
  for (const auto& c : net.connections) {
    if (net.sink_index(c.sink) != sink) continue;
    if (out) throw NetworkError("sink " + c.sink + " demands more than one source");
    out = net.source_index(c.source);
  }
  if (!out) throw NetworkError("sink " + net.sinks[sink].node + " demands nothing");
  return *out;
}

// Extension of the network field large enough that random symbols do not cancel by accident.
FieldPtr replay_field(const GaloisField& f) {
  unsigned m = f.m();
  while (std::log2(static_cast<double>(f.p())) * m < 16) m += f.m();
  return make_field(f.p(), m);
}

// Raw output time of every nonzero sample at each sink when only `source` sends.
std::vector<std::set<long>> occupied_slots(const CompiledNetwork& net, const LecAssignment& lecs,
                                           const GaloisField& target, std::size_t source, const std::vector<long>& on,
                                           long t_end, std::mt19937_64& rng) {
  std::vector<std::vector<FieldElement>> inputs(net.num_processes());
  auto& s = inputs[static_cast<std::size_t>(net.process_id(source, 0))];
  s.assign(static_cast<std::size_t>(t_end + 1), target.zero());
  std::uniform_int_distribution<std::uint64_t> d(1, target.order() - 1);
  for (long t : on) s[static_cast<std::size_t>(t)] = target.element(d(rng));
  SimulationOptions opt;
  opt.t_begin = 0;
  opt.t_end = t_end;
  SimulationResult r = simulate(net, lecs, target, inputs, opt);
  std::vector<std::set<long>> out(net.num_sinks());
  for (std::size_t j = 0; j < net.num_sinks(); ++j)
    for (long t = 0; t <= t_end; ++t)
      if (!r.at(j, 0, t).is_zero()) out[j].insert(t);
  return out;
}

}  // namespace

std::vector<CancellationRule> parse_cancellations(const nlohmann::json& j, const GaloisField& f) {
  require(j.is_array(), "cancellations must be a JSON array");
  std::vector<CancellationRule> out;
  for (const auto& r : j) {
    require(r.is_object(), "each cancellation rule must be an object");
    for (const char* key : {"sink", "from", "delay", "cancels"})
      require(r.contains(key), std::string("cancellation rule lacks '") + key + "'");
    CancellationRule c;
    c.sink = r["sink"].get<std::string>();
    c.from = r["from"].get<std::string>();
    require(r["delay"].is_number_integer() && r["delay"].get<int>() >= 0, "cancellation delay must be a non-negative integer");
    c.delay = r["delay"].get<int>();
    c.coef = r.contains("coef") ? parse_coefficient(f, r["coef"]) : Coefficient::constant(f.one());
    c.cancels = r["cancels"].get<std::string>();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CancellationRule> load_cancellations(const std::string& path, const GaloisField& f) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return parse_cancellations(j, f);
}

NetworkSpec apply_cancellations(const NetworkSpec& net, const std::vector<CancellationRule>& rules,
                                const LecAssignment& lecs) {
  NetworkSpec out = net;
  std::set<std::string> used;
  for (const auto& r : rules) {
    net.sink_index(r.sink);
    net.source_index(r.cancels);
    const EdgeSpec& src = find_edge(net, r.from);
    if (src.head != r.sink) throw NetworkError("edge '" + r.from + "' does not enter sink " + r.sink);
    if (!used.insert(r.from).second) throw NetworkError("edge '" + r.from + "' carries two cancellation rules");
    for (auto& e : out.edges) {
      if (e.id != r.from) continue;
      const GaloisField& f = *net.field;
      e.delay += r.delay;
      e.out_lec = Coefficient::constant(resolve(r.coef, lecs, 0, 0, f));
    }
  }
  return out;
}

nlohmann::json ArrivalTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t s = 0; s < sinks.size(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& a : arrivals[s]) {
      std::set<int> par;
      for (auto d : a.delays) par.insert(static_cast<int>(d % 2));
      row.push_back({{"source", sources[a.source]}, {"delays", a.delays}, {"parities", par},
                     {"desired", a.source == desired[s]}});
    }
    j[sinks[s]] = row;
  }
  return j;
}

ArrivalTable build_arrival_table(const NetworkSpec& net, const std::vector<CancellationRule>& rules,
                                 const LecAssignment& lecs) {
  require(lecs.mode == LecMode::TimeInvariant, "on-off analysis needs time-invariant LECs");
  NetworkSpec folded = apply_cancellations(net, rules, lecs);
  CompiledNetwork cn(folded);
  for (std::size_t i = 0; i < cn.num_sources(); ++i)
    require(cn.mu(i) == 1, "on-off analysis needs one process per source");
  for (std::size_t j = 0; j < cn.num_sinks(); ++j)
    require(cn.nu(j) == 1, "on-off analysis needs one output per sink");

  // A declared cancellation must leave nothing of the source at the sink, in simulation.
  FieldPtr big = replay_field(cn.field());
  std::mt19937_64 rng(0x5eed);
  const long horizon = cn.longest_path() + 8;
  std::vector<long> on;
  for (long t = 0; t < 8; ++t) on.push_back(t);
  for (const auto& r : rules) {
    const std::size_t i = net.source_index(r.cancels), j = net.sink_index(r.sink);
    auto slots = occupied_slots(cn, lecs, *big, i, on, horizon, rng);
    if (!slots[j].empty())
      throw CancellationError("rule on edge '" + r.from + "' leaves a residual of " + r.cancels + " at " + r.sink +
                              " (slot " + std::to_string(*slots[j].begin()) + ")");
  }

  TransferSet ts = transfer_matrices(cn, lecs);
  ArrivalTable t;
  for (const auto& s : net.sources) t.sources.push_back(s.node);
  for (const auto& s : net.sinks) t.sinks.push_back(s.node);
  t.arrivals.resize(net.sinks.size());
  for (std::size_t j = 0; j < net.sinks.size(); ++j) {
    t.desired.push_back(desired_source(net, j));
    for (std::size_t i = 0; i < net.sources.size(); ++i) {
      const DelayPoly& p = ts.raw[i][j](0, 0);
      if (p.is_zero()) continue;
      Arrival a{i, {}};
      for (std::size_t d = 0; d < p.coeffs().size(); ++d)
        if (!p.coeffs()[d].is_zero()) a.delays.push_back(d);
      t.arrivals[j].push_back(std::move(a));
    }
    const bool present = std::any_of(t.arrivals[j].begin(), t.arrivals[j].end(),
                                     [&](const Arrival& a) { return a.source == t.desired[j]; });
    if (!present) throw NetworkError("desired source does not reach " + t.sinks[j] + " after cancellation");
  }
  return t;
}

ArrivalTable build_arrival_table(const PbnaInstance& inst, const std::vector<CancellationRule>& rules,
                                 const LecAssignment& lecs) {
  return build_arrival_table(inst.net().spec(), rules, lecs);
}

nlohmann::json OnoffResult::to_json(const ArrivalTable& table) const {
  nlohmann::json j;
  j["feasible"] = feasible;
  auto edge = [&](const ParityConstraint& c) {
    return nlohmann::json{{"sink", table.sinks[c.sink]}, {"a", table.sources[c.a]}, {"b", table.sources[c.b]},
                          {"parity_sum", c.value}};
  };
  if (feasible) {
    j["schedule"] = nlohmann::json::object();
    for (std::size_t i = 0; i < parity.size(); ++i) j["schedule"][table.sources[i]] = parity[i] ? "odd" : "even";
  } else {
    j["certificate"] = nlohmann::json::array();
    for (const auto& c : certificate) j["certificate"].push_back(edge(c));
  }
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : constraints) j["constraints"].push_back(edge(c));
  return j;
}

OnoffResult onoff_feasible(const ArrivalTable& table) {
  const std::size_t ns = table.sources.size();
  require(table.desired.size() == table.sinks.size() && table.arrivals.size() == table.sinks.size(),
          "arrival table: one row per sink expected");
  OnoffResult res;
  for (std::size_t j = 0; j < table.sinks.size(); ++j) {
    const std::size_t want = table.desired[j];
    require(want < ns, "arrival table: desired source out of range");
    const Arrival* mine = nullptr;
    for (const auto& a : table.arrivals[j]) {
      require(a.source < ns, "arrival table: source out of range");
      require(!a.delays.empty(), "arrival table: empty delay list");
      if (a.source == want) mine = &a;
    }
    require(mine != nullptr, "arrival table: desired source missing at " + table.sinks[j]);
    std::set<std::size_t> mine_par;
    for (auto d : mine->delays) mine_par.insert(d % 2);
    for (const auto& a : table.arrivals[j]) {
      if (a.source == want) continue;
      std::set<std::size_t> other;
      for (auto d : a.delays) other.insert(d % 2);
      for (auto x : mine_par)
        for (auto y : other) res.constraints.push_back({j, want, a.source, static_cast<int>((x ^ y ^ 1) & 1)});
    }
  }

  // BFS 2-colouring over the constraint multigraph.
  std::vector<std::vector<std::size_t>> adj(ns);
  for (std::size_t e = 0; e < res.constraints.size(); ++e) {
    adj[res.constraints[e].a].push_back(e);
    adj[res.constraints[e].b].push_back(e);
  }
  std::vector<int> phi(ns, -1), depth(ns, 0);
  std::vector<long> parent_edge(ns, -1);
  auto other = [&](std::size_t e, std::size_t v) {
    return res.constraints[e].a == v ? res.constraints[e].b : res.constraints[e].a;
  };
  for (std::size_t root = 0; root < ns; ++root) {
    if (phi[root] >= 0) continue;
    phi[root] = 1;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t e : adj[u]) {
        const std::size_t v = other(e, u);
        const int want = phi[u] ^ res.constraints[e].value;
        if (phi[v] < 0) {
          phi[v] = want;
          depth[v] = depth[u] + 1;
          parent_edge[v] = static_cast<long>(e);
          queue.push_back(v);
        } else if (phi[v] != want) {
          // Tree paths from both ends up to their meeting point, closed by e.
          std::vector<ParityConstraint> left, right;
          std::size_t x = u, y = v;
          while (x != y) {
            if (depth[x] >= depth[y]) {
              left.push_back(res.constraints[static_cast<std::size_t>(parent_edge[x])]);
              x = other(static_cast<std::size_t>(parent_edge[x]), x);
            } else {
              right.push_back(res.constraints[static_cast<std::size_t>(parent_edge[y])]);
              y = other(static_cast<std::size_t>(parent_edge[y]), y);
            }
          }
          res.certificate.assign(left.rbegin(), left.rend());
          res.certificate.push_back(res.constraints[e]);
          res.certificate.insert(res.certificate.end(), right.begin(), right.end());
          return res;
        }
      }
    }
  }
  res.feasible = true;
  res.parity = phi;
  return res;
}

std::vector<ReplaySink> onoff_replay(const NetworkSpec& net, const std::vector<CancellationRule>& rules,
                                     const LecAssignment& lecs, const std::vector<int>& parity, long slots,
                                     std::uint64_t seed) {
  require(parity.size() == net.sources.size(), "one parity per source expected");
  require(slots > 0, "replay needs at least one slot");
  CompiledNetwork cn(apply_cancellations(net, rules, lecs));
  FieldPtr big = replay_field(cn.field());
  std::mt19937_64 rng(seed);
  const long t_end = slots + cn.longest_path();
  std::vector<ReplaySink> out(net.sinks.size());
  std::vector<std::set<int>> want(net.sinks.size()), noise(net.sinks.size());
  for (std::size_t i = 0; i < net.sources.size(); ++i) {
    std::vector<long> on;
    for (long t = 0; t < slots; ++t)
      if ((t & 1) == parity[i]) on.push_back(t);
    auto occ = occupied_slots(cn, lecs, *big, i, on, t_end, rng);
    for (std::size_t j = 0; j < net.sinks.size(); ++j)
      for (long t : occ[j]) (desired_source(net, j) == i ? want[j] : noise[j]).insert(static_cast<int>(t & 1));
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].desired_parities.assign(want[j].begin(), want[j].end());
    out[j].interference_parities.assign(noise[j].begin(), noise[j].end());
    out[j].disjoint = std::none_of(want[j].begin(), want[j].end(), [&](int p) { return noise[j].count(p) > 0; });
  }
  return out;
}

}  // namespace delaynet
