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

#ifndef DELAYNET_NETMODEL_HPP
#define DELAYNET_NETMODEL_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delaynet/galois.hpp"
#include "delaynet/polymatrix.hpp"
#include "delaynet/symbolic.hpp"

namespace delaynet {

class NetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ScheduleGap : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A combination coefficient: a field literal or a named LEC symbol.
struct Coefficient {
  std::optional<FieldElement> literal;
  std::string symbol;

  static Coefficient constant(const FieldElement& v) { return {v, {}}; }
  static Coefficient named(std::string s) { return {std::nullopt, std::move(s)}; }
  bool is_literal() const { return literal.has_value(); }
  std::string to_string() const;
};

// JSON numbers and element literals ("1", "b^3", "1+b^2") are constants;
// any other string names a symbol.
Coefficient parse_coefficient(const GaloisField& f, const nlohmann::json& j);

struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
  int delay = 1;
  Coefficient lec;
  // Per-input overrides keyed by upstream edge id or "x<k>" for local process k.
  std::map<std::string, Coefficient> inputs;
  // Sink output fed by this edge when its head is a sink.
  std::optional<int> output;
  Coefficient out_lec;
};

struct SourceSpec {
  std::string node;
  int processes = 1;
};

struct SinkSpec {
  std::string node;
  int outputs = 1;
};

struct Connection {
  std::string source;
  std::string sink;
  int process = 0;
};

struct NetworkSpec {
  FieldPtr field;
  std::vector<std::string> nodes;
  std::vector<EdgeSpec> edges;
  std::vector<SourceSpec> sources;
  std::vector<SinkSpec> sinks;
  std::vector<Connection> connections;
  std::set<std::string> dummy_nodes;

  std::size_t source_index(const std::string& node) const;
  std::size_t sink_index(const std::string& node) const;
};

NetworkSpec parse_network(const nlohmann::json& j, FieldPtr field_override = nullptr);
// Parse errors carry line and column.
NetworkSpec parse_network_text(std::string_view text, FieldPtr field_override = nullptr);
NetworkSpec load_network(const std::string& path, FieldPtr field_override = nullptr);

NetworkSpec normalize_delays(const NetworkSpec& net);
int min_cut(const NetworkSpec& net, const std::string& source, const std::string& sink);

enum class LecMode { TimeInvariant, TimeVarying, Block };

// Block l (1-based) starts at origin + (l - 1) * (k + d_max).
struct BlockGeometry {
  long k = 1;
  long d_max = 0;
  long origin = 0;
  long count = 1;
  long block_of(long t) const;
};

class LecAssignment {
 public:
  LecMode mode = LecMode::TimeInvariant;
  std::map<LecSymbol, FieldElement> values;
  BlockGeometry geometry;
  // Value for every symbol not listed (e.g. the all-ones assignment).
  std::optional<FieldElement> fallback;

  static LecAssignment all(const FieldElement& v);
  // {"a":"b^6"}, {"a@-1":...} or {"a#2":...}; the mode follows the keys.
  static LecAssignment parse(const nlohmann::json& j, const GaloisField& f);
  static LecAssignment load(const std::string& path, const GaloisField& f);

  // `offset` shifts the block clock for edges further from the sources.
  FieldElement lookup(const std::string& name, long time, long offset = 0) const;
  void set(const LecSymbol& s, const FieldElement& v) { values.insert_or_assign(s, v); }
  nlohmann::json to_json() const;
};

struct EdgeInput {
  bool from_process = false;
  int index = 0;  // global process id, or unit edge index
  Coefficient coef;
};

struct UnitEdge {
  int tail = 0;
  int head = 0;
  std::string id;
  std::vector<EdgeInput> inputs;
  int depth = 0;  // hops from a source node to the tail
  // Hops from arrival at the head to a sink output; -1 when none.
  int rem_min = -1;
  int rem_max = -1;
};

struct SinkTap {
  int edge = 0;
  int output = 0;
  Coefficient coef;
};

// Unit-delay, index-based view of a network used by every computation.
class CompiledNetwork {
 public:
  explicit CompiledNetwork(const NetworkSpec& net);

  const NetworkSpec& spec() const { return spec_; }
  const GaloisField& field() const { return *spec_.field; }
  const std::vector<UnitEdge>& edges() const { return edges_; }
  const std::vector<std::vector<SinkTap>>& taps() const { return taps_; }
  std::size_t num_sources() const { return spec_.sources.size(); }
  std::size_t num_sinks() const { return spec_.sinks.size(); }
  std::size_t num_processes() const { return process_source_.size(); }
  int process_id(std::size_t source, int local) const { return process_offset_[source] + local; }
  std::size_t process_source(int pid) const { return process_source_[static_cast<std::size_t>(pid)]; }
  int mu(std::size_t source) const { return spec_.sources[source].processes; }
  int nu(std::size_t sink) const { return spec_.sinks[sink].outputs; }
  // Structural path lengths (in unit edges) from source i to sink j.
  const std::set<int>& path_lengths(std::size_t i, std::size_t j) const { return lengths_[i][j]; }
  bool connected(std::size_t i, std::size_t j) const { return !lengths_[i][j].empty(); }
  int d_min() const { return d_min_; }
  int d_max() const { return d_max_; }
  int longest_path() const { return longest_; }
  // Every source-to-tail path of every edge has the same length.
  bool layered() const { return layered_; }
  std::vector<std::string> symbols() const;
  // Edge indices entering the sink node, in tap order.
  std::vector<int> sink_in_edges(std::size_t sink) const;
  int edge_by_id(const std::string& id) const;

 private:
  NetworkSpec spec_;
  std::vector<UnitEdge> edges_;
  std::vector<std::vector<SinkTap>> taps_;
  std::vector<int> process_offset_;
  std::vector<std::size_t> process_source_;
  std::vector<std::vector<std::set<int>>> lengths_;
  int d_min_ = 0;
  int d_max_ = 0;
  int longest_ = 0;
  bool layered_ = true;
};

FieldElement resolve(const Coefficient& c, const LecAssignment& lecs, long time, long offset,
                     const GaloisField& target);

struct TransferSet {
  FieldPtr field;
  std::vector<std::vector<PolyMatrix>> raw;  // raw[i][j] is nu_j x mu_i
  int d_min = 0;
  int d_max = 0;

  PolyMatrix normalized(std::size_t i, std::size_t j) const { return raw[i][j].unshifted(static_cast<std::size_t>(d_min)); }
  // nu_j x mu matrix over all processes, normalized.
  PolyMatrix sink_matrix(std::size_t j) const;
};

TransferSet transfer_matrices(const CompiledNetwork& net, const LecAssignment& lecs, FieldPtr target = nullptr);

struct SymDelayPoly {
  std::vector<MultiPoly> coeffs;
  bool is_zero() const;
  MultiPoly at(const FieldElement& c) const;  // substitutes D = c
  std::string to_string() const;
};

struct SymbolicTransferSet {
  FieldPtr field;
  // raw[i][j][r][c]
  std::vector<std::vector<std::vector<std::vector<SymDelayPoly>>>> raw;
  int d_min = 0;
  int d_max = 0;

  // Normalized scalar entry for single-process sources and single-output sinks.
  SymDelayPoly entry(std::size_t i, std::size_t j, std::size_t r = 0, std::size_t c = 0) const;
};

SymbolicTransferSet symbolic_transfer(const CompiledNetwork& net);

// n x n block matrices, rows and columns newest-first.
std::vector<std::vector<FieldMatrix>> time_varying_block_matrix(const CompiledNetwork& net,
                                                                const LecAssignment& lecs, std::size_t n,
                                                                FieldPtr target = nullptr);
// Symbolic counterpart: every LEC application at time t becomes the symbol "name@t".
std::vector<std::vector<RationalMatrix>> time_varying_block_matrix_symbolic(const CompiledNetwork& net,
                                                                            std::size_t n);

struct SimulationResult {
  long t_begin = 0;
  // outputs[j][o][t - t_begin]
  std::vector<std::vector<std::vector<FieldElement>>> outputs;
  // arrivals[edge][t - t_begin] for recorded edges
  std::map<int, std::vector<FieldElement>> arrivals;

  const FieldElement& at(std::size_t j, int o, long t) const {
    return outputs[j][static_cast<std::size_t>(o)][static_cast<std::size_t>(t - t_begin)];
  }
};

struct SimulationOptions {
  long t_begin = 0;
  long t_end = 0;
  // Raw output window that matters; LECs whose effect lies outside it are never looked up.
  std::optional<std::pair<long, long>> window;
  std::vector<int> record_edges;
};

// inputs[pid][t - t_begin]; missing entries are zero.
SimulationResult simulate(const CompiledNetwork& net, const LecAssignment& lecs, const GaloisField& target,
                          const std::vector<std::vector<FieldElement>>& inputs, const SimulationOptions& opt);

}  // namespace delaynet

#endif
