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


#ifndef DELAYNET_ONOFF_HPP
#define DELAYNET_ONOFF_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaynet/netmodel.hpp"
#include "delaynet/pbna.hpp"

namespace delaynet {

// Delay-and-combine at a sink: the symbol on incoming edge `from` is held for
// `delay` slots and scaled by `coef` before joining the sink output. `coef`
// replaces the edge's own output coefficient.
struct CancellationRule {
  std::string sink;
  std::string from;
  int delay = 0;
  Coefficient coef;
  std::string cancels;  // source node whose contribution must vanish
};

class CancellationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<CancellationRule> parse_cancellations(const nlohmann::json& j, const GaloisField& f);
std::vector<CancellationRule> load_cancellations(const std::string& path, const GaloisField& f);

// The network with every rule folded into its edge.
NetworkSpec apply_cancellations(const NetworkSpec& net, const std::vector<CancellationRule>& rules,
                                const LecAssignment& lecs);

struct Arrival {
  std::size_t source = 0;
  std::vector<std::size_t> delays;  // raw path delays with a nonzero coefficient
};

struct ArrivalTable {
  std::vector<std::string> sources;
  std::vector<std::string> sinks;
  std::vector<std::size_t> desired;            // per sink
  std::vector<std::vector<Arrival>> arrivals;  // per sink, ascending source

  nlohmann::json to_json() const;
};

ArrivalTable build_arrival_table(const NetworkSpec& net, const std::vector<CancellationRule>& rules,
                                 const LecAssignment& lecs);
ArrivalTable build_arrival_table(const PbnaInstance& inst, const std::vector<CancellationRule>& rules,
                                 const LecAssignment& lecs);

// phi_a + phi_b = value (mod 2), required at `sink`.
struct ParityConstraint {
  std::size_t sink = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  int value = 0;
};

struct OnoffResult {
  bool feasible = false;
  std::vector<int> parity;                   // 1 = odd slots, 0 = even slots
  std::vector<ParityConstraint> constraints;
  std::vector<ParityConstraint> certificate;  // closed walk with odd total value

  nlohmann::json to_json(const ArrivalTable& table) const;
};

// The first source of every connected component is put on odd slots.
OnoffResult onoff_feasible(const ArrivalTable& table);

struct ReplaySink {
  std::vector<int> desired_parities;
  std::vector<int> interference_parities;
  bool disjoint = false;
};

// Runs the cancelled network with each source active only in slots of its
// parity, over `slots` time slots, and records which parities carry what.
std::vector<ReplaySink> onoff_replay(const NetworkSpec& net, const std::vector<CancellationRule>& rules,
                                     const LecAssignment& lecs, const std::vector<int>& parity, long slots,
                                     std::uint64_t seed = 0);

}  // namespace delaynet

#endif
