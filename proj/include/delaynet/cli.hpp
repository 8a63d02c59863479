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


#ifndef DELAYNET_CLI_HPP
#define DELAYNET_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace delaynet {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  // compute-transfer, check-feasibility, transform-simulate, pbna-check, onoff-check
  std::string command;
  std::string network;
  std::string cancellations;  // onoff-check
  std::string lecs;           // path, "ones", or empty
  std::string field;          // overrides the network file and DELAYNET_FIELD
  std::string output;         // empty: stdout
  std::uint64_t seed = 0;
  unsigned trials = 32;

  std::string mode = "classical";  // check-feasibility
  std::optional<std::size_t> n;
  std::string alpha = "auto";
  std::string inputs;  // transform-simulate
  double target = 1.0;
  unsigned max_b = 24;
  std::size_t max_n = 4096;

  std::string scheme = "1";  // pbna-check: 1, 2, 2z, 3
  std::size_t n1 = 0, n2 = 0, n3 = 0;
  std::size_t nprime = 1;
  std::size_t k = 0;
  std::string strategy = "krylov";
  std::optional<std::pair<std::size_t, std::size_t>> zero;  // 1-based (source, sink)
};

// 0: verdict computed; 1: operational error; 2: input or parse error;
// 3: field incompatible with the requested transform length.
struct RunResult {
  int status = 0;
  nlohmann::json report;
  std::string error;
};

// Runs the command and writes the report (when there is one) to cfg.output or stdout.
RunResult run(const RunConfig& cfg);
// Same, without writing anything.
RunResult evaluate(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace delaynet

#endif
