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

#ifndef DELAYNET_FEASIBILITY_HPP
#define DELAYNET_FEASIBILITY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaynet/netmodel.hpp"
#include "delaynet/polymatrix.hpp"
#include "delaynet/symbolic.hpp"
#include "delaynet/transform.hpp"

namespace delaynet {

// Nonzero coefficient of an undemanded process at a sink.
struct InterferenceViolation {
  std::size_t source = 0;
  std::size_t sink = 0;
  int process = 0;  // local index at the source
  int output = 0;
  std::size_t degree = 0;  // power of D (raw)
};

struct FeasibilityReport {
  bool zero_interference = true;
  std::vector<InterferenceViolation> violations;
  bool invertibility = true;
  std::vector<bool> invertible;            // per sink
  std::vector<DelayPoly> determinants;     // per sink, raw
  std::optional<DelayPoly> f_poly;
  std::map<std::size_t, FieldElement> f_at_points;
  // "solvable", "not-solvable", "solvable-transform", "not-transform-feasible",
  // "impossible", "budget-exhausted"
  std::string verdict;
  std::optional<unsigned> b;
  std::optional<std::size_t> n;
  std::optional<FieldElement> alpha;
  FieldPtr field;
  double failure_bound = 0.0;  // symbolic mode only
  std::string note;

  nlohmann::json to_json() const;
};

// Global process ids demanded at sink j, in connection order.
std::vector<int> demanded_processes(const CompiledNetwork& net, std::size_t sink);
// Raw demanded submatrix M'_j; throws NetworkError when it is not square.
PolyMatrix demanded_matrix(const CompiledNetwork& net, const TransferSet& ts, std::size_t sink);

FeasibilityReport check_classical(const CompiledNetwork& net, const LecAssignment& lecs);
// LECs left as symbols: zero-interference must hold identically and each
// det M'_j must be a nonzero polynomial in (LECs, D), tested at random points.
FeasibilityReport check_classical_symbolic(const CompiledNetwork& net, const RandomTestOptions& opt = {});

DelayPoly f_of_D(const CompiledNetwork& net, const LecAssignment& lecs);

FeasibilityReport transform_feasible(const CompiledNetwork& net, const LecAssignment& lecs, std::size_t n,
                                     const FieldElement& alpha);

struct SearchBudget {
  unsigned max_b = 24;
  std::size_t max_n = 4096;
};

FeasibilityReport exists_transform_code(const CompiledNetwork& net, const LecAssignment& lecs,
                                        double target_rate_loss = 1.0, const SearchBudget& budget = {});

// Recovers the demanded processes of sink j from its decoded symbols by
// inverting every M'^(t). Returns recovered[k] for demand k, newest-first.
std::vector<std::vector<FieldElement>> decode_demands(const CompiledNetwork& net, const HatTransferSet& hat,
                                                      std::size_t sink, const std::vector<FieldElement>& y);

}  // namespace delaynet

#endif
