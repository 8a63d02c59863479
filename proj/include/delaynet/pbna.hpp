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


#ifndef DELAYNET_PBNA_HPP
#define DELAYNET_PBNA_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delaynet/netmodel.hpp"
#include "delaynet/polymatrix.hpp"
#include "delaynet/symbolic.hpp"

namespace delaynet {

// Three single-process sources, three single-output sinks, source i demanded by sink i.
class PbnaInstance {
 public:
  explicit PbnaInstance(const NetworkSpec& spec);

  const CompiledNetwork& net() const { return net_; }
  const GaloisField& field() const { return net_.field(); }
  int min_cut(std::size_t source, std::size_t sink) const { return cuts_[source][sink]; }
  // The one ordered cross pair with min-cut 0, if any.
  std::optional<std::pair<std::size_t, std::size_t>> zero_pair() const;

 private:
  CompiledNetwork net_;
  std::array<std::array<int, 3>, 3> cuts_{};
};

enum class PbnaVerdict { Feasible, Infeasible, Unknown };
const char* to_string(PbnaVerdict v);

struct RankCheck {
  std::string name;
  std::size_t rank = 0;
  std::size_t required = 0;
  bool pass() const { return rank == required; }
};

// Reduced conditions at D = 1.
struct ReducedReport {
  PbnaVerdict verdict = PbnaVerdict::Unknown;
  std::string variant = "standard";  // or "S2-T1 zero"
  bool eta_constant = false;
  std::string eta;
  std::array<std::string, 3> b;
  // "" when b_i avoids the set, else the member it equals ("1", "eta", "eta+1",
  // "eta/(eta+1)") or "constant" when eta is constant.
  std::array<std::string, 3> member;
  double failure_bound = 0.0;

  nlohmann::json to_json() const;
};

struct PbnaReport {
  std::string scheme;
  PbnaVerdict verdict = PbnaVerdict::Unknown;
  std::string reason;
  FieldPtr field;
  std::size_t n = 0;
  std::size_t k = 0;                  // scheme 3 block length
  std::array<std::size_t, 3> dims{};  // symbols per source per frame
  std::array<double, 3> rates{};
  std::size_t wire_slots = 0;         // generations on the wire per frame, prefix included
  std::optional<LecAssignment> witness;
  std::vector<RankCheck> ranks;
  bool alignment = false;
  std::size_t g_nonzero = 0;
  std::optional<ReducedReport> reduced;
  bool decoded = false;
  std::size_t symbols = 0;
  std::size_t symbol_errors = 0;
  unsigned trials_run = 0;
  std::vector<std::size_t> failing_bins;

  nlohmann::json to_json() const;
};

struct PbnaOptions {
  unsigned trials = 32;
  std::uint64_t seed = 0;
  // Fixed LECs replace the random search (one trial).
  std::optional<LecAssignment> lecs;
  std::string strategy = "krylov";  // scheme 2: "krylov" or "free"
  // Field for random LECs; default: an extension of at least 2^16 elements
  // holding the needed roots of unity.
  FieldPtr field;
  // Precoder seed vector; default all ones.
  std::optional<std::vector<std::uint64_t>> w;
};

PbnaReport scheme1_check(const PbnaInstance& inst, std::size_t nprime, const PbnaOptions& opt = {});

PbnaReport scheme2_check(const PbnaInstance& inst, std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n,
                         const PbnaOptions& opt = {});

// zero = (source, sink) with min-cut 0; the instance is relabeled so that it
// becomes (S2, T1).
PbnaReport scheme2_mincut0_check(const PbnaInstance& inst, std::pair<std::size_t, std::size_t> zero,
                                 std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n,
                                 const PbnaOptions& opt = {});

ReducedReport scheme3_reduced(const PbnaInstance& inst, const RandomTestOptions& opt = {});

PbnaReport scheme3_pipeline(const PbnaInstance& inst, std::size_t nprime, std::size_t k,
                            const PbnaOptions& opt = {});

// Exact symbolic products over one frame of n generations:
// which = 1: M11^-1 M21 M23^-1 M13, 2: M12^-1 M22 M23^-1 M13, 3: M13^-1 M33 M32^-1 M12.
RationalMatrix alignment_product(const PbnaInstance& inst, std::size_t n, int which);

}  // namespace delaynet

#endif
