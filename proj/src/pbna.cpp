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


#include "delaynet/pbna.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "delaynet/transform.hpp"

namespace delaynet {

namespace {

using Grid = std::vector<std::vector<FieldMatrix>>;  // [source][sink]
using Triple = std::array<FieldMatrix, 3>;
using Inputs = std::vector<std::vector<FieldElement>>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

FieldElement draw(const GaloisField& f, std::mt19937_64& rng, bool nonzero) {
  std::uniform_int_distribution<std::uint64_t> d(nonzero ? 1 : 0, f.order() - 1);
  return f.element(d(rng));
}

std::vector<FieldElement> draw_vector(const GaloisField& f, std::size_t len, std::mt19937_64& rng) {
  std::vector<FieldElement> v;
  for (std::size_t i = 0; i < len; ++i) v.push_back(draw(f, rng, false));
  return v;
}

FieldMatrix draw_matrix(const GaloisField& f, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  FieldMatrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = draw(f, rng, false);
  return m;
}

// Extension of `base` with at least 2^bits elements and, when n > 1, an
// element of order n.
FieldPtr sampling_field(const GaloisField& base, std::size_t n, unsigned bits) {
  const unsigned step = n > 1 ? dft_field(base, n)->m() : base.m();
  const double lp = std::log2(static_cast<double>(base.p()));
  unsigned deg = step;
  while (lp * deg < bits) deg += step;
  if (lp * deg > 62) throw std::invalid_argument("no sampling field below 2^62 elements");
  return make_field(base.p(), deg);
}

FieldMatrix seed_vector(const GaloisField& f, std::size_t n, const PbnaOptions& opt) {
  FieldMatrix w(f, n, 1);
  if (!opt.w) {
    for (std::size_t r = 0; r < n; ++r) w(r, 0) = f.one();
    return w;
  }
  require(opt.w->size() == n, "precoder seed vector must have " + std::to_string(n) + " entries");
  for (std::size_t r = 0; r < n; ++r) w(r, 0) = f.element((*opt.w)[r] % f.order());
  return w;
}

// Columns u^start w, ..., u^(start+count-1) w.
FieldMatrix krylov(const FieldMatrix& u, const FieldMatrix& w, std::size_t start, std::size_t count) {
  FieldMatrix out(u.field(), w.rows(), count);
  FieldMatrix v = w;
  for (std::size_t s = 0; s < start; ++s) v = u * v;
  for (std::size_t c = 0; c < count; ++c) {
    out.set_block(0, c, v);
    v = u * v;
  }
  return out;
}

FieldMatrix selector(const GaloisField& f, std::size_t rows, std::size_t first, std::size_t count) {
  FieldMatrix s(f, rows, count);
  for (std::size_t c = 0; c < count; ++c) s(first + c, c) = f.one();
  return s;
}

// U = M12^-1 M32 M31^-1 M21 M23^-1 M13.
FieldMatrix u_matrix(const Grid& m) {
  return inverse(m[0][1]) * m[2][1] * inverse(m[2][0]) * m[1][0] * inverse(m[1][2]) * m[0][2];
}

Triple scheme1_precoders(const Grid& m, std::size_t nprime, const FieldMatrix& w) {
  const FieldMatrix u = u_matrix(m);
  const FieldMatrix r = m[0][2] * inverse(m[1][2]);
  const FieldMatrix s = m[0][1] * inverse(m[2][1]);
  return {krylov(u, w, 0, nprime + 1), r * krylov(u, w, 0, nprime), s * krylov(u, w, 1, nprime)};
}

bool contained(const FieldMatrix& a, const FieldMatrix& span) {
  return rank(hconcat(span, a)) == rank(span);
}

struct Verification {
  std::vector<RankCheck> ranks;
  bool alignment = false;
  bool pass() const {
    return alignment && std::all_of(ranks.begin(), ranks.end(), [](const RankCheck& r) { return r.pass(); });
  }
};

// s2t1_zero: S2 does not reach T1, so T1 only sees S3.
Verification verify(const Grid& m, const Triple& v, const std::array<std::size_t, 3>& d, bool s2t1_zero) {
  Verification out;
  if (s2t1_zero)
    out.ranks.push_back({"[V1, M11^-1 M31 V3]", rank(hconcat(v[0], inverse(m[0][0]) * m[2][0] * v[2])), d[0] + d[2]});
  else
    out.ranks.push_back({"[V1, M11^-1 M21 V2]", rank(hconcat(v[0], inverse(m[0][0]) * m[1][0] * v[1])), d[0] + d[1]});
  out.ranks.push_back({"[M12^-1 M22 V2, V1]", rank(hconcat(inverse(m[0][1]) * m[1][1] * v[1], v[0])), d[0] + d[1]});
  out.ranks.push_back({"[M13^-1 M33 V3, V1]", rank(hconcat(inverse(m[0][2]) * m[2][2] * v[2], v[0])), d[0] + d[2]});
  out.alignment = contained(m[2][1] * v[2], m[0][1] * v[0]) && contained(m[1][2] * v[1], m[0][2] * v[0]);
  if (!s2t1_zero) out.alignment = out.alignment && contained(m[2][0] * v[2], m[1][0] * v[1]);
  return out;
}

// Desired symbols of sink j from its received vector, or nullopt.
std::optional<std::vector<FieldElement>> recover(const Grid& m, const Triple& v, std::size_t j, bool s2t1_zero,
                                                 const std::vector<FieldElement>& y) {
  FieldMatrix desired = m[j][j] * v[j];
  FieldMatrix interference = j == 0 ? (s2t1_zero ? m[2][0] * v[2] : m[1][0] * v[1]) : m[0][j] * v[0];
  try {
    auto sol = solve_full_column_rank(hconcat(desired, interference), y);
    if (!sol) return std::nullopt;
    sol->resize(desired.cols());
    return sol;
  } catch (const SingularMatrix&) {
    return std::nullopt;
  }
}

std::size_t count_errors(const std::vector<FieldElement>& a, const std::optional<std::vector<FieldElement>>& b) {
  if (!b) return a.size();
  std::size_t e = 0;
  for (std::size_t r = 0; r < a.size(); ++r) e += a[r] != (*b)[r];
  return e;
}

LecAssignment random_invariant_lecs(const CompiledNetwork& net, const GaloisField& f, std::mt19937_64& rng) {
  LecAssignment a;
  for (const auto& s : net.symbols()) a.set(LecSymbol{s, {}, {}}, draw(f, rng, true));
  return a;
}

LecAssignment random_varying_lecs(const CompiledNetwork& net, const GaloisField& f, std::size_t n,
                                  std::mt19937_64& rng) {
  LecAssignment a;
  a.mode = LecMode::TimeVarying;
  const long span = net.longest_path() + net.d_max() + 2;
  for (const auto& s : net.symbols())
    for (long t = -span; t <= static_cast<long>(n) + span; ++t) a.set(LecSymbol{s, t, {}}, draw(f, rng, true));
  return a;
}

LecAssignment random_block_lecs(const CompiledNetwork& net, const GaloisField& f, std::size_t k, std::size_t blocks,
                                std::mt19937_64& rng) {
  LecAssignment a;
  a.mode = LecMode::Block;
  a.geometry = BlockGeometry{static_cast<long>(k), net.d_max(), -static_cast<long>(net.d_max()),
                             static_cast<long>(blocks)};
  for (const auto& s : net.symbols())
    for (std::size_t l = 1; l <= blocks; ++l) a.set(LecSymbol{s, {}, static_cast<long>(l)}, draw(f, rng, true));
  return a;
}

std::array<double, 3> scheme1_rates(std::size_t nprime) {
  const double n = static_cast<double>(2 * nprime + 1);
  return {(nprime + 1) / n, nprime / n, nprime / n};
}

nlohmann::json rank_json(const std::vector<RankCheck>& ranks) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : ranks) a.push_back({{"condition", r.name}, {"rank", r.rank}, {"required", r.required}});
  return a;
}

std::string member_name(int idx) {
  static const char* names[] = {"1", "eta", "eta+1", "eta/(eta+1)"};
  return names[idx];
}

}  // namespace

const char* to_string(PbnaVerdict v) {
  switch (v) {
    case PbnaVerdict::Feasible: return "feasible";
    case PbnaVerdict::Infeasible: return "infeasible";
    default: return "unknown";
  }
}

PbnaInstance::PbnaInstance(const NetworkSpec& spec) : net_(spec) {
  if (net_.num_sources() != 3 || net_.num_sinks() != 3)
    throw NetworkError("PBNA needs exactly three sources and three sinks");
  for (std::size_t i = 0; i < 3; ++i) {
    if (net_.mu(i) != 1 || net_.nu(i) != 1) throw NetworkError("PBNA needs one process per source and one output per sink");
  }
  std::array<int, 3> demand{-1, -1, -1};
  for (const auto& c : spec.connections) {
    const std::size_t j = spec.sink_index(c.sink);
    if (demand[j] >= 0) throw NetworkError("sink " + c.sink + " demands more than one source");
    demand[j] = static_cast<int>(spec.source_index(c.source));
  }
  for (std::size_t j = 0; j < 3; ++j) {
    if (demand[j] != static_cast<int>(j))
      throw NetworkError("sink " + spec.sinks[j].node + " must demand source " + spec.sources[j].node);
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) cuts_[i][j] = delaynet::min_cut(spec, spec.sources[i].node, spec.sinks[j].node);
  for (std::size_t i = 0; i < 3; ++i) {
    if (cuts_[i][i] != 1)
      throw NetworkError("min-cut between " + spec.sources[i].node + " and " + spec.sinks[i].node + " is " +
                         std::to_string(cuts_[i][i]) + ", expected 1");
  }
}

std::optional<std::pair<std::size_t, std::size_t>> PbnaInstance::zero_pair() const {
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j && cuts_[i][j] == 0) return std::make_pair(i, j);
  return std::nullopt;
}

nlohmann::json ReducedReport::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  j["variant"] = variant;
  j["eta"] = eta;
  j["eta_constant"] = eta_constant;
  for (std::size_t i = 0; i < 3; ++i)
    j["b"].push_back({{"value", b[i]}, {"member", member[i].empty() ? nlohmann::json(nullptr) : nlohmann::json(member[i])}});
  if (failure_bound > 0) j["failure_bound"] = failure_bound;
  return j;
}

nlohmann::json PbnaReport::to_json() const {
  nlohmann::json j;
  j["scheme"] = scheme;
  j["verdict"] = to_string(verdict);
  if (!reason.empty()) j["reason"] = reason;
  if (field) j["field"] = field->descriptor();
  j["n"] = n;
  if (k) j["k"] = k;
  j["dims"] = dims;
  j["rates"] = rates;
  j["wire_slots"] = wire_slots;
  j["ranks"] = rank_json(ranks);
  j["alignment"] = alignment;
  j["g_nonzero"] = g_nonzero;
  if (reduced) j["reduced"] = reduced->to_json();
  j["decode"] = {{"exact", decoded}, {"symbols", symbols}, {"symbol_errors", symbol_errors}};
  j["trials_run"] = trials_run;
  if (!failing_bins.empty()) j["failing_bins"] = failing_bins;
  if (witness) j["witness"] = witness->to_json();
  return j;
}

ReducedReport scheme3_reduced(const PbnaInstance& inst, const RandomTestOptions& opt) {
  const GaloisField& f = inst.field();
  SymbolicTransferSet st = symbolic_transfer(inst.net());
  std::vector<std::vector<MultiPoly>> m(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m[i].push_back(st.entry(i, j).at(f.one()));
  auto rf = [&](std::size_t i, std::size_t j) { return RationalFn(m[i][j]); };
  auto nonzero = [&](std::size_t i, std::size_t j) {
    if (m[i][j].is_zero())
      throw std::invalid_argument("degenerate denominator: M" + std::to_string(i + 1) + std::to_string(j + 1) +
                                  " vanishes at D = 1");
  };

  ReducedReport out;
  const RationalFn one(MultiPoly::constant(f.one()));
  std::optional<RationalFn> eta;
  std::array<std::optional<RationalFn>, 3> b;
  if (m[1][0].is_zero()) {
    out.variant = "S2-T1 zero";
    for (auto [i, j] : {std::pair{0, 0}, {2, 1}, {0, 1}, {1, 2}, {0, 2}}) nonzero(i, j);
    eta = RationalFn(MultiPoly(f));
    b[0] = rf(2, 0) * rf(0, 1) / (rf(0, 0) * rf(2, 1));
  } else {
    for (auto [i, j] : {std::pair{2, 0}, {1, 2}, {0, 1}, {0, 0}, {0, 2}, {2, 1}}) nonzero(i, j);
    eta = rf(1, 0) * rf(2, 1) * rf(0, 2) / (rf(2, 0) * rf(1, 2) * rf(0, 1));
    b[0] = rf(1, 0) * rf(0, 2) / (rf(0, 0) * rf(1, 2));
  }
  b[1] = rf(1, 1) * rf(0, 2) / (rf(0, 1) * rf(1, 2));
  b[2] = rf(2, 2) * rf(0, 1) / (rf(0, 2) * rf(2, 1));

  out.eta = eta->to_string();
  for (std::size_t i = 0; i < 3; ++i) out.b[i] = b[i]->to_string();
  out.eta_constant = rf_is_constant(*eta).has_value();
  if (out.eta_constant) {
    for (std::size_t i = 0; i < 3; ++i)
      if (rf_is_constant(*b[i])) out.member[i] = "constant";
  } else {
    const std::array<RationalFn, 4> set{one, *eta, *eta + one, *eta / (*eta + one)};
    for (std::size_t i = 0; i < 3; ++i) {
      for (int s = 0; s < 4 && out.member[i].empty(); ++s) {
        IdentityVerdict v = rf_probably_equal(*b[i], set[static_cast<std::size_t>(s)], opt);
        if (v.kind == IdentityKind::Different) continue;
        out.member[i] = member_name(s);
        out.failure_bound = std::max(out.failure_bound, v.failure_bound);
      }
    }
  }
  const bool clear = std::all_of(out.member.begin(), out.member.end(), [](const std::string& s) { return s.empty(); });
  out.verdict = clear ? PbnaVerdict::Feasible : PbnaVerdict::Infeasible;
  return out;
}

PbnaReport scheme1_check(const PbnaInstance& inst, std::size_t nprime, const PbnaOptions& opt) {
  const CompiledNetwork& net = inst.net();
  const GaloisField& base = inst.field();
  require(nprime >= 1, "n' must be at least 1");
  const std::size_t n = 2 * nprime + 1;
  if (n % base.p() == 0)
    throw std::invalid_argument("characteristic " + std::to_string(base.p()) + " divides 2n'+1 = " + std::to_string(n));
  if (inst.zero_pair()) throw std::invalid_argument("min-cut violation: scheme 1 needs every cross min-cut >= 1");

  PbnaReport rep;
  rep.scheme = "1";
  rep.n = n;
  rep.dims = {nprime + 1, nprime, nprime};
  rep.rates = scheme1_rates(nprime);
  rep.wire_slots = n + static_cast<std::size_t>(net.d_max());

  unsigned bits = 16, singular_run = 0;
  FieldPtr fptr = opt.lecs ? dft_field(base, n) : (opt.field ? opt.field : sampling_field(base, n, bits));
  const unsigned trials = opt.lecs ? 1 : opt.trials;
  for (unsigned trial = 0; trial < trials; ++trial) {
    ++rep.trials_run;
    auto rng = trial_rng(opt.seed, trial);
    const GaloisField& f = *fptr;
    DftCtx dft = make_dft(f, n);
    LecAssignment lecs = opt.lecs ? *opt.lecs : random_invariant_lecs(net, f, rng);
    HatTransferSet h = hat_transfer(transfer_matrices(net, lecs, fptr), dft);
    Grid m(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m[i].push_back(h.block(i, j));
    rep.field = fptr;
    try {
      Triple v = scheme1_precoders(m, nprime, seed_vector(f, n, opt));
      Verification ver = verify(m, v, rep.dims, false);
      rep.ranks = ver.ranks;
      rep.alignment = ver.alignment && (m[1][0] * v[1] == m[2][0] * v[2]);
      singular_run = 0;
      if (!ver.pass() || !rep.alignment) continue;

      std::vector<std::vector<FieldElement>> sym(3), x(3);
      for (std::size_t i = 0; i < 3; ++i) {
        sym[i] = draw_vector(f, rep.dims[i], rng);
        x[i] = v[i] * sym[i];
      }
      auto y = cp_pipeline(net, lecs, dft, x);
      rep.symbols = rep.symbol_errors = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        rep.symbols += sym[j].size();
        rep.symbol_errors += count_errors(sym[j], recover(m, v, j, false, y[j]));
      }
      rep.decoded = rep.symbol_errors == 0;
      if (rep.decoded) {
        rep.verdict = PbnaVerdict::Feasible;
        rep.witness = lecs;
        return rep;
      }
    } catch (const SingularMatrix&) {
      if (!opt.lecs && !opt.field && ++singular_run >= 4 && bits < 48) {
        bits += 8;
        fptr = sampling_field(base, n, bits);
        singular_run = 0;
      }
    }
  }

  rep.reduced = scheme3_reduced(inst);
  if (rep.reduced->verdict == PbnaVerdict::Infeasible) {
    rep.verdict = PbnaVerdict::Infeasible;
    rep.reason = "reduced conditions: some b_i lies in S";
  } else {
    rep.reason = "no sampled LEC assignment met the rank and decode conditions";
  }
  return rep;
}

RationalMatrix alignment_product(const PbnaInstance& inst, std::size_t n, int which) {
  auto m = time_varying_block_matrix_symbolic(inst.net(), n);
  switch (which) {
    case 1: return m[0][0].inverse() * m[1][0] * m[1][2].inverse() * m[0][2];
    case 2: return m[0][1].inverse() * m[1][1] * m[1][2].inverse() * m[0][2];
    case 3: return m[0][2].inverse() * m[2][2] * m[2][1].inverse() * m[0][1];
    default: throw std::invalid_argument("alignment product index must be 1, 2 or 3");
  }
}

namespace {

// perm[original label] = canonical label.
using Perm = std::array<std::size_t, 3>;

struct TvSetup {
  std::size_t n;
  std::array<std::size_t, 3> dims;  // canonical labels
  Perm perm{0, 1, 2};
  bool s2t1_zero = false;
  std::string strategy;
};

Grid canonical_grid(const std::vector<std::vector<FieldMatrix>>& raw, const Perm& perm) {
  Grid g(3);
  for (auto& row : g) row.assign(3, raw[0][0]);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) g[perm[i]][perm[j]] = raw[i][j];
  return g;
}

std::optional<Triple> scheme2_precoders(const Grid& m, const TvSetup& s, const PbnaOptions& opt,
                                        std::mt19937_64& rng, std::size_t& g_nonzero) {
  const GaloisField& f = m[0][0].field();
  const auto [n1, n2, n3] = s.dims;
  g_nonzero = 0;
  if (s.s2t1_zero) {
    FieldMatrix v1 = draw_matrix(f, s.n, n1, rng);
    FieldMatrix a = draw_matrix(f, n1, n2, rng), b = draw_matrix(f, n1, n3, rng);
    return Triple{v1, inverse(m[1][2]) * m[0][2] * v1 * a, inverse(m[2][1]) * m[0][1] * v1 * b};
  }
  const FieldMatrix u = u_matrix(m);
  FieldMatrix v1(f, s.n, n1), a(f, n1, n2), b(f, n1, n3), c(f, n2, n3);
  if (s.strategy == "krylov") {
    v1 = krylov(u, seed_vector(f, s.n, opt), 0, n1);
    a = selector(f, n1, 0, n2);
    b = selector(f, n1, 1, n3);
    c = selector(f, n2, 0, n3);
  } else {
    FieldMatrix w(f, s.n, 1);
    for (std::size_t r = 0; r < s.n; ++r) w(r, 0) = draw(f, rng, true);
    v1 = krylov(u, w, 0, n1);
    a = draw_matrix(f, n1, n2, rng);
    for (std::size_t col = 0; col < n2; ++col) a(n1 - 1, col) = f.zero();
    c = draw_matrix(f, n2, n3, rng);
    const FieldMatrix target = u * v1 * a * c;
    for (std::size_t col = 0; col < n3; ++col) {
      auto sol = solve_full_column_rank(v1, target.col(col));
      if (sol) b.set_block(0, col, FieldMatrix::column(f, *sol));
    }
  }
  const FieldMatrix g = u * v1 * a * c - v1 * b;
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t col = 0; col < g.cols(); ++col) g_nonzero += !g(r, col).is_zero();
  if (g_nonzero) return std::nullopt;
  return Triple{v1, inverse(m[1][2]) * m[0][2] * v1 * a, inverse(m[2][1]) * m[0][1] * v1 * b};
}

PbnaReport run_time_varying(const PbnaInstance& inst, const TvSetup& s, const PbnaOptions& opt, PbnaReport rep) {
  const CompiledNetwork& net = inst.net();
  const GaloisField& base = inst.field();
  rep.n = s.n;
  rep.wire_slots = s.n + static_cast<std::size_t>(net.d_max());
  for (std::size_t i = 0; i < 3; ++i) {
    rep.dims[i] = s.dims[s.perm[i]];
    rep.rates[i] = static_cast<double>(rep.dims[i]) / static_cast<double>(s.n);
  }

  unsigned bits = 16, singular_run = 0;
  FieldPtr fptr = opt.lecs ? field_ptr(base) : (opt.field ? opt.field : sampling_field(base, 0, bits));
  const unsigned trials = opt.lecs ? 1 : opt.trials;
  for (unsigned trial = 0; trial < trials; ++trial) {
    ++rep.trials_run;
    auto rng = trial_rng(opt.seed, trial);
    const GaloisField& f = *fptr;
    rep.field = fptr;
    LecAssignment lecs = opt.lecs ? *opt.lecs : random_varying_lecs(net, f, s.n, rng);
    try {
      Grid m = canonical_grid(time_varying_block_matrix(net, lecs, s.n, fptr), s.perm);
      auto v = scheme2_precoders(m, s, opt, rng, rep.g_nonzero);
      singular_run = 0;
      if (!v) continue;
      Verification ver = verify(m, *v, s.dims, s.s2t1_zero);
      rep.ranks = ver.ranks;
      rep.alignment = ver.alignment;
      if (!ver.pass()) continue;

      std::vector<std::vector<FieldElement>> sym(3), x(3);
      for (std::size_t c = 0; c < 3; ++c) sym[c] = draw_vector(f, s.dims[c], rng);
      for (std::size_t i = 0; i < 3; ++i) x[i] = (*v)[s.perm[i]] * sym[s.perm[i]];
      auto y = cp_pipeline_plain(net, lecs, f, s.n, x);
      rep.symbols = rep.symbol_errors = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t c = s.perm[j];
        rep.symbols += sym[c].size();
        rep.symbol_errors += count_errors(sym[c], recover(m, *v, c, s.s2t1_zero, y[j]));
      }
      rep.decoded = rep.symbol_errors == 0;
      if (rep.decoded) {
        rep.verdict = PbnaVerdict::Feasible;
        rep.witness = lecs;
        return rep;
      }
    } catch (const SingularMatrix&) {
      if (!opt.lecs && !opt.field && ++singular_run >= 4 && bits < 48) {
        bits += 8;
        fptr = sampling_field(base, 0, bits);
        singular_run = 0;
      }
    }
  }
  rep.reason = "no sampled LEC schedule met the alignment, rank and decode conditions";
  return rep;
}

}  // namespace

PbnaReport scheme2_check(const PbnaInstance& inst, std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n,
                         const PbnaOptions& opt) {
  require(n1 >= n2 && n2 >= n3 && n3 >= 1, "scheme 2 needs n1 >= n2 >= n3 >= 1");
  require(opt.strategy == "krylov" || opt.strategy == "free", "unknown strategy '" + opt.strategy + "'");
  if (opt.strategy == "krylov") require(n1 > n3, "krylov strategy needs n1 > n3");
  if (inst.zero_pair()) throw std::invalid_argument("min-cut violation: use the min-cut-0 variant");
  PbnaReport rep;
  rep.scheme = "2";
  if (n1 + n2 > n || n1 + n3 > n) {
    rep.n = n;
    rep.dims = {n1, n2, n3};
    rep.verdict = PbnaVerdict::Infeasible;
    rep.reason = "n1 + n2 > n or n1 + n3 > n";
    return rep;
  }
  TvSetup s{n, {n1, n2, n3}, {0, 1, 2}, false, opt.strategy};
  rep = run_time_varying(inst, s, opt, rep);
  if (rep.verdict == PbnaVerdict::Feasible) return rep;

  static const char* names[] = {"", "M11^-1 M21 M23^-1 M13", "M12^-1 M22 M23^-1 M13", "M13^-1 M33 M32^-1 M12"};
  for (int which = 1; which <= 3; ++which) {
    try {
      if (alignment_product(inst, n, which).is_identity()) {
        rep.verdict = PbnaVerdict::Infeasible;
        rep.reason = std::string(names[which]) + " = I for every LEC schedule";
        return rep;
      }
    } catch (const std::exception&) {
    }
  }
  return rep;
}

PbnaReport scheme2_mincut0_check(const PbnaInstance& inst, std::pair<std::size_t, std::size_t> zero,
                                 std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n,
                                 const PbnaOptions& opt) {
  const auto [zs, zt] = zero;
  require(zs < 3 && zt < 3 && zs != zt, "zero pair must name a cross source-sink pair");
  require(n1 >= 1 && n2 >= 1 && n3 >= 1, "dimensions must be positive");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const bool declared = i == zs && j == zt;
      if (declared != (inst.min_cut(i, j) == 0))
        throw std::invalid_argument("min-cut table contradicts the declared zero pair");
    }
  Perm perm{};
  perm[zs] = 1;
  perm[zt] = 0;
  perm[3 - zs - zt] = 2;
  const std::array<std::size_t, 3> given{n1, n2, n3};
  std::array<std::size_t, 3> dims{};
  for (std::size_t i = 0; i < 3; ++i) dims[perm[i]] = given[i];
  require(dims[0] >= dims[1] && dims[0] >= dims[2],
          "source " + std::to_string(zt + 1) + " needs at least as many symbols as each other source");

  PbnaReport rep;
  rep.scheme = "2z";
  if (dims[0] + dims[1] > n || dims[0] + dims[2] > n) {
    rep.n = n;
    rep.dims = given;
    rep.verdict = PbnaVerdict::Infeasible;
    rep.reason = "dimension bound exceeds n";
    return rep;
  }
  TvSetup s{n, dims, perm, true, "free"};
  return run_time_varying(inst, s, opt, rep);
}

PbnaReport scheme3_pipeline(const PbnaInstance& inst, std::size_t nprime, std::size_t k, const PbnaOptions& opt) {
  const CompiledNetwork& net = inst.net();
  const GaloisField& base = inst.field();
  require(nprime >= 1 && k >= 1, "n' and k must be positive");
  const std::size_t blocks = 2 * nprime + 1;
  PbnaReport rep;
  rep.scheme = "3";
  rep.n = blocks;
  rep.k = k;
  rep.dims = {(nprime + 1) * k, nprime * k, nprime * k};
  rep.rates = scheme1_rates(nprime);
  rep.wire_slots = blocks * (k + static_cast<std::size_t>(net.d_max()));
  rep.reduced = scheme3_reduced(inst);
  if (rep.reduced->verdict == PbnaVerdict::Infeasible) {
    rep.verdict = PbnaVerdict::Infeasible;
    rep.reason = "infeasible by reduced conditions";
    return rep;
  }

  FieldPtr fptr = opt.field ? opt.field : (opt.lecs ? field_ptr(base) : sampling_field(base, k, 16));
  if ((fptr->order() - 1) % k != 0) {
    auto ext = min_extension_for_order(base.p(), k);
    throw std::invalid_argument("k = " + std::to_string(k) + " does not divide " + std::to_string(fptr->order()) +
                                " - 1" + (ext ? "; smallest field with such roots has degree " + std::to_string(*ext)
                                              : std::string()));
  }
  const GaloisField& f = *fptr;
  rep.field = fptr;
  DftCtx dft = make_dft(f, k);
  const unsigned trials = opt.lecs ? 1 : opt.trials;
  for (unsigned trial = 0; trial < trials; ++trial) {
    ++rep.trials_run;
    auto rng = trial_rng(opt.seed, trial);
    LecAssignment lecs = opt.lecs ? *opt.lecs : random_block_lecs(net, f, k, blocks, rng);
    BlockHatSet hs = block_cp_pipeline(net, lecs, dft);
    std::vector<Triple> v;
    std::vector<Grid> grids;
    rep.failing_bins.clear();
    rep.ranks.clear();
    rep.alignment = true;
    for (std::size_t q = 0; q < k; ++q) {
      Grid m(3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m[i].push_back(hs.m[i][j][q]);
      try {
        Triple vq = scheme1_precoders(m, nprime, seed_vector(f, blocks, opt));
        Verification ver = verify(m, vq, {nprime + 1, nprime, nprime}, false);
        if (rep.ranks.empty()) rep.ranks = ver.ranks;
        for (std::size_t c = 0; c < 3; ++c) rep.ranks[c].rank = std::min(rep.ranks[c].rank, ver.ranks[c].rank);
        rep.alignment = rep.alignment && ver.alignment && m[1][0] * vq[1] == m[2][0] * vq[2];
        if (!ver.pass()) rep.failing_bins.push_back(q);
        v.push_back(vq);
      } catch (const SingularMatrix&) {
        rep.failing_bins.push_back(q);
        v.push_back(Triple{m[0][0], m[0][0], m[0][0]});
      }
      grids.push_back(std::move(m));
    }
    if (!rep.failing_bins.empty() || !rep.alignment) continue;

    // sym[i][q] holds the bin-q symbols of source i.
    std::vector<std::vector<std::vector<FieldElement>>> sym(3);
    std::vector<std::vector<std::vector<FieldElement>>> x(3, std::vector<std::vector<FieldElement>>(
                                                                 blocks, std::vector<FieldElement>(k, f.zero())));
    const std::array<std::size_t, 3> per_bin{nprime + 1, nprime, nprime};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t q = 0; q < k; ++q) {
        sym[i].push_back(draw_vector(f, per_bin[i], rng));
        scatter_bin(x[i], q, 1, k, v[q][i] * sym[i][q]);
      }
    auto y = block_cp_run(net, lecs, dft, x);
    rep.symbols = rep.symbol_errors = 0;
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t q = 0; q < k; ++q) {
        rep.symbols += sym[j][q].size();
        rep.symbol_errors += count_errors(sym[j][q], recover(grids[q], v[q], j, false, bin_vector(y[j], q, 1, k)));
      }
    rep.decoded = rep.symbol_errors == 0;
    if (rep.decoded) {
      rep.verdict = PbnaVerdict::Feasible;
      rep.witness = lecs;
      return rep;
    }
  }
  rep.reason = "no sampled block schedule met the per-bin rank and decode conditions";
  return rep;
}

}  // namespace delaynet
