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

#include "delaynet/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace delaynet {

std::vector<int> demanded_processes(const CompiledNetwork& net, std::size_t sink) {
  std::vector<int> out;
  const NetworkSpec& s = net.spec();
  for (const auto& c : s.connections) {
    if (s.sink_index(c.sink) != sink) continue;
    const std::size_t i = s.source_index(c.source);
    if (c.process < 0 || c.process >= net.mu(i))
      throw NetworkError("connection " + c.source + "->" + c.sink + ": process " + std::to_string(c.process) +
                         " out of range");
    int pid = net.process_id(i, c.process);
    if (std::find(out.begin(), out.end(), pid) == out.end()) out.push_back(pid);
  }
  return out;
}

namespace {

void require_square(const CompiledNetwork& net, std::size_t sink, std::size_t demands) {
  if (demands != static_cast<std::size_t>(net.nu(sink)))
    throw NetworkError("sink " + net.spec().sinks[sink].node + " has " + std::to_string(net.nu(sink)) +
                       " outputs but demands " + std::to_string(demands) + " processes");
}

std::size_t local_of(const CompiledNetwork& net, int pid) {
  const std::size_t i = net.process_source(pid);
  return static_cast<std::size_t>(pid - net.process_id(i, 0));
}

}  // namespace

PolyMatrix demanded_matrix(const CompiledNetwork& net, const TransferSet& ts, std::size_t sink) {
  auto dem = demanded_processes(net, sink);
  require_square(net, sink, dem.size());
  PolyMatrix m(*ts.field, static_cast<std::size_t>(net.nu(sink)), dem.size());
  for (std::size_t k = 0; k < dem.size(); ++k) {
    const std::size_t i = net.process_source(dem[k]);
    const std::size_t p = local_of(net, dem[k]);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, k) = ts.raw[i][sink](r, p);
  }
  return m;
}

FeasibilityReport check_classical(const CompiledNetwork& net, const LecAssignment& lecs) {
  TransferSet ts = transfer_matrices(net, lecs);
  FeasibilityReport rep;
  rep.field = ts.field;
  DelayPoly f = DelayPoly::constant(ts.field->one());
  for (std::size_t j = 0; j < net.num_sinks(); ++j) {
    auto dem = demanded_processes(net, j);
    std::set<int> wanted(dem.begin(), dem.end());
    for (std::size_t i = 0; i < net.num_sources(); ++i) {
      for (int p = 0; p < net.mu(i); ++p) {
        if (wanted.count(net.process_id(i, p))) continue;
        for (int o = 0; o < net.nu(j); ++o) {
          const DelayPoly& e = ts.raw[i][j](static_cast<std::size_t>(o), static_cast<std::size_t>(p));
          for (std::size_t d = 0; d < e.coeffs().size(); ++d)
            if (!e.coeffs()[d].is_zero()) rep.violations.push_back({i, j, p, o, d});
        }
      }
    }
    DelayPoly det = polymat_det(demanded_matrix(net, ts, j));
    rep.invertible.push_back(!det.is_zero());
    rep.invertibility = rep.invertibility && !det.is_zero();
    f = f * det;
    rep.determinants.push_back(std::move(det));
  }
  rep.zero_interference = rep.violations.empty();
  rep.f_poly = f;
  rep.verdict = rep.zero_interference && rep.invertibility ? "solvable" : "not-solvable";
  return rep;
}

FeasibilityReport check_classical_symbolic(const CompiledNetwork& net, const RandomTestOptions& opt) {
  SymbolicTransferSet st = symbolic_transfer(net);
  FeasibilityReport rep;
  rep.field = st.field;
  FieldPtr ef = opt.eval_field ? opt.eval_field : default_eval_field(*st.field);
  std::vector<std::vector<std::vector<const SymDelayPoly*>>> demanded(net.num_sinks());
  std::set<SymbolId> vars;
  unsigned max_deg = 0;
  for (std::size_t j = 0; j < net.num_sinks(); ++j) {
    auto dem = demanded_processes(net, j);
    require_square(net, j, dem.size());
    std::set<int> wanted(dem.begin(), dem.end());
    for (std::size_t i = 0; i < net.num_sources(); ++i) {
      for (int p = 0; p < net.mu(i); ++p) {
        if (wanted.count(net.process_id(i, p))) continue;
        for (int o = 0; o < net.nu(j); ++o) {
          const SymDelayPoly& e = st.raw[i][j][static_cast<std::size_t>(o)][static_cast<std::size_t>(p)];
          for (std::size_t d = 0; d < e.coeffs.size(); ++d)
            if (!e.coeffs[d].is_zero()) rep.violations.push_back({i, j, p, o, d});
        }
      }
    }
    demanded[j].resize(static_cast<std::size_t>(net.nu(j)));
    for (std::size_t r = 0; r < demanded[j].size(); ++r) {
      for (int pid : dem) {
        const SymDelayPoly& e = st.raw[net.process_source(pid)][j][r][local_of(net, pid)];
        demanded[j][r].push_back(&e);
        for (const auto& c : e.coeffs) {
          for (SymbolId v : c.variables()) vars.insert(v);
          max_deg = std::max(max_deg, c.total_degree());
        }
      }
    }
  }
  rep.zero_interference = rep.violations.empty();
  const std::vector<SymbolId> var_list(vars.begin(), vars.end());
  double worst = 0.0;
  for (std::size_t j = 0; j < net.num_sinks(); ++j) {
    const std::size_t nu = demanded[j].size();
    bool nonzero = false;
    for (unsigned trial = 0; trial < std::max(1u, opt.trials) && !nonzero; ++trial) {
      Assignment pt = random_point(var_list, *ef, opt.seed, trial, j);
      PolyMatrix m(*ef, nu, nu);
      for (std::size_t r = 0; r < nu; ++r) {
        for (std::size_t c = 0; c < nu; ++c) {
          DelayPoly e(*ef);
          const auto& coeffs = demanded[j][r][c]->coeffs;
          for (std::size_t d = 0; d < coeffs.size(); ++d) e.add_term(coeffs[d].evaluate(pt, *ef), d);
          m(r, c) = e;
        }
      }
      nonzero = !polymat_det(m).is_zero();
    }
    rep.invertible.push_back(nonzero);
    rep.invertibility = rep.invertibility && nonzero;
    if (!nonzero) {
      double per = std::min(1.0, static_cast<double>(max_deg * nu) / static_cast<double>(ef->order()));
      worst = std::max(worst, std::pow(per, std::max(1u, opt.trials)));
    }
  }
  rep.failure_bound = worst;
  rep.verdict = rep.zero_interference && rep.invertibility ? "solvable" : "not-solvable";
  rep.note = rep.invertibility ? "every determinant nonzero at a sampled point (exact)"
                               : "a determinant vanished at every sampled point; failure_bound bounds a wrong verdict";
  return rep;
}

DelayPoly f_of_D(const CompiledNetwork& net, const LecAssignment& lecs) {
  TransferSet ts = transfer_matrices(net, lecs);
  DelayPoly f = DelayPoly::constant(ts.field->one());
  for (std::size_t j = 0; j < net.num_sinks(); ++j) f = f * polymat_det(demanded_matrix(net, ts, j));
  return f;
}

FeasibilityReport transform_feasible(const CompiledNetwork& net, const LecAssignment& lecs, std::size_t n,
                                     const FieldElement& alpha) {
  if (!alpha.valid() || alpha.is_zero() || element_order(alpha) != n)
    throw std::invalid_argument("alpha does not have order " + std::to_string(n));
  FeasibilityReport rep = check_classical(net, lecs);
  rep.n = n;
  rep.alpha = alpha;
  rep.field = field_ptr(alpha.field());
  bool all = true;
  for (std::size_t t = 0; t < n; ++t) {
    FieldElement v = rep.f_poly->eval(alpha.pow(static_cast<std::int64_t>(t)));
    all = all && !v.is_zero();
    rep.f_at_points.emplace(t, v);
  }
  rep.verdict = rep.zero_interference && all ? "solvable-transform" : "not-transform-feasible";
  return rep;
}

namespace {

std::vector<std::uint64_t> divisors(std::uint64_t v) {
  std::vector<std::uint64_t> d = {1};
  std::uint64_t rest = v;
  for (std::uint64_t p : prime_factors(v)) {
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    const std::size_t base = d.size();
    std::uint64_t pw = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pw *= p;
      for (std::size_t i = 0; i < base; ++i) d.push_back(d[i] * pw);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

FeasibilityReport exists_transform_code(const CompiledNetwork& net, const LecAssignment& lecs,
                                        double target_rate_loss, const SearchBudget& budget) {
  FeasibilityReport rep = check_classical(net, lecs);
  if (!rep.zero_interference || !rep.invertibility) return rep;
  const DelayPoly& f = *rep.f_poly;
  if (divides_Dminus1(f)) {
    rep.verdict = "impossible";
    rep.note = "f(1) = 0, so (D - 1) divides f(D)";
    rep.f_at_points.emplace(0, f.eval(f.field().one()));
    return rep;
  }
  const GaloisField& base = net.field();
  const double dmax = static_cast<double>(net.d_max());
  std::set<std::uint64_t> tried;
  for (unsigned b = base.m(); b <= budget.max_b; b += base.m()) {
    const double bits = static_cast<double>(b) * std::log2(static_cast<double>(base.p()));
    if (bits > 62.0) break;
    std::uint64_t q = 1;
    for (unsigned k = 0; k < b; ++k) q *= base.p();
    FieldPtr ext;
    for (std::uint64_t n : divisors(q - 1)) {
      if (n > budget.max_n) break;
      if (static_cast<double>(n) <= dmax || dmax / static_cast<double>(n) > target_rate_loss) continue;
      // The n-th roots of unity are the same set in every larger field.
      if (!tried.insert(n).second) continue;
      if (!ext) ext = b == base.m() ? field_ptr(base) : make_field(base.p(), b);
      FieldElement alpha = nth_root_of_unity(*ext, n);
      bool ok = true;
      std::map<std::size_t, FieldElement> pts;
      for (std::uint64_t t = 0; t < n && ok; ++t) {
        FieldElement v = f.eval(alpha.pow(static_cast<std::int64_t>(t)));
        ok = !v.is_zero();
        pts.emplace(t, v);
      }
      if (!ok) continue;
      rep.verdict = "solvable-transform";
      rep.b = b;
      rep.n = n;
      rep.alpha = alpha;
      rep.field = ext;
      rep.f_at_points = std::move(pts);
      return rep;
    }
  }
  rep.verdict = "budget-exhausted";
  rep.note = "no (b, n) with b <= " + std::to_string(budget.max_b) + ", n <= " + std::to_string(budget.max_n) +
             " and d_max/n <= " + std::to_string(target_rate_loss);
  return rep;
}

std::vector<std::vector<FieldElement>> decode_demands(const CompiledNetwork& net, const HatTransferSet& hat,
                                                      std::size_t sink, const std::vector<FieldElement>& y) {
  auto dem = demanded_processes(net, sink);
  require_square(net, sink, dem.size());
  const std::size_t n = hat.dft.n, nu = static_cast<std::size_t>(net.nu(sink));
  if (y.size() != n * nu) throw std::invalid_argument("decode_demands: length mismatch");
  const GaloisField& f = hat.dft.field();
  std::vector<std::vector<FieldElement>> out(dem.size(), std::vector<FieldElement>(n, f.zero()));
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t t = n - 1 - p;
    FieldMatrix m(f, nu, nu);
    for (std::size_t k = 0; k < dem.size(); ++k) {
      const FieldMatrix& h = hat.at(net.process_source(dem[k]), sink, t);
      const std::size_t c = local_of(net, dem[k]);
      for (std::size_t r = 0; r < nu; ++r) m(r, k) = h(r, c);
    }
    std::vector<FieldElement> rhs(y.begin() + static_cast<long>(p * nu), y.begin() + static_cast<long>((p + 1) * nu));
    auto x = solve(m, rhs);
    for (std::size_t k = 0; k < dem.size(); ++k) out[k][p] = x[k];
  }
  return out;
}

nlohmann::json FeasibilityReport::to_json() const {
  using nlohmann::json;
  json j;
  j["verdict"] = verdict;
  j["zero_interference"] = {{"pass", zero_interference}, {"violations", json::array()}};
  for (const auto& v : violations)
    j["zero_interference"]["violations"].push_back(
        {{"source", v.source}, {"sink", v.sink}, {"process", v.process}, {"output", v.output}, {"degree", v.degree}});
  j["invertibility"] = {{"pass", invertibility}, {"per_sink", invertible}};
  if (!determinants.empty()) {
    j["determinants"] = json::array();
    for (const auto& d : determinants) j["determinants"].push_back(d.to_string());
  }
  if (f_poly) j["f"] = f_poly->to_string();
  if (!f_at_points.empty()) {
    j["f_at_points"] = json::object();
    for (const auto& [t, v] : f_at_points) j["f_at_points"][std::to_string(t)] = format_element(v);
  }
  if (b) j["b"] = *b;
  if (n) j["n"] = *n;
  if (alpha) j["alpha"] = format_element(*alpha);
  if (field) j["field"] = field->descriptor();
  if (failure_bound > 0) j["failure_bound"] = failure_bound;
  if (!note.empty()) j["note"] = note;
  return j;
}

}  // namespace delaynet
