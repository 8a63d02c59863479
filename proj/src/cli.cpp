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


#include "delaynet/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "delaynet/feasibility.hpp"
#include "delaynet/netmodel.hpp"
#include "delaynet/onoff.hpp"
#include "delaynet/pbna.hpp"
#include "delaynet/transform.hpp"

#ifndef DELAYNET_VERSION
#define DELAYNET_VERSION "0.0.0"
#endif

namespace delaynet {

namespace {

using nlohmann::json;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FieldIncompatible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct Context {
  NetworkSpec spec;
  json digests = json::array();

  void digest(const std::string& path, const std::string& bytes) {
    digests.push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64(bytes))}});
  }
};

Context load(const RunConfig& cfg) {
  if (cfg.network.empty()) throw InputError("no network file given");
  Context ctx;
  const std::string text = read_file(cfg.network);
  ctx.digest(cfg.network, text);
  FieldPtr override;
  if (!cfg.field.empty()) {
    override = parse_field(cfg.field);
  } else if (const char* env = std::getenv("DELAYNET_FIELD"); env && *env) {
    json probe = json::parse(text, nullptr, false);
    if (probe.is_discarded() || !probe.is_object() || !probe.contains("field")) override = parse_field(env);
  }
  ctx.spec = parse_network_text(text, override);
  return ctx;
}

std::optional<LecAssignment> load_lecs(const RunConfig& cfg, Context& ctx) {
  if (cfg.lecs.empty()) return std::nullopt;
  if (cfg.lecs == "ones") return LecAssignment::all(ctx.spec.field->one());
  const std::string text = read_file(cfg.lecs);
  ctx.digest(cfg.lecs, text);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("'" + cfg.lecs + "' is not valid JSON");
  return LecAssignment::parse(j, *ctx.spec.field);
}

LecAssignment require_lecs(const RunConfig& cfg, Context& ctx) {
  auto l = load_lecs(cfg, ctx);
  return l ? *l : LecAssignment::all(ctx.spec.field->one());
}

void require_transform_length(const GaloisField& f, std::size_t n) {
  if ((f.order() - 1) % n == 0) return;
  auto ext = min_extension_for_order(f.p(), n);
  std::string hint;
  if (ext) {
    const unsigned deg = std::lcm(f.m(), *ext);
    hint = "; smallest extension holding order-" + std::to_string(n) + " elements: --field " + std::to_string(f.p()) +
           "^" + std::to_string(deg);
  }
  throw FieldIncompatible("n = " + std::to_string(n) + " does not divide " + std::to_string(f.order()) + " - 1" + hint);
}

FieldElement pick_alpha(const RunConfig& cfg, const GaloisField& f, std::size_t n) {
  require_transform_length(f, n);
  if (cfg.alpha == "auto") return make_dft(f, n).alpha;
  FieldElement a = parse_element(f, cfg.alpha);
  if (a.is_zero() || element_order(a) != n)
    throw InputError("alpha " + cfg.alpha + " does not have order " + std::to_string(n));
  return a;
}

json poly_grid(const TransferSet& ts) {
  json g = json::array();
  for (std::size_t i = 0; i < ts.raw.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < ts.raw[i].size(); ++j) row.push_back(ts.raw[i][j].to_strings());
    g.push_back(row);
  }
  return g;
}

json compute_transfer(const RunConfig& cfg, Context& ctx) {
  CompiledNetwork net(ctx.spec);
  json r;
  r["d_min"] = net.d_min();
  r["d_max"] = net.d_max();
  auto lecs = load_lecs(cfg, ctx);
  if (!lecs) {
    SymbolicTransferSet st = symbolic_transfer(net);
    json g = json::array();
    for (std::size_t i = 0; i < st.raw.size(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < st.raw[i].size(); ++j) {
        json m = json::array();
        for (const auto& rr : st.raw[i][j]) {
          json line = json::array();
          for (const auto& e : rr) line.push_back(e.to_string());
          m.push_back(line);
        }
        row.push_back(m);
      }
      g.push_back(row);
    }
    r["transfer"] = g;
    r["symbolic"] = true;
    return r;
  }
  TransferSet ts = transfer_matrices(net, *lecs);
  r["transfer"] = poly_grid(ts);
  r["symbolic"] = false;
  try {
    FeasibilityReport fr = check_classical(net, *lecs);
    json dets = json::array();
    for (const auto& d : fr.determinants) dets.push_back(d.to_string());
    r["demanded_determinants"] = dets;
    if (fr.f_poly) r["f"] = fr.f_poly->to_string();
  } catch (const NetworkError& e) {
    r["demanded_determinants_note"] = e.what();
  }
  return r;
}

json check_feasibility(const RunConfig& cfg, Context& ctx) {
  CompiledNetwork net(ctx.spec);
  if (cfg.mode == "classical") {
    auto lecs = load_lecs(cfg, ctx);
    if (lecs) return check_classical(net, *lecs).to_json();
    RandomTestOptions opt;
    opt.seed = cfg.seed;
    opt.trials = cfg.trials;
    return check_classical_symbolic(net, opt).to_json();
  }
  LecAssignment lecs = require_lecs(cfg, ctx);
  if (cfg.mode == "transform") {
    if (!cfg.n) throw InputError("--n is required for transform mode");
    return transform_feasible(net, lecs, *cfg.n, pick_alpha(cfg, net.field(), *cfg.n)).to_json();
  }
  if (cfg.mode == "search") {
    SearchBudget b;
    b.max_b = cfg.max_b;
    b.max_n = cfg.max_n;
    return exists_transform_code(net, lecs, cfg.target, b).to_json();
  }
  throw InputError("unknown mode '" + cfg.mode + "'");
}

std::vector<std::vector<FieldElement>> load_inputs(const std::string& path, Context& ctx, const CompiledNetwork& net,
                                                   std::size_t n) {
  const std::string text = read_file(path);
  ctx.digest(path, text);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError("'" + path + "' must hold a JSON object of source vectors");
  std::vector<std::vector<FieldElement>> x;
  for (std::size_t i = 0; i < net.num_sources(); ++i) {
    const std::string& name = ctx.spec.sources[i].node;
    const std::size_t len = n * static_cast<std::size_t>(net.mu(i));
    if (!j.contains(name) || !j[name].is_array() || j[name].size() != len)
      throw InputError("inputs: source " + name + " needs " + std::to_string(len) + " symbols");
    std::vector<FieldElement> v;
    for (const auto& e : j[name]) {
      if (e.is_number_integer()) v.push_back(net.field().from_integer(e.get<std::int64_t>()));
      else v.push_back(parse_element(net.field(), e.get<std::string>()));
    }
    x.push_back(std::move(v));
  }
  return x;
}

json transform_simulate(const RunConfig& cfg, Context& ctx) {
  CompiledNetwork net(ctx.spec);
  if (!cfg.n) throw InputError("--n is required");
  const std::size_t n = *cfg.n;
  LecAssignment lecs = require_lecs(cfg, ctx);
  DftCtx dft = make_dft(pick_alpha(cfg, net.field(), n));
  const GaloisField& f = dft.field();
  std::vector<std::vector<FieldElement>> x;
  if (!cfg.inputs.empty()) {
    x = load_inputs(cfg.inputs, ctx, net, n);
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::uint64_t> d(0, f.order() - 1);
    for (std::size_t i = 0; i < net.num_sources(); ++i) {
      std::vector<FieldElement> v;
      for (std::size_t k = 0; k < n * static_cast<std::size_t>(net.mu(i)); ++k) v.push_back(f.element(d(rng)));
      x.push_back(std::move(v));
    }
  }
  HatTransferSet hat = hat_transfer(transfer_matrices(net, lecs), dft);
  auto y = cp_pipeline(net, lecs, dft, x);
  auto expect = apply_hat(hat, x);

  // Generation t sits at newest-first position n - 1 - t.
  json residuals = json::array();
  std::size_t worst = 0;
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t bad = 0;
    const std::size_t p = n - 1 - t;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const std::size_t nu = static_cast<std::size_t>(net.nu(j));
      for (std::size_t r = 0; r < nu; ++r) bad += y[j][p * nu + r] != expect[j][p * nu + r];
    }
    residuals.push_back(bad);
    worst = std::max(worst, bad);
  }
  json r;
  r["n"] = n;
  r["alpha"] = format_element(dft.alpha);
  r["residuals"] = residuals;
  r["max_residual"] = worst;

  FeasibilityReport fr = transform_feasible(net, lecs, n, dft.alpha);
  r["verdict"] = fr.verdict;
  if (fr.verdict == "solvable-transform") {
    json errors = json::array();
    for (std::size_t j = 0; j < net.num_sinks(); ++j) {
      auto rec = decode_demands(net, hat, j, y[j]);
      auto dem = demanded_processes(net, j);
      std::size_t e = 0;
      for (std::size_t k = 0; k < dem.size(); ++k) {
        const std::size_t i = net.process_source(dem[k]);
        const std::size_t mu = static_cast<std::size_t>(net.mu(i));
        const std::size_t c = static_cast<std::size_t>(dem[k] - net.process_id(i, 0));
        for (std::size_t p = 0; p < n; ++p) e += rec[k][p] != x[i][p * mu + c];
      }
      errors.push_back(e);
    }
    r["decode_symbol_errors"] = errors;
  }
  return r;
}

std::pair<std::size_t, std::size_t> zero_pair_for(const RunConfig& cfg, const PbnaInstance& inst) {
  if (cfg.zero) {
    if (cfg.zero->first < 1 || cfg.zero->second < 1) throw InputError("--zero takes 1-based source,sink indices");
    return {cfg.zero->first - 1, cfg.zero->second - 1};
  }
  auto z = inst.zero_pair();
  if (!z) throw InputError("scheme 2z needs a cross pair with min-cut 0");
  return *z;
}

json pbna_check(const RunConfig& cfg, Context& ctx) {
  PbnaInstance inst(ctx.spec);
  PbnaOptions opt;
  opt.trials = cfg.trials;
  opt.seed = cfg.seed;
  opt.strategy = cfg.strategy;
  opt.lecs = load_lecs(cfg, ctx);
  if (opt.lecs && opt.lecs->mode == LecMode::Block) {
    opt.lecs->geometry = BlockGeometry{static_cast<long>(cfg.k), inst.net().d_max(), -inst.net().d_max(),
                                       static_cast<long>(2 * cfg.nprime + 1)};
  }
  PbnaReport rep;
  if (cfg.scheme == "1") {
    rep = scheme1_check(inst, cfg.nprime, opt);
  } else if (cfg.scheme == "2") {
    if (!cfg.n) throw InputError("--n is required for scheme 2");
    rep = scheme2_check(inst, cfg.n1, cfg.n2, cfg.n3, *cfg.n, opt);
  } else if (cfg.scheme == "2z") {
    if (!cfg.n) throw InputError("--n is required for scheme 2z");
    rep = scheme2_mincut0_check(inst, zero_pair_for(cfg, inst), cfg.n1, cfg.n2, cfg.n3, *cfg.n, opt);
  } else if (cfg.scheme == "3") {
    if (cfg.k == 0) throw InputError("--k is required for scheme 3");
    rep = scheme3_pipeline(inst, cfg.nprime, cfg.k, opt);
  } else {
    throw InputError("unknown scheme '" + cfg.scheme + "'");
  }
  json r = rep.to_json();
  json cuts = json::array();
  for (std::size_t i = 0; i < 3; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < 3; ++j) row.push_back(inst.min_cut(i, j));
    cuts.push_back(row);
  }
  r["min_cuts"] = cuts;
  return r;
}

json onoff_check(const RunConfig& cfg, Context& ctx) {
  if (cfg.cancellations.empty()) throw InputError("onoff-check needs a cancellations file");
  const std::string text = read_file(cfg.cancellations);
  ctx.digest(cfg.cancellations, text);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("'" + cfg.cancellations + "' is not valid JSON");
  auto rules = parse_cancellations(j, *ctx.spec.field);
  LecAssignment lecs = require_lecs(cfg, ctx);
  ArrivalTable table = build_arrival_table(ctx.spec, rules, lecs);
  OnoffResult res = onoff_feasible(table);
  json r = res.to_json(table);
  r["arrivals"] = table.to_json();
  return r;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunResult evaluate(const RunConfig& cfg) {
  RunResult out;
  try {
    Context ctx = load(cfg);
    json result;
    if (cfg.command == "compute-transfer") result = compute_transfer(cfg, ctx);
    else if (cfg.command == "check-feasibility") result = check_feasibility(cfg, ctx);
    else if (cfg.command == "transform-simulate") result = transform_simulate(cfg, ctx);
    else if (cfg.command == "pbna-check") result = pbna_check(cfg, ctx);
    else if (cfg.command == "onoff-check") result = onoff_check(cfg, ctx);
    else throw InputError("unknown command '" + cfg.command + "'");
    out.report = {{"schema_version", kSchemaVersion},
                  {"tool", "delaynet"},
                  {"version", DELAYNET_VERSION},
                  {"command", cfg.command},
                  {"field", ctx.spec.field->descriptor()},
                  {"seed", cfg.seed},
                  {"inputs", ctx.digests},
                  {"result", result}};
  } catch (const FieldIncompatible& e) {
    out.status = 3;
    out.error = e.what();
  } catch (const std::invalid_argument& e) {
    out.status = 2;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.status = 1;
    out.error = e.what();
  }
  return out;
}

RunResult run(const RunConfig& cfg) {
  RunResult r = evaluate(cfg);
  if (r.status != 0) {
    std::cerr << "error: " << r.error << "\n";
    return r;
  }
  const std::string text = r.report.dump(2) + "\n";
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) {
      r.status = 1;
      r.error = "cannot write '" + cfg.output + "'";
      std::cerr << "error: " << r.error << "\n";
      return r;
    }
    out << text;
  }
  return r;
}

}  // namespace delaynet
