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


#include <gtest/gtest.h>

#include <random>

#include "delaynet/pbna.hpp"
#include "delaynet/transform.hpp"
#include "test_support.hpp"

using namespace delaynet;
using namespace delaynet::testing;
using nlohmann::json;

namespace {

PbnaInstance load(const std::string& name) { return PbnaInstance(load_network(fixture(name))); }

LecAssignment load_lecs(const std::string& name, const PbnaInstance& inst) {
  return LecAssignment::load(fixture(name), inst.field());
}

// Every pair (i, j) joined by its own edge "x<i><j>"; delays[i][j] per edge.
json direct_json(const std::string& field, const std::array<std::array<int, 3>, 3>& delays,
                 const std::map<std::string, std::string>& rename = {}) {
  json j = {{"field", field}, {"edges", json::array()}, {"sources", {"S1", "S2", "S3"}},
            {"sinks", {"T1", "T2", "T3"}},
            {"connections", json::array({json::array({"S1", "T1", 0}), json::array({"S2", "T2", 0}),
                                         json::array({"S3", "T3", 0})})}};
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 3; ++t) {
      std::string sym = "x" + std::to_string(i + 1) + std::to_string(t + 1);
      if (rename.count(sym)) sym = rename.at(sym);
      j["edges"].push_back({{"tail", "S" + std::to_string(i + 1)}, {"head", "T" + std::to_string(t + 1)},
                            {"delay", delays[i][t]}, {"lec", sym}});
    }
  return j;
}

// Sources reach relay R_j, which alone feeds T_j. `drop` removes S_i -> R_j.
json relay_json(const std::string& field, const std::array<std::array<int, 3>, 3>& delays,
                std::optional<std::pair<int, int>> drop = std::nullopt) {
  json j = {{"field", field}, {"edges", json::array()}, {"sources", {"S1", "S2", "S3"}},
            {"sinks", {"T1", "T2", "T3"}},
            {"connections", json::array({json::array({"S1", "T1", 0}), json::array({"S2", "T2", 0}),
                                         json::array({"S3", "T3", 0})})}};
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 3; ++r) {
      if (drop && drop->first == i && drop->second == r) continue;
      j["edges"].push_back({{"tail", "S" + std::to_string(i + 1)}, {"head", "R" + std::to_string(r + 1)},
                            {"delay", delays[i][r]}, {"lec", "a" + std::to_string(i + 1) + std::to_string(r + 1)}});
    }
  for (int r = 0; r < 3; ++r)
    j["edges"].push_back({{"tail", "R" + std::to_string(r + 1)}, {"head", "T" + std::to_string(r + 1)},
                          {"lec", "r" + std::to_string(r + 1)}});
  return j;
}

constexpr std::array<std::array<int, 3>, 3> kUnit{{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}};

}  // namespace

TEST(PbnaInstanceTest, Validation) {
  PbnaInstance ex2 = load("ex2.json");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ex2.min_cut(i, i), 1);
  EXPECT_FALSE(ex2.zero_pair());
  EXPECT_THROW(PbnaInstance(load_network(fixture("fig2.json"))), NetworkError);

  json bad = direct_json("2", kUnit);
  bad["connections"][0] = json::array({"S2", "T1", 0});
  bad["connections"][1] = json::array({"S1", "T2", 0});
  EXPECT_THROW(PbnaInstance(parse_network(bad)), NetworkError);

  PbnaInstance z(parse_network(relay_json("2^4", kUnit, std::pair{1, 0})));
  ASSERT_TRUE(z.zero_pair());
  EXPECT_EQ(*z.zero_pair(), (std::pair<std::size_t, std::size_t>{1, 0}));
}

TEST(Scheme1, Example2PaperLecs) {
  PbnaInstance inst = load("ex2.json");
  PbnaOptions opt;
  opt.lecs = load_lecs("ex2-lecs.json", inst);
  PbnaReport rep = scheme1_check(inst, 3, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << rep.to_json().dump(2);
  EXPECT_EQ(rep.field->order(), 64u);
  ASSERT_EQ(rep.ranks.size(), 3u);
  for (const auto& r : rep.ranks) EXPECT_EQ(r.rank, 7u) << r.name;
  EXPECT_TRUE(rep.alignment);
  EXPECT_EQ(rep.dims, (std::array<std::size_t, 3>{4, 3, 3}));
  EXPECT_EQ(rep.symbols, 10u);
  EXPECT_EQ(rep.symbol_errors, 0u);
  EXPECT_NEAR(rep.rates[0], 4.0 / 7, 1e-12);
  EXPECT_EQ(rep.wire_slots, 7u + 2u);
}

TEST(Scheme1, RandomLecsAndRates) {
  PbnaInstance inst = load("ex2.json");
  for (std::size_t np : {1, 2, 3}) {
    PbnaOptions opt;
    opt.seed = 40 + np;
    opt.trials = 8;
    PbnaReport rep = scheme1_check(inst, np, opt);
    EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << np;
    const double n = 2.0 * np + 1;
    EXPECT_NEAR(rep.rates[0], (np + 1) / n, 1e-12);
    EXPECT_NEAR(rep.rates[1], np / n, 1e-12);
    EXPECT_NEAR(rep.rates[2], np / n, 1e-12);
    EXPECT_EQ(rep.symbol_errors, 0u);
    EXPECT_GE(rep.field->order(), 1u << 16);
  }
}

TEST(Scheme1, Example3Infeasible) {
  PbnaInstance inst = load("ex3.json");
  PbnaOptions opt;
  opt.trials = 4;
  for (std::size_t np : {1, 2, 3}) {
    PbnaReport rep = scheme1_check(inst, np, opt);
    EXPECT_EQ(rep.verdict, PbnaVerdict::Infeasible) << np;
    ASSERT_TRUE(rep.reduced);
    EXPECT_EQ(rep.reduced->member[0], "1");
    EXPECT_FALSE(rep.witness);
  }
}

TEST(Scheme1, MisplacedInterferenceIsNotFeasible) {
  PbnaInstance inst(parse_network(direct_json("2^4", {{{1, 1, 1}, {2, 1, 1}, {1, 1, 1}}})));
  PbnaOptions opt;
  opt.trials = 4;
  PbnaReport rep = scheme1_check(inst, 2, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Unknown);
  EXPECT_EQ(rep.ranks[0].rank, 3u);
}

TEST(Scheme1, ScalarUIsNotFeasible) {
  // Equal delays everywhere make U a scalar multiple of I.
  PbnaInstance inst(parse_network(direct_json("2^4", kUnit, {{"x31", "x21"}, {"x32", "x12"}, {"x23", "x13"}})));
  PbnaOptions opt;
  opt.trials = 6;
  PbnaReport rep = scheme1_check(inst, 2, opt);
  EXPECT_NE(rep.verdict, PbnaVerdict::Feasible);
  ASSERT_FALSE(rep.ranks.empty());
  EXPECT_LT(rep.ranks[0].rank, 5u);
}

TEST(Scheme1, DirectEdgesWithOffsetDelay) {
  // Delays chosen so that U ~ D and the three interference images land on
  // the powers of D that V1 misses.
  PbnaInstance inst(parse_network(direct_json("2^4", {{{4, 1, 1}, {2, 4, 1}, {1, 1, 3}}})));
  PbnaOptions opt;
  opt.trials = 8;
  PbnaReport rep = scheme1_check(inst, 2, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << rep.to_json().dump(2);
}

TEST(Scheme1, Preconditions) {
  PbnaInstance inst(parse_network(direct_json("3", kUnit)));
  EXPECT_THROW(scheme1_check(inst, 1), std::invalid_argument);  // 3 | 3
  PbnaInstance z(parse_network(relay_json("2^4", kUnit, std::pair{1, 0})));
  EXPECT_THROW(scheme1_check(z, 1), std::invalid_argument);
}

TEST(Reduced, Example3) {
  ReducedReport r = scheme3_reduced(load("ex3.json"));
  EXPECT_EQ(r.verdict, PbnaVerdict::Infeasible);
  EXPECT_EQ(r.member[0], "1");
  EXPECT_EQ(r.b[0], "1");
}

TEST(Reduced, Example2) {
  ReducedReport r = scheme3_reduced(load("ex2.json"));
  EXPECT_EQ(r.verdict, PbnaVerdict::Feasible) << r.to_json().dump(2);
  EXPECT_FALSE(r.eta_constant);
  for (const auto& m : r.member) EXPECT_EQ(m, "");
}

TEST(Reduced, ConstantEta) {
  PbnaInstance inst(parse_network(direct_json("2^4", kUnit, {{"x31", "x21"}, {"x32", "x12"}, {"x23", "x13"}})));
  ReducedReport r = scheme3_reduced(inst);
  EXPECT_TRUE(r.eta_constant);
  EXPECT_EQ(r.verdict, PbnaVerdict::Feasible);
  // Making b1 constant: x11 = x21 gives b1 = x13 / x23 = 1.
  PbnaInstance bad(parse_network(
      direct_json("2^4", kUnit, {{"x31", "x21"}, {"x32", "x12"}, {"x23", "x13"}, {"x11", "x21"}})));
  ReducedReport rb = scheme3_reduced(bad);
  EXPECT_EQ(rb.verdict, PbnaVerdict::Infeasible);
  EXPECT_EQ(rb.member[0], "constant");
}

TEST(Reduced, MembershipOfEta) {
  // M11 = M31 and M32 = M12 make b1 = eta.
  PbnaInstance inst(parse_network(direct_json("2^4", kUnit, {{"x11", "x31"}, {"x32", "x12"}})));
  ReducedReport r = scheme3_reduced(inst);
  EXPECT_FALSE(r.eta_constant);
  EXPECT_EQ(r.member[0], "eta");
  EXPECT_EQ(r.member[1], "");
  EXPECT_EQ(r.verdict, PbnaVerdict::Infeasible);
}

// Reduced-condition infeasibility never coexists with a scheme-1 witness.
TEST(PbnaProperty, ReducedInfeasibleBlocksScheme1) {
  std::mt19937_64 rng(91);
  std::size_t infeasible = 0;
  for (int c = 0; c < 200; ++c) {
    std::array<std::array<int, 3>, 3> d{};
    for (auto& row : d)
      for (auto& x : row) x = std::uniform_int_distribution<int>(1, 3)(rng);
    std::map<std::string, std::string> rename;
    const int pool = std::uniform_int_distribution<int>(3, 9)(rng);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        rename["x" + std::to_string(i) + std::to_string(j)] =
            "g" + std::to_string(std::uniform_int_distribution<int>(0, pool - 1)(rng));
    PbnaInstance inst(parse_network(direct_json("2^4", d, rename)));
    ReducedReport r = scheme3_reduced(inst);
    if (r.verdict != PbnaVerdict::Infeasible) continue;
    ++infeasible;
    PbnaOptions opt;
    opt.trials = 2;
    opt.seed = static_cast<std::uint64_t>(c);
    for (std::size_t np : {1, 2}) {
      PbnaReport rep = scheme1_check(inst, np, opt);
      ASSERT_NE(rep.verdict, PbnaVerdict::Feasible) << "case " << c;
    }
  }
  EXPECT_GT(infeasible, 20u);
}

TEST(Reduced, ZeroPairVariantAndDegenerate) {
  PbnaInstance z(parse_network(relay_json("2^4", kUnit, std::pair{1, 0})));
  ReducedReport r = scheme3_reduced(z);
  EXPECT_EQ(r.variant, "S2-T1 zero");
  EXPECT_EQ(r.verdict, PbnaVerdict::Feasible);
  PbnaInstance d(parse_network(relay_json("2^4", kUnit, std::pair{2, 0})));
  EXPECT_THROW(scheme3_reduced(d), std::invalid_argument);
}

TEST(AlignmentProduct, Example3IsIdentity) {
  PbnaInstance inst = load("ex3.json");
  for (std::size_t n = 3; n <= 8; ++n) EXPECT_TRUE(alignment_product(inst, n, 1).is_identity()) << n;
  EXPECT_FALSE(alignment_product(load("ex4.json"), 8, 1).is_identity());
  EXPECT_THROW(alignment_product(inst, 4, 0), std::invalid_argument);
}

TEST(Scheme2, Example4PublishedLecs) {
  PbnaInstance inst = load("ex4.json");
  PbnaOptions opt;
  opt.lecs = load_lecs("ex4-lecs.json", inst);
  PbnaReport rep = scheme2_check(inst, 5, 3, 3, 8, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << rep.to_json().dump(2);
  EXPECT_EQ(rep.g_nonzero, 0u);
  ASSERT_EQ(rep.ranks.size(), 3u);
  EXPECT_EQ(rep.ranks[0].rank, 8u);
  EXPECT_EQ(rep.ranks[1].rank, 8u);
  EXPECT_EQ(rep.ranks[2].rank, 8u);
  EXPECT_EQ(rep.symbols, 11u);
  EXPECT_EQ(rep.symbol_errors, 0u);
  EXPECT_NEAR(rep.rates[0], 5.0 / 8, 1e-12);
}

TEST(Scheme2, Example4RandomSchedules) {
  PbnaInstance inst = load("ex4.json");
  for (std::string strategy : {"krylov", "free"}) {
    PbnaOptions opt;
    opt.strategy = strategy;
    opt.trials = 8;
    opt.seed = 3;
    PbnaReport rep = scheme2_check(inst, 5, 3, 3, 8, opt);
    EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << strategy << "\n" << rep.to_json().dump(2);
    EXPECT_EQ(rep.g_nonzero, 0u);
  }
}

TEST(Scheme2, Example3Infeasible) {
  PbnaInstance inst = load("ex3.json");
  PbnaOptions opt;
  opt.trials = 3;
  PbnaReport rep = scheme2_check(inst, 3, 2, 2, 6, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Infeasible);
  EXPECT_NE(rep.reason.find("M11^-1 M21 M23^-1 M13"), std::string::npos);
  ASSERT_FALSE(rep.ranks.empty());
  EXPECT_LT(rep.ranks[0].rank, 5u);
}

TEST(Scheme2, DimensionBound) {
  PbnaInstance inst = load("ex4.json");
  PbnaReport rep = scheme2_check(inst, 1, 1, 1, 1, PbnaOptions{.strategy = "free"});
  EXPECT_EQ(rep.verdict, PbnaVerdict::Infeasible);
  EXPECT_EQ(rep.trials_run, 0u);
  EXPECT_THROW(scheme2_check(inst, 2, 3, 1, 8), std::invalid_argument);
  EXPECT_THROW(scheme2_check(inst, 3, 3, 3, 8), std::invalid_argument);  // krylov needs n1 > n3
  EXPECT_THROW(scheme2_check(inst, 4, 3, 3, 8, PbnaOptions{.strategy = "magic"}), std::invalid_argument);
}

TEST(Scheme2MinCut0, RelaySynthetic) {
  PbnaInstance inst(parse_network(relay_json("2^4", {{{1, 2, 1}, {2, 1, 2}, {1, 1, 2}}}, std::pair{1, 0})));
  PbnaOptions opt;
  opt.trials = 8;
  PbnaReport rep = scheme2_mincut0_check(inst, {1, 0}, 1, 1, 1, 3, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << rep.to_json().dump(2);
  EXPECT_EQ(rep.g_nonzero, 0u);
  EXPECT_EQ(rep.ranks[0].name, "[V1, M11^-1 M31 V3]");
  EXPECT_EQ(rep.symbol_errors, 0u);

  PbnaReport big = scheme2_mincut0_check(inst, {1, 0}, 3, 2, 2, 6, opt);
  EXPECT_EQ(big.verdict, PbnaVerdict::Feasible) << big.to_json().dump(2);

  PbnaReport over = scheme2_mincut0_check(inst, {1, 0}, 2, 2, 1, 3, opt);
  EXPECT_EQ(over.verdict, PbnaVerdict::Infeasible);
  EXPECT_THROW(scheme2_mincut0_check(inst, {2, 0}, 1, 1, 1, 3, opt), std::invalid_argument);
}

TEST(Scheme2MinCut0, RelabeledPair) {
  PbnaInstance inst(parse_network(relay_json("2^4", {{{1, 2, 1}, {2, 1, 2}, {1, 1, 2}}}, std::pair{0, 2})));
  PbnaOptions opt;
  opt.trials = 8;
  // Relabeled, S3 plays the role of S1 and needs the largest share.
  EXPECT_THROW(scheme2_mincut0_check(inst, {0, 2}, 2, 1, 1, 4, opt), std::invalid_argument);
  PbnaReport rep = scheme2_mincut0_check(inst, {0, 2}, 1, 1, 2, 4, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << rep.to_json().dump(2);
  EXPECT_EQ(rep.dims, (std::array<std::size_t, 3>{1, 1, 2}));
  EXPECT_EQ(rep.symbols, 4u);
}

TEST(Scheme3, Example2Pipeline) {
  PbnaInstance inst = load("ex2.json");
  PbnaOptions opt;
  opt.field = make_field(2, 6);
  PbnaReport rep = scheme3_pipeline(inst, 2, 7, opt);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Feasible) << rep.to_json().dump(2);
  ASSERT_TRUE(rep.reduced);
  EXPECT_EQ(rep.reduced->verdict, PbnaVerdict::Feasible);
  EXPECT_TRUE(rep.failing_bins.empty());
  for (const auto& r : rep.ranks) EXPECT_EQ(r.rank, 5u);
  EXPECT_EQ(rep.dims, (std::array<std::size_t, 3>{21, 14, 14}));
  EXPECT_EQ(rep.symbols, 49u);
  EXPECT_EQ(rep.symbol_errors, 0u);
}

TEST(Scheme3, Example3SkippedByReducedConditions) {
  PbnaReport rep = scheme3_pipeline(load("ex3.json"), 2, 7);
  EXPECT_EQ(rep.verdict, PbnaVerdict::Infeasible);
  EXPECT_EQ(rep.reason, "infeasible by reduced conditions");
  EXPECT_EQ(rep.trials_run, 0u);
}

TEST(Scheme3, FieldMustHoldRoots) {
  PbnaOptions opt;
  opt.field = make_field(2, 6);
  EXPECT_THROW(scheme3_pipeline(load("ex2.json"), 1, 5, opt), std::invalid_argument);
}

// Per-bin verdicts at bin q with schedule eps equal bin-0 verdicts with every
// LEC scaled by alpha^q.
TEST(Scheme3Property, BinEquivalenceUnderScaling) {
  PbnaInstance inst(parse_network(relay_json("2^3", kUnit)));
  auto f = make_field(2, 3);
  DftCtx dft = make_dft(*f, 7);
  std::mt19937_64 rng(77);
  std::size_t nontrivial = 0;
  for (int c = 0; c < 200; ++c) {
    LecAssignment eps;
    eps.mode = LecMode::Block;
    eps.geometry = BlockGeometry{7, inst.net().d_max(), -inst.net().d_max(), 3};
    for (const auto& s : inst.net().symbols())
      for (long l = 1; l <= 3; ++l) eps.set(LecSymbol{s, {}, l}, random_element(*f, rng, true));
    const std::size_t q = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    LecAssignment scaled = eps;
    for (auto& [sym, v] : scaled.values)
      if (sym.name[0] == 'a' || sym.name[0] == 'r') v = v * dft.alpha.pow(static_cast<std::int64_t>(q));
    PbnaOptions a, b;
    a.lecs = eps;
    b.lecs = scaled;
    a.field = b.field = f;
    PbnaReport ra = scheme3_pipeline(inst, 1, 7, a);
    PbnaReport rb = scheme3_pipeline(inst, 1, 7, b);
    const bool fail_q = std::count(ra.failing_bins.begin(), ra.failing_bins.end(), q) > 0;
    const bool fail_0 = std::count(rb.failing_bins.begin(), rb.failing_bins.end(), 0u) > 0;
    ASSERT_EQ(fail_q, fail_0) << "case " << c;
    nontrivial += fail_q;
  }
  EXPECT_GT(nontrivial, 0u);
}

TEST(PbnaReportTest, Json) {
  PbnaInstance inst = load("ex2.json");
  PbnaOptions opt;
  opt.lecs = load_lecs("ex2-lecs.json", inst);
  json j = scheme1_check(inst, 1, opt).to_json();
  EXPECT_EQ(j["scheme"], "1");
  EXPECT_EQ(j["n"], 3);
  EXPECT_TRUE(j.contains("ranks"));
  EXPECT_TRUE(j["decode"].contains("symbol_errors"));
}
