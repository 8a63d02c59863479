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

#include "delaynet/feasibility.hpp"
#include "test_support.hpp"

using namespace delaynet;
using namespace delaynet::testing;
using nlohmann::json;

namespace {

CompiledNetwork parallel_paths() {
  return CompiledNetwork(parse_network_text(R"({
    "field": "2",
    "edges": [
      {"tail": "s", "head": "a"}, {"tail": "a", "head": "t"},
      {"tail": "s", "head": "t"}
    ],
    "sources": ["s"], "sinks": ["t"], "connections": [["s", "t", 0]]
  })"));
}

CompiledNetwork single_edge(const char* lec) {
  json j = {{"field", "2^3"},
            {"edges", json::array({{{"tail", "s"}, {"head", "t"}, {"lec", lec}}})},
            {"sources", {"s"}},
            {"sinks", {"t"}},
            {"connections", json::array({json::array({"s", "t", 0})})}};
  return CompiledNetwork(parse_network(j));
}

// One source feeding every sink; every sink demands it.
json random_unicast_json(const GaloisField& f, std::mt19937_64& rng) {
  RandomNetOptions o;
  o.multi = false;
  json j = random_network_json(f, rng, o);
  j["sources"] = json::array({"n0"});
  for (auto& e : j["edges"])
    if (e["tail"] != "n0" && e.contains("in")) e["in"].erase("x0");
  j["connections"] = json::array();
  for (const auto& t : j["sinks"]) j["connections"].push_back(json::array({"n0", t["node"], 0}));
  return j;
}

}  // namespace

TEST(Classical, TableII) {
  CompiledNetwork net(load_network(fixture("fig2.json")));
  FeasibilityReport rep = check_classical(net, LecAssignment::all(net.field().one()));
  EXPECT_TRUE(rep.zero_interference);
  EXPECT_TRUE(rep.invertibility);
  EXPECT_EQ(rep.verdict, "solvable");
  const std::vector<std::size_t> degrees = {5, 5, 6, 5, 4};
  ASSERT_EQ(rep.determinants.size(), 5u);
  for (std::size_t j = 0; j < 5; ++j)
    EXPECT_EQ(rep.determinants[j], DelayPoly::monomial(net.field().one(), degrees[j])) << "sink " << j;
  EXPECT_EQ(*rep.f_poly, DelayPoly::monomial(net.field().one(), 25));
  EXPECT_EQ(f_of_D(net, LecAssignment::all(net.field().one())), *rep.f_poly);
}

TEST(Classical, Example2FailsZeroInterference) {
  CompiledNetwork net(load_network(fixture("ex2.json")));
  FeasibilityReport rep = check_classical(net, LecAssignment::load(fixture("ex2-lecs.json"), net.field()));
  EXPECT_FALSE(rep.zero_interference);
  EXPECT_EQ(rep.verdict, "not-solvable");
  bool saw = false;
  for (const auto& v : rep.violations) saw = saw || (v.source == 0 && v.sink == 1 && v.degree == 3);
  EXPECT_TRUE(saw);
  EXPECT_FALSE(check_classical_symbolic(net).zero_interference);
}

TEST(Classical, SingleEdge) {
  CompiledNetwork net = single_edge("b^2");
  const GaloisField& f = net.field();
  FeasibilityReport rep = check_classical(net, LecAssignment::all(f.one()));
  EXPECT_EQ(rep.verdict, "solvable");
  EXPECT_EQ(*rep.f_poly, DelayPoly::monomial(f.primitive().pow(2), 1));
}

TEST(Classical, MalformedDemands) {
  json j = {{"field", "2"},
            {"edges", json::array({{{"tail", "s"}, {"head", "t"}}})},
            {"sources", json::array({{{"node", "s"}, {"processes", 2}}})},
            {"sinks", {"t"}},
            {"connections", json::array({json::array({"s", "t", 0}), json::array({"s", "t", 1})})}};
  CompiledNetwork net(parse_network(j));
  EXPECT_THROW(check_classical(net, LecAssignment::all(net.field().one())), NetworkError);
}

TEST(Classical, SymbolicModes) {
  CompiledNetwork fig2(load_network(fixture("fig2.json")));
  FeasibilityReport rep = check_classical_symbolic(fig2);
  EXPECT_EQ(rep.verdict, "solvable");
  // Two equal paths cancel over GF(2) whatever g is.
  CompiledNetwork dead(parse_network_text(R"({
    "field": "2",
    "edges": [
      {"tail": "s", "head": "a", "lec": "g"}, {"tail": "s", "head": "b", "lec": "g"},
      {"tail": "a", "head": "t"}, {"tail": "b", "head": "t"}
    ],
    "sources": ["s"], "sinks": ["t"], "connections": [["s", "t", 0]]
  })"));
  FeasibilityReport d = check_classical_symbolic(dead);
  EXPECT_FALSE(d.invertibility);
  EXPECT_LE(d.failure_bound, 1e-6);
}

TEST(Transform, Fig2OverGF8) {
  CompiledNetwork net(load_network(fixture("fig2.json")));
  auto f8 = make_field(2, 3);
  FeasibilityReport rep = transform_feasible(net, LecAssignment::all(net.field().one()), 7, f8->primitive());
  EXPECT_EQ(rep.verdict, "solvable-transform");
  EXPECT_EQ(rep.f_at_points.size(), 7u);
  for (const auto& [t, v] : rep.f_at_points) EXPECT_FALSE(v.is_zero());
  EXPECT_THROW(transform_feasible(net, LecAssignment::all(net.field().one()), 6, f8->primitive()),
               std::invalid_argument);
}

TEST(Transform, ParallelPathsVanishAtOne) {
  CompiledNetwork net = parallel_paths();
  LecAssignment ones = LecAssignment::all(net.field().one());
  EXPECT_EQ(f_of_D(net, ones), parse_delay_poly(net.field(), "D + D^2"));
  auto f4 = make_field(2, 2);
  FeasibilityReport rep = transform_feasible(net, ones, 3, f4->primitive());
  EXPECT_EQ(rep.verdict, "not-transform-feasible");
  EXPECT_TRUE(rep.f_at_points.at(0).is_zero());
  EXPECT_FALSE(rep.f_at_points.at(1).is_zero());
  EXPECT_EQ(exists_transform_code(net, ones).verdict, "impossible");
}

TEST(Transform, TrivialBlockLength) {
  CompiledNetwork net = single_edge("1");
  FeasibilityReport rep = transform_feasible(net, LecAssignment::all(net.field().one()), 1, net.field().one());
  EXPECT_EQ(rep.verdict, "solvable-transform");
}

TEST(Search, Fig2FindsLengthSeven) {
  CompiledNetwork net(load_network(fixture("fig2.json")));
  LecAssignment ones = LecAssignment::all(net.field().one());
  FeasibilityReport rep = exists_transform_code(net, ones);
  ASSERT_EQ(rep.verdict, "solvable-transform");
  EXPECT_EQ(*rep.b, 3u);
  EXPECT_EQ(*rep.n, 7u);
  EXPECT_EQ(transform_feasible(net, ones, *rep.n, *rep.alpha).verdict, "solvable-transform");
  FeasibilityReport tight = exists_transform_code(net, ones, 0.01, {6, 64});
  EXPECT_EQ(tight.verdict, "budget-exhausted");
}

TEST(Search, ConstantLikeFAcceptsSmallestLength) {
  CompiledNetwork net = single_edge("b");
  FeasibilityReport rep = exists_transform_code(net, LecAssignment::all(net.field().one()));
  ASSERT_EQ(rep.verdict, "solvable-transform");
  EXPECT_EQ(*rep.n, 1u);
}

TEST(FeasibilityProperty, ThreeRoutesAgree) {
  std::mt19937_64 rng(1201);
  for (int iter = 0; iter < 200; ++iter) {
    auto f = random_small_field(rng);
    CompiledNetwork net(parse_network(random_unicast_json(*f, rng)));
    LecAssignment lecs = random_invariant(*f, rng);
    std::size_t n = 0;
    while (n == 0 || n % f->p() == 0) n = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
    DftCtx d = make_dft(*f, n);
    DelayPoly fp = f_of_D(net, lecs);
    TransferSet ts = transfer_matrices(net, lecs);
    for (std::size_t t = 0; t < n; ++t) {
      FieldElement x = d.alpha.pow(static_cast<std::int64_t>(t));
      FieldElement prod = d.field().one();
      for (std::size_t j = 0; j < net.num_sinks(); ++j) prod *= determinant(demanded_matrix(net, ts, j).eval(x));
      ASSERT_EQ(fp.eval(x), prod) << "case " << iter << " t " << t;
    }
    if (!divides_Dminus1(fp) && check_classical(net, lecs).verdict == "solvable") {
      FeasibilityReport rep = exists_transform_code(net, lecs, 1.0, {12, 256});
      if (rep.verdict == "solvable-transform")
        ASSERT_EQ(transform_feasible(net, lecs, *rep.n, *rep.alpha).verdict, "solvable-transform");
    }
  }
}

TEST(FeasibilityProperty, FeasibleImpliesExactDecode) {
  std::mt19937_64 rng(1202);
  int checked = 0;
  for (int iter = 0; iter < 2000 && checked < 200; ++iter) {
    auto f = random_small_field(rng);
    CompiledNetwork net(parse_network(random_unicast_json(*f, rng)));
    LecAssignment lecs = random_invariant(*f, rng);
    std::size_t n = 0;
    while (n == 0 || n % f->p() == 0) n = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
    DftCtx d = make_dft(*f, n);
    if (transform_feasible(net, lecs, n, d.alpha).verdict != "solvable-transform") continue;
    ++checked;
    HatTransferSet h = hat_transfer(transfer_matrices(net, lecs, field_ptr(d.field())), d);
    std::vector<FieldElement> x;
    for (std::size_t k = 0; k < n; ++k) x.push_back(random_element(d.field(), rng));
    auto y = cp_pipeline(net, lecs, d, {x});
    for (std::size_t j = 0; j < net.num_sinks(); ++j) {
      auto rec = decode_demands(net, h, j, y[j]);
      ASSERT_EQ(rec.size(), 1u);
      ASSERT_EQ(rec[0], x) << "case " << iter << " sink " << j;
    }
  }
  EXPECT_GE(checked, 200);
}

TEST(Report, Json) {
  CompiledNetwork net(load_network(fixture("fig2.json")));
  json j = exists_transform_code(net, LecAssignment::all(net.field().one())).to_json();
  EXPECT_EQ(j["verdict"], "solvable-transform");
  EXPECT_EQ(j["n"], 7);
  EXPECT_EQ(j["f"], "D^25");
  EXPECT_EQ(j["field"], "2^3:1+x+x^3");
}
