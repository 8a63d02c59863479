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

#include "delaynet/transform.hpp"
#include "test_support.hpp"

using namespace delaynet;
using namespace delaynet::testing;

namespace {

// Fields with several DFT lengths available.
FieldPtr random_dft_field(std::mt19937_64& rng) {
  static const std::vector<std::pair<unsigned, unsigned>> choices = {{2, 3}, {2, 4}, {2, 6}, {3, 2}, {5, 2}, {7, 1}, {13, 1}};
  auto [p, m] = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
  return make_field(p, m);
}

std::size_t random_divisor(std::uint64_t q1, std::mt19937_64& rng, std::uint64_t cap = 16) {
  std::vector<std::size_t> d;
  for (std::uint64_t k = 1; k <= std::min(q1, cap); ++k)
    if (q1 % k == 0) d.push_back(k);
  return d[std::uniform_int_distribution<std::size_t>(0, d.size() - 1)(rng)];
}

FieldMatrix random_matrix(const GaloisField& f, std::size_t r, std::size_t c, std::mt19937_64& rng) {
  FieldMatrix m(f, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = random_element(f, rng);
  return m;
}

std::vector<FieldElement> random_vector(const GaloisField& f, std::size_t n, std::mt19937_64& rng) {
  std::vector<FieldElement> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(random_element(f, rng));
  return v;
}

}  // namespace

TEST(Dft, MatrixAndInverse) {
  auto f = make_field(2, 3);
  DftCtx d = make_dft(*f, 7);
  EXPECT_EQ(d.n, 7u);
  EXPECT_EQ(&d.field(), f.get());
  EXPECT_TRUE((d.F * d.F_inv).is_identity());
  EXPECT_EQ(d.F(2, 3), d.alpha.pow(6));
}

TEST(Dft, ExtendsTheFieldWhenNeeded) {
  auto f = make_field(2, 1);
  DftCtx d = make_dft(*f, 7);
  EXPECT_EQ(d.field().m(), 3u);
  EXPECT_EQ(element_order(d.alpha), 7u);
  auto g = make_field(2, 6);
  EXPECT_EQ(make_dft(*g, 7).alpha, g->primitive().pow(9));
  EXPECT_THROW(make_dft(*f, 4), std::invalid_argument);
  EXPECT_EQ(dft_field(*make_field(2, 2), 7)->m(), 6u);
}

TEST(DftProperty, QRoundTrip) {
  std::mt19937_64 rng(1101);
  for (int iter = 0; iter < 200; ++iter) {
    auto f = random_dft_field(rng);
    std::size_t n = random_divisor(f->order() - 1, rng);
    std::size_t mu = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    DftCtx d = make_dft(*f, n);
    FieldMatrix q = q_matrix(d, mu), qi = q_inverse(d, mu);
    ASSERT_TRUE((q * qi).is_identity()) << f->descriptor() << " n=" << n;
    ASSERT_TRUE((qi * q).is_identity());
    auto x = random_vector(*f, n * mu, rng);
    ASSERT_EQ(apply_q(d, mu, x), q * x);
    ASSERT_EQ(apply_q_inverse(d, mu, apply_q(d, mu, x)), x);
  }
}

TEST(DftProperty, BlockCirculantIdentity) {
  std::mt19937_64 rng(1102);
  for (int iter = 0; iter < 200; ++iter) {
    auto f = random_dft_field(rng);
    std::size_t n = random_divisor(f->order() - 1, rng);
    std::size_t nu = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    std::size_t mu = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    std::size_t L = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    DftCtx d = make_dft(*f, n);
    std::vector<FieldMatrix> blocks;
    for (std::size_t i = 0; i <= L; ++i) blocks.push_back(random_matrix(*f, nu, mu, rng));
    FieldMatrix a = block_circulant(blocks, n);
    FieldMatrix hat = block_diagonal(block_diagonalize(blocks, d));
    ASSERT_EQ(a, q_matrix(d, nu) * hat * q_inverse(d, mu)) << f->descriptor() << " n=" << n << " L=" << L;
  }
}

TEST(BlockDiagonalize, SingleBlockIsConstant) {
  auto f = make_field(5, 2);
  std::mt19937_64 rng(3);
  FieldMatrix a = random_matrix(*f, 2, 3, rng);
  for (auto& h : block_diagonalize({a}, make_dft(*f, 8))) EXPECT_EQ(h, a);
}

TEST(BlockDiagonalize, ScalarBlocksAreDftBins) {
  std::mt19937_64 rng(4);
  auto f = make_field(2, 4);
  for (int iter = 0; iter < 50; ++iter) {
    DftCtx d = make_dft(*f, 15);
    std::size_t L = std::uniform_int_distribution<std::size_t>(0, 14)(rng);
    std::vector<FieldElement> c = random_vector(*f, L + 1, rng);
    std::vector<FieldMatrix> blocks;
    for (const auto& v : c) blocks.push_back(FieldMatrix::diagonal(*f, {v}));
    auto hat = block_diagonalize(blocks, d);
    // Newest-first position p holds the forward DFT bin p of the coefficients.
    for (std::size_t p = 0; p < 15; ++p) {
      FieldElement bin = f->zero();
      FieldElement w = f->one();
      const FieldElement step = d.alpha.pow(static_cast<std::int64_t>(p));
      for (const auto& v : c) {
        bin += v * w;
        w *= step;
      }
      ASSERT_EQ(hat[14 - p](0, 0), bin) << "position " << p;
    }
  }
}

TEST(BlockDiagonalize, RejectsShortBlockLength) {
  auto f = make_field(2, 3);
  std::vector<FieldMatrix> blocks(8, FieldMatrix::identity(*f, 1));
  EXPECT_THROW(block_diagonalize(blocks, make_dft(*f, 7)), std::invalid_argument);
}

TEST(HatTransfer, Example2Diagonals) {
  CompiledNetwork net(load_network(fixture("ex2.json")));
  const GaloisField& f = net.field();
  LecAssignment lecs = LecAssignment::load(fixture("ex2-lecs.json"), f);
  DftCtx d = make_dft(f.primitive().pow(9));
  ASSERT_EQ(d.n, 7u);
  HatTransferSet h = hat_transfer(transfer_matrices(net, lecs), d);
  EXPECT_EQ(h.d_min, 3);
  const FieldElement b = f.primitive();
  const FieldElement one = f.one();
  // Constant part of each entry, then the common alpha^{2p} term.
  const std::vector<std::vector<FieldElement>> offset = {
      {f.zero(), one + b.pow(4), f.zero()},
      {f.zero(), f.zero(), one + b.pow(2) + b.pow(3) + b.pow(4) + b.pow(5)},
      {one + b + b.pow(2), f.zero(), f.zero()},
  };
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      FieldMatrix blk = h.block(i, j);
      ASSERT_TRUE(blk.is_diagonal());
      for (std::size_t p = 0; p < 7; ++p)
        EXPECT_EQ(blk(p, p), offset[i][j] + d.alpha.pow(static_cast<std::int64_t>(2 * p)))
            << "M" << i + 1 << j + 1 << " position " << p;
    }
  }
}

TEST(CpEncode, ConstantStreamConcentrates) {
  auto f = make_field(2, 3);
  DftCtx d = make_dft(*f, 7);
  FieldElement x = f->element(5);
  Stream wire = cp_encode(std::vector<FieldElement>(7, x), d, 1, 2);
  ASSERT_EQ(wire.size(), 9u);
  FieldElement n_x = f->from_integer(7) * x;
  for (std::size_t s = 0; s < 9; ++s) {
    // Newest generation (6) sits at slot 8 and, through the prefix, at slot 1.
    bool hot = s == 8 || s == 1;
    EXPECT_EQ(wire[s][0], hot ? n_x : f->zero()) << "slot " << s;
  }
}

TEST(CpEncode, IdentityPassThrough) {
  auto f = make_field(7, 1);
  DftCtx d = make_dft(*f, 1);
  std::vector<FieldElement> x = {f->element(3), f->element(4)};
  Stream wire = cp_encode(x, d, 2, 0);
  ASSERT_EQ(wire.size(), 1u);
  EXPECT_EQ(wire[0], x);
  EXPECT_EQ(cp_decode(wire, d, 2, 0), x);
}

TEST(CpEncode, RoundTripAndErrors) {
  std::mt19937_64 rng(7);
  auto f = make_field(2, 4);
  DftCtx d = make_dft(*f, 5);
  for (std::size_t dm : {0u, 1u, 3u, 5u, 12u}) {
    auto x = random_vector(*f, 10, rng);
    EXPECT_EQ(cp_decode(cp_encode(x, d, 2, dm), d, 2, dm), x);
  }
  EXPECT_THROW(cp_encode(random_vector(*f, 9, rng), d, 2, 1), std::invalid_argument);
  EXPECT_THROW(cp_decode(Stream(5, std::vector<FieldElement>(2, f->zero())), d, 2, 1), std::invalid_argument);
}

TEST(CpPipeline, Fig2InstantaneousRelation) {
  CompiledNetwork net(load_network(fixture("fig2.json")));
  LecAssignment ones = LecAssignment::all(net.field().one());
  DftCtx d = make_dft(net.field(), 7);
  ASSERT_EQ(d.field().m(), 3u);
  HatTransferSet h = hat_transfer(transfer_matrices(net, ones), d);
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 10; ++iter) {
    std::vector<std::vector<FieldElement>> x;
    for (std::size_t i = 0; i < 3; ++i) x.push_back(random_vector(d.field(), 7, rng));
    auto y = cp_pipeline(net, ones, d, x);
    auto expect = apply_hat(h, x);
    ASSERT_EQ(y, expect);
  }
  std::vector<std::vector<FieldElement>> zero(3, std::vector<FieldElement>(7, d.field().zero()));
  for (const auto& y : cp_pipeline(net, ones, d, zero))
    for (const auto& v : y) EXPECT_TRUE(v.is_zero());
}

TEST(CpPipelineProperty, InstantaneousRelation) {
  std::mt19937_64 rng(1103);
  for (int iter = 0; iter < 200; ++iter) {
    auto f = random_small_field(rng);
    CompiledNetwork net(parse_network(random_network_json(*f, rng, {})));
    LecAssignment lecs = random_invariant(*f, rng);
    std::size_t n = 0;
    while (n == 0 || n % f->p() == 0) n = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
    DftCtx d = make_dft(*f, n);
    HatTransferSet h = hat_transfer(transfer_matrices(net, lecs, field_ptr(d.field())), d);
    std::vector<std::vector<FieldElement>> x;
    for (std::size_t i = 0; i < net.num_sources(); ++i)
      x.push_back(random_vector(d.field(), n * static_cast<std::size_t>(net.mu(i)), rng));
    auto y = cp_pipeline(net, lecs, d, x);
    auto expect = apply_hat(h, x);
    ASSERT_EQ(y.size(), expect.size());
    for (std::size_t j = 0; j < y.size(); ++j) ASSERT_EQ(y[j], expect[j]) << "case " << iter << " sink " << j;
  }
}

TEST(CpPipelineProperty, PlainPrefixMatchesBlockMatrix) {
  std::mt19937_64 rng(1104);
  for (int iter = 0; iter < 200; ++iter) {
    auto f = random_small_field(rng);
    CompiledNetwork net(parse_network(random_network_json(*f, rng, {})));
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    LecAssignment lecs = random_schedule(*f, rng, -net.d_max() - net.longest_path(), static_cast<long>(n) + net.longest_path());
    auto m = time_varying_block_matrix(net, lecs, n);
    std::vector<std::vector<FieldElement>> x;
    for (std::size_t i = 0; i < net.num_sources(); ++i)
      x.push_back(random_vector(*f, n * static_cast<std::size_t>(net.mu(i)), rng));
    auto y = cp_pipeline_plain(net, lecs, *f, n, x);
    for (std::size_t j = 0; j < net.num_sinks(); ++j) {
      std::vector<FieldElement> expect(n * static_cast<std::size_t>(net.nu(j)), f->zero());
      for (std::size_t i = 0; i < net.num_sources(); ++i) {
        auto part = m[i][j] * x[i];
        for (std::size_t r = 0; r < expect.size(); ++r) expect[r] += part[r];
      }
      ASSERT_EQ(y[j], expect) << "case " << iter << " sink " << j;
    }
  }
}

TEST(BlockSlice, PicksOneBlock) {
  auto f = make_field(2, 3);
  std::mt19937_64 rng(5);
  LecAssignment a = random_block_schedule(*f, rng, 7, 2, 3);
  a.set(LecSymbol{"h", {}, {}}, f->element(6));
  for (long l = 1; l <= 3; ++l) {
    LecAssignment s = block_slice(a, l);
    EXPECT_EQ(s.mode, LecMode::TimeInvariant);
    EXPECT_EQ(s.lookup("g2", 0), a.lookup("g2", (l - 1) * 9 - 2));
    EXPECT_EQ(s.lookup("h", 0), f->element(6));
  }
}

TEST(BlockPipeline, ConstantScheduleRepeatsDiagonal) {
  CompiledNetwork net(load_network(fixture("ex2.json")));
  const GaloisField& f = net.field();
  LecAssignment base = LecAssignment::load(fixture("ex2-lecs.json"), f);
  LecAssignment lecs;
  lecs.mode = LecMode::Block;
  lecs.geometry = BlockGeometry{7, 2, -2, 3};
  for (const auto& [s, v] : base.values)
    for (long l = 1; l <= 3; ++l) lecs.set(LecSymbol{s.name, {}, l}, v);
  BlockHatSet b = block_cp_pipeline(net, lecs, make_dft(f.primitive().pow(9)));
  for (std::size_t q = 0; q < 7; ++q) {
    const FieldMatrix& m = b.m[0][1][q];
    ASSERT_TRUE(m.is_diagonal());
    EXPECT_EQ(m(0, 0), m(1, 1));
    EXPECT_EQ(m(1, 1), m(2, 2));
  }
}

TEST(BlockPipeline, SingleBlockIsThePlainPipeline) {
  CompiledNetwork net(load_network(fixture("ex2.json")));
  const GaloisField& f = net.field();
  LecAssignment base = LecAssignment::load(fixture("ex2-lecs.json"), f);
  LecAssignment lecs;
  lecs.mode = LecMode::Block;
  lecs.geometry = BlockGeometry{7, 2, -2, 1};
  for (const auto& [s, v] : base.values) lecs.set(LecSymbol{s.name, {}, 1}, v);
  DftCtx d = make_dft(f.primitive().pow(9));
  std::mt19937_64 rng(9);
  std::vector<std::vector<std::vector<FieldElement>>> x(3);
  std::vector<std::vector<FieldElement>> flat;
  for (auto& xi : x) {
    xi.push_back(random_vector(f, 7, rng));
    flat.push_back(xi[0]);
  }
  auto y = block_cp_run(net, lecs, d, x);
  auto z = cp_pipeline(net, base, d, flat);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(y[j][0], z[j]);
}

TEST(BlockPipelineProperty, RelationMatchesSimulator) {
  std::mt19937_64 rng(1105);
  for (int iter = 0; iter < 200; ++iter) {
    static const std::vector<std::pair<unsigned, unsigned>> choices = {{2, 3}, {2, 4}, {3, 2}, {7, 1}};
    auto [p, m] = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
    auto f = make_field(p, m);
    int ns = std::uniform_int_distribution<int>(1, 3)(rng), nt = std::uniform_int_distribution<int>(1, 3)(rng);
    CompiledNetwork net(parse_network(random_layered_json(*f, rng, ns, nt, std::uniform_int_distribution<int>(2, 4)(rng))));
    ASSERT_TRUE(net.layered());
    std::size_t k = random_divisor(f->order() - 1, rng, 9);
    long blocks = std::uniform_int_distribution<long>(1, 3)(rng);
    LecAssignment lecs = random_block_schedule(*f, rng, static_cast<long>(k), net.d_max(), blocks);
    DftCtx d = make_dft(*f, k);
    BlockHatSet hs = block_cp_pipeline(net, lecs, d);
    std::vector<std::vector<std::vector<FieldElement>>> x(net.num_sources());
    for (auto& xi : x)
      for (long l = 0; l < blocks; ++l) xi.push_back(random_vector(*f, k, rng));
    auto y = block_cp_run(net, lecs, d, x);
    for (std::size_t j = 0; j < net.num_sinks(); ++j) {
      for (std::size_t q = 0; q < k; ++q) {
        std::vector<FieldElement> expect(static_cast<std::size_t>(blocks), f->zero());
        for (std::size_t i = 0; i < net.num_sources(); ++i) {
          auto part = hs.m[i][j][q] * bin_vector(x[i], q, 1, k);
          for (std::size_t r = 0; r < expect.size(); ++r) expect[r] += part[r];
        }
        ASSERT_EQ(bin_vector(y[j], q, 1, k), expect) << "case " << iter << " sink " << j << " bin " << q;
      }
    }
  }
}

TEST(BlockPipeline, RejectsMismatchedGeometry) {
  CompiledNetwork net(load_network(fixture("ex2.json")));
  const GaloisField& f = net.field();
  std::mt19937_64 rng(2);
  LecAssignment lecs = random_block_schedule(f, rng, 7, 3, 1);
  std::vector<std::vector<std::vector<FieldElement>>> x(3, {std::vector<FieldElement>(7, f.zero())});
  EXPECT_THROW(block_cp_run(net, lecs, make_dft(f, 7), x), std::invalid_argument);
}

TEST(BinVector, GatherScatter) {
  auto f = make_field(3, 1);
  std::vector<std::vector<FieldElement>> blocks = {{f->element(0), f->element(1), f->element(2), f->element(0)},
                                                   {f->element(1), f->element(1), f->element(2), f->element(2)}};
  auto v = bin_vector(blocks, 1, 2, 2);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], f->element(2));
  EXPECT_EQ(v[3], f->element(2));
  auto copy = blocks;
  scatter_bin(copy, 1, 2, 2, v);
  EXPECT_EQ(copy, blocks);
}
