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

#include "delaynet/transform.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace delaynet {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

FieldElement power(const FieldElement& a, std::size_t e) { return a.pow(static_cast<std::int64_t>(e)); }

}  // namespace

DftCtx make_dft(const FieldElement& alpha) {
  require(alpha.valid() && !alpha.is_zero(), "DFT root must be a nonzero element");
  const GaloisField& f = alpha.field();
  const std::size_t n = static_cast<std::size_t>(element_order(alpha));
  FieldElement n_one = f.from_integer(static_cast<std::int64_t>(n % f.p()));
  require(!n_one.is_zero(), "block length is a multiple of the characteristic");
  DftCtx d{n, alpha, FieldMatrix(f, n, n), FieldMatrix(f, n, n)};
  const FieldElement n_inv = n_one.inverse();
  const FieldElement a_inv = alpha.inverse();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      d.F(j, k) = power(alpha, (j * k) % n);
      d.F_inv(j, k) = n_inv * power(a_inv, (j * k) % n);
    }
  }
  return d;
}

FieldPtr dft_field(const GaloisField& f, std::size_t n) {
  require(n > 0, "block length must be positive");
  if ((f.order() - 1) % n == 0) return field_ptr(f);
  auto b = min_extension_for_order(f.p(), n);
  if (!b) throw std::invalid_argument("block length " + std::to_string(n) + " is a multiple of the characteristic");
  unsigned deg = std::lcm(*b, f.m());
  return make_field(f.p(), deg);
}

DftCtx make_dft(const GaloisField& f, std::size_t n) {
  FieldPtr g = dft_field(f, n);
  return make_dft(nth_root_of_unity(*g, n));
}

FieldMatrix q_matrix(const DftCtx& dft, std::size_t mu) { return kron_identity(dft.F, mu); }
FieldMatrix q_inverse(const DftCtx& dft, std::size_t mu) { return kron_identity(dft.F_inv, mu); }

namespace {

std::vector<FieldElement> per_process(const FieldMatrix& F, std::size_t mu, const std::vector<FieldElement>& x) {
  const std::size_t n = F.rows();
  require(x.size() == n * mu, "stacked vector length " + std::to_string(x.size()) + " != " + std::to_string(n * mu));
  const GaloisField& f = F.field();
  std::vector<FieldElement> y(x.size(), f.zero());
  for (std::size_t p = 0; p < mu; ++p) {
    for (std::size_t r = 0; r < n; ++r) {
      FieldElement acc = f.zero();
      for (std::size_t c = 0; c < n; ++c) acc += F(r, c) * embed(x[c * mu + p], f);
      y[r * mu + p] = acc;
    }
  }
  return y;
}

}  // namespace

std::vector<FieldElement> apply_q(const DftCtx& dft, std::size_t mu, const std::vector<FieldElement>& x) {
  return per_process(dft.F, mu, x);
}

std::vector<FieldElement> apply_q_inverse(const DftCtx& dft, std::size_t mu, const std::vector<FieldElement>& y) {
  return per_process(dft.F_inv, mu, y);
}

FieldMatrix block_circulant(const std::vector<FieldMatrix>& blocks, std::size_t n) {
  require(!blocks.empty(), "no blocks");
  require(blocks.size() <= n, "more blocks than the block length");
  const std::size_t r = blocks[0].rows(), c = blocks[0].cols();
  for (const auto& b : blocks) require(b.rows() == r && b.cols() == c, "block dimension mismatch");
  FieldMatrix a(blocks[0].field(), n * r, n * c);
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t i = 0; i < blocks.size(); ++i) a.set_block(row * r, ((row + i) % n) * c, blocks[i]);
  return a;
}

std::vector<FieldMatrix> block_diagonalize(const std::vector<FieldMatrix>& blocks, const DftCtx& dft) {
  require(!blocks.empty(), "no blocks");
  require(dft.n > blocks.size() - 1, "block length " + std::to_string(dft.n) + " must exceed the degree " +
                                         std::to_string(blocks.size() - 1));
  const GaloisField& f = dft.field();
  const std::size_t r = blocks[0].rows(), c = blocks[0].cols();
  std::vector<FieldMatrix> hat;
  for (std::size_t j = 0; j < dft.n; ++j) {
    FieldMatrix acc(f, r, c);
    const FieldElement w = power(dft.alpha, dft.n - 1 - j);
    FieldElement wi = f.one();
    for (const auto& b : blocks) {
      require(b.rows() == r && b.cols() == c, "block dimension mismatch");
      acc = acc + b.mapped(f) * wi;
      wi *= w;
    }
    hat.push_back(std::move(acc));
  }
  return hat;
}

FieldMatrix block_diagonal(const std::vector<FieldMatrix>& hat) {
  require(!hat.empty(), "no blocks");
  const std::size_t n = hat.size(), r = hat[0].rows(), c = hat[0].cols();
  FieldMatrix a(hat[0].field(), n * r, n * c);
  for (std::size_t p = 0; p < n; ++p) a.set_block(p * r, p * c, hat[n - 1 - p]);
  return a;
}

HatTransferSet hat_transfer(const TransferSet& ts, const DftCtx& dft) {
  HatTransferSet h{dft, ts.d_min, ts.d_max, {}};
  h.hat.resize(ts.raw.size());
  for (std::size_t i = 0; i < ts.raw.size(); ++i) {
    for (std::size_t j = 0; j < ts.raw[i].size(); ++j) {
      PolyMatrix m = ts.normalized(i, j);
      std::vector<FieldMatrix> per_t;
      for (std::size_t t = 0; t < dft.n; ++t) per_t.push_back(m.eval(power(dft.alpha, dft.n - 1 - t)));
      h.hat[i].push_back(std::move(per_t));
    }
  }
  return h;
}

std::vector<std::vector<FieldElement>> apply_hat(const HatTransferSet& h,
                                                 const std::vector<std::vector<FieldElement>>& x) {
  require(x.size() == h.hat.size(), "one input vector per source expected");
  const GaloisField& f = h.dft.field();
  const std::size_t n = h.dft.n;
  const std::size_t sinks = h.hat.empty() ? 0 : h.hat[0].size();
  std::vector<std::vector<FieldElement>> y(sinks);
  for (std::size_t j = 0; j < sinks; ++j) {
    const std::size_t nu = h.hat[0][j][0].rows();
    y[j].assign(n * nu, f.zero());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t mu = h.hat[i][j][0].cols();
      require(x[i].size() == n * mu, "input length mismatch");
      for (std::size_t p = 0; p < n; ++p) {
        const FieldMatrix& m = h.hat[i][j][n - 1 - p];
        for (std::size_t r = 0; r < nu; ++r)
          for (std::size_t c = 0; c < mu; ++c) y[j][p * nu + r] += m(r, c) * embed(x[i][p * mu + c], f);
      }
    }
  }
  return y;
}

std::vector<FieldElement> stack_newest_first(const Stream& gens) {
  std::vector<FieldElement> x;
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) x.insert(x.end(), it->begin(), it->end());
  return x;
}

Stream unstack_newest_first(const std::vector<FieldElement>& x, std::size_t width) {
  require(width > 0 && x.size() % width == 0, "stacked length is not a multiple of the width");
  const std::size_t n = x.size() / width;
  Stream gens(n);
  for (std::size_t p = 0; p < n; ++p)
    gens[n - 1 - p].assign(x.begin() + static_cast<long>(p * width), x.begin() + static_cast<long>((p + 1) * width));
  return gens;
}

Stream add_cyclic_prefix(const Stream& gens, std::size_t d_max) {
  require(!gens.empty(), "empty block");
  const std::size_t n = gens.size();
  Stream wire;
  wire.reserve(n + d_max);
  for (std::size_t s = 0; s < n + d_max; ++s) wire.push_back(gens[(s + n * (d_max / n + 1) - d_max) % n]);
  return wire;
}

Stream strip_cyclic_prefix(const Stream& rx, std::size_t d_max) {
  require(rx.size() > d_max, "received stream shorter than the prefix");
  return Stream(rx.begin() + static_cast<long>(d_max), rx.end());
}

Stream cp_encode(const std::vector<FieldElement>& x, const DftCtx& dft, std::size_t mu, std::size_t d_max) {
  require(x.size() == dft.n * mu, "cp_encode: expected " + std::to_string(dft.n * mu) + " symbols, got " +
                                      std::to_string(x.size()));
  return add_cyclic_prefix(unstack_newest_first(apply_q(dft, mu, x), mu), d_max);
}

std::vector<FieldElement> cp_decode(const Stream& rx, const DftCtx& dft, std::size_t nu, std::size_t d_max) {
  require(rx.size() == dft.n + d_max, "cp_decode: expected " + std::to_string(dft.n + d_max) +
                                          " generations, got " + std::to_string(rx.size()));
  for (const auto& g : rx) require(g.size() == nu, "cp_decode: generation width mismatch");
  return apply_q_inverse(dft, nu, stack_newest_first(strip_cyclic_prefix(rx, d_max)));
}

std::vector<std::vector<Stream>> transmit_blocks(const CompiledNetwork& net, const LecAssignment& lecs,
                                                 const GaloisField& target, std::size_t d_max,
                                                 const std::vector<std::vector<Stream>>& wire) {
  require(wire.size() == net.num_sources(), "one wire stream per source expected");
  const std::size_t blocks = wire.empty() ? 0 : wire[0].size();
  require(blocks > 0, "no blocks to transmit");
  const std::size_t len = wire[0][0].size();
  const long dmax = static_cast<long>(d_max);
  std::vector<std::vector<FieldElement>> inputs(net.num_processes(),
                                                std::vector<FieldElement>(blocks * len, target.zero()));
  for (std::size_t i = 0; i < wire.size(); ++i) {
    require(wire[i].size() == blocks, "sources disagree on the number of blocks");
    for (std::size_t l = 0; l < blocks; ++l) {
      require(wire[i][l].size() == len, "blocks disagree in length");
      for (std::size_t s = 0; s < len; ++s) {
        require(wire[i][l][s].size() == static_cast<std::size_t>(net.mu(i)), "generation width mismatch");
        for (int p = 0; p < net.mu(i); ++p)
          inputs[static_cast<std::size_t>(net.process_id(i, p))][l * len + s] = wire[i][l][s][static_cast<std::size_t>(p)];
      }
    }
  }
  SimulationOptions opt;
  opt.t_begin = -dmax;
  opt.t_end = -dmax + static_cast<long>(blocks * len) - 1 + net.d_min();
  opt.window = std::make_pair(static_cast<long>(net.d_min()), opt.t_end);
  SimulationResult sim = simulate(net, lecs, target, inputs, opt);

  std::vector<std::vector<Stream>> rx(net.num_sinks(), std::vector<Stream>(blocks));
  for (std::size_t j = 0; j < net.num_sinks(); ++j) {
    for (std::size_t l = 0; l < blocks; ++l) {
      for (std::size_t s = 0; s < len; ++s) {
        const long raw = -dmax + static_cast<long>(l * len + s) + net.d_min();
        std::vector<FieldElement> g;
        for (int o = 0; o < net.nu(j); ++o) g.push_back(sim.at(j, o, raw));
        rx[j][l].push_back(std::move(g));
      }
    }
  }
  return rx;
}

namespace {

std::size_t resolve_dmax(const CompiledNetwork& net, int d_max) {
  return static_cast<std::size_t>(d_max < 0 ? net.d_max() : d_max);
}

}  // namespace

std::vector<std::vector<FieldElement>> cp_pipeline(const CompiledNetwork& net, const LecAssignment& lecs,
                                                   const DftCtx& dft, const std::vector<std::vector<FieldElement>>& x,
                                                   int d_max) {
  const std::size_t dm = resolve_dmax(net, d_max);
  require(x.size() == net.num_sources(), "one input vector per source expected");
  std::vector<std::vector<Stream>> wire(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    wire[i].push_back(cp_encode(x[i], dft, static_cast<std::size_t>(net.mu(i)), dm));
  auto rx = transmit_blocks(net, lecs, dft.field(), dm, wire);
  std::vector<std::vector<FieldElement>> y;
  for (std::size_t j = 0; j < rx.size(); ++j)
    y.push_back(cp_decode(rx[j][0], dft, static_cast<std::size_t>(net.nu(j)), dm));
  return y;
}

std::vector<std::vector<FieldElement>> cp_pipeline_plain(const CompiledNetwork& net, const LecAssignment& lecs,
                                                         const GaloisField& target, std::size_t n,
                                                         const std::vector<std::vector<FieldElement>>& x,
                                                         int d_max) {
  const std::size_t dm = resolve_dmax(net, d_max);
  require(x.size() == net.num_sources(), "one input vector per source expected");
  std::vector<std::vector<Stream>> wire(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i].size() == n * static_cast<std::size_t>(net.mu(i)), "input length mismatch");
    wire[i].push_back(add_cyclic_prefix(unstack_newest_first(x[i], static_cast<std::size_t>(net.mu(i))), dm));
  }
  auto rx = transmit_blocks(net, lecs, target, dm, wire);
  std::vector<std::vector<FieldElement>> y;
  for (auto& r : rx) y.push_back(stack_newest_first(strip_cyclic_prefix(r[0], dm)));
  return y;
}

LecAssignment block_slice(const LecAssignment& lecs, long l) {
  LecAssignment out;
  out.fallback = lecs.fallback;
  for (const auto& [sym, v] : lecs.values) {
    if (sym.time) continue;
    if (sym.block && *sym.block != l) continue;
    LecSymbol plain{sym.name, std::nullopt, std::nullopt};
    if (sym.block || !out.values.count(plain)) out.values.insert_or_assign(plain, v);
  }
  return out;
}

BlockHatSet block_cp_pipeline(const CompiledNetwork& net, const LecAssignment& lecs, const DftCtx& dft_k) {
  require(lecs.mode == LecMode::Block, "block pipeline needs a block schedule");
  require(lecs.geometry.k == static_cast<long>(dft_k.n), "schedule block length differs from the DFT length");
  const std::size_t blocks = static_cast<std::size_t>(lecs.geometry.count);
  const GaloisField& f = dft_k.field();
  BlockHatSet out{dft_k, blocks, {}};
  std::vector<TransferSet> per_block;
  for (std::size_t l = 1; l <= blocks; ++l)
    per_block.push_back(transfer_matrices(net, block_slice(lecs, static_cast<long>(l)), field_ptr(f)));
  out.m.resize(net.num_sources());
  for (std::size_t i = 0; i < net.num_sources(); ++i) {
    const std::size_t mu = static_cast<std::size_t>(net.mu(i));
    for (std::size_t j = 0; j < net.num_sinks(); ++j) {
      const std::size_t nu = static_cast<std::size_t>(net.nu(j));
      std::vector<PolyMatrix> polys;
      for (const auto& ts : per_block) polys.push_back(ts.normalized(i, j));
      std::vector<FieldMatrix> per_q;
      for (std::size_t q = 0; q < dft_k.n; ++q) {
        FieldMatrix m(f, blocks * nu, blocks * mu);
        const FieldElement a = power(dft_k.alpha, q);
        for (std::size_t l = 0; l < blocks; ++l) m.set_block(l * nu, l * mu, polys[l].eval(a));
        per_q.push_back(std::move(m));
      }
      out.m[i].push_back(std::move(per_q));
    }
  }
  return out;
}

std::vector<FieldElement> bin_vector(const std::vector<std::vector<FieldElement>>& blocks, std::size_t q,
                                     std::size_t width, std::size_t k) {
  require(q < k, "bin out of range");
  std::vector<FieldElement> v;
  for (const auto& b : blocks) {
    require(b.size() == k * width, "block length mismatch");
    v.insert(v.end(), b.begin() + static_cast<long>(q * width), b.begin() + static_cast<long>((q + 1) * width));
  }
  return v;
}

void scatter_bin(std::vector<std::vector<FieldElement>>& blocks, std::size_t q, std::size_t width, std::size_t k,
                 const std::vector<FieldElement>& v) {
  require(q < k, "bin out of range");
  require(v.size() == blocks.size() * width, "bin vector length mismatch");
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    require(blocks[l].size() == k * width, "block length mismatch");
    for (std::size_t w = 0; w < width; ++w) blocks[l][q * width + w] = v[l * width + w];
  }
}

std::vector<std::vector<std::vector<FieldElement>>> block_cp_run(
    const CompiledNetwork& net, const LecAssignment& lecs, const DftCtx& dft_k,
    const std::vector<std::vector<std::vector<FieldElement>>>& x) {
  require(lecs.mode == LecMode::Block, "block pipeline needs a block schedule");
  if (!net.layered()) throw NetworkError("block schedules need every edge at a unique hop depth");
  const std::size_t dm = static_cast<std::size_t>(net.d_max());
  const BlockGeometry& g = lecs.geometry;
  require(g.k == static_cast<long>(dft_k.n) && g.d_max == static_cast<long>(dm) && g.origin == -g.d_max,
          "schedule geometry (k, d_max, origin) must be (" + std::to_string(dft_k.n) + ", " + std::to_string(dm) +
              ", " + std::to_string(-static_cast<long>(dm)) + ")");
  require(x.size() == net.num_sources(), "one block list per source expected");
  std::vector<std::vector<Stream>> wire(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (const auto& b : x[i]) wire[i].push_back(cp_encode(b, dft_k, static_cast<std::size_t>(net.mu(i)), dm));
  auto rx = transmit_blocks(net, lecs, dft_k.field(), dm, wire);
  std::vector<std::vector<std::vector<FieldElement>>> y(rx.size());
  for (std::size_t j = 0; j < rx.size(); ++j)
    for (const auto& r : rx[j]) y[j].push_back(cp_decode(r, dft_k, static_cast<std::size_t>(net.nu(j)), dm));
  return y;
}

}  // namespace delaynet
