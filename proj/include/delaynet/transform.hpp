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

#ifndef DELAYNET_TRANSFORM_HPP
#define DELAYNET_TRANSFORM_HPP

#include <cstddef>
#include <vector>

#include "delaynet/galois.hpp"
#include "delaynet/netmodel.hpp"
#include "delaynet/polymatrix.hpp"

namespace delaynet {

// Finite-field DFT of length n = order(alpha). [F]_{jk} = alpha^{jk}.
struct DftCtx {
  std::size_t n = 1;
  FieldElement alpha;
  FieldMatrix F;
  FieldMatrix F_inv;

  const GaloisField& field() const { return alpha.field(); }
};

DftCtx make_dft(const FieldElement& alpha);
// Uses primitive^((q-1)/n) of `f`, or of dft_field(f, n) when f is too small.
DftCtx make_dft(const GaloisField& f, std::size_t n);
// Smallest extension of f (degree a multiple of m) holding an element of order n.
FieldPtr dft_field(const GaloisField& f, std::size_t n);

// Q_mu = F ⊗ I_mu and its inverse.
FieldMatrix q_matrix(const DftCtx& dft, std::size_t mu);
FieldMatrix q_inverse(const DftCtx& dft, std::size_t mu);
// Same products applied per process to a newest-first stacked vector.
std::vector<FieldElement> apply_q(const DftCtx& dft, std::size_t mu, const std::vector<FieldElement>& x);
std::vector<FieldElement> apply_q_inverse(const DftCtx& dft, std::size_t mu, const std::vector<FieldElement>& y);

// Row r, column c holds blocks[(c - r) mod n] (zero past the last block).
FieldMatrix block_circulant(const std::vector<FieldMatrix>& blocks, std::size_t n);
// result[j] = sum_i alpha^((n-1-j) i) blocks[i].
std::vector<FieldMatrix> block_diagonalize(const std::vector<FieldMatrix>& blocks, const DftCtx& dft);
// blockdiag(hat[n-1], ..., hat[0]).
FieldMatrix block_diagonal(const std::vector<FieldMatrix>& hat);

struct HatTransferSet {
  DftCtx dft;
  int d_min = 0;
  int d_max = 0;
  // hat[i][j][t] = M_ij(alpha^(n-1-t)), normalized M.
  std::vector<std::vector<std::vector<FieldMatrix>>> hat;

  const FieldMatrix& at(std::size_t i, std::size_t j, std::size_t t) const { return hat[i][j][t]; }
  FieldMatrix block(std::size_t i, std::size_t j) const { return block_diagonal(hat[i][j]); }
};

HatTransferSet hat_transfer(const TransferSet& ts, const DftCtx& dft);
// Per sink: sum_i hat_ij x_i, newest-first stacking.
std::vector<std::vector<FieldElement>> apply_hat(const HatTransferSet& h,
                                                 const std::vector<std::vector<FieldElement>>& x);

// Generation-major stream: stream[s][process].
using Stream = std::vector<std::vector<FieldElement>>;

std::vector<FieldElement> stack_newest_first(const Stream& gens);
Stream unstack_newest_first(const std::vector<FieldElement>& x, std::size_t width);
// Wire slot s carries generation (s - d_max) mod n.
Stream add_cyclic_prefix(const Stream& gens, std::size_t d_max);
Stream strip_cyclic_prefix(const Stream& rx, std::size_t d_max);

// x is n*mu newest-first; returns n + d_max wire generations, oldest first.
Stream cp_encode(const std::vector<FieldElement>& x, const DftCtx& dft, std::size_t mu, std::size_t d_max);
// rx is n + d_max received generations; returns n*nu newest-first.
std::vector<FieldElement> cp_decode(const Stream& rx, const DftCtx& dft, std::size_t nu, std::size_t d_max);

// Sends wire[i][l] (block l of source i, each n + d_max generations) back to
// back from time -d_max. Returns rx[j][l], indexed by normalized output time.
std::vector<std::vector<Stream>> transmit_blocks(const CompiledNetwork& net, const LecAssignment& lecs,
                                                 const GaloisField& target, std::size_t d_max,
                                                 const std::vector<std::vector<Stream>>& wire);

// x[i] is n*mu_i newest-first. d_max < 0 takes the network's.
std::vector<std::vector<FieldElement>> cp_pipeline(const CompiledNetwork& net, const LecAssignment& lecs,
                                                   const DftCtx& dft, const std::vector<std::vector<FieldElement>>& x,
                                                   int d_max = -1);
// Cyclic prefix without the DFT; the channel is then the time-varying block matrix.
std::vector<std::vector<FieldElement>> cp_pipeline_plain(const CompiledNetwork& net, const LecAssignment& lecs,
                                                         const GaloisField& target, std::size_t n,
                                                         const std::vector<std::vector<FieldElement>>& x,
                                                         int d_max = -1);

// Time-invariant view of block l (1-based) of a block schedule.
LecAssignment block_slice(const LecAssignment& lecs, long l);

// m[i][j][q] = blockdiag over blocks l of M_ij(eps_l, alpha^q).
struct BlockHatSet {
  DftCtx dft;
  std::size_t blocks = 0;
  std::vector<std::vector<std::vector<FieldMatrix>>> m;
};

BlockHatSet block_cp_pipeline(const CompiledNetwork& net, const LecAssignment& lecs, const DftCtx& dft_k);

// Gathers bin q (newest-first position q) of every block: [x(l=1); x(l=2); ...].
std::vector<FieldElement> bin_vector(const std::vector<std::vector<FieldElement>>& blocks, std::size_t q,
                                     std::size_t width, std::size_t k);
void scatter_bin(std::vector<std::vector<FieldElement>>& blocks, std::size_t q, std::size_t width, std::size_t k,
                 const std::vector<FieldElement>& v);

// x[i][l] is block l of source i, k*mu newest-first; returns y[j][l] after
// per-block prefix removal and inverse DFT. The schedule must be in block mode
// with k, d_max and origin -d_max matching.
std::vector<std::vector<std::vector<FieldElement>>> block_cp_run(
    const CompiledNetwork& net, const LecAssignment& lecs, const DftCtx& dft_k,
    const std::vector<std::vector<std::vector<FieldElement>>>& x);

}  // namespace delaynet

#endif
