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

#ifndef DELAYNET_POLYMATRIX_HPP
#define DELAYNET_POLYMATRIX_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "delaynet/galois.hpp"

namespace delaynet {

class SingularMatrix : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Polynomial in the delay operator D; coefficient d multiplies D^d.
class DelayPoly {
 public:
  explicit DelayPoly(const GaloisField& f) : field_(&f) {}
  DelayPoly(const GaloisField& f, std::vector<FieldElement> coeffs);
  static DelayPoly constant(const FieldElement& c);
  static DelayPoly monomial(const FieldElement& c, std::size_t degree);

  const GaloisField& field() const { return *field_; }
  // nullopt is the degree of the zero polynomial.
  std::optional<std::size_t> degree() const;
  std::optional<std::size_t> low_degree() const;
  bool is_zero() const { return coeffs_.empty(); }
  FieldElement coeff(std::size_t d) const;
  const std::vector<FieldElement>& coeffs() const { return coeffs_; }
  void add_term(const FieldElement& c, std::size_t d);

  DelayPoly operator+(const DelayPoly& o) const;
  DelayPoly operator-(const DelayPoly& o) const;
  DelayPoly operator*(const DelayPoly& o) const;
  DelayPoly operator*(const FieldElement& c) const;
  DelayPoly operator-() const;
  DelayPoly& operator+=(const DelayPoly& o) { return *this = *this + o; }
  bool operator==(const DelayPoly& o) const;
  bool operator!=(const DelayPoly& o) const { return !(*this == o); }

  DelayPoly shifted(std::size_t k) const;           // times D^k
  DelayPoly unshifted(std::size_t k) const;         // divided by D^k, exact
  // Quotient and remainder; divisor must be nonzero.
  std::pair<DelayPoly, DelayPoly> divmod(const DelayPoly& divisor) const;
  DelayPoly exact_div(const DelayPoly& divisor) const;

  // Evaluates at c; c may live in an extension of this polynomial's field.
  FieldElement eval(const FieldElement& c) const;
  // "c0 + c1*D + c3*D^3"
  std::string to_string() const;

 private:
  void trim();
  void same_field(const DelayPoly& o) const;
  const GaloisField* field_;
  std::vector<FieldElement> coeffs_;
};

DelayPoly parse_delay_poly(const GaloisField& f, std::string_view text);
FieldElement poly_eval(const DelayPoly& f, const FieldElement& c);
// True iff (D - 1) divides f, i.e. f(1) = 0.
bool divides_Dminus1(const DelayPoly& f);

class FieldMatrix {
 public:
  FieldMatrix(const GaloisField& f, std::size_t rows, std::size_t cols);
  static FieldMatrix identity(const GaloisField& f, std::size_t n);
  static FieldMatrix diagonal(const GaloisField& f, const std::vector<FieldElement>& d);
  static FieldMatrix column(const GaloisField& f, const std::vector<FieldElement>& v);

  const GaloisField& field() const { return *field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const FieldElement& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  FieldMatrix operator*(const FieldMatrix& o) const;
  FieldMatrix operator+(const FieldMatrix& o) const;
  FieldMatrix operator-(const FieldMatrix& o) const;
  FieldMatrix operator*(const FieldElement& c) const;
  std::vector<FieldElement> operator*(const std::vector<FieldElement>& v) const;
  bool operator==(const FieldMatrix& o) const;
  bool operator!=(const FieldMatrix& o) const { return !(*this == o); }

  FieldMatrix transpose() const;
  FieldMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const FieldMatrix& b);
  FieldMatrix columns(const std::vector<std::size_t>& idx) const;
  std::vector<FieldElement> col(std::size_t c) const;
  bool is_zero() const;
  bool is_identity() const;
  bool is_diagonal() const;
  std::vector<FieldElement> diag() const;
  FieldMatrix mapped(const GaloisField& target) const;  // entrywise embedding
  std::string to_string() const;

 private:
  const GaloisField* field_;
  std::size_t rows_, cols_;
  std::vector<FieldElement> data_;
};

FieldMatrix hconcat(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix vconcat(const FieldMatrix& a, const FieldMatrix& b);
// a ⊗ I_k
FieldMatrix kron_identity(const FieldMatrix& a, std::size_t k);

std::size_t rank(const FieldMatrix& m);
FieldMatrix inverse(const FieldMatrix& m);
std::vector<FieldElement> solve(const FieldMatrix& m, const std::vector<FieldElement>& y);
// Unique x with m x = y for a full-column-rank m; nullopt if inconsistent.
std::optional<std::vector<FieldElement>> solve_full_column_rank(const FieldMatrix& m,
                                                                const std::vector<FieldElement>& y);
FieldElement determinant(const FieldMatrix& m);

inline std::size_t fieldmat_rank(const FieldMatrix& m) { return rank(m); }
inline FieldMatrix fieldmat_inverse(const FieldMatrix& m) { return inverse(m); }
inline std::vector<FieldElement> fieldmat_solve(const FieldMatrix& m, const std::vector<FieldElement>& y) {
  return solve(m, y);
}

class PolyMatrix {
 public:
  PolyMatrix(const GaloisField& f, std::size_t rows, std::size_t cols);
  static PolyMatrix identity(const GaloisField& f, std::size_t n);

  const GaloisField& field() const { return *field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  DelayPoly& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const DelayPoly& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  PolyMatrix operator*(const PolyMatrix& o) const;
  bool operator==(const PolyMatrix& o) const;
  bool is_zero() const;
  // Largest entry degree, nullopt for the zero matrix.
  std::optional<std::size_t> degree() const;
  std::optional<std::size_t> low_degree() const;
  // Coefficient matrix of D^d.
  FieldMatrix coefficient(std::size_t d) const;
  FieldMatrix eval(const FieldElement& c) const;
  PolyMatrix columns(const std::vector<std::size_t>& idx) const;
  PolyMatrix unshifted(std::size_t k) const;
  std::vector<std::vector<std::string>> to_strings() const;

 private:
  const GaloisField* field_;
  std::size_t rows_, cols_;
  std::vector<DelayPoly> data_;
};

// Exact determinant by fraction-free (Bareiss) elimination in GF(q)[D].
DelayPoly polymat_det(const PolyMatrix& m);

}  // namespace delaynet

#endif
