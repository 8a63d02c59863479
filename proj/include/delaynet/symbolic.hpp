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

#ifndef DELAYNET_SYMBOLIC_HPP
#define DELAYNET_SYMBOLIC_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delaynet/galois.hpp"

namespace delaynet {

// "a", "a@-1" (time index), "a#2" (block index).
struct LecSymbol {
  std::string name;
  std::optional<long> time;
  std::optional<long> block;

  std::string to_string() const;
  static LecSymbol parse(std::string_view text);
  auto operator<=>(const LecSymbol&) const = default;
};

using SymbolId = std::uint32_t;
SymbolId intern(const LecSymbol& s);
const LecSymbol& symbol_of(SymbolId id);

class TermBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kTermBudget = 20000;

using Monomial = std::vector<std::pair<SymbolId, std::uint32_t>>;
using Assignment = std::map<SymbolId, FieldElement>;

class MultiPoly {
 public:
  explicit MultiPoly(const GaloisField& f) : field_(&f) {}
  static MultiPoly constant(const FieldElement& c);
  static MultiPoly variable(const GaloisField& f, SymbolId s);
  static MultiPoly variable(const GaloisField& f, const LecSymbol& s) { return variable(f, intern(s)); }

  const GaloisField& field() const { return *field_; }
  const std::map<Monomial, FieldElement>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  std::optional<FieldElement> constant_value() const;
  unsigned total_degree() const;
  std::vector<SymbolId> variables() const;

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;  // within kTermBudget
  MultiPoly operator*(const FieldElement& c) const;
  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  bool operator==(const MultiPoly& o) const;
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }
  MultiPoly multiply(const MultiPoly& o, std::size_t budget) const;

  void add_term(const Monomial& m, const FieldElement& c);
  // Divides out the largest monomial dividing every term.
  Monomial content() const;
  MultiPoly divided_by_monomial(const Monomial& m) const;

  FieldElement evaluate(const Assignment& a, const GaloisField& target) const;
  MultiPoly mapped(const GaloisField& target) const;
  std::string to_string() const;

 private:
  const GaloisField* field_;
  std::map<Monomial, FieldElement> terms_;
};

bool mp_identical_zero(const MultiPoly& f);

class RationalFn {
 public:
  explicit RationalFn(MultiPoly num);
  RationalFn(MultiPoly num, MultiPoly den);

  const MultiPoly& num() const { return num_; }
  const MultiPoly& den() const { return den_; }
  const GaloisField& field() const { return num_.field(); }
  bool is_zero() const { return num_.is_zero(); }

  RationalFn operator+(const RationalFn& o) const;
  RationalFn operator-(const RationalFn& o) const;
  RationalFn operator*(const RationalFn& o) const;
  RationalFn operator/(const RationalFn& o) const;
  RationalFn operator-() const;
  RationalFn inverse() const;

  // nullopt when the denominator vanishes at the point.
  std::optional<FieldElement> evaluate(const Assignment& a, const GaloisField& target) const;
  std::vector<SymbolId> variables() const;
  unsigned total_degree() const;
  std::string to_string() const;

 private:
  void normalize();
  MultiPoly num_, den_;
};

enum class IdentityKind { EqualExact, EqualProbable, Different };
const char* to_string(IdentityKind k);

struct RandomTestOptions {
  unsigned trials = 32;
  std::uint64_t seed = 0;
  FieldPtr eval_field;  // default: an extension with at least 2^20 elements
  std::size_t term_budget = kTermBudget;
};

struct IdentityVerdict {
  IdentityKind kind = IdentityKind::EqualExact;
  Assignment witness;
  double failure_bound = 0.0;
  FieldPtr eval_field;
};

IdentityVerdict rf_probably_equal(const RationalFn& f, const RationalFn& g, const RandomTestOptions& opt = {});
// Exact: f is constant iff num = c * den for the ratio c of matching leading terms.
std::optional<FieldElement> rf_is_constant(const RationalFn& f);
FieldPtr default_eval_field(const GaloisField& f);
// Seeded uniform draw of every variable; draw index distinguishes redraws.
Assignment random_point(const std::vector<SymbolId>& vars, const GaloisField& f, std::uint64_t seed,
                        std::uint64_t trial, std::uint64_t draw, bool nonzero = false);

// Dense matrix over the field of rational functions in LEC symbols.
class RationalMatrix {
 public:
  RationalMatrix(const GaloisField& f, std::size_t rows, std::size_t cols);
  static RationalMatrix identity(const GaloisField& f, std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  RationalFn& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const RationalFn& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalMatrix operator*(const RationalMatrix& o) const;
  // Exact Gauss-Jordan; throws SingularMatrix-like domain_error when singular.
  RationalMatrix inverse() const;
  // Exact test against the identity (cross-multiplied).
  bool is_identity() const;

 private:
  const GaloisField* field_;
  std::size_t rows_, cols_;
  std::vector<RationalFn> data_;
};

}  // namespace delaynet

#endif
