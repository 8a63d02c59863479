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

#ifndef DELAYNET_GALOIS_HPP
#define DELAYNET_GALOIS_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace delaynet {

class FieldMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FieldElement;

// GF(p^m). Elements are packed as base-p digit strings in a uint64_t, digit i
// being the coefficient of x^i. Contexts are interned and never destroyed, so
// two elements belong to the same field iff their context pointers match.
class GaloisField {
 public:
  std::uint64_t p() const { return p_; }
  unsigned m() const { return m_; }
  std::uint64_t order() const { return q_; }
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement primitive() const;
  FieldElement element(std::uint64_t rep) const;
  FieldElement from_integer(std::int64_t v) const;
  FieldElement from_coefficients(const std::vector<std::uint64_t>& c) const;

  // "2^6:1+x+x^6"
  std::string descriptor() const;
  std::string modulus_string() const;

  bool has_tables() const { return !exp_.empty(); }
  // Exponent k with primitive^k == x; requires tables and x != 0.
  std::uint64_t log(std::uint64_t rep) const;

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t neg(std::uint64_t a) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inv(std::uint64_t a) const;
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;

  std::vector<std::uint64_t> digits(std::uint64_t rep) const;
  std::uint64_t pack(const std::vector<std::uint64_t>& digits) const;

 private:
  friend std::shared_ptr<const GaloisField> make_field(
      std::uint64_t, unsigned, std::optional<std::vector<std::uint64_t>>);
  GaloisField(std::uint64_t p, unsigned m, std::vector<std::uint64_t> modulus);
  std::uint64_t mul_slow(std::uint64_t a, std::uint64_t b) const;
  void find_primitive();

  std::uint64_t p_;
  unsigned m_;
  std::uint64_t q_;
  std::vector<std::uint64_t> modulus_;
  std::uint64_t modulus_bits_ = 0;  // p == 2 only
  std::uint64_t primitive_ = 0;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
};

using FieldPtr = std::shared_ptr<const GaloisField>;

class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(const GaloisField& f, std::uint64_t rep) : field_(&f), rep_(rep) {}

  bool valid() const { return field_ != nullptr; }
  const GaloisField& field() const;
  std::uint64_t rep() const { return rep_; }
  bool is_zero() const { return rep_ == 0; }
  bool is_one() const { return rep_ == 1; }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
  bool operator==(const FieldElement& o) const;
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  FieldElement inverse() const;
  FieldElement pow(std::int64_t e) const;

 private:
  void same_field(const FieldElement& o) const;
  const GaloisField* field_ = nullptr;
  std::uint64_t rep_ = 0;
};

FieldPtr make_field(std::uint64_t p, unsigned m,
                    std::optional<std::vector<std::uint64_t>> modulus = std::nullopt);
// Shared pointer for a context obtained from an element.
FieldPtr field_ptr(const GaloisField& f);

// "2^6:1+x+x^6", "2^6", "7"
FieldPtr parse_field(std::string_view text);

std::uint64_t element_order(const FieldElement& x);
FieldElement nth_root_of_unity(const GaloisField& f, std::uint64_t n);
// Smallest m with n | p^m - 1, or nullopt when p | n.
std::optional<unsigned> min_extension_for_order(std::uint64_t p, std::uint64_t n);

bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);
bool is_irreducible(std::uint64_t p, const std::vector<std::uint64_t>& poly);
std::vector<std::uint64_t> default_modulus(std::uint64_t p, unsigned m);

// Element literals: "0", "1", "b^9", "1+b^4", "2*b^3", "[1,0,1]" (coefficients
// of x^0, x^1, ... in the polynomial basis), "x^2+x".
FieldElement parse_element(const GaloisField& f, std::string_view text);
bool looks_like_element_literal(std::string_view text);
// "0", or "b^k" when log tables exist, else "[c0,c1,...]".
std::string format_element(const FieldElement& x);
std::ostream& operator<<(std::ostream& os, const FieldElement& x);

// Field homomorphism GF(p^m) -> GF(p^b), m | b. x is sent to the first root
// of the source modulus among gamma, gamma^2, ... where
// gamma = primitive^((p^b-1)/(p^m-1)).
class FieldEmbedding {
 public:
  FieldEmbedding(FieldPtr from, FieldPtr to);
  const FieldPtr& from() const { return from_; }
  const FieldPtr& to() const { return to_; }
  FieldElement operator()(const FieldElement& x) const;
  std::optional<FieldElement> preimage(const FieldElement& y) const;
  std::uint64_t gamma_exponent() const { return gamma_exponent_; }

 private:
  FieldPtr from_;
  FieldPtr to_;
  std::vector<std::uint64_t> basis_images_;
  std::uint64_t gamma_exponent_ = 1;
};

const FieldEmbedding& embedding(const FieldPtr& from, const FieldPtr& to);
// Maps x into `to`; identity when already there.
FieldElement embed(const FieldElement& x, const GaloisField& to);

}  // namespace delaynet

#endif
