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

#include "delaynet/galois.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace delaynet {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

u64 powmod(u64 a, u64 e, u64 n) {
  u64 r = 1 % n;
  a %= n;
  while (e) {
    if (e & 1) r = mulmod(r, a, n);
    a = mulmod(a, a, n);
    e >>= 1;
  }
  return r;
}

u64 gcd_u64(u64 a, u64 b) {
  while (b) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = gcd_u64(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  for (u64 d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    if (n % d == 0) {
      out.push_back(d);
      factor_into(n / d, out);
      return;
    }
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

// Dense polynomials over GF(p), low-to-high.
using Poly = std::vector<u64>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, u64 p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const u64 lead_inv = powmod(m.back(), p - 2, p);
  while (a.size() > dm) {
    const u64 c = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = (a[shift + i] + p - mulmod(c, m[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, u64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  }
  return poly_mod(std::move(r), m, p);
}

Poly poly_powmod(Poly a, u64 e, const Poly& m, u64 p) {
  Poly r{1};
  a = poly_mod(std::move(a), m, p);
  while (e) {
    if (e & 1) r = poly_mulmod(r, a, m, p);
    a = poly_mulmod(a, a, m, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<u64> parse_uint(std::string_view s) {
  s = strip(s);
  if (s.empty()) return std::nullopt;
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_plus(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '+') {
      out.push_back(strip(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

// Parses "c*v^k", "v^k", "v", "c" for variable letter v. Returns (coef, exponent).
std::optional<std::pair<u64, u64>> parse_term(std::string_view t, char var) {
  t = strip(t);
  if (t.empty()) return std::nullopt;
  u64 coef = 1;
  const auto star = t.find('*');
  if (star != std::string_view::npos) {
    auto c = parse_uint(t.substr(0, star));
    if (!c) return std::nullopt;
    coef = *c;
    t = strip(t.substr(star + 1));
  } else if (auto c = parse_uint(t)) {
    return std::make_pair(*c, u64{0});
  }
  if (t.empty() || t[0] != var) return std::nullopt;
  t.remove_prefix(1);
  t = strip(t);
  if (t.empty()) return std::make_pair(coef, u64{1});
  if (t[0] != '^') return std::nullopt;
  auto e = parse_uint(t.substr(1));
  if (!e) return std::nullopt;
  return std::make_pair(coef, *e);
}

struct FieldKey {
  u64 p;
  std::vector<u64> modulus;
  bool operator<(const FieldKey& o) const {
    return std::tie(p, modulus) < std::tie(o.p, o.modulus);
  }
};

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<FieldKey, FieldPtr>& registry() {
  static std::map<FieldKey, FieldPtr> r;
  return r;
}

std::map<std::pair<u64, unsigned>, FieldPtr>& default_registry() {
  static std::map<std::pair<u64, unsigned>, FieldPtr> r;
  return r;
}

constexpr u64 kTableLimit = u64{1} << 20;

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 sp : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % sp == 0) return n == sp;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> f;
  factor_into(n, f);
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

// Ben-Or: f of degree m is irreducible iff gcd(x^(p^i) - x, f) = 1 for
// 1 <= i <= m/2.
bool is_irreducible(u64 p, const std::vector<u64>& poly) {
  Poly f = poly;
  for (auto& c : f) c %= p;
  trim(f);
  if (f.size() < 2) return false;
  const std::size_t m = f.size() - 1;
  if (m == 1) return true;
  if (f[0] == 0) return false;
  Poly xp{0, 1};
  for (std::size_t i = 1; i <= m / 2; ++i) {
    xp = poly_powmod(xp, p, f, p);
    Poly g = xp;
    g.resize(std::max<std::size_t>(g.size(), 2), 0);
    g[1] = (g[1] + p - 1) % p;
    trim(g);
    if (g.empty()) return false;
    Poly d = poly_gcd(f, g, p);
    if (d.size() > 1) return false;
  }
  return true;
}

std::vector<u64> default_modulus(u64 p, unsigned m) {
  std::vector<u64> f(m + 1, 0);
  f[m] = 1;
  if (m == 1) return f;
  u64 limit = 1;
  for (unsigned i = 0; i < m; ++i) limit *= p;
  for (u64 low = 0; low < limit; ++low) {
    u64 v = low;
    for (unsigned i = 0; i < m; ++i) {
      f[i] = v % p;
      v /= p;
    }
    if (is_irreducible(p, f)) return f;
  }
  throw std::logic_error("no irreducible polynomial found");
}

GaloisField::GaloisField(u64 p, unsigned m, std::vector<u64> modulus)
    : p_(p), m_(m), q_(1), modulus_(std::move(modulus)) {
  for (unsigned i = 0; i < m; ++i) q_ *= p;
  if (p == 2) {
    for (unsigned i = 0; i <= m; ++i) {
      if (modulus_[i]) modulus_bits_ |= u64{1} << i;
    }
  }
  find_primitive();
  if (q_ <= kTableLimit && q_ > 2) {
    exp_.assign(2 * (q_ - 1), 0);
    log_.assign(q_, 0);
    u64 x = 1;
    for (u64 k = 0; k < q_ - 1; ++k) {
      exp_[k] = static_cast<std::uint32_t>(x);
      exp_[k + q_ - 1] = static_cast<std::uint32_t>(x);
      log_[x] = static_cast<std::uint32_t>(k);
      x = mul_slow(x, primitive_);
    }
  }
}

void GaloisField::find_primitive() {
  if (q_ == 2) {
    primitive_ = 1;
    return;
  }
  const auto factors = prime_factors(q_ - 1);
  auto is_gen = [&](u64 g) {
    if (g == 0) return false;
    for (u64 r : factors) {
      u64 v = 1, b = g, e = (q_ - 1) / r;
      while (e) {
        if (e & 1) v = mul_slow(v, b);
        b = mul_slow(b, b);
        e >>= 1;
      }
      if (v == 1) return false;
    }
    return true;
  };
  if (m_ > 1 && is_gen(p_)) {
    primitive_ = p_;
    return;
  }
  for (u64 g = 2; g < q_; ++g) {
    if (is_gen(g)) {
      primitive_ = g;
      return;
    }
  }
  primitive_ = 1;
}

std::vector<u64> GaloisField::digits(u64 rep) const {
  std::vector<u64> d(m_, 0);
  if (p_ == 2) {
    for (unsigned i = 0; i < m_; ++i) d[i] = (rep >> i) & 1;
  } else {
    for (unsigned i = 0; i < m_; ++i) {
      d[i] = rep % p_;
      rep /= p_;
    }
  }
  return d;
}

u64 GaloisField::pack(const std::vector<u64>& d) const {
  u64 r = 0;
  if (p_ == 2) {
    for (std::size_t i = 0; i < d.size() && i < m_; ++i) r |= (d[i] & 1) << i;
    return r;
  }
  for (std::size_t i = std::min<std::size_t>(d.size(), m_); i-- > 0;) r = r * p_ + d[i] % p_;
  return r;
}

u64 GaloisField::add(u64 a, u64 b) const {
  if (p_ == 2) return a ^ b;
  if (m_ == 1) return (a + b) % p_;
  auto da = digits(a), db = digits(b);
  for (unsigned i = 0; i < m_; ++i) da[i] = (da[i] + db[i]) % p_;
  return pack(da);
}

u64 GaloisField::neg(u64 a) const {
  if (p_ == 2) return a;
  if (m_ == 1) return (p_ - a) % p_;
  auto da = digits(a);
  for (auto& c : da) c = (p_ - c) % p_;
  return pack(da);
}

u64 GaloisField::sub(u64 a, u64 b) const { return add(a, neg(b)); }

u64 GaloisField::mul_slow(u64 a, u64 b) const {
  if (p_ == 2) {
    u64 r = 0;
    const u64 top = u64{1} << m_;
    while (b) {
      if (b & 1) r ^= a;
      b >>= 1;
      a <<= 1;
      if (a & top) a ^= modulus_bits_;
    }
    return r;
  }
  if (m_ == 1) return mulmod(a, b, p_);
  Poly pa = digits(a), pb = digits(b);
  Poly r = poly_mulmod(pa, pb, modulus_, p_);
  r.resize(m_, 0);
  return pack(r);
}

u64 GaloisField::mul(u64 a, u64 b) const {
  if (a == 0 || b == 0) return 0;
  if (!exp_.empty()) return exp_[log_[a] + log_[b]];
  return mul_slow(a, b);
}

u64 GaloisField::pow(u64 a, u64 e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (!exp_.empty()) {
    const u64 k = static_cast<u64>(static_cast<u128>(log_[a]) * (e % (q_ - 1)) % (q_ - 1));
    return exp_[k];
  }
  u64 r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

u64 GaloisField::inv(u64 a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  if (!exp_.empty()) return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  return pow(a, q_ - 2);
}

u64 GaloisField::log(u64 rep) const {
  if (rep == 0) throw std::domain_error("log of zero");
  if (exp_.empty()) {
    if (q_ == 2) return 0;
    throw std::logic_error("log tables unavailable for field " + descriptor());
  }
  return log_[rep];
}

FieldElement GaloisField::zero() const { return FieldElement(*this, 0); }
FieldElement GaloisField::one() const { return FieldElement(*this, 1); }
FieldElement GaloisField::primitive() const { return FieldElement(*this, primitive_); }

FieldElement GaloisField::element(u64 rep) const {
  if (rep >= q_) throw std::out_of_range("element representation out of range");
  return FieldElement(*this, rep);
}

FieldElement GaloisField::from_integer(std::int64_t v) const {
  const auto pp = static_cast<std::int64_t>(p_);
  std::int64_t r = v % pp;
  if (r < 0) r += pp;
  return FieldElement(*this, static_cast<u64>(r));
}

FieldElement GaloisField::from_coefficients(const std::vector<u64>& c) const {
  if (c.size() > m_) {
    for (std::size_t i = m_; i < c.size(); ++i) {
      if (c[i] % p_) throw std::invalid_argument("coefficient vector longer than extension degree");
    }
  }
  return FieldElement(*this, pack(c));
}

std::string GaloisField::modulus_string() const {
  std::string s;
  for (std::size_t i = 0; i < modulus_.size(); ++i) {
    const u64 c = modulus_[i];
    if (!c) continue;
    if (!s.empty()) s += "+";
    if (i == 0) {
      s += std::to_string(c);
      continue;
    }
    if (c != 1) s += std::to_string(c) + "*";
    s += "x";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s;
}

std::string GaloisField::descriptor() const {
  return std::to_string(p_) + "^" + std::to_string(m_) + ":" + modulus_string();
}

const GaloisField& FieldElement::field() const {
  if (!field_) throw std::logic_error("element has no field context");
  return *field_;
}

void FieldElement::same_field(const FieldElement& o) const {
  if (field_ != o.field_ || !field_) {
    throw FieldMismatch("arithmetic between elements of different fields");
  }
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  same_field(o);
  return FieldElement(*field_, field_->add(rep_, o.rep_));
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  same_field(o);
  return FieldElement(*field_, field_->sub(rep_, o.rep_));
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  same_field(o);
  return FieldElement(*field_, field_->mul(rep_, o.rep_));
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
  same_field(o);
  return FieldElement(*field_, field_->mul(rep_, field_->inv(o.rep_)));
}

FieldElement FieldElement::operator-() const { return FieldElement(field(), field_->neg(rep_)); }

bool FieldElement::operator==(const FieldElement& o) const {
  same_field(o);
  return rep_ == o.rep_;
}

FieldElement FieldElement::inverse() const { return FieldElement(field(), field_->inv(rep_)); }

FieldElement FieldElement::pow(std::int64_t e) const {
  const GaloisField& f = field();
  if (e >= 0) return FieldElement(f, f.pow(rep_, static_cast<u64>(e)));
  if (rep_ == 0) throw std::domain_error("negative power of zero");
  const u64 k = static_cast<u64>(-(e + 1)) % (f.order() - 1) + 1;
  return FieldElement(f, f.inv(f.pow(rep_, k)));
}

FieldPtr make_field(u64 p, unsigned m, std::optional<std::vector<u64>> modulus) {
  if (!is_prime(p)) throw std::invalid_argument("field characteristic " + std::to_string(p) + " is not prime");
  if (p >= (u64{1} << 32)) throw std::invalid_argument("characteristic too large");
  if (m == 0) throw std::invalid_argument("extension degree must be positive");
  long double q = 1;
  for (unsigned i = 0; i < m; ++i) q *= static_cast<long double>(p);
  if (q > static_cast<long double>(u64{1} << 62)) throw std::invalid_argument("field too large");

  std::lock_guard<std::mutex> lock(registry_mutex());
  if (!modulus) {
    auto it = default_registry().find({p, m});
    if (it != default_registry().end()) return it->second;
  }
  std::vector<u64> mod;
  if (modulus) {
    mod = *modulus;
    for (auto& c : mod) c %= p;
    trim(mod);
    if (mod.size() != m + 1) {
      throw std::invalid_argument("modulus degree does not match extension degree");
    }
    if (mod.back() != 1) throw std::invalid_argument("modulus must be monic");
    if (!is_irreducible(p, mod)) throw std::invalid_argument("modulus is reducible");
  } else {
    mod = default_modulus(p, m);
  }
  FieldKey key{p, mod};
  auto it = registry().find(key);
  if (it == registry().end()) {
    FieldPtr f(new GaloisField(p, m, mod));
    it = registry().emplace(std::move(key), std::move(f)).first;
  }
  if (!modulus) default_registry()[{p, m}] = it->second;
  return it->second;
}

FieldPtr field_ptr(const GaloisField& f) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(FieldKey{f.p(), f.modulus()});
  if (it == registry().end() || it->second.get() != &f) {
    throw std::logic_error("field context not registered");
  }
  return it->second;
}

FieldPtr parse_field(std::string_view text) {
  text = strip(text);
  const auto colon = text.find(':');
  std::string_view head = strip(text.substr(0, colon));
  u64 p = 0;
  unsigned m = 1;
  const auto caret = head.find('^');
  if (caret == std::string_view::npos) {
    auto v = parse_uint(head);
    if (!v) throw std::invalid_argument("bad field literal '" + std::string(text) + "'");
    p = *v;
  } else {
    auto pv = parse_uint(head.substr(0, caret));
    auto mv = parse_uint(head.substr(caret + 1));
    if (!pv || !mv || *mv == 0 || *mv > 64) {
      throw std::invalid_argument("bad field literal '" + std::string(text) + "'");
    }
    p = *pv;
    m = static_cast<unsigned>(*mv);
  }
  if (colon == std::string_view::npos) return make_field(p, m);
  std::vector<u64> mod;
  for (auto term : split_plus(text.substr(colon + 1))) {
    auto t = parse_term(term, 'x');
    if (!t) throw std::invalid_argument("bad modulus term '" + std::string(term) + "'");
    if (t->second > 64) throw std::invalid_argument("modulus degree too large");
    if (mod.size() <= t->second) mod.resize(t->second + 1, 0);
    mod[t->second] = (mod[t->second] + t->first) % p;
  }
  return make_field(p, m, mod);
}

u64 element_order(const FieldElement& x) {
  if (x.is_zero()) throw std::domain_error("order of zero element");
  const GaloisField& f = x.field();
  u64 order = f.order() - 1;
  for (u64 r : prime_factors(f.order() - 1)) {
    while (order % r == 0 && f.pow(x.rep(), order / r) == 1) order /= r;
  }
  return order;
}

FieldElement nth_root_of_unity(const GaloisField& f, u64 n) {
  if (n == 0 || (f.order() - 1) % n != 0) {
    throw std::invalid_argument(std::to_string(n) + " does not divide " + std::to_string(f.order() - 1));
  }
  return f.primitive().pow(static_cast<std::int64_t>((f.order() - 1) / n));
}

std::optional<unsigned> min_extension_for_order(u64 p, u64 n) {
  if (n == 0) throw std::invalid_argument("order must be positive");
  if (n == 1) return 1u;
  if (n % p == 0) return std::nullopt;
  u64 v = p % n;
  unsigned k = 1;
  while (v != 1) {
    v = mulmod(v, p, n);
    ++k;
  }
  return k;
}

FieldElement parse_element(const GaloisField& f, std::string_view text) {
  text = strip(text);
  if (text.empty()) throw std::invalid_argument("empty element literal");
  if (text.front() == '[') {
    if (text.back() != ']') throw std::invalid_argument("bad element literal '" + std::string(text) + "'");
    std::vector<u64> c;
    std::string_view body = text.substr(1, text.size() - 2);
    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
      if (i == body.size() || body[i] == ',') {
        auto part = strip(body.substr(start, i - start));
        start = i + 1;
        if (part.empty() && i == body.size() && c.empty()) break;
        auto v = parse_uint(part);
        if (!v) throw std::invalid_argument("bad coefficient in '" + std::string(text) + "'");
        c.push_back(*v % f.p());
      }
    }
    return f.from_coefficients(c);
  }
  FieldElement acc = f.zero();
  for (auto term : split_plus(text)) {
    std::optional<std::pair<u64, u64>> t;
    bool primitive_power = false;
    if ((t = parse_term(term, 'b'))) {
      primitive_power = true;
    } else if (!(t = parse_term(term, 'x'))) {
      throw std::invalid_argument("bad element literal '" + std::string(text) + "'");
    }
    const FieldElement coef = f.from_integer(static_cast<std::int64_t>(t->first % f.p()));
    FieldElement base = primitive_power ? f.primitive() : f.element(f.m() > 1 ? f.p() : 0);
    if (!primitive_power && f.m() == 1 && t->second > 0) {
      throw std::invalid_argument("x is not an element of a prime field");
    }
    acc += coef * base.pow(static_cast<std::int64_t>(t->second));
  }
  return acc;
}

bool looks_like_element_literal(std::string_view text) {
  text = strip(text);
  if (text.empty()) return false;
  const bool shaped = text.front() == '[' || text.find('^') != std::string_view::npos ||
                      text.find('+') != std::string_view::npos ||
                      std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  if (!shaped) return false;
  if (text.front() == '[') return true;
  for (auto term : split_plus(text)) {
    if (!parse_term(term, 'b') && !parse_term(term, 'x')) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x) {
  return os << (x.valid() ? format_element(x) : std::string("<invalid>"));
}

std::string format_element(const FieldElement& x) {
  if (x.is_zero()) return "0";
  if (x.is_one()) return "1";
  const GaloisField& f = x.field();
  if (f.has_tables()) return "b^" + std::to_string(f.log(x.rep()));
  const auto d = f.digits(x.rep());
  std::string s = "[";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(d[i]);
  }
  return s + "]";
}

FieldEmbedding::FieldEmbedding(FieldPtr from, FieldPtr to) : from_(std::move(from)), to_(std::move(to)) {
  if (from_->p() != to_->p() || to_->m() % from_->m() != 0) {
    throw std::invalid_argument("no embedding from GF(" + from_->descriptor() + ") into GF(" +
                                to_->descriptor() + ")");
  }
  const unsigned m = from_->m();
  basis_images_.assign(m, 1);
  if (m == 1) return;
  const u64 ratio = (to_->order() - 1) / (from_->order() - 1);
  const FieldElement gamma = to_->primitive().pow(static_cast<std::int64_t>(ratio));
  auto eval_modulus = [&](const FieldElement& r) {
    FieldElement acc = to_->zero();
    for (std::size_t i = from_->modulus().size(); i-- > 0;) {
      acc = acc * r + to_->from_integer(static_cast<std::int64_t>(from_->modulus()[i]));
    }
    return acc;
  };
  FieldElement r = gamma;
  bool found = false;
  for (u64 j = 1; j < from_->order(); ++j) {
    if (eval_modulus(r).is_zero()) {
      gamma_exponent_ = j;
      found = true;
      break;
    }
    r *= gamma;
  }
  if (!found) throw std::logic_error("modulus has no root in extension field");
  FieldElement pw = to_->one();
  for (unsigned i = 0; i < m; ++i) {
    basis_images_[i] = pw.rep();
    pw *= r;
  }
}

FieldElement FieldEmbedding::operator()(const FieldElement& x) const {
  if (&x.field() != from_.get()) throw FieldMismatch("element is not in the embedding's source field");
  if (from_ == to_) return x;
  const auto d = from_->digits(x.rep());
  u64 acc = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d[i]) continue;
    acc = to_->add(acc, to_->mul(to_->from_integer(static_cast<std::int64_t>(d[i])).rep(), basis_images_[i]));
  }
  return FieldElement(*to_, acc);
}

std::optional<FieldElement> FieldEmbedding::preimage(const FieldElement& y) const {
  if (&y.field() != to_.get()) throw FieldMismatch("element is not in the embedding's target field");
  if (from_ == to_) return y;
  const u64 p = from_->p();
  const unsigned m = from_->m();
  const unsigned b = to_->m();
  // Solve sum_i c_i * digits(basis_i) = digits(y) over GF(p).
  std::vector<std::vector<u64>> a(b, std::vector<u64>(m + 1, 0));
  for (unsigned i = 0; i < m; ++i) {
    const auto d = to_->digits(basis_images_[i]);
    for (unsigned r = 0; r < b; ++r) a[r][i] = d[r];
  }
  const auto dy = to_->digits(y.rep());
  for (unsigned r = 0; r < b; ++r) a[r][m] = dy[r];
  std::vector<int> pivot_col;
  unsigned row = 0;
  for (unsigned c = 0; c < m && row < b; ++c) {
    unsigned sel = row;
    while (sel < b && a[sel][c] == 0) ++sel;
    if (sel == b) continue;
    std::swap(a[sel], a[row]);
    const u64 iv = powmod(a[row][c], p - 2, p);
    for (auto& v : a[row]) v = mulmod(v, iv, p);
    for (unsigned r = 0; r < b; ++r) {
      if (r == row || a[r][c] == 0) continue;
      const u64 f = a[r][c];
      for (unsigned k = 0; k <= m; ++k) a[r][k] = (a[r][k] + p - mulmod(f, a[row][k], p)) % p;
    }
    pivot_col.push_back(static_cast<int>(c));
    ++row;
  }
  for (unsigned r = row; r < b; ++r) {
    if (a[r][m] != 0) return std::nullopt;
  }
  std::vector<u64> c(m, 0);
  for (unsigned r = 0; r < row; ++r) c[pivot_col[r]] = a[r][m];
  return from_->from_coefficients(c);
}

const FieldEmbedding& embedding(const FieldPtr& from, const FieldPtr& to) {
  static std::mutex mu;
  static std::map<std::pair<const GaloisField*, const GaloisField*>, std::unique_ptr<FieldEmbedding>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{from.get(), to.get()}];
  if (!slot) slot = std::make_unique<FieldEmbedding>(from, to);
  return *slot;
}

FieldElement embed(const FieldElement& x, const GaloisField& to) {
  if (&x.field() == &to) return x;
  return embedding(field_ptr(x.field()), field_ptr(to))(x);
}

}  // namespace delaynet
