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

#include "delaynet/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <random>

namespace delaynet {

namespace {

std::mutex& symbol_mutex() {
  static std::mutex m;
  return m;
}

struct SymbolTable {
  std::deque<LecSymbol> symbols;
  std::map<LecSymbol, SymbolId> ids;
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      r.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      r.push_back(b[j++]);
    } else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      r.emplace_back(a[i].first, std::min(a[i].second, b[j].second));
      ++i;
      ++j;
    }
  }
  return r;
}

std::string mono_string(const Monomial& m) {
  std::vector<std::pair<std::string, std::uint32_t>> parts;
  for (const auto& [id, e] : m) parts.emplace_back(symbol_of(id).to_string(), e);
  std::sort(parts.begin(), parts.end());
  std::string s;
  for (const auto& [name, e] : parts) {
    if (!s.empty()) s += "*";
    s += name;
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

}  // namespace

std::string LecSymbol::to_string() const {
  std::string s = name;
  if (time) s += "@" + std::to_string(*time);
  if (block) s += "#" + std::to_string(*block);
  return s;
}

LecSymbol LecSymbol::parse(std::string_view text) {
  LecSymbol s;
  const auto at = text.find('@');
  const auto hash = text.find('#');
  const auto end = std::min(at, hash);
  s.name = std::string(text.substr(0, end));
  if (s.name.empty()) throw std::invalid_argument("empty LEC symbol name");
  auto num = [&](std::size_t pos) {
    std::size_t stop = text.find_first_of("@#", pos + 1);
    std::string part(text.substr(pos + 1, stop == std::string_view::npos ? std::string_view::npos : stop - pos - 1));
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size()) {
      throw std::invalid_argument("bad LEC symbol index in '" + std::string(text) + "'");
    }
    return v;
  };
  if (at != std::string_view::npos) s.time = num(at);
  if (hash != std::string_view::npos) s.block = num(hash);
  return s;
}

SymbolId intern(const LecSymbol& s) {
  std::lock_guard<std::mutex> lock(symbol_mutex());
  auto& t = table();
  auto it = t.ids.find(s);
  if (it != t.ids.end()) return it->second;
  const auto id = static_cast<SymbolId>(t.symbols.size());
  t.symbols.push_back(s);
  t.ids.emplace(s, id);
  return id;
}

const LecSymbol& symbol_of(SymbolId id) {
  std::lock_guard<std::mutex> lock(symbol_mutex());
  return table().symbols.at(id);
}

MultiPoly MultiPoly::constant(const FieldElement& c) {
  MultiPoly p(c.field());
  if (!c.is_zero()) p.terms_.emplace(Monomial{}, c);
  return p;
}

MultiPoly MultiPoly::variable(const GaloisField& f, SymbolId s) {
  MultiPoly p(f);
  p.terms_.emplace(Monomial{{s, 1}}, f.one());
  return p;
}

std::optional<FieldElement> MultiPoly::constant_value() const {
  if (terms_.empty()) return field_->zero();
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
  return std::nullopt;
}

unsigned MultiPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned s = 0;
    for (const auto& [id, e] : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

std::vector<SymbolId> MultiPoly::variables() const {
  std::vector<SymbolId> v;
  for (const auto& [m, c] : terms_)
    for (const auto& [id, e] : m) v.push_back(id);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void MultiPoly::add_term(const Monomial& m, const FieldElement& c) {
  if (&c.field() != field_) throw FieldMismatch("coefficient from another field");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
  MultiPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const { return *this + (-o); }

MultiPoly MultiPoly::multiply(const MultiPoly& o, std::size_t budget) const {
  if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
  if (terms_.size() * o.terms_.size() > budget) {
    throw TermBudgetExceeded("product would exceed " + std::to_string(budget) + " terms");
  }
  MultiPoly r(*field_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
  return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const { return multiply(o, kTermBudget); }

MultiPoly MultiPoly::operator*(const FieldElement& c) const {
  MultiPoly r(*field_);
  for (const auto& [m, v] : terms_) r.add_term(m, v * c);
  return r;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
  if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
  return terms_ == o.terms_;
}

Monomial MultiPoly::content() const {
  if (terms_.empty()) return {};
  Monomial g = terms_.begin()->first;
  for (const auto& [m, c] : terms_) g = mono_gcd(g, m);
  return g;
}

MultiPoly MultiPoly::divided_by_monomial(const Monomial& d) const {
  MultiPoly r(*field_);
  for (const auto& [m, c] : terms_) {
    Monomial q;
    std::size_t j = 0;
    for (const auto& [id, e] : m) {
      std::uint32_t sub = 0;
      if (j < d.size() && d[j].first == id) sub = d[j++].second;
      if (sub > e) throw std::logic_error("monomial does not divide term");
      if (e > sub) q.emplace_back(id, e - sub);
    }
    if (j != d.size()) throw std::logic_error("monomial does not divide term");
    r.terms_.emplace(std::move(q), c);
  }
  return r;
}

FieldElement MultiPoly::evaluate(const Assignment& a, const GaloisField& target) const {
  FieldElement acc = target.zero();
  for (const auto& [m, c] : terms_) {
    FieldElement t = embed(c, target);
    for (const auto& [id, e] : m) {
      auto it = a.find(id);
      if (it == a.end()) throw std::invalid_argument("no value for symbol " + symbol_of(id).to_string());
      t *= embed(it->second, target).pow(e);
    }
    acc += t;
  }
  return acc;
}

MultiPoly MultiPoly::mapped(const GaloisField& target) const {
  if (&target == field_) return *this;
  MultiPoly r(target);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, embed(c, target));
  return r;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<std::string, std::string>> parts;
  for (const auto& [m, c] : terms_) {
    const std::string ms = mono_string(m);
    std::string t;
    // Field literals are braced so that "b^k" never reads as a symbol b.
    const std::string cs = c.is_one() ? "1" : "{" + format_element(c) + "}";
    if (ms.empty()) {
      t = cs;
    } else if (c.is_one()) {
      t = ms;
    } else {
      t = cs + "*" + ms;
    }
    parts.emplace_back(ms, t);
  }
  std::sort(parts.begin(), parts.end());
  std::string s;
  for (const auto& [k, t] : parts) {
    if (!s.empty()) s += " + ";
    s += t;
  }
  return s;
}

bool mp_identical_zero(const MultiPoly& f) { return f.is_zero(); }

RationalFn::RationalFn(MultiPoly num) : num_(std::move(num)), den_(MultiPoly::constant(num_.field().one())) {}

RationalFn::RationalFn(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  if (&num_.field() != &den_.field()) throw FieldMismatch("numerator and denominator over different fields");
  normalize();
}

void RationalFn::normalize() {
  const GaloisField& f = num_.field();
  if (num_.is_zero()) {
    den_ = MultiPoly::constant(f.one());
    return;
  }
  const Monomial g = mono_gcd(num_.content(), den_.content());
  if (!g.empty()) {
    num_ = num_.divided_by_monomial(g);
    den_ = den_.divided_by_monomial(g);
  }
  if (auto c = rf_is_constant(*this); c && !den_.constant_value()) {
    num_ = MultiPoly::constant(*c);
    den_ = MultiPoly::constant(f.one());
    return;
  }
  const FieldElement lead = den_.terms().begin()->second;
  if (!lead.is_one()) {
    const FieldElement iv = lead.inverse();
    num_ = num_ * iv;
    den_ = den_ * iv;
  }
}

RationalFn RationalFn::operator+(const RationalFn& o) const {
  if (den_ == o.den_) return RationalFn(num_ + o.num_, den_);
  return RationalFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalFn RationalFn::operator-() const { return RationalFn(-num_, den_); }

RationalFn RationalFn::operator-(const RationalFn& o) const { return *this + (-o); }

RationalFn RationalFn::operator*(const RationalFn& o) const {
  return RationalFn(num_ * o.num_, den_ * o.den_);
}

RationalFn RationalFn::inverse() const {
  if (num_.is_zero()) throw std::domain_error("inverse of zero rational function");
  return RationalFn(den_, num_);
}

RationalFn RationalFn::operator/(const RationalFn& o) const { return *this * o.inverse(); }

std::optional<FieldElement> RationalFn::evaluate(const Assignment& a, const GaloisField& target) const {
  const FieldElement d = den_.evaluate(a, target);
  if (d.is_zero()) return std::nullopt;
  return num_.evaluate(a, target) / d;
}

std::vector<SymbolId> RationalFn::variables() const {
  auto v = num_.variables();
  auto w = den_.variables();
  v.insert(v.end(), w.begin(), w.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

unsigned RationalFn::total_degree() const { return std::max(num_.total_degree(), den_.total_degree()); }

std::string RationalFn::to_string() const {
  if (den_.constant_value()) return num_.to_string();
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

const char* to_string(IdentityKind k) {
  switch (k) {
    case IdentityKind::EqualExact:
      return "equal_exact";
    case IdentityKind::EqualProbable:
      return "equal_probable";
    case IdentityKind::Different:
      return "different";
  }
  return "?";
}

FieldPtr default_eval_field(const GaloisField& f) {
  const double bits = static_cast<double>(f.m()) * std::log2(static_cast<double>(f.p()));
  unsigned k = 1;
  while (bits * k < 20.0) ++k;
  return make_field(f.p(), f.m() * k);
}

Assignment random_point(const std::vector<SymbolId>& vars, const GaloisField& f, std::uint64_t seed,
                        std::uint64_t trial, std::uint64_t draw, bool nonzero) {
  std::vector<SymbolId> sorted = vars;
  std::sort(sorted.begin(), sorted.end(),
            [](SymbolId a, SymbolId b) { return symbol_of(a) < symbol_of(b); });
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(draw)};
  std::mt19937_64 rng(ss);
  Assignment a;
  for (SymbolId id : sorted) {
    const std::uint64_t v = nonzero ? 1 + rng() % (f.order() - 1) : rng() % f.order();
    a.emplace(id, f.element(v));
  }
  return a;
}

IdentityVerdict rf_probably_equal(const RationalFn& f, const RationalFn& g, const RandomTestOptions& opt) {
  if (opt.trials == 0) throw std::invalid_argument("trials must be positive");
  if (&f.field() != &g.field()) throw FieldMismatch("rational functions over different fields");
  IdentityVerdict v;
  v.eval_field = opt.eval_field ? opt.eval_field : default_eval_field(f.field());
  const GaloisField& ef = *v.eval_field;
  auto vars = f.variables();
  {
    auto w = g.variables();
    vars.insert(vars.end(), w.begin(), w.end());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  }

  std::optional<MultiPoly> diff;
  try {
    diff = f.num().multiply(g.den(), opt.term_budget) - g.num().multiply(f.den(), opt.term_budget);
  } catch (const TermBudgetExceeded&) {
    diff.reset();
  }
  if (diff && diff->is_zero()) {
    v.kind = IdentityKind::EqualExact;
    return v;
  }

  const std::uint64_t max_draws = 64;
  for (unsigned t = 0; t < opt.trials; ++t) {
    for (std::uint64_t d = 0; d < max_draws; ++d) {
      Assignment pt = random_point(vars, ef, opt.seed, t, d);
      auto fv = f.evaluate(pt, ef);
      auto gv = g.evaluate(pt, ef);
      if (!fv || !gv) {
        if (d + 1 == max_draws) {
          throw std::runtime_error("no denominator-nonzero point found; enlarge the evaluation field");
        }
        continue;
      }
      if (*fv != *gv) {
        v.kind = IdentityKind::Different;
        v.witness = std::move(pt);
        return v;
      }
      break;
    }
  }
  if (diff) {
    // Known to differ, yet every sampled point agreed.
    throw std::runtime_error("no witness found for a nonzero difference; enlarge the evaluation field");
  }
  const double deg = std::max(f.num().total_degree() + g.den().total_degree(),
                              g.num().total_degree() + f.den().total_degree());
  v.kind = IdentityKind::EqualProbable;
  v.failure_bound = std::pow(deg / static_cast<double>(ef.order()), static_cast<double>(opt.trials));
  return v;
}

std::optional<FieldElement> rf_is_constant(const RationalFn& f) {
  const MultiPoly& n = f.num();
  const MultiPoly& d = f.den();
  if (n.is_zero()) return f.field().zero();
  if (n.term_count() != d.term_count()) return std::nullopt;
  const auto& [mn, cn] = *n.terms().begin();
  const auto& [md, cd] = *d.terms().begin();
  if (mn != md) return std::nullopt;
  const FieldElement c = cn / cd;
  if (n == d * c) return c;
  return std::nullopt;
}

RationalMatrix::RationalMatrix(const GaloisField& f, std::size_t rows, std::size_t cols)
    : field_(&f), rows_(rows), cols_(cols), data_(rows * cols, RationalFn(MultiPoly(f))) {}

RationalMatrix RationalMatrix::identity(const GaloisField& f, std::size_t n) {
  RationalMatrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = RationalFn(MultiPoly::constant(f.one()));
  return m;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("dimension mismatch in rational matrix product");
  RationalMatrix r(*field_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < o.cols_; ++j) {
      RationalFn acc{MultiPoly(*field_)};
      for (std::size_t k = 0; k < cols_; ++k) {
        if ((*this)(i, k).is_zero() || o(k, j).is_zero()) continue;
        acc = acc + (*this)(i, k) * o(k, j);
      }
      r(i, j) = acc;
    }
  return r;
}

RationalMatrix RationalMatrix::inverse() const {
  if (rows_ != cols_) throw std::invalid_argument("inverse of non-square rational matrix");
  const std::size_t n = rows_;
  RationalMatrix a = *this;
  RationalMatrix inv = identity(*field_, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = n;
    for (std::size_t r = c; r < n; ++r) {
      if (a(r, c).is_zero()) continue;
      if (sel == n || a(r, c).num().term_count() + a(r, c).den().term_count() <
                          a(sel, c).num().term_count() + a(sel, c).den().term_count()) {
        sel = r;
      }
    }
    if (sel == n) throw std::domain_error("rational matrix is singular");
    if (sel != c) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a(sel, k), a(c, k));
        std::swap(inv(sel, k), inv(c, k));
      }
    }
    const RationalFn piv_inv = a(c, c).inverse();
    for (std::size_t k = 0; k < n; ++k) {
      if (!a(c, k).is_zero()) a(c, k) = a(c, k) * piv_inv;
      if (!inv(c, k).is_zero()) inv(c, k) = inv(c, k) * piv_inv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c).is_zero()) continue;
      const RationalFn factor = a(r, c);
      for (std::size_t k = 0; k < n; ++k) {
        if (!a(c, k).is_zero()) a(r, k) = a(r, k) - factor * a(c, k);
        if (!inv(c, k).is_zero()) inv(r, k) = inv(r, k) - factor * inv(c, k);
      }
    }
  }
  return inv;
}

bool RationalMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      const RationalFn& v = (*this)(i, j);
      if (i == j) {
        if (v.num() != v.den()) return false;
      } else if (!v.is_zero()) {
        return false;
      }
    }
  return true;
}

}  // namespace delaynet
