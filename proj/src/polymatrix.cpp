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

#include "delaynet/polymatrix.hpp"

#include <algorithm>
#include <cctype>

namespace delaynet {

namespace {

void check_dims(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Row echelon form in place; returns pivot columns.
std::vector<std::size_t> echelon(std::vector<std::vector<FieldElement>>& a, std::size_t ncols,
                                 bool reduce) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < ncols && row < a.size(); ++c) {
    std::size_t sel = row;
    while (sel < a.size() && a[sel][c].is_zero()) ++sel;
    if (sel == a.size()) continue;
    std::swap(a[sel], a[row]);
    const FieldElement iv = a[row][c].inverse();
    for (auto& v : a[row]) v *= iv;
    for (std::size_t r = reduce ? 0 : row + 1; r < a.size(); ++r) {
      if (r == row || a[r][c].is_zero()) continue;
      const FieldElement f = a[r][c];
      for (std::size_t k = c; k < a[r].size(); ++k) a[r][k] -= f * a[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

std::vector<std::vector<FieldElement>> rows_of(const FieldMatrix& m) {
  std::vector<std::vector<FieldElement>> a(m.rows(), std::vector<FieldElement>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) a[r][c] = m(r, c);
  return a;
}

}  // namespace

DelayPoly::DelayPoly(const GaloisField& f, std::vector<FieldElement> coeffs)
    : field_(&f), coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_) {
    if (&c.field() != field_) throw FieldMismatch("polynomial coefficient from another field");
  }
  trim();
}

DelayPoly DelayPoly::constant(const FieldElement& c) { return DelayPoly(c.field(), {c}); }

DelayPoly DelayPoly::monomial(const FieldElement& c, std::size_t degree) {
  std::vector<FieldElement> v(degree + 1, c.field().zero());
  v[degree] = c;
  return DelayPoly(c.field(), std::move(v));
}

void DelayPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

void DelayPoly::same_field(const DelayPoly& o) const {
  if (field_ != o.field_) throw FieldMismatch("polynomials over different fields");
}

std::optional<std::size_t> DelayPoly::degree() const {
  if (coeffs_.empty()) return std::nullopt;
  return coeffs_.size() - 1;
}

std::optional<std::size_t> DelayPoly::low_degree() const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!coeffs_[i].is_zero()) return i;
  }
  return std::nullopt;
}

FieldElement DelayPoly::coeff(std::size_t d) const {
  return d < coeffs_.size() ? coeffs_[d] : field_->zero();
}

void DelayPoly::add_term(const FieldElement& c, std::size_t d) {
  if (&c.field() != field_) throw FieldMismatch("polynomial coefficient from another field");
  if (c.is_zero()) return;
  if (coeffs_.size() <= d) coeffs_.resize(d + 1, field_->zero());
  coeffs_[d] += c;
  trim();
}

DelayPoly DelayPoly::operator+(const DelayPoly& o) const {
  same_field(o);
  std::vector<FieldElement> r(std::max(coeffs_.size(), o.coeffs_.size()), field_->zero());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) r[i] = coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) r[i] += o.coeffs_[i];
  return DelayPoly(*field_, std::move(r));
}

DelayPoly DelayPoly::operator-() const {
  std::vector<FieldElement> r = coeffs_;
  for (auto& c : r) c = -c;
  return DelayPoly(*field_, std::move(r));
}

DelayPoly DelayPoly::operator-(const DelayPoly& o) const { return *this + (-o); }

DelayPoly DelayPoly::operator*(const DelayPoly& o) const {
  same_field(o);
  if (is_zero() || o.is_zero()) return DelayPoly(*field_);
  std::vector<FieldElement> r(coeffs_.size() + o.coeffs_.size() - 1, field_->zero());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  return DelayPoly(*field_, std::move(r));
}

DelayPoly DelayPoly::operator*(const FieldElement& c) const {
  std::vector<FieldElement> r = coeffs_;
  for (auto& v : r) v *= c;
  return DelayPoly(*field_, std::move(r));
}

bool DelayPoly::operator==(const DelayPoly& o) const {
  same_field(o);
  return coeffs_ == o.coeffs_;
}

DelayPoly DelayPoly::shifted(std::size_t k) const {
  if (is_zero()) return *this;
  std::vector<FieldElement> r(k, field_->zero());
  r.insert(r.end(), coeffs_.begin(), coeffs_.end());
  return DelayPoly(*field_, std::move(r));
}

DelayPoly DelayPoly::unshifted(std::size_t k) const {
  if (is_zero()) return *this;
  for (std::size_t i = 0; i < k && i < coeffs_.size(); ++i) {
    if (!coeffs_[i].is_zero()) throw std::domain_error("polynomial not divisible by D^" + std::to_string(k));
  }
  if (k >= coeffs_.size()) return DelayPoly(*field_);
  return DelayPoly(*field_, std::vector<FieldElement>(coeffs_.begin() + static_cast<std::ptrdiff_t>(k), coeffs_.end()));
}

std::pair<DelayPoly, DelayPoly> DelayPoly::divmod(const DelayPoly& divisor) const {
  same_field(divisor);
  if (divisor.is_zero()) throw std::domain_error("division by zero polynomial");
  std::vector<FieldElement> r = coeffs_;
  const std::size_t dd = divisor.coeffs_.size() - 1;
  if (r.size() <= dd) return {DelayPoly(*field_), *this};
  std::vector<FieldElement> q(r.size() - dd, field_->zero());
  const FieldElement lead_inv = divisor.coeffs_.back().inverse();
  for (std::size_t k = r.size(); k-- > dd;) {
    if (r[k].is_zero()) continue;
    const FieldElement c = r[k] * lead_inv;
    q[k - dd] = c;
    for (std::size_t i = 0; i <= dd; ++i) r[k - dd + i] -= c * divisor.coeffs_[i];
  }
  return {DelayPoly(*field_, std::move(q)), DelayPoly(*field_, std::move(r))};
}

DelayPoly DelayPoly::exact_div(const DelayPoly& divisor) const {
  auto [q, r] = divmod(divisor);
  if (!r.is_zero()) throw std::logic_error("inexact polynomial division");
  return q;
}

FieldElement DelayPoly::eval(const FieldElement& c) const {
  const GaloisField& tf = c.field();
  FieldElement acc = tf.zero();
  if (&tf == field_) {
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * c + coeffs_[i];
    return acc;
  }
  const FieldEmbedding& e = embedding(field_ptr(*field_), field_ptr(tf));
  for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * c + e(coeffs_[i]);
  return acc;
}

std::string DelayPoly::to_string() const {
  if (is_zero()) return "0";
  std::string s;
  for (std::size_t d = 0; d < coeffs_.size(); ++d) {
    if (coeffs_[d].is_zero()) continue;
    if (!s.empty()) s += " + ";
    const std::string c = format_element(coeffs_[d]);
    if (d == 0) {
      s += c;
      continue;
    }
    if (!coeffs_[d].is_one()) s += c + "*";
    s += "D";
    if (d > 1) s += "^" + std::to_string(d);
  }
  return s;
}

DelayPoly parse_delay_poly(const GaloisField& f, std::string_view text) {
  text = strip(text);
  DelayPoly out(f);
  std::vector<std::string_view> terms;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && (text[i] == '(' || text[i] == '[')) ++depth;
    if (i < text.size() && (text[i] == ')' || text[i] == ']')) --depth;
    if (i == text.size() || (text[i] == '+' && depth == 0)) {
      terms.push_back(strip(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  for (auto t : terms) {
    if (t.empty()) throw std::invalid_argument("empty term in polynomial '" + std::string(text) + "'");
    FieldElement coef = f.one();
    std::size_t deg = 0;
    const auto dpos = t.rfind('D');
    if (dpos == std::string_view::npos) {
      coef = parse_element(f, t);
    } else {
      auto head = strip(t.substr(0, dpos));
      auto tail = strip(t.substr(dpos + 1));
      if (!head.empty()) {
        if (head.back() != '*') throw std::invalid_argument("bad polynomial term '" + std::string(t) + "'");
        head = strip(head.substr(0, head.size() - 1));
        if (head.size() >= 2 && head.front() == '(' && head.back() == ')') head = head.substr(1, head.size() - 2);
        coef = parse_element(f, head);
      }
      if (!tail.empty()) {
        if (tail.front() != '^') throw std::invalid_argument("bad polynomial term '" + std::string(t) + "'");
        deg = static_cast<std::size_t>(std::stoul(std::string(strip(tail.substr(1)))));
      } else {
        deg = 1;
      }
    }
    out.add_term(coef, deg);
  }
  return out;
}

FieldElement poly_eval(const DelayPoly& f, const FieldElement& c) { return f.eval(c); }

bool divides_Dminus1(const DelayPoly& f) { return f.eval(f.field().one()).is_zero(); }

FieldMatrix::FieldMatrix(const GaloisField& f, std::size_t rows, std::size_t cols)
    : field_(&f), rows_(rows), cols_(cols), data_(rows * cols, f.zero()) {}

FieldMatrix FieldMatrix::identity(const GaloisField& f, std::size_t n) {
  FieldMatrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = f.one();
  return m;
}

FieldMatrix FieldMatrix::diagonal(const GaloisField& f, const std::vector<FieldElement>& d) {
  FieldMatrix m(f, d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

FieldMatrix FieldMatrix::column(const GaloisField& f, const std::vector<FieldElement>& v) {
  FieldMatrix m(f, v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

FieldMatrix FieldMatrix::operator*(const FieldMatrix& o) const {
  check_dims(cols_ == o.rows_, "matrix product");
  if (field_ != o.field_) throw FieldMismatch("matrices over different fields");
  FieldMatrix r(*field_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const FieldElement& a = (*this)(i, k);
      if (a.is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  }
  return r;
}

std::vector<FieldElement> FieldMatrix::operator*(const std::vector<FieldElement>& v) const {
  check_dims(cols_ == v.size(), "matrix-vector product");
  std::vector<FieldElement> r(rows_, field_->zero());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) r[i] += (*this)(i, k) * v[k];
  return r;
}

FieldMatrix FieldMatrix::operator+(const FieldMatrix& o) const {
  check_dims(rows_ == o.rows_ && cols_ == o.cols_, "matrix sum");
  FieldMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

FieldMatrix FieldMatrix::operator-(const FieldMatrix& o) const {
  check_dims(rows_ == o.rows_ && cols_ == o.cols_, "matrix difference");
  FieldMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

FieldMatrix FieldMatrix::operator*(const FieldElement& c) const {
  FieldMatrix r = *this;
  for (auto& v : r.data_) v *= c;
  return r;
}

bool FieldMatrix::operator==(const FieldMatrix& o) const {
  return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

FieldMatrix FieldMatrix::transpose() const {
  FieldMatrix r(*field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

FieldMatrix FieldMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  check_dims(r0 + nr <= rows_ && c0 + nc <= cols_, "block extraction");
  FieldMatrix r(*field_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
  return r;
}

void FieldMatrix::set_block(std::size_t r0, std::size_t c0, const FieldMatrix& b) {
  check_dims(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, "block assignment");
  for (std::size_t i = 0; i < b.rows_; ++i)
    for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

FieldMatrix FieldMatrix::columns(const std::vector<std::size_t>& idx) const {
  FieldMatrix r(*field_, rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    check_dims(idx[j] < cols_, "column selection");
    for (std::size_t i = 0; i < rows_; ++i) r(i, j) = (*this)(i, idx[j]);
  }
  return r;
}

std::vector<FieldElement> FieldMatrix::col(std::size_t c) const {
  std::vector<FieldElement> v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

bool FieldMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const FieldElement& x) { return x.is_zero(); });
}

bool FieldMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto& v = (*this)(i, j);
      if (i == j ? !v.is_one() : !v.is_zero()) return false;
    }
  return true;
}

bool FieldMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && !(*this)(i, j).is_zero()) return false;
  return true;
}

std::vector<FieldElement> FieldMatrix::diag() const {
  std::vector<FieldElement> d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

FieldMatrix FieldMatrix::mapped(const GaloisField& target) const {
  if (&target == field_) return *this;
  const FieldEmbedding& e = embedding(field_ptr(*field_), field_ptr(target));
  FieldMatrix r(target, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = e(data_[i]);
  return r;
}

std::string FieldMatrix::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) s += "; ";
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) s += ", ";
      s += format_element((*this)(i, j));
    }
  }
  return s + "]";
}

FieldMatrix hconcat(const FieldMatrix& a, const FieldMatrix& b) {
  check_dims(a.rows() == b.rows(), "hconcat");
  FieldMatrix r(a.field(), a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

FieldMatrix vconcat(const FieldMatrix& a, const FieldMatrix& b) {
  check_dims(a.cols() == b.cols(), "vconcat");
  FieldMatrix r(a.field(), a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

FieldMatrix kron_identity(const FieldMatrix& a, std::size_t k) {
  FieldMatrix r(a.field(), a.rows() * k, a.cols() * k);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t t = 0; t < k; ++t) r(i * k + t, j * k + t) = a(i, j);
  return r;
}

std::size_t rank(const FieldMatrix& m) {
  auto a = rows_of(m);
  return echelon(a, m.cols(), false).size();
}

FieldMatrix inverse(const FieldMatrix& m) {
  check_dims(m.rows() == m.cols(), "inverse");
  const std::size_t n = m.rows();
  std::vector<std::vector<FieldElement>> a(n, std::vector<FieldElement>(2 * n, m.field().zero()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
    a[i][n + i] = m.field().one();
  }
  const auto piv = echelon(a, n, true);
  if (piv.size() != n) throw SingularMatrix("matrix is singular");
  FieldMatrix r(m.field(), n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = a[i][n + j];
  return r;
}

std::vector<FieldElement> solve(const FieldMatrix& m, const std::vector<FieldElement>& y) {
  check_dims(m.rows() == m.cols() && y.size() == m.rows(), "solve");
  auto x = solve_full_column_rank(m, y);
  if (!x) throw SingularMatrix("matrix is singular");
  return *x;
}

std::optional<std::vector<FieldElement>> solve_full_column_rank(const FieldMatrix& m,
                                                                const std::vector<FieldElement>& y) {
  check_dims(y.size() == m.rows(), "solve");
  const std::size_t n = m.cols();
  auto a = rows_of(m);
  for (std::size_t i = 0; i < a.size(); ++i) a[i].push_back(y[i]);
  const auto piv = echelon(a, n, true);
  if (piv.size() != n) throw SingularMatrix("matrix does not have full column rank");
  for (std::size_t i = n; i < a.size(); ++i) {
    if (!a[i][n].is_zero()) return std::nullopt;
  }
  std::vector<FieldElement> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

FieldElement determinant(const FieldMatrix& m) {
  check_dims(m.rows() == m.cols(), "determinant");
  auto a = rows_of(m);
  const std::size_t n = m.rows();
  FieldElement det = m.field().one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t sel = c;
    while (sel < n && a[sel][c].is_zero()) ++sel;
    if (sel == n) return m.field().zero();
    if (sel != c) {
      std::swap(a[sel], a[c]);
      det = -det;
    }
    det *= a[c][c];
    const FieldElement iv = a[c][c].inverse();
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c].is_zero()) continue;
      const FieldElement f = a[r][c] * iv;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

PolyMatrix::PolyMatrix(const GaloisField& f, std::size_t rows, std::size_t cols)
    : field_(&f), rows_(rows), cols_(cols), data_(rows * cols, DelayPoly(f)) {}

PolyMatrix PolyMatrix::identity(const GaloisField& f, std::size_t n) {
  PolyMatrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = DelayPoly::constant(f.one());
  return m;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
  check_dims(cols_ == o.rows_, "polynomial matrix product");
  PolyMatrix r(*field_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      if ((*this)(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
    }
  return r;
}

bool PolyMatrix::operator==(const PolyMatrix& o) const {
  return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

bool PolyMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const DelayPoly& p) { return p.is_zero(); });
}

std::optional<std::size_t> PolyMatrix::degree() const {
  std::optional<std::size_t> d;
  for (const auto& p : data_) {
    if (auto pd = p.degree(); pd && (!d || *pd > *d)) d = pd;
  }
  return d;
}

std::optional<std::size_t> PolyMatrix::low_degree() const {
  std::optional<std::size_t> d;
  for (const auto& p : data_) {
    if (auto pd = p.low_degree(); pd && (!d || *pd < *d)) d = pd;
  }
  return d;
}

FieldMatrix PolyMatrix::coefficient(std::size_t d) const {
  FieldMatrix r(*field_, rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).coeff(d);
  return r;
}

FieldMatrix PolyMatrix::eval(const FieldElement& c) const {
  FieldMatrix r(c.field(), rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j).eval(c);
  return r;
}

PolyMatrix PolyMatrix::columns(const std::vector<std::size_t>& idx) const {
  PolyMatrix r(*field_, rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    check_dims(idx[j] < cols_, "column selection");
    for (std::size_t i = 0; i < rows_; ++i) r(i, j) = (*this)(i, idx[j]);
  }
  return r;
}

PolyMatrix PolyMatrix::unshifted(std::size_t k) const {
  PolyMatrix r = *this;
  for (auto& p : r.data_) p = p.unshifted(k);
  return r;
}

std::vector<std::vector<std::string>> PolyMatrix::to_strings() const {
  std::vector<std::vector<std::string>> s(rows_, std::vector<std::string>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) s[i][j] = (*this)(i, j).to_string();
  return s;
}

DelayPoly polymat_det(const PolyMatrix& m) {
  check_dims(m.rows() == m.cols(), "determinant");
  const std::size_t n = m.rows();
  const GaloisField& f = m.field();
  if (n == 0) return DelayPoly::constant(f.one());
  std::vector<std::vector<DelayPoly>> a(n, std::vector<DelayPoly>(n, DelayPoly(f)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
  bool negate = false;
  DelayPoly prev = DelayPoly::constant(f.one());
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k].is_zero()) {
      std::size_t sel = k + 1;
      while (sel < n && a[sel][k].is_zero()) ++sel;
      if (sel == n) return DelayPoly(f);
      std::swap(a[sel], a[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]).exact_div(prev);
      }
    }
    prev = a[k][k];
  }
  DelayPoly d = a[n - 1][n - 1];
  return negate ? -d : d;
}

}  // namespace delaynet
