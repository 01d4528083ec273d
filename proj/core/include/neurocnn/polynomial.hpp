#pragma once

// Sparse homogeneous multivariate polynomials and the monomial basis of
// Sym^degree(nvars).
//
// Monomials are ordered graded-lexicographically with x[0] the greatest
// variable. Since every term of a HomoPoly has the same total degree this is
// plain descending lexicographic order on exponent vectors, e.g. for degree 2
// in (a, b): a^2, ab, b^2.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "neurocnn/errors.hpp"
#include "neurocnn/scalar.hpp"

namespace neurocnn {

using Exponent = std::vector<int>;

struct GradedLexGreater {
  bool operator()(const Exponent& a, const Exponent& b) const { return a > b; }
};

template <class T>
class HomoPoly {
 public:
  using TermMap = std::map<Exponent, T, GradedLexGreater>;

  HomoPoly() = default;
  HomoPoly(int nvars, int degree) : nvars_(nvars), degree_(degree) {}

  static HomoPoly constant(int nvars, const T& c) {
    HomoPoly p(nvars, 0);
    p.add_term(Exponent(static_cast<std::size_t>(nvars), 0), c);
    return p;
  }

  static HomoPoly variable(int nvars, int index, const T& c = T(1)) {
    HomoPoly p(nvars, 1);
    Exponent e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(index)] = 1;
    p.add_term(e, c);
    return p;
  }

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  T coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? T(0) : it->second;
  }

  // Accumulates c into the coefficient of e; cancelled terms are erased.
  void add_term(const Exponent& e, const T& c) {
    check_exponent(e);
    if (neurocnn::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (neurocnn::is_zero(it->second)) terms_.erase(it);
    }
  }

  HomoPoly& operator+=(const HomoPoly& other) {
    check_compatible(other);
    for (const auto& [e, c] : other.terms_) add_term(e, c);
    return *this;
  }

  HomoPoly& operator-=(const HomoPoly& other) {
    check_compatible(other);
    for (const auto& [e, c] : other.terms_) add_term(e, -c);
    return *this;
  }

  HomoPoly& operator*=(const T& scalar) {
    if (neurocnn::is_zero(scalar)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= scalar;
    return *this;
  }

  friend HomoPoly operator+(HomoPoly a, const HomoPoly& b) { return a += b; }
  friend HomoPoly operator-(HomoPoly a, const HomoPoly& b) { return a -= b; }
  friend HomoPoly operator*(HomoPoly a, const T& s) { return a *= s; }
  friend HomoPoly operator*(const T& s, HomoPoly a) { return a *= s; }

  friend bool operator==(const HomoPoly& a, const HomoPoly& b) {
    return a.nvars_ == b.nvars_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  // Renames variables: variable i of this polynomial becomes variable
  // index_map[i] of a polynomial in new_nvars variables.
  HomoPoly remap(int new_nvars, std::span<const int> index_map) const {
    HomoPoly out(new_nvars, degree_);
    for (const auto& [e, c] : terms_) {
      Exponent ne(static_cast<std::size_t>(new_nvars), 0);
      for (std::size_t i = 0; i < e.size(); ++i) {
        ne[static_cast<std::size_t>(index_map[i])] += e[i];
      }
      out.add_term(ne, c);
    }
    return out;
  }

  template <class U, class F>
  HomoPoly<U> map_coefficients(F&& f) const {
    HomoPoly<U> out(nvars_, degree_);
    for (const auto& [e, c] : terms_) out.add_term(e, f(c));
    return out;
  }

 private:
  void check_exponent(const Exponent& e) const {
    if (static_cast<int>(e.size()) != nvars_) {
      throw Error(ErrorCode::VarMismatch, "exponent length differs from nvars");
    }
    int sum = 0;
    for (int v : e) sum += v;
    if (sum != degree_) {
      throw Error(ErrorCode::VarMismatch, "exponent does not sum to the polynomial degree");
    }
  }

  void check_compatible(const HomoPoly& other) const {
    if (other.nvars_ != nvars_ || other.degree_ != degree_) {
      throw Error(ErrorCode::VarMismatch, "adding polynomials of different shape");
    }
  }

  int nvars_ = 0;
  int degree_ = 0;
  TermMap terms_;
};

template <class T>
HomoPoly<T> poly_mul(const HomoPoly<T>& p, const HomoPoly<T>& q) {
  if (p.nvars() != q.nvars()) {
    throw Error(ErrorCode::VarMismatch, "poly_mul: different variable counts");
  }
  HomoPoly<T> out(p.nvars(), p.degree() + q.degree());
  Exponent e(static_cast<std::size_t>(p.nvars()));
  for (const auto& [ep, cp] : p.terms()) {
    for (const auto& [eq, cq] : q.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ep[i] + eq[i];
      out.add_term(e, cp * cq);
    }
  }
  return out;
}

template <class T>
HomoPoly<T> poly_pow(const HomoPoly<T>& p, int r) {
  if (r < 0) throw Error(ErrorCode::VarMismatch, "poly_pow: negative exponent");
  HomoPoly<T> result = HomoPoly<T>::constant(p.nvars(), T(1));
  HomoPoly<T> base = p;
  // Binary powering keeps the multiplication count logarithmic in r.
  while (r > 0) {
    if (r & 1) result = poly_mul(result, base);
    r >>= 1;
    if (r > 0) base = poly_mul(base, base);
  }
  return result;
}

template <class T>
T evaluate(const HomoPoly<T>& p, std::span<const T> x) {
  if (static_cast<int>(x.size()) != p.nvars()) {
    throw Error(ErrorCode::LengthMismatch, "evaluate: point dimension differs from nvars");
  }
  T total(0);
  for (const auto& [e, c] : p.terms()) {
    T term = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    }
    total += term;
  }
  return total;
}

// Index <-> exponent bijection for the monomials of Sym^degree(nvars).
class MonomialBasis {
 public:
  MonomialBasis(int nvars, int degree);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  std::size_t size() const { return exponents_.size(); }
  const Exponent& exponent(std::size_t index) const { return exponents_[index]; }
  const std::vector<Exponent>& exponents() const { return exponents_; }

  // Throws VarMismatch for an exponent outside the basis.
  std::size_t index_of(const Exponent& e) const;

 private:
  int nvars_;
  int degree_;
  std::vector<Exponent> exponents_;
  std::map<Exponent, std::size_t, GradedLexGreater> index_;
};

// All exponent vectors of length nvars summing to degree, in basis order.
std::vector<Exponent> enumerate_exponents(int nvars, int degree);

// binomial(nvars + degree - 1, degree).
std::int64_t sym_dimension(int nvars, int degree);

// r! / (a_0! ... a_{k-1}!) for |a| = r.
std::int64_t multinomial(const Exponent& a);

template <class T>
std::vector<T> sym_coords(const HomoPoly<T>& p, const MonomialBasis& basis) {
  if (p.nvars() != basis.nvars() || p.degree() != basis.degree()) {
    throw Error(ErrorCode::VarMismatch, "sym_coords: polynomial does not live in this basis");
  }
  std::vector<T> out(basis.size(), T(0));
  for (const auto& [e, c] : p.terms()) out[basis.index_of(e)] = c;
  return out;
}

template <class T>
std::vector<T> sym_coords(const HomoPoly<T>& p) {
  return sym_coords(p, MonomialBasis(p.nvars(), p.degree()));
}

template <class T>
HomoPoly<T> from_sym_coords(std::span<const T> coords, const MonomialBasis& basis) {
  if (coords.size() != basis.size()) {
    throw Error(ErrorCode::LengthMismatch, "from_sym_coords: coordinate count differs from basis size");
  }
  HomoPoly<T> p(basis.nvars(), basis.degree());
  for (std::size_t i = 0; i < coords.size(); ++i) p.add_term(basis.exponent(i), coords[i]);
  return p;
}

// veronese(x)[i] = monomial_i(x), so that evaluate(p, x) equals the plain dot
// product of sym_coords(p) with veronese(x, deg p).
template <class T>
std::vector<T> veronese(std::span<const T> x, const MonomialBasis& basis) {
  if (static_cast<int>(x.size()) != basis.nvars()) {
    throw Error(ErrorCode::LengthMismatch, "veronese: point dimension differs from nvars");
  }
  std::vector<T> out;
  out.reserve(basis.size());
  for (const auto& e : basis.exponents()) {
    T m(1);
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    }
    out.push_back(m);
  }
  return out;
}

template <class T>
std::vector<T> veronese(std::span<const T> x, int degree) {
  return veronese(x, MonomialBasis(static_cast<int>(x.size()), degree));
}

// JSON: {"nvars":n,"degree":d,"terms":[{"e":[...],"c":num}...]}, terms in
// basis order. Rational coefficients are written as "p/q" strings.
std::string to_json(const HomoPoly<double>& p);
std::string to_json(const HomoPoly<Rational>& p);
HomoPoly<double> poly_from_json(const std::string& text);

}  // namespace neurocnn
