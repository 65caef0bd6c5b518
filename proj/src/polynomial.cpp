#include "polyopt/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace polyopt {

Monomial::Monomial(std::vector<int> expo) : expo_(std::move(expo)) {
  for (int e : expo_) {
    if (e < 0) throw std::invalid_argument("monomial exponents must be non-negative");
  }
}

Monomial Monomial::constant(int n) {
  return Monomial(std::vector<int>(static_cast<size_t>(n), 0));
}

Monomial Monomial::variable(int n, int i, int power) {
  if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
  std::vector<int> expo(static_cast<size_t>(n), 0);
  expo[static_cast<size_t>(i)] = power;
  return Monomial(std::move(expo));
}

int Monomial::degree() const {
  return std::accumulate(expo_.begin(), expo_.end(), 0);
}

Monomial Monomial::operator+(const Monomial& other) const {
  if (expo_.size() != other.expo_.size())
    throw std::invalid_argument("monomial dimension mismatch");
  std::vector<int> expo(expo_.size());
  for (size_t i = 0; i < expo_.size(); ++i) expo[i] = expo_[i] + other.expo_[i];
  return Monomial(std::move(expo));
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  // within a degree, the lexicographically larger exponent vector first
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                      a.exponents().begin(), a.exponents().end());
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Monomial::constant(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  Polynomial p(n);
  p.add_term(Monomial::variable(n, i), 1.0);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return 0;
  return terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double coef) {
  if (m.dimension() != n_) throw std::invalid_argument("term dimension mismatch");
  auto [it, inserted] = terms_.try_emplace(m, coef);
  if (!inserted) it->second += coef;
  if (it->second == 0.0) terms_.erase(it);
}

double evaluate(const Polynomial& p, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != p.dimension())
    throw std::invalid_argument("evaluation point dimension mismatch");
  double total = 0.0;
  for (const auto& [mon, coef] : p.terms()) {
    double v = coef;
    for (int i = 0; i < p.dimension(); ++i) {
      for (int e = 0; e < mon.exponent(i); ++e) v *= x[i];
    }
    total += v;
  }
  return total;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("polynomial dimension mismatch");
  Polynomial out(a.dimension());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma + mb, ca * cb);
  }
  return out;
}

namespace {

void enumerate_exponents(const std::vector<int>& variables, size_t pos, int budget,
                         std::vector<int>& expo, std::vector<Monomial>& out) {
  if (pos == variables.size()) {
    out.emplace_back(expo);
    return;
  }
  const int var = variables[pos];
  for (int e = 0; e <= budget; ++e) {
    expo[static_cast<size_t>(var)] = e;
    enumerate_exponents(variables, pos + 1, budget - e, expo, out);
  }
  expo[static_cast<size_t>(var)] = 0;
}

}  // namespace

MonomialBasis basis(int n, const std::vector<int>& variables, int w) {
  if (n < 0 || w < 0) throw std::invalid_argument("basis: n and w must be non-negative");
  std::vector<int> vars = variables;
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (!vars.empty() && (vars.front() < 0 || vars.back() >= n))
    throw std::invalid_argument("basis: variable index out of range");

  MonomialBasis b;
  b.n = n;
  b.variables = vars;
  b.order = w;
  std::vector<int> expo(static_cast<size_t>(n), 0);
  enumerate_exponents(vars, 0, w, expo, b.monomials);
  std::sort(b.monomials.begin(), b.monomials.end(), GradedLexLess{});
  return b;
}

MonomialBasis full_basis(int n, int w) {
  std::vector<int> vars(static_cast<size_t>(n));
  std::iota(vars.begin(), vars.end(), 0);
  return basis(n, vars, w);
}

std::pair<int, int> hierarchy_degrees(const PopInstance& inst) {
  int D = inst.objective.degree();
  for (const auto& c : inst.constraints) D = std::max(D, c.poly.degree());
  D = std::max(D, 1);
  return {D, (D + 1) / 2};
}

}  // namespace polyopt
