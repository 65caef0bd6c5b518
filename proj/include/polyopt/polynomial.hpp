#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyopt {

// Exponent vector of a monomial x^a = x_1^{a_1} * ... * x_n^{a_n}.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> expo);
  static Monomial constant(int n);
  static Monomial variable(int n, int i, int power = 1);

  int dimension() const { return static_cast<int>(expo_.size()); }
  int degree() const;
  int exponent(int i) const { return expo_[static_cast<size_t>(i)]; }
  const std::vector<int>& exponents() const { return expo_; }

  // product of monomials: exponent-wise sum
  Monomial operator+(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return expo_ == other.expo_; }

 private:
  std::vector<int> expo_;
};

// Graded lexicographic order: lower total degree first; within a degree the
// exponent vector that is lexicographically larger comes first, so the
// canonical order for n=2, degree<=2 is [1, x1, x2, x1^2, x1*x2, x2^2].
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Sparse multivariate polynomial with real coefficients. Zero coefficients
// are never stored; terms are kept in graded-lex order.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  explicit Polynomial(int n = 0) : n_(n) {}
  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);

  int dimension() const { return n_; }
  int degree() const;  // 0 for the zero polynomial
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const Monomial& m) const;
  void add_term(const Monomial& m, double coef);

  bool operator==(const Polynomial& other) const {
    return n_ == other.n_ && terms_ == other.terms_;
  }

 private:
  int n_ = 0;
  TermMap terms_;
};

double evaluate(const Polynomial& p, const Eigen::Ref<const Eigen::VectorXd>& x);
Polynomial multiply(const Polynomial& a, const Polynomial& b);

// Monomial basis over a variable subset, graded-lex ordered; the constant
// monomial is always first.
struct MonomialBasis {
  int n = 0;
  std::vector<int> variables;  // sorted, 0-based
  int order = 0;
  std::vector<Monomial> monomials;
  int size() const { return static_cast<int>(monomials.size()); }
};

MonomialBasis basis(int n, const std::vector<int>& variables, int w);
MonomialBasis full_basis(int n, int w);

// Constraint polynomial f(x) >= 0 with an optional label.
struct Constraint {
  Polynomial poly;
  std::string name;
  bool operator==(const Constraint& other) const {
    return poly == other.poly && name == other.name;
  }
};

// min f0(x)  s.t.  f_k(x) >= 0 for every constraint.
struct PopInstance {
  int n = 0;
  Polynomial objective{0};
  std::vector<Constraint> constraints;
  std::optional<std::vector<std::array<double, 2>>> box;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
  bool operator==(const PopInstance& other) const {
    return n == other.n && objective == other.objective &&
           constraints == other.constraints && box == other.box;
  }
};

// Largest degree over objective and constraints (at least 1), and the
// matching minimal relaxation order d = ceil(D/2).
std::pair<int, int> hierarchy_degrees(const PopInstance& inst);

}  // namespace polyopt
