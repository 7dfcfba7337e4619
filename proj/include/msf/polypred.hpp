#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace msf::polypred {

/// A monomial over integer-indexed variables: a sorted list of
/// (variable, power) factors with strictly positive powers. The empty
/// monomial is the constant 1. When a monomial lives over lag variables,
/// variable i stands for the i-th most recent observation (0 = newest).
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<std::pair<int, int>> factors);

  /// Single variable to the given power.
  static Monomial variable(int var, int power = 1);

  int degree() const;
  int exponent(int var) const;
  bool is_constant() const { return factors_.empty(); }
  /// Largest variable index used, or -1 for the constant monomial.
  int max_var() const;

  Monomial times(const Monomial& other) const;
  double eval(std::span<const double> values) const;

  const std::vector<std::pair<int, int>>& factors() const { return factors_; }

  bool operator==(const Monomial& other) const {
    return factors_ == other.factors_;
  }

  /// Canonical term order: ascending total degree; within a degree class the
  /// tie-break walks variables from index 0 upward and puts the higher power
  /// first. For lag variables this reads "more weight on more recent lags
  /// first", e.g. for two lags: y[t], y[t-1], y[t]^2, y[t]*y[t-1], y[t-1]^2.
  static bool canonical_less(const Monomial& a, const Monomial& b);

  /// Renders e.g. "y[t]^2*y[t-1]" with the supplied variable namer.
  template <typename Namer>
  std::string to_string(Namer&& name) const {
    if (factors_.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) out += "*";
      out += name(factors_[i].first);
      if (factors_[i].second != 1)
        out += "^" + std::to_string(factors_[i].second);
    }
    return out;
  }

 private:
  std::vector<std::pair<int, int>> factors_;
};

struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return Monomial::canonical_less(a, b);
  }
};

/// Sparse multivariate polynomial with double coefficients. Terms are held
/// in canonical monomial order and exact zeros are pruned, so structurally
/// equal polynomials compare equal term-for-term.
class Poly {
 public:
  using TermMap = std::map<Monomial, double, MonomialOrder>;

  Poly() = default;

  static Poly constant(double c);
  static Poly variable(int var, double coef = 1.0);

  /// Adds coef * mono, pruning the term if the sum lands exactly on zero.
  void add_term(const Monomial& mono, double coef);

  Poly plus(const Poly& other) const;
  Poly times(const Poly& other) const;
  Poly times(const Monomial& mono) const;
  Poly scaled(double c) const;

  /// Partial derivative with respect to one variable.
  Poly derivative(int var) const;

  double eval(std::span<const double> values) const;

  bool is_zero() const { return terms_.empty(); }
  int n_terms() const { return static_cast<int>(terms_.size()); }
  int degree() const;
  int max_var() const;
  double coefficient(const Monomial& mono) const;

  const TermMap& terms() const { return terms_; }

  bool operator==(const Poly& other) const { return terms_ == other.terms_; }

  template <typename Namer>
  std::string to_string(Namer&& name) const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [mono, coef] : terms_) {
      double c = coef;
      if (first) {
        if (c < 0) {
          out += "-";
          c = -c;
        }
      } else {
        out += c < 0 ? " - " : " + ";
        c = std::abs(c);
      }
      first = false;
      const std::string ms = mono.to_string(name);
      if (mono.is_constant()) {
        out += trim_one(c);
      } else if (c == 1.0) {
        out += ms;
      } else {
        out += trim_one(c) + "*" + ms;
      }
    }
    return out;
  }

 private:
  static std::string trim_one(double c);
  TermMap terms_;
};

/// A polynomial one-step predictor over a window of p lags
/// (window[0] = newest observation). The coefficient vector, canonical term
/// order and parameter indices all refer to `terms` in its canonical order.
struct PolyPredictor {
  int p = 0;
  Poly terms;
  /// Optional parameter names aligned with the canonical term order
  /// (defaults to b1..bd when empty).
  std::vector<std::string> param_labels;

  /// Evaluates at a window of exactly p values, newest first.
  double eval(std::span<const double> window) const;

  int n_params() const { return terms.n_terms(); }
  Eigen::VectorXd coefficients() const;
  std::vector<Monomial> monomials() const;

  /// Same term map and lag order compare equal; labels are cosmetic.
  bool operator==(const PolyPredictor& other) const {
    return p == other.p && terms == other.terms;
  }

  /// Linear predictor b1*y[t] + ... + bp*y[t-p+1].
  static PolyPredictor linear(const std::vector<double>& coeffs);
  /// Two-lag bilinear predictor b1*y[t] + b2*y[t-1] + b3*y[t]*y[t-1].
  static PolyPredictor bilinear2(double b1, double b2, double b3);
};

void validate(const PolyPredictor& pred);

std::string to_json(const PolyPredictor& pred);
PolyPredictor predictor_from_json(const std::string& text);

/// h-step self-composition of a one-step predictor.
///
/// Every coefficient of the one-step predictor is treated as a free symbol
/// b_j (j = position in canonical term order), the predictor is rolled
/// forward h steps -- each step feeds the previous prediction back as the
/// newest lag and drops the oldest -- and like terms are collected exactly.
struct CompositionResult {
  int h = 0;
  int p = 0;
  PolyPredictor one_step;
  /// Symbolic support of the composed predictor, canonical order. Entry j is
  /// the base-lag monomial whose coefficient is alpha_j.
  std::vector<Monomial> support;
  /// alpha_j as a polynomial in the one-step parameters b, aligned with
  /// `support`.
  std::vector<Poly> param_map;
  /// param_map evaluated at the one-step coefficients, exact zeros pruned.
  PolyPredictor composed;

  int n_params() const { return one_step.n_params(); }
  int n_alpha() const { return static_cast<int>(support.size()); }

  /// alpha(b): evaluates the parameter map at an arbitrary parameter vector.
  Eigen::VectorXd alpha_at(const Eigen::VectorXd& b) const;

  /// J_h(b) = d alpha / d b, rows in `support` order.
  Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& b) const;

  /// Position of a monomial in `support`, or -1 when absent.
  int support_index(const Monomial& mono) const;
};

CompositionResult compose(const PolyPredictor& one_step, int h);

/// Convenience wrapper matching the CompositionResult method.
Eigen::MatrixXd jacobian(const CompositionResult& comp, const Eigen::VectorXd& b);

/// Exact two-step parameter map of the linear two-lag predictor:
/// (b1, b2) -> (b1^2 + b2, b1*b2).
std::array<double, 2> linear_two_step_map(const std::array<double, 2>& b);

/// All real preimages of alpha under the linear two-step map. Solves the
/// cubic b1^3 - alpha1*b1 + alpha2 = 0 in closed form (discriminant split,
/// Newton-polished) and pairs each root with b2 = alpha1 - b1^2. Every
/// returned pair maps back onto alpha within 1e-9; the map is surjective, so
/// the result is never empty.
std::vector<std::array<double, 2>> invert_linear_two_step(
    const std::array<double, 2>& alpha);

/// Real roots of t^3 + p*t + q = 0 (deduplicated, ascending).
std::vector<double> solve_depressed_cubic(double p, double q);

}  // namespace msf::polypred
