#include "msf/polypred.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace msf::polypred {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

Monomial::Monomial(std::vector<std::pair<int, int>> factors) {
  std::sort(factors.begin(), factors.end());
  for (const auto& [var, power] : factors) {
    if (var < 0) throw std::invalid_argument("monomial variable index < 0");
    if (power < 0) throw std::invalid_argument("monomial power < 0");
    if (power == 0) continue;
    if (!factors_.empty() && factors_.back().first == var)
      factors_.back().second += power;
    else
      factors_.emplace_back(var, power);
  }
}

Monomial Monomial::variable(int var, int power) {
  return Monomial({{var, power}});
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [var, power] : factors_) d += power;
  return d;
}

int Monomial::exponent(int var) const {
  for (const auto& [v, power] : factors_)
    if (v == var) return power;
  return 0;
}

int Monomial::max_var() const {
  return factors_.empty() ? -1 : factors_.back().first;
}

Monomial Monomial::times(const Monomial& other) const {
  std::vector<std::pair<int, int>> merged = factors_;
  merged.insert(merged.end(), other.factors_.begin(), other.factors_.end());
  return Monomial(std::move(merged));
}

double Monomial::eval(std::span<const double> values) const {
  double out = 1.0;
  for (const auto& [var, power] : factors_) {
    if (static_cast<std::size_t>(var) >= values.size())
      throw std::invalid_argument("monomial variable beyond value vector");
    double base = values[static_cast<std::size_t>(var)];
    for (int k = 0; k < power; ++k) out *= base;
  }
  return out;
}

bool Monomial::canonical_less(const Monomial& a, const Monomial& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // Merge-walk the sorted factor lists; at the first variable where the
  // exponents differ, the higher exponent sorts first.
  std::size_t i = 0, j = 0;
  while (i < a.factors_.size() || j < b.factors_.size()) {
    const int va = i < a.factors_.size() ? a.factors_[i].first
                                         : std::numeric_limits<int>::max();
    const int vb = j < b.factors_.size() ? b.factors_[j].first
                                         : std::numeric_limits<int>::max();
    const int var = std::min(va, vb);
    const int ea = va == var ? a.factors_[i++].second : 0;
    const int eb = vb == var ? b.factors_[j++].second : 0;
    if (ea != eb) return ea > eb;
  }
  return false;  // equal
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly Poly::constant(double c) {
  Poly p;
  p.add_term(Monomial(), c);
  return p;
}

Poly Poly::variable(int var, double coef) {
  Poly p;
  p.add_term(Monomial::variable(var), coef);
  return p;
}

void Poly::add_term(const Monomial& mono, double coef) {
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.emplace(mono, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Poly Poly::plus(const Poly& other) const {
  Poly out = *this;
  for (const auto& [mono, coef] : other.terms_) out.add_term(mono, coef);
  return out;
}

Poly Poly::times(const Poly& other) const {
  Poly out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_)
      out.add_term(ma.times(mb), ca * cb);
  return out;
}

Poly Poly::times(const Monomial& mono) const {
  Poly out;
  for (const auto& [m, c] : terms_) out.add_term(m.times(mono), c);
  return out;
}

Poly Poly::scaled(double c) const {
  Poly out;
  for (const auto& [m, coef] : terms_) out.add_term(m, coef * c);
  return out;
}

Poly Poly::derivative(int var) const {
  Poly out;
  for (const auto& [mono, coef] : terms_) {
    const int e = mono.exponent(var);
    if (e == 0) continue;
    std::vector<std::pair<int, int>> factors;
    for (const auto& [v, power] : mono.factors()) {
      if (v == var) {
        if (power > 1) factors.emplace_back(v, power - 1);
      } else {
        factors.emplace_back(v, power);
      }
    }
    out.add_term(Monomial(std::move(factors)), coef * e);
  }
  return out;
}

double Poly::eval(std::span<const double> values) const {
  double out = 0.0;
  for (const auto& [mono, coef] : terms_) out += coef * mono.eval(values);
  return out;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [mono, coef] : terms_) d = std::max(d, mono.degree());
  return d;
}

int Poly::max_var() const {
  int v = -1;
  for (const auto& [mono, coef] : terms_) v = std::max(v, mono.max_var());
  return v;
}

double Poly::coefficient(const Monomial& mono) const {
  auto it = terms_.find(mono);
  return it == terms_.end() ? 0.0 : it->second;
}

std::string Poly::trim_one(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", c);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// PolyPredictor
// ---------------------------------------------------------------------------

void validate(const PolyPredictor& pred) {
  if (pred.p < 1) throw std::invalid_argument("predictor lag order p must be >= 1");
  if (pred.terms.max_var() >= pred.p)
    throw std::invalid_argument(
        "predictor term uses a lag beyond its window (p = " +
        std::to_string(pred.p) + ")");
  if (!pred.param_labels.empty() &&
      static_cast<int>(pred.param_labels.size()) != pred.terms.n_terms())
    throw std::invalid_argument("param_labels size must match term count");
}

double PolyPredictor::eval(std::span<const double> window) const {
  if (static_cast<int>(window.size()) != p)
    throw std::invalid_argument("window length " +
                                std::to_string(window.size()) +
                                " does not match lag order " + std::to_string(p));
  return terms.eval(window);
}

Eigen::VectorXd PolyPredictor::coefficients() const {
  Eigen::VectorXd out(terms.n_terms());
  Eigen::Index i = 0;
  for (const auto& [mono, coef] : terms.terms()) out[i++] = coef;
  return out;
}

std::vector<Monomial> PolyPredictor::monomials() const {
  std::vector<Monomial> out;
  out.reserve(terms.terms().size());
  for (const auto& [mono, coef] : terms.terms()) out.push_back(mono);
  return out;
}

PolyPredictor PolyPredictor::linear(const std::vector<double>& coeffs) {
  PolyPredictor pred;
  pred.p = static_cast<int>(coeffs.size());
  for (int i = 0; i < pred.p; ++i)
    pred.terms.add_term(Monomial::variable(i), coeffs[static_cast<std::size_t>(i)]);
  validate(pred);
  return pred;
}

PolyPredictor PolyPredictor::bilinear2(double b1, double b2, double b3) {
  PolyPredictor pred;
  pred.p = 2;
  pred.terms.add_term(Monomial::variable(0), b1);
  pred.terms.add_term(Monomial::variable(1), b2);
  pred.terms.add_term(Monomial({{0, 1}, {1, 1}}), b3);
  validate(pred);
  return pred;
}

// ---------------------------------------------------------------------------
// JSON round-trip
// ---------------------------------------------------------------------------

std::string to_json(const PolyPredictor& pred) {
  nlohmann::ordered_json j;
  j["p"] = pred.p;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& [mono, coef] : pred.terms.terms()) {
    nlohmann::ordered_json term;
    nlohmann::ordered_json exps = nlohmann::ordered_json::object();
    for (const auto& [var, power] : mono.factors())
      exps[std::to_string(var)] = power;
    term["exps"] = std::move(exps);
    term["coef"] = coef;
    j["terms"].push_back(std::move(term));
  }
  if (!pred.param_labels.empty()) j["param_labels"] = pred.param_labels;
  return j.dump(2);
}

PolyPredictor predictor_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("predictor JSON parse error: ") +
                                e.what());
  }
  if (!j.is_object() || !j.contains("p") || !j.contains("terms"))
    throw std::invalid_argument(
        "predictor JSON must be an object with \"p\" and \"terms\"");
  PolyPredictor pred;
  if (!j["p"].is_number_integer())
    throw std::invalid_argument("predictor JSON: \"p\" must be an integer");
  pred.p = j["p"].get<int>();
  if (!j["terms"].is_array())
    throw std::invalid_argument("predictor JSON: \"terms\" must be an array");
  for (const auto& term : j["terms"]) {
    if (!term.is_object() || !term.contains("exps") || !term.contains("coef"))
      throw std::invalid_argument(
          "predictor JSON: each term needs \"exps\" and \"coef\"");
    std::vector<std::pair<int, int>> factors;
    for (const auto& [key, value] : term["exps"].items()) {
      int var = 0;
      try {
        var = std::stoi(key);
      } catch (const std::exception&) {
        throw std::invalid_argument("predictor JSON: bad lag index \"" + key +
                                    "\"");
      }
      if (!value.is_number_integer())
        throw std::invalid_argument("predictor JSON: exponent must be integer");
      factors.emplace_back(var, value.get<int>());
    }
    if (!term["coef"].is_number())
      throw std::invalid_argument("predictor JSON: \"coef\" must be a number");
    pred.terms.add_term(Monomial(std::move(factors)), term["coef"].get<double>());
  }
  if (j.contains("param_labels"))
    pred.param_labels = j["param_labels"].get<std::vector<std::string>>();
  validate(pred);
  return pred;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

namespace {

/// A base-lag polynomial whose coefficients are polynomials in the one-step
/// parameters: the working representation while rolling the predictor
/// forward.
using SymPoly = std::map<Monomial, Poly, MonomialOrder>;

void sym_add(SymPoly& into, const Monomial& mono, const Poly& coef) {
  if (coef.is_zero()) return;
  auto [it, inserted] = into.emplace(mono, coef);
  if (!inserted) {
    it->second = it->second.plus(coef);
    if (it->second.is_zero()) into.erase(it);
  }
}

SymPoly sym_mul(const SymPoly& a, const SymPoly& b) {
  SymPoly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b)
      sym_add(out, ma.times(mb), ca.times(cb));
  return out;
}

SymPoly sym_one() {
  SymPoly out;
  out.emplace(Monomial(), Poly::constant(1.0));
  return out;
}

}  // namespace

CompositionResult compose(const PolyPredictor& one_step, int h) {
  validate(one_step);
  if (h < 1) throw std::invalid_argument("composition horizon h must be >= 1");

  const int p = one_step.p;

  // window[i] symbolically represents the i-th newest value available at the
  // current step; initially just the base lag variables.
  std::vector<SymPoly> window(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    SymPoly v;
    v.emplace(Monomial::variable(i), Poly::constant(1.0));
    window[static_cast<std::size_t>(i)] = std::move(v);
  }

  SymPoly prediction;
  for (int step = 0; step < h; ++step) {
    prediction.clear();
    int param_index = 0;
    for (const auto& [mono, coef] : one_step.terms.terms()) {
      // Symbolic value of this term: b_j * prod_i window[i]^{e_i}.
      SymPoly term_value = sym_one();
      for (const auto& [var, power] : mono.factors()) {
        for (int k = 0; k < power; ++k)
          term_value = sym_mul(term_value, window[static_cast<std::size_t>(var)]);
      }
      const Monomial param = Monomial::variable(param_index);
      for (const auto& [m, c] : term_value)
        sym_add(prediction, m, c.times(param));
      ++param_index;
    }
    if (step + 1 < h) {
      // Feed the prediction back as the newest lag; drop the oldest.
      for (int i = p - 1; i > 0; --i)
        window[static_cast<std::size_t>(i)] =
            window[static_cast<std::size_t>(i - 1)];
      window[0] = prediction;
    }
  }

  CompositionResult result;
  result.h = h;
  result.p = p;
  result.one_step = one_step;

  const Eigen::VectorXd b_star = one_step.coefficients();
  const std::span<const double> b_span(b_star.data(),
                                       static_cast<std::size_t>(b_star.size()));
  result.composed.p = p;
  for (const auto& [mono, coef_poly] : prediction) {
    result.support.push_back(mono);
    result.param_map.push_back(coef_poly);
    const double value = coef_poly.eval(b_span);
    if (value != 0.0) result.composed.terms.add_term(mono, value);
  }
  return result;
}

Eigen::VectorXd CompositionResult::alpha_at(const Eigen::VectorXd& b) const {
  if (b.size() != n_params())
    throw std::invalid_argument("alpha_at: parameter vector has size " +
                                std::to_string(b.size()) + ", expected " +
                                std::to_string(n_params()));
  const std::span<const double> bs(b.data(), static_cast<std::size_t>(b.size()));
  Eigen::VectorXd out(n_alpha());
  for (int jx = 0; jx < n_alpha(); ++jx)
    out[jx] = param_map[static_cast<std::size_t>(jx)].eval(bs);
  return out;
}

Eigen::MatrixXd CompositionResult::jacobian_at(const Eigen::VectorXd& b) const {
  if (b.size() != n_params())
    throw std::invalid_argument("jacobian_at: parameter vector has size " +
                                std::to_string(b.size()) + ", expected " +
                                std::to_string(n_params()));
  const std::span<const double> bs(b.data(), static_cast<std::size_t>(b.size()));
  Eigen::MatrixXd out(n_alpha(), n_params());
  for (int jx = 0; jx < n_alpha(); ++jx)
    for (int i = 0; i < n_params(); ++i)
      out(jx, i) = param_map[static_cast<std::size_t>(jx)].derivative(i).eval(bs);
  return out;
}

int CompositionResult::support_index(const Monomial& mono) const {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] == mono) return static_cast<int>(i);
  return -1;
}

Eigen::MatrixXd jacobian(const CompositionResult& comp, const Eigen::VectorXd& b) {
  return comp.jacobian_at(b);
}

// ---------------------------------------------------------------------------
// Linear two-step map and its inverse
// ---------------------------------------------------------------------------

std::array<double, 2> linear_two_step_map(const std::array<double, 2>& b) {
  return {b[0] * b[0] + b[1], b[0] * b[1]};
}

std::vector<double> solve_depressed_cubic(double p, double q) {
  std::vector<double> roots;
  if (p == 0.0 && q == 0.0) {
    roots.push_back(0.0);
    return roots;
  }

  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  const double scale = std::max({std::abs(p) * std::abs(p) * std::abs(p),
                                 q * q, 1e-300});
  const double near_zero = 1e-12 * 108.0 * scale;

  if (disc > near_zero) {
    // Three distinct real roots: trigonometric form (requires p < 0).
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos(theta / 3.0 - 2.0 * kPi * k / 3.0));
  } else if (disc < -near_zero) {
    // One real root: Cardano, with the cancellation-safe companion term.
    const double sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    const double u = std::cbrt(-q / 2.0 + (q <= 0.0 ? sq : -sq));
    const double v = u != 0.0 ? -p / (3.0 * u) : 0.0;
    roots.push_back(u + v);
  } else {
    // Borderline discriminant: repeated roots.
    if (std::abs(p) > 1e-300 * std::max(1.0, std::abs(q))) {
      roots.push_back(3.0 * q / p);
      roots.push_back(-3.0 * q / (2.0 * p));
    } else {
      roots.push_back(std::cbrt(-q));
    }
  }

  // Newton polish and residual gate.
  std::vector<double> polished;
  for (double t : roots) {
    for (int iter = 0; iter < 3; ++iter) {
      const double f = t * t * t + p * t + q;
      const double fp = 3.0 * t * t + p;
      if (std::abs(fp) < 1e-300) break;
      const double step = f / fp;
      if (!std::isfinite(step)) break;
      t -= step;
    }
    const double f = t * t * t + p * t + q;
    const double mag =
        std::abs(t) * std::abs(t) * std::abs(t) + std::abs(p) * std::abs(t) +
        std::abs(q);
    if (std::abs(f) <= 1e-12 * std::max(1.0, mag)) polished.push_back(t);
  }

  std::sort(polished.begin(), polished.end());
  std::vector<double> unique_roots;
  for (double t : polished) {
    if (unique_roots.empty() ||
        std::abs(t - unique_roots.back()) > 1e-7 * (1.0 + std::abs(t)))
      unique_roots.push_back(t);
  }
  return unique_roots;
}

std::vector<std::array<double, 2>> invert_linear_two_step(
    const std::array<double, 2>& alpha) {
  // b2 = alpha1 - b1^2 substituted into alpha2 = b1*b2 gives
  // b1^3 - alpha1*b1 + alpha2 = 0.
  const std::vector<double> roots = solve_depressed_cubic(-alpha[0], alpha[1]);
  std::vector<std::array<double, 2>> out;
  for (double b1 : roots) {
    const std::array<double, 2> pair = {b1, alpha[0] - b1 * b1};
    const std::array<double, 2> forward = linear_two_step_map(pair);
    if (std::abs(forward[0] - alpha[0]) <= 1e-9 &&
        std::abs(forward[1] - alpha[1]) <= 1e-9)
      out.push_back(pair);
  }
  if (out.empty())
    throw std::runtime_error(
        "invert_linear_two_step: no real preimage survived the residual gate "
        "(map is surjective; this indicates a numerical failure)");
  return out;
}

}  // namespace msf::polypred
