#include "dlse/sf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "dlse/errors.hpp"

namespace dlse {

using boost::multiprecision::cpp_int;

SfExprPtr sf_const(Rational value) {
  if (value <= 0) throw data_error("sf: constants must be strictly positive");
  auto node = std::make_shared<SfExpr>();
  node->kind = SfExpr::Kind::Const;
  node->value = std::move(value);
  return node;
}

SfExprPtr sf_var(int index) {
  if (index < 0) throw data_error("sf: negative variable index");
  auto node = std::make_shared<SfExpr>();
  node->kind = SfExpr::Kind::Var;
  node->var = index;
  return node;
}

namespace {

SfExprPtr binary(SfExpr::Kind kind, SfExprPtr a, SfExprPtr b) {
  if (!a || !b) throw data_error("sf: null operand");
  auto node = std::make_shared<SfExpr>();
  node->kind = kind;
  node->lhs = std::move(a);
  node->rhs = std::move(b);
  return node;
}

}  // namespace

SfExprPtr sf_add(SfExprPtr a, SfExprPtr b) {
  return binary(SfExpr::Kind::Add, std::move(a), std::move(b));
}
SfExprPtr sf_mul(SfExprPtr a, SfExprPtr b) {
  return binary(SfExpr::Kind::Mul, std::move(a), std::move(b));
}
SfExprPtr sf_div(SfExprPtr num, SfExprPtr den) {
  return binary(SfExpr::Kind::Div, std::move(num), std::move(den));
}

SfExprPtr sf_pow(SfExprPtr base, long long exponent) {
  if (!base) throw data_error("sf: null operand");
  if (exponent < 1) throw data_error("sf: power exponent must be >= 1");
  // Square-and-multiply; shared subtrees keep this O(log exponent) nodes.
  SfExprPtr result;
  SfExprPtr square = std::move(base);
  while (exponent > 0) {
    if (exponent & 1) result = result ? sf_mul(result, square) : square;
    exponent >>= 1;
    if (exponent > 0) square = sf_mul(square, square);
  }
  return result;
}

void for_each_node(const SfExprPtr& e,
                   const std::function<void(const SfExpr&)>& fn) {
  if (!e) return;
  std::unordered_set<const SfExpr*> seen;
  std::vector<const SfExpr*> stack{e.get()};
  while (!stack.empty()) {
    const SfExpr* node = stack.back();
    stack.pop_back();
    if (!seen.insert(node).second) continue;
    fn(*node);
    if (node->lhs) stack.push_back(node->lhs.get());
    if (node->rhs) stack.push_back(node->rhs.get());
  }
}

std::size_t node_count(const SfExprPtr& e) {
  std::size_t count = 0;
  for_each_node(e, [&](const SfExpr&) { ++count; });
  return count;
}

namespace {

Rational rational_pow(const Rational& base, long long exponent) {
  const auto e = static_cast<unsigned>(exponent);
  return Rational(boost::multiprecision::pow(numerator(base), e),
                  boost::multiprecision::pow(denominator(base), e));
}

// Best continued-fraction convergent of v >= 0 within atol; exact rationals
// with small terms come back exactly.
Rational approx_rational(double v, double atol) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw data_error("sf: cannot rationalize a negative or non-finite value");
  }
  constexpr double kDenLimit = 9e15;  // stay within exact-double integers
  double h_prev = 1.0, k_prev = 0.0;
  double h = std::floor(v), k = 1.0;
  double frac = v - h;
  while (std::abs(v - h / k) > atol && frac > 0.0) {
    const double inv = 1.0 / frac;
    const double a = std::floor(inv);
    frac = inv - a;
    const double h_next = a * h + h_prev;
    const double k_next = a * k + k_prev;
    if (k_next > kDenLimit || h_next > kDenLimit) break;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
  }
  return Rational(cpp_int(h), cpp_int(k));
}

long long checked_round(double value) {
  if (std::abs(value) > 9e15) {
    throw numeric_error("sf: exponent numerator out of integer range");
  }
  return std::llround(value);
}

struct ComponentRounding {
  RationalGpos params;
  double kappa = 0.0;  // max_k ||dAlpha_k|| * radius + max_k |dBeta_k|
};

ComponentRounding round_component(const LseParams& p, long long q,
                                  double beta_tol, double radius) {
  ComponentRounding out;
  const Eigen::Index terms = p.terms();
  const Eigen::Index n = p.dim();
  double alpha_err = 0.0, beta_err = 0.0;
  out.params.coeffs.reserve(static_cast<std::size_t>(terms));
  out.params.exponent_numerators.assign(
      static_cast<std::size_t>(terms),
      std::vector<long long>(static_cast<std::size_t>(n), 0));
  for (Eigen::Index k = 0; k < terms; ++k) {
    double row_sq = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const long long num = checked_round(p.alphas(k, j) * static_cast<double>(q));
      out.params.exponent_numerators[k][j] = num;
      const double diff =
          p.alphas(k, j) - static_cast<double>(num) / static_cast<double>(q);
      row_sq += diff * diff;
    }
    alpha_err = std::max(alpha_err, std::sqrt(row_sq));

    const double target = std::exp(p.betas(k));
    if (!std::isfinite(target)) {
      throw numeric_error("sf: offset exponentiation overflowed");
    }
    Rational c = approx_rational(target, target * -std::expm1(-beta_tol));
    if (c == 0) {
      // Tiny coefficient: fall back to a unit fraction.
      const double den = std::clamp(std::ceil(1.0 / target), 1.0, 9e15);
      c = Rational(1, cpp_int(den));
    }
    out.params.coeffs.push_back(c);
    const double achieved = std::abs(p.betas(k) - std::log(c.convert_to<double>()));
    beta_err = std::max(beta_err, achieved);
  }
  out.kappa = alpha_err * radius + beta_err;
  return out;
}

}  // namespace

RationalDlse rationalize(const DlseModel& m, const RationalizeOptions& opts) {
  validate(m);
  if (!(opts.tol > 0.0)) throw data_error("rationalize: tol must be positive");
  if (!(opts.radius > 0.0)) throw data_error("rationalize: radius must be positive");
  if (opts.max_q < 1) throw data_error("rationalize: max_q must be >= 1");

  const double t = m.plus.temperature;
  const double inv_t = 1.0 / t;

  // Temperature of the form 1/p: snap when 1/T is essentially integral,
  // otherwise the smallest p within relative tol, otherwise nearest.
  long long p = 0;
  const long long rounded = std::max<long long>(1, checked_round(inv_t));
  if (std::abs(inv_t - static_cast<double>(rounded)) <=
      1e-9 * std::max(1.0, inv_t)) {
    p = rounded;
  } else {
    const auto lo = static_cast<long long>(
        std::ceil(1.0 / (t * (1.0 + opts.tol))));
    const auto hi = static_cast<long long>(
        std::floor(1.0 / (t * (1.0 - opts.tol))));
    if (lo <= hi && hi >= 1) {
      p = std::max<long long>(1, lo);
    } else {
      const auto f = static_cast<long long>(std::floor(inv_t));
      p = 1;
      for (const long long cand : {f, f + 1}) {
        if (cand >= 1 && std::abs(1.0 / static_cast<double>(cand) - t) <
                             std::abs(1.0 / static_cast<double>(p) - t)) {
          p = cand;
        }
      }
    }
  }
  const double dt = std::abs(t - 1.0 / static_cast<double>(p));
  const double kappa_t =
      dt * (std::log(static_cast<double>(m.plus.terms())) +
            std::log(static_cast<double>(m.minus.terms())));

  const double budget = opts.tol - kappa_t;
  if (budget <= 0.0) {
    throw numeric_error(
        "rationalize: temperature rounding alone gives kappa = " +
        std::to_string(kappa_t) + ", exceeding tol = " +
        std::to_string(opts.tol));
  }

  const auto n = static_cast<double>(m.dim());
  const double entry_tol = budget / (4.0 * opts.radius * std::sqrt(n));
  const double beta_tol = budget / 4.0;

  // Smallest common denominator q whose grid meets the per-entry budget.
  auto max_grid_error = [&](long long q, double limit) {
    double worst = 0.0;
    for (const LseParams* comp : {&m.plus, &m.minus}) {
      for (Eigen::Index k = 0; k < comp->terms(); ++k) {
        for (Eigen::Index j = 0; j < comp->dim(); ++j) {
          const double scaled = comp->alphas(k, j) * static_cast<double>(q);
          const double err =
              std::abs(scaled - std::nearbyint(scaled)) / static_cast<double>(q);
          worst = std::max(worst, err);
          if (worst > limit) return worst;
        }
      }
    }
    return worst;
  };
  long long q = 0;
  for (long long cand = 1; cand <= opts.max_q; ++cand) {
    if (max_grid_error(cand, entry_tol) <= entry_tol) {
      q = cand;
      break;
    }
  }
  const bool q_capped = (q == 0);
  if (q_capped) q = opts.max_q;

  RationalDlse out;
  out.p = p;
  out.q = q;
  out.dim = m.dim();
  const ComponentRounding plus =
      round_component(m.plus, q, beta_tol, opts.radius);
  const ComponentRounding minus =
      round_component(m.minus, q, beta_tol, opts.radius);
  out.numerator = plus.params;
  out.denominator = minus.params;
  out.kappa = kappa_t + plus.kappa + minus.kappa;

  if (out.kappa > opts.tol) {
    throw numeric_error(
        std::string("rationalize: best achievable kappa") +
        (q_capped ? " under max_q" : "") + " is " + std::to_string(out.kappa) +
        ", exceeding tol = " + std::to_string(opts.tol));
  }
  return out;
}

DlseModel to_dlse_model(const RationalDlse& r) {
  auto component = [&](const RationalGpos& g) {
    LseParams p;
    p.temperature = 1.0 / static_cast<double>(r.p);
    const auto terms = static_cast<Eigen::Index>(g.coeffs.size());
    p.alphas.resize(terms, r.dim);
    p.betas.resize(terms);
    for (Eigen::Index k = 0; k < terms; ++k) {
      for (Eigen::Index j = 0; j < r.dim; ++j) {
        p.alphas(k, j) =
            static_cast<double>(g.exponent_numerators[k][j]) /
            static_cast<double>(r.q);
      }
      p.betas(k) = std::log(g.coeffs[k].convert_to<double>());
    }
    return p;
  };
  DlseModel m;
  m.plus = component(r.numerator);
  m.minus = component(r.denominator);
  validate(m);
  return m;
}

namespace {

SfExprPtr emit_sum(const RationalGpos& g, long long p) {
  SfExprPtr sum;
  for (std::size_t k = 0; k < g.coeffs.size(); ++k) {
    const Rational coeff = rational_pow(g.coeffs[k], p);
    SfExprPtr pos;  // coefficient and positive powers
    SfExprPtr neg;  // positive powers of the negated exponents
    for (std::size_t j = 0; j < g.exponent_numerators[k].size(); ++j) {
      const long long e = g.exponent_numerators[k][j] * p;
      if (e > 0) {
        SfExprPtr f = sf_pow(sf_var(static_cast<int>(j)), e);
        pos = pos ? sf_mul(pos, f) : f;
      } else if (e < 0) {
        SfExprPtr f = sf_pow(sf_var(static_cast<int>(j)), -e);
        neg = neg ? sf_mul(neg, f) : f;
      }
    }
    if (coeff != 1 || !pos) {
      SfExprPtr c = sf_const(coeff);
      pos = pos ? sf_mul(c, pos) : c;
    }
    SfExprPtr term = neg ? sf_div(pos, neg) : pos;
    sum = sum ? sf_add(sum, term) : term;
  }
  return sum;
}

bool is_const_one(const SfExprPtr& e) {
  return e && e->kind == SfExpr::Kind::Const && e->value == 1;
}

}  // namespace

SfEmission emit_sf(const RationalDlse& r) {
  if (r.numerator.coeffs.empty() || r.denominator.coeffs.empty()) {
    throw data_error("emit_sf: empty component");
  }
  SfEmission out;
  out.p = r.p;
  out.q = r.q;
  const SfExprPtr num = emit_sum(r.numerator, r.p);
  const SfExprPtr den = emit_sum(r.denominator, r.p);
  out.expr = is_const_one(den) ? num : sf_div(num, den);
  return out;
}

namespace {

template <typename Value, typename ConstFn, typename VarFn>
Value eval_memo(const SfExpr* node, const ConstFn& const_fn, const VarFn& var_fn,
                std::unordered_map<const SfExpr*, Value>& memo) {
  const auto hit = memo.find(node);
  if (hit != memo.end()) return hit->second;
  Value result{};
  switch (node->kind) {
    case SfExpr::Kind::Const:
      result = const_fn(node->value);
      break;
    case SfExpr::Kind::Var:
      result = var_fn(node->var);
      break;
    case SfExpr::Kind::Add:
      result = eval_memo(node->lhs.get(), const_fn, var_fn, memo) +
               eval_memo(node->rhs.get(), const_fn, var_fn, memo);
      break;
    case SfExpr::Kind::Mul:
      result = eval_memo(node->lhs.get(), const_fn, var_fn, memo) *
               eval_memo(node->rhs.get(), const_fn, var_fn, memo);
      break;
    case SfExpr::Kind::Div:
      result = eval_memo(node->lhs.get(), const_fn, var_fn, memo) /
               eval_memo(node->rhs.get(), const_fn, var_fn, memo);
      break;
  }
  memo.emplace(node, result);
  return result;
}

}  // namespace

double eval_sf(const SfExprPtr& e, long long p, long long q,
               const Eigen::VectorXd& x) {
  if (!e) throw data_error("eval_sf: empty expression");
  if (p < 1 || q < 1) throw data_error("eval_sf: p and q must be >= 1");
  if (!x.allFinite() || (x.array() <= 0.0).any()) {
    throw data_error("eval_sf: input must be strictly positive and finite");
  }
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y(i) = std::pow(x(i), 1.0 / static_cast<double>(q));
  }
  std::unordered_map<const SfExpr*, double> memo;
  const double tree = eval_memo<double>(
      e.get(), [](const Rational& c) { return c.convert_to<double>(); },
      [&](int i) {
        if (i >= y.size()) throw data_error("eval_sf: variable index out of range");
        return y(i);
      },
      memo);
  const double value = std::pow(tree, 1.0 / static_cast<double>(p));
  if (!std::isfinite(value) || value <= 0.0) {
    throw numeric_error("eval_sf: evaluation left the positive double range");
  }
  return value;
}

Rational eval_sf_exact(const SfExprPtr& e, const std::vector<Rational>& x) {
  if (!e) throw data_error("eval_sf_exact: empty expression");
  for (const Rational& v : x) {
    if (v <= 0) throw data_error("eval_sf_exact: input must be positive");
  }
  std::unordered_map<const SfExpr*, Rational> memo;
  return eval_memo<Rational>(
      e.get(), [](const Rational& c) { return c; },
      [&](int i) {
        if (static_cast<std::size_t>(i) >= x.size()) {
          throw data_error("eval_sf_exact: variable index out of range");
        }
        return x[static_cast<std::size_t>(i)];
      },
      memo);
}

namespace {

// Pure power of one variable (built by sf_pow or explicit products).
std::optional<std::pair<int, long long>> as_var_power(const SfExpr* node) {
  if (node->kind == SfExpr::Kind::Var) return {{node->var, 1}};
  if (node->kind != SfExpr::Kind::Mul) return std::nullopt;
  const auto l = as_var_power(node->lhs.get());
  if (!l) return std::nullopt;
  const auto r = as_var_power(node->rhs.get());
  if (!r || r->first != l->first) return std::nullopt;
  return {{l->first, l->second + r->second}};
}

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecAtom = 3;

struct Printer {
  PowStyle style;
  std::string out;

  int precedence(const SfExpr* node) const {
    switch (node->kind) {
      case SfExpr::Kind::Add:
        return kPrecAdd;
      case SfExpr::Kind::Mul:
      case SfExpr::Kind::Div:
        if (style == PowStyle::Caret && node->kind == SfExpr::Kind::Mul &&
            as_var_power(node)) {
          return kPrecAtom;
        }
        return kPrecMul;
      case SfExpr::Kind::Const:
        // Rationals print as "(a/b)", wrapped, so they bind like atoms.
        return kPrecAtom;
      case SfExpr::Kind::Var:
        return kPrecAtom;
    }
    return kPrecAtom;
  }

  void child(const SfExpr* node, int min_prec) {
    if (precedence(node) < min_prec) {
      out += '(';
      print(node);
      out += ')';
    } else {
      print(node);
    }
  }

  void print(const SfExpr* node) {
    if (style == PowStyle::Caret) {
      if (const auto pw = as_var_power(node); pw && pw->second > 1) {
        out += 'y';
        out += std::to_string(pw->first + 1);
        out += '^';
        out += std::to_string(pw->second);
        return;
      }
    }
    switch (node->kind) {
      case SfExpr::Kind::Add:
        child(node->lhs.get(), kPrecAdd);
        out += " + ";
        child(node->rhs.get(), kPrecAdd);
        break;
      case SfExpr::Kind::Mul:
        child(node->lhs.get(), kPrecMul);
        out += '*';
        child(node->rhs.get(), kPrecMul);
        break;
      case SfExpr::Kind::Div:
        child(node->lhs.get(), kPrecMul);
        out += '/';
        child(node->rhs.get(), kPrecMul + 1);  // right side binds tighter
        break;
      case SfExpr::Kind::Const:
        if (denominator(node->value) == 1) {
          out += numerator(node->value).str();
        } else {
          out += '(';
          out += numerator(node->value).str();
          out += '/';
          out += denominator(node->value).str();
          out += ')';
        }
        break;
      case SfExpr::Kind::Var:
        out += 'y';
        out += std::to_string(node->var + 1);
        break;
    }
  }
};

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  int num_vars;

  [[noreturn]] void fail(const std::string& what) const {
    throw data_error("sf parse error at offset " + std::to_string(pos) + ": " +
                     what);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  long long integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    if (pos == start) fail("expected an integer");
    if (pos - start > 18) fail("integer literal too long");
    long long v = 0;
    for (std::size_t i = start; i < pos; ++i) v = v * 10 + (text[i] - '0');
    return v;
  }

  SfExprPtr primary() {
    skip_ws();
    if (eat('(')) {
      SfExprPtr e = expression();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = peek();
    if (c == 'y' || c == 'x') {
      ++pos;
      const long long idx = integer();
      if (idx < 1) fail("variable indices start at 1");
      if (num_vars >= 0 && idx > num_vars) fail("variable index out of range");
      return sf_var(static_cast<int>(idx - 1));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const long long v = integer();
      if (v == 0) fail("constants must be strictly positive");
      return sf_const(Rational(v));
    }
    fail("expected a constant, variable, or '('");
  }

  SfExprPtr factor() {
    SfExprPtr base = primary();
    if (eat('^')) {
      const long long e = integer();
      if (e < 1) fail("exponents must be >= 1");
      return sf_pow(std::move(base), e);
    }
    return base;
  }

  SfExprPtr term() {
    SfExprPtr e = factor();
    while (true) {
      if (eat('*')) {
        e = sf_mul(std::move(e), factor());
      } else if (eat('/')) {
        e = sf_div(std::move(e), factor());
      } else {
        return e;
      }
    }
  }

  SfExprPtr expression() {
    SfExprPtr e = term();
    while (eat('+')) e = sf_add(std::move(e), term());
    return e;
  }
};

}  // namespace

std::string to_string(const SfExprPtr& e, PowStyle style) {
  if (!e) throw data_error("sf print: empty expression");
  Printer printer{style, {}};
  printer.print(e.get());
  return printer.out;
}

SfExprPtr parse_sf(std::string_view text, int num_vars) {
  Parser parser{text, 0, num_vars};
  SfExprPtr e = parser.expression();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input");
  return e;
}

}  // namespace dlse
