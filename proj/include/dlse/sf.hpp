#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dlse/lse.hpp"

namespace dlse {

using Rational = boost::multiprecision::cpp_rational;

// Subtraction-free expression: a term over {+, *, /}, strictly positive
// rational constants, and variables. Nodes are immutable and shared, so
// repeated-multiplication power chains cost O(log exponent) nodes.
struct SfExpr;
using SfExprPtr = std::shared_ptr<const SfExpr>;

struct SfExpr {
  enum class Kind { Add, Mul, Div, Const, Var };
  Kind kind;
  SfExprPtr lhs, rhs;  // Add/Mul/Div
  Rational value;      // Const, > 0
  int var = -1;        // Var, 0-based
};

SfExprPtr sf_const(Rational value);
SfExprPtr sf_var(int index);
SfExprPtr sf_add(SfExprPtr a, SfExprPtr b);
SfExprPtr sf_mul(SfExprPtr a, SfExprPtr b);
SfExprPtr sf_div(SfExprPtr num, SfExprPtr den);
// Repeated multiplication by squaring; exponent >= 1.
SfExprPtr sf_pow(SfExprPtr base, long long exponent);

// Visits every distinct node once.
void for_each_node(const SfExprPtr& e,
                   const std::function<void(const SfExpr&)>& fn);
std::size_t node_count(const SfExprPtr& e);

// Difference model with rational parameters, held as the equivalent ratio of
// two posynomial-style sums: temperature 1/p, every exponent an integer over
// the common denominator q, and positive rational coefficients (the
// exponentials of the rationalized offsets).
struct RationalGpos {
  std::vector<Rational> coeffs;                          // K, > 0
  std::vector<std::vector<long long>> exponent_numerators;  // K x n, over q
};

struct RationalDlse {
  long long p = 1;  // temperature = 1/p
  long long q = 1;  // common exponent denominator
  Eigen::Index dim = 0;
  RationalGpos numerator;    // from the plus component
  RationalGpos denominator;  // from the minus component
  double kappa = 0.0;        // certified sup deviation from the source model
                             // over the radius used when rationalizing
};

struct RationalizeOptions {
  double tol = 1e-4;          // bound on the certified deviation kappa
  double radius = 1.0;        // input-space radius the certificate covers
  long long max_q = 1000000;  // cap on the common exponent denominator
};

// Numeric rationalization: temperature snapped to 1/p, exponents rounded to
// the smallest common denominator q meeting the per-entry budget, offsets
// approximated through continued fractions of their exponentials. The
// certificate kappa adds max_k ||dAlpha_k|| * radius + max_k |dBeta_k| over
// both components plus |dT| * (log K+ + log K-); throws numeric_error with
// the best achievable kappa when the tolerance cannot be met under max_q.
RationalDlse rationalize(const DlseModel& m, const RationalizeOptions& opts = {});

// Double-precision view of the rationalized model (for error sampling).
DlseModel to_dlse_model(const RationalDlse& r);

struct SfEmission {
  SfExprPtr expr;
  long long p = 1;
  long long q = 1;
};

// Ratio of the two sums with integer exponents (entries * p); negative
// exponents become division by the matching positive power, so the tree
// stays subtraction-free. A denominator identically 1 is dropped.
SfEmission emit_sf(const RationalDlse& r);

// Substitutes y_i = x_i^(1/q), evaluates the tree, raises to 1/p. Requires
// x > 0 componentwise.
double eval_sf(const SfExprPtr& e, long long p, long long q,
               const Eigen::VectorXd& x);

// Exact tree value at rational arguments (no outer roots; meaningful for
// q = 1 trees or direct expression arithmetic).
Rational eval_sf_exact(const SfExprPtr& e, const std::vector<Rational>& x);

enum class PowStyle {
  Caret,   // collapse pure variable powers to y1^k
  Expand,  // plain repeated multiplication
};

std::string to_string(const SfExprPtr& e, PowStyle style = PowStyle::Caret);

// Parses the printer's grammar: +, *, /, ^ with positive integer exponents,
// positive integer constants, variables y1.., x1.., parentheses. num_vars < 0
// skips the variable-range check.
SfExprPtr parse_sf(std::string_view text, int num_vars = -1);

}  // namespace dlse
