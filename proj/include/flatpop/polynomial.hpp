#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flatpop {

/// Exponent vector alpha with cached total degree |alpha|.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<int> exponents);

    /// The constant monomial 1 in `nvars` variables.
    static Monomial constant(int nvars);
    /// The monomial x_i (0-based variable index).
    static Monomial variable(int nvars, int i);

    int nvars() const { return static_cast<int>(exps_.size()); }
    int degree() const { return degree_; }
    int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& exponents() const { return exps_; }

    Monomial operator*(const Monomial& other) const;

    /// x^alpha evaluated at a point.
    double evaluate(std::span<const double> x) const;

    friend bool operator==(const Monomial&, const Monomial&) = default;

private:
    std::vector<int> exps_;
    int degree_ = 0;
};

/// Graded lexicographic order: lower total degree first; within a degree
/// x1 precedes x2 precedes ... so the listing reads 1, x1, .., xn, x1^2, x1*x2, ...
bool graded_lex_less(const Monomial& a, const Monomial& b);

struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return graded_lex_less(a, b); }
};

/// Sparse multivariate polynomial with real coefficients. Zero coefficients are never stored.
class Polynomial {
public:
    using Terms = std::map<Monomial, double, GradedLexLess>;

    explicit Polynomial(int nvars);
    Polynomial(int nvars, const Terms& terms);

    static Polynomial constant(int nvars, double c);
    static Polynomial variable(int nvars, int i);
    static Polynomial monomial(const Monomial& m, double c = 1.0);

    int nvars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Total degree; throws std::domain_error on the zero polynomial.
    int degree() const;
    /// Coefficient of `m`, 0 if absent.
    double coefficient(const Monomial& m) const;

    double evaluate(std::span<const double> x) const;

    Polynomial operator+(const Polynomial& q) const;
    Polynomial operator-(const Polynomial& q) const;
    Polynomial operator-() const;
    Polynomial operator*(const Polynomial& q) const;
    Polynomial operator*(double s) const;
    Polynomial& operator+=(const Polynomial& q);

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// Sum of |coefficient|, used to scale tolerances.
    double coefficient_norm1() const;

private:
    void add_term(const Monomial& m, double c);

    int nvars_ = 1;
    Terms terms_;
};

Polynomial multiply(const Polynomial& p, const Polynomial& q);

/// Formal derivative with respect to x_i (0-based).
Polynomial partial_derivative(const Polynomial& p, int i);

double evaluate(const Polynomial& p, std::span<const double> x);

/// ceil(deg(p) / 2); the zero polynomial is rejected.
int degree_half(const Polynomial& p);

/// max(1, d_1, ..., d_m); 1 for an empty list.
int constraint_half_degree(std::span<const Polynomial> gs);

/// Dense graded-lex enumeration of {alpha : |alpha| <= d}.
class MonomialBasis {
public:
    MonomialBasis(int nvars, int max_degree);

    int nvars() const { return nvars_; }
    int max_degree() const { return max_degree_; }
    std::size_t size() const { return monomials_.size(); }

    const Monomial& operator[](std::size_t i) const { return monomials_[i]; }
    const std::vector<Monomial>& monomials() const { return monomials_; }

    /// Position of `m`; throws std::out_of_range if |m| > max_degree.
    std::size_t index(const Monomial& m) const;
    std::optional<std::size_t> find(const Monomial& m) const;

    /// Number of basis monomials with degree <= d (d <= max_degree).
    std::size_t count_up_to(int d) const;

    /// [x]_d evaluated at a point.
    std::vector<double> evaluate(std::span<const double> x) const;

private:
    int nvars_;
    int max_degree_;
    std::vector<Monomial> monomials_;
    std::map<std::vector<int>, std::size_t> lookup_;
};

/// C(n + d, d).
std::size_t basis_size(int nvars, int max_degree);

// ---- text form ------------------------------------------------------------

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, std::string message);
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& detail() const { return detail_; }

private:
    int line_;
    int column_;
    std::string detail_;
};

/// Maps an identifier to a 0-based variable index, or nullopt if undeclared.
using VariableResolver = std::function<std::optional<int>(std::string_view)>;

/// Resolver accepting x1..xn.
VariableResolver indexed_variables(int nvars);

/// Parses `x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1`. `line` and `column_offset`
/// position errors inside a larger document.
Polynomial parse_polynomial(std::string_view text, int nvars, const VariableResolver& resolve,
                            int line = 1, int column_offset = 0);
Polynomial parse_polynomial(std::string_view text, int nvars);

/// Inverse of parse_polynomial; coefficients are printed with round-trip precision.
std::string to_string(const Polynomial& p, std::span<const std::string> names = {});

}  // namespace flatpop
