#include "flatpop/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace flatpop {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void check_nvars(int a, int b) {
    if (a != b) {
        throw std::invalid_argument("polynomial variable count mismatch: " + std::to_string(a) +
                                    " vs " + std::to_string(b));
    }
}

}  // namespace

// ---- Monomial ----------------------------------------------------------------

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
    if (exps_.empty()) {
        throw std::invalid_argument("monomial needs at least one variable");
    }
    for (int e : exps_) {
        if (e < 0) {
            throw std::invalid_argument("negative exponent in monomial");
        }
        degree_ += e;
    }
}

Monomial Monomial::constant(int nvars) {
    return Monomial(std::vector<int>(static_cast<std::size_t>(nvars), 0));
}

Monomial Monomial::variable(int nvars, int i) {
    if (i < 0 || i >= nvars) {
        throw std::out_of_range("variable index out of range");
    }
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(i)] = 1;
    return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
    check_nvars(nvars(), other.nvars());
    std::vector<int> e(exps_);
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] += other.exps_[i];
    }
    return Monomial(std::move(e));
}

double Monomial::evaluate(std::span<const double> x) const {
    double v = 1.0;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        for (int k = 0; k < exps_[i]; ++k) {
            v *= x[i];
        }
    }
    return v;
}

bool graded_lex_less(const Monomial& a, const Monomial& b) {
    if (a.degree() != b.degree()) {
        return a.degree() < b.degree();
    }
    return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                        a.exponents().begin(), a.exponents().end());
}

// ---- Polynomial --------------------------------------------------------------

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 1) {
        throw std::invalid_argument("polynomial needs at least one variable");
    }
}

Polynomial::Polynomial(int nvars, const Terms& terms) : Polynomial(nvars) {
    for (const auto& [m, c] : terms) {
        check_nvars(nvars_, m.nvars());
        add_term(m, c);
    }
}

Polynomial Polynomial::constant(int nvars, double c) {
    Polynomial p(nvars);
    p.add_term(Monomial::constant(nvars), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
    Polynomial p(nvars);
    p.add_term(Monomial::variable(nvars, i), 1.0);
    return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double c) {
    Polynomial p(m.nvars());
    p.add_term(m, c);
    return p;
}

void Polynomial::add_term(const Monomial& m, double c) {
    if (c == 0.0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) {
            terms_.erase(it);
        }
    }
}

int Polynomial::degree() const {
    if (terms_.empty()) {
        throw std::domain_error("degree of the zero polynomial is undefined");
    }
    // graded order keeps the highest degree last
    return terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars_) {
        throw std::invalid_argument("evaluation point has dimension " + std::to_string(x.size()) +
                                    ", polynomial has " + std::to_string(nvars_) + " variables");
    }
    CompensatedSum s;
    for (const auto& [m, c] : terms_) {
        s.add(c * m.evaluate(x));
    }
    return s.value();
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
    Polynomial r(*this);
    r += q;
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
    check_nvars(nvars_, q.nvars_);
    for (const auto& [m, c] : q.terms_) {
        add_term(m, c);
    }
    return *this;
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

Polynomial Polynomial::operator-(const Polynomial& q) const { return *this + (-q); }

Polynomial Polynomial::operator*(double s) const {
    Polynomial r(nvars_);
    for (const auto& [m, c] : terms_) {
        r.add_term(m, c * s);
    }
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& q) const {
    check_nvars(nvars_, q.nvars_);
    Polynomial r(nvars_);
    for (const auto& [a, ca] : terms_) {
        for (const auto& [b, cb] : q.terms_) {
            r.add_term(a * b, ca * cb);
        }
    }
    return r;
}

double Polynomial::coefficient_norm1() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) {
        s += std::abs(c);
    }
    return s;
}

Polynomial multiply(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial partial_derivative(const Polynomial& p, int i) {
    if (i < 0 || i >= p.nvars()) {
        throw std::out_of_range("derivative variable index " + std::to_string(i) +
                                " out of range for " + std::to_string(p.nvars()) + " variables");
    }
    Polynomial::Terms out;
    for (const auto& [m, c] : p.terms()) {
        const int e = m[i];
        if (e == 0) {
            continue;
        }
        std::vector<int> ex = m.exponents();
        ex[static_cast<std::size_t>(i)] -= 1;
        out.emplace(Monomial(std::move(ex)), c * e);
    }
    return Polynomial(p.nvars(), out);
}

double evaluate(const Polynomial& p, std::span<const double> x) { return p.evaluate(x); }

int degree_half(const Polynomial& p) { return (p.degree() + 1) / 2; }

int constraint_half_degree(std::span<const Polynomial> gs) {
    int d = 1;
    for (const auto& g : gs) {
        if (!g.is_zero()) {
            d = std::max(d, degree_half(g));
        }
    }
    return d;
}

// ---- MonomialBasis -----------------------------------------------------------

std::size_t basis_size(int nvars, int max_degree) {
    if (max_degree < 0) {
        return 0;
    }
    // C(n + d, d) computed incrementally; exact for desk-scale sizes.
    std::size_t r = 1;
    for (int i = 1; i <= max_degree; ++i) {
        r = r * static_cast<std::size_t>(nvars + i) / static_cast<std::size_t>(i);
    }
    return r;
}

MonomialBasis::MonomialBasis(int nvars, int max_degree) : nvars_(nvars), max_degree_(max_degree) {
    if (nvars < 1) {
        throw std::invalid_argument("monomial basis needs at least one variable");
    }
    if (max_degree < 0) {
        throw std::domain_error("monomial basis with negative degree is empty");
    }
    monomials_.reserve(basis_size(nvars, max_degree));
    // Within a degree, exponent vectors run in descending lexicographic order.
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    auto fill = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == e.size()) {
            e[pos] = remaining;
            monomials_.emplace_back(e);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            e[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    for (int d = 0; d <= max_degree; ++d) {
        fill(fill, 0, d);
    }
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
        lookup_.emplace(monomials_[i].exponents(), i);
    }
}

std::optional<std::size_t> MonomialBasis::find(const Monomial& m) const {
    auto it = lookup_.find(m.exponents());
    if (it == lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t MonomialBasis::index(const Monomial& m) const {
    if (m.nvars() != nvars_) {
        throw std::invalid_argument("monomial variable count does not match basis");
    }
    auto i = find(m);
    if (!i) {
        throw std::out_of_range("monomial of degree " + std::to_string(m.degree()) +
                                " outside basis of degree " + std::to_string(max_degree_));
    }
    return *i;
}

std::size_t MonomialBasis::count_up_to(int d) const {
    if (d < 0) {
        return 0;
    }
    return basis_size(nvars_, std::min(d, max_degree_));
}

std::vector<double> MonomialBasis::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars_) {
        throw std::invalid_argument("point dimension does not match basis");
    }
    std::vector<double> v;
    v.reserve(monomials_.size());
    for (const auto& m : monomials_) {
        v.push_back(m.evaluate(x));
    }
    return v;
}

// ---- parsing -----------------------------------------------------------------

ParseError::ParseError(int line, int column, std::string message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line), column_(column), detail_(std::move(message)) {}

VariableResolver indexed_variables(int nvars) {
    return [nvars](std::string_view name) -> std::optional<int> {
        if (name.size() < 2 || name[0] != 'x') {
            return std::nullopt;
        }
        int idx = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
        if (ec != std::errc{} || ptr != name.data() + name.size() || idx < 1 || idx > nvars) {
            return std::nullopt;
        }
        return idx - 1;
    };
}

namespace {

class PolyParser {
public:
    PolyParser(std::string_view text, int nvars, const VariableResolver& resolve, int line,
               int col0)
        : s_(text), nvars_(nvars), resolve_(resolve), line_(line), col0_(col0) {}

    Polynomial parse() {
        Polynomial p(nvars_);
        skip_ws();
        if (at_end()) {
            fail("expected a term");
        }
        bool first = true;
        while (true) {
            skip_ws();
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1.0 : 1.0;
                ++pos_;
                skip_ws();
            } else if (!first) {
                fail("expected '+' or '-'");
            }
            p += parse_term() * sign;
            first = false;
            skip_ws();
            if (at_end()) {
                break;
            }
        }
        return p;
    }

private:
    Polynomial parse_term() {
        double coeff = 1.0;
        std::vector<int> ex(static_cast<std::size_t>(nvars_), 0);
        while (true) {
            skip_ws();
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                coeff *= parse_number();
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::size_t start = pos_;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    ++pos_;
                }
                const std::string_view name = s_.substr(start, pos_ - start);
                auto idx = resolve_(name);
                if (!idx) {
                    fail_at(start, "undeclared variable '" + std::string(name) + "'");
                }
                int e = 1;
                skip_ws();
                if (peek() == '^') {
                    ++pos_;
                    skip_ws();
                    e = parse_exponent();
                }
                ex[static_cast<std::size_t>(*idx)] += e;
            } else {
                fail("expected a number or a variable");
            }
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                continue;
            }
            break;
        }
        return Polynomial::monomial(Monomial(std::move(ex)), coeff);
    }

    double parse_number() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
            ++pos_;
        }
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (!at_end() && (peek() == '+' || peek() == '-')) {
                ++pos_;
            }
            if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = save;
            } else {
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                    ++pos_;
                }
            }
        }
        const std::string token(s_.substr(start, pos_ - start));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc{} || ptr != token.data() + token.size()) {
            fail_at(start, "malformed number '" + token + "'");
        }
        return v;
    }

    int parse_exponent() {
        const std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected a nonnegative integer exponent");
        }
        int e = 0;
        std::from_chars(s_.data() + start, s_.data() + pos_, e);
        return e;
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
            ++pos_;
        }
    }
    [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
    [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
        std::string what = msg;
        if (at < s_.size()) {
            what += " near '" + std::string(s_.substr(at, 1)) + "'";
        } else {
            what += " at end of input";
        }
        throw ParseError(line_, col0_ + static_cast<int>(at) + 1, what);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int nvars_;
    const VariableResolver& resolve_;
    int line_;
    int col0_;
};

std::string format_double(double v) {
    char buf[32];
    // shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

}  // namespace

Polynomial parse_polynomial(std::string_view text, int nvars, const VariableResolver& resolve,
                            int line, int column_offset) {
    return PolyParser(text, nvars, resolve, line, column_offset).parse();
}

Polynomial parse_polynomial(std::string_view text, int nvars) {
    return parse_polynomial(text, nvars, indexed_variables(nvars));
}

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
    if (p.is_zero()) {
        return "0";
    }
    std::ostringstream out;
    bool first = true;
    // highest degree first reads naturally
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        double mag = c;
        if (first) {
            if (c < 0) {
                out << "-";
                mag = -c;
            }
        } else {
            out << (c < 0 ? " - " : " + ");
            mag = std::abs(c);
        }
        first = false;
        bool wrote = false;
        if (mag != 1.0 || m.degree() == 0) {
            out << format_double(mag);
            wrote = true;
        }
        for (int i = 0; i < m.nvars(); ++i) {
            if (m[i] == 0) {
                continue;
            }
            if (wrote) {
                out << "*";
            }
            if (names.empty()) {
                out << "x" << (i + 1);
            } else {
                out << names[static_cast<std::size_t>(i)];
            }
            if (m[i] > 1) {
                out << "^" << m[i];
            }
            wrote = true;
        }
    }
    return out.str();
}

}  // namespace flatpop
