#include "flatpop/problem_file.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace flatpop {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Line {
    int number;
    std::string_view text;  // comment stripped
};

std::size_t skip_space(std::string_view s, std::size_t i) {
    while (i < s.size() && is_space(s[i])) {
        ++i;
    }
    return i;
}

bool blank(std::string_view s) { return skip_space(s, 0) == s.size(); }

bool valid_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

// Locates the single relational operator of a constraint line.
struct Relation {
    std::size_t pos;
    std::size_t len;
    enum Kind { ge, le, eq } kind;
};

std::optional<Relation> find_relation(std::string_view s) {
    std::optional<Relation> found;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        Relation r{i, 2, Relation::ge};
        if (s.substr(i, 2) == ">=") {
            r.kind = Relation::ge;
        } else if (s.substr(i, 2) == "<=") {
            r.kind = Relation::le;
        } else if (s.substr(i, 2) == "==") {
            r.kind = Relation::eq;
        } else {
            continue;
        }
        if (found) {
            found->len = 0;  // marks "more than one"
            found->pos = i;
            return found;
        }
        found = r;
        ++i;
    }
    return found;
}

class ProblemParser {
public:
    explicit ProblemParser(std::string_view text) {
        int number = 1;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) {
                end = text.size();
            }
            std::string_view line = text.substr(start, end - start);
            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            lines_.push_back({number, line});
            ++number;
            start = end + 1;
        }
    }

    Problem parse() {
        bool in_constraints = false;
        for (const auto& ln : lines_) {
            if (blank(ln.text)) {
                continue;
            }
            const std::size_t begin = skip_space(ln.text, 0);
            const auto colon = ln.text.find(':');
            std::string_view key;
            if (colon != std::string_view::npos) {
                key = trim(ln.text.substr(begin, colon - begin));
            }
            if (key == "vars" || key == "minimize" || key == "subject_to" || key == "ball_radius") {
                in_constraints = false;
                const std::size_t body = colon + 1;
                if (key == "vars") {
                    parse_vars(ln, body);
                } else if (key == "minimize") {
                    parse_objective(ln, body);
                } else if (key == "subject_to") {
                    require_vars(ln, begin);
                    in_constraints = true;
                    if (!blank(ln.text.substr(body))) {
                        parse_constraint(ln, body);
                    }
                } else {
                    parse_ball(ln, body);
                }
            } else if (in_constraints) {
                parse_constraint(ln, begin);
            } else {
                throw ParseError(ln.number, static_cast<int>(begin) + 1,
                                 "expected one of 'vars:', 'minimize:', 'subject_to:', 'ball_radius:'");
            }
        }
        if (names_.empty()) {
            throw ParseError(last_line(), 1, "missing 'vars:' declaration");
        }
        if (!objective_) {
            throw ParseError(last_line(), 1, "missing 'minimize:' line");
        }
        Problem p(*objective_, std::move(ineq_), std::move(eq_));
        p.ball_radius = ball_;
        p.variable_names = names_;
        p.validate();
        return p;
    }

private:
    static std::string_view trim(std::string_view s) {
        const std::size_t a = skip_space(s, 0);
        std::size_t b = s.size();
        while (b > a && is_space(s[b - 1])) {
            --b;
        }
        return s.substr(a, b - a);
    }

    int last_line() const { return lines_.empty() ? 1 : lines_.back().number; }

    void require_vars(const Line& ln, std::size_t at) const {
        if (names_.empty()) {
            throw ParseError(ln.number, static_cast<int>(at) + 1, "'vars:' must come before this line");
        }
    }

    void parse_vars(const Line& ln, std::size_t body) {
        if (!names_.empty()) {
            throw ParseError(ln.number, 1, "duplicate 'vars:' declaration");
        }
        std::size_t i = body;
        while (true) {
            i = skip_space(ln.text, i);
            std::size_t j = i;
            while (j < ln.text.size() && ln.text[j] != ',' && !is_space(ln.text[j])) {
                ++j;
            }
            const std::string_view name = ln.text.substr(i, j - i);
            if (name.empty()) {
                throw ParseError(ln.number, static_cast<int>(i) + 1, "expected a variable name");
            }
            if (!valid_identifier(name)) {
                throw ParseError(ln.number, static_cast<int>(i) + 1,
                                 "invalid variable name '" + std::string(name) + "'");
            }
            if (index_.count(std::string(name))) {
                throw ParseError(ln.number, static_cast<int>(i) + 1,
                                 "variable '" + std::string(name) + "' declared twice");
            }
            index_.emplace(std::string(name), static_cast<int>(names_.size()));
            names_.emplace_back(name);
            i = skip_space(ln.text, j);
            if (i >= ln.text.size()) {
                break;
            }
            if (ln.text[i] == ',') {
                ++i;
            }
        }
    }

    Polynomial poly(const Line& ln, std::size_t from, std::size_t to) const {
        const std::string_view s = ln.text.substr(from, to - from);
        if (blank(s)) {
            throw ParseError(ln.number, static_cast<int>(skip_space(ln.text, from)) + 1, "expected a polynomial");
        }
        VariableResolver resolve = [this](std::string_view name) -> std::optional<int> {
            const auto it = index_.find(std::string(name));
            if (it == index_.end()) {
                return std::nullopt;
            }
            return it->second;
        };
        return parse_polynomial(s, static_cast<int>(names_.size()), resolve, ln.number, static_cast<int>(from));
    }

    void parse_objective(const Line& ln, std::size_t body) {
        require_vars(ln, body);
        if (objective_) {
            throw ParseError(ln.number, 1, "duplicate 'minimize:' line");
        }
        objective_ = poly(ln, body, ln.text.size());
    }

    void parse_constraint(const Line& ln, std::size_t from) {
        const std::string_view rest = ln.text.substr(from);
        const auto rel = find_relation(rest);
        if (!rel) {
            throw ParseError(ln.number, static_cast<int>(ln.text.size()) + 1,
                             "expected '>=', '<=' or '==' in constraint");
        }
        if (rel->len == 0) {
            throw ParseError(ln.number, static_cast<int>(from + rel->pos) + 1,
                             "more than one relational operator in constraint");
        }
        const std::size_t op = from + rel->pos;
        const Polynomial lhs = poly(ln, from, op);
        const Polynomial rhs = poly(ln, op + 2, ln.text.size());
        switch (rel->kind) {
            case Relation::ge: ineq_.push_back(lhs - rhs); break;
            case Relation::le: ineq_.push_back(rhs - lhs); break;
            case Relation::eq: eq_.push_back(lhs - rhs); break;
        }
        const Polynomial& added = rel->kind == Relation::eq ? eq_.back() : ineq_.back();
        if (added.is_zero()) {
            throw ParseError(ln.number, static_cast<int>(op) + 1, "constraint is trivially satisfied");
        }
    }

    void parse_ball(const Line& ln, std::size_t body) {
        if (ball_) {
            throw ParseError(ln.number, 1, "duplicate 'ball_radius:' line");
        }
        const std::size_t a = skip_space(ln.text, body);
        const std::string_view s = trim(ln.text.substr(body));
        double r = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), r);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParseError(ln.number, static_cast<int>(a) + 1, "expected a number after 'ball_radius:'");
        }
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ParseError(ln.number, static_cast<int>(a) + 1, "ball radius must be positive and finite");
        }
        ball_ = r;
    }

    std::vector<Line> lines_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::optional<Polynomial> objective_;
    std::vector<Polynomial> ineq_;
    std::vector<Polynomial> eq_;
    std::optional<double> ball_;
};

}  // namespace

Problem parse_problem(std::string_view text) { return ProblemParser(text).parse(); }

std::string print_problem(const Problem& prob) {
    const auto names = prob.names();
    std::ostringstream out;
    out << "vars: ";
    for (std::size_t i = 0; i < names.size(); ++i) {
        out << (i ? ", " : "") << names[i];
    }
    out << "\nminimize: " << to_string(prob.objective, names) << "\n";
    if (!prob.inequalities.empty() || !prob.equalities.empty()) {
        out << "subject_to:\n";
        for (const auto& g : prob.inequalities) {
            out << "  " << to_string(g, names) << " >= 0\n";
        }
        for (const auto& h : prob.equalities) {
            out << "  " << to_string(h, names) << " == 0\n";
        }
    }
    if (prob.ball_radius) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *prob.ball_radius);
        out << "ball_radius: " << buf << "\n";
    }
    return out.str();
}

}  // namespace flatpop
