#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoreach/system.hpp"

namespace chronoreach {

struct ParseError : InputError {
    int line;
    int col;
    ParseError(const std::string& msg, int line_, int col_)
        : InputError(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
};

namespace detail {

// Character scanner with 1-based position tracking; '#' comments run to end of line.
class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    void skip_ws(bool cross_lines = true) {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '\n') {
                if (!cross_lines) return;
                advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    char get() {
        const char c = peek();
        advance();
        return c;
    }

    bool consume(char c) {
        skip_ws();
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect(char c, const std::string& what) {
        skip_ws();
        if (peek() != c) fail("expected '" + std::string(1, c) + "' " + what);
        advance();
    }

    std::string digits() {
        std::string out;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) out += get();
        return out;
    }

    std::string word() {
        std::string out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                out += get();
            } else {
                break;
            }
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    int line() const { return line_; }
    int col() const { return col_; }

private:
    void advance() {
        if (pos_ >= text_.size()) return;
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// number := digits ('/' digits | '.' digits)?   (finite decimals exact)
// Schedule literals additionally allow a decimal exponent ("1.5e-4"), still exact;
// the .ctrl polynomial grammar does not (allow_exp = false).
inline Rational scan_number(Scanner& sc, bool allow_exp = false) {
    sc.skip_ws();
    const std::string ip = sc.digits();
    if (ip.empty()) sc.fail("expected a number");
    Rational v;
    if (sc.peek() == '/') {
        sc.get();
        const std::string dp = sc.digits();
        if (dp.empty()) sc.fail("expected denominator digits after '/'");
        const Rational den{BigInt(dp)};
        if (den == 0) sc.fail("zero denominator");
        return Rational(BigInt(ip)) / den;
    }
    if (sc.peek() == '.') {
        sc.get();
        const std::string fp = sc.digits();
        if (fp.empty()) sc.fail("expected digits after decimal point");
        v = rational_from_decimal(ip, fp);
    } else {
        v = Rational(BigInt(ip));
    }
    if (allow_exp && (sc.peek() == 'e' || sc.peek() == 'E')) {
        sc.get();
        bool eneg = false;
        if (sc.peek() == '-' || sc.peek() == '+') eneg = sc.get() == '-';
        const std::string es = sc.digits();
        if (es.empty()) sc.fail("expected exponent digits");
        BigInt scale = 1;
        for (long i = std::stol(es); i > 0; --i) scale *= 10;
        v = eneg ? Rational(v / scale) : Rational(v * scale);
    }
    return v;
}

inline Rational scan_signed_number(Scanner& sc, bool allow_exp = false) {
    sc.skip_ws();
    bool neg = false;
    if (sc.peek() == '-' || sc.peek() == '+') neg = sc.get() == '-';
    const Rational v = scan_number(sc, allow_exp);
    return neg ? Rational(-v) : v;
}

class PolyParser {
public:
    PolyParser(Scanner& sc, int dim) : sc_(sc), dim_(dim) {}

    Poly expression() {
        Poly acc = term();
        while (true) {
            sc_.skip_ws();
            const char c = sc_.peek();
            if (c == '+' || c == '-') {
                sc_.get();
                const Poly t = term();
                if (c == '+') {
                    acc += t;
                } else {
                    acc -= t;
                }
            } else {
                return acc;
            }
        }
    }

private:
    Poly term() {
        Poly acc = factor();
        while (true) {
            sc_.skip_ws();
            if (sc_.peek() == '*') {
                sc_.get();
                acc = acc * factor();
            } else {
                return acc;
            }
        }
    }

    Poly factor() {
        sc_.skip_ws();
        bool neg = false;
        while (sc_.peek() == '+' || sc_.peek() == '-') {
            if (sc_.get() == '-') neg = !neg;
            sc_.skip_ws();
        }
        Poly p = signless_factor();
        return neg ? -p : p;
    }

    Poly signless_factor() {
        Poly base = primary();
        sc_.skip_ws();
        if (sc_.peek() != '^') return base;
        sc_.get();
        sc_.skip_ws();
        if (sc_.peek() == '-') sc_.fail("negative exponent not allowed");
        const std::string ds = sc_.digits();
        if (ds.empty()) sc_.fail("expected a non-negative integer exponent");
        if (sc_.peek() == '.') sc_.fail("fractional exponent not allowed");
        unsigned long e = 0;
        try {
            e = std::stoul(ds);
        } catch (...) {
            sc_.fail("exponent out of range");
        }
        Poly acc = Poly::constant(dim_, 1);
        for (unsigned long i = 0; i < e; ++i) acc = acc * base;
        return acc;
    }

    Poly primary() {
        sc_.skip_ws();
        const char c = sc_.peek();
        if (c == '(') {
            sc_.get();
            Poly inner = expression();
            sc_.expect(')', "to close parenthesized expression");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return Poly::constant(dim_, scan_number(sc_));
        }
        if (c == 'x') {
            const int line = sc_.line(), col = sc_.col();
            sc_.get();
            const std::string ds = sc_.digits();
            if (ds.empty()) throw ParseError("expected variable index after 'x'", line, col);
            unsigned long idx = 0;
            try {
                idx = std::stoul(ds);
            } catch (...) {
                throw ParseError("variable index out of range", line, col);
            }
            if (idx < 1 || idx > static_cast<unsigned long>(dim_))
                throw ParseError("unknown variable x" + ds, line, col);
            return Poly::variable(dim_, static_cast<int>(idx) - 1);
        }
        sc_.fail(c == '\0' ? "unexpected end of input in expression"
                           : "unexpected character '" + std::string(1, c) + "' in expression");
    }

    Scanner& sc_;
    int dim_;
};

}  // namespace detail

// Parse a single polynomial expression over x1..xdim; the whole text must be consumed.
inline Poly parse_poly(std::string_view text, int dim) {
    detail::Scanner sc(text);
    detail::PolyParser pp(sc, dim);
    Poly p = pp.expression();
    if (!sc.eof()) sc.fail("unexpected character '" + std::string(1, sc.peek()) + "' after expression");
    return p;
}

// Parse the .ctrl block format:
//   system <name> / dim <n> / controls <m> / optional x0 = [..] / X0 = [...] .. Xm = [...]
inline ControlSystem parse_system(std::string_view text) {
    detail::Scanner sc(text);
    std::optional<std::string> name;
    std::optional<int> dim, m;
    std::optional<std::vector<Rational>> x0;
    std::map<int, std::vector<Poly>> fields;

    auto require_shape = [&](const char* what) {
        if (!dim) sc.fail(std::string("'dim' must be declared before ") + what);
        if (!m) sc.fail(std::string("'controls' must be declared before ") + what);
    };

    while (!sc.eof()) {
        sc.skip_ws();
        const int kline = sc.line(), kcol = sc.col();
        const std::string key = sc.word();
        if (key.empty()) sc.fail("expected a keyword (system/dim/controls/x0/Xi)");
        if (key == "system") {
            if (name) throw ParseError("duplicate 'system' line", kline, kcol);
            sc.skip_ws();
            const std::string n = sc.word();
            if (n.empty()) sc.fail("expected system name");
            name = n;
        } else if (key == "dim") {
            if (dim) throw ParseError("duplicate 'dim' line", kline, kcol);
            sc.skip_ws();
            const std::string ds = sc.digits();
            if (ds.empty()) sc.fail("expected dimension");
            dim = std::stoi(ds);
            if (*dim < 1) throw ParseError("dim must be >= 1", kline, kcol);
        } else if (key == "controls") {
            if (m) throw ParseError("duplicate 'controls' line", kline, kcol);
            sc.skip_ws();
            const std::string ds = sc.digits();
            if (ds.empty()) sc.fail("expected control count");
            m = std::stoi(ds);
        } else if (key == "x0") {
            if (x0) throw ParseError("duplicate 'x0' line", kline, kcol);
            require_shape("'x0'");
            sc.expect('=', "after 'x0'");
            sc.expect('[', "to open basepoint list");
            std::vector<Rational> v;
            if (!sc.consume(']')) {
                while (true) {
                    v.push_back(detail::scan_signed_number(sc));
                    if (sc.consume(']')) break;
                    sc.expect(',', "between basepoint entries");
                }
            }
            if (static_cast<int>(v.size()) != *dim)
                throw ParseError("basepoint has " + std::to_string(v.size()) + " entries, expected " +
                                     std::to_string(*dim),
                                 kline, kcol);
            x0 = std::move(v);
        } else if (key.size() >= 2 && key[0] == 'X' &&
                   key.find_first_not_of("0123456789", 1) == std::string::npos) {
            require_shape("field definitions");
            const int idx = std::stoi(key.substr(1));
            if (idx > *m)
                throw ParseError("field " + key + " exceeds declared controls " + std::to_string(*m), kline,
                                 kcol);
            if (fields.count(idx)) throw ParseError("duplicate field " + key, kline, kcol);
            sc.expect('=', "after '" + key + "'");
            sc.expect('[', "to open component list");
            std::vector<Poly> comps;
            detail::PolyParser pp(sc, *dim);
            if (!sc.consume(']')) {
                while (true) {
                    comps.push_back(pp.expression());
                    if (sc.consume(']')) break;
                    sc.expect(',', "between components");
                }
            }
            if (static_cast<int>(comps.size()) != *dim)
                throw ParseError("field " + key + " has " + std::to_string(comps.size()) +
                                     " components, expected " + std::to_string(*dim),
                                 kline, kcol);
            fields.emplace(idx, std::move(comps));
        } else {
            throw ParseError("unknown keyword '" + key + "'", kline, kcol);
        }
    }

    if (!name) throw ParseError("missing 'system' line", 1, 1);
    if (!dim) throw ParseError("missing 'dim' line", 1, 1);
    if (!m) throw ParseError("missing 'controls' line", 1, 1);
    for (int i = 0; i <= *m; ++i)
        if (!fields.count(i)) throw ParseError("missing field X" + std::to_string(i), 1, 1);

    ControlSystem sys;
    sys.name = *name;
    sys.dim = *dim;
    sys.m = *m;
    for (int i = 0; i <= *m; ++i) sys.fields.emplace_back(std::move(fields.at(i)));
    if (x0) {
        sys.basepoint = std::move(*x0);
        sys.basepoint_explicit = true;
    } else {
        sys.basepoint.assign(static_cast<std::size_t>(*dim), Rational(0));
    }

    const auto issues = validate(sys);
    if (!issues.empty()) throw ParseError("invalid system: " + issues.front(), 1, 1);
    return sys;
}

// Canonical rendering; parse(serialize(sys)) reproduces sys exactly.
inline std::string serialize(const ControlSystem& sys) {
    std::string out;
    out += "system " + sys.name + "\n";
    out += "dim " + std::to_string(sys.dim) + "\n";
    out += "controls " + std::to_string(sys.m) + "\n";
    if (sys.basepoint_explicit) {
        out += "x0 = [";
        for (std::size_t i = 0; i < sys.basepoint.size(); ++i) {
            if (i) out += ", ";
            out += rational_str(sys.basepoint[i]);
        }
        out += "]\n";
    }
    for (std::size_t i = 0; i < sys.fields.size(); ++i) {
        out += "X" + std::to_string(i) + " = [";
        for (std::size_t c = 0; c < sys.fields[i].comp.size(); ++c) {
            if (c) out += ", ";
            out += sys.fields[i].comp[c].to_string();
        }
        out += "]\n";
    }
    return out;
}

// Schedule literal "(1,0):0.1;(0,1):0.2" -> exact controls and durations, chronological.
inline RationalSchedule parse_schedule_literal(std::string_view text, int m) {
    detail::Scanner sc(text);
    RationalSchedule out;
    while (true) {
        sc.expect('(', "to open control tuple");
        std::vector<Rational> u;
        if (!sc.consume(')')) {
            while (true) {
                u.push_back(detail::scan_signed_number(sc, /*allow_exp=*/true));
                if (sc.consume(')')) break;
                sc.expect(',', "between control entries");
            }
        }
        if (static_cast<int>(u.size()) != m)
            sc.fail("control tuple has " + std::to_string(u.size()) + " entries, expected " + std::to_string(m));
        for (const auto& c : u)
            if (c < -1 || c > 1) sc.fail("control outside [-1,1]");
        sc.expect(':', "before duration");
        const Rational d = detail::scan_signed_number(sc, /*allow_exp=*/true);
        if (d < 0) sc.fail("negative duration");
        out.controls.push_back(std::move(u));
        out.durations.push_back(d);
        if (sc.eof()) break;
        sc.expect(';', "between segments");
        if (sc.eof()) break;  // tolerate trailing ';'
    }
    return out;
}

}  // namespace chronoreach
