#include "gf/netspec.hpp"

#include <cctype>
#include <cstdlib>

#include "gf/errors.hpp"

namespace gf {

namespace {

struct NetParser {
    const std::string& s;
    size_t pos = 0;
    const Mollifier& rho;
    const ChartDomain& domain;

    NetParser(const std::string& text, const Mollifier& r, const ChartDomain& d)
        : s(text), rho(r), domain(d) {}

    void skipWs() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool consume(char c) {
        skipWs();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skipWs();
        return pos < s.size() ? s[pos] : '\0';
    }

    /// Text up to the parenthesis matching an already-consumed '('.
    std::string balanced() {
        int depth = 1;
        const size_t start = pos;
        while (pos < s.size() && depth > 0) {
            if (s[pos] == '(') ++depth;
            if (s[pos] == ')') --depth;
            ++pos;
        }
        if (depth != 0) throw ParseError("net: unbalanced parentheses");
        return s.substr(start, pos - 1 - start);
    }

    Representative primary() {
        skipWs();
        if (pos >= s.size()) throw ParseError("net: unexpected end of input");
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(s.c_str() + pos, &end);
            pos = static_cast<size_t>(end - s.c_str());
            return Representative::scalar(constant(v), domain);
        }
        if (c == '(') {
            ++pos;
            Representative r = net();
            if (!consume(')')) throw ParseError("net: expected ')'");
            return r;
        }
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        const std::string word = s.substr(start, pos - start);
        if (word == "eps") return Representative::scalar(epsilon(), domain);
        if (word == "x") return Representative::scalar(var(0), domain);
        if (word == "iota") {
            if (!consume('(')) throw ParseError("net: expected '(' after iota");
            return embedDistribution(parseDistribution(balanced()), rho, domain);
        }
        if (word == "sigma") {
            if (!consume('(')) throw ParseError("net: expected '(' after sigma");
            return embedSmooth(parseExpr(balanced()), domain);
        }
        throw ParseError("net: unknown token '" + word + "'");
    }

    Representative factor() {
        Representative r = primary();
        if (consume('^')) {
            skipWs();
            char* end = nullptr;
            const long n = std::strtol(s.c_str() + pos, &end, 10);
            if (end == s.c_str() + pos || n < 1)
                throw ParseError("net: '^' needs a positive integer exponent");
            pos = static_cast<size_t>(end - s.c_str());
            Representative acc = r;
            for (long i = 1; i < n; ++i) acc = mul(acc, r);
            return acc;
        }
        return r;
    }

    Representative term() {
        Representative r = factor();
        while (consume('*')) r = mul(r, factor());
        return r;
    }

    Representative net() {
        skipWs();
        bool negate = consume('-');
        Representative r = term();
        if (negate) r = scale(r, -1.0);
        while (true) {
            if (consume('+'))
                r = add(r, term());
            else if (consume('-'))
                r = sub(r, term());
            else
                break;
        }
        return r;
    }
};

}  // namespace

Representative parseNet(const std::string& text, const Mollifier& rho,
                        const ChartDomain& domain) {
    NetParser p(text, rho, domain);
    Representative r = p.net();
    p.skipWs();
    if (p.pos != text.size())
        throw ParseError("net: trailing input at position " + std::to_string(p.pos));
    return r;
}

}  // namespace gf
