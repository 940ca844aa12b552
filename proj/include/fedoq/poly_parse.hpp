#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "fedoq/base_element.hpp"

namespace fedoq {

// Recursive-descent parser for the shared polynomial grammar:
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := primary ('^' uint)*
//   primary:= rational | variable | '(' expr ')'
//
// Rationals are "p" or "p/q"; variables must match the declared name list.
// The optional leading sign lets printed elements round-trip.
class PolyParser {
public:
    PolyParser(std::string text, std::vector<std::string> names, RingMode mode)
        : text_(std::move(text)), names_(std::move(names)), mode_(mode) {
        if (static_cast<int>(names_.size()) != mode_.nvars)
            throw std::invalid_argument("variable name count does not match ring mode");
    }

    BaseElement parse() {
        BaseElement e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input at position " + std::to_string(pos_), pos_);
        return e;
    }

private:
    BaseElement parse_expr() {
        skip_ws();
        bool negate = false;
        if (peek() == '+' || peek() == '-') negate = (take() == '-');
        BaseElement acc = parse_term();
        if (negate) acc = -acc;
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') break;
            take();
            BaseElement t = parse_term();
            if (c == '+')
                acc += t;
            else
                acc -= t;
        }
        return acc;
    }

    BaseElement parse_term() {
        BaseElement acc = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() != '*') break;
            take();
            acc = acc * parse_factor();
        }
        return acc;
    }

    BaseElement parse_factor() {
        BaseElement base = parse_primary();
        for (;;) {
            skip_ws();
            if (peek() != '^') break;
            take();
            base = base.pow(parse_uint());
        }
        return base;
    }

    BaseElement parse_primary() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            take();
            BaseElement e = parse_expr();
            skip_ws();
            if (peek() != ')')
                throw ParseError("expected ')' at position " + std::to_string(pos_), pos_);
            take();
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_variable();
        throw ParseError("unexpected character at position " + std::to_string(pos_), pos_);
    }

    BaseElement parse_number() {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) take();
        std::string num = text_.substr(start, pos_ - start);
        std::size_t mark = pos_;
        skip_ws();
        if (peek() == '/') {
            // Only a literal denominator: "1/2", not "1/x".
            std::size_t slash = pos_;
            take();
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw ParseError("expected integer denominator at position " + std::to_string(pos_), pos_);
            std::size_t dstart = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) take();
            std::string den = text_.substr(dstart, pos_ - dstart);
            return BaseElement::constant(mode_, parse_rational(num + "/" + den, slash));
        }
        pos_ = mark;
        return BaseElement::constant(mode_, parse_rational(num, start));
    }

    BaseElement parse_variable() {
        std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') take();
        std::string name = text_.substr(start, pos_ - start);
        for (int i = 0; i < static_cast<int>(names_.size()); ++i)
            if (names_[i] == name) return BaseElement::variable(mode_, i);
        throw ParseError("unknown variable '" + name + "' at position " + std::to_string(start), start);
    }

    unsigned parse_uint() {
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw ParseError("expected exponent at position " + std::to_string(pos_), pos_);
        unsigned v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + static_cast<unsigned>(take() - '0');
            if (v > 100000) throw ParseError("exponent too large", pos_);
        }
        return v;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char take() { return text_[pos_++]; }

    std::string text_;
    std::vector<std::string> names_;
    RingMode mode_;
    std::size_t pos_ = 0;
};

inline BaseElement poly_parse(const std::string& text, const std::vector<std::string>& names,
                              RingMode mode) {
    return PolyParser(text, names, mode).parse();
}

} // namespace fedoq
