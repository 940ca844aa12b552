#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fedoq/errors.hpp"
#include "fedoq/rational.hpp"

namespace fedoq {

// Coefficient ring selector: full polynomial ring in nvars variables, or the
// jet quotient that drops every monomial of total degree > max_degree.
struct RingMode {
    int nvars = 0;
    bool jet = false;
    int max_degree = 0; // meaningful only when jet

    friend bool operator==(const RingMode&, const RingMode&) = default;
};

inline RingMode polynomial_mode(int nvars) { return RingMode{nvars, false, 0}; }
inline RingMode jet_mode(int nvars, int max_degree) { return RingMode{nvars, true, max_degree}; }

// Exact multivariate polynomial (or jet) with rational coefficients, stored
// as a sorted multidegree -> coefficient map. No zero coefficients and, in
// jet mode, no over-degree terms are ever kept, so equality of term maps is
// equality in the ring.
class BaseElement {
public:
    using Exponents = std::vector<int>;
    using TermMap = std::map<Exponents, Rational>;

    explicit BaseElement(RingMode mode = RingMode{}) : mode_(mode) {}

    static BaseElement zero(RingMode mode) { return BaseElement(mode); }

    static BaseElement constant(RingMode mode, Rational value) {
        BaseElement e(mode);
        e.add_term(Exponents(mode.nvars, 0), std::move(value));
        return e;
    }

    static BaseElement one(RingMode mode) { return constant(mode, 1); }

    static BaseElement variable(RingMode mode, int index) {
        if (index < 0 || index >= mode.nvars)
            throw std::invalid_argument("variable index out of range");
        Exponents exps(mode.nvars, 0);
        exps[index] = 1;
        BaseElement e(mode);
        e.add_term(std::move(exps), 1);
        return e;
    }

    static BaseElement monomial(RingMode mode, Exponents exps, Rational coeff) {
        if (static_cast<int>(exps.size()) != mode.nvars)
            throw std::invalid_argument("monomial exponent count mismatch");
        BaseElement e(mode);
        e.add_term(std::move(exps), std::move(coeff));
        return e;
    }

    const RingMode& mode() const { return mode_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() ||
               (terms_.size() == 1 && total_degree_of(terms_.begin()->first) == 0);
    }

    Rational constant_term() const {
        auto it = terms_.find(Exponents(mode_.nvars, 0));
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // Max total degree of a stored term; -1 for zero.
    int total_degree() const {
        int deg = -1;
        for (const auto& [e, c] : terms_) deg = std::max(deg, total_degree_of(e));
        return deg;
    }

    // Min total degree of a stored term; -1 for zero. Used as the filtration
    // degree of univariate jets in fixed-point iteration tests.
    int min_total_degree() const {
        int deg = -1;
        for (const auto& [e, c] : terms_) {
            int d = total_degree_of(e);
            if (deg < 0 || d < deg) deg = d;
        }
        return deg;
    }

    void add_term(Exponents exps, Rational coeff) {
        if (coeff == 0) return;
        if (mode_.jet && total_degree_of(exps) > mode_.max_degree) return;
        auto it = terms_.find(exps);
        if (it == terms_.end()) {
            terms_.emplace(std::move(exps), std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    BaseElement& operator+=(const BaseElement& rhs) {
        require_same_mode(rhs);
        for (const auto& [e, c] : rhs.terms_) add_term(e, c);
        return *this;
    }

    BaseElement& operator-=(const BaseElement& rhs) {
        require_same_mode(rhs);
        for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
        return *this;
    }

    friend BaseElement operator+(BaseElement a, const BaseElement& b) { return a += b; }
    friend BaseElement operator-(BaseElement a, const BaseElement& b) { return a -= b; }

    BaseElement operator-() const {
        BaseElement r(mode_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    friend BaseElement operator*(const BaseElement& a, const BaseElement& b) {
        a.require_same_mode(b);
        BaseElement r(a.mode_);
        for (const auto& [ea, ca] : a.terms_) {
            const int da = total_degree_of(ea);
            for (const auto& [eb, cb] : b.terms_) {
                if (a.mode_.jet && da + total_degree_of(eb) > a.mode_.max_degree) continue;
                Exponents e(ea);
                for (int i = 0; i < a.mode_.nvars; ++i) e[i] += eb[i];
                r.add_term(std::move(e), ca * cb);
            }
        }
        return r;
    }

    BaseElement& operator*=(const BaseElement& rhs) { return *this = *this * rhs; }

    BaseElement scaled(const Rational& s) const {
        BaseElement r(mode_);
        if (s == 0) return r;
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
        return r;
    }

    BaseElement pow(unsigned n) const {
        BaseElement r = one(mode_);
        for (unsigned i = 0; i < n; ++i) r = r * *this;
        return r;
    }

    BaseElement derivative(int var) const {
        if (var < 0 || var >= mode_.nvars)
            throw std::invalid_argument("derivative variable out of range");
        BaseElement r(mode_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponents d(e);
            d[var] -= 1;
            r.add_term(std::move(d), c * e[var]);
        }
        return r;
    }

    // Drops terms of total degree > maxdeg (no mode change).
    BaseElement truncated(int maxdeg) const {
        BaseElement r(mode_);
        for (const auto& [e, c] : terms_)
            if (total_degree_of(e) <= maxdeg) r.terms_.emplace(e, c);
        return r;
    }

    // Reinterprets the element in another ring mode over the same variables;
    // terms beyond the target jet order drop.
    BaseElement remode(RingMode target) const {
        if (target.nvars != mode_.nvars)
            throw std::invalid_argument("remode: variable count mismatch");
        BaseElement r(target);
        for (const auto& [e, c] : terms_) r.add_term(e, c);
        return r;
    }

    // Multiplicative inverse in the jet ring; requires a unit constant term.
    // Geometric series in the augmentation-ideal part, which is nilpotent
    // modulo the jet ideal.
    BaseElement series_invert() const {
        if (!mode_.jet)
            throw ValidationError("series_invert requires jet mode; polynomial inverses are generally not polynomial");
        Rational c0 = constant_term();
        if (c0 == 0)
            throw ValidationError("series_invert: zero constant term");
        BaseElement u = scaled(1 / c0);
        u.add_term(Exponents(mode_.nvars, 0), -1); // u = a/c0 - 1, min degree >= 1
        BaseElement acc = one(mode_);
        BaseElement upow = one(mode_);
        for (int k = 1; k <= mode_.max_degree; ++k) {
            upow = upow * u;
            if (upow.is_zero()) break;
            if (k % 2 == 1)
                acc -= upow;
            else
                acc += upow;
        }
        return acc.scaled(1 / c0);
    }

    friend bool operator==(const BaseElement& a, const BaseElement& b) {
        return a.mode_ == b.mode_ && a.terms_ == b.terms_;
    }

    // Canonical printable form; round-trips through poly_parse.
    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            Rational a = c;
            if (first) {
                if (a < 0) {
                    out << "-";
                    a = -a;
                }
            } else {
                out << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            first = false;
            bool has_vars = total_degree_of(e) > 0;
            if (!has_vars || a != 1) {
                out << to_string(a);
                if (has_vars) out << "*";
            }
            bool first_var = true;
            for (int i = 0; i < mode_.nvars; ++i) {
                if (e[i] == 0) continue;
                if (!first_var) out << "*";
                first_var = false;
                out << names.at(i);
                if (e[i] > 1) out << "^" << e[i];
            }
        }
        return out.str();
    }

    static int total_degree_of(const Exponents& e) {
        return std::accumulate(e.begin(), e.end(), 0);
    }

private:
    void require_same_mode(const BaseElement& rhs) const {
        if (!(mode_ == rhs.mode_))
            throw ValidationError("ring mode mismatch between operands");
    }

    RingMode mode_;
    TermMap terms_;
};

// Default variable names x1..xm, used by tests and debug output.
inline std::vector<std::string> default_names(int nvars) {
    std::vector<std::string> names;
    names.reserve(nvars);
    for (int i = 1; i <= nvars; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

} // namespace fedoq
