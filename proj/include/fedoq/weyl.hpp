#pragma once

#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "fedoq/base_element.hpp"
#include "fedoq/matrix.hpp"

#include <nlohmann/json.hpp>

namespace fedoq {

// One monomial slot of the completed Weyl complex: symmetric fiber exponents
// y^alpha, a strictly increasing exterior index list, and an hbar power.
struct WeylKey {
    std::vector<int> y;     // length n, y-multidegree
    std::vector<int> forms; // strictly increasing, 0-based fiber indices
    int hbar = 0;

    int filtration_degree() const {
        int d = 2 * hbar;
        for (int e : y) d += e;
        return d;
    }
    int y_degree() const {
        int d = 0;
        for (int e : y) d += e;
        return d;
    }
    int form_degree() const { return static_cast<int>(forms.size()); }

    friend bool operator<(const WeylKey& a, const WeylKey& b) {
        if (a.y != b.y) return a.y < b.y;
        if (a.forms != b.forms) return a.forms < b.forms;
        return a.hbar < b.hbar;
    }
    friend bool operator==(const WeylKey&, const WeylKey&) = default;
};

namespace detail {

// Merge two sorted index lists into one wedge word. Returns the merged list
// and the sign of the permutation, or nullopt when an index repeats.
inline std::optional<std::pair<std::vector<int>, int>> wedge_merge(const std::vector<int>& a,
                                                                   const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    int sign = 1;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return std::nullopt;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] moves left past the remaining elements of a
            if ((a.size() - i) % 2 == 1) sign = -sign;
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return std::make_pair(std::move(out), sign);
}

// Wedge e^idx from the left onto a sorted word.
inline std::optional<std::pair<std::vector<int>, int>> wedge_insert_front(
    const std::vector<int>& s, int idx) {
    std::vector<int> out;
    out.reserve(s.size() + 1);
    int smaller = 0;
    for (int v : s) {
        if (v == idx) return std::nullopt;
        if (v < idx) ++smaller;
    }
    out = s;
    out.insert(out.begin() + smaller, idx);
    return std::make_pair(std::move(out), smaller % 2 == 0 ? 1 : -1);
}

} // namespace detail

// Element of the completed Weyl algebra tensored with the exterior algebra,
// stored in symmetric-ordering symbol form and truncated at a fixed maximum
// filtration degree (y counts one, hbar counts two; forms do not count).
class WeylElement {
public:
    using TermMap = std::map<WeylKey, BaseElement>;

    WeylElement() = default;
    WeylElement(int n, int trunc, RingMode base) : n_(n), trunc_(trunc), base_(base) {}

    int fiber_rank() const { return n_; }
    int trunc() const { return trunc_; }
    const RingMode& base_mode() const { return base_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Min filtration degree of a stored term; INT_MAX for zero (so that the
    // degree of a vanishing difference dominates everything).
    int min_filtration_degree() const {
        int d = std::numeric_limits<int>::max();
        for (const auto& [k, c] : terms_) d = std::min(d, k.filtration_degree());
        return d;
    }

    void add_term(WeylKey key, BaseElement coeff) {
        if (coeff.is_zero()) return;
        if (key.filtration_degree() > trunc_) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(std::move(key), std::move(coeff));
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    WeylElement& operator+=(const WeylElement& rhs) {
        require_compatible(rhs);
        for (const auto& [k, c] : rhs.terms_) add_term(k, c);
        return *this;
    }
    WeylElement& operator-=(const WeylElement& rhs) {
        require_compatible(rhs);
        for (const auto& [k, c] : rhs.terms_) add_term(k, -c);
        return *this;
    }
    friend WeylElement operator+(WeylElement a, const WeylElement& b) { return a += b; }
    friend WeylElement operator-(WeylElement a, const WeylElement& b) { return a -= b; }

    WeylElement operator-() const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }

    WeylElement scaled(const Rational& s) const {
        WeylElement r(n_, trunc_, base_);
        if (s == 0) return r;
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, c.scaled(s));
        return r;
    }

    // Central multiplication by a base coefficient.
    WeylElement scaled(const BaseElement& f) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, c] : terms_) r.add_term(k, c * f);
        return r;
    }

    friend bool operator==(const WeylElement& a, const WeylElement& b) {
        return a.n_ == b.n_ && a.trunc_ == b.trunc_ && a.base_ == b.base_ && a.terms_ == b.terms_;
    }

    // Component of given form-degree parity (0 even, 1 odd).
    WeylElement parity_component(int parity) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, c] : terms_)
            if (k.form_degree() % 2 == parity) r.terms_.emplace(k, c);
        return r;
    }

    // Restriction to terms of filtration degree <= cutoff. Identity checks
    // that apply d to truncated data compare against zero below the top
    // degree, since d maps dropped degree-(trunc+1) content one step down.
    WeylElement filtration_restrict(int cutoff) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, c] : terms_)
            if (k.filtration_degree() <= cutoff) r.terms_.emplace(k, c);
        return r;
    }

    WeylElement y_derivative(int c) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, coeff] : terms_) {
            if (k.y[c] == 0) continue;
            WeylKey nk = k;
            nk.y[c] -= 1;
            r.add_term(std::move(nk), coeff.scaled(k.y[c]));
        }
        return r;
    }

    WeylElement y_multiply(int c) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, coeff] : terms_) {
            WeylKey nk = k;
            nk.y[c] += 1;
            r.add_term(std::move(nk), coeff);
        }
        return r;
    }

    WeylElement hbar_multiply(int power) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, coeff] : terms_) {
            WeylKey nk = k;
            nk.hbar += power;
            r.add_term(std::move(nk), coeff);
        }
        return r;
    }

    WeylElement hbar_divide(int power) const {
        WeylElement r(n_, trunc_, base_);
        for (const auto& [k, coeff] : terms_) {
            if (k.hbar < power)
                throw InternalError("hbar_divide: element is not divisible by hbar^" +
                                    std::to_string(power));
            WeylKey nk = k;
            nk.hbar -= power;
            r.terms_.emplace(std::move(nk), coeff);
        }
        return r;
    }

    // Coefficient of hbar^k among the scalar (y-free, form-free) terms.
    BaseElement scalar_coefficient(int k) const {
        WeylKey key;
        key.y.assign(n_, 0);
        key.hbar = k;
        auto it = terms_.find(key);
        return it == terms_.end() ? BaseElement::zero(base_) : it->second;
    }

    bool is_scalar_series() const {
        for (const auto& [k, c] : terms_)
            if (k.y_degree() != 0 || k.form_degree() != 0) return false;
        return true;
    }

    void require_compatible(const WeylElement& rhs) const {
        if (n_ != rhs.n_ || trunc_ != rhs.trunc_ || !(base_ == rhs.base_))
            throw ValidationError("Weyl element dimension/truncation/mode mismatch");
    }

private:
    int n_ = 0;
    int trunc_ = 0;
    RingMode base_{};
    TermMap terms_;
};

// Fiber form phi and its exact inverse omega (omega * phi = identity).
struct FormMatrix {
    PolyMatrix phi;
    PolyMatrix omega;

    int rank() const { return phi.rows(); }

    void validate() const {
        if (!phi.is_skew()) throw ValidationError("phi is not skew-symmetric");
        if (!omega.is_skew()) throw ValidationError("omega is not skew-symmetric");
        PolyMatrix id = PolyMatrix::identity(phi.rows(), phi.mode());
        if (!(omega * phi == id) || !(phi * omega == id))
            throw ValidationError("omega is not the exact inverse of phi");
    }
};

inline WeylElement weyl_from_base(const BaseElement& f, int n, int trunc) {
    WeylElement r(n, trunc, f.mode());
    WeylKey key;
    key.y.assign(n, 0);
    r.add_term(std::move(key), f);
    return r;
}

inline WeylElement weyl_one(int n, int trunc, RingMode base) {
    return weyl_from_base(BaseElement::one(base), n, trunc);
}

inline WeylElement y_generator(int a, int n, int trunc, RingMode base) {
    WeylElement r(n, trunc, base);
    WeylKey key;
    key.y.assign(n, 0);
    key.y[a] = 1;
    r.add_term(std::move(key), BaseElement::one(base));
    return r;
}

inline WeylElement form_generator(int a, int n, int trunc, RingMode base) {
    WeylElement r(n, trunc, base);
    WeylKey key;
    key.y.assign(n, 0);
    key.forms = {a};
    r.add_term(std::move(key), BaseElement::one(base));
    return r;
}

inline WeylElement hbar_element(int k, int n, int trunc, RingMode base) {
    WeylElement r(n, trunc, base);
    WeylKey key;
    key.y.assign(n, 0);
    key.hbar = k;
    r.add_term(std::move(key), BaseElement::one(base));
    return r;
}

// dbar = sum_a y_a e^a, the element whose rescaled adjoint action realizes d.
inline WeylElement dbar_element(int n, int trunc, RingMode base) {
    WeylElement r(n, trunc, base);
    for (int a = 0; a < n; ++a) {
        WeylKey key;
        key.y.assign(n, 0);
        key.y[a] = 1;
        key.forms = {a};
        r.add_term(std::move(key), BaseElement::one(base));
    }
    return r;
}

// Fiberwise symmetric-ordering product: sum over contraction order c of
// (hbar/2)^c / c! applied through the phi-pairing of y-derivatives, exterior
// factors wedged with the usual sign. Realizes [y_a, y_b] = hbar phi_ab and
// preserves the filtration degree termwise, so the upfront degree test covers
// every contraction level.
inline WeylElement weyl_product(const WeylElement& a, const WeylElement& b, const FormMatrix& fm) {
    a.require_compatible(b);
    const int n = a.fiber_rank();
    WeylElement result(n, a.trunc(), a.base_mode());

    using YPair = std::pair<std::vector<int>, std::vector<int>>;
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            if (ka.filtration_degree() + kb.filtration_degree() > a.trunc()) continue;
            auto wedge = detail::wedge_merge(ka.forms, kb.forms);
            if (!wedge) continue;
            BaseElement c0 = ca * cb;
            if (c0.is_zero()) continue;
            if (wedge->second < 0) c0 = -c0;

            std::map<YPair, BaseElement> level;
            level.emplace(YPair{ka.y, kb.y}, std::move(c0));
            Rational weight(1); // 1 / (c! 2^c)
            int hbar_shift = 0;
            while (!level.empty()) {
                for (const auto& [ys, g] : level) {
                    WeylKey key;
                    key.y = ys.first;
                    for (int i = 0; i < n; ++i) key.y[i] += ys.second[i];
                    key.forms = wedge->first;
                    key.hbar = ka.hbar + kb.hbar + hbar_shift;
                    result.add_term(std::move(key), g.scaled(weight));
                }
                std::map<YPair, BaseElement> next;
                for (const auto& [ys, g] : level) {
                    for (int u = 0; u < n; ++u) {
                        if (ys.first[u] == 0) continue;
                        for (int v = 0; v < n; ++v) {
                            if (ys.second[v] == 0) continue;
                            const BaseElement& phi_uv = fm.phi.at(u, v);
                            if (phi_uv.is_zero()) continue;
                            BaseElement contrib = g * phi_uv;
                            contrib = contrib.scaled(Rational(ys.first[u]) * Rational(ys.second[v]));
                            if (contrib.is_zero()) continue;
                            YPair nys = ys;
                            nys.first[u] -= 1;
                            nys.second[v] -= 1;
                            auto it = next.find(nys);
                            if (it == next.end())
                                next.emplace(std::move(nys), std::move(contrib));
                            else {
                                it->second += contrib;
                                if (it->second.is_zero()) next.erase(it);
                            }
                        }
                    }
                }
                level = std::move(next);
                ++hbar_shift;
                weight /= Rational(2 * hbar_shift);
            }
        }
    }
    return result;
}

// Copy into a different truncation window (terms above the new window drop).
inline WeylElement with_trunc(const WeylElement& w, int trunc) {
    WeylElement r(w.fiber_rank(), trunc, w.base_mode());
    for (const auto& [k, c] : w.terms()) r.add_term(k, c);
    return r;
}

// Truncates every coefficient into the target base ring. Jet pipelines run
// with internal headroom; comparisons and reports pass through this first.
inline WeylElement coefficients_remode(const WeylElement& w, RingMode target) {
    WeylElement r(w.fiber_rank(), w.trunc(), target);
    for (const auto& [k, c] : w.terms()) r.add_term(k, c.remode(target));
    return r;
}

// Super-commutator [a,b] = ab - (-1)^{|a||b|} ba, parity = form-degree parity,
// extended bilinearly to inhomogeneous arguments.
inline WeylElement commutator(const WeylElement& a, const WeylElement& b, const FormMatrix& fm) {
    WeylElement result(a.fiber_rank(), a.trunc(), a.base_mode());
    for (int pa = 0; pa <= 1; ++pa) {
        WeylElement ac = a.parity_component(pa);
        if (ac.is_zero()) continue;
        for (int pb = 0; pb <= 1; ++pb) {
            WeylElement bc = b.parity_component(pb);
            if (bc.is_zero()) continue;
            WeylElement ab = weyl_product(ac, bc, fm);
            WeylElement ba = weyl_product(bc, ac, fm);
            result += ab;
            if (pa * pb == 1)
                result += ba;
            else
                result -= ba;
        }
    }
    return result;
}

// (1/hbar)[a, x]. The commutator is divisible by hbar because the plain
// symbol parts cancel in the super-commutator. Computed in a window lifted by
// two so the division returns every term of degree <= trunc exactly.
inline WeylElement ad_over_hbar(const WeylElement& a, const WeylElement& x, const FormMatrix& fm) {
    const int t = a.trunc();
    WeylElement lifted = commutator(with_trunc(a, t + 2), with_trunc(x, t + 2), fm);
    return with_trunc(lifted.hbar_divide(1), t);
}

// d: odd derivation of bidegree (-1,1). d(y_b) = sum_a phi_ab e^a, zero on the
// base ring, on hbar, and on forms; equals (1/hbar) ad(dbar).
inline WeylElement op_d(const WeylElement& w, const FormMatrix& fm) {
    const int n = w.fiber_rank();
    WeylElement r(n, w.trunc(), w.base_mode());
    for (const auto& [k, coeff] : w.terms()) {
        for (int b = 0; b < n; ++b) {
            if (k.y[b] == 0) continue;
            for (int a = 0; a < n; ++a) {
                const BaseElement& phi_ab = fm.phi.at(a, b);
                if (phi_ab.is_zero()) continue;
                auto ins = detail::wedge_insert_front(k.forms, a);
                if (!ins) continue;
                WeylKey nk;
                nk.y = k.y;
                nk.y[b] -= 1;
                nk.forms = std::move(ins->first);
                nk.hbar = k.hbar;
                BaseElement c = coeff * phi_ab;
                r.add_term(std::move(nk), c.scaled(Rational(k.y[b] * ins->second)));
            }
        }
    }
    return r;
}

// partial: odd derivation of bidegree (1,-1) on symbols. partial(e^b) =
// sum_c omega_cb y_c, zero on the base ring, on hbar, and on the y's.
inline WeylElement op_partial(const WeylElement& w, const FormMatrix& fm) {
    const int n = w.fiber_rank();
    WeylElement r(n, w.trunc(), w.base_mode());
    for (const auto& [k, coeff] : w.terms()) {
        for (std::size_t i = 0; i < k.forms.size(); ++i) {
            const int s = k.forms[i];
            const int sign = (i % 2 == 0) ? 1 : -1;
            for (int c = 0; c < n; ++c) {
                const BaseElement& omega_cs = fm.omega.at(c, s);
                if (omega_cs.is_zero()) continue;
                WeylKey nk;
                nk.y = k.y;
                nk.y[c] += 1;
                nk.forms = k.forms;
                nk.forms.erase(nk.forms.begin() + static_cast<std::ptrdiff_t>(i));
                nk.hbar = k.hbar;
                BaseElement cf = coeff * omega_cs;
                r.add_term(std::move(nk), cf.scaled(Rational(sign)));
            }
        }
    }
    return r;
}

// delta = partial / (p+q) on each s-degree (p,q) component, zero on (0,0).
inline WeylElement op_delta(const WeylElement& w, const FormMatrix& fm) {
    const int n = w.fiber_rank();
    WeylElement r(n, w.trunc(), w.base_mode());
    for (const auto& [k, coeff] : w.terms()) {
        const int pq = k.y_degree() + k.form_degree();
        if (pq == 0) continue;
        const Rational inv_pq = Rational(1) / Rational(pq);
        for (std::size_t i = 0; i < k.forms.size(); ++i) {
            const int s = k.forms[i];
            const int sign = (i % 2 == 0) ? 1 : -1;
            for (int c = 0; c < n; ++c) {
                const BaseElement& omega_cs = fm.omega.at(c, s);
                if (omega_cs.is_zero()) continue;
                WeylKey nk;
                nk.y = k.y;
                nk.y[c] += 1;
                nk.forms = k.forms;
                nk.forms.erase(nk.forms.begin() + static_cast<std::ptrdiff_t>(i));
                nk.hbar = k.hbar;
                BaseElement cf = coeff * omega_cs;
                r.add_term(std::move(nk), cf.scaled(inv_pq * sign));
            }
        }
    }
    return r;
}

// Partition by s-degree (y-degree, form-degree); components sum back to w.
inline std::vector<std::tuple<int, int, WeylElement>> s_decompose(const WeylElement& w) {
    std::map<std::pair<int, int>, WeylElement> parts;
    for (const auto& [k, coeff] : w.terms()) {
        auto key = std::make_pair(k.y_degree(), k.form_degree());
        auto it = parts.find(key);
        if (it == parts.end())
            it = parts.emplace(key, WeylElement(w.fiber_rank(), w.trunc(), w.base_mode())).first;
        it->second.add_term(k, coeff);
    }
    std::vector<std::tuple<int, int, WeylElement>> out;
    out.reserve(parts.size());
    for (auto& [pq, comp] : parts) out.emplace_back(pq.first, pq.second, std::move(comp));
    return out;
}

// Debug serialization: deterministic term order, 1-based form indices.
inline nlohmann::ordered_json weyl_to_json(const WeylElement& w,
                                           const std::vector<std::string>& names) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [k, coeff] : w.terms()) {
        nlohmann::ordered_json term;
        term["y"] = k.y;
        std::vector<int> forms1;
        forms1.reserve(k.forms.size());
        for (int f : k.forms) forms1.push_back(f + 1);
        term["forms"] = forms1;
        term["hbar"] = k.hbar;
        term["coeff"] = coeff.str(names);
        arr.push_back(std::move(term));
    }
    return arr;
}

} // namespace fedoq
