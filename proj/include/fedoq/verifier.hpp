#pragma once

#include <array>
#include <functional>
#include <random>

#include "fedoq/fedosov.hpp"
#include "fedoq/util.hpp"

namespace fedoq {

// Deterministic sample source. Only mt19937_64 raw draws are used (never
// standard-library distributions), so sequences are identical everywhere and
// failures reproduce from the recorded seed.
class SampleGenerator {
public:
    explicit SampleGenerator(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t draw(std::uint64_t bound) { return rng_() % bound; }

    // Pure monomial of total degree <= max_degree (degree chosen uniformly).
    BaseElement monomial(RingMode mode, int max_degree) {
        int deg = static_cast<int>(draw(static_cast<std::uint64_t>(max_degree) + 1));
        BaseElement::Exponents e(mode.nvars, 0);
        for (int i = 0; i < deg; ++i) e[draw(mode.nvars)] += 1;
        return BaseElement::monomial(mode, std::move(e), 1);
    }

    // Short combination of monomials with small nonzero integer coefficients.
    BaseElement element(RingMode mode, int max_degree, int terms) {
        BaseElement out(mode);
        for (int t = 0; t < terms; ++t) {
            long c = static_cast<long>(draw(5)) - 2;
            if (c == 0) c = 1;
            out += monomial(mode, max_degree).scaled(Rational(c));
        }
        return out;
    }

    // Random homogeneous Weyl term of s-degree (p,q) with an hbar power.
    WeylElement weyl_term(int n, int trunc, RingMode base, int p, int q, int max_hbar) {
        WeylKey key;
        key.y.assign(n, 0);
        for (int i = 0; i < p; ++i) key.y[draw(n)] += 1;
        while (static_cast<int>(key.forms.size()) < q) {
            int f = static_cast<int>(draw(n));
            bool seen = false;
            for (int v : key.forms) seen |= (v == f);
            if (!seen) key.forms.push_back(f);
        }
        std::sort(key.forms.begin(), key.forms.end());
        int room = (trunc - p) / 2;
        key.hbar = room > 0 ? static_cast<int>(draw(std::min(room, max_hbar) + 1)) : 0;
        WeylElement w(n, trunc, base);
        w.add_term(std::move(key), element(base, base.jet ? std::min(2, base.max_degree) : 2, 2));
        return w;
    }

private:
    std::mt19937_64 rng_;
};

// Closed-form constant-coefficient oracle:
// F_k = (1/k!)(1/2)^k sum pi^{i1 j1}..pi^{ik jk} d^k a . d^k b.
inline StarExpansion moyal_oracle(const BaseElement& a, const BaseElement& b, const PolyMatrix& pi,
                                  int order) {
    const int m = pi.rows();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (!pi.at(i, j).is_constant())
                throw ValidationError("moyal_oracle requires a constant bracket matrix");

    struct Pair {
        BaseElement u, v;
        Rational w;
    };
    const RingMode mode = a.mode();
    std::vector<Pair> level{{a, b, Rational(1)}};
    StarExpansion out{a, b, {}};
    Rational weight(1); // 1 / (k! 2^k)
    for (int k = 0;; ++k) {
        BaseElement fk(mode);
        for (const auto& p : level) fk += (p.u * p.v).scaled(p.w * weight);
        out.coeffs.push_back(std::move(fk));
        if (k == order) break;
        std::vector<Pair> next;
        for (const auto& p : level)
            for (int i = 0; i < m; ++i) {
                BaseElement du = p.u.derivative(i);
                if (du.is_zero()) continue;
                for (int j = 0; j < m; ++j) {
                    Rational pij = pi.at(i, j).constant_term();
                    if (pij == 0) continue;
                    BaseElement dv = p.v.derivative(j);
                    if (dv.is_zero()) continue;
                    next.push_back({du, std::move(dv), p.w * pij});
                }
            }
        if (next.empty()) {
            while (static_cast<int>(out.coeffs.size()) <= order)
                out.coeffs.push_back(BaseElement::zero(mode));
            break;
        }
        level = std::move(next);
        weight /= Rational(2 * (k + 1));
    }
    return out;
}

// A star product as a plain callable returning F_0..F_N, so checks can run
// against the solver, the oracle, or a deliberately corrupted product.
using StarFn = std::function<std::vector<BaseElement>(const BaseElement&, const BaseElement&)>;

inline StarFn make_star_fn(const FedosovConnection& fc) {
    return [&fc](const BaseElement& x, const BaseElement& y) { return star(x, y, fc).coeffs; };
}

// Corrupts F_{fault_order} by +1; negative control for the order-by-order
// associativity report.
inline StarFn make_faulty_star_fn(const FedosovConnection& fc, int fault_order) {
    return [&fc, fault_order](const BaseElement& x, const BaseElement& y) {
        auto coeffs = star(x, y, fc).coeffs;
        if (fault_order >= 0 && fault_order < static_cast<int>(coeffs.size()))
            coeffs[fault_order] += BaseElement::one(x.mode());
        return coeffs;
    };
}

// hbar-bilinear extension: (sum A_i h^i) * (sum B_j h^j) through order N.
inline std::vector<BaseElement> star_series(const std::vector<BaseElement>& a,
                                            const std::vector<BaseElement>& b, const StarFn& sf,
                                            int order, RingMode mode) {
    std::vector<BaseElement> out(order + 1, BaseElement::zero(mode));
    for (int i = 0; i < static_cast<int>(a.size()) && i <= order; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; j < static_cast<int>(b.size()) && i + j <= order; ++j) {
            if (b[j].is_zero()) continue;
            auto coeffs = sf(a[i], b[j]);
            for (int k = 0; i + j + k <= order && k < static_cast<int>(coeffs.size()); ++k)
                out[i + j + k] += coeffs[k];
        }
    }
    return out;
}

struct AssocSampleResult {
    BaseElement a, b, c;
    std::vector<BaseElement> residuals; // indexed by hbar order
    int first_fail_order = -1;          // -1 when every order vanishes
};

struct AssocReport {
    int order = 0;
    bool pass = true;
    std::vector<AssocSampleResult> samples;
};

// Order-by-order associativity: for each triple the residual
// sum_{i+j=n} (F_i(F_j(a,b),c) - F_i(a,F_j(b,c))) must vanish for n <= order.
inline AssocReport associativity_check(const StarFn& sf,
                                       const std::vector<std::array<BaseElement, 3>>& triples,
                                       int order, RingMode mode) {
    AssocReport report;
    report.order = order;
    report.samples.resize(triples.size());
    parallel_for(triples.size(), [&](std::size_t idx) {
        const auto& [a, b, c] = triples[idx];
        AssocSampleResult res;
        res.a = a;
        res.b = b;
        res.c = c;
        std::vector<BaseElement> ab = sf(a, b);
        std::vector<BaseElement> bc = sf(b, c);
        std::vector<BaseElement> left = star_series(ab, {c}, sf, order, mode);
        std::vector<BaseElement> right = star_series({a}, bc, sf, order, mode);
        for (int n = 0; n <= order; ++n) {
            BaseElement residual = left[n] - right[n];
            if (!residual.is_zero() && res.first_fail_order < 0) res.first_fail_order = n;
            res.residuals.push_back(std::move(residual));
        }
        report.samples[idx] = std::move(res);
    });
    for (const auto& s : report.samples)
        if (s.first_fail_order >= 0) report.pass = false;
    return report;
}

using BilinearFn = std::function<BaseElement(const BaseElement&, const BaseElement&)>;
using LinearFn = std::function<BaseElement(const BaseElement&)>;

struct CocycleReport {
    bool pass = true;
    bool antisymmetric = true;
    bool leibniz_pass = true; // meaningful when antisymmetric
    std::vector<BaseElement> residuals;
};

// x F1(y,z) - F1(xy,z) + F1(x,yz) - F1(x,y) z = 0 on samples; antisymmetric
// cocycles are additionally held to the Leibniz rule.
inline CocycleReport hochschild_cocycle_check(const BilinearFn& f1,
                                              const std::vector<std::array<BaseElement, 3>>& triples) {
    CocycleReport report;
    for (const auto& [x, y, z] : triples) {
        BaseElement residual = x * f1(y, z) - f1(x * y, z) + f1(x, y * z) - f1(x, y) * z;
        if (!residual.is_zero()) report.pass = false;
        report.residuals.push_back(std::move(residual));
        if (!(f1(x, y) + f1(y, x)).is_zero()) report.antisymmetric = false;
    }
    if (report.antisymmetric) {
        for (const auto& [x, y, z] : triples) {
            BaseElement lres = f1(x * y, z) - x * f1(y, z) - y * f1(x, z);
            if (!lres.is_zero()) report.leibniz_pass = false;
        }
    }
    return report;
}

inline CocycleReport transpose_cocycle_check(const BilinearFn& f1,
                                             const std::vector<std::array<BaseElement, 3>>& triples) {
    BilinearFn swapped = [&f1](const BaseElement& x, const BaseElement& y) { return f1(y, x); };
    return hochschild_cocycle_check(swapped, triples);
}

struct GaugeReport {
    bool pass = true;
    std::vector<BaseElement> residuals;
};

// F1'(x,y) - F1(x,y) = x Q1(y) - Q1(xy) + Q1(x) y on sampled pairs.
inline GaugeReport gauge_equivalence_check(const BilinearFn& f1, const BilinearFn& f1_prime,
                                           const LinearFn& q1,
                                           const std::vector<std::array<BaseElement, 2>>& pairs) {
    GaugeReport report;
    for (const auto& [x, y] : pairs) {
        BaseElement residual = f1_prime(x, y) - f1(x, y) - (x * q1(y) - q1(x * y) + q1(x) * y);
        if (!residual.is_zero()) report.pass = false;
        report.residuals.push_back(std::move(residual));
    }
    return report;
}

// hbar^1 coefficient of a*b - b*a minus the Poisson bracket; must vanish.
inline BaseElement first_order_residual(const StarFn& sf, const BaseElement& a,
                                        const BaseElement& b, const PolyMatrix& pi) {
    auto ab = sf(a, b);
    auto ba = sf(b, a);
    return ab.at(1) - ba.at(1) - poisson_bracket(a, b, pi);
}

} // namespace fedoq
