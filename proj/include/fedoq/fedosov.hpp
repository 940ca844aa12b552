#pragma once

#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "fedoq/poisson.hpp"

namespace fedoq {

template <class X>
struct FixedPointResult {
    X value;
    int iterations = 0;
    std::vector<int> degree_trace;
};

// Solves x + phi(x) = rhs by x_{k+1} = rhs - phi(x_k), stopping at exact
// stabilization (arithmetic is exact, so two equal successive iterates mean
// the fixed point is reached within the truncation). degree_of measures the
// filtration degree of a difference; each step must strictly gain degree.
template <class X, class PhiFn, class DegFn>
FixedPointResult<X> fixed_point_solve(PhiFn&& phi, const X& rhs, int max_iter, DegFn&& degree_of) {
    FixedPointResult<X> out{rhs, 0, {}};
    X cur = rhs;
    int prev_deg = std::numeric_limits<int>::min();
    for (int it = 1; it <= max_iter; ++it) {
        X next = rhs - phi(cur);
        if (next == cur) {
            out.value = std::move(next);
            out.iterations = it;
            return out;
        }
        int d = degree_of(next - cur);
        out.degree_trace.push_back(d);
        if (d <= prev_deg) {
            std::ostringstream msg;
            msg << "fixed_point_solve: map failed to gain filtration degree (trace:";
            for (int t : out.degree_trace) msg << " " << t;
            msg << ")";
            throw InternalError(msg.str());
        }
        prev_deg = d;
        cur = std::move(next);
    }
    throw InternalError("fixed_point_solve: no stabilization within " + std::to_string(max_iter) +
                        " iterations");
}

inline int weyl_diff_degree(const WeylElement& w) {
    return w.is_zero() ? std::numeric_limits<int>::max() : w.min_filtration_degree();
}

// The solved flat connection D = d + nabla + (1/hbar) ad r together with the
// data it was built from.
struct FedosovConnection {
    PoissonStructure structure;
    CurvatureData curv;
    WeylElement r;
    int n_hbar = 0;
    int d_max = 0;
    int iterations = 0;
};

inline WeylElement apply_D(const WeylElement& w, const FedosovConnection& fc) {
    WeylElement out = op_d(w, fc.structure.fm) + nabla(w, fc.structure);
    if (!fc.r.is_zero()) out += ad_over_hbar(fc.r, w, fc.structure.fm);
    return out;
}

// Solves -delta(b) = r + delta(nabla r + (1/2 hbar)[r,r]) and verifies the
// connection invariants. Checks that touch d compare below the top degree:
// d maps dropped degree-(D_max+1) content down one step.
inline FedosovConnection solve_r(const PoissonStructure& p, const CurvatureData& curv, int d_max,
                                 int n_hbar) {
    FedosovConnection fc;
    fc.structure = p;
    fc.curv = curv;
    fc.n_hbar = n_hbar;
    fc.d_max = d_max;

    const FormMatrix& fm = p.fm;
    WeylElement rhs = -op_delta(curv.b, fm);
    auto phi = [&](const WeylElement& x) {
        WeylElement inner = nabla(x, p);
        if (!x.is_zero()) inner += ad_over_hbar(x, x, fm).scaled(Rational(1, 2));
        return op_delta(inner, fm);
    };
    auto solved = fixed_point_solve(phi, rhs, d_max + 2, weyl_diff_degree);
    fc.r = std::move(solved.value);
    fc.iterations = solved.iterations;

    for (const auto& [key, c] : fc.r.terms())
        if (key.form_degree() != 1 || key.filtration_degree() < 2)
            throw InternalError("solve_r: r left the expected space (form-degree 1, degree >= 2)");
    if (!op_delta(fc.r, fm).is_zero()) throw InternalError("solve_r: delta(r) = 0 failed");

    WeylElement residual = curv.b + op_d(fc.r, fm) + nabla(fc.r, p);
    if (!fc.r.is_zero()) residual += ad_over_hbar(fc.r, fc.r, fm).scaled(Rational(1, 2));
    if (!residual.filtration_restrict(d_max - 1).is_zero())
        throw InternalError("solve_r: flatness equation residual is nonzero");

    for (int a = 0; a < p.n; ++a) {
        WeylElement ya = y_generator(a, p.n, d_max, p.base);
        WeylElement dd = apply_D(apply_D(ya, fc), fc);
        if (!dd.filtration_restrict(d_max - 2).is_zero())
            throw InternalError("solve_r: D^2 = 0 failed on generator " + std::to_string(a + 1));
    }
    return fc;
}

inline FedosovConnection solve_connection(const PoissonStructure& p, int d_max, int n_hbar) {
    return solve_r(p, curvature(p, d_max), d_max, n_hbar);
}

// Q = Id + delta(nabla + (1/hbar) ad r); conjugates D to d.
inline WeylElement apply_Q(const WeylElement& w, const FedosovConnection& fc) {
    WeylElement inner = nabla(w, fc.structure);
    if (!fc.r.is_zero()) inner += ad_over_hbar(fc.r, w, fc.structure.fm);
    return w + op_delta(inner, fc.structure.fm);
}

inline WeylElement apply_Q_inverse(const WeylElement& w, const FedosovConnection& fc) {
    auto phi = [&](const WeylElement& x) {
        WeylElement inner = nabla(x, fc.structure);
        if (!fc.r.is_zero()) inner += ad_over_hbar(fc.r, x, fc.structure.fm);
        return op_delta(inner, fc.structure.fm);
    };
    return fixed_point_solve(phi, w, fc.d_max + 2, weyl_diff_degree).value;
}

// tau(a) = Q^{-1}(a): the D-flat section over a base element.
inline WeylElement quantize(const BaseElement& a, const FedosovConnection& fc) {
    WeylElement lift = weyl_from_base(a, fc.structure.n, fc.d_max);
    WeylElement tau = apply_Q_inverse(lift, fc);
    if (!apply_D(tau, fc).filtration_restrict(fc.d_max - 1).is_zero())
        throw InternalError("quantize: section is not D-flat");
    WeylElement scalar_part(fc.structure.n, fc.d_max, fc.structure.base);
    for (const auto& [key, c] : tau.terms())
        if (key.y_degree() == 0 && key.form_degree() == 0) scalar_part.add_term(key, c);
    if (!(scalar_part == lift))
        throw InternalError("quantize: scalar part of the flat section differs from the input");
    return tau;
}

struct StarExpansion {
    BaseElement a;
    BaseElement b;
    std::vector<BaseElement> coeffs; // F_0 .. F_N
};

// a * b = Q(Q^{-1}(a) Q^{-1}(b)). The product of flat sections is flat and Q
// conjugates D to d, so the result is a pure hbar series over the base ring;
// leftover fiber terms mean a broken pipeline.
inline StarExpansion star(const BaseElement& a, const BaseElement& b, const FedosovConnection& fc) {
    WeylElement w = weyl_product(quantize(a, fc), quantize(b, fc), fc.structure.fm);
    WeylElement s = apply_Q(w, fc);
    if (!s.is_scalar_series())
        throw InternalError("star: result carries residual y- or form-terms");
    StarExpansion exp;
    exp.a = a;
    exp.b = b;
    exp.coeffs.reserve(fc.n_hbar + 1);
    for (int k = 0; k <= fc.n_hbar; ++k) exp.coeffs.push_back(s.scalar_coefficient(k));
    return exp;
}

inline nlohmann::ordered_json star_to_json(const StarExpansion& s,
                                           const std::vector<std::string>& names) {
    nlohmann::ordered_json j;
    j["a"] = s.a.str(names);
    j["b"] = s.b.str(names);
    nlohmann::ordered_json fs = nlohmann::ordered_json::array();
    for (const auto& f : s.coeffs) fs.push_back(f.str(names));
    j["F"] = fs;
    return j;
}

} // namespace fedoq
