#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fedoq/matrix.hpp"
#include "fedoq/weyl.hpp"

namespace fedoq {

// Validated bracket data: bivector Pi on the base variables, basis derivations
// D_a = sum_j V(a,j) d/dx_j, fiber form phi with inverse omega, and structure
// functions [D_a, D_b] = sum_k C[k](a,b) D_k.
struct PoissonStructure {
    int m = 0; // base variables
    int n = 0; // fiber rank
    RingMode base{};      // working coefficient ring (jet order may carry headroom)
    RingMode user_base{}; // declared coefficient ring; external surfaces truncate to it
    bool explicit_basis = false;
    PolyMatrix Pi;              // m x m, working mode
    PolyMatrix V;               // n x m
    FormMatrix fm;              // n x n
    std::vector<PolyMatrix> C;  // C[k](a,b) = c_ab^k, each n x n

    const BaseElement& c(int a, int b, int k) const { return C[k].at(a, b); }

    // D_a applied to a base coefficient.
    BaseElement derive(int a, const BaseElement& f) const {
        BaseElement out(base);
        for (int j = 0; j < m; ++j) {
            const BaseElement& coeff = V.at(a, j);
            if (coeff.is_zero()) continue;
            out += coeff * f.derivative(j);
        }
        return out;
    }
};

// f(a,b) = sum_{ij} pi^{ij} d_i a d_j b.
inline BaseElement poisson_bracket(const BaseElement& a, const BaseElement& b,
                                   const PolyMatrix& pi) {
    BaseElement out(a.mode());
    for (int i = 0; i < pi.rows(); ++i) {
        BaseElement da = a.derivative(i);
        if (da.is_zero()) continue;
        for (int j = 0; j < pi.cols(); ++j) {
            if (pi.at(i, j).is_zero()) continue;
            out += pi.at(i, j) * da * b.derivative(j);
        }
    }
    return out;
}

struct JacobiReport {
    struct Entry {
        int i, j, k;
        BaseElement residual;
    };
    bool pass = true;
    std::vector<Entry> failures;
};

// Cyclic residual sum_l (pi^{il} d_l pi^{jk} + pi^{jl} d_l pi^{ki} +
// pi^{kl} d_l pi^{ij}) over all triples i<j<k. The residual is fully
// antisymmetric, so these triples decide the identity.
inline JacobiReport jacobi_check(const PolyMatrix& pi) {
    if (pi.rows() != pi.cols()) throw ValidationError("jacobi_check: matrix not square");
    if (!pi.is_skew()) throw ValidationError("jacobi_check: matrix not skew-symmetric");
    const int m = pi.rows();
    const RingMode mode = pi.mode();
    JacobiReport report;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = j + 1; k < m; ++k) {
                BaseElement res(mode);
                for (int l = 0; l < m; ++l) {
                    res += pi.at(i, l) * pi.at(j, k).derivative(l);
                    res += pi.at(j, l) * pi.at(k, i).derivative(l);
                    res += pi.at(k, l) * pi.at(i, j).derivative(l);
                }
                if (!res.is_zero()) {
                    report.pass = false;
                    report.failures.push_back({i, j, k, std::move(res)});
                }
            }
    return report;
}

struct StructureInput {
    RingMode base{};
    PolyMatrix Pi;
    bool explicit_basis = false;
    // explicit-basis data; omega may be omitted and is then computed.
    std::optional<PolyMatrix> V;
    std::optional<PolyMatrix> phi;
    std::optional<PolyMatrix> omega;
    std::optional<std::vector<PolyMatrix>> C;
    // Extra jet orders carried internally. x-derivatives do not descend to the
    // jet quotient, so each one consumed by the pipeline costs one order of
    // trustworthy output; the headroom pays for them and external surfaces
    // truncate back to 'base'. Ignored in polynomial mode.
    int working_headroom = 0;
};

inline PolyMatrix remode_matrix(const PolyMatrix& m, RingMode target) {
    PolyMatrix out(m.rows(), m.cols(), target);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(i, j).remode(target);
    return out;
}

namespace detail {

inline void check_bracket_consistency(const PoissonStructure& p) {
    for (int a = 0; a < p.n; ++a)
        for (int b = a + 1; b < p.n; ++b)
            for (int j = 0; j < p.m; ++j) {
                BaseElement lhs(p.base);
                for (int k = 0; k < p.n; ++k) lhs += p.c(a, b, k) * p.V.at(k, j);
                BaseElement rhs = p.derive(a, p.V.at(b, j)) - p.derive(b, p.V.at(a, j));
                if (!(lhs == rhs))
                    throw ValidationError(
                        "bracket-consistency violated: [D_" + std::to_string(a + 1) + ", D_" +
                        std::to_string(b + 1) + "] does not match structure functions at column " +
                        std::to_string(j + 1));
            }
}

inline void check_structure_antisymmetry(const PoissonStructure& p) {
    for (int k = 0; k < p.n; ++k)
        for (int a = 0; a < p.n; ++a)
            for (int b = 0; b <= a; ++b)
                if (!(p.c(a, b, k) + p.c(b, a, k)).is_zero())
                    throw ValidationError("structure functions are not antisymmetric in the lower indices");
}

} // namespace detail

// Symplectic-coordinates mode derives everything from Pi: D_a = f(x_a, .) so
// V = Pi, phi = Pi, omega = Pi^{-1}, and c_ab^k = d_k pi^{ab} (the bracket
// [f(x_a,.), f(x_b,.)] = f(pi^{ab}, .) expanded in the D_k). Explicit-basis
// mode validates the supplied data instead.
inline PoissonStructure build_structure(const StructureInput& in) {
    PoissonStructure p;
    p.user_base = in.base;
    p.base = in.base;
    if (in.base.jet && in.working_headroom > 0)
        p.base = jet_mode(in.base.nvars, in.base.max_degree + in.working_headroom);
    p.m = in.Pi.rows();
    p.Pi = remode_matrix(in.Pi, p.base);
    p.explicit_basis = in.explicit_basis;

    JacobiReport jac = jacobi_check(in.Pi);
    if (!jac.pass)
        throw ValidationError("Jacobi identity fails for the supplied bracket matrix");

    if (!in.explicit_basis) {
        p.n = p.m;
        p.V = p.Pi;
        p.fm.phi = p.Pi;
        p.fm.omega = matrix_invert(p.Pi);
        p.C.assign(p.n, PolyMatrix(p.n, p.n, p.base));
        for (int k = 0; k < p.n; ++k)
            for (int a = 0; a < p.n; ++a)
                for (int b = 0; b < p.n; ++b) p.C[k].at(a, b) = p.Pi.at(a, b).derivative(k);
    } else {
        if (!in.V || !in.phi || !in.C)
            throw ValidationError("explicit_basis mode requires V, phi and C");
        p.V = remode_matrix(*in.V, p.base);
        p.n = p.V.rows();
        if (p.V.cols() != p.m) throw ValidationError("V must be n x m");
        p.fm.phi = remode_matrix(*in.phi, p.base);
        p.fm.omega = matrix_invert(p.fm.phi);
        if (in.omega) {
            // The supplied inverse is validated at the declared order; the
            // recomputed one is used internally so headroom stays exact.
            if (!(remode_matrix(p.fm.omega, in.base) == remode_matrix(*in.omega, in.base)))
                throw ValidationError("supplied omega is not the inverse of phi at the declared order");
        }
        if (static_cast<int>(in.C->size()) != p.n)
            throw ValidationError("C must supply n matrices");
        p.C.clear();
        for (const auto& ck : *in.C) p.C.push_back(remode_matrix(ck, p.base));
        detail::check_structure_antisymmetry(p);
    }

    p.fm.validate();
    detail::check_bracket_consistency(p);
    return p;
}

// The connection as an odd derivation of bidegree (0,1): coefficients move by
// nabla(f) = sum_a (D_a f) e^a, fiber generators by nabla(y_b) =
// sum_{a,k} c_ab^k y_k e^a, forms by nabla(e^s) = -sum_{a<b} c_ab^s e^a e^b.
inline WeylElement nabla(const WeylElement& w, const PoissonStructure& p) {
    const int n = w.fiber_rank();
    WeylElement r(n, w.trunc(), w.base_mode());
    for (const auto& [key, f] : w.terms()) {
        // coefficient part
        for (int a = 0; a < n; ++a) {
            BaseElement df = p.derive(a, f);
            if (df.is_zero()) continue;
            auto ins = detail::wedge_insert_front(key.forms, a);
            if (!ins) continue;
            WeylKey nk = key;
            nk.forms = std::move(ins->first);
            if (ins->second < 0) df = -df;
            r.add_term(std::move(nk), std::move(df));
        }
        // symmetric part
        for (int b = 0; b < n; ++b) {
            if (key.y[b] == 0) continue;
            for (int a = 0; a < n; ++a) {
                auto ins = detail::wedge_insert_front(key.forms, a);
                if (!ins) continue;
                for (int k = 0; k < n; ++k) {
                    const BaseElement& cab = p.c(a, b, k);
                    if (cab.is_zero()) continue;
                    WeylKey nk = key;
                    nk.y[b] -= 1;
                    nk.y[k] += 1;
                    nk.forms = ins->first;
                    BaseElement coeff = f * cab;
                    r.add_term(std::move(nk), coeff.scaled(Rational(key.y[b] * ins->second)));
                }
            }
        }
        // exterior part
        for (std::size_t i = 0; i < key.forms.size(); ++i) {
            const int s = key.forms[i];
            const int outer_sign = (i % 2 == 0) ? 1 : -1;
            std::vector<int> rest = key.forms;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    const BaseElement& cab = p.c(a, b, s);
                    if (cab.is_zero()) continue;
                    auto merged = detail::wedge_merge({a, b}, rest);
                    if (!merged) continue;
                    WeylKey nk = key;
                    nk.forms = std::move(merged->first);
                    BaseElement coeff = f * cab;
                    r.add_term(std::move(nk),
                               coeff.scaled(Rational(-outer_sign * merged->second)));
                }
        }
    }
    return r;
}

// psi = sum_{i<j} sum_k c_ij^k y_k e^i e^j. d(psi) = 0 is the Jacobi identity
// in fiber form; a failure means the structure data is corrupt.
inline WeylElement torsion(const PoissonStructure& p, int trunc) {
    WeylElement psi(p.n, trunc, p.base);
    for (int i = 0; i < p.n; ++i)
        for (int j = i + 1; j < p.n; ++j)
            for (int k = 0; k < p.n; ++k) {
                const BaseElement& cij = p.c(i, j, k);
                if (cij.is_zero()) continue;
                WeylKey key;
                key.y.assign(p.n, 0);
                key.y[k] = 1;
                key.forms = {i, j};
                psi.add_term(std::move(key), cij);
            }
    if (!op_d(psi, p.fm).is_zero())
        throw InternalError("d(psi) = 0 failed: structure data does not satisfy the fiber Jacobi identity");
    return psi;
}

// Given generator images B(y_a) of an A-linear derivation commuting with form
// multiplication, returns v with (1/hbar)[v, y_a] = B(y_a): solves the
// gradient system dv/dy_c = sum_a B(y_a) omega^{ac} and integrates with the
// Euler operator. The representative with no pure-form part is returned.
inline WeylElement inner_potential(const std::vector<WeylElement>& images,
                                   const PoissonStructure& p) {
    if (static_cast<int>(images.size()) != p.n)
        throw std::invalid_argument("inner_potential: expected one image per generator");
    const int trunc = images.empty() ? 0 : images[0].trunc();
    WeylElement zero(p.n, trunc, p.base);

    std::vector<WeylElement> grad(p.n, zero);
    for (int c = 0; c < p.n; ++c) {
        WeylElement g = zero;
        for (int a = 0; a < p.n; ++a) {
            const BaseElement& w = p.fm.omega.at(a, c);
            if (w.is_zero()) continue;
            g += images[a].scaled(w);
        }
        grad[c] = std::move(g);
    }
    for (int c = 0; c < p.n; ++c)
        for (int d = c + 1; d < p.n; ++d)
            if (!(grad[c].y_derivative(d) == grad[d].y_derivative(c)))
                throw ValidationError(
                    "inner_potential: integrability failure, images do not define an inner derivation");

    WeylElement w = zero;
    for (int c = 0; c < p.n; ++c) w += grad[c].y_multiply(c);
    WeylElement v = zero;
    for (const auto& [key, coeff] : w.terms()) {
        const int deg = key.y_degree(); // >= 1 by construction
        v.add_term(key, coeff.scaled(Rational(1) / Rational(deg)));
    }

    const int check_cutoff = trunc - 1;
    for (int c = 0; c < p.n; ++c)
        if (!(v.y_derivative(c).filtration_restrict(check_cutoff) ==
              grad[c].filtration_restrict(check_cutoff)))
            throw InternalError("inner_potential: gradient reconstruction failed");
    return v;
}

// alpha and beta of the curvature decomposition: (1/hbar) ad(alpha) = nabla^2,
// (1/hbar) ad(beta) = nabla d + d nabla, with the pure-form gauge fixed to 0.
struct CurvatureData {
    WeylElement alpha;
    WeylElement beta;
    WeylElement b; // alpha + beta
    WeylElement psi;
};

inline CurvatureData curvature(const PoissonStructure& p, int trunc) {
    CurvatureData cd;
    cd.psi = torsion(p, trunc); // checks d(psi) = 0 first

    WeylElement dbar = dbar_element(p.n, trunc, p.base);
    cd.beta = nabla(dbar, p);

    std::vector<WeylElement> images;
    images.reserve(p.n);
    for (int a = 0; a < p.n; ++a) {
        WeylElement ya = y_generator(a, p.n, trunc, p.base);
        images.push_back(nabla(nabla(ya, p), p));
    }
    cd.alpha = inner_potential(images, p);
    cd.b = cd.alpha + cd.beta;

    for (int a = 0; a < p.n; ++a) {
        WeylElement ya = y_generator(a, p.n, trunc, p.base);
        if (!(ad_over_hbar(cd.alpha, ya, p.fm) == images[a]))
            throw InternalError("(1/hbar) ad(alpha) = nabla^2 failed on generator " +
                                std::to_string(a + 1));
        WeylElement rhs = nabla(op_d(ya, p.fm), p) + op_d(nabla(ya, p), p.fm);
        if (!(ad_over_hbar(cd.beta, ya, p.fm) == rhs))
            throw InternalError("(1/hbar) ad(beta) = nabla d + d nabla failed on generator " +
                                std::to_string(a + 1));
    }
    if (!nabla(cd.alpha, p).is_zero()) throw InternalError("nabla(alpha) = 0 failed");
    if (!op_d(cd.beta, p.fm).is_zero()) throw InternalError("d(beta) = 0 failed");
    if (!(op_d(cd.b, p.fm) + nabla(cd.b, p)).is_zero())
        throw InternalError("(d + nabla)(alpha + beta) = 0 failed");
    return cd;
}

} // namespace fedoq
