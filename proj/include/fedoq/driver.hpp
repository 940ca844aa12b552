#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fedoq/config.hpp"
#include "fedoq/verifier.hpp"
#include "fedoq/version.hpp"

namespace fedoq {

struct RunResult {
    int exit_code = 0;
    nlohmann::ordered_json report;
};

// Exit-code contract: 0 pass, 1 semantic validation/check failure,
// 2 parse or I/O error, 3 internal invariant violation.
inline constexpr int kExitPass = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

struct CheckList {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass) {
        nlohmann::ordered_json e;
        e["name"] = name;
        e["pass"] = pass;
        checks.push_back(std::move(e));
        all_pass = all_pass && pass;
    }

    void add(const std::string& name, bool pass, nlohmann::ordered_json details) {
        nlohmann::ordered_json e;
        e["name"] = name;
        e["pass"] = pass;
        e["details"] = std::move(details);
        checks.push_back(std::move(e));
        all_pass = all_pass && pass;
    }
};

inline nlohmann::ordered_json report_base(const std::string& command, const JobConfig* cfg) {
    nlohmann::ordered_json r;
    r["command"] = command;
    r["version"] = kVersion;
    if (cfg) {
        r["seed"] = cfg->seed;
        r["config"] = cfg->echo;
    }
    return r;
}

inline nlohmann::ordered_json error_report(const std::string& command, const std::string& what) {
    nlohmann::ordered_json r;
    r["command"] = command;
    r["version"] = kVersion;
    r["error"] = what;
    r["pass"] = false;
    return r;
}

template <class Fn>
RunResult guarded(const std::string& command, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        return {kExitParse, error_report(command, e.what())};
    } catch (const ValidationError& e) {
        return {kExitValidation, error_report(command, e.what())};
    } catch (const InternalError& e) {
        return {kExitInternal, error_report(command, e.what())};
    } catch (const nlohmann::json::exception& e) {
        return {kExitParse, error_report(command, e.what())};
    } catch (const std::exception& e) {
        return {kExitInternal, error_report(command, e.what())};
    }
}

class Stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

inline void attach_timing(nlohmann::ordered_json& report, const Stopwatch& sw, bool enabled) {
    if (enabled) report["timing_ms"] = sw.elapsed_ms();
}

inline nlohmann::ordered_json connection_json(const FedosovConnection& fc,
                                              const std::vector<std::string>& names) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["d_max"] = fc.d_max;
    j["hbar_order"] = fc.n_hbar;
    j["iterations"] = fc.iterations;
    j["r"] = weyl_to_json(fc.r, names);
    j["alpha"] = weyl_to_json(fc.curv.alpha, names);
    j["beta"] = weyl_to_json(fc.curv.beta, names);
    j["psi"] = weyl_to_json(fc.curv.psi, names);
    return j;
}

// --dump r|alpha|beta|tau:<expr>
inline nlohmann::ordered_json collect_dumps(const std::vector<std::string>& dumps,
                                            const FedosovConnection& fc, const JobConfig& cfg) {
    nlohmann::ordered_json out;
    for (const auto& d : dumps) {
        if (d == "r")
            out["r"] = weyl_to_json(fc.r, cfg.variables);
        else if (d == "alpha")
            out["alpha"] = weyl_to_json(fc.curv.alpha, cfg.variables);
        else if (d == "beta")
            out["beta"] = weyl_to_json(fc.curv.beta, cfg.variables);
        else if (d.rfind("tau:", 0) == 0) {
            BaseElement a = poly_parse(d.substr(4), cfg.variables, cfg.base);
            out["tau:" + d.substr(4)] = weyl_to_json(quantize(a, fc), cfg.variables);
        } else {
            throw ParseError("unknown --dump target '" + d + "'");
        }
    }
    return out;
}

} // namespace detail

struct RunOptions {
    bool timings = false;
    bool stability = true; // re-solve at D_max+2 and require identical output
    std::vector<std::string> dumps;
};

// validate: parse, skewness, Jacobi, invertibility / explicit-data checks.
inline RunResult run_validate(const std::string& config_path, const RunOptions& opt = {}) {
    return detail::guarded("validate", [&]() -> RunResult {
        detail::Stopwatch sw;
        JobConfig cfg = load_config(config_path);
        nlohmann::ordered_json report = detail::report_base("validate", &cfg);
        detail::CheckList list;

        bool skew = cfg.pi.is_skew();
        list.add("poisson-matrix-skew", skew);

        if (skew) {
            JacobiReport jac = jacobi_check(cfg.pi);
            nlohmann::ordered_json details = nlohmann::ordered_json::array();
            for (const auto& f : jac.failures) {
                nlohmann::ordered_json e;
                e["triple"] = {f.i + 1, f.j + 1, f.k + 1};
                e["residual"] = f.residual.str(cfg.variables);
                details.push_back(std::move(e));
            }
            list.add("jacobi-identity", jac.pass, std::move(details));
        } else {
            list.add("jacobi-identity", false,
                     nlohmann::ordered_json::array({"skipped: matrix not skew"}));
        }

        if (list.all_pass) {
            try {
                build_structure(cfg.structure_input());
                list.add("structure-invertibility", true);
            } catch (const ValidationError& e) {
                list.add("structure-invertibility", false,
                         nlohmann::ordered_json::array({e.what()}));
            }
        }

        report["checks"] = list.checks;
        report["pass"] = list.all_pass;
        detail::attach_timing(report, sw, opt.timings);
        return {list.all_pass ? kExitPass : kExitValidation, std::move(report)};
    });
}

// quantize: build structure -> curvature -> solve r; verify and serialize.
inline RunResult run_quantize(const std::string& config_path, const std::string& out_path,
                              const RunOptions& opt = {}) {
    return detail::guarded("quantize", [&]() -> RunResult {
        detail::Stopwatch sw;
        JobConfig cfg = load_config(config_path);
        nlohmann::ordered_json report = detail::report_base("quantize", &cfg);

        PoissonStructure p = build_structure(cfg.structure_input());
        FedosovConnection fc = solve_connection(p, cfg.d_max(), cfg.hbar_order);

        detail::CheckList list;
        // solve_connection throws InternalError when any of these fails.
        list.add("d(psi)=0", true);
        list.add("curvature-relations", true);
        list.add("delta(r)=0", true);
        list.add("flatness-equation-residual", true);
        list.add("D-squared-on-generators", true);

        if (opt.stability) {
            FedosovConnection fc2 = solve_connection(p, cfg.d_max() + 2, cfg.hbar_order);
            bool stable = with_trunc(fc2.r, cfg.d_max()) == fc.r;
            list.add("truncation-stability(r)", stable);
            if (!stable) throw InternalError("truncation stability failed for r");
        }

        nlohmann::ordered_json diag;
        diag["iterations"] = fc.iterations;
        diag["r_terms"] = fc.r.term_count();
        diag["r_min_degree"] = fc.r.is_zero() ? 0 : fc.r.min_filtration_degree();
        report["diagnostics"] = std::move(diag);
        report["checks"] = list.checks;
        if (!opt.dumps.empty()) report["dump"] = detail::collect_dumps(opt.dumps, fc, cfg);
        report["pass"] = list.all_pass;

        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) throw ParseError("cannot open output file '" + out_path + "'");
            out << detail::connection_json(fc, cfg.variables).dump(2) << "\n";
        }
        detail::attach_timing(report, sw, opt.timings);
        return {kExitPass, std::move(report)};
    });
}

// star: quantize then expand a * b as F_0..F_N.
inline RunResult run_star(const std::string& config_path, const std::string& a_expr,
                          const std::string& b_expr, std::optional<int> order,
                          const RunOptions& opt = {}) {
    return detail::guarded("star", [&]() -> RunResult {
        detail::Stopwatch sw;
        JobConfig cfg = load_config(config_path);
        if (order) {
            if (*order < 0) throw ValidationError("star: order must be >= 0");
            cfg.hbar_order = *order;
            if (cfg.weyl_degree && *cfg.weyl_degree < 2 * *order) cfg.weyl_degree.reset();
        }
        nlohmann::ordered_json report = detail::report_base("star", &cfg);

        BaseElement a = poly_parse(a_expr, cfg.variables, cfg.base);
        BaseElement b = poly_parse(b_expr, cfg.variables, cfg.base);

        PoissonStructure p = build_structure(cfg.structure_input());
        FedosovConnection fc = solve_connection(p, cfg.d_max(), cfg.hbar_order);
        StarExpansion se = star(a, b, fc);

        if (opt.stability) {
            FedosovConnection fc2 = solve_connection(p, cfg.d_max() + 2, cfg.hbar_order);
            StarExpansion se2 = star(a, b, fc2);
            for (int k = 0; k <= cfg.hbar_order; ++k)
                if (!(se.coeffs[k] == se2.coeffs[k]))
                    throw InternalError("truncation stability failed for F_" + std::to_string(k));
        }

        report["star"] = star_to_json(se, cfg.variables);
        if (!opt.dumps.empty()) report["dump"] = detail::collect_dumps(opt.dumps, fc, cfg);
        report["pass"] = true;
        detail::attach_timing(report, sw, opt.timings);
        return {kExitPass, std::move(report)};
    });
}

namespace detail {

inline WeylElement strip_scalar_part(const WeylElement& w) {
    WeylElement out(w.fiber_rank(), w.trunc(), w.base_mode());
    for (const auto& [k, c] : w.terms())
        if (k.y_degree() != 0 || k.form_degree() != 0) out.add_term(k, c);
    return out;
}

inline int sample_degree(const RingMode& base, int wanted) {
    return base.jet ? std::min(wanted, base.max_degree) : wanted;
}

// Operator identities that do not involve the connection. Elements are lifted
// into a roomier truncation window first, so every identity is exact.
inline void operator_identity_checks(CheckList& list, const PoissonStructure& p, int d_max,
                                     SampleGenerator& gen) {
    const int n = p.n;
    const RingMode base = p.base;
    const FormMatrix& fm = p.fm;
    const int lift = d_max + 6;

    bool homotopy = true;
    for (int i = 0; i < 100 && homotopy; ++i) {
        int pd = static_cast<int>(gen.draw(5));
        int qd = static_cast<int>(gen.draw(n + 1));
        WeylElement x = with_trunc(gen.weyl_term(n, d_max, base, pd, qd, 2), lift);
        if (x.is_zero()) continue;
        WeylElement lhs = op_partial(op_d(x, fm), fm) + op_d(op_partial(x, fm), fm);
        homotopy = lhs == x.scaled(Rational(pd + qd));
    }
    list.add("homotopy-identity", homotopy);

    bool nilpotent = true;
    for (int i = 0; i < 20 && nilpotent; ++i) {
        WeylElement x = with_trunc(gen.weyl_term(n, d_max, base, static_cast<int>(gen.draw(4)),
                                                 static_cast<int>(gen.draw(n + 1)), 2),
                                   lift);
        nilpotent = op_d(op_d(x, fm), fm).is_zero() && op_partial(op_partial(x, fm), fm).is_zero() &&
                    op_delta(op_delta(x, fm), fm).is_zero();
    }
    list.add("d^2=partial^2=delta^2=0", nilpotent);

    bool homotopy_delta = true;
    for (int i = 0; i < 20 && homotopy_delta; ++i) {
        WeylElement x(n, lift, base);
        for (int t = 0; t < 3; ++t)
            x += with_trunc(gen.weyl_term(n, d_max, base, static_cast<int>(gen.draw(4)),
                                          static_cast<int>(gen.draw(n + 1)), 2),
                            lift);
        x = strip_scalar_part(x);
        WeylElement lhs = op_d(op_delta(x, fm), fm) + op_delta(op_d(x, fm), fm);
        homotopy_delta = lhs == x;
    }
    list.add("(d delta + delta d)=Id off (0,0)", homotopy_delta);

    bool assoc = true;
    for (int i = 0; i < 10 && assoc; ++i) {
        WeylElement a = with_trunc(gen.weyl_term(n, d_max, base, 2, 1, 1), lift + 12);
        WeylElement b = with_trunc(gen.weyl_term(n, d_max, base, 2, 1, 1), lift + 12);
        WeylElement c = with_trunc(gen.weyl_term(n, d_max, base, 2, 0, 1), lift + 12);
        assoc = weyl_product(weyl_product(a, b, fm), c, fm) ==
                weyl_product(a, weyl_product(b, c, fm), fm);
    }
    list.add("weyl-product-associativity", assoc);

    bool leibniz = true;
    for (int i = 0; i < 10 && leibniz; ++i) {
        WeylElement a = with_trunc(gen.weyl_term(n, d_max, base, 2, static_cast<int>(gen.draw(2)), 1),
                                   lift + 8);
        WeylElement b = with_trunc(gen.weyl_term(n, d_max, base, 2, static_cast<int>(gen.draw(2)), 1),
                                   lift + 8);
        int par = a.terms().empty() ? 0 : a.terms().begin()->first.form_degree() % 2;
        WeylElement lhs = op_d(weyl_product(a, b, fm), fm);
        WeylElement rhs = weyl_product(op_d(a, fm), b, fm);
        WeylElement db = weyl_product(a, op_d(b, fm), fm);
        rhs += (par == 1) ? -db : db;
        leibniz = lhs == rhs;
        if (leibniz) {
            WeylElement nl = nabla(weyl_product(a, b, fm), p);
            WeylElement nr = weyl_product(nabla(a, p), b, fm);
            WeylElement nb = weyl_product(a, nabla(b, p), fm);
            nr += (par == 1) ? -nb : nb;
            leibniz = nl == nr;
        }
    }
    list.add("derivation-law(d,nabla)", leibniz);

    bool central = true;
    for (int i = 0; i < 5 && central; ++i) {
        WeylElement f =
            with_trunc(weyl_from_base(gen.element(base, sample_degree(base, 2), 2), n, d_max), lift);
        WeylElement w = with_trunc(gen.weyl_term(n, d_max, base, 3, 1, 1), lift);
        central = commutator(f, w, fm).is_zero();
    }
    list.add("base-ring-centrality", central);

    bool invariance = true;
    for (int c = 0; c < n && invariance; ++c)
        for (int a = 0; a < n && invariance; ++a)
            for (int b = 0; b < n && invariance; ++b) {
                BaseElement lhs = p.derive(c, p.fm.phi.at(a, b));
                BaseElement rhs(base);
                for (int k = 0; k < n; ++k)
                    rhs += p.c(c, a, k) * p.fm.phi.at(k, b) + p.c(c, b, k) * p.fm.phi.at(a, k);
                invariance = lhs == rhs;
            }
    list.add("phi-invariance", invariance);
}

inline void connection_identity_checks(CheckList& list, const PoissonStructure& p,
                                       const FedosovConnection& fc, SampleGenerator& gen) {
    const int n = p.n;
    const RingMode base = p.base;
    const FormMatrix& fm = p.fm;
    const int d_max = fc.d_max;

    // Lemma relations were enforced during construction; re-assert here so a
    // report lists them explicitly.
    list.add("d(psi)=0", op_d(fc.curv.psi, fm).is_zero());
    list.add("nabla(alpha)=0", nabla(fc.curv.alpha, p).is_zero());
    list.add("d(beta)=0", op_d(fc.curv.beta, fm).is_zero());
    list.add("(d+nabla)(alpha+beta)=0",
             (op_d(fc.curv.b, fm) + nabla(fc.curv.b, p)).is_zero());

    bool adb = true;
    for (int a = 0; a < n && adb; ++a)
        for (int b2 = 0; b2 < n && adb; ++b2) {
            WeylElement w = weyl_product(y_generator(a, n, d_max, base),
                                         y_generator(b2, n, d_max, base), fm);
            WeylElement lhs = ad_over_hbar(fc.curv.b, w, fm);
            WeylElement rhs = nabla(nabla(w, p), p) + op_d(nabla(w, p), fm) + nabla(op_d(w, fm), p);
            adb = lhs.filtration_restrict(d_max - 1) == rhs.filtration_restrict(d_max - 1);
        }
    list.add("ad(b)/hbar = nabla^2+d nabla+nabla d", adb);

    list.add("delta(r)=0", op_delta(fc.r, fm).is_zero());

    WeylElement residual = fc.curv.b + op_d(fc.r, fm) + nabla(fc.r, p);
    if (!fc.r.is_zero()) residual += ad_over_hbar(fc.r, fc.r, fm).scaled(Rational(1, 2));
    list.add("flatness-equation-residual", residual.filtration_restrict(d_max - 1).is_zero());

    bool dsq = true;
    for (int a = 0; a < n && dsq; ++a) {
        WeylElement ya = y_generator(a, n, d_max, base);
        dsq = apply_D(apply_D(ya, fc), fc).filtration_restrict(d_max - 2).is_zero();
    }
    list.add("D-squared-on-generators", dsq);

    bool flat = true;
    for (int i = 0; i < 20 && flat; ++i) {
        BaseElement a = gen.element(base, sample_degree(base, 3), 2);
        WeylElement tau = quantize(a, fc); // quantize verifies D-flatness itself
        flat = apply_D(tau, fc).filtration_restrict(d_max - 1).is_zero();
    }
    list.add("flat-sections", flat);

    bool conj = true;
    for (int i = 0; i < 20 && conj; ++i) {
        WeylElement w = gen.weyl_term(n, d_max, base, static_cast<int>(gen.draw(3)),
                                      static_cast<int>(gen.draw(n + 1)), 1);
        WeylElement lhs = op_d(apply_Q(w, fc), fm);
        WeylElement rhs = apply_Q(apply_D(w, fc), fc);
        conj = lhs.filtration_restrict(d_max - 1) == rhs.filtration_restrict(d_max - 1);
    }
    list.add("conjugation d Q = Q D", conj);

    bool inverse = true;
    for (int i = 0; i < 20 && inverse; ++i) {
        WeylElement w = gen.weyl_term(n, d_max, base, static_cast<int>(gen.draw(3)),
                                      static_cast<int>(gen.draw(n + 1)), 1);
        inverse = apply_Q(apply_Q_inverse(w, fc), fc) == w &&
                  apply_Q_inverse(apply_Q(w, fc), fc) == w;
    }
    list.add("Q Q^{-1} = Id", inverse);
}

inline void star_law_checks(CheckList& list, const PoissonStructure& p,
                            const FedosovConnection& fc, SampleGenerator& gen,
                            const std::vector<std::string>& names) {
    const RingMode base = p.base;
    StarFn sf = make_star_fn(fc);

    bool first_order = true;
    nlohmann::ordered_json fo_details = nlohmann::ordered_json::array();
    for (int i = 0; i < 20 && first_order; ++i) {
        BaseElement a = gen.monomial(base, sample_degree(base, 4));
        BaseElement b = gen.monomial(base, sample_degree(base, 4));
        BaseElement res = first_order_residual(sf, a, b, p.Pi);
        if (!res.is_zero()) {
            first_order = false;
            nlohmann::ordered_json e;
            e["a"] = a.str(names);
            e["b"] = b.str(names);
            e["residual"] = res.str(names);
            fo_details.push_back(std::move(e));
        }
    }
    list.add("first-order-commutator-law", first_order, std::move(fo_details));

    bool unit = true;
    BaseElement one = BaseElement::one(base);
    for (int i = 0; i < 10 && unit; ++i) {
        BaseElement b = gen.element(base, sample_degree(base, 3), 2);
        auto lab = sf(one, b);
        auto rab = sf(b, one);
        unit = lab.at(0) == b && rab.at(0) == b;
        for (std::size_t k = 1; k < lab.size() && unit; ++k)
            unit = lab[k].is_zero() && rab[k].is_zero();
    }
    list.add("unit-and-center", unit);

    if (fc.n_hbar >= 1) {
        BilinearFn g = [&sf](const BaseElement& x, const BaseElement& y) {
            auto xy = sf(x, y);
            auto yx = sf(y, x);
            return (xy.at(1) - yx.at(1)).scaled(Rational(1, 2));
        };
        bool jacobi2 = true;
        for (int i = 0; i < 5 && jacobi2; ++i) {
            BaseElement a = gen.monomial(base, sample_degree(base, 3));
            BaseElement b = gen.monomial(base, sample_degree(base, 3));
            BaseElement c = gen.monomial(base, sample_degree(base, 3));
            BaseElement res = g(g(a, b), c) + g(g(b, c), a) + g(g(c, a), b);
            jacobi2 = res.is_zero();
        }
        list.add("antisymmetric-F1-jacobi", jacobi2);

        BilinearFn f1 = [&sf](const BaseElement& x, const BaseElement& y) {
            return sf(x, y).at(1);
        };
        std::vector<std::array<BaseElement, 3>> triples;
        for (int i = 0; i < 8; ++i)
            triples.push_back({gen.monomial(base, sample_degree(base, 3)),
                               gen.monomial(base, sample_degree(base, 3)),
                               gen.monomial(base, sample_degree(base, 3))});
        CocycleReport coc = hochschild_cocycle_check(f1, triples);
        list.add("F1-hochschild-cocycle", coc.pass);
        CocycleReport tr = transpose_cocycle_check(f1, triples);
        list.add("F1-transpose-cocycle", tr.pass);

        BilinearFn fb = [&p](const BaseElement& x, const BaseElement& y) {
            return poisson_bracket(x, y, p.Pi);
        };
        CocycleReport bc = hochschild_cocycle_check(fb, triples);
        list.add("poisson-bracket-cocycle+leibniz",
                 bc.pass && bc.antisymmetric && bc.leibniz_pass);

        LinearFn q1 = [](const BaseElement& x) { return x.derivative(0); };
        BilinearFn f1_shift = [&f1, &q1](const BaseElement& x, const BaseElement& y) {
            return f1(x, y) + x * q1(y) - q1(x * y) + q1(x) * y;
        };
        std::vector<std::array<BaseElement, 2>> pairs;
        for (int i = 0; i < 8; ++i)
            pairs.push_back({gen.monomial(base, sample_degree(base, 3)),
                             gen.monomial(base, sample_degree(base, 3))});
        GaugeReport gr = gauge_equivalence_check(f1, f1_shift, q1, pairs);
        list.add("order-1-gauge-coboundary", gr.pass);
    }
}

inline nlohmann::ordered_json assoc_report_json(const AssocReport& rep,
                                                const std::vector<std::string>& names) {
    nlohmann::ordered_json j;
    j["order"] = rep.order;
    j["pass"] = rep.pass;
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const auto& s : rep.samples) {
        nlohmann::ordered_json e;
        e["a"] = s.a.str(names);
        e["b"] = s.b.str(names);
        e["c"] = s.c.str(names);
        e["first_fail_order"] = s.first_fail_order;
        if (s.first_fail_order >= 0) {
            nlohmann::ordered_json res = nlohmann::ordered_json::array();
            for (const auto& r : s.residuals) res.push_back(r.str(names));
            e["residuals"] = res;
        }
        samples.push_back(std::move(e));
    }
    j["samples"] = samples;
    return j;
}

} // namespace detail

// check: run the named suite(s); exit 0 iff everything passes.
inline RunResult run_check(const std::string& config_path, const std::string& suite,
                           std::optional<int> order, std::optional<std::uint64_t> seed_override,
                           std::optional<int> fault_order, const RunOptions& opt = {}) {
    return detail::guarded("check", [&]() -> RunResult {
        detail::Stopwatch sw;
        JobConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (suite != "all" && suite != "assoc" && suite != "identities" && suite != "moyal")
            throw ParseError("unknown suite '" + suite + "'");

        const int n_check = order.value_or(cfg.hbar_order);
        if (n_check < 0) throw ValidationError("check: order must be >= 0");
        cfg.hbar_order = std::max(cfg.hbar_order, n_check);
        if (cfg.weyl_degree && *cfg.weyl_degree < 2 * cfg.hbar_order) cfg.weyl_degree.reset();

        nlohmann::ordered_json report = detail::report_base("check", &cfg);
        report["suite"] = suite;
        report["order"] = n_check;

        PoissonStructure p = build_structure(cfg.structure_input());
        FedosovConnection fc = solve_connection(p, cfg.d_max(), cfg.hbar_order);
        SampleGenerator gen(cfg.seed);
        detail::CheckList list;

        if (suite == "identities" || suite == "all") {
            detail::operator_identity_checks(list, p, cfg.d_max(), gen);
            detail::connection_identity_checks(list, p, fc, gen);
            detail::star_law_checks(list, p, fc, gen, cfg.variables);
        }

        if (suite == "moyal" || suite == "all") {
            bool constant = true;
            for (int i = 0; i < p.m && constant; ++i)
                for (int j = 0; j < p.m && constant; ++j)
                    constant = p.Pi.at(i, j).is_constant();
            if (suite == "moyal" && !constant)
                throw ValidationError("moyal suite requires a constant bracket matrix");
            if (constant) {
                bool agree = true;
                for (int i = 0; i < 20 && agree; ++i) {
                    BaseElement a = gen.monomial(cfg.base, detail::sample_degree(cfg.base, 4));
                    BaseElement b = gen.monomial(cfg.base, detail::sample_degree(cfg.base, 4));
                    StarExpansion lhs = star(a, b, fc);
                    StarExpansion rhs = moyal_oracle(a, b, p.Pi, fc.n_hbar);
                    for (int k = 0; k <= fc.n_hbar && agree; ++k)
                        agree = lhs.coeffs[k] == rhs.coeffs[k];
                }
                list.add("moyal-oracle-agreement", agree);
            }
        }

        if (suite == "assoc" || suite == "all") {
            StarFn sf = fault_order ? make_faulty_star_fn(fc, *fault_order) : make_star_fn(fc);
            std::vector<std::array<BaseElement, 3>> triples;
            for (int i = 0; i < 10; ++i)
                triples.push_back({gen.monomial(cfg.base, detail::sample_degree(cfg.base, 3)),
                                   gen.monomial(cfg.base, detail::sample_degree(cfg.base, 3)),
                                   gen.monomial(cfg.base, detail::sample_degree(cfg.base, 3))});
            AssocReport rep = associativity_check(sf, triples, n_check, cfg.base);
            list.add("associativity", rep.pass,
                     detail::assoc_report_json(rep, cfg.variables));
        }

        if (opt.stability && (suite == "all")) {
            FedosovConnection fc2 = solve_connection(p, cfg.d_max() + 2, cfg.hbar_order);
            bool stable = with_trunc(fc2.r, cfg.d_max()) == fc.r;
            BaseElement sa = BaseElement::variable(cfg.base, 0);
            BaseElement sb = BaseElement::variable(cfg.base, cfg.base.nvars > 1 ? 1 : 0);
            StarExpansion s1 = star(sa, sb, fc);
            StarExpansion s2 = star(sa, sb, fc2);
            for (int k = 0; k <= fc.n_hbar && stable; ++k) stable = s1.coeffs[k] == s2.coeffs[k];
            list.add("truncation-stability", stable);
        }

        report["checks"] = list.checks;
        report["pass"] = list.all_pass;
        detail::attach_timing(report, sw, opt.timings);
        return {list.all_pass ? kExitPass : kExitValidation, std::move(report)};
    });
}

} // namespace fedoq
