#include <catch2/catch_amalgamated.hpp>

#include "fedoq/poisson.hpp"
#include "fedoq/poly_parse.hpp"
#include "fedoq/verifier.hpp"

using namespace fedoq;

namespace {

const std::vector<std::string> kXY{"x1", "x2"};

PolyMatrix skew2(const std::string& top, RingMode mode,
                 const std::vector<std::string>& names = kXY) {
    PolyMatrix pi(2, 2, mode);
    pi.at(0, 1) = poly_parse(top, names, mode);
    pi.at(1, 0) = -pi.at(0, 1);
    return pi;
}

StructureInput symplectic_input(PolyMatrix pi) {
    StructureInput in;
    in.base = pi.mode();
    in.Pi = std::move(pi);
    return in;
}

PoissonStructure moyal2() {
    return build_structure(symplectic_input(skew2("1", polynomial_mode(2))));
}

PoissonStructure jet2() {
    return build_structure(symplectic_input(skew2("1 + x1*x2", jet_mode(2, 6))));
}

} // namespace

TEST_CASE("jacobi_check examples") {
    RingMode mode = polynomial_mode(2);
    SampleGenerator gen(55);
    for (int i = 0; i < 5; ++i) {
        PolyMatrix pi(2, 2, mode);
        pi.at(0, 1) = gen.element(mode, 3, 2);
        pi.at(1, 0) = -pi.at(0, 1);
        CHECK(jacobi_check(pi).pass); // two variables: the cyclic sum is empty
    }

    RingMode mode3 = polynomial_mode(3);
    const std::vector<std::string> xyz{"x1", "x2", "x3"};
    PolyMatrix so3(3, 3, mode3);
    so3.at(0, 1) = poly_parse("x3", xyz, mode3);
    so3.at(1, 0) = -so3.at(0, 1);
    so3.at(1, 2) = poly_parse("x1", xyz, mode3);
    so3.at(2, 1) = -so3.at(1, 2);
    so3.at(2, 0) = poly_parse("x2", xyz, mode3);
    so3.at(0, 2) = -so3.at(2, 0);
    CHECK(jacobi_check(so3).pass);

    PolyMatrix bad(3, 3, mode3);
    bad.at(0, 1) = poly_parse("x1", xyz, mode3);
    bad.at(1, 0) = -bad.at(0, 1);
    bad.at(1, 2) = poly_parse("x2", xyz, mode3);
    bad.at(2, 1) = -bad.at(1, 2);
    JacobiReport rep = jacobi_check(bad);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.failures.size() == 1);
    CHECK(rep.failures[0].i == 0);
    CHECK(rep.failures[0].j == 1);
    CHECK(rep.failures[0].k == 2);
    CHECK(rep.failures[0].residual == poly_parse("x1", xyz, mode3));

    PolyMatrix notskew(2, 2, mode);
    notskew.at(0, 0) = BaseElement::one(mode);
    CHECK_THROWS_AS(jacobi_check(notskew), ValidationError);
}

TEST_CASE("build_structure in symplectic coordinates: constant case") {
    PoissonStructure p = moyal2();
    CHECK(p.n == 2);
    // D_1 = d/dx2, D_2 = -d/dx1
    BaseElement x1 = poly_parse("x1", kXY, p.base);
    BaseElement x2 = poly_parse("x2", kXY, p.base);
    CHECK(p.derive(0, x2) == BaseElement::one(p.base));
    CHECK(p.derive(0, x1).is_zero());
    CHECK(p.derive(1, x1) == -BaseElement::one(p.base));
    CHECK(p.fm.phi == p.Pi);
    for (int k = 0; k < 2; ++k)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) CHECK(p.c(a, b, k).is_zero());
}

TEST_CASE("build_structure in symplectic coordinates: jet case") {
    PoissonStructure p = jet2();
    BaseElement pi12 = poly_parse("1 + x1*x2", kXY, p.base);
    CHECK(p.fm.phi.at(0, 1) == pi12);
    CHECK(p.fm.omega.at(0, 1) == -pi12.series_invert());
    CHECK(p.fm.omega.at(1, 0) == pi12.series_invert());
    // c_ab^k = d_k pi^{ab}
    CHECK(p.c(0, 1, 0) == poly_parse("x2", kXY, p.base));
    CHECK(p.c(0, 1, 1) == poly_parse("x1", kXY, p.base));
    CHECK(p.c(1, 0, 0) == -poly_parse("x2", kXY, p.base));

    // bracket-consistency postcondition, verified by direct substitution
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int j = 0; j < 2; ++j) {
                BaseElement lhs(p.base);
                for (int k = 0; k < 2; ++k) lhs += p.c(a, b, k) * p.V.at(k, j);
                BaseElement rhs = p.derive(a, p.V.at(b, j)) - p.derive(b, p.V.at(a, j));
                CHECK(lhs == rhs);
            }
}

TEST_CASE("build_structure rejects inconsistent explicit data") {
    RingMode mode = polynomial_mode(2);
    StructureInput in;
    in.base = mode;
    in.Pi = skew2("1", mode);
    in.explicit_basis = true;
    PolyMatrix v(2, 2, mode);
    v.at(0, 1) = BaseElement::one(mode);
    v.at(1, 0) = -BaseElement::one(mode);
    in.V = v;
    in.phi = skew2("1", mode);
    // nonzero C although the derivations commute
    std::vector<PolyMatrix> c(2, PolyMatrix(2, 2, mode));
    c[0].at(0, 1) = BaseElement::one(mode);
    c[0].at(1, 0) = -BaseElement::one(mode);
    in.C = c;
    CHECK_THROWS_WITH(build_structure(in), Catch::Matchers::ContainsSubstring("bracket-consistency"));

    in.C = std::vector<PolyMatrix>(2, PolyMatrix(2, 2, mode));
    CHECK_NOTHROW(build_structure(in)); // flat torus data is consistent
}

TEST_CASE("nabla on the flat structure") {
    PoissonStructure p = moyal2();
    const int T = 8;
    BaseElement x1 = poly_parse("x1", kXY, p.base);
    WeylElement nx1 = nabla(weyl_from_base(x1, 2, T), p);
    CHECK(nx1 == -form_generator(1, 2, T, p.base));

    for (int b = 0; b < 2; ++b)
        CHECK(nabla(y_generator(b, 2, T, p.base), p).is_zero());

    CHECK(nabla(hbar_element(1, 2, T, p.base), p).is_zero());
}

TEST_CASE("nabla invariance of phi and the derivation law") {
    PoissonStructure p = jet2();
    const int T = 8;

    // nabla_c phi(e_a, e_b) = phi(nabla_c e_a, e_b) + phi(e_a, nabla_c e_b)
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                BaseElement lhs = p.derive(c, p.fm.phi.at(a, b));
                BaseElement rhs(p.base);
                for (int k = 0; k < 2; ++k)
                    rhs += p.c(c, a, k) * p.fm.phi.at(k, b) + p.c(c, b, k) * p.fm.phi.at(a, k);
                CHECK(lhs == rhs);
            }

    // derivation law for the weyl product
    SampleGenerator gen(888);
    for (int i = 0; i < 8; ++i) {
        int qa = static_cast<int>(gen.draw(2));
        WeylElement a = gen.weyl_term(2, 40, p.base, static_cast<int>(gen.draw(3)), qa, 1);
        WeylElement b = gen.weyl_term(2, 40, p.base, static_cast<int>(gen.draw(3)),
                                      static_cast<int>(gen.draw(2)), 1);
        WeylElement lhs = nabla(weyl_product(a, b, p.fm), p);
        WeylElement rhs = weyl_product(nabla(a, p), b, p.fm);
        WeylElement adb = weyl_product(a, nabla(b, p), p.fm);
        rhs += (qa % 2 == 1) ? -adb : adb;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("torsion: flat, jet, and corrupted structures") {
    PoissonStructure flat = moyal2();
    CHECK(torsion(flat, 8).is_zero());

    PoissonStructure p = jet2();
    WeylElement psi = torsion(p, 8);
    CHECK_FALSE(psi.is_zero());
    CHECK(op_d(psi, p.fm).is_zero());
    for (const auto& [k, c] : psi.terms()) {
        CHECK(k.y_degree() == 1);
        CHECK(k.form_degree() == 2);
    }

    // so(3)-type rotational fields with a symplectic phi: the basis is not
    // Hamiltonian for any bracket with this phi, and d(psi) != 0 flags it.
    RingMode mode = polynomial_mode(4);
    const std::vector<std::string> names{"x1", "x2", "x3", "x4"};
    PoissonStructure bad;
    bad.m = 4;
    bad.n = 4;
    bad.base = mode;
    bad.explicit_basis = true;
    bad.Pi = PolyMatrix(4, 4, mode);
    bad.V = PolyMatrix(4, 4, mode);
    bad.V.at(0, 1) = -poly_parse("x3", names, mode);
    bad.V.at(0, 2) = poly_parse("x2", names, mode);
    bad.V.at(1, 0) = poly_parse("x3", names, mode);
    bad.V.at(1, 2) = -poly_parse("x1", names, mode);
    bad.V.at(2, 0) = -poly_parse("x2", names, mode);
    bad.V.at(2, 1) = poly_parse("x1", names, mode);
    bad.V.at(3, 3) = BaseElement::one(mode);
    bad.fm.phi = PolyMatrix(4, 4, mode);
    bad.fm.phi.at(0, 1) = BaseElement::one(mode);
    bad.fm.phi.at(1, 0) = -BaseElement::one(mode);
    bad.fm.phi.at(2, 3) = BaseElement::one(mode);
    bad.fm.phi.at(3, 2) = -BaseElement::one(mode);
    bad.fm.omega = matrix_invert(bad.fm.phi);
    bad.C.assign(4, PolyMatrix(4, 4, mode));
    auto set_c = [&](int a, int b, int k, long v) {
        bad.C[k].at(a, b) = BaseElement::constant(mode, v);
        bad.C[k].at(b, a) = BaseElement::constant(mode, -v);
    };
    set_c(0, 1, 2, -1);
    set_c(1, 2, 0, -1);
    set_c(2, 0, 1, -1);
    CHECK_THROWS_WITH(torsion(bad, 8), Catch::Matchers::ContainsSubstring("d(psi)"));
}

TEST_CASE("inner_potential examples") {
    PoissonStructure p = moyal2();
    const int T = 8;
    WeylElement zero(2, T, p.base);

    CHECK(inner_potential({zero, zero}, p).is_zero());

    // images of d itself integrate back to dbar
    std::vector<WeylElement> d_images;
    for (int a = 0; a < 2; ++a) d_images.push_back(op_d(y_generator(a, 2, T, p.base), p.fm));
    CHECK(inner_potential(d_images, p) == dbar_element(2, T, p.base));

    // B(y1) = hbar e^1, B(y2) = 0, verified by back-substitution
    std::vector<WeylElement> b{form_generator(0, 2, T, p.base).hbar_multiply(1), zero};
    WeylElement v = inner_potential(b, p);
    for (int a = 0; a < 2; ++a)
        CHECK(ad_over_hbar(v, y_generator(a, 2, T, p.base), p.fm) == b[a]);

    // non-integrable images are rejected
    std::vector<WeylElement> badimg{y_generator(0, 2, T, p.base).y_multiply(0), zero};
    CHECK_THROWS_WITH(inner_potential(badimg, p),
                      Catch::Matchers::ContainsSubstring("integrability"));
}

TEST_CASE("curvature: flat cases give zero") {
    PoissonStructure p = moyal2();
    CurvatureData cd = curvature(p, 8);
    CHECK(cd.alpha.is_zero());
    CHECK(cd.beta.is_zero());
    CHECK(cd.b.is_zero());
    CHECK(cd.psi.is_zero());

    // explicit flat torus data
    RingMode mode = polynomial_mode(2);
    StructureInput in;
    in.base = mode;
    in.Pi = skew2("1", mode);
    in.explicit_basis = true;
    PolyMatrix v(2, 2, mode);
    v.at(0, 1) = BaseElement::one(mode);
    v.at(1, 0) = -BaseElement::one(mode);
    in.V = v;
    in.phi = skew2("1", mode);
    in.C = std::vector<PolyMatrix>(2, PolyMatrix(2, 2, mode));
    PoissonStructure torus = build_structure(in);
    CHECK(curvature(torus, 8).b.is_zero());
}

TEST_CASE("curvature: jet case satisfies every relation") {
    PoissonStructure p = jet2();
    const int T = 8;
    CurvatureData cd = curvature(p, T); // throws if any identity fails
    CHECK_FALSE(cd.b.is_zero());
    CHECK(cd.beta == cd.psi); // the vanishing-gauge representative

    for (const auto& [k, c] : cd.alpha.terms()) {
        CHECK(k.y_degree() == 2);
        CHECK(k.form_degree() == 2);
    }
    for (const auto& [k, c] : cd.beta.terms()) {
        CHECK(k.y_degree() == 1);
        CHECK(k.form_degree() == 2);
    }

    // (1/hbar) ad(b) = nabla^2 + d nabla + nabla d on the generators
    for (int a = 0; a < 2; ++a) {
        WeylElement ya = y_generator(a, 2, T, p.base);
        WeylElement lhs = ad_over_hbar(cd.b, ya, p.fm);
        WeylElement rhs =
            nabla(nabla(ya, p), p) + op_d(nabla(ya, p), p.fm) + nabla(op_d(ya, p.fm), p);
        CHECK(lhs == rhs);
    }
}
