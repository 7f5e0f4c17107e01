#include <cmath>

#include "doctest.h"
#include "nilharmonics/calculus.hpp"
#include "nilharmonics/fields.hpp"
#include "nilharmonics/quadrature.hpp"

using namespace nilh;

TEST_CASE("abelian words are partial derivatives") {
    const GroupSpec A = GroupSpec::abelian(2);
    Polynomial f(2);
    f.add_term(mono_from({3, 2}), 1.0);  // x^3 y^2
    const Polynomial d = apply_word(make_word(A, Side::left, {2, 1}), f);
    CHECK(d == Polynomial::monomial(2, mono_from({1, 1}), 12.0));
}

TEST_CASE("left and right fields commute on heisenberg") {
    const GroupSpec H = GroupSpec::heisenberg();
    Polynomial f(3);
    f.add_term(mono_from({2, 1, 1}), 1.0);
    f.add_term(mono_from({0, 3, 1}), -2.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto X = build_field(H, Side::left, i), Y = build_field(H, Side::right, j);
            CHECK(X.apply(Y.apply(f)) == Y.apply(X.apply(f)));
        }
}

TEST_CASE("conversion tables are exact on monomials") {
    const GroupSpec H = GroupSpec::heisenberg();
    for (const auto& a : multi_indices(3, 2)) {
        const ConversionTable& t = conversion_cached(H, a);
        CHECK(conversion_monomial_residual(H, t) < 1e-12);
        CHECK(conversion_homogeneity_defect(H, t) < 1e-12);
    }
}

TEST_CASE("leibniz rule on polynomials and bumps") {
    const GroupSpec H = GroupSpec::heisenberg();
    Polynomial f(3), g(3);
    f.add_term(mono_from({1, 2, 0}), 1.5);
    f.add_term(mono_from({0, 0, 1}), -1.0);
    g.add_term(mono_from({2, 0, 1}), 0.5);
    const std::vector<GroupElement> pts{{0.1, 0.2, 0.3}, {-0.4, 0.5, -0.2}};
    const OperatorWord w = make_word(H, Side::left, {1, 1, 1});
    CHECK(leibniz_residual(w, f, g, pts) < 1e-12);
    const Expr b1 = gaussian_bump(3, {0.1, 0.0, 0.0}, 0.7), b2 = compact_bump(3, {0.0, 0.1, 0.0}, 1.5);
    CHECK(leibniz_residual(w, b1, b2, pts) < 1e-8);
}

TEST_CASE("integration by parts on bumps") {
    const GroupSpec H = GroupSpec::heisenberg();
    const Expr b1 = gaussian_bump(3, {0.1, 0.1, 0.1}, 0.6), b2 = gaussian_bump(3, {-0.1, -0.1, -0.1}, 0.8);
    const Grid grid({0, 0, 0}, {3, 3, 3}, {32, 32, 32}, RuleKind::gauss);
    const IbpResidual r = integrate_by_parts_residual(H, {1, 0, 1}, b1, b2, grid);
    CHECK(r.left < 1e-6);
    CHECK(r.right < 1e-6);
}

TEST_CASE("fundamental link on a polynomial") {
    const GroupSpec H = GroupSpec::heisenberg();
    Polynomial p(3);
    p.add_term(mono_from({2, 1, 0}), 1.0);
    p.add_term(mono_from({0, 1, 2}), 0.5);
    const std::vector<GroupElement> xis{{0.2, -0.1, 0.3}, {1.0, 0.5, -0.5}};
    for (const auto& a : multi_indices(3, 3)) CHECK(fundlink_residual(H, conversion_cached(H, a), p, xis) < 1e-10);
}

TEST_CASE("a left translate of a polynomial is polynomial in the variable") {
    const GroupSpec H = GroupSpec::heisenberg();
    const Polynomial t = Polynomial::variable(3, 2);
    const Polynomial moved = H.compose_left(t, {1.0, 2.0, 3.0});
    const GroupElement xi{0.5, -1.0, 0.25};
    CHECK(moved.eval(xi) == doctest::Approx(H.multiply({1.0, 2.0, 3.0}, xi)[2]));
}
