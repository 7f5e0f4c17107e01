#include <random>

#include "doctest.h"
#include "nilharmonics/fields.hpp"
#include "nilharmonics/group.hpp"

using namespace nilh;

namespace {
GroupElement random_element(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    GroupElement x(static_cast<std::size_t>(n));
    for (auto& v : x) v = U(rng);
    return x;
}
}  // namespace

TEST_CASE("heisenberg law matches the explicit formula") {
    const GroupSpec H = GroupSpec::heisenberg();
    CHECK(H.dim() == 3);
    CHECK(H.Q() == doctest::Approx(4.0));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_element(rng, 3), q = random_element(rng, 3);
        const auto r = H.multiply(p, q);
        CHECK(r[0] == doctest::Approx(p[0] + q[0]));
        CHECK(r[1] == doctest::Approx(p[1] + q[1]));
        CHECK(r[2] == doctest::Approx(p[2] + q[2] + 0.5 * (p[0] * q[1] - p[1] * q[0])));
    }
}

TEST_CASE("abelian law is addition and Q is the dimension") {
    const GroupSpec A = GroupSpec::abelian(3);
    CHECK(A.is_abelian());
    CHECK(A.Q() == doctest::Approx(3.0));
    const auto r = A.multiply({1.0, 2.0, 3.0}, {-0.5, 0.25, 4.0});
    CHECK(r == GroupElement{0.5, 2.25, 7.0});
}

TEST_CASE("group axioms hold on random step-2 groups") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const GroupSpec G = GroupSpec::random_step2(seed, 3, 2);
        CHECK(G.Q() == doctest::Approx(3.0 + 2.0 * 2.0));
        std::mt19937_64 rng(seed);
        for (int i = 0; i < 100; ++i) {
            const auto x = random_element(rng, G.dim()), y = random_element(rng, G.dim()),
                       z = random_element(rng, G.dim());
            const auto l = G.multiply(G.multiply(x, y), z), r = G.multiply(x, G.multiply(y, z));
            const auto e = G.multiply(x, G.inverse(x));
            for (int k = 0; k < G.dim(); ++k) {
                CHECK(l[static_cast<std::size_t>(k)] == doctest::Approx(r[static_cast<std::size_t>(k)]).epsilon(1e-12));
                CHECK(std::abs(e[static_cast<std::size_t>(k)]) < 1e-12);
            }
            // exponential coordinates: the inverse is the negative
            const auto xi = G.inverse(x);
            for (int k = 0; k < G.dim(); ++k) CHECK(xi[static_cast<std::size_t>(k)] == doctest::Approx(-x[static_cast<std::size_t>(k)]));
        }
    }
}

TEST_CASE("dilations are automorphisms") {
    const GroupSpec H = GroupSpec::heisenberg();
    std::mt19937_64 rng(4);
    for (double a : {0.3, 1.7, 5.0}) {
        const auto x = random_element(rng, 3), y = random_element(rng, 3);
        const auto l = H.dilate(a, H.multiply(x, y)), r = H.multiply(H.dilate(a, x), H.dilate(a, y));
        for (int k = 0; k < 3; ++k) CHECK(l[static_cast<std::size_t>(k)] == doctest::Approx(r[static_cast<std::size_t>(k)]));
        CHECK(H.dilate(a, x)[2] == doctest::Approx(a * a * x[2]));
    }
}

TEST_CASE("non-monotone weights are rejected") {
    CHECK_THROWS(GroupSpec("bad", {Rational(2), Rational(1)}, {}));
}

TEST_CASE("heisenberg invariant fields") {
    const GroupSpec H = GroupSpec::heisenberg();
    // f = t: X_1 t = -y/2, X_2 t = x/2, Y_1 t = y/2
    const Polynomial t = Polynomial::variable(3, 2);
    const Polynomial X1t = build_field(H, Side::left, 0).apply(t);
    const Polynomial X2t = build_field(H, Side::left, 1).apply(t);
    const Polynomial Y1t = build_field(H, Side::right, 0).apply(t);
    CHECK(X1t == Polynomial::variable(3, 1) * -0.5);
    CHECK(X2t == Polynomial::variable(3, 0) * 0.5);
    CHECK(Y1t == Polynomial::variable(3, 1) * 0.5);
    // [X_1, X_2] = d/dt
    const auto X1 = build_field(H, Side::left, 0), X2 = build_field(H, Side::left, 1);
    CHECK(X1.apply(X2t) - X2.apply(X1t) == Polynomial::constant(3, 1.0));
}

TEST_CASE("multi-indices enumerate by total order") {
    const auto m = multi_indices(2, 2);
    CHECK(m.size() == 6);  // (0,0) (1,0) (0,1) (2,0) (1,1) (0,2)
}
