#include <cmath>
#include <random>

#include "doctest.h"
#include "nilharmonics/norm.hpp"

using namespace nilh;

TEST_CASE("abelian even-power norm is Euclidean") {
    const HomogeneousNorm N(GroupSpec::abelian(2));
    CHECK(N(GroupElement{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(N.unit_ball_lebesgue() == doctest::Approx(M_PI).epsilon(1e-6));
}

TEST_CASE("norms are homogeneous, symmetric and positive") {
    const GroupSpec H = GroupSpec::heisenberg();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (auto v : {NormVariant::even_power, NormVariant::koranyi}) {
        const HomogeneousNorm N(H, v);
        for (int i = 0; i < 200; ++i) {
            const GroupElement x{U(rng), U(rng), U(rng)};
            const double a = std::exp(U(rng));
            CHECK(N(x) > 0.0);
            CHECK(N(H.dilate(a, x)) == doctest::Approx(a * N(x)).epsilon(1e-12));
            CHECK(N(H.inverse(x)) == doctest::Approx(N(x)).epsilon(1e-12));
        }
        CHECK(N(GroupElement{0.0, 0.0, 0.0}) == 0.0);
    }
}

TEST_CASE("koranyi norm satisfies the triangle inequality on samples") {
    const HomogeneousNorm N(GroupSpec::heisenberg(), NormVariant::koranyi);
    const GammaReport g = measure_gamma(N, 20000, 3);
    CHECK(g.gamma <= 1.0 + 1e-9);
    CHECK(g.pairs == 20000);
}

TEST_CASE("peetre factor") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const auto [lhs, rhs] = peetre_factor(N, {2.0}, {-5.0}, -2.0);
    CHECK(lhs == doctest::Approx(std::pow(4.0, -2.0)));
    CHECK(rhs == doctest::Approx(9.0 * std::pow(6.0, -2.0)));
    CHECK(lhs <= rhs);
}

TEST_CASE("bridge function") {
    CHECK(bridge_phi(0.0) == 1.0);
    CHECK(bridge_phi(1.0) == doctest::Approx(1.0));
    CHECK(bridge_phi(2.0) == doctest::Approx(2.0));
    CHECK(bridge_phi(7.5) == doctest::Approx(7.5));
    for (double x = 1.0; x < 2.0; x += 0.05) CHECK(bridge_phi(x + 0.05) >= bridge_phi(x) - 1e-12);
}

TEST_CASE("weight function is (1 + |eta|)^mu away from the origin") {
    const WeightFunction w(HomogeneousNorm(GroupSpec::abelian(1)), 3.0);
    CHECK(w(GroupElement{10.0}) == doctest::Approx(1331.0));
    CHECK(w(GroupElement{0.0}) == doctest::Approx(8.0));
    CHECK(WeightFunction::of_radius(10.0, -2.0) == doctest::Approx(1.0 / 121.0));
}
