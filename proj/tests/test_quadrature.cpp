#include <cmath>

#include "doctest.h"
#include "nilharmonics/quadrature.hpp"

using namespace nilh;

TEST_CASE("gauss grids integrate polynomials exactly") {
    const Grid g({0.5, 0.0}, {1.5, 2.0}, {6, 6}, RuleKind::gauss);
    // int_{-1}^{2} x^3 dx int_{-2}^{2} y^2 dy = (16 - 1)/4 * 16/3
    const double v = integrate(g.points(), [](const double* t) { return t[0] * t[0] * t[0] * t[1] * t[1]; });
    CHECK(v == doctest::Approx(15.0 / 4.0 * 16.0 / 3.0).epsilon(1e-12));
    CHECK(g.volume() == doctest::Approx(12.0));
}

TEST_CASE("calibrated ball volumes scale like r^Q") {
    const HomogeneousNorm A(GroupSpec::abelian(2));
    CHECK(haar_ball_volume(A, 1.0, 64) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(haar_ball_volume(A, 2.0, 64) == doctest::Approx(4.0).epsilon(0.01));
    const HomogeneousNorm H(GroupSpec::heisenberg());
    CHECK(haar_ball_volume(H, 2.0, 48) == doctest::Approx(16.0).epsilon(0.01));
}

TEST_CASE("I_rs at the origin matches the closed form") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const SphereRule s = SphereRule::build(N, 24);
    // int (1+|x|)^{-4} dx = 2/3
    CHECK(I_rs(N, s, -2.0, -2.0, {0.0}).value == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
    // int (1+|x|)^{-3} dx = 1
    CHECK(I_rs(N, s, -1.0, -2.0, {0.0}).value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("regimes") {
    CHECK(irs_regime(-0.75, -0.75, 1.0) == IrsRegime::power);
    CHECK(irs_regime(-1.0, -2.0, 1.0) == IrsRegime::logarithmic);
    CHECK(irs_regime(-2.0, -2.0, 1.0) == IrsRegime::bounded);
    CHECK(irs_regime(-0.5, -0.5, 1.0) == IrsRegime::divergent);
    CHECK(irs_majorant(-2.0, -2.0, 1.0, 3.0) == doctest::Approx(std::pow(4.0, -2.0)));
}

TEST_CASE("convolution of gaussians on the line") {
    const GroupSpec A = GroupSpec::abelian(1);
    const Grid g({0.0}, {10.0}, {200}, RuleKind::gauss);
    const PointSet p = g.points();
    auto f = [](const double* t) { return std::exp(-t[0] * t[0]); };
    auto h = [](const double* t) { return std::exp(-t[0] * t[0] / 2.0); };
    for (double x : {0.0, 0.7, 2.0}) {
        // variances 1/2 and 1 combine: sqrt(pi) sqrt(2 pi) / sqrt(3 pi) exp(-x^2/3)
        const double exact = std::sqrt(2.0 * M_PI / 3.0) * std::exp(-x * x / 3.0);
        const ConvolutionValue v = convolve(A, f, h, &x, p, p);
        CHECK(v.first == doctest::Approx(exact).epsilon(1e-10));
        CHECK(v.second == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("polar integration of a radial gaussian") {
    // int exp(-N) = |B(0,1)|_Leb Gamma(1 + Q/2M)
    const HomogeneousNorm H(GroupSpec::heisenberg());
    const SphereRule s = SphereRule::build(H, 16);
    CHECK(s.pts.total_weight() == doctest::Approx(4.0 * H.unit_ball_lebesgue()).epsilon(1e-12));
    const auto& N = H.N_compiled();
    const double v = polar_integrate(H, s, [&](const double* t) { return std::exp(-N(t)); }, 4.0, 64);
    CHECK(v == doctest::Approx(H.unit_ball_lebesgue() * std::tgamma(1.0 + 4.0 / H.root())).epsilon(1e-6));
}
