#include <cmath>

#include "doctest.h"
#include "nilharmonics/distributions.hpp"

using namespace nilh;

namespace {
double g(double x) { return std::exp(-(x - 0.3) * (x - 0.3) / 0.25); }
double dg(double x) { return -8.0 * (x - 0.3) * g(x); }
// midpoint rule on [-L, L]
template <class F>
double line_integral(F f, double L = 12.0, int N = 200000) {
    double s = 0.0;
    const double h = 2.0 * L / N;
    for (int i = 0; i < N; ++i) s += f(-L + (i + 0.5) * h);
    return s * h;
}
}  // namespace

TEST_CASE("pairing a derivative term integrates by parts") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const DistributionRep T(N, 2.0, {make_term(N, {1}, {"gaussian", {0.3}, 0.5, 1.0, 1.0})});
    const TestFunction phi = make_test_function(N.spec(), "gaussian", 1.0);
    // <g', phi> = -int g phi'
    const double oracle = line_integral([&](double x) { return dg(x) * phi(&x); });
    CHECK(pair(T, phi.phi) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("poisson extension against direct quadrature") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const KernelSpec k = KernelSpec::classical(1);
    const DistributionRep T(N, 2.0, {make_term(N, {1}, {"gaussian", {0.3}, 0.5, 1.0, 1.0})});
    for (double x : {0.0, 0.7, 3.0}) {
        const double oracle = line_integral([&](double xi) {
            const double z = x - xi;
            return dg(xi) * k.dilated(0.5, &z);
        });
        CHECK(poisson_extend(T, k, 0.5, {x}) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("two-path identity on the line") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const DistributionRep T(N, 2.0, {make_term(N, {1}, {"gaussian", {0.3}, 0.5, 1.0, 1.0})});
    const TwoPath tp = lemma42_two_path(T, KernelSpec::classical(1), make_test_function(N.spec(), "gaussian"), 1.0);
    CHECK(tp.rel_diff() < 1e-6);
}

TEST_CASE("boundary values of a unit bump converge at rate one") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const DistributionRep T(N, 2.0, {make_term(N, {0}, {"identity", {0.0}, 0.25, 1.0, 1.0})});
    std::vector<double> as;
    for (double a = 1.0; a >= 1.0 / 64.0; a /= 2.0) as.push_back(a);
    const ConvergenceTable t =
        boundary_convergence(T, KernelSpec::classical(1), make_test_function(N.spec(), "gaussian"), as);
    CHECK(t.monotone);
    CHECK(t.slope > 0.8);
    CHECK(t.slope < 1.2);
}

TEST_CASE("the identity density has unit mass") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const DistributionRep T(N, 2.0, {make_term(N, {0}, {"identity", {0.0}, 0.25, 1.0, 1.0})});
    CHECK(pair(T, make_test_function(N.spec(), "one").phi) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unknown test functions are rejected") {
    CHECK_THROWS_AS(make_test_function(GroupSpec::abelian(1), "nope"), std::invalid_argument);
}

TEST_CASE("derivatives commute with the extension") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const DistributionRep T(N, 2.0, {make_term(N, {1}, {"gaussian", {0.3}, 0.5, 1.0, 1.0})});
    CHECK(derivative_commute_residual(T, KernelSpec::classical(1), 0, 0.7, {{0.0}, {1.0}}) < 1e-5);
    CHECK(a_derivative_residual(T, KernelSpec::classical(1), 0.7, {{0.0}, {1.0}}) < 1e-5);
}
