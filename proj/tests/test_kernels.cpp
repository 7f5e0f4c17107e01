#include <cmath>

#include "doctest.h"
#include "nilharmonics/kernels.hpp"

using namespace nilh;

TEST_CASE("classical kernel on the line is the Cauchy density") {
    const KernelSpec k = KernelSpec::classical(1);
    for (double x : {0.0, 0.5, 3.0}) {
        CHECK(k(&x) == doctest::Approx(1.0 / (M_PI * (1.0 + x * x))));
        CHECK(k.dilated(0.5, &x) == doctest::Approx(0.5 / (M_PI * (0.25 + x * x))));
    }
    CHECK(k.mass() == doctest::Approx(1.0));
}

TEST_CASE("a-derivative matches finite differences") {
    const KernelSpec k = KernelSpec::model_power(HomogeneousNorm(GroupSpec::heisenberg()), 1.0);
    const double eta[3] = {0.3, -0.2, 0.4};
    const double a = 0.8, h = 1e-5;
    const double fd = (k.dilated(a * std::exp(h), eta) - k.dilated(a * std::exp(-h), eta)) / (2.0 * h);
    CHECK(k.a_derivative(1, a, eta) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(k.a_derivative(0, a, eta) == doctest::Approx(k.dilated(a, eta)));
}

TEST_CASE("model kernel mass matches polar integration") {
    const HomogeneousNorm N(GroupSpec::heisenberg());
    const KernelSpec k = KernelSpec::model_power(N, 2.0);
    const SphereRule s = SphereRule::build(N, 16);
    const double numeric = polar_integrate(N, s, [&](const double* t) { return k(t); }, 200.0, 4000);
    CHECK(numeric == doctest::Approx(k.mass()).epsilon(2e-3));
}

TEST_CASE("semigroup and harmonicity of the classical kernel") {
    const KernelSpec k = KernelSpec::classical(1);
    CHECK(semigroup_residual(k, 0.4, 0.9, {{0.0}, {1.3}, {-2.0}}) < 1e-6);
    CHECK(harmonicity_residual(k, {{{0.2}, 0.5}, {{-1.0}, 1.5}}) < 1e-6);
}

TEST_CASE("certification of the classical kernel") {
    const CertificateReport r = certify_RGamma(KernelSpec::classical(1));
    CHECK(r.pass);
    CHECK(!r.estimates.empty());
}

TEST_CASE("family names round-trip") {
    CHECK(parse_family(family_name(KernelFamily::model_power)) == KernelFamily::model_power);
    CHECK_THROWS(parse_family("nonsense"));
}
