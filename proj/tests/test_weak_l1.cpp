#include <cmath>

#include "doctest.h"
#include "nilharmonics/weak_l1.hpp"

using namespace nilh;

TEST_CASE("closed-form weak constants") {
    CHECK(weak_closed_form(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(weak_closed_form(1.0, 2.0) == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(weak_closed_form(4.0, 1.0) == doctest::Approx(0.2).epsilon(1e-8));
    // int_0^1 (sqrt(a) - a) da / a = 2 - 1
    CHECK(weak_closed_form_log(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("phi_gamma formula") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const double eta = 2.0;
    CHECK(phi_gamma(N, 1.0, &eta, 0.5) == doctest::Approx(0.5 / (2.5 * 2.5)));
}

TEST_CASE("superlevel measure of an explicit function") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    Window w;
    w.eta_lo = {-1.0};
    w.eta_hi = {1.0};
    w.a_lo = 0.0;
    w.a_hi = 1.0;
    // {1/a > 2} = (-1, 1) x (0, 1/2): Lebesgue 1, calibrated 1/2
    const LevelMeasure m = superlevel_measure(N, [](const double*, double a) { return 1.0 / a; }, 2.0, w);
    CHECK(m.value == doctest::Approx(0.5).epsilon(0.01));
    CHECK(m.error < 0.01);
}

TEST_CASE("weak constant on the line") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    Estimator est;
    est.cells = 600;
    const auto rep = weak_l1_constant(
        N, [&](const double* e, double a) { return phi_gamma(N, 1.0, e, a) / a; }, {0.1, 10.0},
        [&](double al) { return scaled_window(N.spec(), std::pow(al, -0.5)); }, HalfMeasure::da, est);
    for (double p : rep.products) CHECK(p == doctest::Approx(0.5).epsilon(0.03));
    CHECK(rep.stable);
}

TEST_CASE("measure translation") {
    const GroupSpec H = GroupSpec::heisenberg();
    AtomicMeasure m{{{{0.0, 0.0, 0.0}, 2.0}, {{1.0, 0.0, 0.0}, 1.0}}};
    const AtomicMeasure t = m.left_translate(H, {0.0, 1.0, 0.0});
    CHECK(t.total_mass() == doctest::Approx(3.0));
    CHECK(t.atoms[1].xi[2] == doctest::Approx(-0.5));
}

TEST_CASE("covering certificate on the line is translation covariant") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const AtomicMeasure nu{{{{0.0}, 1.0}}};
    const CoveringCertificate c = build_covering(N, nu, 1.0, 0.1, 2, 6);
    const CoveringReport r = verify_covering(N, c, nu);
    CHECK(r.pass);
    CHECK(r.disjoint);
    CHECK(!c.S.empty());
    CoveringOptions o;
    o.origin = {3.7};
    const AtomicMeasure moved = nu.left_translate(N.spec(), {3.7});
    const CoveringCertificate c2 = build_covering(N, moved, 1.0, 0.1, 2, 6, o);
    const CoveringReport r2 = verify_covering(N, c2, moved);
    CHECK(c2.S.size() == c.S.size());
    CHECK(r2.C_i == doctest::Approx(r.C_i).epsilon(1e-6));
    CHECK(r2.C_iii == doctest::Approx(r.C_iii).epsilon(1e-6));
    CHECK(U_i_check(N, c).pass);
}

TEST_CASE("U_nu sums the atoms") {
    const HomogeneousNorm N(GroupSpec::abelian(1));
    const AtomicMeasure nu{{{{0.0}, 1.0}, {{2.0}, 3.0}}};
    const double eta = 1.0;
    // a^{Gamma-1} / (a + |eta - xi|)^{Q+Gamma} with Q = Gamma = 1, a = 1
    CHECK(U_nu(N, nu, 1.0, &eta, 1.0) == doctest::Approx(0.25 + 3.0 * 0.25));
}
