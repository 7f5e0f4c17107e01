// Acceptance run: one PASS/FAIL line per criterion with the measured values and pinned tolerances.
// Usage: nilharmonics_acceptance [--only k,...] [--expect-fail k,...]
// With --expect-fail the exit status is 0 exactly when the failing set equals the listed set.

#include <algorithm>
#include <cstdarg>
#include <numeric>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nilharmonics/calculus.hpp"
#include "nilharmonics/distributions.hpp"
#include "nilharmonics/io.hpp"
#include "nilharmonics/kernels.hpp"
#include "nilharmonics/quadrature.hpp"
#include "nilharmonics/weak_l1.hpp"

using namespace nilh;
using nlohmann::json;

namespace {

// pinned tolerances
constexpr double kGroupTol = 1e-10;
constexpr double kNormTol = 1e-12;
constexpr double kGammaMax = 1.01;
constexpr double kBallTol = 0.01;
constexpr double kPolarTol = 0.01;
constexpr double kExactTol = 1e-12;
constexpr double kBumpTol = 1e-4;
constexpr double kGrowthTol = 0.05;
constexpr double kIrsExactTol = 1e-4;
constexpr double kSemigroupTol = 1e-3;
constexpr double kHarmonicTol = 1e-4;
constexpr double kTwoPathTol = 1e-4;
constexpr int kWeightedPerAxis = 12;
constexpr double kFinalErrorRatio = 0.10;
constexpr double kSlopeLo = 0.8, kSlopeHi = 1.2;
constexpr double kGridTol = 0.03, kMcTol = 0.05;
constexpr double kNegativeGrowth = 10.0;
constexpr double kDriftTol = 0.10;

std::string data_dir() {
    if (const char* d = std::getenv("NILH_DATA_DIR")) return d;
    return NILH_DATA_DIR;
}
std::string data(const std::string& f) { return data_dir() + "/" + f; }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string norm_label(const HomogeneousNorm& N) {
    return N.spec().name() + (N.variant() == NormVariant::koranyi ? " (koranyi)" : "");
}

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::vector<GroupElement> random_points(int n, std::size_t count, double box, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-box, box);
    std::vector<GroupElement> pts(count, GroupElement(static_cast<std::size_t>(n)));
    for (auto& p : pts)
        for (auto& x : p) x = U(rng);
    return pts;
}

// ---------------------------------------------------------------- 1

Outcome group_axioms() {
    Outcome o;
    for (const char* f : {"abelian_r2.json", "heisenberg.json", "random_step2.json"}) {
        const GroupSpec s = load_group_spec(data(f)).spec;
        const int n = s.dim();
        const auto pts = random_points(n, 3000, 10.0, 17);
        const GroupElement e(static_cast<std::size_t>(n), 0.0);
        double assoc = 0, ident = 0, inv = 0;
        for (std::size_t i = 0; i < 1000; ++i) {
            const auto &x = pts[3 * i], &y = pts[3 * i + 1], &z = pts[3 * i + 2];
            const auto l = s.multiply(s.multiply(x, y), z), r = s.multiply(x, s.multiply(y, z));
            const auto xe = s.multiply(x, e), ex = s.multiply(e, x);
            const auto xi = s.multiply(x, s.inverse(x)), ix = s.multiply(s.inverse(x), x);
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
                assoc = std::max(assoc, std::abs(l[k] - r[k]));
                ident = std::max({ident, std::abs(xe[k] - x[k]), std::abs(ex[k] - x[k])});
                inv = std::max({inv, std::abs(xi[k]), std::abs(ix[k])});
            }
        }
        o.require(assoc < kGroupTol && ident < kGroupTol && inv < kGroupTol, s.name());
        o.note(fmt("%s assoc %.1e id %.1e inv %.1e", s.name().c_str(), assoc, ident, inv));
    }
    return o;
}

// ---------------------------------------------------------------- 2

Outcome norm_laws() {
    Outcome o;
    const GroupSpec H = load_group_spec(data("heisenberg.json")).spec;
    const std::vector<HomogeneousNorm> norms{HomogeneousNorm(H, NormVariant::koranyi), HomogeneousNorm(H),
                                             HomogeneousNorm(load_group_spec(data("abelian_r2.json")).spec),
                                             HomogeneousNorm(load_group_spec(data("random_step2.json")).spec)};
    for (const auto& N : norms) {
        const GroupSpec& s = N.spec();
        const auto pts = random_points(s.dim(), 1000, 5.0, 23);
        double hom = 0, sym = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double a = std::exp(-3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(pts.size()));
            hom = std::max(hom, std::abs(N(s.dilate(a, pts[i])) - a * N(pts[i])) / (a * N(pts[i])));
            sym = std::max(sym, std::abs(N(s.inverse(pts[i])) - N(pts[i])) / N(pts[i]));
        }
        o.require(hom < kNormTol && sym < kNormTol, norm_label(N) + " homogeneity/symmetry");
        o.note(fmt("%s hom %.1e sym %.1e", norm_label(N).c_str(), hom, sym));
    }
    const GammaReport g = measure_gamma(norms[0], 100000, 5);
    o.require(g.gamma <= kGammaMax, "koranyi gamma");
    o.note(fmt("koranyi gamma %.5f over %zu pairs", g.gamma, g.pairs));
    // Peetre with constant max(1, gamma)^{|r|}; both norms below satisfy the triangle inequality
    for (std::size_t which : {std::size_t{0}, std::size_t{2}}) {
        const auto& N = norms[which];
        const auto pts = random_points(N.spec().dim(), 4000, 8.0, 29);
        std::size_t violations = 0;
        for (double r : {-3.0, -1.0, 1.0, 3.0})
            for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
                const auto [lhs, rhs] = peetre_factor(N, pts[i], pts[i + 1], r);
                if (lhs > rhs * (1.0 + 1e-12)) ++violations;
            }
        o.require(violations == 0, N.spec().name() + " peetre");
        o.note(fmt("%s peetre violations %zu/8000", N.spec().name().c_str(), violations));
    }
    return o;
}

// ---------------------------------------------------------------- 3

Outcome haar_calibration() {
    Outcome o;
    const GroupSpec H = load_group_spec(data("heisenberg.json")).spec;
    const std::vector<HomogeneousNorm> norms{HomogeneousNorm(H, NormVariant::koranyi), HomogeneousNorm(H),
                                             HomogeneousNorm(load_group_spec(data("abelian_r2.json")).spec)};
    for (const auto& N : norms) {
        const double Q = N.spec().Q();
        const double v1 = haar_ball_volume(N, 1.0, 64), v2 = haar_ball_volume(N, 2.0, 64);
        o.require(std::abs(v1 - 1.0) <= kBallTol && std::abs(v2 / std::pow(2.0, Q) - 1.0) <= kBallTol,
                  norm_label(N) + " ball volumes");
        o.note(fmt("%s |B1| %.4f |B2|/2^Q %.4f", norm_label(N).c_str(), v1, v2 / std::pow(2.0, Q)));
        // radial integrands exp(-N) and N^2 exp(-N), negligible where N > 40
        const SphereRule sph = SphereRule::build(N, 24);
        const Grid box = Grid::ball_box(N, std::pow(40.0, 1.0 / N.root()), 64, RuleKind::gauss);
        const PointSet pts = box.points();
        const auto& Nc = N.N_compiled();
        const std::vector<ScalarFn> fs{[&](const double* t) { return std::exp(-Nc(t)); },
                                       [&](const double* t) { const double v = Nc(t); return v * v * std::exp(-v); }};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const double polar = polar_integrate(N, sph, fs[i], std::pow(60.0, 1.0 / N.root()), 64);
            const double cart = integrate(pts, fs[i]);
            o.require(std::abs(polar - cart) <= kPolarTol * std::abs(cart), norm_label(N) + " polar vs cartesian");
            o.note(fmt("f%zu polar %.5f cartesian %.5f", i + 1, polar, cart));
        }
    }
    return o;
}

// ---------------------------------------------------------------- 4

Outcome calculus_identities() {
    Outcome o;
    for (const char* f : {"abelian_r2.json", "heisenberg.json"}) {
        const GroupSpec s = load_group_spec(data(f)).spec;
        const int n = s.dim();
        const auto un = static_cast<std::size_t>(n);
        const auto xis = random_points(n, 6, 0.7, 3);
        const auto etas = random_points(n, 2, 0.5, 12);
        const Expr bump = gaussian_bump(n, std::vector<double>(un, 0.1), 0.6);
        const Expr bump2 = gaussian_bump(n, std::vector<double>(un, -0.1), 0.8);
        Polynomial P(n), R(n);
        std::mt19937_64 rng(8);
        std::uniform_int_distribution<int> deg(0, 2);
        std::uniform_real_distribution<double> co(-1.0, 1.0);
        for (int t = 0; t < 4; ++t) {
            std::vector<int> m(un), m2(un);
            for (std::size_t k = 0; k < un; ++k) {
                m[k] = deg(rng);
                m2[k] = deg(rng);
            }
            P.add_term(mono_from(m), co(rng));
            R.add_term(mono_from(m2), co(rng));
        }
        const Grid grid(std::vector<double>(un, 0.0), std::vector<double>(un, 3.0), std::vector<int>(un, 32),
                        RuleKind::gauss);
        const Grid conv_grid(std::vector<double>(un, 0.0), std::vector<double>(un, 3.0), std::vector<int>(un, 28),
                             RuleKind::gauss);
        double exact = 0, smooth = 0;
        int count = 0;
        for (const auto& a : multi_indices(n, 3)) {
            if (std::accumulate(a.begin(), a.end(), 0) == 0) continue;
            ++count;
            const ConversionTable& t = conversion_cached(s, a);
            const OperatorWord w = make_word(s, Side::left, a);
            exact = std::max({exact, conversion_monomial_residual(s, t), fundlink_residual(s, t, P, xis),
                              leibniz_residual(w, P, R, xis)});
            const IbpResidual ibp = integrate_by_parts_residual(s, a, bump, bump2, grid);
            smooth = std::max({smooth, fundlink_residual(s, t, bump, xis), leibniz_residual(w, bump, bump2, xis),
                               ibp.left, ibp.right,
                               convolution_identity_residuals(s, a, bump, bump2, conv_grid, etas).max()});
        }
        o.require(exact <= kExactTol, s.name() + " polynomial identities");
        o.require(smooth < kBumpTol, s.name() + " bump identities");
        o.note(fmt("%s %d multi-indices: polynomial %.1e bump %.1e", s.name().c_str(), count, exact, smooth));
    }
    return o;
}

// ---------------------------------------------------------------- 5

Outcome irs_bounds() {
    Outcome o;
    struct Case {
        const char* file;
        double r, s;
    };
    const std::vector<Case> cases{{"abelian_r1.json", -0.75, -0.75}, {"abelian_r1.json", -1.0, -2.0},
                                  {"abelian_r1.json", -2.0, -2.0},   {"heisenberg.json", -3.0, -3.0},
                                  {"heisenberg.json", -4.0, -2.0},   {"heisenberg.json", -5.0, -3.0}};
    for (const auto& c : cases) {
        const GroupSpec spec = load_group_spec(data(c.file)).spec;
        const HomogeneousNorm N(spec);
        const SphereRule sph = SphereRule::build(N, 24);
        GroupElement dir(static_cast<std::size_t>(spec.dim()), 0.0);
        dir[0] = 1.0;
        // the ratio approaches its limit like |eta|^{-min(r+Q, s+Q)} (logarithmically on the log line),
        // so the doubling test starts from a large domain
        const double R = 4096.0;
        double sup = 0, sup2 = 0;
        for (int i = 0; i <= 18; ++i) {
            const double rad = i == 0 ? 0.0 : R * std::pow(2.0, i - 17);
            const GroupElement eta = rad > 0.0 ? spec.dilate(rad, dir) : GroupElement(dir.size(), 0.0);
            const double v = I_rs(N, sph, c.r, c.s, eta).ratio;
            if (rad <= R) sup = std::max(sup, v);
            sup2 = std::max(sup2, v);
        }
        const double growth = sup2 / sup - 1.0;
        o.require(std::isfinite(sup) && growth < kGrowthTol, fmt("%s r=%g s=%g", spec.name().c_str(), c.r, c.s));
        o.note(fmt("Q=%g %s r=%g s=%g sup %.4f growth %.2e", spec.Q(), regime_name(irs_regime(c.r, c.s, spec.Q())).c_str(),
                   c.r, c.s, sup, growth));
    }
    const HomogeneousNorm N1(GroupSpec::abelian(1));
    const double v = I_rs(N1, SphereRule::build(N1, 24), -2.0, -2.0, GroupElement{0.0}).value;
    o.require(std::abs(v - 2.0 / 3.0) <= kIrsExactTol, "I_{-2,-2}(0) = 2/3");
    o.note(fmt("I(-2,-2,0) = %.8f", v));
    return o;
}

// ---------------------------------------------------------------- 6

Outcome kernel_certification() {
    Outcome o;
    const GroupSpec H = load_group_spec(data("heisenberg.json")).spec;
    const std::vector<KernelSpec> ks{KernelSpec::classical(1), KernelSpec::make(H, KernelFamily::model_power, 1.0),
                                     KernelSpec::make(H, KernelFamily::model_power, 2.0)};
    for (const auto& k : ks) {
        const CertificateReport rep = certify_RGamma(k);
        double worst = 0;
        for (const auto& e : rep.estimates) worst = std::max(worst, e.growth);
        o.require(rep.pass, family_name(k.family()) + fmt(" Gamma=%g", k.Gamma()));
        o.note(fmt("%s Gamma=%g: %zu estimates, max growth %.1e", family_name(k.family()).c_str(), k.Gamma(),
                   rep.estimates.size(), worst));
    }
    const auto xs = random_points(1, 24, 3.0, 31);
    const double semi = semigroup_residual(ks[0], 0.5, 0.75, xs);
    std::vector<std::pair<GroupElement, double>> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], 0.3 + 0.1 * static_cast<double>(i % 7));
    const double harm = harmonicity_residual(ks[0], pts);
    o.require(semi < kSemigroupTol, "semigroup");
    o.require(harm < kHarmonicTol, "harmonicity");
    o.note(fmt("semigroup %.1e harmonicity %.1e", semi, harm));
    return o;
}

// ---------------------------------------------------------------- 7-9

struct Triple {
    std::string name;
    LoadedGroup group;
    KernelFamily family;
    double Gamma;
    std::string dist;
    std::string phi;
    double phi_scale;
    double a;
    bool lipschitz;
};

std::vector<Triple> load_suite() {
    const json j = json::parse(read_file(data("suite.json")));
    std::vector<Triple> out;
    for (const auto& t : j.at("triples"))
        out.push_back({t.at("name"), load_group_spec(data(t.at("spec"))), parse_family(t.at("kernel")), t.at("gamma"),
                       data(t.at("dist")), t.at("phi"), t.at("phi_scale"), t.at("a"), t.value("lipschitz", false)});
    return out;
}

struct Bound {
    HomogeneousNorm norm;
    KernelSpec k;
    DistributionRep T;
    TestFunction phi;
};

Bound bind(const Triple& t) {
    HomogeneousNorm N(t.group.spec, t.group.norm);
    KernelSpec k = t.family == KernelFamily::model_power ? KernelSpec::model_power(N, t.Gamma)
                                                         : KernelSpec::make(t.group.spec, t.family, t.Gamma);
    DistributionRep T = load_distribution(t.dist, N);
    TestFunction phi = make_test_function(t.group.spec, t.phi, t.phi_scale);
    return {N, k, T, phi};
}

Outcome two_path() {
    Outcome o;
    std::set<int> orders;
    std::set<std::string> groups;
    for (const auto& t : load_suite()) {
        const Bound b = bind(t);
        QuadOptions q;
        q.per_axis = 18;
        const TwoPath tp = lemma42_two_path(b.T, b.k, b.phi, t.a, q);
        o.require(tp.rel_diff() < kTwoPathTol, t.name);
        o.note(fmt("%s: rel %.1e", t.name.c_str(), tp.rel_diff()));
        orders.insert(b.T.max_order());
        groups.insert(t.group.spec.name());
    }
    o.require(orders.count(0) && orders.count(1) && orders.count(2) && groups.size() >= 2, "suite coverage");
    return o;
}

Outcome weighted_norms() {
    Outcome o;
    // the check is on tail growth, which is insensitive to the inner resolution
    QuadOptions q;
    q.per_axis = kWeightedPerAxis;
    for (const auto& t : load_suite()) {
        const Bound b = bind(t);
        std::vector<int> iota(static_cast<std::size_t>(t.group.spec.dim()), 0);
        const WeightedNormReport w0 = extension_weighted_norm(b.T, b.k, t.a, iota, 64.0, q);
        o.require(std::isfinite(w0.value) && w0.growth < kGrowthTol, t.name);
        std::string line = fmt("%s: %.3e (growth %.1e)", t.name.c_str(), w0.value, w0.growth);
        // first-order derivative on a subset: each Heisenberg evaluation costs about 20 s
        if (t.group.spec.dim() == 1 || b.T.max_order() == 1) {
            iota[0] = 1;
            const WeightedNormReport w1 = extension_weighted_norm(b.T, b.k, t.a, iota, 64.0, q);
            o.require(std::isfinite(w1.value) && w1.growth < kGrowthTol, t.name + " first derivative");
            line += fmt(", first derivative %.3e (growth %.1e)", w1.value, w1.growth);
        }
        o.note(line);
    }
    return o;
}

Outcome boundary_convergence_suite() {
    Outcome o;
    std::vector<double> as;
    for (double a = 1.0; a >= 1.0 / 64.0; a /= 2.0) as.push_back(a);
    for (const auto& t : load_suite()) {
        const Bound b = bind(t);
        const ConvergenceTable tab = boundary_convergence(b.T, b.k, b.phi, as);
        const double ratio = tab.rows.back().error / tab.rows.front().error;
        o.require(tab.monotone && ratio < kFinalErrorRatio, t.name);
        if (t.lipschitz) o.require(tab.slope >= kSlopeLo && tab.slope <= kSlopeHi, t.name + " slope");
        o.note(fmt("%s: final/initial %.3f slope %.3f%s", t.name.c_str(), ratio, tab.slope,
                   tab.monotone ? "" : " (not monotone)"));
    }
    return o;
}

// ---------------------------------------------------------------- 10

Outcome weak_closed_forms() {
    Outcome o;
    const std::vector<double> alphas{0.01, 0.1, 1.0, 10.0, 100.0};
    struct Case {
        GroupSpec spec;
        double Gamma;
        EstimatorKind kind;
        double tol;
    };
    const std::vector<Case> cases{{load_group_spec(data("abelian_r1.json")).spec, 1.0, EstimatorKind::grid, kGridTol},
                                  {load_group_spec(data("abelian_r1.json")).spec, 2.0, EstimatorKind::grid, kGridTol},
                                  {load_group_spec(data("heisenberg.json")).spec, 1.0, EstimatorKind::monte_carlo, kMcTol}};
    for (const auto& c : cases) {
        const HomogeneousNorm N(c.spec);
        const double Q = c.spec.Q(), target = weak_closed_form(Q, c.Gamma);
        const HalfSpaceFn F = [&](const double* e, double a) { return phi_gamma(N, c.Gamma, e, a) / a; };
        Estimator est;
        est.kind = c.kind;
        const WeakConstantReport rep = weak_l1_constant(
            N, F, alphas, [&](double al) { return scaled_window(c.spec, std::pow(al, -1.0 / (Q + 1.0))); },
            HalfMeasure::da, est);
        double worst = 0;
        for (double p : rep.products) worst = std::max(worst, std::abs(p / target - 1.0));
        o.require(worst <= c.tol && rep.stable, fmt("(Q,Gamma)=(%g,%g)", Q, c.Gamma));
        o.note(fmt("(Q,Gamma)=(%g,%g) target %.4f worst rel %.1e", Q, c.Gamma, target, worst));
    }
    // Phi_Gamma itself against d lambda da/a
    const HomogeneousNorm N1(GroupSpec::abelian(1));
    const HalfSpaceFn F = [&](const double* e, double a) { return phi_gamma(N1, 1.0, e, a); };
    const WeakConstantReport neg = weak_l1_constant(
        N1, F, alphas, [&](double al) { return scaled_window(N1.spec(), 1.0 / al); }, HalfMeasure::da_over_a);
    const double growth = neg.products.back() / neg.products.front();
    o.require(growth >= kNegativeGrowth, "da/a negative case: alpha*measure increase");
    o.note(fmt("da/a case: alpha*measure %.4f .. %.4f (x%.3f), constant %.4f", neg.products.front(),
               neg.products.back(), growth, weak_closed_form_log(1.0, 1.0)));
    return o;
}

// ---------------------------------------------------------------- 11

struct CoverRun {
    CoveringCertificate cert;
    CoveringReport rep;
    ProfileReport prof;
};

CoverRun cover(const HomogeneousNorm& N, const AtomicMeasure& nu, double alpha, int i0, int depth,
               const GroupElement& origin) {
    CoveringOptions opt;
    opt.origin = origin;
    CoverRun r;
    r.cert = build_covering(N, nu, 1.0, alpha, i0, depth, opt);
    r.rep = verify_covering(N, r.cert, nu);
    r.prof = U_i_check(N, r.cert);
    return r;
}

double drift(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

Outcome covering_certificates() {
    Outcome o;
    struct Case {
        std::string spec, measure;
        std::vector<std::pair<double, int>> levels;  // (alpha, i0)
        int depth;
        GroupElement shift;
    };
    const std::vector<Case> cases{
        {"abelian_r1.json", "atom_r1.json", {{0.05, 2}, {0.1, 2}, {1.0, 2}}, 6, {3.7}},
        {"heisenberg.json", "atoms_heisenberg.json", {{0.25, 2}, {1.0, 1}, {4.0, 1}}, 2, {1.0, -2.0, 0.5}}};
    for (const auto& c : cases) {
        const LoadedGroup g = load_group_spec(data(c.spec));
        const HomogeneousNorm N(g.spec, g.norm);
        const AtomicMeasure nu = load_measure(data(c.measure), g.spec);
        const GroupElement id(static_cast<std::size_t>(g.spec.dim()), 0.0);
        for (const auto& [alpha, i0] : c.levels) {
            const CoverRun base = cover(N, nu, alpha, i0, c.depth, id);
            const CoverRun deep = cover(N, nu, alpha, i0, c.depth + 2, id);
            const CoverRun moved = cover(N, nu.left_translate(g.spec, c.shift), alpha, i0, c.depth, c.shift);
            double d = 0;
            for (const CoverRun* r : {&deep, &moved}) {
                d = std::max({d, drift(base.rep.C_i, r->rep.C_i), drift(base.rep.C_ii, r->rep.C_ii),
                              drift(base.rep.C_iii, r->rep.C_iii), drift(base.rep.fij_bound, r->rep.fij_bound),
                              drift(base.cert.kappa_measured, r->cert.kappa_measured)});
            }
            const bool ok = base.rep.pass && deep.rep.pass && moved.rep.pass && base.prof.pass && deep.prof.pass &&
                            moved.prof.pass;
            o.require(ok && d < kDriftTol, fmt("%s alpha=%g", g.spec.name().c_str(), alpha));
            o.note(fmt("%s alpha=%g: |S| %zu C_i %.3g C_ii %.3g C_iii %.2g fij %.3g/%.3g (deeper %.3g) drift %.1e "
                       "alpha|U>alpha| %.3g <= %.3g",
                       g.spec.name().c_str(), alpha, base.cert.S.size(), base.rep.C_i, base.rep.C_ii, base.rep.C_iii,
                       base.rep.fij_ratio, base.rep.fij_bound, deep.rep.fij_ratio, d, alpha * base.rep.superlevel,
                       alpha * base.rep.chain_constant));
        }
    }
    return o;
}

// ---------------------------------------------------------------- 12

Outcome poisson_bounds() {
    Outcome o;
    const KernelSpec k = KernelSpec::classical(1);
    const CertificateReport cert = certify_RGamma(k);
    Window w;
    w.eta_lo = {-8.0};
    w.eta_hi = {8.0};
    w.a_lo = 0.0;
    w.a_hi = 8.0;
    const std::vector<AtomicMeasure> mus{AtomicMeasure{{{{0.0}, 1.0}}},
                                         AtomicMeasure{{{{0.0}, 1.0}, {{1.5}, 0.5}, {{50.0}, 1.0}}}};
    for (const auto& mu : mus) {
        const PoissonBoundsReport r = mu_poisson_bounds(mu, k, cert, w, 1.0);
        o.require(r.pass && std::isfinite(r.weak.constant) && r.weak.stable && r.sup_nonincreasing,
                  fmt("%zu atoms", mu.atoms.size()));
        std::string sups;
        for (double v : r.sup_values) sups += fmt(" %.3g", v);
        o.note(fmt("%zu atoms: weak constant %.4f, sup by a0:%s", mu.atoms.size(), r.weak.constant, sups.c_str()));
    }
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
};

std::set<int> parse_ids(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only, expect_fail;
    bool expect_given = false;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string a = argv[i];
        if (a == "--only") only = parse_ids(argv[i + 1]);
        else if (a == "--expect-fail") {
            expect_fail = parse_ids(argv[i + 1]);
            expect_given = true;
        } else {
            std::fprintf(stderr, "unknown option %s\n", a.c_str());
            return 1;
        }
    }
    const std::vector<Criterion> all{
        {1, "group axioms", 5, group_axioms},
        {2, "norm laws", 10, norm_laws},
        {3, "Haar calibration", 30, haar_calibration},
        {4, "calculus identities", 120, calculus_identities},
        {5, "I_rs majorants", 120, irs_bounds},
        {6, "kernel certification", 180, kernel_certification},
        {7, "two-path identity", 300, two_path},
        {8, "extension weighted norms", 180, weighted_norms},
        {9, "boundary convergence", 300, boundary_convergence_suite},
        {10, "weak-L1 closed forms", 300, weak_closed_forms},
        {11, "covering certificates", 600, covering_certificates},
        {12, "Poisson bounds for measures", 300, poisson_bounds},
    };
    std::set<int> failed;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.note(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(secs < c.budget, fmt("time budget %.0f s", c.budget));
        if (!out.pass) failed.insert(c.id);
        std::printf("%s %2d %s (%.1f s / %.0f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget);
        for (const auto& n : out.notes) std::printf("       %s\n", n.c_str());
        std::fflush(stdout);
    }
    if (expect_given) {
        std::set<int> expected;
        for (int id : expect_fail)
            if (only.empty() || only.count(id)) expected.insert(id);
        if (failed != expected) {
            std::printf("failing set differs from the documented known failures\n");
            return 1;
        }
        return 0;
    }
    return failed.empty() ? 0 : 1;
}
