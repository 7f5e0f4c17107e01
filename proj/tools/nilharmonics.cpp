#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nilharmonics/calculus.hpp"
#include "nilharmonics/distributions.hpp"
#include "nilharmonics/io.hpp"
#include "nilharmonics/kernels.hpp"
#include "nilharmonics/parallel.hpp"
#include "nilharmonics/quadrature.hpp"
#include "nilharmonics/weak_l1.hpp"

using nlohmann::json;
using namespace nilh;

namespace {

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct Run {
    std::string command;
    json plan = json::object();
    std::vector<Check> checks;
    std::vector<std::string> outputs;
    json results = json::object();
    std::string config;  // hashed into the metadata

    void check(const std::string& name, double value, double threshold, bool pass) {
        checks.push_back({name, value, threshold, pass});
    }
    void below(const std::string& name, double value, double threshold) {
        check(name, value, threshold, std::isfinite(value) && value < threshold);
    }
};

struct Common {
    bool dry_run = false;
    int threads = 0;
    std::uint64_t seed = 1;
    std::string summary;
};

double num(double x) { return std::isfinite(x) ? x : -1.0; }

json checks_json(const std::vector<Check>& cs) {
    json a = json::array();
    for (const auto& c : cs) {
        json o = {{"name", c.name}, {"pass", c.pass}};
        o["value"] = std::isfinite(c.value) ? json(c.value) : json(format_number(c.value));
        o["threshold"] = c.threshold;
        a.push_back(o);
    }
    return a;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InputError("cannot parse number '" + item + "' in list '" + s + "'");
        }
    }
    return out;
}

std::vector<GroupElement> random_points(int n, std::size_t count, double box, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-box, box);
    std::vector<GroupElement> pts(count, GroupElement(static_cast<std::size_t>(n)));
    for (auto& p : pts)
        for (auto& x : p) x = U(rng);
    return pts;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------- group check

void group_check(Run& run, const Common& c, const std::string& spec_path, std::size_t triples,
                 std::size_t gamma_pairs, const std::string& out) {
    const LoadedGroup g = load_group_spec(spec_path);
    run.config += read_file(spec_path);
    run.plan = {{"spec", g.spec.name()}, {"triples", triples}, {"gamma_pairs", gamma_pairs}, {"out", out}};
    if (c.dry_run) return;
    const GroupSpec& s = g.spec;
    const HomogeneousNorm norm(s, g.norm);
    const int n = s.dim();
    auto pts = random_points(n, 3 * triples, 10.0, c.seed);
    const GroupElement e(static_cast<std::size_t>(n), 0.0);
    double assoc = 0, ident = 0, inv = 0, dil = 0, hom = 0, sym = 0;
    for (std::size_t i = 0; i < triples; ++i) {
        const auto &x = pts[3 * i], &y = pts[3 * i + 1], &z = pts[3 * i + 2];
        const auto l = s.multiply(s.multiply(x, y), z), r = s.multiply(x, s.multiply(y, z));
        const auto xe = s.multiply(x, e), ex = s.multiply(e, x), xi = s.multiply(x, s.inverse(x));
        const double a = 0.1 + 3.0 * static_cast<double>(i % 17) / 17.0;
        const auto d1 = s.dilate(a, s.multiply(x, y)), d2 = s.multiply(s.dilate(a, x), s.dilate(a, y));
        for (int k = 0; k < n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            assoc = std::max(assoc, std::abs(l[ku] - r[ku]));
            ident = std::max({ident, std::abs(xe[ku] - x[ku]), std::abs(ex[ku] - x[ku])});
            inv = std::max(inv, std::abs(xi[ku]));
            dil = std::max(dil, std::abs(d1[ku] - d2[ku]) / std::max(1.0, std::abs(d2[ku])));
        }
        hom = std::max(hom, rel(norm(s.dilate(a, x)), a * norm(x)));
        sym = std::max(sym, rel(norm(s.inverse(x)), norm(x)));
    }
    const GammaReport gr = measure_gamma(norm, gamma_pairs, c.seed + 1);
    run.below("associativity", assoc, 1e-10);
    run.below("identity", ident, 1e-12);
    run.below("inverse", inv, 1e-12);
    run.below("dilation automorphism", dil, 1e-10);
    run.below("norm homogeneity", hom, 1e-12);
    run.check("norm symmetry", sym, 1e-12, sym <= 1e-12);
    if (g.norm == NormVariant::koranyi) run.check("measured gamma", gr.gamma, 1.01, gr.gamma <= 1.01);
    run.results = {{"gamma", gr.gamma}, {"Q", s.Q()}, {"unit_ball_lebesgue", norm.unit_ball_lebesgue()}};
    Table t;
    t.columns = {"check", "value", "threshold", "pass"};
    for (const auto& ch : run.checks) t.add({ch.name, ch.value, ch.threshold, ch.pass});
    if (!out.empty()) {
        emit_table(t, out.size() > 5 && out.substr(out.size() - 5) == ".json" ? "json" : "csv", out);
        run.outputs.push_back(out);
    } else {
        std::cout << to_csv(t);
    }
}

// ---------------------------------------------------------------- calculus identities

void calculus_identities(Run& run, const Common& c, const std::string& spec_path, const std::string& alpha_text,
                         int order, const std::string& report) {
    const LoadedGroup g = load_group_spec(spec_path);
    run.config += read_file(spec_path);
    const GroupSpec& s = g.spec;
    const int n = s.dim();
    std::vector<std::vector<int>> alphas;
    if (!alpha_text.empty()) {
        std::vector<int> a;
        for (double v : parse_list(alpha_text)) a.push_back(static_cast<int>(v));
        if (static_cast<int>(a.size()) != n) throw InputError("--alpha must have " + std::to_string(n) + " entries");
        alphas.push_back(a);
    } else {
        for (const auto& a : multi_indices(n, order))
            if (!a.empty() && std::accumulate(a.begin(), a.end(), 0) > 0) alphas.push_back(a);
    }
    run.plan = {{"spec", s.name()}, {"alphas", alphas}, {"report", report}};
    if (c.dry_run) return;
    const auto xis = random_points(n, 6, 0.7, c.seed);
    const Expr bump = gaussian_bump(n, std::vector<double>(static_cast<std::size_t>(n), 0.1), 0.6);
    const Expr bump2 = gaussian_bump(n, std::vector<double>(static_cast<std::size_t>(n), -0.1), 0.8);
    Polynomial P(n), R(n);
    {
        std::mt19937_64 rng(c.seed + 7);
        std::uniform_int_distribution<int> deg(0, 2);
        std::uniform_real_distribution<double> co(-1.0, 1.0);
        for (int t = 0; t < 4; ++t) {
            std::vector<int> m(static_cast<std::size_t>(n)), m2(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) {
                m[static_cast<std::size_t>(k)] = deg(rng);
                m2[static_cast<std::size_t>(k)] = deg(rng);
            }
            P.add_term(mono_from(m), co(rng));
            R.add_term(mono_from(m2), co(rng));
        }
    }
    json rows = json::array();
    const Grid grid(std::vector<double>(static_cast<std::size_t>(n), 0.0), std::vector<double>(static_cast<std::size_t>(n), 3.0),
                    std::vector<int>(static_cast<std::size_t>(n), n == 1 ? 64 : 32), RuleKind::gauss);
    const Grid conv_grid(std::vector<double>(static_cast<std::size_t>(n), 0.0),
                         std::vector<double>(static_cast<std::size_t>(n), 3.0),
                         std::vector<int>(static_cast<std::size_t>(n), n == 1 ? 64 : 28), RuleKind::gauss);
    const auto etas = random_points(n, 2, 0.5, c.seed + 11);
    for (const auto& a : alphas) {
        const std::string tag = "alpha=" + mono_str(mono_from(a), n);
        const ConversionTable& t = conversion_cached(s, a);
        const double conv = conversion_monomial_residual(s, t);
        const double homd = conversion_homogeneity_defect(s, t);
        const double fl_poly = fundlink_residual(s, t, P, xis);
        const double fl_bump = fundlink_residual(s, t, bump, xis);
        const OperatorWord w = make_word(s, Side::left, a);
        const double lb_poly = leibniz_residual(w, P, R, xis);
        const double lb_bump = leibniz_residual(w, bump, bump2, xis);
        const IbpResidual ibp = integrate_by_parts_residual(s, a, bump, bump2, grid);
        const double conv_ids = convolution_identity_residuals(s, a, bump, bump2, conv_grid, etas).max();
        run.below(tag + " conversion (polynomial)", conv, 1e-9);
        run.below(tag + " conversion homogeneity", homd, 1e-9);
        run.below(tag + " fundlink (polynomial)", fl_poly, 1e-9);
        run.below(tag + " fundlink (bump)", fl_bump, 1e-4);
        run.below(tag + " leibniz (polynomial)", lb_poly, 1e-9);
        run.below(tag + " leibniz (bump)", lb_bump, 1e-4);
        run.below(tag + " integration by parts X", ibp.left, 1e-4);
        run.below(tag + " integration by parts Y", ibp.right, 1e-4);
        run.below(tag + " convolution identities", conv_ids, 1e-4);
        rows.push_back({{"alpha", a}, {"conversion", conv}, {"homogeneity", homd}, {"fundlink_poly", fl_poly},
                        {"fundlink_bump", fl_bump}, {"leibniz_poly", lb_poly}, {"leibniz_bump", lb_bump},
                        {"ibp_left", ibp.left}, {"ibp_right", ibp.right}, {"convolution", conv_ids}});
    }
    run.results = {{"rows", rows}};
    if (!report.empty()) {
        write_file(report, json({{"spec", s.name()}, {"rows", rows}}).dump(2) + "\n");
        run.outputs.push_back(report);
    }
}

// ---------------------------------------------------------------- quad irs

void quad_irs(Run& run, const Common& c, const std::string& spec_path, double r, double s, double eta_max,
              int points, const std::string& out) {
    const LoadedGroup g = load_group_spec(spec_path);
    run.config += read_file(spec_path);
    run.plan = {{"spec", g.spec.name()}, {"r", r}, {"s", s}, {"eta_max", eta_max}, {"points", points}, {"out", out}};
    if (c.dry_run) return;
    const HomogeneousNorm norm(g.spec, g.norm);
    const IrsRegime reg = irs_regime(r, s, g.spec.Q());
    run.results["regime"] = regime_name(reg);
    Table t;
    t.columns = {"eta_norm", "I", "majorant", "ratio"};
    if (reg == IrsRegime::divergent) {
        run.check("integral converges (r + s < -Q)", r + s, -g.spec.Q(), false);
    } else {
        const SphereRule sph = SphereRule::build(norm, 24);
        GroupElement dir(static_cast<std::size_t>(g.spec.dim()), 0.0);
        dir[0] = 1.0;
        double sup = 0.0;
        for (int i = 0; i < points; ++i) {
            const double rad = i == 0 ? 0.0 : eta_max * std::pow(1e-3, static_cast<double>(points - 1 - i) / (points - 1));
            const GroupElement eta = rad > 0.0 ? g.spec.dilate(rad, dir) : GroupElement(dir.size(), 0.0);
            const IrsValue v = I_rs(norm, sph, r, s, eta);
            t.add({norm(eta), v.value, v.majorant, v.ratio});
            sup = std::max(sup, v.ratio);
        }
        run.results["sup_ratio"] = sup;
        run.check("sup ratio finite", sup, 0.0, std::isfinite(sup));
    }
    if (!out.empty()) {
        emit_table(t, "csv", out);
        run.outputs.push_back(out);
    } else {
        std::cout << to_csv(t);
    }
}

// ---------------------------------------------------------------- kernel certify

void kernel_certify(Run& run, const Common& c, const std::string& spec_path, const std::string& family, double Gamma,
                    const std::string& out) {
    const LoadedGroup g = load_group_spec(spec_path);
    run.config += read_file(spec_path);
    run.plan = {{"spec", g.spec.name()}, {"family", family}, {"gamma", Gamma}, {"out", out}};
    KernelFamily fam;
    try {
        fam = parse_family(family);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    if (c.dry_run) return;
    KernelSpec k = [&] {
        try {
            return fam == KernelFamily::model_power ? KernelSpec::model_power(HomogeneousNorm(g.spec, g.norm), Gamma)
                                                    : KernelSpec::make(g.spec, fam, Gamma);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }();
    CertifyOptions opt;
    opt.seed = c.seed;
    const CertificateReport rep = certify_RGamma(k, opt);
    json est = json::array();
    for (const auto& e : rep.estimates) {
        est.push_back({{"name", e.name}, {"sup_ratio", num(e.sup_ratio)}, {"sup_ratio_doubled", num(e.sup_ratio_doubled)},
                       {"growth", num(e.growth)}, {"pass", e.pass}});
        run.check("(R_Gamma) " + e.name, e.growth, opt.max_growth, e.pass);
    }
    json res = {{"family", family_name(k.family())}, {"gamma", k.Gamma()}, {"c", k.c()}, {"mass", k.mass()},
                {"lower_constant", rep.lower_constant}, {"estimates", est}, {"pass", rep.pass}};
    if (k.family() == KernelFamily::classical_abelian) {
        const int n = g.spec.dim();
        const auto xs = random_points(n, 24, 2.0, c.seed + 3);
        const double semi = semigroup_residual(k, 0.5, 0.75, xs);
        std::vector<std::pair<GroupElement, double>> pts;
        for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], 0.3 + 0.1 * static_cast<double>(i % 7));
        const double harm = harmonicity_residual(k, pts);
        run.below("semigroup P_a * P_b = P_{a+b}", semi, 1e-3);
        run.below("harmonicity", harm, 1e-4);
        res["semigroup_residual"] = semi;
        res["harmonicity_residual"] = harm;
    }
    run.results = res;
    if (!out.empty()) {
        write_file(out, res.dump(2) + "\n");
        run.outputs.push_back(out);
    }
}

// ---------------------------------------------------------------- extend run

void extend_run(Run& run, const Common& c, const std::string& spec_path, const std::string& kernel, double Gamma,
                const std::string& dist_path, const std::string& phi_name, double phi_scale, const std::string& a_text,
                const std::string& out) {
    const LoadedGroup g = load_group_spec(spec_path);
    run.config += read_file(spec_path) + read_file(dist_path);
    const std::vector<double> as = parse_list(a_text);
    if (as.empty()) throw InputError("--a-list is empty");
    for (double a : as)
        if (!(a > 0.0)) throw InputError("--a-list entries must be positive");
    run.plan = {{"spec", g.spec.name()}, {"kernel", kernel}, {"gamma", Gamma}, {"dist", dist_path}, {"phi", phi_name},
                {"phi_scale", phi_scale}, {"a_list", as}, {"out", out}};
    KernelFamily fam;
    try {
        fam = parse_family(kernel);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    const HomogeneousNorm norm(g.spec, g.norm);
    const DistributionRep T = load_distribution(dist_path, norm);
    TestFunction phi = [&] {
        try {
            return make_test_function(g.spec, phi_name, phi_scale);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }();
    if (c.dry_run) return;
    const KernelSpec k = fam == KernelFamily::model_power ? KernelSpec::model_power(norm, Gamma)
                                                          : KernelSpec::make(g.spec, fam, Gamma);
    if (std::abs(T.mu() - (g.spec.Q() + k.Gamma())) > 1e-9)
        throw InputError("distribution mu must equal Q + Gamma for this kernel");
    const ConvergenceTable tab = boundary_convergence(T, k, phi, as);
    Table t;
    t.columns = {"a", "extended", "boundary", "error"};
    for (const auto& r : tab.rows) t.add({r.a, r.extended, r.boundary, r.error});
    run.results = {{"slope", tab.slope}, {"monotone", tab.monotone}, {"kernel_mass", tab.kernel_mass}};
    run.check("error strictly decreasing", tab.monotone ? 1.0 : 0.0, 1.0, tab.monotone);
    if (!out.empty()) {
        emit_table(t, "csv", out);
        run.outputs.push_back(out);
    } else {
        std::cout << to_csv(t);
    }
}

// ---------------------------------------------------------------- weakl1 run

json piece_json(const DyadicPiece& p) {
    return {{"i", p.i}, {"index", p.index}, {"center", p.center}, {"radius", p.radius},
            {"a_lo", p.a_lo}, {"a_hi", p.a_hi}, {"status", status_name(p.status)}};
}

json covering_json(const CoveringCertificate& cert, const CoveringReport& rep, const ProfileReport& prof) {
    json S = json::array();
    for (const auto& p : cert.S) S.push_back(piece_json(p));
    return {{"alpha", cert.alpha},
            {"gamma_kernel", cert.Gamma},
            {"i0", cert.i0},
            {"depth", cert.depth},
            {"origin", cert.origin},
            {"lattice_step", cert.lattice_step},
            {"quasi_triangle_gamma", cert.gamma},
            {"kappa_measured", cert.kappa_measured},
            {"pieces_examined", cert.pieces_examined},
            {"forbidden", cert.forbidden_count},
            {"plain", cert.plain_count},
            {"skipped_scales", cert.skipped_scales},
            {"S", S},
            {"measure_S", cert.measure_S()},
            {"verification",
             {{"superlevel", rep.superlevel},
              {"superlevel_error", rep.superlevel_error},
              {"tail_below_depth", rep.tail},
              {"C_i", num(rep.C_i)},
              {"min_U", rep.min_U},
              {"C_ii", num(rep.C_ii)},
              {"C_iii", num(rep.C_iii)},
              {"fij_ratio", rep.fij_ratio},
              {"fij_bound", rep.fij_bound},
              {"chain_constant", num(rep.chain_constant)},
              {"disjoint", rep.disjoint},
              {"vacuous", rep.vacuous},
              {"pass", rep.pass}}},
            {"profile",
             {{"C2", prof.C2}, {"C2_direct", prof.C2_direct}, {"C2_decay", prof.C2_decay},
              {"sum_max", prof.sum_max}, {"decay_points", prof.decay_points}, {"pass", prof.pass}}}};
}

void covering_checks(Run& run, const std::string& tag, const CoveringReport& rep, const ProfileReport& prof) {
    run.check(tag + "property (i)", rep.C_i, 0.0, rep.prop_i);
    run.check(tag + "property (ii)", rep.C_ii, 0.0, rep.prop_ii);
    run.check(tag + "property (iii)", rep.C_iii, 0.0, rep.prop_iii);
    run.check(tag + "forbidden-set bound", rep.fij_ratio, rep.fij_bound, rep.fij);
    run.check(tag + "chain bound", rep.superlevel, rep.chain_constant, rep.chain);
    run.check(tag + "authorized pieces disjoint", rep.disjoint ? 1.0 : 0.0, 1.0, rep.disjoint);
    run.check(tag + "U_i profile", prof.C2, 0.0, prof.pass);
}

void weakl1_run(Run& run, const Common& c, const std::string& spec_path, double Gamma, const std::string& measure_path,
                double alpha, int i0, int depth, const std::string& out) {
    const LoadedGroup g = load_group_spec(spec_path);
    run.config += read_file(spec_path) + read_file(measure_path);
    const AtomicMeasure nu = load_measure(measure_path, g.spec);
    run.plan = {{"spec", g.spec.name()}, {"gamma", Gamma}, {"measure", measure_path}, {"alpha", alpha},
                {"i0", i0}, {"depth", depth}, {"out", out}};
    if (!(alpha > 0.0)) throw InputError("--alpha must be positive");
    if (Gamma < 1.0) throw InputError("--gamma must be >= 1");
    if (c.dry_run) return;
    const HomogeneousNorm norm(g.spec, g.norm);
    CoveringCertificate cert;
    try {
        cert = build_covering(norm, nu, Gamma, alpha, i0, depth);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    VerifyOptions vo;
    vo.seed = c.seed;
    const CoveringReport rep = verify_covering(norm, cert, nu, vo);
    const ProfileReport prof = U_i_check(norm, cert);
    covering_checks(run, "", rep, prof);
    run.results = covering_json(cert, rep, prof);
    if (!out.empty()) {
        write_file(out, run.results.dump(2) + "\n");
        run.outputs.push_back(out);
    }
}

// ---------------------------------------------------------------- covering demo

void covering_demo(Run& run, const Common& c, const std::string& spec_path, double Gamma, const std::string& a_text,
                   int i0, int depth, const std::string& out) {
    LoadedGroup g{GroupSpec::abelian(1), NormVariant::even_power};
    if (!spec_path.empty()) {
        g = load_group_spec(spec_path);
        run.config += read_file(spec_path);
    }
    const std::vector<double> alphas = parse_list(a_text);
    run.plan = {{"spec", g.spec.name()}, {"gamma", Gamma}, {"alphas", alphas}, {"i0", i0}, {"depth", depth},
                {"measure", "unit atom at the identity"}, {"out", out}};
    if (c.dry_run) return;
    const HomogeneousNorm norm(g.spec, g.norm);
    AtomicMeasure nu;
    nu.atoms.push_back({GroupElement(static_cast<std::size_t>(g.spec.dim()), 0.0), 1.0});
    Table t;
    t.columns = {"alpha", "pieces", "measure_S", "superlevel", "alpha_superlevel", "C_i", "C_ii", "C_iii",
                 "chain_constant", "pass"};
    VerifyOptions vo;
    vo.seed = c.seed;
    for (double al : alphas) {
        const CoveringCertificate cert = build_covering(norm, nu, Gamma, al, i0, depth);
        const CoveringReport rep = verify_covering(norm, cert, nu, vo);
        const ProfileReport prof = U_i_check(norm, cert);
        covering_checks(run, "alpha=" + format_number(al) + " ", rep, prof);
        t.add({al, static_cast<long long>(cert.S.size()), cert.measure_S(), rep.superlevel, al * rep.superlevel, num(rep.C_i),
               num(rep.C_ii), num(rep.C_iii), num(rep.chain_constant), rep.pass});
    }
    if (!out.empty()) {
        emit_table(t, "csv", out);
        run.outputs.push_back(out);
    } else {
        std::cout << to_csv(t);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nilharmonics: harmonic analysis on homogeneous groups"};
    app.require_subcommand(1);
    Common c;
    auto common = [&](CLI::App* sub) {
        sub->add_flag("--dry-run", c.dry_run, "print the resolved plan without computing");
        sub->add_option("--threads", c.threads, "worker threads (NILH_THREADS takes precedence)");
        sub->add_option("--seed", c.seed, "seed for all randomness");
        sub->add_option("--summary", c.summary, "summary JSON path");
    };
    Run run;
    std::function<void()> action;

    std::string spec, out, report, alpha_text, family = "model_power", kernel = "model_power", dist, phi = "gaussian",
                                                  a_list = "1,0.5,0.25,0.125,0.0625,0.03125,0.015625", measure;
    double gamma = 1.0, r = -2.0, s = -2.0, eta_max = 10.0, alpha = 1.0, phi_scale = 1.0;
    int order = 3, points = 25, i0 = 2, depth = 6;
    std::size_t triples = 1000, gamma_pairs = 100000;

    auto* group = app.add_subcommand("group", "group specs");
    group->require_subcommand(1);
    auto* gc = group->add_subcommand("check", "group axioms and norm laws");
    gc->add_option("--spec", spec, "group spec JSON")->required();
    gc->add_option("--triples", triples, "random triples");
    gc->add_option("--gamma-pairs", gamma_pairs, "pairs for the quasi-triangle constant");
    gc->add_option("--out", out, "residual table (csv or json)");
    common(gc);
    gc->callback([&] {
        run.command = "group check";
        action = [&] { group_check(run, c, spec, triples, gamma_pairs, out); };
    });

    auto* calc = app.add_subcommand("calculus", "invariant calculus");
    calc->require_subcommand(1);
    auto* ci = calc->add_subcommand("identities", "conversion, fundamental link, Leibniz, integration by parts");
    ci->add_option("--spec", spec, "group spec JSON")->required();
    ci->add_option("--alpha", alpha_text, "multi-index as csv; default: all with |alpha| <= --order");
    ci->add_option("--order", order, "maximal order when --alpha is absent");
    ci->add_option("--report", report, "report JSON");
    common(ci);
    ci->callback([&] {
        run.command = "calculus identities";
        action = [&] { calculus_identities(run, c, spec, alpha_text, order, report); };
    });

    auto* quad = app.add_subcommand("quad", "quadrature");
    quad->require_subcommand(1);
    auto* qi = quad->add_subcommand("irs", "I_{r,s} against its majorant");
    qi->add_option("--spec", spec, "group spec JSON")->required();
    qi->add_option("--r", r, "exponent r");
    qi->add_option("--s", s, "exponent s");
    qi->add_option("--eta-max", eta_max, "largest |eta|");
    qi->add_option("--points", points, "number of |eta| values");
    qi->add_option("--out", out, "csv output");
    common(qi);
    qi->callback([&] {
        run.command = "quad irs";
        action = [&] { quad_irs(run, c, spec, r, s, eta_max, points, out); };
    });

    auto* ker = app.add_subcommand("kernel", "Poisson kernels");
    ker->require_subcommand(1);
    auto* kc = ker->add_subcommand("certify", "(R_Gamma) estimate sweeps");
    kc->add_option("--spec", spec, "group spec JSON")->required();
    kc->add_option("--family", family, "classical_abelian | model_power");
    kc->add_option("--gamma", gamma, "Gamma");
    kc->add_option("--out", out, "certificate JSON");
    common(kc);
    kc->callback([&] {
        run.command = "kernel certify";
        action = [&] { kernel_certify(run, c, spec, family, gamma, out); };
    });

    auto* ext = app.add_subcommand("extend", "Poisson extensions");
    ext->require_subcommand(1);
    auto* er = ext->add_subcommand("run", "boundary convergence table");
    er->add_option("--spec", spec, "group spec JSON")->required();
    er->add_option("--kernel", kernel, "classical_abelian | model_power");
    er->add_option("--gamma", gamma, "Gamma");
    er->add_option("--dist", dist, "distribution JSON")->required();
    er->add_option("--phi", phi, "test function: gaussian | bump | one | zero | decay");
    er->add_option("--phi-scale", phi_scale, "test function scale");
    er->add_option("--a-list", a_list, "a values as csv");
    er->add_option("--out", out, "csv output");
    common(er);
    er->callback([&] {
        run.command = "extend run";
        action = [&] { extend_run(run, c, spec, kernel, gamma, dist, phi, phi_scale, a_list, out); };
    });

    auto* wk = app.add_subcommand("weakl1", "weak-L1 covering");
    wk->require_subcommand(1);
    auto* wr = wk->add_subcommand("run", "covering certificate and verification");
    wr->add_option("--spec", spec, "group spec JSON")->required();
    wr->add_option("--gamma", gamma, "Gamma");
    wr->add_option("--measure", measure, "measure JSON")->required();
    wr->add_option("--alpha", alpha, "level");
    wr->add_option("--i0", i0, "scale of K_0");
    wr->add_option("--depth", depth, "deepest scale");
    wr->add_option("--out", out, "certificate JSON");
    common(wr);
    wr->callback([&] {
        run.command = "weakl1 run";
        action = [&] { weakl1_run(run, c, spec, gamma, measure, alpha, i0, depth, out); };
    });

    auto* cov = app.add_subcommand("covering", "covering experiments");
    cov->require_subcommand(1);
    std::string alphas_text = "0.05,0.1,0.2,0.4,1";
    auto* cd = cov->add_subcommand("demo", "alpha sweep for a unit atom");
    cd->add_option("--spec", spec, "group spec JSON (default: the real line)");
    cd->add_option("--gamma", gamma, "Gamma");
    cd->add_option("--alphas", alphas_text, "levels as csv");
    cd->add_option("--i0", i0, "scale of K_0");
    cd->add_option("--depth", depth, "deepest scale");
    cd->add_option("--out", out, "csv output");
    common(cd);
    cd->callback([&] {
        run.command = "covering demo";
        action = [&] { covering_demo(run, c, spec, gamma, alphas_text, i0, depth, out); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (c.threads > 0) set_thread_count(c.threads);
    if (const char* env = std::getenv("NILH_THREADS"))
        if (std::atoi(env) > 0) set_thread_count(std::atoi(env));
    std::string args;
    for (int i = 1; i < argc; ++i) args += std::string(argv[i]) + '\n';
    run.config = args;

    int status = 0;
    std::string first_failure, error;
    try {
        action();
        for (const auto& ch : run.checks)
            if (!ch.pass) {
                first_failure = ch.name;
                status = 2;
                break;
            }
    } catch (const InputError& e) {
        error = e.what();
        status = 1;
    } catch (const std::invalid_argument& e) {
        error = e.what();
        status = 1;
    } catch (const std::exception& e) {
        error = std::string("internal error: ") + e.what();
        status = 1;
    }

    const RunMetadata meta = make_metadata(run.config, c.seed, thread_count());
    json summary = {{"command", run.command},
                    {"status", status == 0 ? "pass" : (status == 2 ? "fail" : "input_error")},
                    {"exit_code", status},
                    {"dry_run", c.dry_run},
                    {"plan", run.plan},
                    {"checks", checks_json(run.checks)},
                    {"outputs", run.outputs},
                    {"metadata", json::parse(metadata_json(meta))}};
    if (!first_failure.empty()) summary["first_failure"] = first_failure;
    if (!error.empty()) summary["error"] = error;
    if (!c.dry_run && status != 1) summary["results"] = run.results;
    std::string summary_path = c.summary;
    if (summary_path.empty()) summary_path = run.outputs.empty() ? "nilharmonics_summary.json" : run.outputs.front() + ".summary.json";
    try {
        write_file(summary_path, summary.dump(2) + "\n");
    } catch (const InputError& e) {
        std::cerr << e.what() << "\n";
    }

    if (c.dry_run && status == 0) std::cout << json({{"command", run.command}, {"plan", run.plan}}).dump(2) << "\n";
    if (status == 1) std::cerr << "error: " << error << "\n";
    if (status == 2) std::cerr << "check failed: " << first_failure << "\n";
    if (status == 0 && !c.dry_run) std::cerr << run.command << ": " << run.checks.size() << " checks passed\n";
    return status;
}
