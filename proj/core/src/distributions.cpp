#include "nilharmonics/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "nilharmonics/calculus.hpp"
#include "nilharmonics/parallel.hpp"
#include "nilharmonics/rules.hpp"

namespace nilh {

namespace {

OperatorWord left_word(const GroupSpec& spec, const std::vector<int>& word) {
    OperatorWord w;
    for (int j : word) w.fields.push_back(build_field(spec, Side::left, j));
    return w;
}

OperatorWord right_word(const GroupSpec& spec, const std::vector<int>& word) {
    OperatorWord w;
    for (int j : word) w.fields.push_back(build_field(spec, Side::right, j));
    return w;
}

// sum_k d_k theta_k d/dtheta_k, homogeneous of degree zero
InvariantField euler_field(const GroupSpec& spec) {
    InvariantField e;
    e.side = Side::left;
    e.j = -1;
    const int n = spec.dim();
    for (int k = 0; k < n; ++k) {
        Polynomial p = Polynomial::variable(n, k);
        e.coeffs.push_back(p * Polynomial::constant(n, spec.weight(k)));
    }
    return e;
}

double word_degree(const GroupSpec& spec, const OperatorWord& w) {
    double s = 0.0;
    for (const auto& f : w.fields)
        if (f.j >= 0) s += spec.weight(f.j);
    return s;
}

double sign_of(std::size_t m) { return (m % 2) ? -1.0 : 1.0; }

Expr weight_expr(const HomogeneousNorm& norm, double mu) {
    return Expr::of(norm.spec().dim(), Composite(WeightFunction(norm, mu).profile(), norm.N()));
}

const SphereRule& sphere_cached(const HomogeneousNorm& norm, int per_axis) {
    static std::mutex mu;
    static std::map<std::string, SphereRule> cache;
    std::string key = norm.N().str() + "|" + std::to_string(per_axis);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, SphereRule::build(norm, per_axis)).first;
    return it->second;
}

// Flattened quadrature nodes for a term domain.
PointSet domain_points(const HomogeneousNorm& norm, const std::vector<double>& lo, const std::vector<double>& hi,
                       const GroupElement& center, int per_axis, int sphere_per_axis, int panels, int order,
                       double r_min, double r_max) {
    const auto& spec = norm.spec();
    const int n = spec.dim();
    if (!lo.empty()) {
        std::vector<double> c(static_cast<std::size_t>(n)), h(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = 0.5 * (lo[i] + hi[i]);
            h[i] = 0.5 * (hi[i] - lo[i]);
        }
        int count = n == 1 ? 8 * per_axis : per_axis;
        return Grid(c, h, std::vector<int>(static_cast<std::size_t>(n), count), RuleKind::gauss).points();
    }
    const SphereRule& sphere = sphere_cached(norm, sphere_per_axis);
    Rule1D rad = composite_gauss(panels, order, std::log(r_min), std::log(r_max));
    PointSet ps;
    ps.n = n;
    const double Q = spec.Q();
    std::vector<double> u(static_cast<std::size_t>(n)), xi(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < rad.x.size(); ++r) {
        double rr = std::exp(rad.x[r]);
        double wr = rad.w[r] * std::pow(rr, Q);
        for (std::size_t i = 0; i < sphere.pts.size(); ++i) {
            spec.dilate_into(rr, sphere.pts.point(i), u.data());
            spec.multiply_into(center.data(), u.data(), xi.data());
            ps.x.insert(ps.x.end(), xi.begin(), xi.end());
            ps.w.push_back(wr * sphere.pts.w[i]);
        }
    }
    return ps;
}

PointSet term_points(const HomogeneousNorm& norm, const DistributionTerm& t, const GroupElement& center,
                     const QuadOptions& q) {
    return domain_points(norm, t.support_lo, t.support_hi, center, q.per_axis, q.sphere_per_axis, q.radial_panels,
                         q.radial_order, q.r_min, q.r_max);
}

double weighted_sum(const PointSet& pts, const std::function<double(const double*)>& f) {
    return parallel_sum(pts.size(), [&](std::size_t i) {
        double w = pts.w[i];
        return w == 0.0 ? 0.0 : w * f(pts.point(i));
    });
}

// a^{-Q-d} D(delta_{1/a} z), optionally with (a d_a) applied.
class KernelWord {
public:
    KernelWord(const KernelSpec& k, const OperatorWord& w, bool a_deriv)
        : spec_(&k.spec()), Q_(k.Q()), d_(word_degree(k.spec(), w)), a_deriv_(a_deriv),
          D_(std::make_shared<DerivedExpr>(k.expr(), w)) {
        if (a_deriv) {
            OperatorWord ew;
            ew.fields.push_back(euler_field(k.spec()));
            ew.fields.insert(ew.fields.end(), w.fields.begin(), w.fields.end());
            ED_ = std::make_shared<DerivedExpr>(k.expr(), ew);
        }
    }
    double operator()(double a, const double* z) const {
        double y[kMaxDim];
        spec_->dilate_into(1.0 / a, z, y);
        double s = std::pow(a, -Q_ - d_);
        if (!a_deriv_) return s * (*D_)(y);
        return s * (-(Q_ + d_) * (*D_)(y) - (*ED_)(y));
    }

private:
    const GroupSpec* spec_;
    double Q_, d_;
    bool a_deriv_;
    std::shared_ptr<DerivedExpr> D_, ED_;
};

void check_gamma(const DistributionRep& T, const KernelSpec& k) {
    if (std::abs(T.mu() - (k.Q() + k.Gamma())) > 1e-9)
        throw std::invalid_argument("distribution weight mu = " + std::to_string(T.mu()) +
                                    " does not match Q + Gamma = " + std::to_string(k.Q() + k.Gamma()));
    if (T.spec().dim() != k.spec().dim()) throw std::invalid_argument("distribution and kernel live on different groups");
}

// sum over terms of (-1)^m int g(xi) Xtilde^W[(omega) K(eta^{-1} xi)] d xi with K = suffix-derived kernel;
// built once and evaluated at many (a, eta).
class Extender {
public:
    Extender(const DistributionRep& T, const KernelSpec& k, const OperatorWord& suffix, double suffix_sign,
             bool a_deriv, const QuadOptions& q)
        : T_(&T), q_(q), sign_(suffix_sign) {
        check_gamma(T, k);
        const auto& spec = T.spec();
        Expr om = weight_expr(T.norm(), T.mu());
        GroupElement origin(static_cast<std::size_t>(spec.dim()), 0.0);
        for (const auto& t : T.terms()) {
            OperatorWord wt = left_word(spec, t.word).reversed();
            const std::size_t m = wt.length();
            Term tm;
            tm.t = &t;
            tm.sign = sign_of(m);
            if (!t.weighted) {
                OperatorWord full = wt;
                full.fields.insert(full.fields.end(), suffix.fields.begin(), suffix.fields.end());
                tm.parts.emplace_back(nullptr, KernelWord(k, full, a_deriv));
            } else {
                for (unsigned mask = 0; mask < (1u << m); ++mask) {
                    OperatorWord kw = wt.sub(~mask & ((1u << m) - 1));
                    kw.fields.insert(kw.fields.end(), suffix.fields.begin(), suffix.fields.end());
                    tm.parts.emplace_back(std::make_shared<DerivedExpr>(om, wt.sub(mask)), KernelWord(k, kw, a_deriv));
                }
            }
            if (!t.support_lo.empty()) {
                tm.pts = term_points(T.norm(), t, origin, q);
                // density and weight factors do not depend on (a, eta)
                for (std::size_t i = 0; i < tm.pts.size(); ++i) {
                    const double* xi = tm.pts.point(i);
                    double gv = tm.pts.w[i] * t.g(xi);
                    if (gv == 0.0) continue;
                    tm.keep.push_back(i);
                    tm.gw.push_back(gv);
                    for (const auto& pr : tm.parts) tm.wf.push_back(pr.first ? (*pr.first)(xi) : 1.0);
                }
            }
            terms_.push_back(std::move(tm));
        }
    }

    double operator()(double a, const GroupElement& eta) const {
        if (!(a > 0.0)) throw std::invalid_argument("Poisson extension needs a > 0");
        const auto& spec = T_->spec();
        GroupElement neg(eta.size());
        for (std::size_t i = 0; i < eta.size(); ++i) neg[i] = -eta[i];
        double total = 0.0;
        for (const auto& tm : terms_) {
            const std::size_t np = tm.parts.size();
            double v;
            if (!tm.t->support_lo.empty()) {
                v = parallel_sum(tm.keep.size(), [&](std::size_t c) {
                    const double* xi = tm.pts.point(tm.keep[c]);
                    double z[kMaxDim];
                    spec.multiply_into(neg.data(), xi, z);
                    double s = 0.0;
                    for (std::size_t p = 0; p < np; ++p) s += tm.wf[c * np + p] * tm.parts[p].second(a, z);
                    return tm.gw[c] * s;
                });
            } else {
                PointSet pts = term_points(T_->norm(), *tm.t, eta, q_);
                v = weighted_sum(pts, [&](const double* xi) {
                    double gv = tm.t->g(xi);
                    if (gv == 0.0) return 0.0;
                    double z[kMaxDim];
                    spec.multiply_into(neg.data(), xi, z);
                    double s = 0.0;
                    for (const auto& [dw, kw] : tm.parts) s += (dw ? (*dw)(xi) : 1.0) * kw(a, z);
                    return gv * s;
                });
            }
            total += tm.sign * v;
        }
        return sign_ * total;
    }

private:
    struct Term {
        const DistributionTerm* t = nullptr;
        double sign = 1.0;
        std::vector<std::pair<std::shared_ptr<DerivedExpr>, KernelWord>> parts;
        PointSet pts;
        std::vector<std::size_t> keep;
        std::vector<double> gw, wf;
    };
    const DistributionRep* T_;
    QuadOptions q_;
    double sign_;
    std::vector<Term> terms_;
};

// derivative of a term density: symbolic when the density is an Expr, else finite differences
ScalarFn density_derivative(const GroupSpec& spec, const DistributionTerm& t, const OperatorWord& w) {
    if (w.length() == 0) return t.g;
    const int n = spec.dim();
    if (t.expr) {
        auto d = std::make_shared<DerivedExpr>(*t.expr, w);
        return [d](const double* x) { return (*d)(x); };
    }
    ScalarFn g = t.g;
    return [w, g, n](const double* x) { return apply_word_fd(w, g, x, n, default_fd_step(x, n)); };
}

// W f by nested second-order central differences; cheap enough for integrands that are themselves quadratures
double fd_word(const OperatorWord& w, std::size_t pos, const ScalarFn& f, const double* x, int n, double h) {
    if (pos == w.length()) return f(x);
    const auto& field = w.fields[pos];
    double s = 0.0, y[kMaxDim];
    for (int k = 0; k < n; ++k) {
        double c = field.coeff_at(k, x);
        if (c == 0.0) continue;
        std::copy(x, x + n, y);
        y[k] = x[k] + h;
        double up = fd_word(w, pos + 1, f, y, n, h);
        y[k] = x[k] - h;
        double dn = fd_word(w, pos + 1, f, y, n, h);
        s += c * (up - dn) / (2.0 * h);
    }
    return s;
}

std::vector<GroupElement> sweep_points(const HomogeneousNorm& norm, int directions, double r_lo, double r_hi,
                                       int per_decade, std::uint64_t seed) {
    const auto& spec = norm.spec();
    const int n = spec.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<GroupElement> dirs;
    while (static_cast<int>(dirs.size()) < directions) {
        GroupElement t(static_cast<std::size_t>(n));
        for (auto& v : t) v = U(rng);
        double r = norm(t);
        if (r < 1e-3) continue;
        dirs.push_back(spec.dilate(1.0 / r, t));
    }
    std::vector<GroupElement> pts;
    pts.push_back(GroupElement(static_cast<std::size_t>(n), 0.0));
    double step = std::log(10.0) / per_decade;
    for (int i = 0;; ++i) {
        double r = r_lo * std::exp(step * i);
        if (r > r_hi * (1.0 + 1e-12)) break;
        for (const auto& d : dirs) pts.push_back(spec.dilate(r, d));
    }
    return pts;
}

}  // namespace

std::vector<int> word_from_alpha(const std::vector<int>& alpha) {
    std::vector<int> w;
    for (std::size_t j = 0; j < alpha.size(); ++j)
        for (int r = 0; r < alpha[j]; ++r) w.push_back(static_cast<int>(j));
    return w;
}

DistributionTerm make_term(const HomogeneousNorm& norm, const std::vector<int>& alpha, const DensityParams& p,
                           bool weighted) {
    const auto& spec = norm.spec();
    const int n = spec.dim();
    if (static_cast<int>(alpha.size()) != n) throw std::invalid_argument("multi-index length does not match the group");
    DistributionTerm t;
    t.word = word_from_alpha(alpha);
    if (t.word.size() > 3) throw std::invalid_argument("derivative order above 3 is not supported");
    t.weighted = weighted;
    std::vector<double> c = p.center.empty() ? std::vector<double>(static_cast<std::size_t>(n), 0.0) : p.center;
    if (static_cast<int>(c.size()) != n) throw std::invalid_argument("density center has the wrong dimension");
    if (p.kind == "gaussian" || p.kind == "bump" || p.kind == "identity") {
        if (!(p.scale > 0.0)) throw std::invalid_argument("density scale must be positive");
        double reach = p.kind == "gaussian" ? 4.0 * p.scale : p.scale;
        if (p.kind == "gaussian") {
            t.expr = gaussian_bump(n, c, p.scale, p.amplitude);
        } else if (p.kind == "bump") {
            t.expr = compact_bump(n, c, p.scale, p.amplitude);
        } else {
            // bump of unit Lebesgue mass
            const Expr unit = compact_bump(n, c, p.scale, 1.0);
            const PointSet pts = Grid(c, std::vector<double>(static_cast<std::size_t>(n), p.scale),
                                      std::vector<int>(static_cast<std::size_t>(n), n == 1 ? 256 : 48), RuleKind::gauss)
                                     .points();
            const double mass = weighted_sum(pts, [&](const double* x) { return unit(x); });
            t.expr = compact_bump(n, c, p.scale, p.amplitude / mass);
        }
        for (int i = 0; i < n; ++i) {
            t.support_lo.push_back(c[static_cast<std::size_t>(i)] - reach);
            t.support_hi.push_back(c[static_cast<std::size_t>(i)] + reach);
        }
    } else if (p.kind == "power") {
        if (!(p.eps > 0.0)) throw std::invalid_argument("power density needs eps > 0");
        t.expr = weight_expr(norm, -spec.Q() - p.eps);
        t.expr->scale *= p.amplitude;
    } else {
        throw std::invalid_argument("unknown density kind '" + p.kind + "'");
    }
    Expr e = *t.expr;
    t.g = [e](const double* x) { return e(x); };
    std::string w;
    for (int j : t.word) w += std::to_string(j + 1);
    t.label = std::string(weighted ? "omega*" : "") + (w.empty() ? "" : "X[" + w + "]") + p.kind;
    return t;
}

DistributionRep::DistributionRep(HomogeneousNorm norm, double mu, std::vector<DistributionTerm> terms)
    : norm_(std::move(norm)), mu_(mu), terms_(std::move(terms)) {
    const int n = norm_.spec().dim();
    QuadOptions q;
    for (const auto& t : terms_) {
        for (int j : t.word)
            if (j < 0 || j >= n) throw std::invalid_argument("derivative index out of range");
        if (!t.g) throw std::invalid_argument("distribution term without density");
        WeightFunction w(norm_, -mu_);
        GroupElement origin(static_cast<std::size_t>(n), 0.0);
        PointSet pts = term_points(norm_, t, origin, q);
        double v = weighted_sum(pts, [&](const double* x) {
            return std::abs(t.g(x)) * (t.weighted ? 1.0 : w(x));
        });
        if (!std::isfinite(v)) throw std::domain_error("density is not in the weighted L1 space");
        norms_.push_back(v);
    }
}

bool DistributionRep::compact() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return !t.support_lo.empty(); });
}

int DistributionRep::max_order() const {
    std::size_t m = 0;
    for (const auto& t : terms_) m = std::max(m, t.word.size());
    return static_cast<int>(m);
}

namespace {

// b X^W g = sum_S (-1)^{|S^c|} X^{W_S}[(reversed W_{S^c} b) g]
std::vector<DistributionTerm> multiply_term(const GroupSpec& spec, const DistributionTerm& t, const Expr& b) {
    std::vector<DistributionTerm> out;
    const std::size_t m = t.word.size();
    OperatorWord w = left_word(spec, t.word);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        DistributionTerm r;
        r.support_lo = t.support_lo;
        r.support_hi = t.support_hi;
        unsigned comp = ~mask & ((1u << m) - 1);
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) r.word.push_back(t.word[i]);
        OperatorWord bw = w.sub(comp).reversed();
        ScalarFn g = t.g;
        double sgn = sign_of(m - r.word.size());
        if (bw.length() == 0 && t.expr) {
            r.expr = b.times(*t.expr);
            r.expr->scale *= sgn;
            Expr e = *r.expr;
            r.g = [e](const double* x) { return e(x); };
        } else {
            auto db = std::make_shared<DerivedExpr>(b, bw);
            r.g = [db, g, sgn](const double* x) { return sgn * (*db)(x) * g(x); };
        }
        r.label = t.label + "|split" + std::to_string(mask);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

DistributionRep DistributionRep::derivative(const std::vector<int>& word) const {
    DistributionRep base = normal_form();
    std::vector<DistributionTerm> terms;
    for (auto t : base.terms_) {
        t.word.insert(t.word.begin(), word.begin(), word.end());
        if (t.word.size() > 6) throw std::invalid_argument("derivative order too large");
        terms.push_back(std::move(t));
    }
    return DistributionRep(norm_, mu_, std::move(terms));
}

DistributionRep DistributionRep::multiply(const Expr& b) const {
    DistributionRep base = normal_form();
    std::vector<DistributionTerm> terms;
    for (const auto& t : base.terms_) {
        auto s = multiply_term(spec(), t, b);
        terms.insert(terms.end(), s.begin(), s.end());
    }
    return DistributionRep(norm_, mu_, std::move(terms));
}

DistributionRep DistributionRep::normal_form() const {
    Expr om = weight_expr(norm_, mu_);
    std::vector<DistributionTerm> terms;
    for (const auto& t : terms_) {
        if (!t.weighted) {
            terms.push_back(t);
            continue;
        }
        DistributionTerm u = t;
        u.weighted = false;
        auto s = multiply_term(spec(), u, om);
        terms.insert(terms.end(), s.begin(), s.end());
    }
    return DistributionRep(norm_, mu_, std::move(terms));
}

std::string decay_name(DecayClass c) {
    switch (c) {
        case DecayClass::schwartz: return "schwartz";
        case DecayClass::bounded: return "bounded";
        case DecayClass::vanishing: return "vanishing";
    }
    return "?";
}

TestFunction make_test_function(const GroupSpec& spec, const std::string& name, double s) {
    const int n = spec.dim();
    TestFunction t;
    t.name = name;
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    if (name == "gaussian") {
        t.phi = gaussian_bump(n, c, s);
        t.tag = DecayClass::schwartz;
        t.support_lo.assign(static_cast<std::size_t>(n), -4.0 * s);
        t.support_hi.assign(static_cast<std::size_t>(n), 4.0 * s);
    } else if (name == "bump") {
        t.phi = compact_bump(n, c, s);
        t.tag = DecayClass::schwartz;
        t.support_lo.assign(static_cast<std::size_t>(n), -s);
        t.support_hi.assign(static_cast<std::size_t>(n), s);
    } else if (name == "one" || name == "zero") {
        t.phi = Expr::of(n, Composite::poly(Polynomial::constant(n, name == "one" ? 1.0 : 0.0)));
        t.tag = DecayClass::bounded;
    } else if (name == "decay") {
        t.phi = weight_expr(HomogeneousNorm(spec), -1.0);
        t.tag = DecayClass::vanishing;
    } else {
        throw std::invalid_argument("unknown test function '" + name + "'");
    }
    return t;
}

TagReport verify_tag(const HomogeneousNorm& norm, const TestFunction& phi, double radius) {
    const auto& spec = norm.spec();
    auto base = sweep_points(norm, 16, 1e-2, radius, 6, 3);
    auto wide = sweep_points(norm, 16, 1e-2, 2.0 * radius, 6, 3);
    std::vector<DerivedExpr> ds;
    for (const auto& al : multi_indices(spec.dim(), 2)) ds.emplace_back(phi.phi, make_word(spec, Side::left, al));
    auto sup_over = [&](const std::vector<GroupElement>& pts) {
        double s = 0.0;
        for (const auto& p : pts)
            for (const auto& d : ds) s = std::max(s, std::abs(d(p.data())));
        return s;
    };
    auto shell = [&](const std::vector<GroupElement>& pts, double lo) {
        double s = 0.0;
        for (const auto& p : pts)
            if (norm(p) >= lo) s = std::max(s, std::abs(phi(p.data())));
        return s;
    };
    TagReport r;
    r.sup = sup_over(base);
    double sup2 = sup_over(wide);
    bool bounded = std::isfinite(sup2) && sup2 <= r.sup * 1.05 + 1e-300;
    r.tail = shell(wide, radius);
    double inner = shell(base, 0.5 * radius);
    if (phi.tag == DecayClass::bounded) {
        r.pass = bounded;
    } else {
        r.pass = bounded && r.tail <= inner && (r.sup == 0.0 || r.tail <= 0.1 * r.sup);
    }
    return r;
}

double integrate_term_domain(const HomogeneousNorm& norm, const std::vector<double>& lo,
                             const std::vector<double>& hi, const ScalarFn& f, const GroupElement& center,
                             const QuadOptions& q) {
    PointSet pts = domain_points(norm, lo, hi, center, q.per_axis, q.sphere_per_axis, q.radial_panels,
                                 q.radial_order, q.r_min, q.r_max);
    return weighted_sum(pts, f);
}

double pair(const DistributionRep& T, const Expr& phi, const QuadOptions& q) {
    const auto& spec = T.spec();
    Expr om = weight_expr(T.norm(), T.mu());
    GroupElement origin(static_cast<std::size_t>(spec.dim()), 0.0);
    double total = 0.0;
    for (const auto& t : T.terms()) {
        OperatorWord wt = left_word(spec, t.word).reversed();
        DerivedExpr d(t.weighted ? om.times(phi) : phi, wt);
        PointSet pts = term_points(T.norm(), t, origin, q);
        double v = weighted_sum(pts, [&](const double* x) { return t.g(x) * d(x); });
        if (!std::isfinite(v)) throw std::domain_error("pairing integral diverges");
        total += sign_of(wt.length()) * v;
    }
    return total;
}

Regularized regularize(const DistributionRep& T, const TestFunction& phi, const Grid& grid, const QuadOptions& q) {
    if (phi.support_lo.empty()) throw std::invalid_argument("regularization needs a compactly supported test function");
    const auto& spec = T.spec();
    const int n = spec.dim();
    // phi^vee(x) = phi(x^{-1}) = phi(-x)
    Expr check = phi.phi;
    for (auto& f : check.factors) f = Composite(f.F, spec.compose_inverse(f.P));
    Expr om = weight_expr(T.norm(), T.mu());
    struct Part {
        const DistributionTerm* t;
        std::vector<std::pair<std::shared_ptr<DerivedExpr>, std::shared_ptr<DerivedExpr>>> d;
        double sign;
    };
    auto parts = std::make_shared<std::vector<Part>>();
    for (const auto& t : T.terms()) {
        OperatorWord wt = left_word(spec, t.word).reversed();
        const std::size_t m = wt.length();
        Part p{&t, {}, sign_of(m)};
        if (!t.weighted) {
            p.d.emplace_back(nullptr, std::make_shared<DerivedExpr>(check, wt));
        } else {
            for (unsigned mask = 0; mask < (1u << m); ++mask)
                p.d.emplace_back(std::make_shared<DerivedExpr>(om, wt.sub(mask)),
                                 std::make_shared<DerivedExpr>(check, wt.sub(~mask & ((1u << m) - 1))));
        }
        parts->push_back(std::move(p));
    }
    auto Tp = std::make_shared<DistributionRep>(T);
    Regularized r;
    r.f.f = [Tp, parts, q, n](const double* eta) {
        const auto& sp = Tp->spec();
        GroupElement e(eta, eta + n), neg(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) neg[static_cast<std::size_t>(i)] = -eta[i];
        double total = 0.0;
        for (const auto& p : *parts) {
            PointSet pts = term_points(Tp->norm(), *p.t, e, q);
            double v = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double* xi = pts.point(i);
                double gv = p.t->g(xi);
                if (gv == 0.0) continue;
                double z[kMaxDim];
                sp.multiply_into(neg.data(), xi, z);
                double s = 0.0;
                for (const auto& [dw, dk] : p.d) s += (dw ? (*dw)(xi) : 1.0) * (*dk)(z);
                v += pts.w[i] * gv * s;
            }
            total += p.sign * v;
        }
        return total;
    };
    r.f.smoothness = "smooth";
    PointSet gp = grid.points();
    r.l1 = weighted_sum(gp, [&](const double* x) { return std::abs(r.f.f(x)); });
    return r;
}

double poisson_extend(const DistributionRep& T, const KernelSpec& k, double a, const GroupElement& eta,
                      const QuadOptions& q) {
    return Extender(T, k, OperatorWord{}, 1.0, false, q)(a, eta);
}

double poisson_extend_derivative(const DistributionRep& T, const KernelSpec& k, double a,
                                 const std::vector<int>& iota, const GroupElement& eta, const QuadOptions& q) {
    std::vector<int> w = word_from_alpha(iota);
    return Extender(T, k, right_word(T.spec(), w), sign_of(w.size()), false, q)(a, eta);
}

double poisson_extend_a_derivative(const DistributionRep& T, const KernelSpec& k, double a, const GroupElement& eta,
                                   const QuadOptions& q) {
    return Extender(T, k, OperatorWord{}, 1.0, true, q)(a, eta);
}

double TwoPath::rel_diff() const {
    double s = std::max(std::abs(definition), std::abs(function));
    return s == 0.0 ? 0.0 : std::abs(definition - function) / s;
}

TwoPath lemma42_two_path(const DistributionRep& T, const KernelSpec& k, const TestFunction& phi, double a,
                         const QuadOptions& q) {
    check_gamma(T, k);
    if (phi.support_lo.empty()) throw std::invalid_argument("two-path check needs a test function with bounded support");
    const auto& spec = T.spec();
    const int n = spec.dim();
    GroupElement origin(static_cast<std::size_t>(n), 0.0);
    TwoPath r;

    // definition: <T, phi * P_a^vee>, the convolution sampled and differentiated numerically
    QuadOptions qa = q;
    qa.per_axis = q.per_axis + 2;
    PointSet phi_pts = domain_points(T.norm(), phi.support_lo, phi.support_hi, origin, qa.per_axis, 0, 0, 0, 1, 1);
    std::vector<double> inv_nodes, phi_w;
    for (std::size_t i = 0; i < phi_pts.size(); ++i) {
        const double* zeta = phi_pts.point(i);
        double v = phi_pts.w[i] * phi(zeta);
        if (v == 0.0) continue;
        for (int d = 0; d < n; ++d) inv_nodes.push_back(-zeta[d]);
        phi_w.push_back(v);
    }
    const double pre = std::pow(a, -k.Q()) * k.c(), scale = std::pow(a, -T.norm().root());
    const double expo = -(k.Q() + k.Gamma()) / T.norm().root();
    const CompiledPoly& N = T.norm().N_compiled();
    ScalarFn conv = [&](const double* xi) {
        double s = 0.0, z[kMaxDim];
        for (std::size_t i = 0; i < phi_w.size(); ++i) {
            spec.multiply_into(&inv_nodes[i * static_cast<std::size_t>(n)], xi, z);
            s += phi_w[i] * std::pow(1.0 + scale * N(z), expo);
        }
        return pre * s;
    };
    WeightFunction om(T.norm(), T.mu());
    for (const auto& t : T.terms()) {
        OperatorWord wt = left_word(spec, t.word).reversed();
        ScalarFn target = conv;
        if (t.weighted) target = [&](const double* xi) { return om(xi) * conv(xi); };
        PointSet pts = term_points(T.norm(), t, origin, q);
        double v = weighted_sum(pts, [&](const double* xi) {
            double gv = t.g(xi);
            if (gv == 0.0) return 0.0;
            return gv * fd_word(wt, 0, target, xi, n, 1e-3);
        });
        r.definition += sign_of(wt.length()) * v;
    }

    // function formula integrated against phi
    PointSet outer = domain_points(T.norm(), phi.support_lo, phi.support_hi, origin, q.per_axis, 0, 0, 0, 1, 1);
    Extender ext(T, k, OperatorWord{}, 1.0, false, q);
    double f = 0.0;
    for (std::size_t i = 0; i < outer.size(); ++i) {
        const double* eta = outer.point(i);
        double pv = phi(eta);
        if (pv == 0.0) continue;
        f += outer.w[i] * pv * ext(a, GroupElement(eta, eta + n));
    }
    r.function = f;
    return r;
}

WitnessReport sconvolvability_witness(const DistributionRep& T, const KernelSpec& k, const TestFunction& phi,
                                      double a, double radius, const QuadOptions& q) {
    check_gamma(T, k);
    const auto& spec = T.spec();
    const int n = spec.dim();
    auto base = sweep_points(T.norm(), 12, 1e-2, radius, 5, 5);
    auto wide = sweep_points(T.norm(), 12, 1e-2, 2.0 * radius, 5, 5);
    const std::size_t nb = base.size();

    // subwords of every X^alpha with |alpha| <= 2
    std::map<std::vector<int>, std::size_t> index;
    std::vector<KernelWord> kws;
    auto words = multi_indices(n, 2);
    for (const auto& al : words) {
        auto w = word_from_alpha(al);
        for (unsigned mask = 0; mask < (1u << w.size()); ++mask) {
            std::vector<int> s;
            for (std::size_t i = 0; i < w.size(); ++i)
                if (mask & (1u << i)) s.push_back(w[i]);
            if (!index.count(s)) {
                index[s] = kws.size();
                kws.emplace_back(k, left_word(spec, s), false);
            }
        }
    }
    Expr om = weight_expr(T.norm(), T.mu());
    const double Qg = k.Q() + k.Gamma();

    std::vector<double> bounded(wide.size(), 0.0), lower(wide.size(), 0.0);
    parallel_for(wide.size(), [&](std::size_t p) {
        const GroupElement& eta = wide[p];
        GroupElement neg(eta.size());
        for (std::size_t i = 0; i < eta.size(); ++i) neg[i] = -eta[i];
        std::vector<double> conv(kws.size(), 0.0);
        PointSet pts = domain_points(T.norm(), phi.support_lo, phi.support_hi, eta, q.per_axis,
                                     q.outer_sphere_per_axis, q.radial_panels, q.radial_order, q.r_min, q.r_max);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double* zeta = pts.point(i);
            double pv = phi(zeta);
            if (pv == 0.0) continue;
            // (X_S (phi * P_a))(eta) = int phi(zeta) (X_S P_a)(zeta^{-1} eta)
            double z[kMaxDim], inv[kMaxDim];
            for (int d = 0; d < n; ++d) inv[d] = -zeta[d];
            spec.multiply_into(inv, eta.data(), z);
            for (std::size_t w = 0; w < kws.size(); ++w) conv[w] += pts.w[i] * pv * kws[w](a, z);
        }
        double sup = 0.0;
        for (const auto& al : words) {
            auto w = word_from_alpha(al);
            OperatorWord lw = left_word(spec, w);
            double s = 0.0;
            for (unsigned mask = 0; mask < (1u << w.size()); ++mask) {
                std::vector<int> sub;
                for (std::size_t i = 0; i < w.size(); ++i)
                    if (mask & (1u << i)) sub.push_back(w[i]);
                DerivedExpr dom(om, lw.sub(~mask & ((1u << w.size()) - 1)));
                s += conv[index[sub]] * dom(eta.data());
            }
            sup = std::max(sup, std::abs(s));
        }
        bounded[p] = sup;
        lower[p] = conv[index[{}]] / WeightFunction::of_radius(T.norm()(eta), -Qg);
    });
    (void)nb;
    // wide starts with the base sweep (same directions and radii)
    double b1 = 0.0, b2 = 0.0, l1 = INFINITY, l2 = INFINITY;
    for (std::size_t i = 0; i < wide.size(); ++i) {
        bool in_base = T.norm()(wide[i]) <= radius * (1.0 + 1e-12);
        if (in_base) {
            b1 = std::max(b1, bounded[i]);
            l1 = std::min(l1, lower[i]);
        }
        b2 = std::max(b2, bounded[i]);
        l2 = std::min(l2, lower[i]);
    }
    WitnessReport r;
    r.bounded_sup = b2;
    r.bounded_growth = b1 > 0.0 ? b2 / b1 - 1.0 : 0.0;
    r.lower_constant = l2;
    r.lower_growth = l2 > 0.0 ? l1 / l2 - 1.0 : 0.0;
    bool finite = std::isfinite(b2) && std::isfinite(l2);
    r.bounded_pass = finite && r.bounded_growth < 0.05;
    r.lower_pass = finite && l2 > 0.0 && r.lower_growth < 0.05;
    if (!finite || (l2 > 0.0 && !r.lower_pass) || !r.bounded_pass)
        r.status = "inconclusive";
    else
        r.status = r.lower_pass ? "pass" : "fail";
    return r;
}

WeightedNormReport extension_weighted_norm(const DistributionRep& T, const KernelSpec& k, double a,
                                           const std::vector<int>& iota, double radius, const QuadOptions& q) {
    check_gamma(T, k);
    if (word_from_alpha(iota).size() > 2) throw std::invalid_argument("weighted norm supports |iota| <= 2");
    const auto& spec = T.spec();
    const double Q = spec.Q(), Qg = k.Q() + k.Gamma();
    const SphereRule& sphere = sphere_cached(T.norm(), q.outer_sphere_per_axis);
    Rule1D inner = composite_gauss(q.outer_panels, q.outer_order, std::log(1e-3), std::log(radius));
    Rule1D shell = composite_gauss(2, q.outer_order, radius, 2.0 * radius);
    struct Node {
        GroupElement eta;
        double w;
        bool base;
    };
    std::vector<Node> nodes;
    auto add = [&](double r, double wr, bool base) {
        for (std::size_t i = 0; i < sphere.pts.size(); ++i) {
            GroupElement s(sphere.pts.point(i), sphere.pts.point(i) + spec.dim());
            nodes.push_back({spec.dilate(r, s), wr * sphere.pts.w[i] * WeightFunction::of_radius(r, -Qg), base});
        }
    };
    for (std::size_t i = 0; i < inner.x.size(); ++i) {
        double r = std::exp(inner.x[i]);
        add(r, inner.w[i] * std::pow(r, Q), true);
    }
    for (std::size_t i = 0; i < shell.x.size(); ++i) add(shell.x[i], shell.w[i] * std::pow(shell.x[i], Q - 1.0), false);
    std::vector<int> w = word_from_alpha(iota);
    Extender ext(T, k, right_word(spec, w), sign_of(w.size()), false, q);
    std::vector<double> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = std::abs(ext(a, nodes[i].eta));
    WeightedNormReport r;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double v = nodes[i].w * vals[i];
        if (nodes[i].base) r.value += v;
        r.value_doubled += v;
    }
    r.growth = r.value > 0.0 ? r.value_doubled / r.value - 1.0 : 0.0;
    r.pass = std::isfinite(r.value_doubled) && r.growth < 0.05;
    return r;
}

ConvergenceTable boundary_convergence(const DistributionRep& T, const KernelSpec& k, const TestFunction& phi,
                                      const std::vector<double>& a_list, const QuadOptions& q) {
    check_gamma(T, k);
    if (!T.compact()) throw std::invalid_argument("boundary convergence needs compactly supported densities");
    if (a_list.empty()) throw std::invalid_argument("empty a list");
    for (std::size_t i = 1; i < a_list.size(); ++i)
        if (!(a_list[i] < a_list[i - 1])) throw std::invalid_argument("a list must be decreasing");
    const auto& spec = T.spec();
    const int n = spec.dim();
    const double Q = spec.Q(), Qg = k.Q() + k.Gamma();
    ConvergenceTable tab;
    tab.kernel_mass = k.mass();

    // G = sum (omega_mu) X^W g as plain samples on the union of term grids
    WeightFunction om(T.norm(), T.mu());
    PointSet gp;
    gp.n = n;
    std::vector<double> gv;
    GroupElement origin(static_cast<std::size_t>(n), 0.0);
    for (const auto& t : T.terms()) {
        ScalarFn dg = density_derivative(spec, t, left_word(spec, t.word));
        PointSet pts = term_points(T.norm(), t, origin, q);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double* x = pts.point(i);
            double v = pts.w[i] * dg(x) * (t.weighted ? om(x) : 1.0);
            if (std::abs(v) < 1e-300) continue;
            gp.x.insert(gp.x.end(), x, x + n);
            gv.push_back(v);
        }
    }
    double gmax = 0.0;
    for (double v : gv) gmax = std::max(gmax, std::abs(v));
    {
        PointSet kept;
        kept.n = n;
        std::vector<double> kv;
        for (std::size_t i = 0; i < gv.size(); ++i)
            if (std::abs(gv[i]) > 1e-15 * gmax) {
                kept.x.insert(kept.x.end(), gp.point(i), gp.point(i) + n);
                kv.push_back(gv[i]);
            }
        gp = std::move(kept);
        gv = std::move(kv);
    }
    WeightFunction wpsi(T.norm(), -Qg);
    auto psi = [&](const double* x) { return wpsi(x) * phi(x); };
    // K(u) = int G(xi) psi(xi u)
    auto K = [&](const double* u) {
        double s = 0.0, y[kMaxDim];
        for (std::size_t i = 0; i < gv.size(); ++i) {
            spec.multiply_into(gp.point(i), u, y);
            s += gv[i] * psi(y);
        }
        return s;
    };
    const double K0 = K(origin.data());

    const SphereRule& sphere = sphere_cached(T.norm(), q.outer_sphere_per_axis + 2);
    double amin = a_list.back(), amax = a_list.front();
    double lo = std::log(1e-4 * amin), hi = std::log(1e5 * amax);
    int panels = static_cast<int>(std::ceil((hi - lo) / std::log(10.0)));
    Rule1D rad = composite_gauss(panels, 8, lo, hi);
    // angular averages of K(delta_r s) - K(0) at each radial node
    std::vector<double> avg(rad.x.size());
    parallel_for(rad.x.size(), [&](std::size_t r) {
        double rr = std::exp(rad.x[r]);
        double s = 0.0, u[kMaxDim];
        for (std::size_t i = 0; i < sphere.pts.size(); ++i) {
            spec.dilate_into(rr, sphere.pts.point(i), u);
            s += sphere.pts.w[i] * (K(u) - K0);
        }
        avg[r] = s;
    });
    const double P0 = k.c();
    const double expo = -Qg / T.norm().root();
    for (double a : a_list) {
        double e = 0.0;
        for (std::size_t r = 0; r < rad.x.size(); ++r) {
            double rr = std::exp(rad.x[r]);
            double ker = std::pow(a, -Q) * P0 * std::pow(1.0 + std::pow(rr / a, T.norm().root()), expo);
            e += rad.w[r] * std::pow(rr, Q) * ker * avg[r];
        }
        e /= tab.kernel_mass;
        ConvergenceRow row{a, K0 + e, K0, std::abs(e)};
        tab.rows.push_back(row);
    }
    tab.monotone = true;
    for (std::size_t i = 1; i < tab.rows.size(); ++i)
        if (!(tab.rows[i].error < tab.rows[i - 1].error)) tab.monotone = false;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& row : tab.rows) {
        if (row.error <= 0.0) continue;
        double x = std::log(row.a), y = std::log(row.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) tab.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return tab;
}

double derivative_commute_residual(const DistributionRep& S, const KernelSpec& k, int j, double a,
                                   const std::vector<GroupElement>& etas, const QuadOptions& q) {
    if (!S.compact()) throw std::invalid_argument("derivative commutation needs a compactly supported distribution");
    const auto& spec = S.spec();
    const int n = spec.dim();
    if (j < 0 || j >= n) throw std::invalid_argument("field index out of range");
    DistributionRep base = S.normal_form();
    // Y_j X^W g = X^W (Y_j g): left and right invariant fields commute
    OperatorWord yj = right_word(spec, {j});
    std::vector<DistributionTerm> moved;
    for (const auto& t : base.terms()) {
        DistributionTerm u = t;
        u.g = density_derivative(spec, t, yj);
        u.expr.reset();
        moved.push_back(std::move(u));
    }
    DistributionRep YS(S.norm(), S.mu(), std::move(moved));
    Extender ext(base, k, OperatorWord{}, 1.0, false, q), ext_moved(YS, k, OperatorWord{}, 1.0, false, q);
    double worst = 0.0;
    for (const auto& eta : etas) {
        ScalarFn u = [&](const double* x) { return ext(a, GroupElement(x, x + n)); };
        double lhs = apply_word_fd(yj, u, eta.data(), n, 1e-2 * (1.0 + std::sqrt(a)));
        double rhs = ext_moved(a, eta);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double extension_harmonicity_residual(const DistributionRep& T, const KernelSpec& k,
                                      const std::vector<std::pair<GroupElement, double>>& pts, const QuadOptions& q) {
    if (k.family() != KernelFamily::classical_abelian)
        throw std::invalid_argument("harmonicity is only claimed for the classical abelian kernel");
    if (!T.compact()) throw std::invalid_argument("harmonicity check needs a compactly supported distribution");
    const int n = T.spec().dim();
    Extender ext(T, k, OperatorWord{}, 1.0, false, q);
    double worst = 0.0;
    for (const auto& [x, a] : pts) {
        if (!(a > 0.0)) throw std::invalid_argument("harmonicity grid touches a = 0");
        double h = 1e-2 * a;
        auto d2 = [&](auto&& f) {
            return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
        };
        double lap = d2([&](double s) { return ext(a + s, x); });
        for (int i = 0; i < n; ++i)
            lap += d2([&](double s) {
                GroupElement y = x;
                y[static_cast<std::size_t>(i)] += s;
                return ext(a, y);
            });
        worst = std::max(worst, std::pow(a, n + 2.0) * std::abs(lap));
    }
    return worst;
}

double a_derivative_residual(const DistributionRep& T, const KernelSpec& k, double a,
                             const std::vector<GroupElement>& etas, const QuadOptions& q) {
    double worst = 0.0;
    const double h = 1e-2;
    Extender ext(T, k, OperatorWord{}, 1.0, false, q), exa(T, k, OperatorWord{}, 1.0, true, q);
    for (const auto& eta : etas) {
        auto u = [&](double s) { return ext(a * std::exp(s), eta); };
        double fd = (-u(2.0 * h) + 8.0 * u(h) - 8.0 * u(-h) + u(-2.0 * h)) / (12.0 * h);
        double ex = exa(a, eta);
        worst = std::max(worst, std::abs(fd - ex));
    }
    return worst;
}

}  // namespace nilh
