#include "nilharmonics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "nilharmonics/calculus.hpp"
#include "nilharmonics/rules.hpp"

namespace nilh {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double word_weight(const GroupSpec& spec, const OperatorWord& w) {
    double s = 0.0;
    for (const auto& f : w.fields) s += spec.weight(f.j);
    return s;
}

}  // namespace

std::string family_name(KernelFamily f) {
    return f == KernelFamily::classical_abelian ? "classical_abelian" : "model_power";
}

KernelFamily parse_family(const std::string& s) {
    if (s == "classical_abelian" || s == "classical") return KernelFamily::classical_abelian;
    if (s == "model_power" || s == "model") return KernelFamily::model_power;
    throw std::invalid_argument("unknown kernel family '" + s + "'");
}

KernelSpec::KernelSpec(HomogeneousNorm norm, KernelFamily family, double Gamma, double c)
    : norm_(std::move(norm)), family_(family), Gamma_(Gamma), c_(c) {
    if (!(Gamma_ > 0.0)) throw std::invalid_argument("kernel parameter Gamma must be positive");
    expo_ = -(norm_.spec().Q() + Gamma_) / norm_.root();
}

KernelSpec KernelSpec::classical(int n) {
    double c = std::tgamma(0.5 * (n + 1)) / std::pow(std::numbers::pi, 0.5 * (n + 1));
    return KernelSpec(HomogeneousNorm(GroupSpec::abelian(n)), KernelFamily::classical_abelian, 1.0, c);
}

KernelSpec KernelSpec::model_power(HomogeneousNorm norm, double Gamma) {
    return KernelSpec(std::move(norm), KernelFamily::model_power, Gamma, 1.0);
}

KernelSpec KernelSpec::make(const GroupSpec& spec, KernelFamily family, double Gamma) {
    if (family == KernelFamily::classical_abelian) {
        if (!spec.is_abelian() || spec.Q() != spec.dim())
            throw std::invalid_argument("classical_abelian kernel needs an abelian spec with unit weights");
        if (Gamma != 1.0) throw std::invalid_argument("classical_abelian kernel has Gamma = 1");
        return classical(spec.dim());
    }
    return model_power(HomogeneousNorm(spec), Gamma);
}

double KernelSpec::operator()(const double* eta) const { return c_ * std::pow(1.0 + norm_.N_compiled()(eta), expo_); }

double KernelSpec::dilated(double a, const double* eta) const {
    if (!(a > 0.0)) throw std::invalid_argument("kernel dilation needs a > 0");
    double u = norm_.N_compiled()(eta) * std::pow(a, -norm_.root());
    return std::pow(a, -Q()) * c_ * std::pow(1.0 + u, expo_);
}

double KernelSpec::a_derivative(int k, double a, const double* eta) const {
    if (!(a > 0.0)) throw std::invalid_argument("kernel dilation needs a > 0");
    if (k < 0 || k > kMaxJet) throw std::invalid_argument("a-derivative order out of range");
    double u = norm_.N_compiled()(eta);
    Jet s = Jet::seed(std::log(a), k);
    Jet g = exp(s * (-Q())) * c_ * pow(1.0 + u * exp(s * (-static_cast<double>(norm_.root()))), expo_);
    return g.derivative(k);
}

UniFn KernelSpec::profile() const {
    double c = c_, e = expo_;
    return [c, e](const Jet& u) { return pow(1.0 + u, e) * c; };
}

Expr KernelSpec::expr() const { return Expr::of(spec().dim(), Composite(profile(), norm_.N())); }

Expr KernelSpec::dilated_expr(double a) const {
    return Expr::of(spec().dim(), Composite(profile(), spec().compose_dilate(norm_.N(), 1.0 / a)), std::pow(a, -Q()));
}

double KernelSpec::mass() const {
    double p = norm_.root(), Qd = Q();
    double beta = std::exp(std::lgamma(Qd / p) + std::lgamma(Gamma_ / p) - std::lgamma((Qd + Gamma_) / p));
    return c_ * norm_.unit_ball_lebesgue() * (Qd / p) * beta;
}

KernelDerivative::KernelDerivative(const KernelSpec& k, const OperatorWord& w)
    : spec_(&k.spec()), Q_(k.Q()), dw_(word_weight(k.spec(), w)), d_(std::make_shared<DerivedExpr>(k.expr(), w)) {}

double KernelDerivative::operator()(double a, const double* eta) const {
    double y[kMaxDim];
    spec_->dilate_into(1.0 / a, eta, y);
    return std::pow(a, -Q_ - dw_) * (*d_)(y);
}

CertificateReport certify_RGamma(const KernelSpec& k, const CertifyOptions& opt) {
    const auto& spec = k.spec();
    const auto& norm = k.norm();
    const int n = spec.dim();
    const double Q = k.Q(), G = k.Gamma();
    std::mt19937_64 rng(opt.seed);

    std::vector<GroupElement> dirs;
    for (int i = 0; i < opt.directions; ++i) {
        GroupElement t(static_cast<std::size_t>(n));
        double r = 0.0;
        while (r < 1e-3) {
            for (auto& v : t) v = 2.0 * unit_uniform(rng) - 1.0;
            r = norm(t);
        }
        dirs.push_back(spec.dilate(1.0 / r, t));
    }
    // log-spaced radii from 1e-3; the doubled sweep extends the same grid out to 2R
    const double step = std::log(opt.radius / 1e-3) / opt.radii;
    auto sweep = [&](double R) {
        std::vector<GroupElement> pts;
        pts.push_back(GroupElement(static_cast<std::size_t>(n), 0.0));
        for (int i = 0;; ++i) {
            double r = 1e-3 * std::exp(step * i);
            if (r > R * (1.0 + 1e-12)) break;
            for (const auto& d : dirs) pts.push_back(spec.dilate(r, d));
        }
        return pts;
    };
    std::vector<GroupElement> base = sweep(opt.radius), wide = sweep(2.0 * opt.radius);

    CertificateReport rep;
    auto run = [&](const std::string& name, const std::function<double(const GroupElement&)>& ratio) {
        EstimateResult e;
        e.name = name;
        for (const auto& p : base) e.sup_ratio = std::max(e.sup_ratio, ratio(p));
        e.sup_ratio_doubled = e.sup_ratio;
        for (const auto& p : wide) e.sup_ratio_doubled = std::max(e.sup_ratio_doubled, ratio(p));
        e.growth = e.sup_ratio > 0.0 ? e.sup_ratio_doubled / e.sup_ratio - 1.0 : 0.0;
        e.pass = std::isfinite(e.sup_ratio_doubled) && e.growth < opt.max_growth;
        rep.estimates.push_back(e);
    };
    auto omega = [&](double mu, const double* p) { return WeightFunction::of_radius(norm(p), mu); };

    run("(i) upper", [&](const GroupElement& p) { return k(p.data()) / omega(-Q - G, p.data()); });
    run("(i) lower", [&](const GroupElement& p) { return omega(-Q - G, p.data()) / k(p.data()); });
    rep.lower_constant = rep.estimates.back().sup_ratio_doubled;

    for (const auto& alpha : multi_indices(n, opt.order_alpha)) {
        int len = 0;
        for (int v : alpha) len += v;
        if (len == 0) continue;
        OperatorWord w = make_word(spec, Side::left, alpha);
        double da = spec.mono_weight(mono_from(alpha));
        std::string tag = mono_str(mono_from(alpha), n);
        DerivedExpr dk(k.expr(), w);
        run("(ii) X^" + tag, [&](const GroupElement& p) {
            return std::abs(dk(p.data())) / omega(-Q - G - da, p.data());
        });
        for (double a : opt.a_values) {
            DerivedExpr dka(k.dilated_expr(a), w);
            run("remark dilated X^" + tag + " a=" + std::to_string(a), [&](const GroupElement& p) {
                GroupElement q = spec.dilate(a, p);
                return std::abs(dka(q.data())) / (std::pow(a, -Q - da) * omega(-Q - G - da, p.data()));
            });
        }
        DerivedExpr dy(k.expr(), make_word(spec, Side::right, alpha, true));
        run("remark right Ytilde^" + tag, [&](const GroupElement& p) {
            return std::abs(dy(p.data())) / omega(-Q - G - da, p.data());
        });
        const ConversionTable& tab = conversion_cached(spec, alpha);
        std::vector<std::pair<DerivedExpr, CompiledPoly>> conv;
        for (const auto& [beta, q] : tab.Q)
            conv.emplace_back(DerivedExpr(k.expr(), make_word(spec, Side::left, mono_to_vector(beta, n))), CompiledPoly(q));
        run("remark right via conversion Ytilde^" + tag, [&](const GroupElement& p) {
            double s = 0.0;
            for (const auto& [d, q] : conv) s += q(p.data()) * d(p.data());
            return std::abs(s) / omega(-Q - G - da, p.data());
        });
    }
    for (int kk = 1; kk <= opt.order_k; ++kk)
        for (double a : opt.a_values)
            run("(iii) k=" + std::to_string(kk) + " a=" + std::to_string(a), [&](const GroupElement& p) {
                GroupElement q = spec.dilate(a, p);
                return std::abs(k.a_derivative(kk, a, q.data())) / (std::pow(a, -Q) * omega(-Q - G, p.data()));
            });
    rep.pass = std::all_of(rep.estimates.begin(), rep.estimates.end(), [](const auto& e) { return e.pass; });
    return rep;
}

double harmonicity_residual(const KernelSpec& k, const std::vector<std::pair<GroupElement, double>>& pts) {
    if (k.family() != KernelFamily::classical_abelian)
        throw std::invalid_argument("harmonicity is only claimed for the classical abelian kernel");
    const int n = k.spec().dim();
    double worst = 0.0;
    for (const auto& [x, a] : pts) {
        if (!(a > 0.0)) throw std::invalid_argument("harmonicity grid touches a = 0");
        double h = 2e-3 * a;
        auto u = [&](const GroupElement& y, double b) { return k.dilated(b, y.data()); };
        auto d2 = [&](auto&& f) {
            return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
        };
        double lap = d2([&](double s) { return u(x, a + s); });
        for (int i = 0; i < n; ++i)
            lap += d2([&](double s) {
                GroupElement y = x;
                y[static_cast<std::size_t>(i)] += s;
                return u(y, a);
            });
        worst = std::max(worst, std::pow(a, n + 2.0) * std::abs(lap));
    }
    return worst;
}

double semigroup_residual(const KernelSpec& k, double a, double b, const std::vector<GroupElement>& xs) {
    if (k.family() != KernelFamily::classical_abelian)
        throw std::invalid_argument("the semigroup law is only claimed for the classical abelian kernel");
    const int n = k.spec().dim();
    SphereRule sphere = SphereRule::build(k.norm(), 32);
    Rule1D phi = composite_gauss(64, 16, 0.0, 0.5 * std::numbers::pi);
    double worst = 0.0;
    for (const auto& x : xs) {
        double s = 0.0;
        for (std::size_t i = 0; i < phi.x.size(); ++i) {
            double t = std::tan(phi.x[i]), c = std::cos(phi.x[i]);
            double r = a * t;
            double jac = phi.w[i] * a / (c * c) * std::pow(r, n - 1.0);
            for (std::size_t j = 0; j < sphere.pts.size(); ++j) {
                double y[kMaxDim], z[kMaxDim];
                for (int d = 0; d < n; ++d) {
                    y[d] = r * sphere.pts.point(j)[d];
                    z[d] = x[static_cast<std::size_t>(d)] - y[d];
                }
                s += jac * sphere.pts.w[j] * k.dilated(a, y) * k.dilated(b, z);
            }
        }
        worst = std::max(worst, std::abs(s - k.dilated(a + b, x.data())));
    }
    return worst;
}

}  // namespace nilh
