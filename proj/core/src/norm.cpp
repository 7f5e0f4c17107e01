#include "nilharmonics/norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nilharmonics/rules.hpp"

namespace nilh {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// integral over R of exp(-x^e), e even
double exp_power_integral(int e) {
    double L = std::pow(60.0, 1.0 / e);
    Rule1D r = composite_gauss(64, 16, -L, L);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::exp(-std::pow(r.x[i], e));
    return s;
}

bool is_heisenberg_shape(const GroupSpec& g) {
    return g.dim() == 3 && g.weights()[0] == Rational(1) && g.weights()[1] == Rational(1) &&
           g.weights()[2] == Rational(2);
}

}  // namespace

HomogeneousNorm::HomogeneousNorm(GroupSpec spec, NormVariant variant) : spec_(std::move(spec)), variant_(variant) {
    const int n = spec_.dim();
    if (variant_ == NormVariant::koranyi) {
        if (!is_heisenberg_shape(spec_)) throw std::invalid_argument("koranyi norm requires weights (1,1,2)");
        M_ = 2;
        Polynomial x = Polynomial::variable(3, 0), y = Polynomial::variable(3, 1), t = Polynomial::variable(3, 2);
        Polynomial r2 = x * x + y * y;
        N_ = r2 * r2 + 16.0 * (t * t);
        // separable: (int exp(-(x^2+y^2)^2) dx dy) * (int exp(-16 t^2) dt)
        double L = std::pow(60.0, 0.25);
        Rule1D rr = composite_gauss(64, 16, 0.0, L);
        double radial = 0.0;
        for (std::size_t i = 0; i < rr.x.size(); ++i)
            radial += rr.w[i] * 2.0 * M_PI * rr.x[i] * std::exp(-std::pow(rr.x[i], 4));
        double tint = exp_power_integral(2) / 4.0;
        ball_leb_ = radial * tint / std::tgamma(1.0 + spec_.Q() / 4.0);
    } else {
        std::int64_t M = 1;
        for (const auto& w : spec_.weights()) M = lcm64(M, w.num);
        M_ = static_cast<int>(M);
        N_ = Polynomial(n);
        double prod = 1.0;
        for (int k = 0; k < n; ++k) {
            Rational e = Rational(2 * M) / spec_.weights()[k];
            if (e.den != 1 || e.num % 2) throw std::logic_error("norm exponent not an even integer");
            Mono m{};
            m[k] = static_cast<std::uint8_t>(e.num);
            N_.add_term(m, 1.0);
            prod *= exp_power_integral(static_cast<int>(e.num));
        }
        ball_leb_ = prod / std::tgamma(1.0 + spec_.Q() / (2.0 * M_));
    }
    Nc_ = CompiledPoly(N_);
}

double HomogeneousNorm::operator()(const double* theta) const {
    double u = Nc_(theta);
    if (u <= 0.0) return 0.0;
    return M_ == 1 ? std::sqrt(u) : (M_ == 2 ? std::sqrt(std::sqrt(u)) : std::pow(u, 1.0 / (2 * M_)));
}

double HomogeneousNorm::distance(const double* eta, const double* xi) const {
    double inv[kMaxDim], prod[kMaxDim];
    for (int k = 0; k < spec_.dim(); ++k) inv[k] = -eta[k];
    spec_.multiply_into(inv, xi, prod);
    return (*this)(prod);
}

UniFn HomogeneousNorm::radial(UniFn F) const {
    double p = 1.0 / (2 * M_);
    return [F = std::move(F), p](const Jet& u) {
        if (u.c[0] <= 0.0) return F(Jet::constant(0.0, u.K));
        return F(pow(u, p));
    };
}

GammaReport measure_gamma(const HomogeneousNorm& norm, std::size_t pairs, std::uint64_t seed) {
    const auto& g = norm.spec();
    const int n = g.dim();
    std::mt19937_64 rng(seed);
    GammaReport rep;
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n)), ab(static_cast<std::size_t>(n)),
        t(static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < pairs; ++p) {
        double sa = std::exp(4.0 * unit_uniform(rng) - 2.0), sb = std::exp(4.0 * unit_uniform(rng) - 2.0);
        for (int k = 0; k < n; ++k) t[k] = 2.0 * unit_uniform(rng) - 1.0;
        g.dilate_into(sa, t.data(), a.data());
        for (int k = 0; k < n; ++k) t[k] = 2.0 * unit_uniform(rng) - 1.0;
        g.dilate_into(sb, t.data(), b.data());
        g.multiply_into(a.data(), b.data(), ab.data());
        double den = norm(a) + norm(b);
        if (den > 0.0) rep.gamma = std::max(rep.gamma, norm(ab) / den);
        ++rep.pairs;
    }
    return rep;
}

std::pair<double, double> peetre_factor(const HomogeneousNorm& norm, const GroupElement& eta, const GroupElement& xi,
                                        double r) {
    GroupElement prod = norm.spec().multiply(eta, xi);
    return {std::pow(1.0 + norm(prod), r), std::pow(1.0 + norm(eta), std::abs(r)) * std::pow(1.0 + norm(xi), r)};
}

double bridge_phi(double x) {
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return x;
    double s = x - 1.0;
    return 1.0 + s * s * s * (6.0 + s * (-8.0 + 3.0 * s));
}

Jet bridge_phi(const Jet& x) {
    if (x.c[0] <= 1.0) return Jet::constant(1.0, x.K);
    if (x.c[0] >= 2.0) return x;
    Jet s = x - 1.0;
    Jet s3 = s * s * s;
    return 1.0 + s3 * (6.0 + s * (-8.0 + 3.0 * s));
}

double WeightFunction::of_radius(double r, double mu) { return std::pow(1.0 + bridge_phi(r), mu); }

double WeightFunction::operator()(const double* theta) const { return of_radius(norm_(theta), mu_); }

UniFn WeightFunction::profile() const {
    double p = 1.0 / norm_.root();
    double mu = mu_;
    return [p, mu](const Jet& u) {
        if (u.c[0] <= 1.0) return Jet::constant(std::pow(2.0, mu), u.K);
        return pow(1.0 + bridge_phi(pow(u, p)), mu);
    };
}

}  // namespace nilh
