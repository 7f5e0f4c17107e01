#include "nilharmonics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "nilharmonics/parallel.hpp"

namespace nilh {

namespace {

Rule1D axis_rule(RuleKind kind, int count, double lo, double hi) {
    switch (kind) {
        case RuleKind::simpson: return simpson(count % 2 ? count + 1 : count, lo, hi);
        case RuleKind::midpoint: return midpoint(count, lo, hi);
        case RuleKind::gauss: break;
    }
    if (count <= 32) return gauss_legendre(count, lo, hi);
    int panels = (count + 15) / 16;
    return composite_gauss(panels, 16, lo, hi);
}

PointSet tensor(const std::vector<Rule1D>& axes) {
    PointSet ps;
    ps.n = static_cast<int>(axes.size());
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.x.size();
    ps.x.resize(total * axes.size());
    ps.w.resize(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t p = 0; p < total; ++p) {
        double w = 1.0;
        for (std::size_t d = 0; d < axes.size(); ++d) {
            ps.x[p * axes.size() + d] = axes[d].x[idx[d]];
            w *= axes[d].w[idx[d]];
        }
        ps.w[p] = w;
        for (std::size_t d = axes.size(); d-- > 0;) {
            if (++idx[d] < axes[d].x.size()) break;
            idx[d] = 0;
        }
    }
    return ps;
}

double norm_axis_bound(const HomogeneousNorm& norm, int k) {
    if (norm.variant() == NormVariant::koranyi && k == 2) return 0.25;
    return 1.0;
}

}  // namespace

double PointSet::total_weight() const { return pairwise_sum(w.data(), w.size()); }

Grid::Grid(std::vector<double> center, std::vector<double> half, std::vector<int> count, RuleKind rule)
    : center_(std::move(center)), half_(std::move(half)), count_(std::move(count)), rule_(rule) {
    if (center_.size() != half_.size() || center_.size() != count_.size())
        throw std::invalid_argument("grid: axis arrays differ in length");
    for (std::size_t i = 0; i < half_.size(); ++i)
        if (!(half_[i] > 0.0) || count_[i] < 1) throw std::invalid_argument("grid: empty axis");
}

Grid Grid::ball_box(const HomogeneousNorm& norm, double R, int count, RuleKind rule) {
    const int n = norm.spec().dim();
    std::vector<double> c(static_cast<std::size_t>(n), 0.0), h(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) h[k] = std::pow(R, norm.spec().weight(k)) * norm_axis_bound(norm, k);
    return Grid(c, h, std::vector<int>(static_cast<std::size_t>(n), count), rule);
}

Grid Grid::around(const std::vector<double>& center, double radius, int count, RuleKind rule) {
    return Grid(center, std::vector<double>(center.size(), radius), std::vector<int>(center.size(), count), rule);
}

double Grid::volume() const {
    double v = 1.0;
    for (double h : half_) v *= 2.0 * h;
    return v;
}

bool Grid::contains_box(const std::vector<double>& lo, const std::vector<double>& hi) const {
    for (std::size_t i = 0; i < center_.size(); ++i) {
        double eps = 1e-12 * (1.0 + half_[i]);
        if (lo[i] < center_[i] - half_[i] - eps || hi[i] > center_[i] + half_[i] + eps) return false;
    }
    return true;
}

Grid Grid::refined() const {
    std::vector<int> c = count_;
    for (auto& v : c) v *= 2;
    return Grid(center_, half_, c, rule_);
}

PointSet Grid::points() const {
    std::vector<Rule1D> axes;
    for (std::size_t i = 0; i < center_.size(); ++i)
        axes.push_back(axis_rule(rule_, count_[i], center_[i] - half_[i], center_[i] + half_[i]));
    return tensor(axes);
}

double integrate(const PointSet& pts, const ScalarFn& f) {
    double s = parallel_sum(pts.size(), [&](std::size_t i) { return pts.w[i] * f(pts.point(i)); });
    if (std::isnan(s)) throw std::domain_error("integrate: NaN encountered");
    return s;
}

double integrate(const Grid& grid, const SampledFunction& f) {
    if (!f.support_lo.empty() && !grid.contains_box(f.support_lo, f.support_hi))
        throw std::domain_error("integrate: support leaks outside the grid");
    return integrate(grid.points(), f.f);
}

double haar_integrate(const HomogeneousNorm& norm, const Grid& grid, const SampledFunction& f) {
    return integrate(grid, f) / norm.unit_ball_lebesgue();
}

double haar_ball_volume(const HomogeneousNorm& norm, double r, int count) {
    Grid g = Grid::ball_box(norm, r, count, RuleKind::midpoint);
    double rp = std::pow(r, norm.root());
    const CompiledPoly& N = norm.N_compiled();
    SampledFunction ind{[&](const double* t) { return N(t) <= rp ? 1.0 : 0.0; }, {}, {}, "indicator"};
    return haar_integrate(norm, g, ind);
}

ConvolutionValue convolve(const GroupSpec& spec, const ScalarFn& f, const ScalarFn& g, const double* eta,
                          const PointSet& f_pts, const PointSet& g_pts) {
    ConvolutionValue v;
    v.first = convolve_first(spec, f, g, eta, f_pts);
    const int n = spec.dim();
    v.second = integrate(g_pts, [&](const double* xi) {
        double inv[kMaxDim], y[kMaxDim];
        for (int k = 0; k < n; ++k) inv[k] = -xi[k];
        spec.multiply_into(eta, inv, y);
        return f(y) * g(xi);
    });
    return v;
}

double convolve_first(const GroupSpec& spec, const ScalarFn& f, const ScalarFn& g, const double* eta,
                      const PointSet& f_pts) {
    const int n = spec.dim();
    return integrate(f_pts, [&](const double* xi) {
        double fv = f(xi);
        if (fv == 0.0) return 0.0;
        double inv[kMaxDim], y[kMaxDim];
        for (int k = 0; k < n; ++k) inv[k] = -xi[k];
        spec.multiply_into(inv, eta, y);
        return fv * g(y);
    });
}

ApproximateIdentity::ApproximateIdentity(const GroupSpec& spec, ScalarFn h, const Grid& support_grid)
    : spec_(spec), h_(std::move(h)), half_(support_grid.half()) {
    mass_ = integrate(support_grid.points(), h_);
    if (!(mass_ > 0.0)) throw std::invalid_argument("approximate identity: profile has no positive mass");
}

double ApproximateIdentity::operator()(double a, const double* eta) const {
    if (!(a > 0.0)) throw std::invalid_argument("approximate identity: a must be positive");
    double y[kMaxDim];
    spec_.dilate_into(1.0 / a, eta, y);
    return std::pow(a, -spec_.Q()) * h_(y) / mass_;
}

SampledFunction ApproximateIdentity::at(double a) const {
    SampledFunction s;
    s.f = [this, a](const double* eta) { return (*this)(a, eta); };
    for (int k = 0; k < spec_.dim(); ++k) {
        double hk = half_[k] * std::pow(a, spec_.weight(k));
        s.support_lo.push_back(-hk);
        s.support_hi.push_back(hk);
    }
    return s;
}

SphereRule SphereRule::build(const HomogeneousNorm& norm, int per_axis) {
    const auto& spec = norm.spec();
    const int n = spec.dim();
    const double Q = spec.Q();
    SphereRule sr;
    sr.pts.n = n;
    if (n == 1) {
        double half = 0.5 * Q * norm.unit_ball_lebesgue();
        sr.pts.x = {-1.0, 1.0};
        sr.pts.w = {half, half};
        return sr;
    }
    // radial weight p N^k e^{-N} / Gamma(k) |theta|^{-Q} integrates dr/r to one
    const int p = norm.root();
    const int kpow = static_cast<int>(std::ceil((Q + p) / p)) + 1;
    const double Ncut = 45.0;
    std::vector<Rule1D> axes;
    for (int k = 0; k < n; ++k) {
        double h = std::pow(Ncut, spec.weight(k) / p) * (norm.variant() == NormVariant::koranyi && k == 2 ? 0.25 : 1.0);
        axes.push_back(axis_rule(RuleKind::gauss, per_axis, -h, h));
    }
    PointSet box = tensor(axes);
    const double gk = std::tgamma(static_cast<double>(kpow));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < box.size(); ++i) {
        const double* t = box.point(i);
        double u = norm.N_compiled()(t);
        if (u <= 0.0 || u > Ncut) continue;
        double r = std::pow(u, 1.0 / p);
        double wr = p * std::pow(u, kpow) * std::exp(-u) / gk * std::pow(r, -Q);
        if (box.w[i] * wr < 1e-13) continue;
        spec.dilate_into(1.0 / r, t, y.data());
        sr.pts.x.insert(sr.pts.x.end(), y.begin(), y.end());
        sr.pts.w.push_back(box.w[i] * wr);
    }
    // the total is known in closed form; rescaling removes the radial truncation error
    const double scale = Q * norm.unit_ball_lebesgue() / sr.pts.total_weight();
    for (auto& w : sr.pts.w) w *= scale;
    return sr;
}

double polar_integrate(const HomogeneousNorm& norm, const SphereRule& sphere, const ScalarFn& f, double r_max,
                       int radial_nodes) {
    const auto& spec = norm.spec();
    const int n = spec.dim();
    const double Q = spec.Q();
    int panels = std::max(1, radial_nodes / 8);
    Rule1D rr = composite_gauss(panels, 8, 0.0, r_max);
    std::size_t ns = sphere.pts.size();
    return parallel_sum(rr.x.size() * ns, [&](std::size_t idx) {
        std::size_t ir = idx / ns, is = idx % ns;
        double y[kMaxDim];
        spec.dilate_into(rr.x[ir], sphere.pts.point(is), y);
        (void)n;
        return rr.w[ir] * std::pow(rr.x[ir], Q - 1.0) * sphere.pts.w[is] * f(y);
    });
}

IrsRegime irs_regime(double r, double s, double Q) {
    const double eps = 1e-12;
    if (r + s + Q >= -eps) return IrsRegime::divergent;
    if (std::abs(r + Q) < eps || std::abs(s + Q) < eps) return IrsRegime::logarithmic;
    if (r + Q > 0.0 && s + Q > 0.0) return IrsRegime::power;
    return IrsRegime::bounded;
}

double irs_majorant(double r, double s, double Q, double e) {
    switch (irs_regime(r, s, Q)) {
        case IrsRegime::power: return std::pow(1.0 + e, r + s + Q);
        case IrsRegime::logarithmic: return std::pow(1.0 + e, std::max(r, s)) * std::log(2.0 + e);
        case IrsRegime::bounded: return std::pow(1.0 + e, std::max(r, s));
        case IrsRegime::divergent: break;
    }
    return std::numeric_limits<double>::infinity();
}

std::string regime_name(IrsRegime r) {
    switch (r) {
        case IrsRegime::power: return "power";
        case IrsRegime::logarithmic: return "log";
        case IrsRegime::bounded: return "bounded";
        case IrsRegime::divergent: return "divergent";
    }
    return "?";
}

IrsValue I_rs(const HomogeneousNorm& norm, const SphereRule& sphere, double r, double s, const GroupElement& eta,
              const IrsOptions& opt) {
    const auto& spec = norm.spec();
    const int n = spec.dim();
    const double Q = spec.Q();
    IrsValue out;
    out.regime = irs_regime(r, s, Q);
    if (out.regime == IrsRegime::divergent)
        throw std::invalid_argument("I_rs: r + s + Q >= 0, the integral diverges");
    const double en = norm(eta);
    out.majorant = irs_majorant(r, s, Q, en);
    const int pk = 4;  // partition exponent
    const std::size_t ns = sphere.pts.size();

    // partition of unity: piece 0 centered at 0, piece 1 centered at eta (xi = eta zeta)
    auto piece_integral = [&](double u_lo, double u_hi, int panels) {
        Rule1D ru = composite_gauss(panels, opt.radial_order, u_lo, u_hi);
        return parallel_sum(ru.x.size() * ns, [&](std::size_t idx) {
            std::size_t iu = idx / ns, is = idx % ns;
            double rad = std::exp(ru.x[iu]);
            double z[kMaxDim], y[kMaxDim];
            spec.dilate_into(rad, sphere.pts.point(is), z);
            double jac = ru.w[iu] * std::pow(rad, Q) * sphere.pts.w[is];
            // piece 0 at xi = z: a = |z|, b = |z^{-1} eta|
            double a0 = rad, b0 = norm.distance(z, eta.data());
            double w0 = std::pow(b0, pk) / (std::pow(a0, pk) + std::pow(b0, pk));
            double v0 = std::pow(1.0 + a0, r) * std::pow(1.0 + b0, s) * w0;
            // piece 1 at xi = eta z: |xi| = |eta z|, |xi^{-1} eta| = |z|
            spec.multiply_into(eta.data(), z, y);
            double a1 = norm(y), b1 = rad;
            double w1 = std::pow(a1, pk) / (std::pow(a1, pk) + std::pow(b1, pk));
            double v1 = std::pow(1.0 + a1, r) * std::pow(1.0 + b1, s) * w1;
            (void)n;
            return jac * (v0 + v1);
        });
    };

    const double u_min = std::log(1e-7);
    const double density = opt.radial_panels / 12.0;  // panels per unit of log-radius
    double R = 8.0 * (1.0 + en);
    double prev = piece_integral(u_min, std::log(R), std::max(4, int(std::ceil((std::log(R) - u_min) * density))));
    const double p = r + s + Q;
    double best = prev;
    for (int it = 0; it < 40; ++it) {
        double ext = piece_integral(std::log(R), std::log(2.0 * R), std::max(2, int(std::ceil(std::log(2.0) * density))));
        double cur = prev + ext;
        // geometric tail beyond 2R from the power decay R^{p}
        double tail = ext * std::pow(2.0, p) / (1.0 - std::pow(2.0, p));
        best = cur + tail;
        R *= 2.0;
        if (std::abs(tail) <= opt.tol * std::abs(best)) break;
        prev = cur;
    }
    out.value = best;
    out.radius = R;
    out.ratio = out.value / out.majorant;
    return out;
}

}  // namespace nilh
