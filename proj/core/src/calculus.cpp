#include "nilharmonics/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace nilh {

namespace {

double sign_of(int len) { return (len % 2) ? -1.0 : 1.0; }

void add_into(EuclidOp& op, const Mono& g, const Polynomial& c) {
    if (c.is_zero()) return;
    auto it = op.find(g);
    if (it == op.end()) {
        op.emplace(g, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) op.erase(it);
}

std::vector<Mono> monomials_up_to(const GroupSpec& spec, double max_weight) {
    const int n = spec.dim();
    std::vector<Mono> out;
    Mono m{};
    std::function<void(int, double)> rec = [&](int k, double left) {
        if (k == n) {
            out.push_back(m);
            return;
        }
        for (int e = 0; e * spec.weight(k) <= left + 1e-12; ++e) {
            m[k] = static_cast<std::uint8_t>(e);
            rec(k + 1, left - e * spec.weight(k));
        }
        m[k] = 0;
    };
    rec(0, max_weight);
    return out;
}

std::string spec_key(const GroupSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    os << spec.dim();
    for (const auto& w : spec.weights()) os << ':' << w.str();
    for (const auto& t : spec.structure()) os << '|' << t.k << mono_str(t.alpha, spec.dim()) << mono_str(t.beta, spec.dim()) << t.c;
    return os.str();
}

}  // namespace

EuclidOp word_as_euclidean(const OperatorWord& w, int n) {
    EuclidOp op;
    op.emplace(mono_zero(), Polynomial::constant(n, 1.0));
    for (auto it = w.fields.rbegin(); it != w.fields.rend(); ++it) {
        EuclidOp next;
        for (const auto& [g, c] : op) {
            for (int k = 0; k < n; ++k) {
                const Polynomial& p = it->coeffs[static_cast<std::size_t>(k)];
                if (p.is_zero()) continue;
                add_into(next, g, p * c.derivative(k));
                add_into(next, mono_add(g, mono_unit(k)), p * c);
            }
        }
        op = std::move(next);
    }
    return op;
}

Polynomial apply_euclidean(const EuclidOp& op, const Polynomial& f) {
    Polynomial r(f.dim());
    for (const auto& [g, c] : op) {
        Polynomial d = f;
        for (int k = 0; k < f.dim(); ++k)
            for (int e = 0; e < g[k]; ++e) d = d.derivative(k);
        if (!d.is_zero()) r += c * d;
    }
    return r;
}

ConversionTable build_conversion(const GroupSpec& spec, const std::vector<int>& alpha, int max_order) {
    const int n = spec.dim();
    int len = 0;
    for (int a : alpha) len += a;
    if (len > max_order) throw std::invalid_argument("build_conversion: |alpha| exceeds the configured maximum order");
    ConversionTable t;
    t.alpha = alpha;
    EuclidOp R = word_as_euclidean(make_word(spec, Side::right, alpha, true), n);
    std::map<Mono, EuclidOp> xcache;
    for (int iter = 0; !R.empty(); ++iter) {
        if (iter > 100000) throw std::logic_error("build_conversion: basis rewriting did not terminate");
        // smallest homogeneous weight first; among equal weight, longest first
        auto pick = std::min_element(R.begin(), R.end(), [&](const auto& a, const auto& b) {
            double da = spec.mono_weight(a.first), db = spec.mono_weight(b.first);
            if (std::abs(da - db) > 1e-12) return da < db;
            int la = mono_length(a.first), lb = mono_length(b.first);
            if (la != lb) return la > lb;
            return a.first < b.first;
        });
        Mono gamma = pick->first;
        Polynomial c = pick->second;
        auto xit = xcache.find(gamma);
        if (xit == xcache.end())
            xit = xcache.emplace(gamma, word_as_euclidean(make_word(spec, Side::left, mono_to_vector(gamma, n)), n)).first;
        t.Q[gamma] += c;
        for (const auto& [d, e] : xit->second) add_into(R, d, (-1.0) * (c * e));
        if (R.count(gamma)) throw std::logic_error("build_conversion: leading term did not cancel");
    }
    for (auto it = t.Q.begin(); it != t.Q.end();) {
        if (it->second.is_zero())
            it = t.Q.erase(it);
        else
            ++it;
    }
    return t;
}

const ConversionTable& conversion_cached(const GroupSpec& spec, const std::vector<int>& alpha) {
    static std::mutex mu;
    static std::map<std::pair<std::string, std::vector<int>>, ConversionTable> registry;
    auto key = std::make_pair(spec_key(spec), alpha);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = registry.find(key);
        if (it != registry.end()) return it->second;
    }
    ConversionTable t = build_conversion(spec, alpha);
    std::lock_guard<std::mutex> lock(mu);
    return registry.emplace(key, std::move(t)).first->second;
}

double conversion_monomial_residual(const GroupSpec& spec, const ConversionTable& t, double extra) {
    const int n = spec.dim();
    double da = spec.mono_weight(mono_from(t.alpha));
    OperatorWord yt = make_word(spec, Side::right, t.alpha, true);
    double worst = 0.0;
    for (const Mono& m : monomials_up_to(spec, da + extra)) {
        Polynomial f = Polynomial::monomial(n, m);
        Polynomial lhs = apply_word(yt, f);
        Polynomial rhs(n);
        for (const auto& [beta, q] : t.Q) rhs += q * apply_word(make_word(spec, Side::left, mono_to_vector(beta, n)), f);
        worst = std::max(worst, (lhs - rhs).max_abs_coeff());
    }
    return worst;
}

double conversion_homogeneity_defect(const GroupSpec& spec, const ConversionTable& t) {
    double da = spec.mono_weight(mono_from(t.alpha));
    double worst = 0.0;
    for (const auto& [beta, q] : t.Q)
        for (const auto& [m, c] : q.terms())
            worst = std::max(worst, std::abs(spec.mono_weight(m) - (spec.mono_weight(beta) - da)));
    return worst;
}

double fundlink_residual(const GroupSpec& spec, const ConversionTable& t, const Polynomial& phi,
                         const std::vector<GroupElement>& xis) {
    const int n = spec.dim();
    int la = mono_length(mono_from(t.alpha));
    Polynomial lhs_poly = apply_word(make_word(spec, Side::left, t.alpha, true), phi) * sign_of(la);
    double worst = 0.0;
    for (const auto& xi : xis) {
        double lhs = lhs_poly.eval(xi);
        Polynomial psi = spec.compose_left(phi, xi);
        double rhs = 0.0;
        for (const auto& [beta, q] : t.Q) {
            Polynomial term = apply_word(make_word(spec, Side::left, mono_to_vector(beta, n), true), q * psi);
            rhs += sign_of(mono_length(beta)) * term.coeff(mono_zero());
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

Expr left_translate(const GroupSpec& spec, const Expr& e, const GroupElement& xi) {
    Expr r = e;
    for (auto& f : r.factors) f = Composite(f.F, spec.compose_left(f.P, xi));
    return r;
}

double fundlink_residual(const GroupSpec& spec, const ConversionTable& t, const Expr& phi,
                         const std::vector<GroupElement>& xis) {
    const int n = spec.dim();
    int la = mono_length(mono_from(t.alpha));
    DerivedExpr lhs_op(phi, make_word(spec, Side::left, t.alpha, true));
    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    double worst = 0.0;
    for (const auto& xi : xis) {
        double lhs = sign_of(la) * lhs_op(xi.data());
        Expr psi = left_translate(spec, phi, xi);
        double rhs = 0.0;
        for (const auto& [beta, q] : t.Q) {
            Expr term = psi.times(Expr::of(n, Composite::poly(q)));
            DerivedExpr d(term, make_word(spec, Side::left, mono_to_vector(beta, n), true));
            rhs += sign_of(mono_length(beta)) * d(zero.data());
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double fundlink_residual_fd(const GroupSpec& spec, const ConversionTable& t, const ScalarFn& phi,
                            const std::vector<GroupElement>& xis) {
    const int n = spec.dim();
    int la = mono_length(mono_from(t.alpha));
    OperatorWord wa = make_word(spec, Side::left, t.alpha, true);
    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    double worst = 0.0;
    for (const auto& xi : xis) {
        double lhs = sign_of(la) * apply_word_fd(wa, phi, xi.data(), n, default_fd_step(xi.data(), n));
        double rhs = 0.0;
        for (const auto& [beta, q] : t.Q) {
            CompiledPoly qc(q);
            ScalarFn term = [&](const double* eta) {
                double y[kMaxDim];
                spec.multiply_into(xi.data(), eta, y);
                return qc(eta) * phi(y);
            };
            OperatorWord wb = make_word(spec, Side::left, mono_to_vector(beta, n), true);
            rhs += sign_of(mono_length(beta)) * apply_word_fd(wb, term, zero.data(), n, 1e-3);
        }
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double leibniz_residual(const OperatorWord& w, const Polynomial& f, const Polynomial& g,
                        const std::vector<GroupElement>& pts) {
    const unsigned m = static_cast<unsigned>(w.length());
    const unsigned full = (1u << m) - 1u;
    Polynomial lhs = apply_word(w, f * g);
    Polynomial rhs(f.dim());
    for (unsigned s = 0; s <= full; ++s) rhs += apply_word(w.sub(s), f) * apply_word(w.sub(full & ~s), g);
    double worst = (lhs - rhs).max_abs_coeff();
    for (const auto& p : pts) worst = std::max(worst, std::abs(lhs.eval(p) - rhs.eval(p)));
    return worst;
}

double leibniz_residual(const OperatorWord& w, const Expr& f, const Expr& g, const std::vector<GroupElement>& pts) {
    const unsigned m = static_cast<unsigned>(w.length());
    const unsigned full = (1u << m) - 1u;
    Expr fg = f.times(g);
    double worst = 0.0;
    for (const auto& p : pts) {
        int n = static_cast<int>(p.size());
        double lhs = apply_word_fd(w, [&](const double* t) { return fg(t); }, p.data(), n, default_fd_step(p.data(), n));
        double rhs = 0.0;
        for (unsigned s = 0; s <= full; ++s)
            rhs += DerivedExpr(f, w.sub(s))(p.data()) * DerivedExpr(g, w.sub(full & ~s))(p.data());
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

IbpResidual integrate_by_parts_residual(const GroupSpec& spec, const std::vector<int>& alpha, const Expr& f,
                                        const Expr& g, const Grid& grid) {
    PointSet pts = grid.points();
    int la = mono_length(mono_from(alpha));
    auto one_side = [&](Side side) {
        DerivedExpr df(f, make_word(spec, side, alpha));
        DerivedExpr dg(g, make_word(spec, side, alpha, true));
        double a = integrate(pts, [&](const double* t) { return df(t) * g(t); });
        double b = integrate(pts, [&](const double* t) { return f(t) * dg(t); });
        return std::abs(a - sign_of(la) * b);
    };
    return {one_side(Side::left), one_side(Side::right)};
}

double ConvolutionResiduals::max() const {
    return std::max({left_commute, right_commute, move_left, move_tilde});
}

ConvolutionResiduals convolution_identity_residuals(const GroupSpec& spec, const std::vector<int>& alpha, const Expr& f,
                                                    const Expr& g, const Grid& f_grid,
                                                    const std::vector<GroupElement>& etas) {
    const int n = spec.dim();
    PointSet pts = f_grid.points();
    auto fn = [](const auto& e) -> ScalarFn { return [&e](const double* t) { return e(t); }; };
    DerivedExpr Xg(g, make_word(spec, Side::left, alpha));
    DerivedExpr Yf(f, make_word(spec, Side::right, alpha));
    DerivedExpr Xf(f, make_word(spec, Side::left, alpha));
    DerivedExpr Ytg(g, make_word(spec, Side::right, alpha, true));
    DerivedExpr Xtf(f, make_word(spec, Side::left, alpha, true));
    DerivedExpr Yg(g, make_word(spec, Side::right, alpha));
    ScalarFn ff = fn(f), gg = fn(g);
    ScalarFn conv_fg = [&](const double* eta) { return convolve_first(spec, ff, gg, eta, pts); };
    ConvolutionResiduals r;
    for (const auto& eta : etas) {
        const double* e = eta.data();
        double h = default_fd_step(e, n);
        double a1 = apply_word_fd(make_word(spec, Side::left, alpha), conv_fg, e, n, h);
        double b1 = convolve_first(spec, ff, fn(Xg), e, pts);
        double a2 = apply_word_fd(make_word(spec, Side::right, alpha), conv_fg, e, n, h);
        double b2 = convolve_first(spec, fn(Yf), gg, e, pts);
        double a3 = convolve_first(spec, fn(Xf), gg, e, pts);
        double b3 = convolve_first(spec, ff, fn(Ytg), e, pts);
        double a4 = convolve_first(spec, fn(Xtf), gg, e, pts);
        double b4 = convolve_first(spec, ff, fn(Yg), e, pts);
        r.left_commute = std::max(r.left_commute, std::abs(a1 - b1));
        r.right_commute = std::max(r.right_commute, std::abs(a2 - b2));
        r.move_left = std::max(r.move_left, std::abs(a3 - b3));
        r.move_tilde = std::max(r.move_tilde, std::abs(a4 - b4));
    }
    return r;
}

Expr gaussian_bump(int n, const std::vector<double>& center, double s, double amplitude) {
    Polynomial P(n);
    for (int i = 0; i < n; ++i) {
        Polynomial d = Polynomial::variable(n, i);
        d.add_term(mono_zero(), -center[static_cast<std::size_t>(i)]);
        P += d * d;
    }
    P *= 1.0 / (s * s);
    return Expr::of(n, Composite(uni_exp_neg(), P), amplitude);
}

Expr compact_bump(int n, const std::vector<double>& center, double s, double amplitude) {
    Expr e = gaussian_bump(n, center, s, amplitude);
    e.factors[0].F = uni_bump();
    return e;
}

}  // namespace nilh
