#include "nilharmonics/expr.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace nilh {

Composite Composite::poly(const Polynomial& p) { return Composite(uni_identity(), p); }

double Composite::operator()(const double* theta) const { return F(Jet::constant(Pc(theta), 0)).c[0]; }

DerivedComposite::DerivedComposite(const Composite& c, const OperatorWord& w) : F_(c.F), P_(c.P) {
    const int n = c.P.dim();
    R_.assign(1, Polynomial::constant(n, 1.0));
    for (auto it = w.fields.rbegin(); it != w.fields.rend(); ++it) {
        Polynomial dP = it->apply(c.P);
        std::vector<Polynomial> next(R_.size() + 1, Polynomial(n));
        for (std::size_t k = 0; k < R_.size(); ++k) {
            if (R_[k].is_zero()) continue;
            if (!dP.is_zero()) next[k + 1] += dP * R_[k];
            next[k] += it->apply(R_[k]);
        }
        R_ = std::move(next);
    }
    for (const auto& r : R_) Rc_.emplace_back(r);
}

double DerivedComposite::operator()(const double* theta) const {
    double u = P_(theta);
    Jet j = F_(Jet::seed(u, static_cast<int>(R_.size()) - 1));
    double s = 0.0;
    for (std::size_t k = 0; k < Rc_.size(); ++k) {
        if (Rc_[k].empty()) continue;
        double dk = j.derivative(static_cast<int>(k));
        if (dk == 0.0) continue;
        s += dk * Rc_[k](theta);
    }
    return s;
}

Expr Expr::of(int n, Composite c, double scale) {
    Expr e;
    e.n = n;
    e.scale = scale;
    e.factors.push_back(std::move(c));
    return e;
}

Expr Expr::times(const Expr& o) const {
    Expr e = *this;
    e.scale *= o.scale;
    e.factors.insert(e.factors.end(), o.factors.begin(), o.factors.end());
    return e;
}

double Expr::operator()(const double* theta) const {
    double v = scale;
    for (const auto& f : factors) v *= f(theta);
    return v;
}

DerivedExpr::DerivedExpr(const Expr& e, const OperatorWord& w) : scale_(e.scale), m_(static_cast<int>(w.length())) {
    if (m_ > 6) throw std::invalid_argument("operator word longer than 6");
    for (const auto& f : e.factors) {
        std::vector<DerivedComposite> v;
        for (unsigned mask = 0; mask < (1u << m_); ++mask) v.emplace_back(f, w.sub(mask));
        parts_.push_back(std::move(v));
    }
}

double DerivedExpr::operator()(const double* theta) const {
    const unsigned full = (1u << m_) - 1u;
    std::array<double, 64> dp{}, nx{}, val{};
    dp[0] = scale_;
    for (const auto& part : parts_) {
        for (unsigned s = 0; s <= full; ++s) val[s] = part[s](theta);
        for (unsigned mask = 0; mask <= full; ++mask) {
            double acc = 0.0;
            // sub ranges over subsets of mask
            for (unsigned sub = mask;; sub = (sub - 1) & mask) {
                acc += dp[mask & ~sub] * val[sub];
                if (sub == 0) break;
            }
            nx[mask] = acc;
        }
        dp.swap(nx);
    }
    return dp[full];
}

UniFn uni_identity() {
    return [](const Jet& u) { return u; };
}

UniFn uni_exp_neg() {
    return [](const Jet& u) { return exp(-u); };
}

UniFn uni_power(double p, double c) {
    return [p, c](const Jet& u) { return pow(c + u, p); };
}

UniFn uni_bump() {
    return [](const Jet& u) {
        if (u.c[0] >= 1.0) return Jet::constant(0.0, u.K);
        return exp(-reciprocal(1.0 - u));
    };
}

UniFn uni_scaled(UniFn F, double s) {
    return [F = std::move(F), s](const Jet& u) { return F(u) * s; };
}

}  // namespace nilh
