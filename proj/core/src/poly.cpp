#include "nilharmonics/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nilh {

Mono mono_zero() { return Mono{}; }

Mono mono_unit(int j) {
    Mono m{};
    m[static_cast<std::size_t>(j)] = 1;
    return m;
}

Mono mono_from(const std::vector<int>& alpha) {
    if (alpha.size() > static_cast<std::size_t>(kMaxDim)) throw std::invalid_argument("multi-index too long");
    Mono m{};
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] < 0 || alpha[i] > 255) throw std::invalid_argument("multi-index entry out of range");
        m[i] = static_cast<std::uint8_t>(alpha[i]);
    }
    return m;
}

std::vector<int> mono_to_vector(const Mono& m, int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)];
    return v;
}

int mono_length(const Mono& m) {
    int s = 0;
    for (auto e : m) s += e;
    return s;
}

Mono mono_add(const Mono& a, const Mono& b) {
    Mono c{};
    for (int i = 0; i < kMaxDim; ++i) c[i] = static_cast<std::uint8_t>(a[i] + b[i]);
    return c;
}

double mono_weight(const Mono& m, std::span<const double> weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * m[i];
    return s;
}

std::string mono_str(const Mono& m, int n) {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << int(m[i]);
    os << ')';
    return os.str();
}

Polynomial Polynomial::constant(int n, double c) {
    Polynomial p(n);
    p.add_term(mono_zero(), c);
    return p;
}

Polynomial Polynomial::variable(int n, int j) {
    Polynomial p(n);
    p.add_term(mono_unit(j), 1.0);
    return p;
}

Polynomial Polynomial::monomial(int n, const Mono& m, double c) {
    Polynomial p(n);
    p.add_term(m, c);
    return p;
}

void Polynomial::add_term(const Mono& m, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double Polynomial::coeff(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (n_ == 0) n_ = o.n_;
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (n_ == 0) n_ = o.n_;
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r(std::max(a.n_, b.n_));
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(mono_add(ma, mb), ca * cb);
    return r;
}

Polynomial Polynomial::derivative(int j) const {
    Polynomial r(n_);
    for (const auto& [m, c] : terms_) {
        if (m[j] == 0) continue;
        Mono d = m;
        d[j] = static_cast<std::uint8_t>(d[j] - 1);
        r.add_term(d, c * m[j]);
    }
    return r;
}

Polynomial Polynomial::pow(int k) const {
    Polynomial r = constant(n_, 1.0);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

double Polynomial::eval(std::span<const double> theta) const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c;
        for (int i = 0; i < n_; ++i)
            for (int e = 0; e < m[i]; ++e) t *= theta[static_cast<std::size_t>(i)];
        s += t;
    }
    return s;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& images) const {
    if (static_cast<int>(images.size()) != n_) throw std::invalid_argument("substitute: arity mismatch");
    int m = images.empty() ? 0 : images[0].dim();
    // powers[i][e] = images[i]^e, built lazily
    std::vector<std::vector<Polynomial>> powers(images.size());
    auto power = [&](int i, int e) -> const Polynomial& {
        auto& v = powers[static_cast<std::size_t>(i)];
        if (v.empty()) v.push_back(constant(m, 1.0));
        while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * images[static_cast<std::size_t>(i)]);
        return v[static_cast<std::size_t>(e)];
    };
    Polynomial r(m);
    for (const auto& [mono, c] : terms_) {
        Polynomial t = constant(m, c);
        for (int i = 0; i < n_; ++i)
            if (mono[i] > 0) t = t * power(i, mono[i]);
        r += t;
    }
    return r;
}

double Polynomial::max_abs_coeff() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
    return s;
}

Polynomial Polynomial::pruned(double rel_tol) const {
    double cut = rel_tol * max_abs_coeff();
    Polynomial r(n_);
    for (const auto& [m, c] : terms_)
        if (std::abs(c) > cut) r.terms_.emplace(m, c);
    return r;
}

int Polynomial::max_length() const {
    int s = 0;
    for (const auto& [m, c] : terms_) s = std::max(s, mono_length(m));
    return s;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        for (int i = 0; i < n_; ++i) {
            if (m[i] == 0) continue;
            os << "*t" << (i + 1);
            if (m[i] > 1) os << '^' << int(m[i]);
        }
    }
    return os.str();
}

CompiledPoly::CompiledPoly(const Polynomial& p) : n_(p.dim()) {
    for (const auto& [m, c] : p.terms()) {
        coef_.push_back(c);
        for (int i = 0; i < n_; ++i) {
            exps_.push_back(m[i]);
            max_exp_ = std::max<int>(max_exp_, m[i]);
        }
    }
    if (max_exp_ > 31) throw std::invalid_argument("CompiledPoly: exponent too large");
}

double CompiledPoly::operator()(const double* theta) const {
    if (coef_.empty()) return 0.0;
    double pw[kMaxDim][32];
    for (int i = 0; i < n_; ++i) {
        pw[i][0] = 1.0;
        for (int e = 1; e <= max_exp_; ++e) pw[i][e] = pw[i][e - 1] * theta[i];
    }
    double s = 0.0;
    const std::uint8_t* ex = exps_.data();
    for (std::size_t t = 0; t < coef_.size(); ++t, ex += n_) {
        double v = coef_[t];
        for (int i = 0; i < n_; ++i) v *= pw[i][ex[i]];
        s += v;
    }
    return s;
}

}  // namespace nilh
