#include "nilharmonics/fields.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nilh {

Polynomial InvariantField::apply(const Polynomial& f) const {
    Polynomial r(f.dim());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k].is_zero()) continue;
        Polynomial d = f.derivative(static_cast<int>(k));
        if (d.is_zero()) continue;
        r += coeffs[k] * d;
    }
    return r;
}

double InvariantField::coeff_at(int k, const double* theta) const {
    const auto& p = coeffs[static_cast<std::size_t>(k)];
    if (p.is_zero()) return 0.0;
    return p.eval(std::span<const double>(theta, static_cast<std::size_t>(p.dim())));
}

InvariantField build_field(const GroupSpec& spec, Side side, int j) {
    const int n = spec.dim();
    if (j < 0 || j >= n) throw std::invalid_argument("build_field: index out of range");
    InvariantField f;
    f.side = side;
    f.j = j;
    f.coeffs.assign(static_cast<std::size_t>(n), Polynomial(n));
    f.coeffs[static_cast<std::size_t>(j)] = Polynomial::constant(n, 1.0);
    const Mono ej = mono_unit(j);
    // d/ds theta_k(theta * s e_j) picks terms linear in the right factor with beta = e_j;
    // the right field mirrors this with alpha = e_j.
    for (const auto& t : spec.structure()) {
        if (side == Side::left && t.beta == ej) f.coeffs[static_cast<std::size_t>(t.k)].add_term(t.alpha, t.c);
        if (side == Side::right && t.alpha == ej) f.coeffs[static_cast<std::size_t>(t.k)].add_term(t.beta, t.c);
    }
    return f;
}

OperatorWord OperatorWord::reversed() const {
    OperatorWord w;
    w.fields.assign(fields.rbegin(), fields.rend());
    return w;
}

OperatorWord OperatorWord::sub(unsigned mask) const {
    OperatorWord w;
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (mask & (1u << i)) w.fields.push_back(fields[i]);
    return w;
}

std::string OperatorWord::str() const {
    std::ostringstream os;
    for (const auto& f : fields) os << (f.side == Side::left ? 'X' : 'Y') << (f.j + 1);
    return fields.empty() ? "I" : os.str();
}

OperatorWord make_word(const GroupSpec& spec, Side side, const std::vector<int>& alpha, bool tilde) {
    if (static_cast<int>(alpha.size()) != spec.dim()) throw std::invalid_argument("multi-index length mismatch");
    OperatorWord w;
    for (int j = 0; j < spec.dim(); ++j) {
        if (alpha[static_cast<std::size_t>(j)] < 0) throw std::invalid_argument("negative multi-index entry");
        if (alpha[static_cast<std::size_t>(j)] == 0) continue;
        InvariantField f = build_field(spec, side, j);
        for (int r = 0; r < alpha[static_cast<std::size_t>(j)]; ++r) w.fields.push_back(f);
    }
    return tilde ? w.reversed() : w;
}

Polynomial apply_word(const OperatorWord& w, const Polynomial& f) {
    Polynomial r = f;
    for (auto it = w.fields.rbegin(); it != w.fields.rend(); ++it) r = it->apply(r);
    return r;
}

namespace {

double fd_rec(const OperatorWord& w, std::size_t pos, const ScalarFn& f, const double* theta, int n, double h) {
    if (pos == w.fields.size()) return f(theta);
    const auto& fld = w.fields[pos];
    double out = 0.0;
    double shifted[kMaxDim];
    for (int k = 0; k < n; ++k) {
        double c = fld.coeff_at(k, theta);
        if (c == 0.0) continue;
        for (int i = 0; i < n; ++i) shifted[i] = theta[i];
        const double steps[4] = {2.0, 1.0, -1.0, -2.0};
        const double wts[4] = {-1.0, 8.0, -8.0, 1.0};
        double d = 0.0;
        for (int s = 0; s < 4; ++s) {
            shifted[k] = theta[k] + steps[s] * h;
            d += wts[s] * fd_rec(w, pos + 1, f, shifted, n, h);
        }
        out += c * d / (12.0 * h);
    }
    return out;
}

}  // namespace

double apply_word_fd(const OperatorWord& w, const ScalarFn& f, const double* theta, int n, double h) {
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(theta[i])) throw std::domain_error("apply_word_fd: non-finite evaluation point");
    double v = fd_rec(w, 0, f, theta, n, h);
    if (!std::isfinite(v)) throw std::domain_error("apply_word_fd: non-finite value in stencil");
    return v;
}

double default_fd_step(const double* theta, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += theta[i] * theta[i];
    return 1e-3 * (1.0 + std::sqrt(s));
}

std::vector<std::vector<int>> multi_indices(int n, int order) {
    std::vector<std::vector<int>> out;
    for (int len = 0; len <= order; ++len) {
        std::vector<int> a(static_cast<std::size_t>(n), 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n - 1) {
                a[static_cast<std::size_t>(pos)] = left;
                out.push_back(a);
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[static_cast<std::size_t>(pos)] = v;
                rec(pos + 1, left - v);
            }
        };
        rec(0, len);
    }
    return out;
}

}  // namespace nilh
