#include "nilharmonics/group.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nilh {

namespace {

double mono_eval(const Mono& m, const double* x, int n) {
    double v = 1.0;
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < m[i]; ++e) v *= x[i];
    return v;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

GroupSpec::GroupSpec(std::string name, std::vector<Rational> weights, std::vector<StructureTerm> structure)
    : name_(std::move(name)),
      n_(static_cast<int>(weights.size())),
      weights_(std::move(weights)),
      structure_(std::move(structure)) {
    Q_ = Rational(0);
    for (const auto& w : weights_) {
        d_.push_back(w.value());
        Q_ = Q_ + w;
    }
    validate();
}

double GroupSpec::mono_weight(const Mono& m) const { return nilh::mono_weight(m, d_); }

void GroupSpec::validate() const {
    if (n_ < 1 || n_ > kMaxDim) throw std::invalid_argument("group dimension must be in [1, 8]");
    if (!(weights_[0] == Rational(1))) throw std::invalid_argument("first weight must be 1");
    for (int k = 1; k < n_; ++k)
        if (weights_[k] < weights_[k - 1]) throw std::invalid_argument("weights must be nondecreasing");
    auto wsum = [&](const Mono& m) {
        Rational s(0);
        for (int i = 0; i < n_; ++i) s = s + weights_[i] * Rational(m[i]);
        return s;
    };
    for (const auto& t : structure_) {
        if (t.k < 0 || t.k >= n_) throw std::invalid_argument("structure term: k out of range");
        if (mono_length(t.alpha) == 0 || mono_length(t.beta) == 0)
            throw std::invalid_argument("structure term: alpha and beta must be nonzero");
        for (int i = n_; i < kMaxDim; ++i)
            if (t.alpha[i] || t.beta[i]) throw std::invalid_argument("structure term: index beyond dimension");
        if (!(wsum(t.alpha) + wsum(t.beta) == weights_[t.k]))
            throw std::invalid_argument("structure term: d(alpha)+d(beta) != d_k");
        for (int i = 0; i < n_; ++i)
            if ((t.alpha[i] || t.beta[i]) && !(weights_[i] < weights_[t.k]))
                throw std::invalid_argument("structure term: coordinate not of lower weight");
    }
    // coordinate negation must invert: sum c (-1)^{|beta|} theta^{alpha+beta} == 0 per k
    for (int k = 0; k < n_; ++k) {
        Polynomial p(n_);
        double scale = 0.0;
        for (const auto& t : structure_) {
            if (t.k != k) continue;
            double sgn = (mono_length(t.beta) % 2) ? -1.0 : 1.0;
            p.add_term(mono_add(t.alpha, t.beta), sgn * t.c);
            scale = std::max(scale, std::abs(t.c));
        }
        if (p.max_abs_coeff() > 1e-13 * std::max(1.0, scale))
            throw std::invalid_argument("structure table: coordinate negation is not the inverse");
    }
}

GroupSpec GroupSpec::abelian(int n) {
    return GroupSpec("abelian-R" + std::to_string(n), std::vector<Rational>(static_cast<std::size_t>(n), Rational(1)), {});
}

GroupSpec GroupSpec::heisenberg() {
    std::vector<StructureTerm> s;
    s.push_back({2, mono_unit(0), mono_unit(1), 0.5});
    s.push_back({2, mono_unit(1), mono_unit(0), -0.5});
    return GroupSpec("heisenberg", {Rational(1), Rational(1), Rational(2)}, std::move(s));
}

GroupSpec GroupSpec::random_step2(std::uint64_t seed, int n1, int n2) {
    std::mt19937_64 rng(seed);
    std::vector<Rational> w(static_cast<std::size_t>(n1), Rational(1));
    w.insert(w.end(), static_cast<std::size_t>(n2), Rational(2));
    std::vector<StructureTerm> s;
    for (int k = n1; k < n1 + n2; ++k)
        for (int i = 0; i < n1; ++i)
            for (int j = i + 1; j < n1; ++j) {
                double b = 2.0 * unit_uniform(rng) - 1.0;
                s.push_back({k, mono_unit(i), mono_unit(j), 0.5 * b});
                s.push_back({k, mono_unit(j), mono_unit(i), -0.5 * b});
            }
    return GroupSpec("random-step2-" + std::to_string(seed), std::move(w), std::move(s));
}

void GroupSpec::check_dim(const GroupElement& e) const {
    if (static_cast<int>(e.size()) != n_)
        throw std::invalid_argument("group element has dimension " + std::to_string(e.size()) + ", spec has " +
                                    std::to_string(n_));
}

void GroupSpec::multiply_into(const double* eta, const double* xi, double* out) const {
    for (int k = 0; k < n_; ++k) out[k] = eta[k] + xi[k];
    for (const auto& t : structure_) out[t.k] += t.c * mono_eval(t.alpha, eta, n_) * mono_eval(t.beta, xi, n_);
}

void GroupSpec::dilate_into(double a, const double* eta, double* out) const {
    for (int k = 0; k < n_; ++k) out[k] = std::pow(a, d_[k]) * eta[k];
}

GroupElement GroupSpec::multiply(const GroupElement& eta, const GroupElement& xi) const {
    check_dim(eta);
    check_dim(xi);
    GroupElement out(static_cast<std::size_t>(n_));
    multiply_into(eta.data(), xi.data(), out.data());
    return out;
}

GroupElement GroupSpec::inverse(const GroupElement& eta) const {
    check_dim(eta);
    GroupElement out(eta);
    for (auto& v : out) v = -v;
    return out;
}

GroupElement GroupSpec::dilate(double a, const GroupElement& eta) const {
    check_dim(eta);
    if (!(a > 0.0)) throw std::invalid_argument("dilation parameter must be positive");
    GroupElement out(static_cast<std::size_t>(n_));
    dilate_into(a, eta.data(), out.data());
    return out;
}

std::vector<Polynomial> GroupSpec::left_translation_images(const GroupElement& eta) const {
    check_dim(eta);
    std::vector<Polynomial> img;
    for (int k = 0; k < n_; ++k) {
        Polynomial p = Polynomial::variable(n_, k);
        p.add_term(mono_zero(), eta[k]);
        img.push_back(std::move(p));
    }
    for (const auto& t : structure_)
        img[t.k].add_term(t.beta, t.c * mono_eval(t.alpha, eta.data(), n_));
    return img;
}

std::vector<Polynomial> GroupSpec::right_translation_images(const GroupElement& eta) const {
    check_dim(eta);
    std::vector<Polynomial> img;
    for (int k = 0; k < n_; ++k) {
        Polynomial p = Polynomial::variable(n_, k);
        p.add_term(mono_zero(), eta[k]);
        img.push_back(std::move(p));
    }
    for (const auto& t : structure_)
        img[t.k].add_term(t.alpha, t.c * mono_eval(t.beta, eta.data(), n_));
    return img;
}

Polynomial GroupSpec::compose_left(const Polynomial& p, const GroupElement& eta) const {
    return p.substitute(left_translation_images(eta));
}

Polynomial GroupSpec::compose_right(const Polynomial& p, const GroupElement& eta) const {
    return p.substitute(right_translation_images(eta));
}

Polynomial GroupSpec::compose_dilate(const Polynomial& p, double a) const {
    Polynomial r(n_);
    for (const auto& [m, c] : p.terms()) r.add_term(m, c * std::pow(a, mono_weight(m)));
    return r;
}

Polynomial GroupSpec::compose_inverse(const Polynomial& p) const {
    Polynomial r(n_);
    for (const auto& [m, c] : p.terms()) r.add_term(m, (mono_length(m) % 2) ? -c : c);
    return r;
}

}  // namespace nilh
