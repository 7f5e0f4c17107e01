#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace nilh {

inline constexpr int kMaxJet = 10;

// Truncated Taylor series c[0] + c[1] e + ... + c[K] e^K.
struct Jet {
    int K = 0;
    std::array<double, kMaxJet + 1> c{};

    static Jet constant(double v, int K) {
        Jet j;
        j.K = K;
        j.c[0] = v;
        return j;
    }
    static Jet seed(double u, int K) {
        Jet j = constant(u, K);
        if (K >= 1) j.c[1] = 1.0;
        return j;
    }
    double value() const { return c[0]; }
    // k-th derivative of the represented function at the seed point
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<std::size_t>(k)] * f;
    }
};

inline Jet operator+(Jet a, const Jet& b) {
    for (int k = 0; k <= a.K; ++k) a.c[k] += b.c[k];
    return a;
}
inline Jet operator-(Jet a, const Jet& b) {
    for (int k = 0; k <= a.K; ++k) a.c[k] -= b.c[k];
    return a;
}
inline Jet operator-(Jet a) {
    for (int k = 0; k <= a.K; ++k) a.c[k] = -a.c[k];
    return a;
}
inline Jet operator+(Jet a, double s) {
    a.c[0] += s;
    return a;
}
inline Jet operator+(double s, Jet a) { return a + s; }
inline Jet operator-(Jet a, double s) {
    a.c[0] -= s;
    return a;
}
inline Jet operator-(double s, const Jet& a) { return -a + s; }
inline Jet operator*(Jet a, double s) {
    for (int k = 0; k <= a.K; ++k) a.c[k] *= s;
    return a;
}
inline Jet operator*(double s, Jet a) { return a * s; }
inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.K = a.K;
    for (int k = 0; k <= a.K; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
        r.c[k] = s;
    }
    return r;
}

inline Jet exp(const Jet& f) {
    Jet g;
    g.K = f.K;
    g.c[0] = std::exp(f.c[0]);
    for (int k = 1; k <= f.K; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * f.c[j] * g.c[k - j];
        g.c[k] = s / k;
    }
    return g;
}

inline Jet log(const Jet& f) {
    if (!(f.c[0] > 0.0)) throw std::domain_error("jet log of nonpositive value");
    Jet g;
    g.K = f.K;
    g.c[0] = std::log(f.c[0]);
    for (int k = 1; k <= f.K; ++k) {
        double s = 0.0;
        for (int j = 1; j < k; ++j) s += j * g.c[j] * f.c[k - j];
        g.c[k] = (f.c[k] - s / k) / f.c[0];
    }
    return g;
}

// f^p for real p, f(0) > 0
inline Jet pow(const Jet& f, double p) {
    if (!(f.c[0] > 0.0)) throw std::domain_error("jet pow of nonpositive value");
    Jet g;
    g.K = f.K;
    g.c[0] = std::pow(f.c[0], p);
    for (int k = 1; k <= f.K; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += (p * j - (k - j)) * f.c[j] * g.c[k - j];
        g.c[k] = s / (k * f.c[0]);
    }
    return g;
}

inline Jet reciprocal(const Jet& f) {
    Jet g;
    g.K = f.K;
    g.c[0] = 1.0 / f.c[0];
    for (int k = 1; k <= f.K; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += f.c[j] * g.c[k - j];
        g.c[k] = -s / f.c[0];
    }
    return g;
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

// Univariate function acting on jets: the seed jet u + e yields all derivatives at u.
using UniFn = std::function<Jet(const Jet&)>;

inline void uni_derivatives(const UniFn& f, double u, int K, double* out) {
    Jet j = f(Jet::seed(u, K));
    for (int k = 0; k <= K; ++k) out[k] = j.derivative(k);
}

}  // namespace nilh
