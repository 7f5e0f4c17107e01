#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nilh {

inline constexpr int kMaxDim = 8;

// Exponent vector theta^alpha; unused trailing slots stay zero.
using Mono = std::array<std::uint8_t, kMaxDim>;

Mono mono_zero();
Mono mono_unit(int j);
Mono mono_from(const std::vector<int>& alpha);
std::vector<int> mono_to_vector(const Mono& m, int n);
int mono_length(const Mono& m);
Mono mono_add(const Mono& a, const Mono& b);
double mono_weight(const Mono& m, std::span<const double> weights);
std::string mono_str(const Mono& m, int n);

// Sparse real polynomial in theta_1..theta_n.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int n) : n_(n) {}

    static Polynomial constant(int n, double c);
    static Polynomial variable(int n, int j);
    static Polynomial monomial(int n, const Mono& m, double c = 1.0);

    int dim() const { return n_; }
    const std::map<Mono, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add_term(const Mono& m, double c);
    double coeff(const Mono& m) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

    Polynomial derivative(int j) const;
    Polynomial pow(int k) const;
    double eval(std::span<const double> theta) const;

    // P(images[0], ..., images[n-1]); images share a common dimension.
    Polynomial substitute(const std::vector<Polynomial>& images) const;

    // Drops coefficients with |c| <= tol * max|c|.
    Polynomial pruned(double rel_tol) const;
    double max_abs_coeff() const;
    int max_length() const;

    std::string str() const;

private:
    int n_ = 0;
    std::map<Mono, double> terms_;
};

// Flattened polynomial for hot evaluation loops.
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const Polynomial& p);
    double operator()(const double* theta) const;
    bool empty() const { return coef_.empty(); }

private:
    int n_ = 0;
    int max_exp_ = 0;
    std::vector<double> coef_;
    std::vector<std::uint8_t> exps_;
};

}  // namespace nilh
