#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nilharmonics/expr.hpp"
#include "nilharmonics/norm.hpp"
#include "nilharmonics/quadrature.hpp"

namespace nilh {

enum class KernelFamily { classical_abelian, model_power };

std::string family_name(KernelFamily f);
KernelFamily parse_family(const std::string& s);

// P(eta) = c (1 + N(eta))^{-(Q+Gamma)/2M}; the classical family is the Euclidean case with Gamma = 1.
class KernelSpec {
public:
    static KernelSpec classical(int n);
    static KernelSpec model_power(HomogeneousNorm norm, double Gamma);
    static KernelSpec make(const GroupSpec& spec, KernelFamily family, double Gamma);

    KernelFamily family() const { return family_; }
    const HomogeneousNorm& norm() const { return norm_; }
    const GroupSpec& spec() const { return norm_.spec(); }
    double Gamma() const { return Gamma_; }
    double c() const { return c_; }
    double Q() const { return norm_.spec().Q(); }

    double operator()(const double* eta) const;
    // a^{-Q} P(delta_{1/a} eta)
    double dilated(double a, const double* eta) const;
    // (a d/da)^k P_a(eta), exact through jets in log a
    double a_derivative(int k, double a, const double* eta) const;

    UniFn profile() const;
    Expr expr() const;
    Expr dilated_expr(double a) const;
    // Lebesgue mass in exponential coordinates (closed form through the Beta function)
    double mass() const;

private:
    KernelSpec(HomogeneousNorm norm, KernelFamily family, double Gamma, double c);
    HomogeneousNorm norm_;
    KernelFamily family_;
    double Gamma_;
    double c_;
    double expo_;  // -(Q+Gamma)/2M
};

// W P evaluated on dilates: (W P_a)(eta) = a^{-Q-d(W)} (W P)(delta_{1/a} eta) for homogeneous W.
class KernelDerivative {
public:
    KernelDerivative(const KernelSpec& k, const OperatorWord& w);
    double operator()(double a, const double* eta) const;
    double weight() const { return dw_; }

private:
    const GroupSpec* spec_;
    double Q_;
    double dw_;
    std::shared_ptr<DerivedExpr> d_;
};

struct EstimateResult {
    std::string name;
    double sup_ratio = 0.0;
    double sup_ratio_doubled = 0.0;
    double growth = 0.0;
    bool pass = false;
};

struct CertificateReport {
    std::vector<EstimateResult> estimates;
    double lower_constant = 0.0;  // sup of omega/P, the 1/C side of (i)
    bool pass = false;
};

struct CertifyOptions {
    int order_alpha = 2;
    int order_k = 2;
    double radius = 100.0;
    int directions = 24;
    int radii = 60;
    std::vector<double> a_values{0.25, 1.0, 4.0};
    double max_growth = 0.05;
    std::uint64_t seed = 7;
};

CertificateReport certify_RGamma(const KernelSpec& k, const CertifyOptions& opt = {});

// max a^{Q+2} |Laplacian_{x,a} P_a(x)| over the points; classical family only.
double harmonicity_residual(const KernelSpec& k, const std::vector<std::pair<GroupElement, double>>& pts);

// sup over xs of |P_a * P_b - P_{a+b}|; classical family only.
double semigroup_residual(const KernelSpec& k, double a, double b, const std::vector<GroupElement>& xs);

}  // namespace nilh
