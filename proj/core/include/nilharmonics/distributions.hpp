#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nilharmonics/expr.hpp"
#include "nilharmonics/kernels.hpp"
#include "nilharmonics/quadrature.hpp"

namespace nilh {

// One summand X_{j_0} ... X_{j_{m-1}} g, or omega_mu X_{j_0} ... g when weighted.
struct DistributionTerm {
    std::vector<int> word;            // field indices, leftmost acts last
    ScalarFn g;                       // density values
    std::optional<Expr> expr;         // symbolic density when available
    std::vector<double> support_lo;   // empty: whole space
    std::vector<double> support_hi;
    bool weighted = false;
    std::string label;
};

std::vector<int> word_from_alpha(const std::vector<int>& alpha);

struct DensityParams {
    std::string kind;                 // gaussian | bump | identity (unit-mass bump) | power
    std::vector<double> center;       // gaussian, bump
    double scale = 1.0;               // gaussian width or bump radius
    double amplitude = 1.0;
    double eps = 1.0;                 // power: omega_{-Q-eps}
};

DistributionTerm make_term(const HomogeneousNorm& norm, const std::vector<int>& alpha, const DensityParams& p,
                           bool weighted = false);

// T = sum_terms; weighted terms carry the factor omega_mu in front.
class DistributionRep {
public:
    DistributionRep(HomogeneousNorm norm, double mu, std::vector<DistributionTerm> terms);
    const HomogeneousNorm& norm() const { return norm_; }
    const GroupSpec& spec() const { return norm_.spec(); }
    double mu() const { return mu_; }
    const std::vector<DistributionTerm>& terms() const { return terms_; }
    // ||g||_{L^1(omega_{-mu})} per term (for weighted terms ||f||_{L^1}).
    const std::vector<double>& weighted_norms() const { return norms_; }
    bool compact() const;
    int max_order() const;
    // X^beta T
    DistributionRep derivative(const std::vector<int>& word) const;
    // b T rewritten in the unweighted normal form by Leibniz
    DistributionRep multiply(const Expr& b) const;
    // weighted terms moved into the unweighted normal form
    DistributionRep normal_form() const;

private:
    HomogeneousNorm norm_;
    double mu_;
    std::vector<DistributionTerm> terms_;
    std::vector<double> norms_;
};

enum class DecayClass { schwartz, bounded, vanishing };
std::string decay_name(DecayClass c);

struct TestFunction {
    std::string name;
    Expr phi;
    DecayClass tag = DecayClass::schwartz;
    std::vector<double> support_lo;   // effective support used by quadrature; empty: whole space
    std::vector<double> support_hi;
    double operator()(const double* t) const { return phi(t); }
};

// Named test functions: gaussian (scale s), bump (radius s), one, zero.
TestFunction make_test_function(const GroupSpec& spec, const std::string& name, double s = 1.0);

struct TagReport {
    bool pass = false;
    double sup = 0.0;        // sup of |X^alpha phi| over the sweep, |alpha| <= 2
    double tail = 0.0;       // sup |phi| on the outermost shell
};
TagReport verify_tag(const HomogeneousNorm& norm, const TestFunction& phi, double radius = 100.0);

struct QuadOptions {
    int per_axis = 16;          // Gauss points per axis on compact supports (eight times that on a line)
    int sphere_per_axis = 16;   // sphere rule for whole-space integrals
    int radial_panels = 24;     // log-radius panels
    int radial_order = 8;
    double r_min = 1e-6;
    double r_max = 1e5;
    int outer_sphere_per_axis = 10;  // outer polar integrals over eta
    int outer_panels = 10;
    int outer_order = 6;
};

// Lebesgue integral of f over the support box, or over the whole space by log-polar quadrature
// centered at `center`.
double integrate_term_domain(const HomogeneousNorm& norm, const std::vector<double>& lo,
                             const std::vector<double>& hi, const ScalarFn& f, const GroupElement& center,
                             const QuadOptions& q);

// <T, phi> = sum (-1)^{|alpha|} int g Xtilde^alpha phi (weighted terms: Xtilde^alpha(omega phi)).
double pair(const DistributionRep& T, const Expr& phi, const QuadOptions& q = {});

struct Regularized {
    SampledFunction f;
    double l1 = 0.0;
};
// eta -> (T * phi)(eta) for compactly supported phi; L^1 norm over `grid`.
Regularized regularize(const DistributionRep& T, const TestFunction& phi, const Grid& grid,
                       const QuadOptions& q = {});

// (T * P_a)(eta) through the function formula with the Leibniz split for weighted terms.
double poisson_extend(const DistributionRep& T, const KernelSpec& k, double a, const GroupElement& eta,
                      const QuadOptions& q = {});
// X^iota (T * P_a)(eta), derivatives moved onto the kernel under the integral.
double poisson_extend_derivative(const DistributionRep& T, const KernelSpec& k, double a,
                                 const std::vector<int>& iota, const GroupElement& eta, const QuadOptions& q = {});
// (T * (a d_a) P_a)(eta), exact in a.
double poisson_extend_a_derivative(const DistributionRep& T, const KernelSpec& k, double a, const GroupElement& eta,
                                   const QuadOptions& q = {});

struct TwoPath {
    double definition = 0.0;  // <T, phi * P_a^vee> with derivatives applied numerically to the convolution
    double function = 0.0;    // int phi(eta) (T * P_a)(eta) d eta
    double rel_diff() const;
};
TwoPath lemma42_two_path(const DistributionRep& T, const KernelSpec& k, const TestFunction& phi, double a,
                         const QuadOptions& q = {});

struct WitnessReport {
    bool bounded_pass = false;      // (phi * P_a^vee) omega_{Q+Gamma} in B up to order 2
    double bounded_sup = 0.0;
    double bounded_growth = 0.0;
    bool lower_pass = false;        // phi * P_a^vee >= c omega_{-Q-Gamma}
    double lower_constant = 0.0;
    double lower_growth = 0.0;
    std::string status;             // pass | fail | inconclusive
};
WitnessReport sconvolvability_witness(const DistributionRep& T, const KernelSpec& k, const TestFunction& phi,
                                      double a = 1.0, double radius = 32.0, const QuadOptions& q = {});

struct WeightedNormReport {
    double value = 0.0;          // integral up to radius R
    double value_doubled = 0.0;  // up to 2R
    double growth = 0.0;
    bool pass = false;
};
WeightedNormReport extension_weighted_norm(const DistributionRep& T, const KernelSpec& k, double a,
                                           const std::vector<int>& iota, double radius = 64.0,
                                           const QuadOptions& q = {});

struct ConvergenceRow {
    double a = 0.0;
    double extended = 0.0;   // <omega_{-Q-Gamma} (T * P_a), phi> with P normalized to unit mass
    double boundary = 0.0;   // <omega_{-Q-Gamma} T, phi>
    double error = 0.0;
};
struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;          // least-squares slope of log error against log a
    double kernel_mass = 1.0;    // Lebesgue mass used for the normalization
    bool monotone = false;
};
ConvergenceTable boundary_convergence(const DistributionRep& T, const KernelSpec& k, const TestFunction& phi,
                                      const std::vector<double>& a_list, const QuadOptions& q = {});

// sup over etas of |Y_j (S * P_a) - (Y_j S) * P_a|, the left side by finite differences.
double derivative_commute_residual(const DistributionRep& S, const KernelSpec& k, int j, double a,
                                   const std::vector<GroupElement>& etas, const QuadOptions& q = {});

// Delta_{x,a} (T * P_a) by finite differences, classical kernel only; scaled by a^{n+2}.
double extension_harmonicity_residual(const DistributionRep& T, const KernelSpec& k,
                                      const std::vector<std::pair<GroupElement, double>>& pts,
                                      const QuadOptions& q = {});

// |(a d_a)(T * P_a) by finite differences in log a - T * ((a d_a) P_a)|, max over etas.
double a_derivative_residual(const DistributionRep& T, const KernelSpec& k, double a,
                             const std::vector<GroupElement>& etas, const QuadOptions& q = {});

}  // namespace nilh
