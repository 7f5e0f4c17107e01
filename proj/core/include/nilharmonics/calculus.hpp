#pragma once

#include <map>
#include <vector>

#include "nilharmonics/expr.hpp"
#include "nilharmonics/fields.hpp"
#include "nilharmonics/quadrature.hpp"

namespace nilh {

// Polynomial-coefficient Euclidean operator sum_gamma c_gamma(theta) d^gamma.
using EuclidOp = std::map<Mono, Polynomial>;

EuclidOp word_as_euclidean(const OperatorWord& w, int n);
Polynomial apply_euclidean(const EuclidOp& op, const Polynomial& f);

// Ytilde^alpha = sum_beta Q[beta](theta) X^beta
struct ConversionTable {
    std::vector<int> alpha;
    std::map<Mono, Polynomial> Q;
};

ConversionTable build_conversion(const GroupSpec& spec, const std::vector<int>& alpha, int max_order = 3);
// Process-wide cache; entries are immutable once inserted.
const ConversionTable& conversion_cached(const GroupSpec& spec, const std::vector<int>& alpha);

// max |Ytilde^alpha m - sum Q X^beta m| over monomials m with d(m) <= d(alpha) + extra
double conversion_monomial_residual(const GroupSpec& spec, const ConversionTable& t, double extra = 2.0);
// max over monomials of |deg_hom(Q monomial) - (d(beta) - d(alpha))|
double conversion_homogeneity_defect(const GroupSpec& spec, const ConversionTable& t);

// Both sides of (-1)^{|a|} Xtilde^a phi(xi) = sum_b (-1)^{|b|} [Xtilde^b_eta (Q_b(eta) phi(xi eta))]_{eta=0}.
double fundlink_residual(const GroupSpec& spec, const ConversionTable& t, const Polynomial& phi,
                         const std::vector<GroupElement>& xis);
double fundlink_residual(const GroupSpec& spec, const ConversionTable& t, const Expr& phi,
                         const std::vector<GroupElement>& xis);
double fundlink_residual_fd(const GroupSpec& spec, const ConversionTable& t, const ScalarFn& phi,
                            const std::vector<GroupElement>& xis);

// W(fg) - sum over ordered subwords (W_S f)(W_{S^c} g)
double leibniz_residual(const OperatorWord& w, const Polynomial& f, const Polynomial& g,
                        const std::vector<GroupElement>& pts);
double leibniz_residual(const OperatorWord& w, const Expr& f, const Expr& g, const std::vector<GroupElement>& pts);

struct IbpResidual {
    double left = 0.0;   // |int X^a f g - (-1)^{|a|} int f Xtilde^a g|
    double right = 0.0;  // same with Y, Ytilde
};

IbpResidual integrate_by_parts_residual(const GroupSpec& spec, const std::vector<int>& alpha, const Expr& f,
                                        const Expr& g, const Grid& grid);

struct ConvolutionResiduals {
    double left_commute = 0.0;    // X^a(f*g) - f*(X^a g)
    double right_commute = 0.0;   // Y^a(f*g) - (Y^a f)*g
    double move_left = 0.0;       // (X^a f)*g - f*(Ytilde^a g)
    double move_tilde = 0.0;      // (Xtilde^a f)*g - f*(Y^a g)
    double max() const;
};

// f, g decay inside f_grid; derivatives of f*g taken by finite differences.
ConvolutionResiduals convolution_identity_residuals(const GroupSpec& spec, const std::vector<int>& alpha, const Expr& f,
                                                    const Expr& g, const Grid& f_grid,
                                                    const std::vector<GroupElement>& etas);

// Euclidean Gaussian exp(-|theta - c|^2 / s^2) as an Expr
Expr gaussian_bump(int n, const std::vector<double>& center, double s, double amplitude = 1.0);
// exp(-1/(1-|theta-c|^2/s^2)) inside the Euclidean ball of radius s
Expr compact_bump(int n, const std::vector<double>& center, double s, double amplitude = 1.0);
// phi(xi .) as an Expr in eta
Expr left_translate(const GroupSpec& spec, const Expr& e, const GroupElement& xi);

}  // namespace nilh
