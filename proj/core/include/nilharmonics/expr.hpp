#pragma once

#include <utility>
#include <vector>

#include "nilharmonics/fields.hpp"
#include "nilharmonics/jet.hpp"

namespace nilh {

// f(theta) = F(P(theta)).
struct Composite {
    UniFn F;
    Polynomial P;
    CompiledPoly Pc;

    Composite() = default;
    Composite(UniFn f, Polynomial p) : F(std::move(f)), P(std::move(p)), Pc(P) {}

    static Composite poly(const Polynomial& p);
    double operator()(const double* theta) const;
};

// W f = sum_k F^{(k)}(P) R_k, exactly.
class DerivedComposite {
public:
    DerivedComposite(const Composite& c, const OperatorWord& w);
    double operator()(const double* theta) const;
    const std::vector<Polynomial>& R() const { return R_; }

private:
    UniFn F_;
    bool identity_ = false;
    CompiledPoly P_;
    std::vector<Polynomial> R_;
    std::vector<CompiledPoly> Rc_;
};

// scale * prod_i F_i(P_i(theta)).
struct Expr {
    int n = 0;
    double scale = 1.0;
    std::vector<Composite> factors;

    static Expr of(int n, Composite c, double scale = 1.0);
    Expr times(const Expr& o) const;
    double operator()(const double* theta) const;
};

// W applied to an Expr through ordered-subword Leibniz; never materializes Lambda coefficients.
class DerivedExpr {
public:
    DerivedExpr(const Expr& e, const OperatorWord& w);
    double operator()(const double* theta) const;

private:
    double scale_;
    int m_;
    std::vector<std::vector<DerivedComposite>> parts_;  // [factor][mask]
};

// Common univariate profiles.
UniFn uni_identity();
UniFn uni_exp_neg();                   // exp(-u)
UniFn uni_power(double p, double c);   // (c + u)^p
UniFn uni_bump();                      // exp(-1/(1-u)) on u<1, else 0
UniFn uni_scaled(UniFn F, double s);   // s * F(u)

}  // namespace nilh
