#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nilharmonics/group.hpp"
#include "nilharmonics/poly.hpp"

namespace nilh {

enum class Side { left, right };

// First-order operator sum_k p_k(theta) d/dtheta_k.
struct InvariantField {
    Side side = Side::left;
    int j = 0;
    std::vector<Polynomial> coeffs;

    Polynomial apply(const Polynomial& f) const;
    double coeff_at(int k, const double* theta) const;
};

InvariantField build_field(const GroupSpec& spec, Side side, int j);

// Composition D_0 D_1 ... D_{m-1}; the last entry acts first.
struct OperatorWord {
    std::vector<InvariantField> fields;

    std::size_t length() const { return fields.size(); }
    OperatorWord reversed() const;
    OperatorWord sub(unsigned mask) const;  // keeps positions in mask, order preserved
    std::string str() const;
};

// X^alpha = X_1^{a_1} ... X_n^{a_n} (side left) or Y^alpha (side right);
// tilde reverses the composition order.
OperatorWord make_word(const GroupSpec& spec, Side side, const std::vector<int>& alpha, bool tilde = false);

Polynomial apply_word(const OperatorWord& w, const Polynomial& f);

using ScalarFn = std::function<double(const double*)>;

// 4th-order central differences for the Euclidean partials, exact polynomial coefficients.
double apply_word_fd(const OperatorWord& w, const ScalarFn& f, const double* theta, int n, double h);
double default_fd_step(const double* theta, int n);

// All multi-indices of length n with |alpha| <= order, graded by |alpha|.
std::vector<std::vector<int>> multi_indices(int n, int order);

}  // namespace nilh
