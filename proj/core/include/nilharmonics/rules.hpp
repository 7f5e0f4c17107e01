#pragma once

#include <vector>

namespace nilh {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
};

// n-point Gauss-Legendre on [a, b]
Rule1D gauss_legendre(int n, double a, double b);
// composite Gauss-Legendre: `panels` equal panels of `order` points
Rule1D composite_gauss(int panels, int order, double a, double b);
// composite Simpson with n intervals (n even)
Rule1D simpson(int n, double a, double b);
// midpoint rule with n cells
Rule1D midpoint(int n, double a, double b);

}  // namespace nilh
