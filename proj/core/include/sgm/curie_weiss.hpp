#pragma once

#include <vector>

namespace sgm {

// Exact law of the magnetization per site on the grid S_n = {-1, -1+2/n, .., 1}.
struct CwPmf {
    int n = 0;
    double beta = 0.0, B = 0.0;
    std::vector<double> m;  // grid points, M = n m even-offset lattice
    std::vector<double> p;  // probabilities, sum exactly renormalized to 1
    double log_z = 0.0;     // log partition function of the pair-sum form
};
CwPmf magnetization_pmf(int n, double beta, double B);

// phi(m) = B m + beta m^2 / 2 + H((1+m)/2), the exponential rate of the pmf.
double cw_phi(double beta, double B, double m);

struct CwFreeEntropy {
    double phi_star = 0.0;
    std::vector<double> maximizers;
};
// sup of phi over [-1,1] with its arg-max set (two points when B=0, beta>1).
CwFreeEntropy cw_free_entropy(double beta, double B);

struct CwFixedPoints {
    std::vector<double> roots;  // ascending solutions of m = tanh(beta m + B)
    bool tangent = false;       // adjacent roots merged within the gap threshold
    double b_star = 0.0;        // tangency field, only meaningful for beta > 1
};
// Root set of the mean-field equation; negative B handled by (B,m) -> (-B,-m).
CwFixedPoints cw_fixed_points(double beta, double B);

// Field strength at which the two lower solutions of m = tanh(beta m + B)
// merge; defined for beta > 1, by bisection on the discriminant gap.
double cw_b_star(double beta);

}  // namespace sgm
