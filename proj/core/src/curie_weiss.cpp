#include "sgm/curie_weiss.hpp"

#include <algorithm>
#include <cmath>

#include "sgm/errors.hpp"

namespace sgm {

CwPmf magnetization_pmf(int n, double beta, double B) {
    if (n < 1) throw ValidationError("magnetization_pmf: n must be >= 1");
    if (n > 1000000) throw ValidationError("magnetization_pmf: n too large (> 1e6)");
    if (beta < 0.0) throw ValidationError("magnetization_pmf: beta must be >= 0");
    CwPmf out;
    out.n = n;
    out.beta = beta;
    out.B = B;
    std::vector<double> logw(n + 1);
    double hi = -1e300;
    for (int k = 0; k <= n; ++k) {  // k = (n + M) / 2
        double M = 2.0 * k - n;
        double logbin = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(n - k + 1.0);
        logw[k] = logbin + B * M + beta * M * M / (2.0 * n) - beta / 2.0;
        hi = std::max(hi, logw[k]);
    }
    double z = 0.0;
    for (int k = 0; k <= n; ++k) z += std::exp(logw[k] - hi);
    out.log_z = hi + std::log(z);
    out.m.resize(n + 1);
    out.p.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        out.m[k] = (2.0 * k - n) / n;
        out.p[k] = std::exp(logw[k] - hi) / z;
    }
    return out;
}

double cw_phi(double beta, double B, double m) {
    double u = (1.0 + m) / 2.0;
    double entropy = 0.0;
    if (u > 0.0 && u < 1.0)
        entropy = -u * std::log(u) - (1.0 - u) * std::log(1.0 - u);
    return B * m + 0.5 * beta * m * m + entropy;
}

namespace {

// Ascending roots of f(m) = tanh(beta m + B) - m on [-1, 1] by grid isolation
// plus bisection.
std::vector<double> mean_field_roots(double beta, double B) {
    auto f = [&](double m) { return std::tanh(beta * m + B) - m; };
    const int grid = 10000;
    std::vector<double> roots;
    double prev_m = -1.0, prev_f = f(-1.0);
    for (int i = 1; i <= grid; ++i) {
        double m = -1.0 + 2.0 * i / grid;
        double fv = f(m);
        if (prev_f == 0.0) {
            roots.push_back(prev_m);
        } else if ((prev_f > 0.0) != (fv > 0.0)) {
            double lo = prev_m, hiv = m;
            for (int it = 0; it < 200 && hiv - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hiv);
                if ((f(mid) > 0.0) == (prev_f > 0.0))
                    lo = mid;
                else
                    hiv = mid;
            }
            roots.push_back(0.5 * (lo + hiv));
        }
        prev_m = m;
        prev_f = fv;
    }
    return roots;
}

// min over the descending branch of tanh(beta m + B) - m; vanishes exactly at
// the tangency field B_*.
double discriminant_gap(double beta, double B) {
    double s = std::sqrt(1.0 - 1.0 / beta);  // where the slope of tanh equals 1
    double m = (-std::atanh(s) - B) / beta;
    return -s - m;
}

}  // namespace

CwFixedPoints cw_fixed_points(double beta, double B) {
    if (beta < 0.0) throw ValidationError("cw_fixed_points: beta must be >= 0");
    CwFixedPoints out;
    bool flipped = B < 0.0;
    double b = std::abs(B);
    out.roots = mean_field_roots(beta, b);
    if (flipped) {
        for (double& r : out.roots) r = -r;
        std::sort(out.roots.begin(), out.roots.end());
    }
    for (std::size_t i = 0; i + 1 < out.roots.size(); ++i)
        if (out.roots[i + 1] - out.roots[i] < 1e-10) out.tangent = true;
    if (beta > 1.0) out.b_star = cw_b_star(beta);
    return out;
}

double cw_b_star(double beta) {
    if (beta <= 1.0) throw ValidationError("cw_b_star: defined only for beta > 1");
    double lo = 0.0, hi = beta;  // gap < 0 at B=0, > 0 for large B
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        (discriminant_gap(beta, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CwFreeEntropy cw_free_entropy(double beta, double B) {
    if (beta < 0.0) throw ValidationError("cw_free_entropy: beta must be >= 0");
    CwFixedPoints fixed = cw_fixed_points(beta, B);
    CwFreeEntropy out;
    out.phi_star = -1e300;
    for (double r : fixed.roots) out.phi_star = std::max(out.phi_star, cw_phi(beta, B, r));
    for (double r : fixed.roots)
        if (cw_phi(beta, B, r) >= out.phi_star - 1e-12) out.maximizers.push_back(r);
    return out;
}

}  // namespace sgm
