#include "sgm/tree_cavity.hpp"

#include <algorithm>
#include <cmath>

#include "sgm/errors.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

double gamma_of(double theta) { return -0.5 * std::log1p(-theta * theta); }

// log( e^{B} (1 + theta tanh h)^p + e^{-B} (1 - theta tanh h)^p ), stable.
double vertex_bracket(double B, double theta, double h, int p) {
    double t = theta * std::tanh(h);
    double lp = B + p * std::log1p(t);
    double lm = -B + p * std::log1p(-t);
    double hi = std::max(lp, lm);
    return hi + std::log1p(std::exp(-std::abs(lp - lm)));
}

}  // namespace

double Population::mean_tanh() const {
    double s = 0.0;
    for (double v : h) s += std::tanh(v);
    return h.empty() ? 0.0 : s / h.size();
}

double Population::mean() const {
    double s = 0.0;
    for (double v : h) s += v;
    return h.empty() ? 0.0 : s / h.size();
}

std::vector<double> Population::quantiles(const std::vector<double>& ps) const {
    std::vector<double> sorted = h;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    for (double p : ps) {
        double pos = p * (sorted.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        out.push_back(sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]));
    }
    return out;
}

double kregular_beta_c(int k) {
    if (k < 3) throw ValidationError("kregular_beta_c: k must be >= 3");
    return std::atanh(1.0 / (k - 1));
}

KRegularRecursion kregular_recursion(int k, double beta, double B, int ell) {
    if (k < 2) throw ValidationError("kregular_recursion: k must be >= 2");
    if (ell < 0) throw ValidationError("kregular_recursion: depth must be >= 0");
    double theta = std::tanh(beta);
    KRegularRecursion out;
    out.upward.resize(ell + 1);
    double prev = 0.0;  // h_{-1}
    for (int r = 0; r <= ell; ++r) {
        out.upward[r] = B + (k - 1) * std::atanh(theta * std::tanh(prev));
        prev = out.upward[r];
    }
    out.downward.resize(ell + 1);
    out.downward[ell] = (ell >= 1) ? out.upward[ell - 1] : 0.0;  // h_ell^ell = h_{ell-1}
    for (int r = ell - 1; r >= 0; --r)
        out.downward[r] = B + (k - 2) * std::atanh(theta * std::tanh(out.upward[r])) +
                          std::atanh(theta * std::tanh(out.downward[r + 1]));
    return out;
}

double kregular_fixed_point(int k, double beta, double B) {
    if (k < 2) throw ValidationError("kregular_fixed_point: k must be >= 2");
    if (B < 0.0) return -kregular_fixed_point(k, beta, -B);
    double theta = std::tanh(beta);
    if (theta == 0.0) return B;
    double hmax = B + (k - 1) * std::atanh(theta);
    auto g = [&](double h) { return h - B - (k - 1) * std::atanh(theta * std::tanh(h)); };
    // Largest root: scan from the top for the highest sign change, then bisect.
    const int grid = 10000;
    double lo = -1.0, hi = -1.0;
    double prev_h = hmax, prev_g = g(hmax);
    for (int i = grid - 1; i >= 0; --i) {
        double h = hmax * i / grid;
        double gv = g(h);
        if (gv <= 0.0 && prev_g > 0.0) {
            lo = h;
            hi = prev_h;
            break;
        }
        prev_h = h;
        prev_g = gv;
    }
    if (lo < 0.0) return 0.0;  // no nontrivial root (subcritical, B = 0)
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TreeFreeEntropyParts kregular_free_entropy(int k, double beta, double B, double h) {
    if (k < 2) throw ValidationError("kregular_free_entropy: k must be >= 2");
    double theta = std::tanh(beta);
    TreeFreeEntropyParts parts;
    parts.edge_term = 0.5 * k * gamma_of(theta);
    parts.mixed_term = -0.5 * k * std::log1p(theta * std::tanh(h) * std::tanh(h));
    parts.vertex_term = vertex_bracket(B, theta, h, k);
    return parts;
}

double kregular_tree_log_z(int k, double beta, double B, int ell) {
    if (k < 3) throw ValidationError("kregular_tree_log_z: k must be >= 3");
    if (ell < 0) throw ValidationError("kregular_tree_log_z: depth must be >= 0");
    double theta = std::tanh(beta);
    // h_r for r = -1 .. ell-1
    std::vector<double> h(ell + 1);
    h[0] = 0.0;  // h_{-1}
    for (int r = 0; r < ell; ++r)
        h[r + 1] = B + (k - 1) * std::atanh(theta * std::tanh(h[r]));
    // generation sizes n_0 = 1 (root), n_t = k (k-1)^{t-1}
    std::vector<double> n_t(ell + 1);
    n_t[0] = 1.0;
    for (int t = 1; t <= ell; ++t) n_t[t] = (t == 1) ? k : n_t[t - 1] * (k - 1);
    double total = 0.0;
    for (double v : n_t) total += v;
    double log_z = (total - 1.0) * gamma_of(theta);  // one gamma per edge
    log_z += vertex_bracket(B, theta, h[ell], k);    // root bracket at h_{ell-1}
    for (int r = 0; r < ell; ++r)
        log_z += n_t[ell - r] * vertex_bracket(B, theta, h[r], k - 1);  // h_{r-1}
    return log_z;
}

double canopy_free_entropy(int k, double beta, double B) {
    if (k < 3) throw ValidationError("canopy_free_entropy: k must be >= 3");
    double theta = std::tanh(beta);
    double value = gamma_of(theta);
    double h_prev = 0.0;  // h_{r-1}, starting at h_{-1}
    double weight_left = 1.0;
    for (int r = 0; r < 4000; ++r) {
        double w = (k - 2.0) / std::pow(k - 1.0, r + 1.0);
        value += w * vertex_bracket(B, theta, h_prev, k - 1);
        weight_left -= w;
        if (weight_left < 1e-16) break;
        h_prev = B + (k - 1) * std::atanh(theta * std::tanh(h_prev));
    }
    // geometric tail at the converged field
    value += weight_left * vertex_bracket(B, theta, h_prev, k - 1);
    return value;
}

Population density_evolution_ising(const DegreeDistribution& offspring, double beta,
                                   double B, int population_size, int iters,
                                   std::uint64_t seed) {
    offspring.validate();
    if (population_size < 1)
        throw ValidationError("density_evolution_ising: population size must be >= 1");
    double theta = std::tanh(beta);
    Population pop;
    pop.h.assign(population_size, 0.0);
    Rng base(seed);
    for (int t = 0; t < iters; ++t) {
        std::vector<double> next(population_size);
        for (int i = 0; i < population_size; ++i) {
            Rng r = base.split((static_cast<std::uint64_t>(t) << 32) ^
                               static_cast<std::uint64_t>(i));
            int cnt = offspring.sample(r);
            double s = 0.0;
            for (int j = 0; j < cnt; ++j)
                s += std::atanh(theta * std::tanh(pop.h[r.below(population_size)]));
            next[i] = B + s;
        }
        pop.h = std::move(next);
        ++pop.generation;
    }
    return pop;
}

MonteCarloEstimate gw_free_entropy(const DegreeDistribution& degree, double beta,
                                   double B, const Population& pop, std::uint64_t seed,
                                   int n_samples) {
    degree.validate();
    if (pop.h.empty()) throw ValidationError("gw_free_entropy: empty population");
    if (n_samples < 2) throw ValidationError("gw_free_entropy: need >= 2 samples");
    double theta = std::tanh(beta);
    double g = gamma_of(theta);
    Rng base(seed);
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> hs, at;
    for (int s = 0; s < n_samples; ++s) {
        Rng r = base.split(static_cast<std::uint64_t>(s));
        int deg = degree.sample(r);
        hs.resize(deg);
        at.resize(deg);
        double a_total = 0.0, lp = B, lm = -B;
        for (int j = 0; j < deg; ++j) {
            hs[j] = pop.h[r.below(pop.h.size())];
            at[j] = std::atanh(theta * std::tanh(hs[j]));
            a_total += at[j];
            double t = theta * std::tanh(hs[j]);
            lp += std::log1p(t);
            lm += std::log1p(-t);
        }
        double edge_part = 0.0;
        for (int j = 0; j < deg; ++j) {
            double h_minus = B + a_total - at[j];  // field with edge j removed
            edge_part += g - std::log1p(theta * std::tanh(h_minus) * std::tanh(hs[j]));
        }
        double hi = std::max(lp, lm);
        double v = 0.5 * edge_part + hi + std::log1p(std::exp(-std::abs(lp - lm)));
        sum += v;
        sumsq += v * v;
    }
    MonteCarloEstimate out;
    out.value = sum / n_samples;
    double var = (sumsq - sum * sum / n_samples) / (n_samples - 1);
    out.std_error = std::sqrt(std::max(0.0, var) / n_samples);
    return out;
}

Coexistence coexistence_eta(int k, double beta, double u) {
    if (k < 2) throw ValidationError("coexistence_eta: k must be >= 2");
    if (beta < 0.0) throw ValidationError("coexistence_eta: beta must be >= 0");
    if (u <= 0.0 || u >= 1.0) throw ValidationError("coexistence_eta: u must lie in (0,1)");
    // (u - d)(1 - u - d) = d^2 e^{4 beta}  <=>  c d^2 + d - u(1-u) = 0,
    // c = e^{4 beta} - 1; the positive root in a cancellation-free form.
    double c = std::expm1(4.0 * beta);
    double p = u * (1.0 - u);
    Coexistence out;
    out.delta_star = 2.0 * p / (1.0 + std::sqrt(1.0 + 4.0 * c * p));
    double entropy = -u * std::log(u) - (1.0 - u) * std::log(1.0 - u);
    out.eta = 0.5 * beta * k + (1.0 - k) * entropy -
              0.5 * k *
                  (u * std::log(u - out.delta_star) +
                   (1.0 - u) * std::log(1.0 - u - out.delta_star));
    return out;
}

}  // namespace sgm
