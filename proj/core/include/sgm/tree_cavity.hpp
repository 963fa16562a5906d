#pragma once

#include <cstdint>
#include <vector>

#include "sgm/graph.hpp"

namespace sgm {

// Sample population representing a distributional cavity-field fixed point.
struct Population {
    std::vector<double> h;
    int generation = 0;

    double mean_tanh() const;
    double mean() const;
    std::vector<double> quantiles(const std::vector<double>& ps) const;
};

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct TreeFreeEntropyParts {
    double edge_term = 0.0;    // (k/2) gamma(theta) style edge share
    double mixed_term = 0.0;   // -(k/2) log(1 + theta tanh^2 h)
    double vertex_term = 0.0;  // log of the two-product bracket
    double total() const { return edge_term + mixed_term + vertex_term; }
};

double kregular_beta_c(int k);  // atanh(1/(k-1))

struct KRegularRecursion {
    std::vector<double> upward;    // h_r, r = 0..ell (h_{-1} = 0 implicit)
    std::vector<double> downward;  // h_r^ell, r = 0..ell
};
// Upward pass h_r = B + (k-1) atanh(theta tanh h_{r-1}); downward pass
// h_r^ell = B + (k-2) atanh(theta tanh h_r) + atanh(theta tanh h_{r+1}^ell)
// seeded by h_ell^ell = h_{ell-1}.
KRegularRecursion kregular_recursion(int k, double beta, double B, int ell);

// Largest solution of h = B + (k-1) atanh(theta tanh h), by grid isolation
// plus bisection on [0, B + (k-1) atanh theta].
double kregular_fixed_point(int k, double beta, double B);

// Per-vertex free entropy of the constant cavity solution h on a k-regular
// graph.
TreeFreeEntropyParts kregular_free_entropy(int k, double beta, double B, double h);

// log Z of the Ising model on the depth-ell rooted k-regular tree, from the
// cavity closed form; cross-checks exact enumeration for small ell.
double kregular_tree_log_z(int k, double beta, double B, int ell);

// Large-depth limit of log Z / |tree|: gamma(theta) plus the expected vertex
// bracket under the geometric root-depth law P(R = r) = (k-2)/(k-1)^{r+1}.
double canopy_free_entropy(int k, double beta, double B);

// Distributional recursion h <- B + sum_{i=1}^{K} atanh(theta tanh h_i),
// K ~ offspring, by sampled population sweeps.
Population density_evolution_ising(const DegreeDistribution& offspring, double beta,
                                   double B, int population_size, int iters,
                                   std::uint64_t seed);

// Free-entropy density estimate for a Galton-Watson local limit with degree
// law P, from a converged cavity population.
MonteCarloEstimate gw_free_entropy(const DegreeDistribution& degree, double beta,
                                   double B, const Population& pop, std::uint64_t seed,
                                   int n_samples = 100000);

struct Coexistence {
    double delta_star = 0.0;
    double eta = 0.0;
};
// delta_* solves (u - d)(1 - u - d) = d^2 e^{4 beta}, positive root;
// eta_k(beta, u) is the corresponding restricted free-entropy exponent.
Coexistence coexistence_eta(int k, double beta, double u);

}  // namespace sgm
