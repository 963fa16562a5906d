#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sgm/graph.hpp"

namespace sgm {

struct ColoringThresholds {
    double alpha_upper = 0.0;  // log q / |log(1 - 1/q)|, first-moment bound
    double alpha_lower = 0.0;  // (q-1) log(q-1), second-moment bound
};
ColoringThresholds threshold_formulas(int q);

struct QCoreResult {
    std::vector<int> core_vertices;  // original ids, ascending
    MultiGraph core;                 // induced subgraph, relabelled
    std::vector<int> peel_order;     // removal sequence of peeled vertices
};
// Repeatedly remove a uniformly chosen vertex of degree < q; the surviving
// set is the unique maximal induced subgraph of minimum degree >= q.
QCoreResult q_core(const MultiGraph& g, int q, std::uint64_t seed);

// sup{alpha : P(Poisson(2 alpha u) >= q-1) <= u on [0,1]}, the emergence
// threshold of a non-empty q-core in ER(alpha, n).
double alpha_core(int q);

// Population of points of the q-simplex (root-marginal laws).
struct SimplexPopulation {
    int q = 0;
    std::vector<std::vector<double>> nu;
    int generation = 0;
};

enum class OffspringKind { Fixed, Poisson };

struct ColorDeResult {
    SimplexPopulation pop;
    double overlap = 0.0;     // E || nu - uniform ||_TV over the population
    double overlap_se = 0.0;  // MC standard error of the overlap
    long long rejected = 0;   // degenerate z = 0 draws that were redrawn
    double min_ess = 0.0;     // smallest effective sample size across sweeps
    bool solvable = false;    // overlap > 3 * overlap_se
};
// Broadcast reconstruction recursion for colorings: children's messages are
// combined through F_0(x) proportional to prod_j (1 - nu_j(x)) and the
// population is importance-resampled by the z-ratio weight. `param` is the
// offspring count for Fixed, or gamma with offspring ~ Poisson(2 gamma).
ColorDeResult color_reconstruction_de(int q, OffspringKind kind, double param,
                                      int population, int iters, std::uint64_t seed);

struct GammaREstimate {
    double estimate = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    std::vector<double> per_seed;
};
// Bisection on gamma of the solvability indicator, repeated across seeds.
GammaREstimate gamma_r_estimate(int q, double gamma_lo, double gamma_hi, int population,
                                int iters, int bisect_steps, int n_seeds,
                                std::uint64_t seed);

// Cluster-counting exponent for (k+1)-regular graphs from a color-symmetric
// population: Sigma = -((k+1)/2) E[W_e] + E[W_v], expectations under the
// color-conditioned laws Q_x (density q nu(x) with respect to Q).
struct SigmaEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long long degenerate = 0;  // rejected zero-argument log samples
};
SigmaEstimate complexity_sigma(int k, int q, const SimplexPopulation& Q, int n_samples,
                               std::uint64_t seed);

// Bethe free entropy density of the uniform message set on a (k+1)-regular
// graph: log q + ((k+1)/2) log(1 - 1/q).
double uniform_bethe_density(int k, int q);

struct ReplicaType {
    int q = 0;
    std::vector<double> nu;       // q x q mean joint color frequencies
    long long n_pairs = 0;
    double sphericity = 0.0;      // || nu - uniform ||_2
    double condition_stat = 0.0;  // mean over pairs of the diagonal-excess form
};
// Empirical two-replica statistics from paired samples; the condition
// statistic is E sum_x [D(x,x) - (2/q) sum_y D(x,y)]^2 with D the per-pair
// deviation of the joint type from uniform.
ReplicaType two_replica_type(
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs, int q);

}  // namespace sgm
