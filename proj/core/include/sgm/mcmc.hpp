#pragma once

#include <cstdint>
#include <vector>

#include "sgm/graph.hpp"
#include "sgm/rng.hpp"

namespace sgm {

// One single-site move of the mean-field opinion dynamics on spins in {-1,+1}:
// site i flips with probability exp(-2 beta |M^(i)| / n) when aligned with the
// rest, and with probability 1 otherwise.
void cw_glauber_step(std::vector<int>& x, double beta, Rng& rng);

struct ScalarChainResult {
    std::vector<double> samples;     // recorded observable (mean spin)
    double autocorr_1 = 0.0;         // lag-1 autocorrelation of the samples
};
// steps are single-site updates; recording starts after burn_in, every stride.
ScalarChainResult cw_glauber_run(int n, double beta, long long steps,
                                 long long burn_in, long long stride,
                                 std::uint64_t seed);

struct IsingRunResult {
    std::vector<double> xbar;        // mean spin per recorded sweep
    std::vector<double> site_mean;   // empirical per-site magnetization
    double autocorr_1 = 0.0;
};
// Heat-bath dynamics; one sweep = n single-site conditional resamplings.
IsingRunResult ising_heatbath_run(const MultiGraph& g, double beta,
                                  const std::vector<double>& B,
                                  const std::vector<double>& J, int sweeps,
                                  int burn_in, int stride, std::uint64_t seed);

// Proper-coloring single-site dynamics: recolor a uniform vertex with a color
// drawn uniformly among those not used by its neighbors. Initial coloring is
// greedy over random vertex orders; failure after restarts raises a
// validation error suggesting a larger q.
std::vector<std::vector<int>> coloring_glauber_run(const MultiGraph& g, int q,
                                                   int sweeps, int burn_in, int stride,
                                                   std::uint64_t seed);

// Greedy proper coloring used as the chain initializer; exposed for tests.
std::vector<int> greedy_proper_coloring(const MultiGraph& g, int q, std::uint64_t seed,
                                        int restarts = 100);

}  // namespace sgm
