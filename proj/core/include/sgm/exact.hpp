#pragma once

#include <vector>

#include "sgm/graph.hpp"
#include "sgm/potentials.hpp"

namespace sgm {

struct MessageSet;  // bp.hpp

struct ExactResult {
    double log_z = 0.0;
    std::vector<double> marginal;  // over X^|U|, first vertex least significant
};

// Exact log partition function by enumeration; guard |X|^n <= 2^24 states.
double exact_log_z(const MultiGraph& g, const Specification& spec);
double exact_log_z(const FactorGraph& g, const FactorSpecification& spec);

// Exact marginal of x_U; index = sum_i x_{U[i]} q^i (first vertex least
// significant).
std::vector<double> exact_marginal(const MultiGraph& g, const Specification& spec,
                                   const std::vector<int>& U);
// Conditional marginal of x_U given x_W = xw.
std::vector<double> exact_conditional(const MultiGraph& g, const Specification& spec,
                                      const std::vector<int>& U,
                                      const std::vector<int>& W,
                                      const std::vector<int>& xw);

// || mu_{root, far ball} - mu_root x mu_{far ball} ||_TV computed through the
// boundary identity: the far half couples to the root only via the distance-t
// shell D, so the TV equals sum_x mu_D(x) || mu_{root|D}(.|x) - mu_root ||_TV.
double exact_reconstruction_tv(const MultiGraph& g, const Specification& spec,
                               int root, int t);

// Exact count by variable elimination (min-degree order); exact integers held
// in doubles, valid far beyond the enumeration guard for sparse graphs.
double count_proper_colorings(const MultiGraph& g, int q);

struct HyperloopExpansion {
    std::vector<double> counts;  // N_G(l), l = 0..|F|
    double lhs = 0.0;            // Z_G(beta) by enumeration over spins
    double rhs = 0.0;            // 2^{|V|} cosh^{|F|} sum_l N_G(l) tanh^l
};
// Subset enumeration over factors; guard |F| <= 24.
HyperloopExpansion hyperloop_polynomial(const FactorGraph& g, double beta);

struct SubgraphExpansion {
    std::vector<double> counts;  // subgraphs with |F| edges, odd at U, even off U
    double lhs = 0.0;            // sum_x prod e^{beta x x'} prod_{i in U} x_i
    double rhs = 0.0;
};
// Pairwise Ising variant: edge subsets with odd degree exactly on U.
SubgraphExpansion ising_subgraph_expansion(const MultiGraph& g,
                                           const std::vector<int>& U, double beta);

struct BetheErrorReport {
    double epsilon = 0.0;  // sup over tested U of ||mu_U - nu_U||_TV
    int patches_tested = 0;
    bool cap_hit = false;
};
// (epsilon, r) certificate for a message set: U ranges over induced trees with
// leaf boundary and diameter <= 2r, capped at subset_cap candidate sets.
BetheErrorReport bethe_approximation_error(const MultiGraph& g, const Specification& spec,
                                           const MessageSet& messages, int r,
                                           long long subset_cap = 1 << 20);

}  // namespace sgm
