#pragma once

#include <vector>

#include "sgm/graph.hpp"

namespace sgm {

// Pairwise specification over a finite alphabet of size q. Edge tables are
// stored per edge of the bound MultiGraph, in edge-list order, row-major
// indexed as table[x * q + y] for the edge (u, v) with x at u and y at v.
struct Specification {
    int q = 2;
    std::vector<std::vector<double>> edge_pot;    // one q*q table per edge
    std::vector<std::vector<double>> vertex_pot;  // one q-vector per vertex
    double psi_max = 1.0;
    // Permissivity metadata: permitted state per vertex and the kappa bound;
    // kappa <= 0 means "not marked permissive".
    double kappa = 0.0;
    std::vector<int> permitted;

    bool is_permissive() const { return kappa > 0.0; }
    // Checks table symmetry, bounds and (when marked) the permissivity
    // inequalities; throws ValidationError on failure.
    void validate(const MultiGraph& g) const;

    // Ising over {-1,+1}: state 0 is spin -1, state 1 is spin +1.
    // psi_ij = exp(beta J_e s s'), psi_i = exp(B_i s).
    static Specification ising(const MultiGraph& g, double beta,
                               const std::vector<double>& B,
                               const std::vector<double>& J);
    static Specification ising_uniform(const MultiGraph& g, double beta, double B,
                                       double J = 1.0);
    // Proper q-colorings: psi_ij = 1(x != y), psi_i = 1.
    static Specification coloring(const MultiGraph& g, int q);
    // Hard-core (independent set): states {0,1}, psi_ij = 1 - 1(x=y=1),
    // psi_i = lambda^x.
    static Specification independent_set(const MultiGraph& g, double lambda);
};

// Factor model: one table per c-node over X^{deg(a)}, indexed with the first
// incident v-node as the least significant digit.
struct FactorSpecification {
    int q = 2;
    std::vector<std::vector<double>> factor_pot;
    std::vector<std::vector<double>> vertex_pot;  // optional; empty means all-ones

    // XOR/parity factors over {-1,+1} spins: psi_a(x) = exp(beta * prod s_i).
    static FactorSpecification parity(const FactorGraph& g, double beta);
};

}  // namespace sgm
