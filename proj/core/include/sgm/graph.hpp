#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sgm/rng.hpp"

namespace sgm {

// Undirected multigraph: self-loops and parallel edges allowed.
struct MultiGraph {
    int n_vertices = 0;
    std::vector<std::pair<int, int>> edges;
    // adjacency[i] = list of (neighbor, edge index); self-loops appear twice.
    std::vector<std::vector<std::pair<int, int>>> adjacency;

    void build_adjacency();
    int degree(int i) const { return static_cast<int>(adjacency[i].size()); }

    // Collapse self-loops and parallel edges; returns the number of edge
    // slots removed.
    std::pair<MultiGraph, int> simplify() const;

    std::string to_text() const;
    static MultiGraph from_text(const std::string& text);
};

// Bipartite factor graph; edge list order is the canonical socket order.
struct FactorGraph {
    int n_vnodes = 0;
    int n_cnodes = 0;
    std::vector<std::pair<int, int>> edges;  // (v-node, c-node) couples
    std::vector<std::vector<int>> v_adjacency;  // c-nodes per v-node
    std::vector<std::vector<int>> c_adjacency;  // v-nodes per c-node

    void build_adjacency();

    std::string to_text() const;
    static FactorGraph from_text(const std::string& text);
};

struct RootedTree {
    int root = 0;
    std::vector<int> parent;      // -1 at the root
    std::vector<std::vector<int>> children;
    std::vector<int> generation;
    int n_vertices() const { return static_cast<int>(parent.size()); }
    int offspring(int v) const { return static_cast<int>(children[v].size()); }
    MultiGraph to_multigraph() const;
};

struct DegreeDistribution {
    std::vector<double> pmf;  // pmf[k] = P_k

    static DegreeDistribution delta(int k);
    static DegreeDistribution poisson(double mean, double tail_tol = 1e-15);

    void validate() const;  // throws ValidationError on a bad pmf
    double mean() const;
    // Size-biased law rho_k = (k+1) P_{k+1} / mean.
    std::vector<double> size_biased() const;
    double size_biased_mean() const;
    int sample(Rng& rng) const;  // inverse-cdf draw
};

MultiGraph sample_configuration_model(const DegreeDistribution& P, int n, std::uint64_t seed);

enum class ErVariant { FixedM, Binomial };
MultiGraph sample_erdos_renyi(double alpha, int n, ErVariant variant, std::uint64_t seed);

struct FactorEnsembleKind {
    enum Tag { Regular, PoissonL } tag;
    int l = 0;
    int k = 0;  // c-node degree, Regular only
    static FactorEnsembleKind regular(int l, int k) { return {Regular, l, k}; }
    static FactorEnsembleKind poisson_l(int l) { return {PoissonL, l, 0}; }
};
FactorGraph sample_factor_ensemble(FactorEnsembleKind kind, int n, int m, std::uint64_t seed);

RootedTree sample_galton_watson_tree(const DegreeDistribution& root_dist,
                                     const DegreeDistribution& offspring_dist,
                                     int depth, std::uint64_t seed);

struct LocalBall {
    MultiGraph subgraph;            // vertices relabelled 0..|B|-1
    std::vector<int> vertex_ids;    // new id -> original id; vertex_ids[0] == center
    std::vector<int> dist;          // per new id
    bool is_tree = false;
    std::vector<int> boundary;      // original ids at distance exactly t
};

// BFS ball of radius t. Edges joining two distance-t vertices are excluded
// (they belong to the complement under the boundary edge partition).
LocalBall local_ball(const MultiGraph& g, int center, int t);

// Canonical code of a rooted tree: BFS offspring counts with siblings in
// lexicographic order of their subtree codes. Non-tree balls map to "cyclic".
std::string canonical_tree_code(const LocalBall& ball);

// pmf over canonical codes of B_root(t) for a uniformly random root in
// independently sampled graphs.
std::map<std::string, double> empirical_local_profile(
    const std::function<MultiGraph(std::uint64_t)>& sampler, int t,
    int n_samples, std::uint64_t seed, int max_ball = 10000);

}  // namespace sgm
