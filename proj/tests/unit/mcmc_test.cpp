#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "sgm/curie_weiss.hpp"
#include "sgm/errors.hpp"
#include "sgm/exact.hpp"
#include "sgm/mcmc.hpp"
#include "sgm/potentials.hpp"

using namespace sgm;

namespace {

MultiGraph cycle_graph(int n) {
    MultiGraph g;
    g.n_vertices = n;
    for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n});
    g.build_adjacency();
    return g;
}

}  // namespace

TEST_CASE("opinion-dynamics flip rule: exact detailed balance for small n") {
    // stationary law mu(x) ~ exp(beta M^2 / (2n)); check mu(x) P(x -> x')
    // = mu(x') P(x' -> x) over every single-flip pair, n = 4
    int n = 4;
    double beta = 1.3;
    auto mu = [&](int cfg) {
        int M = -n + 2 * __builtin_popcount(cfg);
        return std::exp(beta * M * M / (2.0 * n));
    };
    auto flip_prob = [&](int cfg, int i) {
        int xi = (cfg >> i) & 1 ? 1 : -1;
        int M = -n + 2 * __builtin_popcount(cfg);
        int Mi = M - xi;
        if (Mi * xi > 0) return std::exp(-2.0 * beta * std::abs(Mi) / n);
        return 1.0;
    };
    for (int cfg = 0; cfg < (1 << n); ++cfg)
        for (int i = 0; i < n; ++i) {
            int other = cfg ^ (1 << i);
            double lhs = mu(cfg) * flip_prob(cfg, i) / n;
            double rhs = mu(other) * flip_prob(other, i) / n;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    // beta = 0 flips unconditionally
    Rng rng(5);
    std::vector<int> x = {1, 1, -1};
    std::vector<int> before = x;
    cw_glauber_step(x, 0.0, rng);
    int changed = 0;
    for (int i = 0; i < 3; ++i) changed += x[i] != before[i];
    CHECK(changed == 1);
}

TEST_CASE("opinion-dynamics chain matches the exact magnetization law") {
    int n = 3;
    double beta = 0.8;
    ScalarChainResult run = cw_glauber_run(n, beta, 400000, 1000, 3, 42);
    CwPmf pmf = magnetization_pmf(n, beta, 0.0);
    std::map<int, int> counts;
    for (double v : run.samples) counts[static_cast<int>(std::lround(v * n))]++;
    double N = static_cast<double>(run.samples.size());
    for (std::size_t idx = 0; idx < pmf.m.size(); ++idx) {
        int M = static_cast<int>(std::lround(pmf.m[idx] * n));
        double observed = counts[M] / N;
        // correlated samples: allow a generous multiple of the iid sigma
        double sigma = std::sqrt(pmf.p[idx] * (1 - pmf.p[idx]) / N);
        CHECK(std::abs(observed - pmf.p[idx]) < 10 * sigma + 2e-3);
    }
    CHECK(run.autocorr_1 < 1.0);
}

TEST_CASE("heat-bath Ising: iid limit and exact-marginal agreement") {
    MultiGraph g = cycle_graph(5);
    std::vector<double> B(5, 0.4), J(5, 1.0);
    // beta = 0: spins are iid with mean tanh(B)
    IsingRunResult free_run = ising_heatbath_run(g, 0.0, B, J, 4000, 100, 1, 7);
    double mean = 0.0;
    for (double v : free_run.xbar) mean += v;
    mean /= free_run.xbar.size();
    CHECK(std::abs(mean - std::tanh(0.4)) < 0.02);
    // finite beta: per-site means vs exact enumeration
    double beta = 0.6;
    IsingRunResult run = ising_heatbath_run(g, beta, B, J, 60000, 500, 5, 11);
    Specification s = Specification::ising(g, beta, B, J);
    for (int i = 0; i < 5; ++i) {
        auto m = exact_marginal(g, s, {i});
        double target = m[1] - m[0];
        CHECK(std::abs(run.site_mean[i] - target) < 0.03);
    }
    // antisymmetry under B -> -B (different seeds, statistical check)
    std::vector<double> Bneg(5, -0.4);
    IsingRunResult neg = ising_heatbath_run(g, beta, Bneg, J, 60000, 500, 5, 13);
    double mp = 0.0, mn = 0.0;
    for (double v : run.xbar) mp += v;
    for (double v : neg.xbar) mn += v;
    CHECK(std::abs(mp / run.xbar.size() + mn / neg.xbar.size()) < 0.03);
}

TEST_CASE("heat-bath trajectories are seed-deterministic") {
    MultiGraph g = cycle_graph(6);
    std::vector<double> B(6, 0.1), J(6, 1.0);
    IsingRunResult a = ising_heatbath_run(g, 0.5, B, J, 500, 10, 1, 99);
    IsingRunResult b = ising_heatbath_run(g, 0.5, B, J, 500, 10, 1, 99);
    CHECK(a.xbar == b.xbar);
    IsingRunResult c = ising_heatbath_run(g, 0.5, B, J, 500, 10, 1, 100);
    CHECK(a.xbar != c.xbar);
}

TEST_CASE("greedy coloring produces proper colorings and fails loudly") {
    MultiGraph g = cycle_graph(7);
    auto color = greedy_proper_coloring(g, 3, 1);
    for (auto [u, v] : g.edges) CHECK(color[u] != color[v]);
    // q larger than max degree always succeeds
    auto c2 = greedy_proper_coloring(g, 4, 2);
    for (auto [u, v] : g.edges) CHECK(c2[u] != c2[v]);
    // odd cycle is not 2-colorable
    CHECK_THROWS_AS(greedy_proper_coloring(g, 2, 3), ValidationError);
}

TEST_CASE("coloring dynamics: properness invariant and uniform stationary law") {
    // on a triangle with q=3 every proper coloring is frozen (each vertex sees
    // both other colors), so the chain must keep whatever proper coloring it starts in
    MultiGraph tri = cycle_graph(3);
    auto tri_samples = coloring_glauber_run(tri, 3, 2000, 50, 2, 17);
    REQUIRE(!tri_samples.empty());
    for (const auto& col : tri_samples)
        for (auto [u, v] : tri.edges) CHECK(col[u] != col[v]);
    for (const auto& col : tri_samples) CHECK(col == tri_samples.front());
    // ergodic instance: path of 3 vertices, 12 proper colorings, uniform law
    MultiGraph path;
    path.n_vertices = 3;
    path.edges = {{0, 1}, {1, 2}};
    path.build_adjacency();
    auto samples = coloring_glauber_run(path, 3, 120000, 30, 2, 19);
    std::map<std::vector<int>, int> freq;
    for (const auto& col : samples) {
        for (auto [u, v] : path.edges) CHECK(col[u] != col[v]);
        freq[col]++;
    }
    CHECK(freq.size() == 12);
    for (auto& [col, cnt] : freq)
        CHECK(std::abs(cnt / static_cast<double>(samples.size()) - 1.0 / 12) < 0.015);
    // single vertex: uniform over q colors
    MultiGraph one;
    one.n_vertices = 1;
    one.build_adjacency();
    auto s1 = coloring_glauber_run(one, 3, 30000, 100, 1, 23);
    std::vector<int> counts(3, 0);
    for (const auto& col : s1) counts[col[0]]++;
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(counts[c] / static_cast<double>(s1.size()) - 1.0 / 3) < 0.02);
}
