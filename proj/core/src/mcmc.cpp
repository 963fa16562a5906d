#include "sgm/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgm/errors.hpp"

namespace sgm {

namespace {

double lag1_autocorr(const std::vector<double>& v) {
    if (v.size() < 3) return 0.0;
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - mean) * (v[i] - mean);
        if (i + 1 < v.size()) num += (v[i] - mean) * (v[i + 1] - mean);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

void cw_glauber_step(std::vector<int>& x, double beta, Rng& rng) {
    int n = static_cast<int>(x.size());
    int i = static_cast<int>(rng.below(n));
    long long M = 0;
    for (int s : x) M += s;
    long long Mi = M - x[i];  // opinion of everybody else
    if (Mi * x[i] > 0) {
        double p = std::exp(-2.0 * beta * std::abs(static_cast<double>(Mi)) / n);
        if (rng.uniform() < p) x[i] = -x[i];
    } else {
        x[i] = -x[i];
    }
}

ScalarChainResult cw_glauber_run(int n, double beta, long long steps, long long burn_in,
                                 long long stride, std::uint64_t seed) {
    if (n < 1) throw ValidationError("cw_glauber_run: n must be >= 1");
    if (stride < 1) throw ValidationError("cw_glauber_run: stride must be >= 1");
    Rng rng(seed);
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform() < 0.5 ? -1 : 1;
    ScalarChainResult out;
    for (long long t = 0; t < steps; ++t) {
        cw_glauber_step(x, beta, rng);
        if (t >= burn_in && (t - burn_in) % stride == 0) {
            long long M = 0;
            for (int s : x) M += s;
            out.samples.push_back(static_cast<double>(M) / n);
        }
    }
    out.autocorr_1 = lag1_autocorr(out.samples);
    return out;
}

IsingRunResult ising_heatbath_run(const MultiGraph& g, double beta,
                                  const std::vector<double>& B,
                                  const std::vector<double>& J, int sweeps, int burn_in,
                                  int stride, std::uint64_t seed) {
    if (B.size() != static_cast<std::size_t>(g.n_vertices))
        throw ValidationError("ising_heatbath_run: B size mismatch");
    if (J.size() != g.edges.size())
        throw ValidationError("ising_heatbath_run: J size mismatch");
    if (stride < 1) throw ValidationError("ising_heatbath_run: stride must be >= 1");
    Rng rng(seed);
    int n = g.n_vertices;
    std::vector<int> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform() < 0.5 ? -1 : 1;
    IsingRunResult out;
    out.site_mean.assign(n, 0.0);
    long long recorded = 0;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int step = 0; step < n; ++step) {
            int i = static_cast<int>(rng.below(n));
            double field = B[i];
            for (auto [j, e] : g.adjacency[i]) {
                if (j == i) continue;  // self-loop: constant energy shift
                field += beta * J[e] * x[j];
            }
            // P(x_i = +1 | rest) = e^{field} / (2 cosh field)
            double p_plus = 1.0 / (1.0 + std::exp(-2.0 * field));
            x[i] = rng.uniform() < p_plus ? 1 : -1;
        }
        if (sweep >= burn_in && (sweep - burn_in) % stride == 0) {
            long long M = 0;
            for (int s : x) M += s;
            out.xbar.push_back(static_cast<double>(M) / n);
            for (int i = 0; i < n; ++i) out.site_mean[i] += x[i];
            ++recorded;
        }
    }
    if (recorded > 0)
        for (double& v : out.site_mean) v /= recorded;
    out.autocorr_1 = lag1_autocorr(out.xbar);
    return out;
}

std::vector<int> greedy_proper_coloring(const MultiGraph& g, int q, std::uint64_t seed,
                                        int restarts) {
    if (q < 1) throw ValidationError("greedy coloring: q must be >= 1");
    for (auto [u, v] : g.edges)
        if (u == v) throw ValidationError("greedy coloring: self-loop has no proper coloring");
    Rng rng(seed);
    std::vector<int> order(g.n_vertices);
    std::iota(order.begin(), order.end(), 0);
    for (int attempt = 0; attempt < restarts; ++attempt) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<int> color(g.n_vertices, -1);
        bool ok = true;
        for (int v : order) {
            std::vector<char> used(q, 0);
            for (auto [w, e] : g.adjacency[v]) {
                (void)e;
                if (color[w] >= 0) used[color[w]] = 1;
            }
            // first free color after a random rotation, for restart diversity
            int shift = static_cast<int>(rng.below(q));
            int chosen = -1;
            for (int c = 0; c < q; ++c) {
                int cc = (c + shift) % q;
                if (!used[cc]) {
                    chosen = cc;
                    break;
                }
            }
            if (chosen < 0) {
                ok = false;
                break;
            }
            color[v] = chosen;
        }
        if (ok) return color;
    }
    // fallback: smallest-last (degeneracy) order guarantees success whenever
    // q exceeds the graph degeneracy, e.g. sparse graphs with an empty q-core
    {
        std::vector<int> deg(g.n_vertices);
        for (int v = 0; v < g.n_vertices; ++v) deg[v] = g.degree(v);
        std::vector<char> removed(g.n_vertices, 0);
        std::vector<int> order2;
        order2.reserve(g.n_vertices);
        for (int it = 0; it < g.n_vertices; ++it) {
            int best = -1;
            for (int v = 0; v < g.n_vertices; ++v)
                if (!removed[v] && (best < 0 || deg[v] < deg[best])) best = v;
            removed[best] = 1;
            order2.push_back(best);
            for (auto [w, e] : g.adjacency[best]) {
                (void)e;
                if (!removed[w]) --deg[w];
            }
        }
        std::reverse(order2.begin(), order2.end());
        std::vector<int> color(g.n_vertices, -1);
        bool ok = true;
        for (int v : order2) {
            std::vector<char> used(q, 0);
            for (auto [w, e] : g.adjacency[v]) {
                (void)e;
                if (color[w] >= 0) used[color[w]] = 1;
            }
            int shift = static_cast<int>(rng.below(q));
            int chosen = -1;
            for (int c = 0; c < q; ++c) {
                int cc = (c + shift) % q;
                if (!used[cc]) {
                    chosen = cc;
                    break;
                }
            }
            if (chosen < 0) {
                ok = false;
                break;
            }
            color[v] = chosen;
        }
        if (ok) return color;
    }
    throw ValidationError("greedy coloring: no proper coloring found; try a larger q");
}

std::vector<std::vector<int>> coloring_glauber_run(const MultiGraph& g, int q, int sweeps,
                                                   int burn_in, int stride,
                                                   std::uint64_t seed) {
    if (stride < 1) throw ValidationError("coloring_glauber_run: stride must be >= 1");
    std::vector<int> color = greedy_proper_coloring(g, q, seed ^ 0xC01u);
    Rng rng(seed);
    int n = g.n_vertices;
    std::vector<std::vector<int>> samples;
    std::vector<int> allowed;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int step = 0; step < n; ++step) {
            int i = static_cast<int>(rng.below(n));
            std::vector<char> used(q, 0);
            for (auto [w, e] : g.adjacency[i]) {
                (void)e;
                if (w != i) used[color[w]] = 1;
            }
            allowed.clear();
            for (int c = 0; c < q; ++c)
                if (!used[c]) allowed.push_back(c);
            // current color is always allowed, so the list is never empty
            color[i] = allowed[rng.below(allowed.size())];
        }
        if (sweep >= burn_in && (sweep - burn_in) % stride == 0)
            samples.push_back(color);
    }
    return samples;
}

}  // namespace sgm
