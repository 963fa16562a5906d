#include "sgm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "sgm/errors.hpp"

namespace sgm {

void MultiGraph::build_adjacency() {
    adjacency.assign(n_vertices, {});
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        auto [u, v] = edges[e];
        adjacency[u].push_back({v, e});
        adjacency[v].push_back({u, e});  // self-loop listed twice, degree +2
    }
}

std::pair<MultiGraph, int> MultiGraph::simplify() const {
    MultiGraph out;
    out.n_vertices = n_vertices;
    std::set<std::pair<int, int>> seen;
    int removed = 0;
    for (auto [u, v] : edges) {
        if (u == v) {
            ++removed;
            continue;
        }
        auto key = std::minmax(u, v);
        if (!seen.insert({key.first, key.second}).second) {
            ++removed;
            continue;
        }
        out.edges.push_back({key.first, key.second});
    }
    out.build_adjacency();
    return {out, removed};
}

std::string MultiGraph::to_text() const {
    std::ostringstream os;
    os << n_vertices << ' ' << edges.size() << '\n';
    for (auto [u, v] : edges) os << u << ' ' << v << '\n';
    return os.str();
}

MultiGraph MultiGraph::from_text(const std::string& text) {
    std::istringstream is(text);
    MultiGraph g;
    std::size_t m = 0;
    if (!(is >> g.n_vertices >> m)) throw ValidationError("graph text: bad header");
    g.edges.reserve(m);
    for (std::size_t e = 0; e < m; ++e) {
        int u, v;
        if (!(is >> u >> v)) throw ValidationError("graph text: truncated edge list");
        if (u < 0 || v < 0 || u >= g.n_vertices || v >= g.n_vertices)
            throw ValidationError("graph text: endpoint out of range");
        g.edges.push_back({u, v});
    }
    g.build_adjacency();
    return g;
}

void FactorGraph::build_adjacency() {
    v_adjacency.assign(n_vnodes, {});
    c_adjacency.assign(n_cnodes, {});
    for (auto [i, a] : edges) {
        v_adjacency[i].push_back(a);
        c_adjacency[a].push_back(i);
    }
}

std::string FactorGraph::to_text() const {
    std::ostringstream os;
    os << n_vnodes << ' ' << n_cnodes << ' ' << edges.size() << '\n';
    for (auto [i, a] : edges) os << i << ' ' << a << '\n';
    return os.str();
}

FactorGraph FactorGraph::from_text(const std::string& text) {
    std::istringstream is(text);
    FactorGraph g;
    std::size_t m = 0;
    if (!(is >> g.n_vnodes >> g.n_cnodes >> m))
        throw ValidationError("factor graph text: bad header");
    for (std::size_t e = 0; e < m; ++e) {
        int i, a;
        if (!(is >> i >> a)) throw ValidationError("factor graph text: truncated edge list");
        if (i < 0 || a < 0 || i >= g.n_vnodes || a >= g.n_cnodes)
            throw ValidationError("factor graph text: endpoint out of range");
        g.edges.push_back({i, a});
    }
    g.build_adjacency();
    return g;
}

MultiGraph RootedTree::to_multigraph() const {
    MultiGraph g;
    g.n_vertices = n_vertices();
    for (int v = 0; v < g.n_vertices; ++v)
        if (parent[v] >= 0) g.edges.push_back({parent[v], v});
    g.build_adjacency();
    return g;
}

DegreeDistribution DegreeDistribution::delta(int k) {
    DegreeDistribution d;
    d.pmf.assign(k + 1, 0.0);
    d.pmf[k] = 1.0;
    return d;
}

DegreeDistribution DegreeDistribution::poisson(double mean, double tail_tol) {
    DegreeDistribution d;
    double p = std::exp(-mean), cum = 0.0;
    int k = 0;
    while (cum < 1.0 - tail_tol) {
        d.pmf.push_back(p);
        cum += p;
        ++k;
        p *= mean / k;
        if (k > 400) break;
    }
    // Renormalize the truncation remainder onto the support.
    double s = std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0);
    for (double& x : d.pmf) x /= s;
    return d;
}

void DegreeDistribution::validate() const {
    if (pmf.empty()) throw ValidationError("degree distribution: empty pmf");
    double s = 0.0;
    for (double p : pmf) {
        if (p < 0.0 || !std::isfinite(p))
            throw ValidationError("degree distribution: negative or non-finite mass");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw ValidationError("degree distribution: pmf sums to " + std::to_string(s));
}

double DegreeDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
    return m;
}

std::vector<double> DegreeDistribution::size_biased() const {
    double pbar = mean();
    if (pbar <= 0.0) throw ValidationError("size-biased law undefined: zero mean degree");
    std::vector<double> rho(pmf.size() > 0 ? pmf.size() - 1 : 0, 0.0);
    for (std::size_t k = 0; k + 1 < pmf.size(); ++k)
        rho[k] = (k + 1) * pmf[k + 1] / pbar;
    if (rho.empty()) rho.push_back(1.0);
    return rho;
}

double DegreeDistribution::size_biased_mean() const {
    auto rho = size_biased();
    double m = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) m += static_cast<double>(k) * rho[k];
    return m;
}

int DegreeDistribution::sample(Rng& rng) const {
    double u = rng.uniform(), cum = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        cum += pmf[k];
        if (u < cum) return static_cast<int>(k);
    }
    return static_cast<int>(pmf.size()) - 1;
}

MultiGraph sample_configuration_model(const DegreeDistribution& P, int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("configuration model: n must be >= 1");
    P.validate();

    // Degree quotas: floor(n P_k) vertices of degree k, leftover vertices
    // apportioned by largest fractional remainder (deterministic).
    int kmax = static_cast<int>(P.pmf.size()) - 1;
    std::vector<int> quota(kmax + 1, 0);
    std::vector<std::pair<double, int>> remainder;
    int assigned = 0;
    for (int k = 0; k <= kmax; ++k) {
        double want = n * P.pmf[k];
        quota[k] = static_cast<int>(std::floor(want));
        assigned += quota[k];
        remainder.push_back({want - quota[k], k});
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int i = 0; assigned < n; ++i) {
        quota[remainder[i % remainder.size()].second] += 1;
        ++assigned;
    }

    std::vector<int> degree;
    degree.reserve(n);
    for (int k = 0; k <= kmax; ++k)
        for (int c = 0; c < quota[k]; ++c) degree.push_back(k);
    // Parity fix: one extra half-edge on the last vertex.
    long long total = std::accumulate(degree.begin(), degree.end(), 0LL);
    if (total % 2 != 0) {
        degree.back() += 1;
        ++total;
    }

    std::vector<int> half_edges;
    half_edges.reserve(total);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < degree[i]; ++d) half_edges.push_back(i);

    Rng rng(seed);
    for (std::size_t i = half_edges.size(); i > 1; --i)
        std::swap(half_edges[i - 1], half_edges[rng.below(i)]);

    MultiGraph g;
    g.n_vertices = n;
    for (std::size_t i = 0; i + 1 < half_edges.size(); i += 2)
        g.edges.push_back({half_edges[i], half_edges[i + 1]});
    g.build_adjacency();
    return g;
}

MultiGraph sample_erdos_renyi(double alpha, int n, ErVariant variant, std::uint64_t seed) {
    if (alpha < 0.0) throw ValidationError("erdos-renyi: alpha must be >= 0");
    if (n < 1) throw ValidationError("erdos-renyi: n must be >= 1");
    Rng rng(seed);
    MultiGraph g;
    g.n_vertices = n;
    if (variant == ErVariant::FixedM) {
        long long m = static_cast<long long>(std::floor(n * alpha));
        for (long long e = 0; e < m; ++e) {
            int u = static_cast<int>(rng.below(n));
            int v = static_cast<int>(rng.below(n));
            g.edges.push_back({u, v});
        }
    } else {
        double p = n > 1 ? std::min(1.0, 2.0 * alpha / (n - 1)) : 0.0;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.uniform() < p) g.edges.push_back({u, v});
    }
    g.build_adjacency();
    return g;
}

FactorGraph sample_factor_ensemble(FactorEnsembleKind kind, int n, int m, std::uint64_t seed) {
    if (n < 0 || m < 1) throw ValidationError("factor ensemble: need n >= 0, m >= 1");
    Rng rng(seed);
    FactorGraph g;
    g.n_vnodes = n;
    g.n_cnodes = m;
    if (kind.tag == FactorEnsembleKind::Regular) {
        if (kind.l < 1 || kind.k < 1 ||
            static_cast<long long>(n) * kind.l != static_cast<long long>(m) * kind.k)
            throw ValidationError("regular factor ensemble requires n*l == m*k");
        std::vector<int> c_sockets;
        c_sockets.reserve(static_cast<std::size_t>(m) * kind.k);
        for (int a = 0; a < m; ++a)
            for (int s = 0; s < kind.k; ++s) c_sockets.push_back(a);
        for (std::size_t i = c_sockets.size(); i > 1; --i)
            std::swap(c_sockets[i - 1], c_sockets[rng.below(i)]);
        std::size_t s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < kind.l; ++j) g.edges.push_back({i, c_sockets[s++]});
    } else {
        if (kind.l < 3) throw ValidationError("poisson_l ensemble requires l >= 3");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < kind.l; ++j)
                g.edges.push_back({i, static_cast<int>(rng.below(m))});
    }
    g.build_adjacency();
    return g;
}

RootedTree sample_galton_watson_tree(const DegreeDistribution& root_dist,
                                     const DegreeDistribution& offspring_dist,
                                     int depth, std::uint64_t seed) {
    if (depth < 0) throw ValidationError("galton-watson: depth must be >= 0");
    root_dist.validate();
    offspring_dist.validate();
    Rng rng(seed);
    RootedTree t;
    t.parent = {-1};
    t.children = {{}};
    t.generation = {0};
    std::queue<int> frontier;
    frontier.push(0);
    while (!frontier.empty()) {
        int v = frontier.front();
        frontier.pop();
        if (t.generation[v] >= depth) continue;
        int k = (v == 0) ? root_dist.sample(rng) : offspring_dist.sample(rng);
        for (int c = 0; c < k; ++c) {
            int id = t.n_vertices();
            t.parent.push_back(v);
            t.children.push_back({});
            t.generation.push_back(t.generation[v] + 1);
            t.children[v].push_back(id);
            frontier.push(id);
        }
    }
    return t;
}

LocalBall local_ball(const MultiGraph& g, int center, int t) {
    if (center < 0 || center >= g.n_vertices)
        throw ValidationError("local_ball: center out of range");
    std::vector<int> dist(g.n_vertices, -1);
    std::vector<int> order;
    dist[center] = 0;
    order.push_back(center);
    std::queue<int> q;
    q.push(center);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (dist[u] == t) continue;
        for (auto [v, e] : g.adjacency[u]) {
            (void)e;
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                order.push_back(v);
                q.push(v);
            }
        }
    }
    LocalBall ball;
    std::vector<int> new_id(g.n_vertices, -1);
    for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<int>(i);
    ball.vertex_ids = order;
    ball.subgraph.n_vertices = static_cast<int>(order.size());
    ball.dist.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) ball.dist[i] = dist[order[i]];
    for (auto [u, v] : g.edges) {
        if (dist[u] < 0 || dist[v] < 0) continue;
        // Boundary partition: edges between two distance-t vertices stay outside.
        if (dist[u] == t && dist[v] == t) continue;
        ball.subgraph.edges.push_back({new_id[u], new_id[v]});
    }
    ball.subgraph.build_adjacency();
    ball.is_tree =
        ball.subgraph.edges.size() == static_cast<std::size_t>(ball.subgraph.n_vertices) - 1;
    for (int v : order)
        if (dist[v] == t) ball.boundary.push_back(v);
    return ball;
}

namespace {

// Recursive canonical form; children sorted by their own code.
std::string subtree_code(const MultiGraph& g, int v, int parent,
                         std::vector<std::string>& memo_unused) {
    (void)memo_unused;
    std::vector<std::string> child_codes;
    for (auto [w, e] : g.adjacency[v]) {
        (void)e;
        if (w == parent) {
            parent = -2;  // consume one parallel slot toward the parent
            continue;
        }
        std::vector<std::string> dummy;
        child_codes.push_back(subtree_code(g, w, v, dummy));
    }
    std::sort(child_codes.begin(), child_codes.end());
    std::string code = "(";
    for (auto& c : child_codes) code += c;
    code += ")";
    return code;
}

void bfs_offspring(const MultiGraph& g, int v, int parent, std::string& out) {
    // Emit offspring counts in BFS order with siblings sorted by subtree code.
    std::queue<std::pair<int, int>> q;
    q.push({v, parent});
    bool first = true;
    while (!q.empty()) {
        auto [u, p] = q.front();
        q.pop();
        std::vector<std::pair<std::string, int>> kids;
        int pp = p;
        for (auto [w, e] : g.adjacency[u]) {
            (void)e;
            if (w == pp) {
                pp = -2;
                continue;
            }
            std::vector<std::string> dummy;
            kids.push_back({subtree_code(g, w, u, dummy), w});
        }
        std::sort(kids.begin(), kids.end());
        if (!first) out += ",";
        first = false;
        out += std::to_string(kids.size());
        for (auto& [code, w] : kids) {
            (void)code;
            q.push({w, u});
        }
    }
}

}  // namespace

std::string canonical_tree_code(const LocalBall& ball) {
    if (!ball.is_tree) return "cyclic";
    std::string out;
    bfs_offspring(ball.subgraph, 0, -1, out);
    return out;
}

std::map<std::string, double> empirical_local_profile(
    const std::function<MultiGraph(std::uint64_t)>& sampler, int t,
    int n_samples, std::uint64_t seed, int max_ball) {
    if (n_samples < 1) throw ValidationError("empirical_local_profile: n_samples >= 1");
    std::map<std::string, double> counts;
    Rng root_rng(seed, 0xB411);
    for (int s = 0; s < n_samples; ++s) {
        MultiGraph g = sampler(seed + static_cast<std::uint64_t>(s));
        int root = static_cast<int>(root_rng.below(g.n_vertices));
        LocalBall ball = local_ball(g, root, t);
        if (ball.subgraph.n_vertices > max_ball)
            throw ValidationError("empirical_local_profile: ball exceeds enumerable guard");
        counts[canonical_tree_code(ball)] += 1.0;
    }
    for (auto& [code, c] : counts) c /= n_samples;
    return counts;
}

}  // namespace sgm
