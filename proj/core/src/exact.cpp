#include "sgm/exact.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "sgm/bp.hpp"
#include "sgm/errors.hpp"

namespace sgm {

namespace {

constexpr double kStateGuard = 16777216.0;  // 2^24

void check_guard(int q, int n) {
    if (n * std::log(static_cast<double>(q)) > std::log(kStateGuard) + 1e-9)
        throw ValidationError("enumeration guard exceeded: |X|^n > 2^24");
}

// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double config_weight(const MultiGraph& g, const Specification& spec,
                     const std::vector<int>& x) {
    double w = 1.0;
    for (int i = 0; i < g.n_vertices; ++i) w *= spec.vertex_pot[i][x[i]];
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        w *= spec.edge_pot[e][x[u] * spec.q + x[v]];
    }
    return w;
}

bool next_config(std::vector<int>& x, int q) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (++x[i] < q) return true;
        x[i] = 0;
    }
    return false;
}

}  // namespace

double exact_log_z(const MultiGraph& g, const Specification& spec) {
    spec.validate(g);
    check_guard(spec.q, g.n_vertices);
    std::vector<int> x(g.n_vertices, 0);
    Kahan z;
    do {
        z.add(config_weight(g, spec, x));
    } while (next_config(x, spec.q));
    if (z.sum <= 0.0)
        throw NumericalError("exact_log_z: zero-measure model (no configuration has weight)");
    return std::log(z.sum);
}

double exact_log_z(const FactorGraph& g, const FactorSpecification& spec) {
    check_guard(spec.q, g.n_vnodes);
    std::vector<int> x(g.n_vnodes, 0);
    Kahan z;
    do {
        double w = 1.0;
        if (!spec.vertex_pot.empty())
            for (int i = 0; i < g.n_vnodes; ++i) w *= spec.vertex_pot[i][x[i]];
        for (int a = 0; a < g.n_cnodes; ++a) {
            std::size_t cfg = 0, mult = 1;
            for (int i : g.c_adjacency[a]) {
                cfg += static_cast<std::size_t>(x[i]) * mult;
                mult *= spec.q;
            }
            w *= spec.factor_pot[a][cfg];
        }
        z.add(w);
    } while (next_config(x, spec.q));
    if (z.sum <= 0.0) throw NumericalError("exact_log_z: zero-measure factor model");
    return std::log(z.sum);
}

std::vector<double> exact_marginal(const MultiGraph& g, const Specification& spec,
                                   const std::vector<int>& U) {
    spec.validate(g);
    check_guard(spec.q, g.n_vertices);
    std::size_t out_size = 1;
    for (std::size_t i = 0; i < U.size(); ++i) out_size *= spec.q;
    std::vector<Kahan> acc(out_size);
    Kahan z;
    std::vector<int> x(g.n_vertices, 0);
    do {
        double w = config_weight(g, spec, x);
        z.add(w);
        std::size_t idx = 0, mult = 1;
        for (int u : U) {
            idx += static_cast<std::size_t>(x[u]) * mult;
            mult *= spec.q;
        }
        acc[idx].add(w);
    } while (next_config(x, spec.q));
    if (z.sum <= 0.0) throw NumericalError("exact_marginal: zero-measure model");
    std::vector<double> out(out_size);
    for (std::size_t i = 0; i < out_size; ++i) out[i] = acc[i].sum / z.sum;
    return out;
}

std::vector<double> exact_conditional(const MultiGraph& g, const Specification& spec,
                                      const std::vector<int>& U,
                                      const std::vector<int>& W,
                                      const std::vector<int>& xw) {
    spec.validate(g);
    check_guard(spec.q, g.n_vertices);
    if (W.size() != xw.size()) throw ValidationError("exact_conditional: W/xw size mismatch");
    std::size_t out_size = 1;
    for (std::size_t i = 0; i < U.size(); ++i) out_size *= spec.q;
    std::vector<Kahan> acc(out_size);
    Kahan z;
    std::vector<int> x(g.n_vertices, 0);
    do {
        bool match = true;
        for (std::size_t i = 0; i < W.size(); ++i)
            if (x[W[i]] != xw[i]) {
                match = false;
                break;
            }
        if (!match) continue;
        double w = config_weight(g, spec, x);
        z.add(w);
        std::size_t idx = 0, mult = 1;
        for (int u : U) {
            idx += static_cast<std::size_t>(x[u]) * mult;
            mult *= spec.q;
        }
        acc[idx].add(w);
    } while (next_config(x, spec.q));
    if (z.sum <= 0.0) throw NumericalError("exact_conditional: conditioning event has measure zero");
    std::vector<double> out(out_size);
    for (std::size_t i = 0; i < out_size; ++i) out[i] = acc[i].sum / z.sum;
    return out;
}

double exact_reconstruction_tv(const MultiGraph& g, const Specification& spec,
                               int root, int t) {
    LocalBall ball = local_ball(g, root, t);
    std::vector<int> D;
    for (int v : ball.boundary)
        if (v != root) D.push_back(v);
    if (D.empty()) return 0.0;  // far half carries no information
    std::vector<int> U;
    U.push_back(root);
    for (int v : D) U.push_back(v);
    check_guard(spec.q, static_cast<int>(U.size()));
    std::vector<double> joint = exact_marginal(g, spec, U);
    int q = spec.q;
    std::size_t d_size = joint.size() / q;
    std::vector<double> mu_root(q, 0.0), mu_d(d_size, 0.0);
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
        mu_root[idx % q] += joint[idx];
        mu_d[idx / q] += joint[idx];
    }
    double tv = 0.0;
    for (std::size_t idx = 0; idx < joint.size(); ++idx)
        tv += std::abs(joint[idx] - mu_root[idx % q] * mu_d[idx / q]);
    return 0.5 * tv;
}

namespace {

struct Factor {
    std::vector<int> vars;     // sorted; vars[0] is the least significant digit
    std::vector<double> table;
};

Factor multiply_and_sum_out(const std::vector<Factor>& facs, int victim, int q) {
    std::set<int> var_set;
    for (const auto& f : facs)
        for (int v : f.vars) var_set.insert(v);
    var_set.erase(victim);
    std::vector<int> out_vars(var_set.begin(), var_set.end());
    std::size_t out_size = 1;
    for (std::size_t i = 0; i < out_vars.size(); ++i) {
        out_size *= q;
        if (out_size > static_cast<std::size_t>(kStateGuard))
            throw ValidationError("variable elimination: intermediate table exceeds guard");
    }
    Factor out{out_vars, std::vector<double>(out_size, 0.0)};
    std::vector<int> assign(out_vars.size(), 0);
    std::size_t idx = 0;
    for (;;) {
        double total = 0.0;
        for (int xv = 0; xv < q; ++xv) {
            double w = 1.0;
            for (const auto& f : facs) {
                std::size_t fidx = 0, mult = 1;
                for (int v : f.vars) {
                    int val;
                    if (v == victim) {
                        val = xv;
                    } else {
                        auto it = std::lower_bound(out_vars.begin(), out_vars.end(), v);
                        val = assign[it - out_vars.begin()];
                    }
                    fidx += static_cast<std::size_t>(val) * mult;
                    mult *= q;
                }
                w *= f.table[fidx];
            }
            total += w;
        }
        out.table[idx] = total;
        // advance mixed-radix counter over out_vars
        std::size_t i = 0;
        for (; i < assign.size(); ++i) {
            if (++assign[i] < q) break;
            assign[i] = 0;
        }
        ++idx;
        if (i == assign.size()) break;
        // idx tracks the counter because vars[0] is least significant
    }
    return out;
}

}  // namespace

double count_proper_colorings(const MultiGraph& g, int q) {
    if (q < 1) throw ValidationError("count_proper_colorings: q must be >= 1");
    std::set<std::pair<int, int>> edge_set;
    for (auto [u, v] : g.edges) {
        if (u == v) return 0.0;  // self-loop: x != x is unsatisfiable
        edge_set.insert(std::minmax(u, v));
    }
    std::vector<Factor> factors;
    for (auto [u, v] : edge_set) {
        Factor f;
        f.vars = {u, v};
        f.table.assign(static_cast<std::size_t>(q) * q, 1.0);
        for (int x = 0; x < q; ++x) f.table[x * q + x] = 0.0;
        factors.push_back(std::move(f));
    }
    double scalar_log = 0.0;
    std::vector<char> eliminated(g.n_vertices, 0);
    for (int round = 0; round < g.n_vertices; ++round) {
        // min-fill-ish: pick the vertex whose elimination touches the fewest vars
        int best = -1;
        std::size_t best_width = static_cast<std::size_t>(-1);
        for (int v = 0; v < g.n_vertices; ++v) {
            if (eliminated[v]) continue;
            std::set<int> nb;
            for (const auto& f : factors)
                if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
                    for (int w : f.vars) nb.insert(w);
            std::size_t width = nb.empty() ? 0 : nb.size() - 1;
            if (width < best_width) {
                best_width = width;
                best = v;
            }
        }
        int v = best;
        eliminated[v] = 1;
        std::vector<Factor> touching, rest;
        for (auto& f : factors) {
            if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
                touching.push_back(std::move(f));
            else
                rest.push_back(std::move(f));
        }
        factors = std::move(rest);
        if (touching.empty()) {
            scalar_log += std::log(static_cast<double>(q));  // free vertex
            continue;
        }
        Factor merged = multiply_and_sum_out(touching, v, q);
        if (merged.vars.empty()) {
            if (merged.table[0] <= 0.0) return 0.0;
            scalar_log += std::log(merged.table[0]);
        } else {
            factors.push_back(std::move(merged));
        }
    }
    return std::exp(scalar_log);
}

HyperloopExpansion hyperloop_polynomial(const FactorGraph& g, double beta) {
    if (g.n_cnodes > 24)
        throw ValidationError("hyperloop_polynomial: subset enumeration guard |F| <= 24");
    check_guard(2, g.n_vnodes);
    HyperloopExpansion out;
    out.counts.assign(g.n_cnodes + 1, 0.0);
    out.counts[0] = 1.0;  // the empty set by convention
    for (std::uint32_t mask = 1; mask < (1u << g.n_cnodes); ++mask) {
        std::vector<int> deg(g.n_vnodes, 0);
        for (int a = 0; a < g.n_cnodes; ++a)
            if ((mask >> a) & 1)
                for (int i : g.c_adjacency[a]) deg[i] += 1;
        bool even = true;
        for (int d : deg)
            if (d % 2 != 0) {
                even = false;
                break;
            }
        if (even) out.counts[__builtin_popcount(mask)] += 1.0;
    }
    double th = std::tanh(beta);
    double poly = 0.0, tpow = 1.0;
    for (int l = 0; l <= g.n_cnodes; ++l) {
        poly += out.counts[l] * tpow;
        tpow *= th;
    }
    out.rhs = std::pow(2.0, g.n_vnodes) * std::pow(std::cosh(beta), g.n_cnodes) * poly;
    // direct enumeration of Z_G(beta) = sum_x exp(beta sum_a x_a)
    Kahan z;
    for (std::uint32_t x = 0; x < (1u << g.n_vnodes); ++x) {
        double energy = 0.0;
        for (int a = 0; a < g.n_cnodes; ++a) {
            int sign = 1;
            for (int i : g.c_adjacency[a])
                if (!((x >> i) & 1)) sign = -sign;
            energy += sign;
        }
        z.add(std::exp(beta * energy));
    }
    out.lhs = z.sum;
    return out;
}

SubgraphExpansion ising_subgraph_expansion(const MultiGraph& g,
                                           const std::vector<int>& U, double beta) {
    int m = static_cast<int>(g.edges.size());
    if (m > 24) throw ValidationError("ising_subgraph_expansion: |E| <= 24 guard");
    check_guard(2, g.n_vertices);
    std::vector<char> in_u(g.n_vertices, 0);
    for (int u : U) in_u[u] = 1;
    SubgraphExpansion out;
    out.counts.assign(m + 1, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> deg(g.n_vertices, 0);
        for (int e = 0; e < m; ++e)
            if ((mask >> e) & 1) {
                deg[g.edges[e].first] += 1;
                deg[g.edges[e].second] += 1;
            }
        bool ok = true;
        for (int i = 0; i < g.n_vertices; ++i)
            if ((deg[i] % 2) != in_u[i]) {
                ok = false;
                break;
            }
        if (ok) out.counts[__builtin_popcount(mask)] += 1.0;
    }
    double th = std::tanh(beta);
    double poly = 0.0, tpow = 1.0;
    for (int l = 0; l <= m; ++l) {
        poly += out.counts[l] * tpow;
        tpow *= th;
    }
    out.rhs = std::pow(2.0, g.n_vertices) * std::pow(std::cosh(beta), m) * poly;
    Kahan z;
    for (std::uint32_t x = 0; x < (1u << g.n_vertices); ++x) {
        double energy = 0.0;
        double sign = 1.0;
        for (int e = 0; e < m; ++e) {
            int su = ((x >> g.edges[e].first) & 1) ? 1 : -1;
            int sv = ((x >> g.edges[e].second) & 1) ? 1 : -1;
            energy += su * sv;
        }
        for (int u : U) sign *= ((x >> u) & 1) ? 1.0 : -1.0;
        z.add(sign * std::exp(beta * energy));
    }
    out.lhs = z.sum;
    return out;
}

namespace {

// G_U is a tree with every outward-connected vertex a leaf, diam <= 2r.
bool valid_patch(const MultiGraph& g, const std::vector<int>& U, int r,
                 std::vector<int>& attach) {
    std::vector<int> pos(g.n_vertices, -1);
    for (std::size_t i = 0; i < U.size(); ++i) pos[U[i]] = static_cast<int>(i);
    int internal_edges = 0;
    attach.assign(U.size(), -1);
    std::vector<std::vector<int>> adj(U.size());
    for (auto [u, v] : g.edges) {
        if (pos[u] >= 0 && pos[v] >= 0) {
            ++internal_edges;
            adj[pos[u]].push_back(pos[v]);
            adj[pos[v]].push_back(pos[u]);
        }
    }
    if (internal_edges != static_cast<int>(U.size()) - 1) return false;  // not a tree
    // connectivity
    std::vector<int> dist(U.size(), -1);
    std::queue<int> q;
    q.push(0);
    dist[0] = 0;
    int seen = 1;
    while (!q.empty()) {
        int a = q.front();
        q.pop();
        for (int b : adj[a])
            if (dist[b] < 0) {
                dist[b] = dist[a] + 1;
                ++seen;
                q.push(b);
            }
    }
    if (seen != static_cast<int>(U.size())) return false;
    // boundary vertices must be leaves; record the unique internal neighbor
    for (std::size_t i = 0; i < U.size(); ++i) {
        int outward = 0;
        for (auto [w, e] : g.adjacency[U[i]]) {
            (void)e;
            if (pos[w] < 0) ++outward;
        }
        if (outward > 0) {
            if (U.size() == 1) return true;  // singleton handled by the caller
            if (adj[i].size() != 1) return false;
            attach[i] = adj[i][0];
        }
    }
    // diameter <= 2r via BFS from every vertex (patches are tiny)
    for (std::size_t s = 0; s < U.size(); ++s) {
        std::vector<int> d2(U.size(), -1);
        std::queue<int> q2;
        q2.push(static_cast<int>(s));
        d2[s] = 0;
        while (!q2.empty()) {
            int a = q2.front();
            q2.pop();
            for (int b : adj[a])
                if (d2[b] < 0) {
                    d2[b] = d2[a] + 1;
                    if (d2[b] > 2 * r) return false;
                    q2.push(b);
                }
        }
    }
    return true;
}

}  // namespace

BetheErrorReport bethe_approximation_error(const MultiGraph& g, const Specification& spec,
                                           const MessageSet& messages, int r,
                                           long long subset_cap) {
    spec.validate(g);
    if (messages.q != spec.q) throw ValidationError("bethe error: message alphabet mismatch");
    for (std::size_t d = 0; d < messages.n_directed(); ++d) {
        double s = 0.0;
        for (int x = 0; x < spec.q; ++x) {
            double v = messages.data[d * spec.q + x];
            if (v < -1e-12) throw ValidationError("bethe error: negative message entry");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-9)
            throw ValidationError("bethe error: message not normalized");
    }
    if (g.n_vertices > 24) throw ValidationError("bethe error: exact oracle guard n <= 24");

    // Which direction of edge e points from u into v.
    auto msg_into = [&](int from, int to, int x) {
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (g.edges[e].first == from && g.edges[e].second == to)
                return messages.msg(static_cast<int>(e), 0)[x];
            if (g.edges[e].second == from && g.edges[e].first == to)
                return messages.msg(static_cast<int>(e), 1)[x];
        }
        throw ValidationError("bethe error: missing message for an edge");
    };

    BetheErrorReport report;
    long long total_masks = 1LL << g.n_vertices;
    long long limit = std::min(total_masks, subset_cap);
    report.cap_hit = limit < total_masks;
    int q = spec.q;
    for (long long mask = 1; mask < limit; ++mask) {
        std::vector<int> U;
        for (int v = 0; v < g.n_vertices; ++v)
            if ((mask >> v) & 1) U.push_back(v);
        std::vector<int> attach;
        if (!valid_patch(g, U, r, attach)) continue;
        ++report.patches_tested;

        std::vector<double> mu = exact_marginal(g, spec, U);
        std::vector<double> nu(mu.size(), 0.0);
        if (U.size() == 1) {
            // singleton patch: the BP belief at the vertex
            int i = U[0];
            for (int x = 0; x < q; ++x) {
                double w = spec.vertex_pot[i][x];
                for (auto [j, e] : g.adjacency[i]) {
                    double s = 0.0;
                    for (int y = 0; y < q; ++y)
                        s += spec.edge_pot[e][x * q + y] * msg_into(j, i, y);
                    w *= s;
                }
                nu[x] = w;
            }
        } else {
            std::vector<int> pos(g.n_vertices, -1);
            for (std::size_t i = 0; i < U.size(); ++i) pos[U[i]] = static_cast<int>(i);
            std::vector<int> x(U.size(), 0);
            std::size_t idx = 0;
            do {
                double w = 1.0;
                for (std::size_t i = 0; i < U.size(); ++i) {
                    if (attach[i] >= 0)
                        w *= msg_into(U[i], U[attach[i]], x[i]);
                    else
                        w *= spec.vertex_pot[U[i]][x[i]];
                }
                for (std::size_t e = 0; e < g.edges.size(); ++e) {
                    auto [a, b] = g.edges[e];
                    if (pos[a] >= 0 && pos[b] >= 0)
                        w *= spec.edge_pot[e][x[pos[a]] * q + x[pos[b]]];
                }
                nu[idx++] = w;
            } while (next_config(x, q));
        }
        double zu = 0.0;
        for (double v : nu) zu += v;
        if (zu <= 0.0) throw ValidationError("bethe error: non-permissive patch measure");
        double tv = 0.0;
        for (std::size_t i = 0; i < nu.size(); ++i) tv += std::abs(mu[i] - nu[i] / zu);
        report.epsilon = std::max(report.epsilon, 0.5 * tv);
    }
    return report;
}

}  // namespace sgm
