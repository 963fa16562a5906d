#include "sgm/bp.hpp"

#include <cmath>

#include "sgm/errors.hpp"

namespace sgm {

namespace {

// Product over incoming edges at vertex i, excluding directed edge `exclude`.
// Self-loop tables fold into the vertex term as psi_ee(x, x), counted once
// even though adjacency lists the loop twice.
double incoming_product(const MessageSet& nu, const MultiGraph& g,
                        const Specification& spec, int i, int x, int exclude) {
    int q = spec.q;
    double w = spec.vertex_pot[i][x];
    int loop_seen = -1;
    for (auto [j, e] : g.adjacency[i]) {
        if (e == exclude) continue;
        if (g.edges[e].first == g.edges[e].second) {
            if (loop_seen == e) continue;
            loop_seen = e;
            w *= spec.edge_pot[e][x * q + x];
            continue;
        }
        bool i_is_first = (g.edges[e].first == i);
        const double* in = nu.msg(e, i_is_first ? 1 : 0);
        double s = 0.0;
        for (int y = 0; y < q; ++y)
            s += (i_is_first ? spec.edge_pot[e][x * q + y] : spec.edge_pot[e][y * q + x]) *
                 in[y];
        w *= s;
    }
    return w;
}

}  // namespace

MessageSet MessageSet::uniform(const MultiGraph& g, int q) {
    MessageSet nu;
    nu.q = q;
    nu.data.assign(2 * g.edges.size() * q, 1.0 / q);
    return nu;
}

MessageSet bp_update(const MessageSet& nu, const MultiGraph& g, const Specification& spec) {
    int q = spec.q;
    MessageSet out = nu;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        if (u == v) continue;  // self-loop messages are inert
        for (int dir = 0; dir < 2; ++dir) {
            int from = dir == 0 ? u : v;
            double* m = out.msg(static_cast<int>(e), dir);
            double z = 0.0;
            for (int x = 0; x < q; ++x) {
                m[x] = incoming_product(nu, g, spec, from, x, static_cast<int>(e));
                z += m[x];
            }
            if (z <= 0.0)
                throw NumericalError("bp_update: message annihilated (zero normalizer)");
            for (int x = 0; x < q; ++x) m[x] /= z;
        }
    }
    return out;
}

std::pair<MessageSet, ConvergenceReport> bp_fixed_point(const MultiGraph& g,
                                                        const Specification& spec,
                                                        const MessageSet& init,
                                                        double damping, double tol,
                                                        int max_iter) {
    spec.validate(g);
    if (damping < 0.0 || damping >= 1.0)
        throw ValidationError("bp_fixed_point: damping must lie in [0, 1)");
    MessageSet nu = init;
    ConvergenceReport rep;
    rep.damping = damping;
    int q = spec.q;
    for (int it = 0; it < max_iter; ++it) {
        MessageSet next = bp_update(nu, g, spec);
        double res = 0.0;
        for (std::size_t d = 0; d < nu.n_directed(); ++d) {
            double tv = 0.0;
            for (int x = 0; x < q; ++x) {
                double blended =
                    (1.0 - damping) * next.data[d * q + x] + damping * nu.data[d * q + x];
                tv += std::abs(blended - nu.data[d * q + x]);
                next.data[d * q + x] = blended;
            }
            res = std::max(res, 0.5 * tv);
        }
        nu = std::move(next);
        rep.residuals.push_back(res);
        rep.iterations = it + 1;
        if (res <= tol) {
            rep.converged = true;
            break;
        }
    }
    return {std::move(nu), std::move(rep)};
}

double bethe_free_entropy(const MessageSet& nu, const MultiGraph& g,
                          const Specification& spec) {
    int q = spec.q;
    double phi = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].first == g.edges[e].second) continue;  // folded into vertex term
        double z = 0.0;
        for (int x = 0; x < q; ++x)
            for (int y = 0; y < q; ++y)
                z += spec.edge_pot[e][x * q + y] * nu.msg(static_cast<int>(e), 0)[x] *
                     nu.msg(static_cast<int>(e), 1)[y];
        if (z <= 0.0) throw NumericalError("bethe free entropy: degenerate edge term");
        phi -= std::log(z);
    }
    for (int i = 0; i < g.n_vertices; ++i) {
        double z = 0.0;
        for (int x = 0; x < q; ++x) z += incoming_product(nu, g, spec, i, x, -1);
        if (z <= 0.0) throw NumericalError("bethe free entropy: degenerate vertex term");
        phi += std::log(z);
    }
    return phi;
}

std::vector<double> bp_marginal(const MessageSet& nu, const MultiGraph& g,
                                const Specification& spec, int i) {
    int q = spec.q;
    std::vector<double> mu(q);
    double z = 0.0;
    for (int x = 0; x < q; ++x) {
        mu[x] = incoming_product(nu, g, spec, i, x, -1);
        z += mu[x];
    }
    if (z <= 0.0) throw NumericalError("bp_marginal: zero normalizer");
    for (int x = 0; x < q; ++x) mu[x] /= z;
    return mu;
}

namespace {

constexpr double kAtanhClamp = 1.0 - 1e-15;

double clamped_atanh(double u, long long& clamp_events) {
    if (u > kAtanhClamp) {
        ++clamp_events;
        u = kAtanhClamp;
    } else if (u < -kAtanhClamp) {
        ++clamp_events;
        u = -kAtanhClamp;
    }
    return std::atanh(u);
}

}  // namespace

IsingCavityResult ising_cavity_fixed_point(const MultiGraph& g, double beta,
                                           const std::vector<double>& B,
                                           const std::vector<double>& J, double init_h,
                                           double damping, double tol, int max_iter) {
    if (B.size() != static_cast<std::size_t>(g.n_vertices))
        throw ValidationError("ising cavity: B size mismatch");
    if (J.size() != g.edges.size()) throw ValidationError("ising cavity: J size mismatch");
    if (damping < 0.0 || damping >= 1.0)
        throw ValidationError("ising cavity: damping must lie in [0, 1)");
    IsingCavityResult out;
    out.fields.beta = beta;
    out.fields.B = B;
    out.fields.theta.resize(J.size());
    for (std::size_t e = 0; e < J.size(); ++e)
        out.fields.theta[e] = std::tanh(beta * J[e]);
    out.fields.h.assign(2 * g.edges.size(), init_h);
    out.report.damping = damping;

    auto& h = out.fields.h;
    const auto& theta = out.fields.theta;
    // Field flowing out of `from` along edge e; self-loops contribute nothing
    // (their spin product is a constant weight).
    auto field_from = [&](const std::vector<double>& cur, int from, int exclude) {
        double s = B[from];
        for (auto [j, e] : g.adjacency[from]) {
            if (e == exclude || g.edges[e].first == g.edges[e].second) continue;
            int dir_in = (g.edges[e].first == from) ? 1 : 0;
            s += clamped_atanh(theta[e] * std::tanh(cur[2 * e + dir_in]),
                               out.report.clamp_events);
        }
        return s;
    };

    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> next(h.size());
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            auto [u, v] = g.edges[e];
            next[2 * e + 0] = field_from(h, u, static_cast<int>(e));
            next[2 * e + 1] = field_from(h, v, static_cast<int>(e));
        }
        double res = 0.0;
        for (std::size_t d = 0; d < h.size(); ++d) {
            double blended = (1.0 - damping) * next[d] + damping * h[d];
            res = std::max(res, std::abs(blended - h[d]));
            h[d] = blended;
        }
        out.report.residuals.push_back(res);
        out.report.iterations = it + 1;
        if (res <= tol) {
            out.report.converged = true;
            break;
        }
    }

    out.magnetization.resize(g.n_vertices);
    for (int i = 0; i < g.n_vertices; ++i)
        out.magnetization[i] = std::tanh(field_from(h, i, -1));

    // Phi = sum_e { gamma(theta_e) - log(1 + theta_e th(h_uv) th(h_vu)) }
    //     + sum_i log( e^{B} prod (1 + theta th h_in) + e^{-B} prod (1 - ...) )
    double phi = 0.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].first == g.edges[e].second) {
            phi += beta * J[e];  // s*s = +1, so the loop multiplies Z by e^{beta J}
            continue;
        }
        phi += -0.5 * std::log1p(-theta[e] * theta[e]) -
               std::log1p(theta[e] * std::tanh(h[2 * e]) * std::tanh(h[2 * e + 1]));
    }
    for (int i = 0; i < g.n_vertices; ++i) {
        double lp = B[i], lm = -B[i];
        for (auto [j, e] : g.adjacency[i]) {
            if (g.edges[e].first == g.edges[e].second) continue;
            int dir_in = (g.edges[e].first == i) ? 1 : 0;
            double t = theta[e] * std::tanh(h[2 * e + dir_in]);
            lp += std::log1p(t);
            lm += std::log1p(-t);
        }
        phi += std::max(lp, lm) + std::log1p(std::exp(-std::abs(lp - lm)));
    }
    out.free_entropy = phi;
    return out;
}

TapResult tap_solve(const std::vector<std::vector<double>>& J, double beta, double B,
                    const std::vector<double>& init, double damping, double tol,
                    int max_iter) {
    std::size_t n = J.size();
    for (const auto& row : J)
        if (row.size() != n) throw ValidationError("tap_solve: J must be square");
    if (init.size() != n) throw ValidationError("tap_solve: init size mismatch");
    if (damping < 0.0 || damping >= 1.0)
        throw ValidationError("tap_solve: damping must lie in [0, 1)");
    TapResult out;
    out.m = init;
    out.report.damping = damping;
    double rn = std::sqrt(static_cast<double>(n));
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> next(n);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double field = B, onsager = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                if (l == i) continue;
                field += beta / rn * J[i][l] * out.m[l];
                onsager += J[i][l] * J[i][l] * (1.0 - out.m[l] * out.m[l]);
            }
            field -= out.m[i] * (beta * beta / n) * onsager;
            next[i] = (1.0 - damping) * std::tanh(field) + damping * out.m[i];
            res = std::max(res, std::abs(next[i] - out.m[i]));
        }
        out.m = std::move(next);
        out.report.residuals.push_back(res);
        out.report.iterations = it + 1;
        if (res <= tol) {
            out.report.converged = true;
            break;
        }
    }
    return out;
}

IndependentSetResult independent_set_bp(const MultiGraph& g, double lambda, double tol,
                                        int max_iter) {
    if (lambda <= 0.0) throw ValidationError("independent_set_bp: lambda must be > 0");
    for (auto [u, v] : g.edges)
        if (u == v) throw ValidationError("independent_set_bp: self-loop forbids occupancy");
    IndependentSetResult out;
    out.nu0.assign(2 * g.edges.size(), 1.0 / (1.0 + lambda));
    auto& nu = out.nu0;
    // nu_{i->j} = 1 / (1 + lambda prod_{l in di \ j} nu_{l->i})
    auto update_from = [&](const std::vector<double>& cur, int from, int exclude) {
        double p = 1.0;
        for (auto [l, e] : g.adjacency[from]) {
            if (e == exclude) continue;
            int dir_in = (g.edges[e].first == from) ? 1 : 0;
            p *= cur[2 * e + dir_in];
        }
        return 1.0 / (1.0 + lambda * p);
    };
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> next(nu.size());
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            next[2 * e + 0] = update_from(nu, g.edges[e].first, static_cast<int>(e));
            next[2 * e + 1] = update_from(nu, g.edges[e].second, static_cast<int>(e));
        }
        double res = 0.0;
        for (std::size_t d = 0; d < nu.size(); ++d)
            res = std::max(res, std::abs(next[d] - nu[d]));
        nu = std::move(next);
        out.report.residuals.push_back(res);
        out.report.iterations = it + 1;
        if (res <= tol) {
            out.report.converged = true;
            break;
        }
    }
    out.density.resize(g.n_vertices);
    double phi = 0.0;
    for (int i = 0; i < g.n_vertices; ++i) {
        double p = 1.0;
        for (auto [l, e] : g.adjacency[i]) {
            int dir_in = (g.edges[e].first == i) ? 1 : 0;
            p *= nu[2 * e + dir_in];
        }
        out.density[i] = lambda * p / (1.0 + lambda * p);
        phi += std::log1p(lambda * p);
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        double a = nu[2 * e], b = nu[2 * e + 1];
        phi -= std::log(a + b - a * b);
    }
    out.free_entropy = phi;
    return out;
}

double bethe_stationarity_check(const MessageSet& nu, const MultiGraph& g,
                                const Specification& spec, double fd_step) {
    int q = spec.q;
    double worst = 0.0;
    MessageSet pert = nu;
    for (std::size_t d = 0; d < nu.n_directed(); ++d) {
        for (int x = 1; x < q; ++x) {
            // tangent direction e_x - e_0 keeps the message normalized
            double save0 = pert.data[d * q], savex = pert.data[d * q + x];
            pert.data[d * q + x] = savex + fd_step;
            pert.data[d * q] = save0 - fd_step;
            double up = bethe_free_entropy(pert, g, spec);
            pert.data[d * q + x] = savex - fd_step;
            pert.data[d * q] = save0 + fd_step;
            double down = bethe_free_entropy(pert, g, spec);
            pert.data[d * q + x] = savex;
            pert.data[d * q] = save0;
            worst = std::max(worst, std::abs(up - down) / (2.0 * fd_step));
        }
    }
    return worst;
}

}  // namespace sgm
