#include "sgm/potentials.hpp"

#include <cmath>

#include "sgm/errors.hpp"

namespace sgm {

void Specification::validate(const MultiGraph& g) const {
    if (q < 1) throw ValidationError("specification: alphabet size must be >= 1");
    if (edge_pot.size() != g.edges.size())
        throw ValidationError("specification: edge table count mismatch");
    if (vertex_pot.size() != static_cast<std::size_t>(g.n_vertices))
        throw ValidationError("specification: vertex table count mismatch");
    for (std::size_t e = 0; e < edge_pot.size(); ++e) {
        const auto& t = edge_pot[e];
        if (t.size() != static_cast<std::size_t>(q) * q)
            throw ValidationError("specification: edge table size mismatch");
        for (int x = 0; x < q; ++x)
            for (int y = 0; y < q; ++y) {
                double v = t[x * q + y];
                if (v < 0.0 || v > psi_max + 1e-12 || !std::isfinite(v))
                    throw ValidationError("specification: edge potential out of [0, psi_max]");
                if (std::abs(v - t[y * q + x]) > 1e-12 * psi_max)
                    throw ValidationError("specification: edge potential not symmetric");
            }
    }
    for (const auto& t : vertex_pot) {
        if (t.size() != static_cast<std::size_t>(q))
            throw ValidationError("specification: vertex table size mismatch");
        for (double v : t)
            if (v < 0.0 || v > psi_max + 1e-12 || !std::isfinite(v))
                throw ValidationError("specification: vertex potential out of [0, psi_max]");
    }
    if (is_permissive()) {
        if (permitted.size() != static_cast<std::size_t>(g.n_vertices))
            throw ValidationError("specification: permitted-state list size mismatch");
        double bar = kappa * psi_max;
        for (std::size_t e = 0; e < edge_pot.size(); ++e) {
            auto [u, v] = g.edges[e];
            for (int y = 0; y < q; ++y) {
                if (edge_pot[e][permitted[u] * q + y] < bar - 1e-12)
                    throw ValidationError("specification: permissivity fails at an edge");
                if (edge_pot[e][y * q + permitted[v]] < bar - 1e-12)
                    throw ValidationError("specification: permissivity fails at an edge");
            }
        }
        for (const auto& t : vertex_pot)
            for (double x : t)
                if (x < bar - 1e-12)
                    throw ValidationError("specification: permissivity fails at a vertex");
    }
}

Specification Specification::ising(const MultiGraph& g, double beta,
                                   const std::vector<double>& B,
                                   const std::vector<double>& J) {
    if (B.size() != static_cast<std::size_t>(g.n_vertices))
        throw ValidationError("ising spec: B size mismatch");
    if (J.size() != g.edges.size()) throw ValidationError("ising spec: J size mismatch");
    Specification s;
    s.q = 2;
    double amax = 0.0;
    for (double j : J) amax = std::max(amax, std::abs(beta * j));
    double bmax = 0.0;
    for (double b : B) bmax = std::max(bmax, std::abs(b));
    s.psi_max = std::exp(std::max(amax, bmax));
    s.edge_pot.resize(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        double a = beta * J[e];
        // spins: state 0 -> -1, state 1 -> +1
        s.edge_pot[e] = {std::exp(a), std::exp(-a), std::exp(-a), std::exp(a)};
    }
    s.vertex_pot.resize(g.n_vertices);
    for (int i = 0; i < g.n_vertices; ++i)
        s.vertex_pot[i] = {std::exp(-B[i]), std::exp(B[i])};
    // Strictly positive potentials: permissive with any state as permitted.
    s.kappa = std::exp(-2.0 * std::max(amax, bmax));
    s.permitted.assign(g.n_vertices, 0);
    return s;
}

Specification Specification::ising_uniform(const MultiGraph& g, double beta, double B,
                                           double J) {
    return ising(g, beta, std::vector<double>(g.n_vertices, B),
                 std::vector<double>(g.edges.size(), J));
}

Specification Specification::coloring(const MultiGraph& g, int q) {
    if (q < 2) throw ValidationError("coloring spec: q must be >= 2");
    Specification s;
    s.q = q;
    s.psi_max = 1.0;
    s.edge_pot.resize(g.edges.size());
    for (auto& t : s.edge_pot) {
        t.assign(static_cast<std::size_t>(q) * q, 1.0);
        for (int x = 0; x < q; ++x) t[x * q + x] = 0.0;
    }
    s.vertex_pot.assign(g.n_vertices, std::vector<double>(q, 1.0));
    return s;  // not permissive: no single permitted state survives all edges
}

Specification Specification::independent_set(const MultiGraph& g, double lambda) {
    if (lambda <= 0.0) throw ValidationError("independent set spec: lambda must be > 0");
    Specification s;
    s.q = 2;
    s.psi_max = std::max(1.0, lambda);
    s.edge_pot.resize(g.edges.size());
    for (auto& t : s.edge_pot) t = {1.0, 1.0, 1.0, 0.0};
    s.vertex_pot.assign(g.n_vertices, {1.0, lambda});
    // State 0 (vertex excluded) is always permitted.
    s.kappa = std::min(1.0, 1.0 / s.psi_max);
    s.permitted.assign(g.n_vertices, 0);
    return s;
}

FactorSpecification FactorSpecification::parity(const FactorGraph& g, double beta) {
    FactorSpecification s;
    s.q = 2;
    s.factor_pot.resize(g.n_cnodes);
    for (int a = 0; a < g.n_cnodes; ++a) {
        int deg = static_cast<int>(g.c_adjacency[a].size());
        std::size_t size = static_cast<std::size_t>(1) << deg;
        s.factor_pot[a].resize(size);
        for (std::size_t cfg = 0; cfg < size; ++cfg) {
            int sign = 1;
            for (int d = 0; d < deg; ++d)
                if (!((cfg >> d) & 1)) sign = -sign;  // bit 0 means spin -1
            s.factor_pot[a][cfg] = std::exp(beta * sign);
        }
    }
    return s;
}

}  // namespace sgm
