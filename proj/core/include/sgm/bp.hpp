#pragma once

#include <vector>

#include "sgm/graph.hpp"
#include "sgm/potentials.hpp"

namespace sgm {

// One pmf over X per directed edge. For edge index e = (u,v) the direction
// 0 message is u->v and direction 1 is v->u.
struct MessageSet {
    int q = 2;
    std::vector<double> data;  // (2e + dir) * q blocks

    static MessageSet uniform(const MultiGraph& g, int q);

    double* msg(int edge, int dir) { return data.data() + (2 * edge + dir) * q; }
    const double* msg(int edge, int dir) const { return data.data() + (2 * edge + dir) * q; }
    std::size_t n_directed(void) const { return data.size() / q; }
};

struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> residuals;  // sup-TV message change per iteration
    bool converged = false;
    double damping = 0.0;
    long long clamp_events = 0;  // atanh-guard activations (cavity form)
};

// Sum-product update, synchronous over all directed edges.
MessageSet bp_update(const MessageSet& nu, const MultiGraph& g, const Specification& spec);

std::pair<MessageSet, ConvergenceReport> bp_fixed_point(
    const MultiGraph& g, const Specification& spec, const MessageSet& init,
    double damping = 0.0, double tol = 1e-12, int max_iter = 1000);

double bethe_free_entropy(const MessageSet& nu, const MultiGraph& g,
                          const Specification& spec);

std::vector<double> bp_marginal(const MessageSet& nu, const MultiGraph& g,
                                const Specification& spec, int i);

// Scalar half-log-odds reparametrization of binary messages, with the Ising
// couplings baked in.
struct CavityFieldSet {
    std::vector<double> h;      // per directed edge, (2e + dir) indexing
    std::vector<double> theta;  // tanh(beta J_e) per edge
    std::vector<double> B;      // per vertex
    double beta = 0.0;
};

struct IsingCavityResult {
    CavityFieldSet fields;
    std::vector<double> magnetization;
    double free_entropy = 0.0;
    ConvergenceReport report;
};

IsingCavityResult ising_cavity_fixed_point(const MultiGraph& g, double beta,
                                           const std::vector<double>& B,
                                           const std::vector<double>& J,
                                           double init_h = 0.0, double damping = 0.0,
                                           double tol = 1e-12, int max_iter = 2000);

// Magnetizations from the TAP equations on a fully connected instance;
// couplings enter as (beta/sqrt(n)) J_il with the Onsager reaction term.
struct TapResult {
    std::vector<double> m;
    ConvergenceReport report;
};
TapResult tap_solve(const std::vector<std::vector<double>>& J, double beta, double B,
                    const std::vector<double>& init, double damping = 0.5,
                    double tol = 1e-10, int max_iter = 5000);

struct IndependentSetResult {
    std::vector<double> nu0;  // nu_{i->j}(0) per directed edge
    std::vector<double> density;  // mu(x_i = 1)
    double free_entropy = 0.0;
    ConvergenceReport report;
};
IndependentSetResult independent_set_bp(const MultiGraph& g, double lambda,
                                        double tol = 1e-12, int max_iter = 2000);

// Max |directional derivative of Phi| over simplex-tangent message
// perturbations, by central finite differences.
double bethe_stationarity_check(const MessageSet& nu, const MultiGraph& g,
                                const Specification& spec, double fd_step = 1e-5);

}  // namespace sgm
