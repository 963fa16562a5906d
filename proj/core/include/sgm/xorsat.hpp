#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgm/graph.hpp"

namespace sgm {

// Binary linear system H x = b, row-major bit-packed.
struct Gf2System {
    int m_rows = 0, n_cols = 0;
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<std::uint64_t> b;

    static Gf2System zero(int m, int n);
    // Incidence of a factor graph: row per c-node, column per v-node; parallel
    // edges cancel mod 2.
    static Gf2System from_factor_graph(const FactorGraph& fg,
                                       const std::vector<int>& rhs);

    bool get(int r, int c) const { return (rows[r][c >> 6] >> (c & 63)) & 1; }
    void flip(int r, int c) { rows[r][c >> 6] ^= 1ull << (c & 63); }
    bool get_b(int r) const { return (b[r >> 6] >> (r & 63)) & 1; }
    void flip_b(int r) { b[r >> 6] ^= 1ull << (r & 63); }

    Gf2System transpose() const;

    // Textual format: header "m n", one line of sorted column indices per row,
    // then b as a 0/1 string; bit-exact round trip.
    std::string to_text() const;
    static Gf2System from_text(const std::string& text);
};

struct Gf2Solution {
    int rank = 0;
    bool satisfiable = false;
    std::vector<int> solution;           // one solution (0/1), empty when unsat
    int log2_count = -1;                 // n - rank when satisfiable
    std::vector<double> weight_enumerator;  // solutions of Hx=0 by weight (n <= 20)
};
Gf2Solution gf2_solve(const Gf2System& sys, bool weight_enum = false);

struct SatIdentityReport {
    double p_sat = 0.0, p_sat_se = 0.0;
    double scaled_inv_z = 0.0, scaled_inv_z_se = 0.0;  // 2^{n-m} E[1/Z_H]
    double p_unique_transpose = 0.0, p_unique_transpose_se = 0.0;  // P(Z_{H^T} = 1)
    int trials = 0;
};
// MC check that P(sat) equals 2^{n-m} E[1/Z_H] and dominates P(Z_{H^T}=1).
SatIdentityReport satisfiability_identity_check(
    const std::function<Gf2System(std::uint64_t)>& sampler, int trials,
    std::uint64_t seed);

// Peeling of the hypergraph whose hyper-edges are the l-uniform v-nodes:
// repeatedly pick a uniformly random degree-1 c-node and delete its v-node.
struct PeelingTrajectory {
    struct Step {
        long long tau = 0;  // v-nodes removed so far (before this step)
        long long z1 = 0;   // c-nodes of degree exactly 1
        long long z2 = 0;   // c-nodes of degree >= 2
        int dz1 = 0, dz2 = 0;
    };
    std::vector<Step> steps;
    std::vector<int> core_vnodes;  // surviving hyper-edges (the 2-core)
    std::vector<int> core_cnodes;
    std::string stop_reason;       // "exhausted" or "core"
};
PeelingTrajectory peel_core(const FactorGraph& hg, std::uint64_t seed);

struct KernelParams {
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    double lambda = 0.0;
    double x1 = 0.0, x2 = 0.0, theta = 0.0;
    int l = 0;
};
struct KernelPmf {
    KernelParams params;
    // entries ((dz1, dz2), probability) over the (l-1)-trinomial support
    std::vector<std::pair<std::pair<int, int>, double>> pmf;
};
// Smoothed one-step transition kernel of the rescaled peeling state.
KernelPmf kernel_hat(double x1, double x2, double theta, int l);

struct OdeTrajectory {
    std::vector<double> theta;
    std::vector<double> y1, y2;
    std::vector<double> q11, q12, q22;  // filled by the covariance solver
    double theta_star = -1.0;           // first zero of y1; < 0 when absent
    double closed_form_residual = 0.0;  // max |y1 - l u^{l-1} h_rho(u)|
};
OdeTrajectory mean_ode_solve(int l, double rho, double step);

// Closed-form y1 of the mean ODE: l u^{l-1} (u - 1 + exp(-gamma u^{l-1})),
// u = (1-theta)^{1/l}, gamma = l / rho.
double mean_ode_closed_form(int l, double rho, double theta);

// Critical density: below rho_d the deterministic trajectory hits y1 = 0
// before exhausting, above it stays positive (empty core). `ode_method`
// switches between the h_rho tangency solve and the ODE-crossing scan.
double rho_d(int l, bool ode_method = false);

OdeTrajectory covariance_ode_solve(int l, double rho, double step);

struct FssConstants {
    double rho_d = 0.0, theta_d = 0.0;
    double f_tilde = 0.0, g_tilde = 0.0;
    double q11_at_theta_d = 0.0;
    double dy1_drho = 0.0;
    double a_l = 0.0, b_l = 0.0;
    double kappa = 0.0, kappa_se = 0.0;
};
FssConstants fss_constants(int l, int mc_paths = 100000, double mc_step = 1e-4,
                           std::uint64_t seed = 0);

// Two-term transition-probability prediction at rho = rho_d + r n^{-1/2}.
double fss_prediction(const FssConstants& c, double n, double r);

struct CoreProbability {
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // 95% Wilson interval
    double std_error = 0.0;
    int trials = 0;
};
CoreProbability core_probability_mc(int l, int n, double rho, int trials,
                                    std::uint64_t seed);

}  // namespace sgm
