#include "sgm/xorsat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sgm/errors.hpp"
#include "sgm/rng.hpp"

namespace sgm {

namespace {

int words_for(int bits) { return (bits + 63) / 64; }

}  // namespace

Gf2System Gf2System::zero(int m, int n) {
    Gf2System s;
    s.m_rows = m;
    s.n_cols = n;
    s.rows.assign(m, std::vector<std::uint64_t>(words_for(n), 0));
    s.b.assign(words_for(std::max(m, 1)), 0);
    return s;
}

Gf2System Gf2System::from_factor_graph(const FactorGraph& fg,
                                       const std::vector<int>& rhs) {
    if (rhs.size() != static_cast<std::size_t>(fg.n_cnodes))
        throw ValidationError("gf2 system: rhs size must equal the c-node count");
    Gf2System s = zero(fg.n_cnodes, fg.n_vnodes);
    for (auto [v, c] : fg.edges) s.flip(c, v);  // parallel edges cancel mod 2
    for (int r = 0; r < fg.n_cnodes; ++r)
        if (rhs[r] & 1) s.flip_b(r);
    return s;
}

Gf2System Gf2System::transpose() const {
    Gf2System t = zero(n_cols, m_rows);
    for (int r = 0; r < m_rows; ++r)
        for (int c = 0; c < n_cols; ++c)
            if (get(r, c)) t.flip(c, r);
    return t;
}

std::string Gf2System::to_text() const {
    std::ostringstream os;
    os << m_rows << ' ' << n_cols << '\n';
    for (int r = 0; r < m_rows; ++r) {
        bool first = true;
        for (int c = 0; c < n_cols; ++c)
            if (get(r, c)) {
                if (!first) os << ' ';
                os << c;
                first = false;
            }
        os << '\n';
    }
    for (int r = 0; r < m_rows; ++r) os << (get_b(r) ? '1' : '0');
    os << '\n';
    return os.str();
}

Gf2System Gf2System::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line))
        throw ValidationError("gf2 text: missing header");
    std::istringstream hs(line);
    int m = -1, n = -1;
    if (!(hs >> m >> n) || m < 0 || n < 0)
        throw ValidationError("gf2 text: bad header");
    Gf2System s = zero(m, n);
    for (int r = 0; r < m; ++r) {
        if (!std::getline(is, line))
            throw ValidationError("gf2 text: missing row");
        std::istringstream rs(line);
        int c, prev = -1;
        while (rs >> c) {
            if (c <= prev || c >= n)
                throw ValidationError("gf2 text: row indices must be sorted and in range");
            s.flip(r, c);
            prev = c;
        }
    }
    if (!std::getline(is, line) || static_cast<int>(line.size()) != m)
        throw ValidationError("gf2 text: bad rhs line");
    for (int r = 0; r < m; ++r) {
        if (line[r] == '1')
            s.flip_b(r);
        else if (line[r] != '0')
            throw ValidationError("gf2 text: rhs must be 0/1");
    }
    return s;
}

Gf2Solution gf2_solve(const Gf2System& sys, bool weight_enum) {
    int m = sys.m_rows, n = sys.n_cols;
    std::vector<std::vector<std::uint64_t>> a = sys.rows;
    std::vector<char> rb(m, 0);
    for (int r = 0; r < m; ++r) rb[r] = sys.get_b(r);
    int words = words_for(n);
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int sel = -1;
        for (int r = row; r < m; ++r)
            if ((a[r][col >> 6] >> (col & 63)) & 1) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        std::swap(a[sel], a[row]);
        std::swap(rb[sel], rb[row]);
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            if ((a[r][col >> 6] >> (col & 63)) & 1) {
                for (int w = 0; w < words; ++w) a[r][w] ^= a[row][w];
                rb[r] ^= rb[row];
            }
        }
        pivot_col.push_back(col);
        ++row;
    }
    Gf2Solution out;
    out.rank = row;
    out.satisfiable = true;
    for (int r = row; r < m; ++r)
        if (rb[r]) out.satisfiable = false;
    if (out.satisfiable) {
        out.log2_count = n - out.rank;
        out.solution.assign(n, 0);  // free variables pinned to zero
        for (int r = 0; r < row; ++r)
            if (rb[r]) out.solution[pivot_col[r]] = 1;
    }
    if (weight_enum) {
        if (n > 20)
            throw ValidationError("gf2_solve: weight enumerator needs n <= 20");
        std::vector<char> is_pivot(n, 0);
        for (int c : pivot_col) is_pivot[c] = 1;
        // null-space basis: one vector per free column
        std::vector<std::uint32_t> basis;
        for (int c = 0; c < n; ++c) {
            if (is_pivot[c]) continue;
            std::uint32_t v = 1u << c;
            for (int r = 0; r < row; ++r)
                if ((a[r][c >> 6] >> (c & 63)) & 1) v |= 1u << pivot_col[r];
            basis.push_back(v);
        }
        out.weight_enumerator.assign(n + 1, 0.0);
        std::uint32_t d = static_cast<std::uint32_t>(basis.size());
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
            std::uint32_t x = 0;
            for (std::uint32_t j = 0; j < d; ++j)
                if ((mask >> j) & 1) x ^= basis[j];
            out.weight_enumerator[__builtin_popcount(x)] += 1.0;
        }
    }
    return out;
}

SatIdentityReport satisfiability_identity_check(
    const std::function<Gf2System(std::uint64_t)>& sampler, int trials,
    std::uint64_t seed) {
    if (trials < 2) throw ValidationError("satisfiability_identity_check: trials >= 2");
    SatIdentityReport out;
    out.trials = trials;
    double s_sat = 0.0, s_inv = 0.0, sq_inv = 0.0, s_uni = 0.0;
    for (int t = 0; t < trials; ++t) {
        Gf2System sys = sampler(seed + static_cast<std::uint64_t>(t));
        Gf2Solution sol = gf2_solve(sys);
        double inv = std::pow(2.0, sol.rank - sys.m_rows);  // 2^{n-m} / Z_H
        s_sat += sol.satisfiable ? 1.0 : 0.0;
        s_inv += inv;
        sq_inv += inv * inv;
        s_uni += (sol.rank == sys.m_rows) ? 1.0 : 0.0;  // rank(H^T) full
    }
    auto bin_se = [&](double p) { return std::sqrt(p * (1.0 - p) / trials); };
    out.p_sat = s_sat / trials;
    out.p_sat_se = bin_se(out.p_sat);
    out.scaled_inv_z = s_inv / trials;
    double var = (sq_inv - s_inv * s_inv / trials) / (trials - 1);
    out.scaled_inv_z_se = std::sqrt(std::max(0.0, var) / trials);
    out.p_unique_transpose = s_uni / trials;
    out.p_unique_transpose_se = bin_se(out.p_unique_transpose);
    return out;
}

PeelingTrajectory peel_core(const FactorGraph& hg, std::uint64_t seed) {
    Rng rng(seed);
    int n = hg.n_vnodes, m = hg.n_cnodes;
    std::vector<int> deg(m, 0);
    for (auto [v, c] : hg.edges) {
        (void)v;
        ++deg[c];
    }
    long long z1 = 0, z2 = 0;
    for (int c = 0; c < m; ++c) {
        if (deg[c] == 1) ++z1;
        if (deg[c] >= 2) ++z2;
    }
    std::vector<char> v_alive(n, 1);
    std::vector<int> ones, pos(m, -1);  // degree-1 c-nodes, O(1) swap removal
    auto ones_add = [&](int c) {
        pos[c] = static_cast<int>(ones.size());
        ones.push_back(c);
    };
    auto ones_remove = [&](int c) {
        int idx = pos[c];
        ones[idx] = ones.back();
        pos[ones[idx]] = idx;
        ones.pop_back();
        pos[c] = -1;
    };
    for (int c = 0; c < m; ++c)
        if (deg[c] == 1) ones_add(c);
    PeelingTrajectory out;
    long long tau = 0;
    while (!ones.empty()) {
        int a = ones[rng.below(ones.size())];
        int victim = -1;
        for (int v : hg.c_adjacency[a])
            if (v_alive[v]) {
                victim = v;
                break;
            }
        PeelingTrajectory::Step step;
        step.tau = tau;
        step.z1 = z1;
        step.z2 = z2;
        long long old_z1 = z1, old_z2 = z2;
        v_alive[victim] = 0;
        for (int c : hg.v_adjacency[victim]) {
            int before = deg[c]--;
            if (before == 1) {
                --z1;
                ones_remove(c);
            } else if (before == 2) {
                --z2;
                ++z1;
                ones_add(c);
            }  // before >= 3: stays in z2
        }
        step.dz1 = static_cast<int>(z1 - old_z1);
        step.dz2 = static_cast<int>(z2 - old_z2);
        out.steps.push_back(step);
        ++tau;
    }
    for (int v = 0; v < n; ++v)
        if (v_alive[v]) out.core_vnodes.push_back(v);
    for (int c = 0; c < m; ++c)
        if (deg[c] > 0) out.core_cnodes.push_back(c);
    out.stop_reason = out.core_vnodes.empty() ? "exhausted" : "core";
    return out;
}

namespace {

// lambda (1 - e^-lambda) / (1 - e^-lambda - lambda e^-lambda):
// increasing from 2 at lambda = 0.
double heavy_degree_lhs(double lam) {
    if (lam < 1e-4) {
        double num = 1.0 - lam / 2.0 + lam * lam / 6.0 - lam * lam * lam / 24.0;
        double den = 0.5 - lam / 3.0 + lam * lam / 8.0 - lam * lam * lam / 30.0;
        return num / den;
    }
    double em = -std::expm1(-lam);
    double den = em - lam * std::exp(-lam);
    return lam * em / den;
}

double solve_lambda(double target) {
    double lo = 1e-12, hi = 100.0;
    while (heavy_degree_lhs(hi) < target) {
        hi *= 2.0;
        if (hi > 1e9) throw NumericalError("kernel: lambda out of range");
    }
    // safeguarded Newton with a numeric derivative
    double lam = std::min(std::max(target - 2.0, lo), hi);
    for (int it = 0; it < 200; ++it) {
        double f = heavy_degree_lhs(lam) - target;
        if (f > 0.0)
            hi = lam;
        else
            lo = lam;
        double h = std::max(1e-9, 1e-7 * lam);
        double d = (heavy_degree_lhs(lam + h) - heavy_degree_lhs(lam - h)) / (2.0 * h);
        double next = d > 0.0 ? lam - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - lam) < 1e-14 * std::max(1.0, lam)) {
            lam = next;
            break;
        }
        lam = next;
    }
    return lam;
}

KernelParams kernel_params(double x1, double x2, double theta, int l) {
    if (l < 3) throw ValidationError("kernel: l must be >= 3");
    if (theta < 0.0 || theta >= 1.0)
        throw ValidationError("kernel: theta must lie in [0, 1)");
    if (x1 < 0.0 || x2 < 0.0)
        throw ValidationError("kernel: state coordinates must be non-negative");
    double budget = l * (1.0 - theta);
    // the constraint x1 + 2 x2 <= budget is exactly tight when every heavy
    // c-node has degree 2, which the late-peeling trajectory approaches; clip
    // small numerical overshoots instead of rejecting them
    if (x1 + 2.0 * x2 > budget + 1e-6 * l)
        throw ValidationError("kernel: x1 + 2 x2 exceeds l (1 - theta)");
    x1 = std::min(x1, budget);
    if (x1 + 2.0 * x2 > budget) x2 = 0.5 * (budget - x1);
    KernelParams kp;
    kp.x1 = x1;
    kp.x2 = x2;
    kp.theta = theta;
    kp.l = l;
    kp.p0 = x1 / budget;
    if (x2 <= 0.0) {
        kp.lambda = 0.0;
        kp.p1 = 0.0;  // no heavy c-nodes to hit
    } else {
        double target = (budget - x1) / x2;  // >= 2 by the state constraint
        if (target <= 2.0 + 1e-12) {
            kp.lambda = 0.0;
            kp.p1 = 2.0 * x2 / budget;  // lambda -> 0 limit
        } else {
            kp.lambda = solve_lambda(target);
            double lam = kp.lambda;
            double den = -std::expm1(-lam) - lam * std::exp(-lam);
            kp.p1 = x2 * lam * lam * std::exp(-lam) / (budget * den);
        }
    }
    kp.p2 = 1.0 - kp.p0 - kp.p1;
    if (kp.p2 < -1e-9)
        throw NumericalError("kernel: probabilities leave the simplex");
    kp.p2 = std::max(0.0, kp.p2);
    return kp;
}

}  // namespace

KernelPmf kernel_hat(double x1, double x2, double theta, int l) {
    KernelPmf out;
    out.params = kernel_params(x1, x2, theta, l);
    const auto& kp = out.params;
    std::vector<double> logfact(l + 1, 0.0);
    for (int i = 2; i <= l; ++i) logfact[i] = logfact[i - 1] + std::log(i);
    // (q0 - 1, q1, q2) trinomial over the l - 1 secondary sockets
    for (int q0m1 = 0; q0m1 <= l - 1; ++q0m1) {
        for (int q1 = 0; q1 + q0m1 <= l - 1; ++q1) {
            int q2 = l - 1 - q0m1 - q1;
            double lp = logfact[l - 1] - logfact[q0m1] - logfact[q1] - logfact[q2];
            double p = std::exp(lp) * std::pow(kp.p0, q0m1) * std::pow(kp.p1, q1) *
                       std::pow(kp.p2, q2);
            int dz1 = -(q0m1 + 1) + q1;
            int dz2 = -q1;
            out.pmf.push_back({{dz1, dz2}, p});
        }
    }
    return out;
}

double mean_ode_closed_form(int l, double rho, double theta) {
    double gamma = l / rho;
    double u = std::pow(1.0 - theta, 1.0 / l);
    double h = u - 1.0 + std::exp(-gamma * std::pow(u, l - 1));
    return l * std::pow(u, l - 1) * h;
}

namespace {

void ode_drift(int l, double theta, double y1, double y2, double* f1, double* f2) {
    KernelParams kp = kernel_params(std::max(0.0, y1), std::max(0.0, y2), theta, l);
    *f1 = -1.0 + (l - 1) * (kp.p1 - kp.p0);
    *f2 = -(l - 1) * kp.p1;
}

}  // namespace

OdeTrajectory mean_ode_solve(int l, double rho, double step) {
    if (rho <= 0.0) throw ValidationError("mean_ode_solve: rho must be > 0");
    if (step <= 0.0 || step > 1e-3)
        throw ValidationError("mean_ode_solve: step must lie in (0, 1e-3]");
    double gamma = l / rho;
    OdeTrajectory out;
    double y1 = rho * gamma * std::exp(-gamma);
    double y2 = rho * (1.0 - std::exp(-gamma) - gamma * std::exp(-gamma));
    double theta = 0.0;
    const double theta_max = 1.0 - 1e-3;
    while (theta < theta_max) {
        out.theta.push_back(theta);
        out.y1.push_back(y1);
        out.y2.push_back(y2);
        out.closed_form_residual = std::max(
            out.closed_form_residual, std::abs(y1 - mean_ode_closed_form(l, rho, theta)));
        double h = std::min(step, theta_max - theta);
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        ode_drift(l, theta, y1, y2, &k1a, &k1b);
        ode_drift(l, theta + h / 2, y1 + h / 2 * k1a, y2 + h / 2 * k1b, &k2a, &k2b);
        ode_drift(l, theta + h / 2, y1 + h / 2 * k2a, y2 + h / 2 * k2b, &k3a, &k3b);
        ode_drift(l, theta + h, y1 + h * k3a, y2 + h * k3b, &k4a, &k4b);
        double ny1 = y1 + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        double ny2 = y2 + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
        double ntheta = theta + h;
        if (ny1 <= 0.0) {
            // first zero of y1: bisect the closed form inside the last interval
            double lo = theta, hi = ntheta;
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hi);
                (mean_ode_closed_form(l, rho, mid) > 0.0 ? lo : hi) = mid;
            }
            out.theta_star = 0.5 * (lo + hi);
            out.theta.push_back(out.theta_star);
            out.y1.push_back(0.0);
            out.y2.push_back(ny2);
            return out;
        }
        y1 = ny1;
        y2 = std::max(0.0, ny2);
        theta = ntheta;
    }
    return out;
}

namespace {

double h_rho_min(int l, double rho) {
    double gamma = l / rho;
    auto h = [&](double u) { return u - 1.0 + std::exp(-gamma * std::pow(u, l - 1)); };
    const int grid = 4000;
    double best = 1e300, best_u = 1.0;
    for (int i = 1; i <= grid; ++i) {
        double u = static_cast<double>(i) / grid;
        double v = h(u);
        if (v < best) {
            best = v;
            best_u = u;
        }
    }
    double a = std::max(1.0 / grid, best_u - 1.0 / grid);
    double b = std::min(1.0, best_u + 1.0 / grid);
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 100; ++it) {
        if (h(c) < h(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return std::min(best, h(0.5 * (a + b)));
}

double h_rho_argmin(int l, double rho) {
    double gamma = l / rho;
    auto h = [&](double u) { return u - 1.0 + std::exp(-gamma * std::pow(u, l - 1)); };
    const int grid = 4000;
    double best = 1e300, best_u = 1.0;
    for (int i = 1; i <= grid; ++i) {
        double u = static_cast<double>(i) / grid;
        if (h(u) < best) {
            best = h(u);
            best_u = u;
        }
    }
    double a = std::max(1.0 / grid, best_u - 1.0 / grid);
    double b = std::min(1.0, best_u + 1.0 / grid);
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 120; ++it) {
        if (h(c) < h(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace

double rho_d(int l, bool ode_method) {
    if (l < 3) throw ValidationError("rho_d: l must be >= 3");
    if (!ode_method) {
        // tangency of h_rho: min_u h = 0; h is increasing in rho pointwise
        double lo = 0.1, hi = 4.0;
        while (h_rho_min(l, lo) > 0.0) lo /= 2.0;
        while (h_rho_min(l, hi) <= 0.0) hi *= 2.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (h_rho_min(l, mid) <= 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    // independent oracle: smallest rho whose mean ODE has no zero crossing
    double guess = rho_d(l, false);
    double lo = 0.8 * guess, hi = 1.2 * guess;
    auto crosses = [&](double rho) {
        return mean_ode_solve(l, rho, 1e-3).theta_star >= 0.0;
    };
    if (!crosses(lo) || crosses(hi))
        throw NumericalError("rho_d: ODE bracket failure");
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        (crosses(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

OdeTrajectory covariance_ode_solve(int l, double rho, double step) {
    if (rho <= 0.0) throw ValidationError("covariance_ode_solve: rho must be > 0");
    if (step <= 0.0 || step > 1e-3)
        throw ValidationError("covariance_ode_solve: step must lie in (0, 1e-3]");
    double gamma = l / rho;
    OdeTrajectory out;
    double eg = std::exp(-gamma);
    double y1 = rho * gamma * eg;
    double y2 = rho * (1.0 - eg - gamma * eg);
    // initial covariance of (z1, z2)/n given the Poisson construction
    double e2g = std::exp(-2.0 * gamma);
    double q11 = l * e2g * (std::exp(gamma) - 1.0 + gamma - gamma * gamma);
    double q12 = -l * e2g * (std::exp(gamma) - 1.0 - gamma * gamma);
    double q22 = (l / gamma) * e2g *
                 ((std::exp(gamma) - 1.0) + gamma * (std::exp(gamma) - 2.0) -
                  gamma * gamma * (1.0 + gamma));
    double theta = 0.0;
    const double theta_max = 1.0 - 1e-3;

    // one combined drift for (y1, y2, q11, q12, q22); the Jacobian A of the
    // mean drift is obtained by central differences in (y1, y2)
    auto deriv = [&](double th, const double* s, double* ds) {
        double f1, f2;
        ode_drift(l, th, s[0], s[1], &f1, &f2);
        double h1 = 1e-6 * std::max(1.0, std::abs(s[0]));
        double h2 = 1e-6 * std::max(1.0, std::abs(s[1]));
        double f1p, f2p, f1m, f2m;
        double a11, a12, a21, a22;
        ode_drift(l, th, std::max(0.0, s[0] + h1), s[1], &f1p, &f2p);
        ode_drift(l, th, std::max(0.0, s[0] - h1), s[1], &f1m, &f2m);
        a11 = (f1p - f1m) / (2.0 * h1);
        a21 = (f2p - f2m) / (2.0 * h1);
        ode_drift(l, th, s[0], std::max(0.0, s[1] + h2), &f1p, &f2p);
        ode_drift(l, th, s[0], std::max(0.0, s[1] - h2), &f1m, &f2m);
        a12 = (f1p - f1m) / (2.0 * h2);
        a22 = (f2p - f2m) / (2.0 * h2);
        KernelParams kp =
            kernel_params(std::max(0.0, s[0]), std::max(0.0, s[1]), th, l);
        double p0 = kp.p0, p1 = kp.p1;
        double g11 = (l - 1) * (p0 + p1 - (p0 - p1) * (p0 - p1));
        double g12 = -(l - 1) * (p0 * p1 + p1 * (1.0 - p1));
        double g22 = (l - 1) * p1 * (1.0 - p1);
        ds[0] = f1;
        ds[1] = f2;
        ds[2] = g11 + 2.0 * (a11 * s[2] + a12 * s[3]);
        ds[3] = g12 + a21 * s[2] + (a11 + a22) * s[3] + a12 * s[4];
        ds[4] = g22 + 2.0 * (a21 * s[3] + a22 * s[4]);
    };

    double state[5] = {y1, y2, q11, q12, q22};
    while (theta < theta_max) {
        out.theta.push_back(theta);
        out.y1.push_back(state[0]);
        out.y2.push_back(state[1]);
        out.q11.push_back(state[2]);
        out.q12.push_back(state[3]);
        out.q22.push_back(state[4]);
        // PSD audit of the 2x2 covariance
        double tr = state[2] + state[4];
        double det = state[2] * state[4] - state[3] * state[3];
        double min_eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
        if (min_eig < -1e-8 * std::max(1.0, tr))
            throw NumericalError("covariance_ode_solve: covariance lost PSD");
        if (state[0] <= 0.0) break;  // trajectory ends at the y1 = 0 crossing
        double h = std::min(step, theta_max - theta);
        double k1[5], k2[5], k3[5], k4[5], tmp[5];
        deriv(theta, state, k1);
        for (int i = 0; i < 5; ++i) tmp[i] = state[i] + h / 2 * k1[i];
        tmp[0] = std::max(0.0, tmp[0]);
        deriv(theta + h / 2, tmp, k2);
        for (int i = 0; i < 5; ++i) tmp[i] = state[i] + h / 2 * k2[i];
        tmp[0] = std::max(0.0, tmp[0]);
        deriv(theta + h / 2, tmp, k3);
        for (int i = 0; i < 5; ++i) tmp[i] = state[i] + h * k3[i];
        tmp[0] = std::max(0.0, tmp[0]);
        deriv(theta + h, tmp, k4);
        for (int i = 0; i < 5; ++i)
            state[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (state[0] <= 0.0) {
            out.theta_star = theta + h;
            state[0] = 0.0;
        }
        state[1] = std::max(0.0, state[1]);
        theta += h;
    }
    return out;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }
double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / 2.5066282746310002;
}

// -E[ inf_t ( t^2/2 + W(t) ) ] for a two-sided standard Brownian motion,
// by Euler-Maruyama over both half-lines.
std::pair<double, double> kappa_mc(int paths, double dt, std::uint64_t seed) {
    // T = 6 suffices: beyond it the parabola exceeds any plausible excursion
    const double T = 6.0;
    Rng base(seed);
    double sum = 0.0, sumsq = 0.0;
    for (int p = 0; p < paths; ++p) {
        Rng r = base.split(static_cast<std::uint64_t>(p));
        double best = 0.0;
        for (int side = 0; side < 2; ++side) {
            double w = 0.0, t = 0.0;
            while (t < T) {
                t += dt;
                w += std::sqrt(dt) * r.normal();
                double v = 0.5 * t * t + w;
                if (v < best) best = v;
            }
        }
        sum += -best;
        sumsq += best * best;
    }
    double mean = sum / paths;
    double var = (sumsq - sum * sum / paths) / (paths - 1.0);
    return {mean, std::sqrt(std::max(0.0, var) / paths)};
}

}  // namespace

FssConstants fss_constants(int l, int mc_paths, double mc_step, std::uint64_t seed) {
    if (l < 3) throw ValidationError("fss_constants: l must be >= 3");
    if (mc_paths < 100) throw ValidationError("fss_constants: mc_paths too small");
    FssConstants out;
    out.rho_d = rho_d(l, false);
    double u_d = h_rho_argmin(l, out.rho_d);
    out.theta_d = 1.0 - std::pow(u_d, l);

    // state at the critical point: y1 = 0, y2 from the mean ODE; interpolate
    // linearly in theta -- f_tilde is sensitive to y2_d at ~O(10) per unit
    auto interp_at = [](const std::vector<double>& xs, const std::vector<double>& ys,
                        double x) {
        std::size_t idx = 0;
        while (idx + 1 < xs.size() && xs[idx + 1] <= x) ++idx;
        if (idx + 1 >= xs.size()) return ys[idx];
        double t = (x - xs[idx]) / (xs[idx + 1] - xs[idx]);
        return (1.0 - t) * ys[idx] + t * ys[idx + 1];
    };
    OdeTrajectory mean = mean_ode_solve(l, out.rho_d, 1e-3);
    double y2_d = interp_at(mean.theta, mean.y2, out.theta_d);
    auto f1_at = [&](double th, double y2v) {
        double f1, f2;
        ode_drift(l, th, 0.0, y2v, &f1, &f2);
        return f1;
    };
    double ht = 1e-5, hy = 1e-5;
    double df1_dtheta =
        (f1_at(out.theta_d + ht, y2_d) - f1_at(out.theta_d - ht, y2_d)) / (2.0 * ht);
    double df1_dy2 =
        (f1_at(out.theta_d, y2_d + hy) - f1_at(out.theta_d, y2_d - hy)) / (2.0 * hy);
    double f1c, f2c;
    ode_drift(l, out.theta_d, 0.0, y2_d, &f1c, &f2c);
    out.f_tilde = df1_dtheta + df1_dy2 * f2c;  // d^2 y1 / d theta^2 on the trajectory

    KernelParams kp = kernel_params(0.0, y2_d, out.theta_d, l);
    out.g_tilde = (l - 1) * (kp.p0 + kp.p1 - (kp.p0 - kp.p1) * (kp.p0 - kp.p1));

    OdeTrajectory cov = covariance_ode_solve(l, out.rho_d, 1e-3);
    out.q11_at_theta_d = interp_at(cov.theta, cov.q11, out.theta_d);

    double delta = 1e-5 * out.rho_d;
    out.dy1_drho = (mean_ode_closed_form(l, out.rho_d + delta, out.theta_d) -
                    mean_ode_closed_form(l, out.rho_d - delta, out.theta_d)) /
                   (2.0 * delta);

    double sq = std::sqrt(out.q11_at_theta_d);
    out.a_l = out.dy1_drho / sq;
    out.b_l = std::pow(out.g_tilde, 2.0 / 3.0) * std::pow(out.f_tilde, -1.0 / 3.0) / sq;

    // kappa: the extreme of a discretely sampled Brownian path is biased by
    // O(sqrt(dt)), so Richardson extrapolation is done in sqrt(dt)
    auto [k1, se1] = kappa_mc(mc_paths, mc_step, seed);
    auto [k2, se2] = kappa_mc(mc_paths, 2.0 * mc_step, seed ^ 0x5EEDULL);
    const double w = 1.0 / (std::sqrt(2.0) - 1.0);  // kappa = k1 + w (k1 - k2)
    out.kappa = k1 + w * (k1 - k2);
    out.kappa_se = std::sqrt((1.0 + w) * (1.0 + w) * se1 * se1 + w * w * se2 * se2);
    return out;
}

double fss_prediction(const FssConstants& c, double n, double r) {
    // shifted-argument form: agrees with the additive two-term expansion
    // Phi(-r a) + b kappa phi(-r a) n^{-1/6} to the stated order, but stays
    // accurate in the tails at moderate n where the linearization does not
    double z = -r * c.a_l + c.b_l * c.kappa * std::pow(n, -1.0 / 6.0);
    return normal_cdf(z);
}

CoreProbability core_probability_mc(int l, int n, double rho, int trials,
                                    std::uint64_t seed) {
    if (trials < 1) throw ValidationError("core_probability_mc: trials must be >= 1");
    int m = static_cast<int>(std::floor(n * rho));
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        FactorGraph fg = sample_factor_ensemble(FactorEnsembleKind::poisson_l(l), n, m,
                                                seed + 2654435761ull * t);
        PeelingTrajectory traj = peel_core(fg, seed ^ (0xC0DEull + t));
        if (!traj.core_vnodes.empty()) ++hits;
    }
    CoreProbability out;
    out.trials = trials;
    out.p_hat = static_cast<double>(hits) / trials;
    out.std_error = std::sqrt(out.p_hat * (1.0 - out.p_hat) / trials);
    const double z = 1.959963984540054;
    double denom = 1.0 + z * z / trials;
    double center = (out.p_hat + z * z / (2.0 * trials)) / denom;
    double half = z *
                  std::sqrt(out.p_hat * (1.0 - out.p_hat) / trials +
                            z * z / (4.0 * trials * trials)) /
                  denom;
    out.ci_lo = std::max(0.0, center - half);
    out.ci_hi = std::min(1.0, center + half);
    return out;
}

}  // namespace sgm
