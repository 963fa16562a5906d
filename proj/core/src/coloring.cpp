#include "sgm/coloring.hpp"

#include <algorithm>
#include <cmath>

#include "sgm/errors.hpp"
#include "sgm/rng.hpp"

namespace sgm {

ColoringThresholds threshold_formulas(int q) {
    if (q < 3) throw ValidationError("threshold_formulas: q must be >= 3");
    ColoringThresholds out;
    out.alpha_upper = std::log(static_cast<double>(q)) /
                      std::abs(std::log(1.0 - 1.0 / q));
    out.alpha_lower = (q - 1.0) * std::log(q - 1.0);
    return out;
}

QCoreResult q_core(const MultiGraph& g, int q, std::uint64_t seed) {
    if (q < 1) throw ValidationError("q_core: q must be >= 1");
    Rng rng(seed);
    std::vector<int> deg(g.n_vertices, 0);
    for (int i = 0; i < g.n_vertices; ++i) deg[i] = g.degree(i);
    std::vector<char> removed(g.n_vertices, 0);
    // removable set with O(1) swap-removal
    std::vector<int> removable, pos(g.n_vertices, -1);
    auto push = [&](int v) {
        if (pos[v] < 0) {
            pos[v] = static_cast<int>(removable.size());
            removable.push_back(v);
        }
    };
    for (int v = 0; v < g.n_vertices; ++v)
        if (deg[v] < q) push(v);
    QCoreResult out;
    while (!removable.empty()) {
        int idx = static_cast<int>(rng.below(removable.size()));
        int v = removable[idx];
        removable[idx] = removable.back();
        pos[removable[idx]] = idx;
        removable.pop_back();
        pos[v] = -1;
        removed[v] = 1;
        out.peel_order.push_back(v);
        for (auto [w, e] : g.adjacency[v]) {
            (void)e;
            if (removed[w]) continue;
            if (--deg[w] < q) push(w);
        }
        deg[v] = 0;
    }
    std::vector<int> relabel(g.n_vertices, -1);
    for (int v = 0; v < g.n_vertices; ++v)
        if (!removed[v]) {
            relabel[v] = static_cast<int>(out.core_vertices.size());
            out.core_vertices.push_back(v);
        }
    out.core.n_vertices = static_cast<int>(out.core_vertices.size());
    for (auto [u, v] : g.edges)
        if (relabel[u] >= 0 && relabel[v] >= 0)
            out.core.edges.emplace_back(relabel[u], relabel[v]);
    out.core.build_adjacency();
    return out;
}

namespace {

double poisson_tail_ge(double mean, int k) {
    // P(Poisson(mean) >= k)
    if (k <= 0) return 1.0;
    double term = std::exp(-mean), cdf = term;
    for (int j = 1; j < k; ++j) {
        term *= mean / j;
        cdf += term;
    }
    return std::max(0.0, 1.0 - cdf);
}

// max over u in [0,1] of P(Poisson(2 alpha u) >= q-1) - u
double core_excess(double alpha, int q) {
    const int grid = 4000;
    double best = -1e300;
    double best_u = 0.0;
    for (int i = 0; i <= grid; ++i) {
        double u = static_cast<double>(i) / grid;
        double v = poisson_tail_ge(2.0 * alpha * u, q - 1) - u;
        if (v > best) {
            best = v;
            best_u = u;
        }
    }
    // golden-section refinement around the grid maximum
    double a = std::max(0.0, best_u - 1.0 / grid), b = std::min(1.0, best_u + 1.0 / grid);
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
        auto f = [&](double u) { return poisson_tail_ge(2.0 * alpha * u, q - 1) - u; };
        if (f(c) > f(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return std::max(best, poisson_tail_ge(2.0 * alpha * 0.5 * (a + b), q - 1) -
                              0.5 * (a + b));
}

}  // namespace

double alpha_core(int q) {
    if (q < 3) throw ValidationError("alpha_core: q must be >= 3");
    double lo = 0.0, hi = 1.0;
    while (core_excess(hi, q) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e6) throw NumericalError("alpha_core: no violation found");
    }
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (core_excess(mid, q) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

double tv_from_uniform(const std::vector<double>& nu) {
    double tv = 0.0;
    for (double v : nu) tv += std::abs(v - 1.0 / nu.size());
    return 0.5 * tv;
}

}  // namespace

ColorDeResult color_reconstruction_de(int q, OffspringKind kind, double param,
                                      int population, int iters, std::uint64_t seed) {
    if (q < 2) throw ValidationError("color_reconstruction_de: q must be >= 2");
    if (population < 1000)
        throw ValidationError("color_reconstruction_de: population must be >= 1000");
    if (kind == OffspringKind::Fixed &&
        (param < 0.0 || param != std::floor(param)))
        throw ValidationError("color_reconstruction_de: fixed offspring must be a "
                              "non-negative integer");
    if (kind == OffspringKind::Poisson && param < 0.0)
        throw ValidationError("color_reconstruction_de: gamma must be >= 0");

    ColorDeResult out;
    out.pop.q = q;
    out.pop.nu.assign(population, std::vector<double>(q, 0.0));
    for (int i = 0; i < population; ++i) out.pop.nu[i][i % q] = 1.0;  // q^{-1} sum delta
    out.min_ess = population;

    Rng base(seed);
    double zbar_base = 1.0 - 1.0 / q;
    std::vector<std::vector<double>> cand(population, std::vector<double>(q));
    std::vector<double> weights(population), cum(population);
    for (int t = 0; t < iters; ++t) {
        for (int i = 0; i < population; ++i) {
            Rng r = base.split((static_cast<std::uint64_t>(t) << 32) ^
                               static_cast<std::uint64_t>(i));
            for (int attempt = 0;; ++attempt) {
                int k_off = kind == OffspringKind::Fixed
                                ? static_cast<int>(param)
                                : static_cast<int>(r.poisson(2.0 * param));
                double z = 0.0;
                for (int x = 0; x < q; ++x) cand[i][x] = 1.0;
                for (int j = 0; j < k_off; ++j) {
                    const auto& nu_j = out.pop.nu[r.below(population)];
                    for (int x = 0; x < q; ++x) cand[i][x] *= 1.0 - nu_j[x];
                }
                for (int x = 0; x < q; ++x) z += cand[i][x];
                if (z > 0.0) {
                    for (int x = 0; x < q; ++x) cand[i][x] /= z;
                    weights[i] = z / (q * std::pow(zbar_base, k_off));
                    break;
                }
                ++out.rejected;
                if (attempt > 1000)
                    throw NumericalError("color_reconstruction_de: persistent "
                                         "degenerate draws");
            }
        }
        double wsum = 0.0, wsq = 0.0;
        for (int i = 0; i < population; ++i) {
            wsum += weights[i];
            wsq += weights[i] * weights[i];
            cum[i] = wsum;
        }
        out.min_ess = std::min(out.min_ess, wsum * wsum / wsq);
        Rng rs = base.split(0xE5A31ull ^ static_cast<std::uint64_t>(t));
        for (int i = 0; i < population; ++i) {
            double u = rs.uniform() * wsum;
            std::size_t idx =
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
            if (idx >= cand.size()) idx = cand.size() - 1;
            out.pop.nu[i] = cand[idx];
        }
        ++out.pop.generation;
    }

    double s = 0.0, sq = 0.0;
    for (const auto& nu : out.pop.nu) {
        double tv = tv_from_uniform(nu);
        s += tv;
        sq += tv * tv;
    }
    out.overlap = s / population;
    double var = (sq - s * s / population) / (population - 1);
    out.overlap_se = std::sqrt(std::max(0.0, var) / population);
    // absolute floor: the TV statistic is nonnegative, so its finite-population
    // mean stays slightly positive even at the trivial fixed point while the
    // standard error collapses faster
    out.solvable = out.overlap > std::max(3.0 * out.overlap_se, 1e-4);
    return out;
}

GammaREstimate gamma_r_estimate(int q, double gamma_lo, double gamma_hi, int population,
                                int iters, int bisect_steps, int n_seeds,
                                std::uint64_t seed) {
    if (gamma_hi <= gamma_lo)
        throw ValidationError("gamma_r_estimate: empty bracket");
    GammaREstimate out;
    for (int s = 0; s < n_seeds; ++s) {
        std::uint64_t sd = seed + 1000003ull * s;
        auto solvable = [&](double gamma) {
            return color_reconstruction_de(q, OffspringKind::Poisson, gamma, population,
                                           iters, sd)
                .solvable;
        };
        if (solvable(gamma_lo) || !solvable(gamma_hi))
            throw ValidationError("gamma_r_estimate: bracket does not straddle the "
                                  "solvability transition");
        double lo = gamma_lo, hi = gamma_hi;
        for (int it = 0; it < bisect_steps; ++it) {
            double mid = 0.5 * (lo + hi);
            (solvable(mid) ? hi : lo) = mid;
        }
        out.per_seed.push_back(0.5 * (lo + hi));
    }
    out.ci_lo = *std::min_element(out.per_seed.begin(), out.per_seed.end());
    out.ci_hi = *std::max_element(out.per_seed.begin(), out.per_seed.end());
    double sum = 0.0;
    for (double v : out.per_seed) sum += v;
    out.estimate = sum / out.per_seed.size();
    return out;
}

double uniform_bethe_density(int k, int q) {
    return std::log(static_cast<double>(q)) +
           0.5 * (k + 1) * std::log(1.0 - 1.0 / q);
}

SigmaEstimate complexity_sigma(int k, int q, const SimplexPopulation& Q, int n_samples,
                               std::uint64_t seed) {
    if (Q.q != q || Q.nu.empty())
        throw ValidationError("complexity_sigma: population/alphabet mismatch");
    if (k < 1) throw ValidationError("complexity_sigma: k must be >= 1");
    // cumulative tables for the color-conditioned laws Q_x (weight nu(x))
    std::size_t n = Q.nu.size();
    std::vector<std::vector<double>> cum(q, std::vector<double>(n));
    for (int x = 0; x < q; ++x) {
        double run = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            run += Q.nu[i][x];
            cum[x][i] = run;
        }
        if (run <= 0.0)
            throw ValidationError("complexity_sigma: a color has zero population mass");
    }
    auto draw = [&](int x, Rng& r) -> const std::vector<double>& {
        double u = r.uniform() * cum[x].back();
        std::size_t idx = std::lower_bound(cum[x].begin(), cum[x].end(), u) -
                          cum[x].begin();
        if (idx >= n) idx = n - 1;
        return Q.nu[idx];
    };
    Rng base(seed);
    SigmaEstimate out;
    double sum = 0.0, sumsq = 0.0;
    long long used = 0;
    for (int s = 0; s < n_samples; ++s) {
        Rng r = base.split(static_cast<std::uint64_t>(s));
        // edge term: uniform ordered pair of distinct colors
        int x1 = static_cast<int>(r.below(q));
        int x2 = static_cast<int>(r.below(q - 1));
        if (x2 >= x1) ++x2;
        const auto& nu1 = draw(x1, r);
        const auto& nu2 = draw(x2, r);
        double dot = 0.0;
        for (int x = 0; x < q; ++x) dot += nu1[x] * nu2[x];
        if (1.0 - dot <= 0.0) {
            ++out.degenerate;
            continue;
        }
        double we = std::log((1.0 - dot) / (1.0 - 1.0 / q));
        // vertex term: root color x, k+1 neighbor colors distinct from x
        int x0 = static_cast<int>(r.below(q));
        double prod_sum = 0.0;
        std::vector<double> acc(q, 1.0);
        for (int j = 0; j <= k; ++j) {
            int xj = static_cast<int>(r.below(q - 1));
            if (xj >= x0) ++xj;
            const auto& nuj = draw(xj, r);
            for (int x = 0; x < q; ++x) acc[x] *= (1.0 - nuj[x]) / (1.0 - 1.0 / q);
        }
        for (int x = 0; x < q; ++x) prod_sum += acc[x];
        if (prod_sum <= 0.0) {
            ++out.degenerate;
            continue;
        }
        double wv = std::log(prod_sum / q);
        double v = -0.5 * (k + 1) * we + wv;
        sum += v;
        sumsq += v * v;
        ++used;
    }
    if (used < 2) throw NumericalError("complexity_sigma: too few usable samples");
    out.value = sum / used;
    double var = (sumsq - sum * sum / used) / (used - 1);
    out.std_error = std::sqrt(std::max(0.0, var) / used);
    return out;
}

ReplicaType two_replica_type(
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs, int q) {
    if (pairs.empty()) throw ValidationError("two_replica_type: no sample pairs");
    ReplicaType out;
    out.q = q;
    out.nu.assign(static_cast<std::size_t>(q) * q, 0.0);
    double cond_sum = 0.0;
    std::vector<double> type(static_cast<std::size_t>(q) * q);
    for (const auto& [a, b] : pairs) {
        if (a.size() != b.size() || a.empty())
            throw ValidationError("two_replica_type: mismatched pair lengths");
        std::fill(type.begin(), type.end(), 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            type[a[i] * q + b[i]] += 1.0 / a.size();
        for (std::size_t c = 0; c < type.size(); ++c) out.nu[c] += type[c];
        double stat = 0.0;
        for (int x = 0; x < q; ++x) {
            double diag = type[x * q + x] - 1.0 / (q * q);
            double row = 0.0;
            for (int y = 0; y < q; ++y) row += type[x * q + y] - 1.0 / (q * q);
            double d = diag - 2.0 / q * row;
            stat += d * d;
        }
        cond_sum += stat;
    }
    out.n_pairs = static_cast<long long>(pairs.size());
    for (double& v : out.nu) v /= pairs.size();
    double l2 = 0.0;
    for (double v : out.nu) {
        double d = v - 1.0 / (q * q);
        l2 += d * d;
    }
    out.sphericity = std::sqrt(l2);
    out.condition_stat = cond_sum / pairs.size();
    return out;
}

}  // namespace sgm
