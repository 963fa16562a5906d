#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "sgm/coloring.hpp"
#include "sgm/errors.hpp"
#include "sgm/rng.hpp"

using namespace sgm;

namespace {

MultiGraph complete_graph(int n) {
    MultiGraph g;
    g.n_vertices = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j});
    g.build_adjacency();
    return g;
}

}  // namespace

TEST_CASE("first/second moment threshold formulas") {
    ColoringThresholds t3 = threshold_formulas(3);
    CHECK(t3.alpha_upper ==
          doctest::Approx(std::log(3.0) / std::abs(std::log(2.0 / 3.0))).epsilon(1e-14));
    CHECK(t3.alpha_lower == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    ColoringThresholds t5 = threshold_formulas(5);
    CHECK(t5.alpha_upper == doctest::Approx(7.212567439011).epsilon(1e-10));
    CHECK(t5.alpha_lower == doctest::Approx(5.545177444480).epsilon(1e-10));
    CHECK(t5.alpha_lower < t5.alpha_upper);
    CHECK_THROWS_AS(threshold_formulas(2), ValidationError);
}

TEST_CASE("q-core: hand-checkable instances") {
    // K5 survives 3-core peeling entirely
    MultiGraph k5 = complete_graph(5);
    QCoreResult r = q_core(k5, 3, 1);
    CHECK(r.core_vertices.size() == 5);
    CHECK(r.core.edges.size() == 10);
    CHECK(r.peel_order.empty());
    // a tree has an empty 2-core
    MultiGraph tree;
    tree.n_vertices = 5;
    tree.edges = {{0, 1}, {0, 2}, {2, 3}, {2, 4}};
    tree.build_adjacency();
    QCoreResult rt = q_core(tree, 2, 2);
    CHECK(rt.core_vertices.empty());
    CHECK(rt.peel_order.size() == 5);
    // cycle + pendant: the 2-core is exactly the cycle
    MultiGraph g;
    g.n_vertices = 5;
    g.edges = {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}};
    g.build_adjacency();
    QCoreResult rc = q_core(g, 2, 3);
    CHECK(rc.core_vertices == std::vector<int>{0, 1, 2});
    CHECK(rc.core.edges.size() == 3);
    // every vertex of the returned core meets the degree bound
    for (int v = 0; v < rc.core.n_vertices; ++v) CHECK(rc.core.degree(v) >= 2);
}

TEST_CASE("core emergence threshold: frozen values") {
    CHECK(alpha_core(3) == doctest::Approx(1.6754594358).epsilon(1e-7));
    CHECK(alpha_core(4) == doctest::Approx(2.5747013735).epsilon(1e-7));
}

TEST_CASE("reconstruction recursion: trivial and strongly-correlated regimes") {
    // gamma small: the population forgets the root (overlap ~ 0)
    ColorDeResult low = color_reconstruction_de(3, OffspringKind::Poisson, 0.5,
                                                3000, 15, 5);
    CHECK(std::abs(low.overlap) <= std::max(3 * low.overlap_se, 1e-4));
    CHECK_FALSE(low.solvable);
    // gamma large: the root signal survives
    ColorDeResult high = color_reconstruction_de(3, OffspringKind::Poisson, 6.0,
                                                 3000, 15, 6);
    CHECK(high.overlap > 10 * high.overlap_se);
    CHECK(high.solvable);
    CHECK(high.min_ess > 0.0);
    // deterministic offspring behaves likewise
    ColorDeResult fixed = color_reconstruction_de(3, OffspringKind::Fixed, 12,
                                                  3000, 15, 7);
    CHECK(fixed.solvable);
    // population entries remain on the simplex
    for (const auto& nu : high.pop.nu) {
        double s = 0.0;
        for (double v : nu) {
            CHECK(v >= -1e-15);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("uniform population gives zero complexity") {
    CHECK(uniform_bethe_density(3, 3) ==
          doctest::Approx(std::log(3.0) + 2.0 * std::log(2.0 / 3.0)).epsilon(1e-14));
    SimplexPopulation uni;
    uni.q = 3;
    uni.nu.assign(500, std::vector<double>(3, 1.0 / 3));
    SigmaEstimate sig = complexity_sigma(3, 3, uni, 20000, 3);
    CHECK(std::abs(sig.value) < 1e-12);  // both log-terms vanish identically
    CHECK(sig.degenerate == 0);
}

TEST_CASE("two-replica statistics: independent vs identical samples") {
    Rng rng(9);
    int n = 600, q = 3;
    std::vector<std::pair<std::vector<int>, std::vector<int>>> indep, same;
    for (int p = 0; p < 50; ++p) {
        std::vector<int> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng.below(q));
            b[i] = static_cast<int>(rng.below(q));
        }
        indep.push_back({a, b});
        same.push_back({a, a});
    }
    ReplicaType ri = two_replica_type(indep, q);
    CHECK(ri.n_pairs == 50);
    double sum = 0.0;
    for (double v : ri.nu) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    ReplicaType rs = two_replica_type(same, q);
    // identical replicas concentrate on the diagonal, independent ones do not
    CHECK(ri.sphericity < 0.02);
    CHECK(rs.sphericity > 0.2);
    CHECK(ri.condition_stat < rs.condition_stat);
}
