// Experiment driver: every library module behind a subcommand with uniform
// config handling, deterministic structured output, and machine-readable
// errors (exit 2 = validation, 3 = numerical failure).
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgm/bp.hpp"
#include "sgm/coloring.hpp"
#include "sgm/curie_weiss.hpp"
#include "sgm/errors.hpp"
#include "sgm/exact.hpp"
#include "sgm/graph.hpp"
#include "sgm/mcmc.hpp"
#include "sgm/potentials.hpp"
#include "sgm/rng.hpp"
#include "sgm/tree_cavity.hpp"
#include "sgm/xorsat.hpp"

using nlohmann::json;
using namespace sgm;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kSeedEnv = "SGM_SEED";

struct ParamSpec {
    std::string def;  // default value; "!" marks a required parameter
    std::string help;
};

struct Config {
    std::string command;  // "group subcommand"
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out = "-";
    int threads = 1;

    json to_json() const {
        json j;
        j["command"] = command;
        j["seed"] = seed;
        j["format"] = format;
        // the output destination is not part of the experiment configuration:
        // identical configs must reproduce byte-for-byte wherever they write
        j["threads"] = threads;
        j["params"] = json::object();
        for (auto& [k, v] : params) j["params"][k] = v;
        return j;
    }
};

struct Command {
    std::map<std::string, ParamSpec> spec;
    std::function<json(const Config&)> run;
};

double get_d(const Config& c, const std::string& key) {
    const std::string& s = c.params.at(key);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (...) {
        throw ValidationError("parameter '" + key + "': expected a number, got '" + s + "'");
    }
    if (pos != s.size())
        throw ValidationError("parameter '" + key + "': expected a number, got '" + s + "'");
    return v;
}

long long get_i(const Config& c, const std::string& key) {
    const std::string& s = c.params.at(key);
    std::size_t pos = 0;
    long long v;
    try {
        v = std::stoll(s, &pos);
    } catch (...) {
        throw ValidationError("parameter '" + key + "': expected an integer, got '" + s + "'");
    }
    if (pos != s.size())
        throw ValidationError("parameter '" + key + "': expected an integer, got '" + s + "'");
    return v;
}

const std::string& get_s(const Config& c, const std::string& key) {
    return c.params.at(key);
}

// Graph argument: "cycle:N", "path:N", "complete:N", "grid:RxC",
// "er:N:ALPHA" (fixed edge count), "regular:N:K", or "file:PATH" with the
// text serialization.
MultiGraph build_graph(const std::string& desc, std::uint64_t seed) {
    auto fields = [&] {
        std::vector<std::string> out;
        std::stringstream ss(desc);
        std::string item;
        while (std::getline(ss, item, ':')) out.push_back(item);
        return out;
    }();
    if (fields.empty()) throw ValidationError("empty graph description");
    const std::string& kind = fields[0];
    auto want = [&](std::size_t n) {
        if (fields.size() != n)
            throw ValidationError("graph description '" + desc + "': wrong field count");
    };
    auto num = [&](std::size_t i) {
        try {
            return std::stoi(fields.at(i));
        } catch (...) {
            throw ValidationError("graph description '" + desc + "': bad number");
        }
    };
    MultiGraph g;
    if (kind == "cycle" || kind == "path" || kind == "complete") {
        want(2);
        int n = num(1);
        if (n < 1) throw ValidationError("graph size must be positive");
        g.n_vertices = n;
        if (kind == "cycle")
            for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n});
        else if (kind == "path")
            for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
        else
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j});
    } else if (kind == "grid") {
        want(2);
        auto x = fields[1].find('x');
        if (x == std::string::npos)
            throw ValidationError("grid description needs RxC");
        int rows = std::stoi(fields[1].substr(0, x));
        int cols = std::stoi(fields[1].substr(x + 1));
        g.n_vertices = rows * cols;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                if (c + 1 < cols) g.edges.push_back({r * cols + c, r * cols + c + 1});
                if (r + 1 < rows) g.edges.push_back({r * cols + c, (r + 1) * cols + c});
            }
    } else if (kind == "er") {
        want(3);
        return sample_erdos_renyi(std::stod(fields[2]), num(1), ErVariant::FixedM, seed);
    } else if (kind == "regular") {
        want(3);
        return sample_configuration_model(DegreeDistribution::delta(num(2)), num(1), seed);
    } else if (kind == "file") {
        want(2);
        std::ifstream in(fields[1]);
        if (!in) throw ValidationError("cannot open graph file " + fields[1]);
        std::stringstream buf;
        buf << in.rdbuf();
        return MultiGraph::from_text(buf.str());
    } else {
        throw ValidationError("unknown graph kind '" + kind + "'");
    }
    g.build_adjacency();
    return g;
}

Specification build_model(const Config& c, const MultiGraph& g) {
    const std::string& model = get_s(c, "model");
    if (model == "ising")
        return Specification::ising_uniform(g, get_d(c, "beta"), get_d(c, "b"),
                                            get_d(c, "j"));
    if (model == "coloring")
        return Specification::coloring(g, static_cast<int>(get_i(c, "q")));
    if (model == "independent-set")
        return Specification::independent_set(g, get_d(c, "lambda"));
    throw ValidationError("unknown model '" + model +
                          "' (ising | coloring | independent-set)");
}

DegreeDistribution build_degrees(const std::string& desc) {
    auto colon = desc.find(':');
    if (colon == std::string::npos)
        throw ValidationError("degree description needs kind:value");
    std::string kind = desc.substr(0, colon);
    std::string val = desc.substr(colon + 1);
    if (kind == "delta") return DegreeDistribution::delta(std::stoi(val));
    if (kind == "poisson") return DegreeDistribution::poisson(std::stod(val));
    throw ValidationError("unknown degree kind '" + kind + "' (delta | poisson)");
}

json table(std::vector<std::string> header, std::vector<std::vector<double>> rows) {
    json t;
    t["header"] = header;
    t["rows"] = rows;
    return t;
}

// ------------------------------------------------------------- command table

std::map<std::string, Command> make_commands() {
    std::map<std::string, Command> cmds;

    cmds["graph sample"] = {
        {{"graph", {"!", "graph description"}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            json r;
            r["n_vertices"] = g.n_vertices;
            r["n_edges"] = g.edges.size();
            r["graph"] = g.to_text();
            std::vector<std::vector<double>> rows;
            for (auto [u, v] : g.edges)
                rows.push_back({static_cast<double>(u), static_cast<double>(v)});
            r["table"] = table({"u", "v"}, rows);
            return r;
        }};

    cmds["graph profile"] = {
        {{"graph", {"!", "graph description (resampled per draw)"}},
         {"t", {"2", "ball radius"}},
         {"samples", {"200", "number of sampled roots"}}},
        [](const Config& c) {
            std::string desc = get_s(c, "graph");
            auto sampler = [&](std::uint64_t s) { return build_graph(desc, s); };
            auto profile = empirical_local_profile(
                sampler, static_cast<int>(get_i(c, "t")),
                static_cast<int>(get_i(c, "samples")), c.seed);
            json r;
            r["profile"] = json::object();
            for (auto& [code, p] : profile) r["profile"][code] = p;
            return r;
        }};

    cmds["exact logz"] = {
        {{"graph", {"!", "graph description"}},
         {"model", {"ising", "ising | coloring | independent-set"}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"j", {"1.0", ""}},
         {"q", {"3", ""}},
         {"lambda", {"1.0", ""}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            Specification s = build_model(c, g);
            json r;
            r["log_z"] = exact_log_z(g, s);
            return r;
        }};

    cmds["exact marginal"] = {
        {{"graph", {"!", ""}},
         {"model", {"ising", ""}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"j", {"1.0", ""}},
         {"q", {"3", ""}},
         {"lambda", {"1.0", ""}},
         {"vertices", {"0", "comma-separated vertex list"}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            Specification s = build_model(c, g);
            std::vector<int> U;
            std::stringstream ss(get_s(c, "vertices"));
            std::string item;
            while (std::getline(ss, item, ',')) U.push_back(std::stoi(item));
            auto m = exact_marginal(g, s, U);
            json r;
            r["vertices"] = U;
            r["marginal"] = m;
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < m.size(); ++i)
                rows.push_back({static_cast<double>(i), m[i]});
            r["table"] = table({"state_index", "probability"}, rows);
            return r;
        }};

    cmds["exact recon-tv"] = {
        {{"graph", {"!", ""}},
         {"model", {"ising", ""}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"j", {"1.0", ""}},
         {"q", {"3", ""}},
         {"lambda", {"1.0", ""}},
         {"root", {"0", ""}},
         {"t", {"1", "shell distance"}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            Specification s = build_model(c, g);
            json r;
            r["tv"] = exact_reconstruction_tv(g, s, static_cast<int>(get_i(c, "root")),
                                              static_cast<int>(get_i(c, "t")));
            return r;
        }};

    cmds["exact hyperloops"] = {
        {{"l", {"3", "v-node degree"}},
         {"k", {"3", "c-node degree (regular ensemble)"}},
         {"n", {"8", "number of v-nodes"}},
         {"m", {"8", "number of c-nodes"}},
         {"beta", {"0.3", ""}}},
        [](const Config& c) {
            FactorGraph fg = sample_factor_ensemble(
                FactorEnsembleKind::regular(static_cast<int>(get_i(c, "l")),
                                            static_cast<int>(get_i(c, "k"))),
                static_cast<int>(get_i(c, "n")), static_cast<int>(get_i(c, "m")),
                c.seed);
            HyperloopExpansion he = hyperloop_polynomial(fg, get_d(c, "beta"));
            json r;
            r["counts"] = he.counts;
            r["lhs"] = he.lhs;
            r["rhs"] = he.rhs;
            r["abs_error"] = std::abs(he.lhs - he.rhs);
            return r;
        }};

    cmds["bp run"] = {
        {{"graph", {"!", ""}},
         {"model", {"ising", ""}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"j", {"1.0", ""}},
         {"q", {"3", ""}},
         {"lambda", {"1.0", ""}},
         {"damping", {"0.0", ""}},
         {"tol", {"1e-12", ""}},
         {"max-iter", {"1000", ""}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            Specification s = build_model(c, g);
            auto [nu, rep] = bp_fixed_point(g, s, MessageSet::uniform(g, s.q),
                                            get_d(c, "damping"), get_d(c, "tol"),
                                            static_cast<int>(get_i(c, "max-iter")));
            json r;
            r["converged"] = rep.converged;
            r["iterations"] = rep.iterations;
            r["free_entropy"] = bethe_free_entropy(nu, g, s);
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < g.n_vertices; ++i) {
                auto m = bp_marginal(nu, g, s, i);
                for (int x = 0; x < s.q; ++x)
                    rows.push_back({static_cast<double>(i), static_cast<double>(x), m[x]});
            }
            r["table"] = table({"vertex", "state", "probability"}, rows);
            return r;
        }};

    cmds["bp stationarity"] = {
        {{"graph", {"!", ""}},
         {"model", {"ising", ""}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"j", {"1.0", ""}},
         {"q", {"3", ""}},
         {"lambda", {"1.0", ""}},
         {"fd-step", {"1e-5", ""}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            Specification s = build_model(c, g);
            auto [nu, rep] = bp_fixed_point(g, s, MessageSet::uniform(g, s.q));
            json r;
            r["converged"] = rep.converged;
            r["projected_gradient"] = bethe_stationarity_check(nu, g, s, get_d(c, "fd-step"));
            return r;
        }};

    cmds["tree de"] = {
        {{"offspring", {"delta:2", "offspring law, kind:value"}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"population", {"10000", ""}},
         {"iters", {"30", ""}}},
        [](const Config& c) {
            Population pop = density_evolution_ising(
                build_degrees(get_s(c, "offspring")), get_d(c, "beta"), get_d(c, "b"),
                static_cast<int>(get_i(c, "population")),
                static_cast<int>(get_i(c, "iters")), c.seed);
            json r;
            r["mean"] = pop.mean();
            r["mean_tanh"] = pop.mean_tanh();
            r["quantiles"] = pop.quantiles({0.05, 0.25, 0.5, 0.75, 0.95});
            r["generation"] = pop.generation;
            return r;
        }};

    cmds["tree free-entropy"] = {
        {{"degrees", {"delta:3", "degree law of the local limit"}},
         {"offspring", {"delta:2", "offspring law of the recursion"}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"population", {"10000", ""}},
         {"iters", {"30", ""}},
         {"samples", {"100000", ""}}},
        [](const Config& c) {
            Population pop = density_evolution_ising(
                build_degrees(get_s(c, "offspring")), get_d(c, "beta"), get_d(c, "b"),
                static_cast<int>(get_i(c, "population")),
                static_cast<int>(get_i(c, "iters")), c.seed);
            MonteCarloEstimate est = gw_free_entropy(
                build_degrees(get_s(c, "degrees")), get_d(c, "beta"), get_d(c, "b"),
                pop, c.seed ^ 0xF00D, static_cast<int>(get_i(c, "samples")));
            json r;
            r["value"] = est.value;
            r["std_error"] = est.std_error;
            return r;
        }};

    cmds["tree eta"] = {
        {{"k", {"3", ""}},
         {"beta", {"1.0", ""}},
         {"u", {"", "plus-phase fraction; omit to sweep"}},
         {"points", {"41", "sweep resolution when u is omitted"}}},
        [](const Config& c) {
            int k = static_cast<int>(get_i(c, "k"));
            double beta = get_d(c, "beta");
            json r;
            if (!get_s(c, "u").empty()) {
                Coexistence x = coexistence_eta(k, beta, get_d(c, "u"));
                r["delta_star"] = x.delta_star;
                r["eta"] = x.eta;
                return r;
            }
            int points = static_cast<int>(get_i(c, "points"));
            if (points < 2) throw ValidationError("points must be >= 2");
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < points; ++i) {
                double u = 0.02 + (0.5 - 0.02) * i / (points - 1);
                Coexistence x = coexistence_eta(k, beta, u);
                rows.push_back({u, x.eta, x.delta_star});
            }
            r["table"] = table({"u", "eta", "delta_star"}, rows);
            return r;
        }};

    cmds["cw pmf"] = {
        {{"n", {"!", ""}}, {"beta", {"1.0", ""}}, {"b", {"0.0", ""}}},
        [](const Config& c) {
            CwPmf pmf = magnetization_pmf(static_cast<int>(get_i(c, "n")),
                                          get_d(c, "beta"), get_d(c, "b"));
            json r;
            r["log_z"] = pmf.log_z;
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < pmf.m.size(); ++i)
                rows.push_back({pmf.m[i], pmf.p[i]});
            r["table"] = table({"m", "probability"}, rows);
            return r;
        }};

    cmds["cw fixed-points"] = {
        {{"beta", {"1.0", ""}}, {"b", {"0.0", ""}}},
        [](const Config& c) {
            double beta = get_d(c, "beta"), B = get_d(c, "b");
            CwFixedPoints fp = cw_fixed_points(beta, B);
            CwFreeEntropy fe = cw_free_entropy(beta, B);
            json r;
            r["roots"] = fp.roots;
            r["tangent"] = fp.tangent;
            if (beta > 1.0) r["b_star"] = fp.b_star;
            r["phi_star"] = fe.phi_star;
            r["maximizers"] = fe.maximizers;
            return r;
        }};

    cmds["color thresholds"] = {
        {{"q", {"!", ""}}, {"with-core", {"false", "also bisect the core threshold"}}},
        [](const Config& c) {
            int q = static_cast<int>(get_i(c, "q"));
            ColoringThresholds t = threshold_formulas(q);
            json r;
            r["alpha_upper"] = t.alpha_upper;
            r["alpha_lower"] = t.alpha_lower;
            if (get_s(c, "with-core") == "true") r["alpha_core"] = alpha_core(q);
            return r;
        }};

    cmds["color core"] = {
        {{"graph", {"!", ""}}, {"q", {"3", ""}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            QCoreResult res = q_core(g, static_cast<int>(get_i(c, "q")), c.seed ^ 0xC0DE);
            json r;
            r["core_size"] = res.core_vertices.size();
            r["core_edges"] = res.core.edges.size();
            r["peeled"] = res.peel_order.size();
            r["core_vertices"] = res.core_vertices;
            return r;
        }};

    cmds["color de"] = {
        {{"q", {"3", ""}},
         {"kind", {"poisson", "fixed | poisson"}},
         {"param", {"!", "offspring count or gamma"}},
         {"population", {"5000", ""}},
         {"iters", {"20", ""}}},
        [](const Config& c) {
            const std::string& kind = get_s(c, "kind");
            if (kind != "fixed" && kind != "poisson")
                throw ValidationError("kind must be fixed or poisson");
            ColorDeResult res = color_reconstruction_de(
                static_cast<int>(get_i(c, "q")),
                kind == "fixed" ? OffspringKind::Fixed : OffspringKind::Poisson,
                get_d(c, "param"), static_cast<int>(get_i(c, "population")),
                static_cast<int>(get_i(c, "iters")), c.seed);
            json r;
            r["overlap"] = res.overlap;
            r["overlap_se"] = res.overlap_se;
            r["solvable"] = res.solvable;
            r["rejected"] = res.rejected;
            r["min_ess"] = res.min_ess;
            return r;
        }};

    cmds["color sigma"] = {
        {{"k", {"4", "graph degree minus one"}},
         {"q", {"5", ""}},
         {"population", {"5000", ""}},
         {"iters", {"20", ""}},
         {"samples", {"20000", ""}}},
        [](const Config& c) {
            int k = static_cast<int>(get_i(c, "k"));
            int q = static_cast<int>(get_i(c, "q"));
            ColorDeResult de = color_reconstruction_de(
                q, OffspringKind::Fixed, k, static_cast<int>(get_i(c, "population")),
                static_cast<int>(get_i(c, "iters")), c.seed);
            SigmaEstimate sig = complexity_sigma(k, q, de.pop,
                                                 static_cast<int>(get_i(c, "samples")),
                                                 c.seed ^ 0x51);
            json r;
            r["sigma"] = sig.value;
            r["std_error"] = sig.std_error;
            r["degenerate"] = sig.degenerate;
            r["overlap"] = de.overlap;
            r["uniform_bethe_density"] = uniform_bethe_density(k, q);
            return r;
        }};

    cmds["color replica"] = {
        {{"graph", {"!", ""}},
         {"q", {"3", ""}},
         {"sweeps", {"140", ""}},
         {"burn-in", {"60", ""}},
         {"stride", {"10", ""}}},
        [](const Config& c) {
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed);
            int q = static_cast<int>(get_i(c, "q"));
            int sweeps = static_cast<int>(get_i(c, "sweeps"));
            int burn = static_cast<int>(get_i(c, "burn-in"));
            int stride = static_cast<int>(get_i(c, "stride"));
            auto sa = coloring_glauber_run(g, q, sweeps, burn, stride, c.seed ^ 0xA);
            auto sb = coloring_glauber_run(g, q, sweeps, burn, stride, c.seed ^ 0xB);
            std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
            for (std::size_t i = 0; i < std::min(sa.size(), sb.size()); ++i)
                pairs.push_back({sa[i], sb[i]});
            ReplicaType rt = two_replica_type(pairs, q);
            json r;
            r["n_pairs"] = rt.n_pairs;
            r["sphericity"] = rt.sphericity;
            r["condition_stat"] = rt.condition_stat;
            r["joint_type"] = rt.nu;
            return r;
        }};

    cmds["xorsat solve"] = {
        {{"in", {"", "gf2 text file; omit to sample an ensemble instance"}},
         {"l", {"3", ""}},
         {"n", {"20", ""}},
         {"m", {"18", ""}},
         {"weights", {"false", "homogeneous weight enumerator (n <= 20)"}}},
        [](const Config& c) {
            Gf2System sys;
            if (!get_s(c, "in").empty()) {
                std::ifstream in(get_s(c, "in"));
                if (!in) throw ValidationError("cannot open " + get_s(c, "in"));
                std::stringstream buf;
                buf << in.rdbuf();
                sys = Gf2System::from_text(buf.str());
            } else {
                FactorGraph fg = sample_factor_ensemble(
                    FactorEnsembleKind::poisson_l(static_cast<int>(get_i(c, "l"))),
                    static_cast<int>(get_i(c, "n")), static_cast<int>(get_i(c, "m")),
                    c.seed);
                Rng rng(c.seed ^ 0xB);
                std::vector<int> b(fg.n_cnodes);
                for (int& v : b) v = static_cast<int>(rng.below(2));
                sys = Gf2System::from_factor_graph(fg, b);
            }
            Gf2Solution sol = gf2_solve(sys, get_s(c, "weights") == "true");
            json r;
            r["rank"] = sol.rank;
            r["satisfiable"] = sol.satisfiable;
            if (sol.satisfiable) {
                r["log2_count"] = sol.log2_count;
                std::string x;
                for (int v : sol.solution) x += v ? '1' : '0';
                r["solution"] = x;
            }
            if (!sol.weight_enumerator.empty())
                r["weight_enumerator"] = sol.weight_enumerator;
            return r;
        }};

    cmds["xorsat peel"] = {
        {{"l", {"3", ""}}, {"n", {"1000", ""}}, {"rho", {"1.0", ""}}},
        [](const Config& c) {
            int n = static_cast<int>(get_i(c, "n"));
            FactorGraph fg = sample_factor_ensemble(
                FactorEnsembleKind::poisson_l(static_cast<int>(get_i(c, "l"))), n,
                static_cast<int>(n * get_d(c, "rho")), c.seed);
            PeelingTrajectory traj = peel_core(fg, c.seed ^ 0x9E);
            json r;
            r["steps"] = traj.steps.size();
            r["core_vnodes"] = traj.core_vnodes.size();
            r["core_cnodes"] = traj.core_cnodes.size();
            r["stop_reason"] = traj.stop_reason;
            std::vector<std::vector<double>> rows;
            for (const auto& st : traj.steps)
                rows.push_back({static_cast<double>(st.tau), static_cast<double>(st.z1),
                                static_cast<double>(st.z2)});
            r["table"] = table({"tau", "z1", "z2"}, rows);
            return r;
        }};

    cmds["xorsat ode"] = {
        {{"l", {"3", ""}},
         {"rho", {"1.0", ""}},
         {"step", {"1e-4", ""}},
         {"covariance", {"false", ""}}},
        [](const Config& c) {
            int l = static_cast<int>(get_i(c, "l"));
            double rho = get_d(c, "rho"), step = get_d(c, "step");
            bool cov = get_s(c, "covariance") == "true";
            OdeTrajectory traj =
                cov ? covariance_ode_solve(l, rho, step) : mean_ode_solve(l, rho, step);
            json r;
            r["theta_star"] = traj.theta_star;
            r["closed_form_residual"] = traj.closed_form_residual;
            std::vector<std::string> header = {"theta", "y1", "y2"};
            if (cov) {
                header.push_back("q11");
                header.push_back("q12");
                header.push_back("q22");
            }
            std::vector<std::vector<double>> rows;
            std::size_t stride = std::max<std::size_t>(1, traj.theta.size() / 500);
            for (std::size_t i = 0; i < traj.theta.size(); i += stride) {
                std::vector<double> row = {traj.theta[i], traj.y1[i], traj.y2[i]};
                if (cov) {
                    row.push_back(traj.q11[i]);
                    row.push_back(traj.q12[i]);
                    row.push_back(traj.q22[i]);
                }
                rows.push_back(row);
            }
            r["table"] = table(header, rows);
            return r;
        }};

    cmds["xorsat rho-d"] = {
        {{"l", {"!", ""}}},
        [](const Config& c) {
            int l = static_cast<int>(get_i(c, "l"));
            double tangency = rho_d(l, false);
            double ode = rho_d(l, true);
            json r;
            r["rho_d"] = tangency;
            r["rho_d_ode"] = ode;
            r["method_agreement"] = std::abs(tangency - ode);
            return r;
        }};

    cmds["xorsat fss"] = {
        {{"l", {"3", ""}},
         {"mc-paths", {"100000", ""}},
         {"mc-step", {"1e-4", ""}},
         {"n", {"1000", "system size for the prediction table"}},
         {"r-min", {"-3", ""}},
         {"r-max", {"3", ""}},
         {"points", {"25", ""}}},
        [](const Config& c) {
            FssConstants fc =
                fss_constants(static_cast<int>(get_i(c, "l")),
                              static_cast<int>(get_i(c, "mc-paths")),
                              get_d(c, "mc-step"), c.seed);
            json r;
            r["rho_d"] = fc.rho_d;
            r["theta_d"] = fc.theta_d;
            r["f_tilde"] = fc.f_tilde;
            r["g_tilde"] = fc.g_tilde;
            r["q11_at_theta_d"] = fc.q11_at_theta_d;
            r["dy1_drho"] = fc.dy1_drho;
            r["a_l"] = fc.a_l;
            r["b_l"] = fc.b_l;
            r["kappa"] = fc.kappa;
            r["kappa_se"] = fc.kappa_se;
            int points = static_cast<int>(get_i(c, "points"));
            if (points < 2) throw ValidationError("points must be >= 2");
            double rmin = get_d(c, "r-min"), rmax = get_d(c, "r-max");
            double n = static_cast<double>(get_i(c, "n"));
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < points; ++i) {
                double rr = rmin + (rmax - rmin) * i / (points - 1);
                rows.push_back({rr, fss_prediction(fc, n, rr)});
            }
            r["table"] = table({"r", "p_core"}, rows);
            return r;
        }};

    cmds["xorsat mc"] = {
        {{"l", {"3", ""}},
         {"n", {"500", ""}},
         {"rho", {"", "single density; omit to sweep"}},
         {"rho-min", {"1.0", ""}},
         {"rho-max", {"1.45", ""}},
         {"points", {"10", ""}},
         {"trials", {"400", ""}}},
        [](const Config& c) {
            int l = static_cast<int>(get_i(c, "l"));
            int n = static_cast<int>(get_i(c, "n"));
            int trials = static_cast<int>(get_i(c, "trials"));
            json r;
            if (!get_s(c, "rho").empty()) {
                CoreProbability p = core_probability_mc(l, n, get_d(c, "rho"), trials, c.seed);
                r["p_hat"] = p.p_hat;
                r["std_error"] = p.std_error;
                r["ci_lo"] = p.ci_lo;
                r["ci_hi"] = p.ci_hi;
                r["trials"] = p.trials;
                return r;
            }
            int points = static_cast<int>(get_i(c, "points"));
            if (points < 2) throw ValidationError("points must be >= 2");
            double lo = get_d(c, "rho-min"), hi = get_d(c, "rho-max");
            std::vector<std::vector<double>> rows;
            for (int i = 0; i < points; ++i) {
                double rho = lo + (hi - lo) * i / (points - 1);
                CoreProbability p =
                    core_probability_mc(l, n, rho, trials, c.seed + 131 * i);
                rows.push_back({rho, p.p_hat, p.std_error});
            }
            r["table"] = table({"rho", "p_core", "std_error"}, rows);
            return r;
        }};

    cmds["mcmc run"] = {
        {{"model", {"cw", "cw | ising | coloring"}},
         {"graph", {"", "required for ising/coloring"}},
         {"n", {"100", "sites (cw only)"}},
         {"beta", {"1.0", ""}},
         {"b", {"0.0", ""}},
         {"j", {"1.0", ""}},
         {"q", {"3", ""}},
         {"steps", {"100000", "single-site updates (cw)"}},
         {"sweeps", {"200", "full sweeps (ising/coloring)"}},
         {"burn-in", {"50", ""}},
         {"stride", {"5", ""}}},
        [](const Config& c) {
            const std::string& model = get_s(c, "model");
            json r;
            if (model == "cw") {
                ScalarChainResult run = cw_glauber_run(
                    static_cast<int>(get_i(c, "n")), get_d(c, "beta"),
                    get_i(c, "steps"), get_i(c, "burn-in"), get_i(c, "stride"), c.seed);
                double mean = 0.0;
                for (double v : run.samples) mean += v;
                if (!run.samples.empty()) mean /= run.samples.size();
                r["samples"] = run.samples.size();
                r["mean_xbar"] = mean;
                r["autocorr_1"] = run.autocorr_1;
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < run.samples.size(); ++i)
                    rows.push_back({static_cast<double>(i), run.samples[i]});
                r["table"] = table({"index", "xbar"}, rows);
                return r;
            }
            if (get_s(c, "graph").empty())
                throw ValidationError("model '" + model + "' needs --graph");
            MultiGraph g = build_graph(get_s(c, "graph"), c.seed ^ 0x6);
            if (model == "ising") {
                IsingRunResult run = ising_heatbath_run(
                    g, get_d(c, "beta"),
                    std::vector<double>(g.n_vertices, get_d(c, "b")),
                    std::vector<double>(g.edges.size(), get_d(c, "j")),
                    static_cast<int>(get_i(c, "sweeps")),
                    static_cast<int>(get_i(c, "burn-in")),
                    static_cast<int>(get_i(c, "stride")), c.seed);
                double mean = 0.0;
                for (double v : run.xbar) mean += v;
                if (!run.xbar.empty()) mean /= run.xbar.size();
                r["samples"] = run.xbar.size();
                r["mean_xbar"] = mean;
                r["autocorr_1"] = run.autocorr_1;
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < run.xbar.size(); ++i)
                    rows.push_back({static_cast<double>(i), run.xbar[i]});
                r["table"] = table({"index", "xbar"}, rows);
                return r;
            }
            if (model == "coloring") {
                auto samples = coloring_glauber_run(
                    g, static_cast<int>(get_i(c, "q")),
                    static_cast<int>(get_i(c, "sweeps")),
                    static_cast<int>(get_i(c, "burn-in")),
                    static_cast<int>(get_i(c, "stride")), c.seed);
                r["samples"] = samples.size();
                return r;
            }
            throw ValidationError("unknown model '" + model + "' (cw | ising | coloring)");
        }};

    return cmds;
}

// --------------------------------------------------------------- I/O plumbing

std::string csv_escape(const json& v) {
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string render(const Config& cfg, const json& result) {
    json config_json = cfg.to_json();
    if (cfg.format == "json") {
        json doc;
        doc["config"] = config_json;
        doc["version"] = kVersion;
        doc["result"] = result;
        return doc.dump(2) + "\n";
    }
    // csv: config and version as comment lines, then either the command's
    // table or key,value rows of scalar fields
    std::string out = "# version," + std::string(kVersion) + "\n";
    out += "# config," + csv_escape(json(config_json.dump())) + "\n";
    if (result.contains("table")) {
        const json& t = result["table"];
        std::string line;
        for (const auto& h : t["header"]) {
            if (!line.empty()) line += ',';
            line += h.get<std::string>();
        }
        out += line + "\n";
        for (const auto& row : t["rows"]) {
            line.clear();
            for (const auto& v : row) {
                if (!line.empty()) line += ',';
                line += csv_escape(v);
            }
            out += line + "\n";
        }
        for (auto it = result.begin(); it != result.end(); ++it)
            if (it.key() != "table" && it->is_primitive())
                out += "# " + it.key() + "," + csv_escape(*it) + "\n";
    } else {
        out += "key,value\n";
        for (auto it = result.begin(); it != result.end(); ++it)
            if (it->is_primitive()) out += it.key() + "," + csv_escape(*it) + "\n";
    }
    return out;
}

int fail(int code, const std::string& type, const std::string& message) {
    json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    std::cerr << err.dump() << "\n";
    return code;
}

void usage(const std::map<std::string, Command>& cmds) {
    std::cerr << "usage: sgm-run <group> <command> [--config FILE] [--seed N]\n"
                 "               [--format json|csv] [--out PATH] [--threads N]\n"
                 "               [--<param> VALUE ...]\n\ncommands:\n";
    for (auto& [name, cmd] : cmds) {
        std::cerr << "  " << name << "\n";
        for (auto& [p, spec] : cmd.spec) {
            std::cerr << "      --" << p;
            if (spec.def == "!")
                std::cerr << " (required)";
            else if (!spec.def.empty())
                std::cerr << " (default " << spec.def << ")";
            if (!spec.help.empty()) std::cerr << "  " << spec.help;
            std::cerr << "\n";
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    auto cmds = make_commands();
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && (args[0] == "-h" || args[0] == "--help")) {
        usage(cmds);
        return 0;
    }
    try {
        if (args.size() < 2)
            throw ValidationError("expected: <group> <command> [options]; see --help");
        Config cfg;
        cfg.command = args[0] + " " + args[1];
        auto it = cmds.find(cfg.command);
        if (it == cmds.end())
            throw ValidationError("unknown command '" + cfg.command + "'; see --help");
        const Command& cmd = it->second;

        if (const char* env = std::getenv(kSeedEnv)) {
            try {
                cfg.seed = std::stoull(env);
            } catch (...) {
                throw ValidationError(std::string(kSeedEnv) + " must be an integer");
            }
        }

        // collect flags; track which top-level keys the command line set
        std::map<std::string, std::string> flag_params;
        std::set<std::string> flag_top;
        std::string config_path;
        for (std::size_t i = 2; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a.rfind("--", 0) != 0)
                throw ValidationError("unexpected argument '" + a + "'");
            std::string key = a.substr(2);
            auto need_value = [&]() -> std::string {
                if (i + 1 >= args.size())
                    throw ValidationError("flag --" + key + " needs a value");
                return args[++i];
            };
            if (key == "config") {
                config_path = need_value();
            } else if (key == "seed") {
                cfg.seed = std::stoull(need_value());
                flag_top.insert("seed");
            } else if (key == "format") {
                cfg.format = need_value();
                flag_top.insert("format");
            } else if (key == "out") {
                cfg.out = need_value();
                flag_top.insert("out");
            } else if (key == "threads") {
                cfg.threads = std::stoi(need_value());
                flag_top.insert("threads");
            } else {
                if (!cmd.spec.count(key))
                    throw ValidationError("unknown parameter --" + key + " for '" +
                                          cfg.command + "'");
                if (flag_params.count(key))
                    throw ValidationError("parameter --" + key + " given twice");
                flag_params[key] = need_value();
            }
        }

        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ValidationError("cannot open config file " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const std::exception& e) {
                throw ValidationError(std::string("config file: ") + e.what());
            }
            for (auto itj = j.begin(); itj != j.end(); ++itj) {
                const std::string& key = itj.key();
                if (key == "command") {
                    if (itj->get<std::string>() != cfg.command)
                        throw ValidationError("config file names command '" +
                                              itj->get<std::string>() +
                                              "' but the command line says '" +
                                              cfg.command + "'");
                } else if (key == "seed" || key == "format" || key == "out" ||
                           key == "threads") {
                    if (flag_top.count(key))
                        throw ValidationError("'" + key +
                                              "' set in both the config file and a flag");
                    if (key == "seed")
                        cfg.seed = itj->get<std::uint64_t>();
                    else if (key == "format")
                        cfg.format = itj->get<std::string>();
                    else if (key == "out")
                        cfg.out = itj->get<std::string>();
                    else
                        cfg.threads = itj->get<int>();
                } else if (key == "params") {
                    for (auto itp = itj->begin(); itp != itj->end(); ++itp) {
                        if (!cmd.spec.count(itp.key()))
                            throw ValidationError("config file: unknown parameter '" +
                                                  itp.key() + "'");
                        if (flag_params.count(itp.key()))
                            throw ValidationError("parameter '" + itp.key() +
                                                  "' set in both the config file and a flag");
                        flag_params[itp.key()] = itp->is_string()
                                                     ? itp->get<std::string>()
                                                     : itp->dump();
                    }
                } else {
                    throw ValidationError("config file: unknown key '" + key + "'");
                }
            }
        }

        cfg.params = flag_params;
        for (auto& [key, spec] : cmd.spec) {
            if (cfg.params.count(key)) continue;
            if (spec.def == "!")
                throw ValidationError("missing required parameter --" + key);
            cfg.params[key] = spec.def;
        }
        if (cfg.format != "json" && cfg.format != "csv")
            throw ValidationError("format must be json or csv");
        if (cfg.threads < 1) throw ValidationError("threads must be >= 1");

        json result = cmd.run(cfg);
        std::string text = render(cfg, result);
        if (cfg.out == "-") {
            std::cout << text;
        } else {
            std::ofstream out(cfg.out, std::ios::binary);
            if (!out) throw ValidationError("cannot write to " + cfg.out);
            out << text;
        }
        return 0;
    } catch (const ValidationError& e) {
        return fail(2, "validation", e.what());
    } catch (const NumericalError& e) {
        return fail(3, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(2, "validation", e.what());
    }
}
