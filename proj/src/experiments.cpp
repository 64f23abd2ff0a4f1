#include "hclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hclab/bp.hpp"
#include "hclab/error.hpp"
#include "hclab/format.hpp"
#include "hclab/kernel.hpp"
#include "hclab/large_degree.hpp"
#include "hclab/model.hpp"
#include "hclab/oracles.hpp"
#include "hclab/population.hpp"
#include "hclab/rng.hpp"

#ifndef HCLAB_VERSION
#define HCLAB_VERSION "dev"
#endif

namespace fs = std::filesystem;

namespace hclab {

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"generate",      "bp-run",     "pd-curve",
                                                   "free-energy",   "phase-diagram", "mu-profile",
                                                   "exhaustive",    "verify-bounds", "gaussian-check"};
    return names;
}

namespace {

std::string hex64(std::uint64_t x)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << x;
    return os.str();
}

// Collects output files and handles metadata and caching.
class Session {
public:
    Session(std::string experiment, const Config& cfg, const RunOptions& opt, std::ostream& log)
        : experiment_(std::move(experiment)), cfg_(cfg), opt_(opt), log_(log)
    {
    }

    // Call after every key has been read. Returns false when the outputs were
    // restored from the cache and no work is needed.
    bool begin()
    {
        cfg_.reject_unused();
        std::string key = experiment_ + "\n" + HCLAB_VERSION + "\n";
        for (const auto& line : cfg_.canonical())
            key += line + "\n";
        hash_ = hex64(fnv1a(key));
        if (!opt_.use_cache || opt_.force)
            return true;
        const fs::path dir = cache_dir() / hash_;
        std::ifstream manifest(dir / "MANIFEST");
        if (!manifest)
            return true;
        std::vector<std::string> names;
        for (std::string name; std::getline(manifest, name);)
            if (!name.empty())
                names.push_back(name);
        fs::create_directories(opt_.out_dir);
        for (const auto& name : names) {
            if (!fs::exists(dir / name))
                return true;
        }
        for (const auto& name : names) {
            const fs::path dst = fs::path(opt_.out_dir) / name;
            fs::copy_file(dir / name, dst, fs::copy_options::overwrite_existing);
            result_.files.push_back(dst.string());
        }
        result_.from_cache = true;
        log_ << experiment_ << ": restored " << names.size() << " file(s) from cache " << hash_ << "\n";
        return false;
    }

    // New output file with the metadata block already written.
    std::ostringstream& file(const std::string& name, const std::vector<std::string>& extra_meta = {})
    {
        auto& os = files_[name];
        os << "# experiment=" << experiment_ << "\n";
        os << "# hclab_version=" << HCLAB_VERSION << "\n";
        for (const auto& line : cfg_.canonical())
            os << "# " << line << "\n";
        for (const auto& line : extra_meta)
            os << "# " << line << "\n";
        order_.push_back(name);
        return os;
    }

    // Writes a .plt companion listing the CSV columns, if enabled.
    void manifest(const std::string& csv, const std::string& header)
    {
        if (!manifest_)
            return;
        std::ostringstream& os = file(csv + ".plt");
        std::stringstream ss(header);
        std::string col;
        int i = 1;
        while (std::getline(ss, col, ','))
            os << "column " << i++ << " " << col << "\n";
    }

    void set_manifest(bool on) { manifest_ = on; }

    RunResult finish()
    {
        fs::create_directories(opt_.out_dir);
        for (const auto& name : order_) {
            const fs::path dst = fs::path(opt_.out_dir) / name;
            std::ofstream out(dst, std::ios::binary);
            if (!out)
                fail("cannot write output file '" + dst.string() + "'");
            out << files_[name].str();
            result_.files.push_back(dst.string());
        }
        if (opt_.use_cache)
            store();
        return result_;
    }

    std::ostream& log() { return log_; }

private:
    fs::path cache_dir() const
    {
        if (const char* env = std::getenv("HCLAB_CACHE_DIR"); env && *env)
            return env;
        return fs::path(opt_.out_dir) / ".hclab-cache";
    }

    void store()
    {
        std::error_code ec;
        const fs::path dir = cache_dir() / hash_;
        fs::create_directories(dir, ec);
        if (ec)
            return;  // caching is best effort
        for (const auto& name : order_) {
            std::ofstream out(dir / name, std::ios::binary);
            out << files_[name].str();
        }
        std::ofstream manifest(dir / "MANIFEST");
        for (const auto& name : order_)
            manifest << name << "\n";
    }

    std::string experiment_;
    const Config& cfg_;
    RunOptions opt_;
    std::ostream& log_;
    std::string hash_;
    std::map<std::string, std::ostringstream> files_;
    std::vector<std::string> order_;
    bool manifest_ = false;
    RunResult result_;
};

std::string fmt(double x) { return format_double(x); }

std::string fmt(const std::optional<double>& x) { return x ? format_double(*x) : "NA"; }

ModelParams read_model(const Config& cfg, bool need_n)
{
    ModelParams p;
    const double kappa = cfg.get_double("model.kappa");
    const double b = cfg.get_double("model.b");
    std::optional<std::size_t> n;
    if (need_n) {
        const auto nn = cfg.get_int("model.n");
        if (nn <= 0)
            fail("model.n must be positive");
        n = static_cast<std::size_t>(nn);
    }
    if (cfg.has("model.lambda") && cfg.has("model.a"))
        fail(cfg.source() + ": give either model.lambda or model.a, not both");
    if (cfg.has("model.a")) {
        p.kappa = kappa;
        p.b = b;
        p.a = cfg.get_double("model.a");
        p.n = n;
    } else {
        p = params_from_snr(kappa, b, cfg.get_double("model.lambda"), n);
    }
    p.validate();
    if (need_n)
        p.validate_for_sampling();
    return p;
}

ThresholdRule read_rule(const Config& cfg)
{
    const std::string r = cfg.get_string("run.threshold_rule", std::string("max_psucc"));
    if (r == "max_psucc")
        return ThresholdRule::max_psucc;
    if (r == "min_errors")
        return ThresholdRule::min_errors;
    fail("run.threshold_rule must be max_psucc or min_errors");
}

InitMode read_mode(const Config& cfg)
{
    const std::string m = cfg.get_string("run.mode", std::string("free"));
    if (m == "free")
        return InitMode::free;
    if (m == "plus")
        return InitMode::plus;
    fail("run.mode must be free or plus");
}

HiddenSetMode read_hidden(const Config& cfg, const std::string& fallback)
{
    const std::string m = cfg.get_string("run.hidden_set", fallback);
    if (m == "bernoulli")
        return HiddenSetMode::bernoulli;
    if (m == "fixed_size")
        return HiddenSetMode::fixed_size;
    fail("run.hidden_set must be bernoulli or fixed_size");
}

std::size_t read_count(const Config& cfg, const std::string& key, std::int64_t fallback, std::int64_t min)
{
    const auto v = cfg.get_int(key, fallback);
    if (v < min)
        fail(key + " must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

std::string output_name(const Config& cfg, const std::string& fallback)
{
    const std::string name = cfg.get_string("output.file", fallback);
    if (name.find('/') != std::string::npos)
        fail("output.file must be a bare file name; use --out for the directory");
    return name;
}

// ---- experiments -----------------------------------------------------------

RunResult run_generate(Session& s, const Config& cfg)
{
    const ModelParams p = read_model(cfg, true);
    const auto seed = cfg.get_u64("run.seed", 1);
    const auto hidden = read_hidden(cfg, "bernoulli");
    const std::string name = output_name(cfg, "graph.txt");
    if (!s.begin())
        return s.finish();
    const PlantedGraph g = sample_graph(p, seed, hidden);
    write_graph(s.file(name), g, p);
    s.log() << "generate: n=" << g.n() << " edges=" << g.num_edges() << " |S|=" << g.hidden_size() << "\n";
    return s.finish();
}

RunResult run_bp(Session& s, const Config& cfg)
{
    std::optional<GraphFile> loaded;
    ModelParams p;
    if (cfg.has("run.graph")) {
        std::ifstream in(cfg.get_string("run.graph"));
        if (!in)
            fail("cannot open run.graph file");
        loaded = read_graph(in);
        p = loaded->params;
        p.validate();
    } else {
        p = read_model(cfg, true);
    }
    const auto seed = cfg.get_u64("run.seed", 1);
    const std::size_t seeds = loaded ? 1 : read_count(cfg, "run.seeds", 5, 1);
    const int steps = static_cast<int>(read_count(cfg, "run.steps", 20, 0));
    const InitMode mode = read_mode(cfg);
    const ThresholdRule rule = read_rule(cfg);
    const double damping = cfg.get_double("run.damping", 0.0);
    if (!(damping >= 0.0 && damping < 1.0))
        fail("run.damping must lie in [0, 1)");
    const bool balanced = cfg.get_bool("run.balanced", false);
    const auto hidden = read_hidden(cfg, "bernoulli");
    const std::string name = output_name(cfg, "bp_run.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    if (!s.begin())
        return s.finish();

    const std::string header = "seed,steps,mode,psucc";
    auto& os = s.file(name, {"mode_note=plus-proxy initialises every message from the ground truth"});
    os << header << "\n";
    double total = 0.0;
    for (std::size_t k = 0; k < seeds; ++k) {
        const std::uint64_t gseed = loaded ? loaded->graph.seed() : derive_seed(seed, {k});
        const PlantedGraph g = loaded ? loaded->graph : sample_graph(p, gseed, hidden);
        const MessageState st = bp_run(g, p, mode, steps, damping, balanced);
        const double ps = empirical_psucc(classify(st, rule), g.membership());
        total += ps;
        os << gseed << "," << steps << "," << (mode == InitMode::free ? "free" : "plus-proxy") << "," << fmt(ps)
           << "\n";
    }
    s.manifest(name, header);
    s.log() << "bp-run: mean psucc=" << fmt(total / static_cast<double>(seeds)) << " over " << seeds
            << " graph(s)\n";
    return s.finish();
}

PopulationOptions read_pop_options(const Config& cfg)
{
    PopulationOptions o;
    o.reweight = parse_reweight(cfg.get_string("run.reweight", "pooled"));
    return o;
}

RunResult run_pd_curve(Session& s, const Config& cfg)
{
    const double kappa = cfg.get_double("model.kappa");
    const double b = cfg.get_double("model.b");
    const auto lambdas = cfg.get_grid("run.lambdas");
    CurveOptions co;
    co.M = read_count(cfg, "run.M", 10000, static_cast<std::int64_t>(min_population));
    co.T = static_cast<int>(read_count(cfg, "run.T", 300, 0));
    co.seeds = static_cast<int>(read_count(cfg, "run.seeds", 10, 1));
    co.mc_rounds = read_count(cfg, "run.mc_rounds", 0, 0);
    co.rule = read_rule(cfg);
    co.pop = read_pop_options(cfg);
    const auto seed = cfg.get_u64("run.seed", 1);
    const std::string name = output_name(cfg, "pd_curve.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    for (double l : lambdas)
        params_from_snr(kappa, b, l).validate();
    if (!s.begin())
        return s.finish();

    const auto curve = pd_curve(lambdas, kappa, b, co, seed);
    const std::string header = "lambda,psucc_fr,psucc_fr_se,psucc_pl,psucc_pl_se,psi_fr,psi_fr_se,psi_pl,psi_pl_se";
    auto& os = s.file(name);
    os << header << "\n";
    for (const auto& pt : curve)
        os << fmt(pt.lambda) << "," << fmt(pt.psucc_fr.value) << "," << fmt(pt.psucc_fr.se) << ","
           << fmt(pt.psucc_pl.value) << "," << fmt(pt.psucc_pl.se) << "," << fmt(pt.psi_fr.value) << ","
           << fmt(pt.psi_fr.se) << "," << fmt(pt.psi_pl.value) << "," << fmt(pt.psi_pl.se) << "\n";
    s.manifest(name, header);
    const auto ls = estimate_lambda_s(curve);
    auto& ls_os = s.file("lambda_s.csv");
    ls_os << "lambda_s\n" << fmt(ls) << "\n";
    s.log() << "pd-curve: " << curve.size() << " points, lambda_s=" << fmt(ls) << "\n";
    return s.finish();
}

RunResult run_free_energy(Session& s, const Config& cfg)
{
    const ModelParams p = read_model(cfg, false);
    const std::size_t M = read_count(cfg, "run.M", 10000, static_cast<std::int64_t>(min_population));
    const int T = static_cast<int>(read_count(cfg, "run.T", 300, 0));
    const std::size_t seeds = read_count(cfg, "run.seeds", 1, 1);
    std::size_t rounds = read_count(cfg, "run.mc_rounds", 0, 0);
    const ThresholdRule rule = read_rule(cfg);
    const PopulationOptions po = read_pop_options(cfg);
    const auto seed = cfg.get_u64("run.seed", 1);
    const std::string name = output_name(cfg, "free_energy.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    if (rounds == 0)
        rounds = 20 * M;
    if (rounds < 2)
        fail("run.mc_rounds must be at least 2");
    if (!s.begin())
        return s.finish();

    const std::string header = "seed,mode,t,psucc,psucc_se,psi,psi_se";
    auto& os = s.file(name, {"entropy_bound=" + fmt(binary_entropy(p.kappa))});
    os << header << "\n";
    for (std::size_t k = 0; k < seeds; ++k) {
        for (int m = 0; m < 2; ++m) {
            const InitMode mode = m == 0 ? InitMode::free : InitMode::plus;
            const std::uint64_t rs = derive_seed(seed, {k, static_cast<std::uint64_t>(m)});
            const Population pop = pd_run(p, M, T, mode, rs, po);
            const Estimate ps = pd_psucc(pop, p.kappa, rule);
            const Estimate psi = bethe_free_energy(pop, p, rounds, derive_seed(rs, {0xf4ee}));
            os << rs << "," << (m == 0 ? "free" : "plus") << "," << pop.t << "," << fmt(ps.value) << ","
               << fmt(ps.se) << "," << fmt(psi.value) << "," << fmt(psi.se) << "\n";
            s.log() << "free-energy: " << (m == 0 ? "free" : "plus") << " psi=" << fmt(psi.value) << " +/- "
                    << fmt(psi.se) << "\n";
        }
    }
    s.manifest(name, header);
    return s.finish();
}

RunResult run_phase_diagram(Session& s, const Config& cfg)
{
    const auto kappas = cfg.get_grid("run.kappas");
    BoundaryOptions bo;
    bo.lambda_lo = cfg.get_double("run.lambda_lo", bo.lambda_lo);
    bo.lambda_hi = cfg.get_double("run.lambda_hi", bo.lambda_hi);
    bo.scan_points = static_cast<int>(read_count(cfg, "run.scan_points", bo.scan_points, 3));
    bo.tol = cfg.get_double("run.tol", bo.tol);
    const std::string name = output_name(cfg, "phase_diagram.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    for (double k : kappas)
        if (!(k > 0.0 && k < 1.0))
            fail("run.kappas entries must lie in (0, 1)");
    if (!(bo.lambda_lo > 0.0 && bo.lambda_hi > bo.lambda_lo && bo.tol > 0.0))
        fail("need 0 < run.lambda_lo < run.lambda_hi and run.tol > 0");
    if (!s.begin())
        return s.finish();

    std::vector<PhaseBoundaries> rows(kappas.size());
    std::vector<std::string> errors(kappas.size());
    const auto nk = static_cast<std::ptrdiff_t>(kappas.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < nk; ++i) {
        try {
            rows[i] = phase_boundaries(kappas[i], bo);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            fail("kappa=" + fmt(kappas[i]) + ": " + errors[i]);
    const std::string header = "kappa,lambda_sp,lambda_s,lambda_d";
    auto& os = s.file(name);
    os << header << "\n";
    for (const auto& r : rows)
        os << fmt(r.kappa) << "," << fmt(r.lambda_sp) << "," << fmt(r.lambda_s) << "," << fmt(r.lambda_d) << "\n";
    s.manifest(name, header);
    s.log() << "phase-diagram: " << rows.size() << " kappa values\n";
    return s.finish();
}

RunResult run_mu_profile(Session& s, const Config& cfg)
{
    const double kappa = cfg.get_double("model.kappa");
    const auto lambdas = cfg.get_grid("run.lambdas");
    const double mu_max = cfg.get_double("run.mu_max", 10.0);
    const std::size_t points = read_count(cfg, "run.mu_points", 201, 2);
    const std::size_t nodes = read_count(cfg, "run.quad_nodes", 101, 2);
    s.set_manifest(cfg.get_bool("output.manifest", false));
    if (!(kappa > 0.0 && kappa < 1.0))
        fail("invalid fraction: model.kappa must lie in (0, 1)");
    if (!(mu_max > 0.0))
        fail("run.mu_max must be positive");
    for (double l : lambdas)
        if (!(l > 0.0))
            fail("run.lambdas entries must be positive");
    if (!s.begin())
        return s.finish();

    const GaussHermite rule(nodes);
    const std::string header = "mu,psi_minus_psi0";
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const double lambda = lambdas[li];
        const std::string name = "mu_profile_" + std::to_string(li) + ".csv";
        auto& os = s.file(name, {"lambda=" + fmt(lambda)});
        os << header << "\n";
        const double psi0 = psi_mu(0.0, lambda, kappa, rule);
        for (std::size_t j = 0; j < points; ++j) {
            const double mu = mu_max * static_cast<double>(j) / static_cast<double>(points - 1);
            os << fmt(mu) << "," << fmt(psi_mu(mu, lambda, kappa, rule) - psi0) << "\n";
        }
        s.manifest(name, header);
    }
    s.log() << "mu-profile: " << lambdas.size() << " profile(s)\n";
    return s.finish();
}

RunResult run_exhaustive(Session& s, const Config& cfg)
{
    const ModelParams p = read_model(cfg, true);
    const std::size_t n = *p.n;
    const std::size_t k = read_count(cfg, "run.k", static_cast<std::int64_t>(std::floor(p.kappa * n)), 1);
    const std::size_t seeds = read_count(cfg, "run.seeds", 100, 1);
    const int bp_steps = static_cast<int>(read_count(cfg, "run.bp_steps", 10, 0));
    const auto hidden = read_hidden(cfg, "fixed_size");
    const auto seed = cfg.get_u64("run.seed", 1);
    const std::string name = output_name(cfg, "exhaustive.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    if (k > n)
        fail("run.k exceeds model.n");
    if (binomial(n, k) > exhaustive_guard)
        throw Error(ErrorKind::guard, "instance too large: C(n, k) exceeds 1e8 subsets");
    if (!s.begin())
        return s.finish();

    const std::string header =
        "seed,planted_size,planted_edges,best_edges,ties,overlap,psucc_exhaustive,psucc_bp";
    auto& os = s.file(name, {"k=" + std::to_string(k)});
    os << header << "\n";
    double sum_ex = 0.0, sum_bp = 0.0;
    std::size_t counted = 0;
    for (std::size_t r = 0; r < seeds; ++r) {
        const std::uint64_t gs = derive_seed(seed, {r});
        const PlantedGraph g = sample_graph(p, gs, hidden);
        std::vector<std::uint32_t> planted;
        for (std::uint32_t v = 0; v < n; ++v)
            if (g.membership()[v])
                planted.push_back(v);
        const ExhaustiveResult ex = exhaustive_search(g, k);
        std::string ps_ex = "NA", ps_bp = "NA";
        if (!planted.empty() && planted.size() < n) {
            const double pe = empirical_psucc(indicator(n, ex.best_set), g.membership());
            const double pb = empirical_psucc(classify(bp_run(g, p, InitMode::free, bp_steps)), g.membership());
            ps_ex = fmt(pe);
            ps_bp = fmt(pb);
            sum_ex += pe;
            sum_bp += pb;
            ++counted;
        }
        os << gs << "," << planted.size() << "," << count_edges_within(g, planted) << "," << ex.best_edge_count
           << "," << ex.ties << "," << ex.overlap << "," << ps_ex << "," << ps_bp << "\n";
    }
    s.manifest(name, header);
    if (counted)
        s.log() << "exhaustive: mean psucc exhaustive=" << fmt(sum_ex / counted) << " bp=" << fmt(sum_bp / counted)
                << "\n";
    return s.finish();
}

RunResult run_verify_bounds(Session& s, const Config& cfg)
{
    const double kappa = cfg.get_double("model.kappa");
    const double b = cfg.get_double("model.b");
    const auto lambdas = cfg.get_grid("run.lambdas");
    const std::size_t M = read_count(cfg, "run.M", 10000, static_cast<std::int64_t>(min_population));
    const int T = static_cast<int>(read_count(cfg, "run.T", 300, 1));
    const PopulationOptions po = read_pop_options(cfg);
    const auto seed = cfg.get_u64("run.seed", 1);
    const std::string name = output_name(cfg, "verify_bounds.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    for (double l : lambdas) {
        if (!(l > 0.0 && l < 1.0 / std::numbers::e))
            fail("run.lambdas entries must lie in (0, 1/e) for the ceiling check");
        params_from_snr(kappa, b, l).validate();
    }
    if (!s.begin())
        return s.finish();

    const std::string header =
        "lambda,x_star,ceiling,max_psucc_fr,max_psucc_fr_se,t_at_max,ceiling_holds,max_moment_excess_sigma,"
        "prop1_bound,prop1_vacuous";
    auto& os = s.file(name);
    os << header << "\n";
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const double lambda = lambdas[li];
        const ModelParams p = params_from_snr(kappa, b, lambda);
        const double xs = x_star(lambda);
        const double ceiling = (xs - 1.0) / 4.0;
        Estimate best{-2.0, 0.0};
        int t_best = 0;
        bool holds = true;
        double excess = -INFINITY;
        std::optional<NishimoriReport> prev;
        pd_run(p, M, T, InitMode::free, derive_seed(seed, {li}), po, [&](const Population& pop) {
            const Estimate e = pd_psucc(pop, kappa);
            if (e.value > best.value) {
                best = e;
                t_best = pop.t;
            }
            if (e.value > ceiling + 4.0 * e.se)
                holds = false;
            const NishimoriReport r = nishimori_diagnostics(pop, kappa);
            if (prev) {
                const double bound = std::exp(lambda * prev->x_t);
                const double sigma = std::hypot(r.x_t_se, bound * lambda * prev->x_t_se);
                if (sigma > 0.0)
                    excess = std::max(excess, (r.x_t - bound) / sigma);
            }
            prev = r;
        });
        const BoundValue pb = prop1_bound(lambda, kappa, p.a, p.b);
        os << fmt(lambda) << "," << fmt(xs) << "," << fmt(ceiling) << "," << fmt(best.value) << "," << fmt(best.se)
           << "," << t_best << "," << (holds ? "yes" : "no") << "," << fmt(excess) << "," << fmt(pb.value) << ","
           << (pb.vacuous ? "yes" : "no") << "\n";
        s.log() << "verify-bounds: lambda=" << fmt(lambda) << " ceiling=" << fmt(ceiling)
                << " max psucc(fr)=" << fmt(best.value) << (holds ? " (holds)" : " (exceeds)") << "\n";
    }
    s.manifest(name, header);
    return s.finish();
}

RunResult run_gaussian_check(Session& s, const Config& cfg)
{
    const double kappa = cfg.get_double("model.kappa");
    const double b = cfg.get_double("model.b");
    const double lambda = cfg.get_double("model.lambda");
    const int T = static_cast<int>(read_count(cfg, "run.T", 3, 0));
    const std::size_t M = read_count(cfg, "run.M", 10000, static_cast<std::int64_t>(min_population));
    const Reweight rw = parse_reweight(cfg.get_string("run.reweight", "pooled"));
    const auto seed = cfg.get_u64("run.seed", 1);
    const std::string name = output_name(cfg, "gaussian_check.csv");
    s.set_manifest(cfg.get_bool("output.manifest", false));
    params_from_snr(kappa, b, lambda).validate();
    if (!s.begin())
        return s.finish();

    const auto rows = gaussian_limit_check(kappa, lambda, b, T, M, seed, rw);
    const std::string header =
        "t,mu,mean0,target_mean0,mean1,target_mean1,var0,var1,dev_mean0,dev_mean1,dev_var0,dev_var1";
    auto& os = s.file(name);
    os << header << "\n";
    for (const auto& r : rows)
        os << r.t << "," << fmt(r.mu) << "," << fmt(r.mean0) << "," << fmt(r.target_mean0) << "," << fmt(r.mean1)
           << "," << fmt(r.target_mean1) << "," << fmt(r.var0) << "," << fmt(r.var1) << "," << fmt(r.dev_mean0)
           << "," << fmt(r.dev_mean1) << "," << fmt(r.dev_var0) << "," << fmt(r.dev_var1) << "\n";
    s.manifest(name, header);
    s.log() << "gaussian-check: " << rows.size() << " rows\n";
    return s.finish();
}

}  // namespace

RunResult run_experiment(const std::string& experiment, const Config& cfg, const RunOptions& opt, std::ostream& log)
{
    using Runner = std::function<RunResult(Session&, const Config&)>;
    static const std::map<std::string, Runner> runners = {
        {"generate", run_generate},          {"bp-run", run_bp},
        {"pd-curve", run_pd_curve},          {"free-energy", run_free_energy},
        {"phase-diagram", run_phase_diagram}, {"mu-profile", run_mu_profile},
        {"exhaustive", run_exhaustive},      {"verify-bounds", run_verify_bounds},
        {"gaussian-check", run_gaussian_check},
    };
    const auto it = runners.find(experiment);
    if (it == runners.end())
        fail("unknown experiment '" + experiment + "'");
    if (cfg.has("experiment") && cfg.get_string("experiment") != experiment)
        fail(cfg.source() + ": config is for experiment '" + cfg.get_string("experiment") + "', not '" + experiment +
             "'");
    Session session(experiment, cfg, opt, log);
    return it->second(session, cfg);
}

}  // namespace hclab
