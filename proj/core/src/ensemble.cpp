#include "sks/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sks/parallel.hpp"
#include "sks/potential.hpp"

namespace sks {

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "global_existence") return ExperimentKind::GlobalExistence;
    if (s == "supercritical_divergence") return ExperimentKind::SupercriticalDivergence;
    if (s == "supercritical_general") return ExperimentKind::SupercriticalGeneral;
    if (s == "any_mass_blowup") return ExperimentKind::AnyMassBlowup;
    if (s == "small_perturbation") return ExperimentKind::SmallPerturbation;
    if (s == "continuous_dependence") return ExperimentKind::ContinuousDependence;
    if (s == "picard_contraction") return ExperimentKind::PicardContraction;
    if (s == "particle_chaos") return ExperimentKind::ParticleChaos;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::GlobalExistence: return "global_existence";
        case ExperimentKind::SupercriticalDivergence: return "supercritical_divergence";
        case ExperimentKind::SupercriticalGeneral: return "supercritical_general";
        case ExperimentKind::AnyMassBlowup: return "any_mass_blowup";
        case ExperimentKind::SmallPerturbation: return "small_perturbation";
        case ExperimentKind::ContinuousDependence: return "continuous_dependence";
        case ExperimentKind::PicardContraction: return "picard_contraction";
        case ExperimentKind::ParticleChaos: return "particle_chaos";
    }
    return "?";
}

int ExperimentBase::records_per_path() const {
    int total = static_cast<int>(std::llround(solver.t_end / solver.dt));
    return total / effective_record_every();
}

int ExperimentBase::effective_record_every() const {
    if (record_every > 0) return record_every;
    int total = static_cast<int>(std::llround(solver.t_end / solver.dt));
    return std::max(1, total / 20);
}

std::vector<Field> default_probe_set(const DomainSpec& domain) {
    double L = domain.half_width;
    std::vector<Field> probes;
    for (double s : {L / 24.0, L / 12.0, L / 8.0})
        probes.push_back(make_gaussian_field(domain, 1.0, s));
    probes.push_back(make_gaussian_field(domain, 1.0, L / 12.0, L / 4.0, 0.0));
    Field bump = make_gaussian_field(domain, 0.5, L / 12.0, -L / 6.0, 0.0);
    bump += make_gaussian_field(domain, 0.5, L / 12.0, L / 6.0, 0.0);
    probes.push_back(std::move(bump));
    return probes;
}

double smallness_boundary_mass(const DomainSpec& domain, const ModelParams& params,
                               KernelKind kernel) {
    double gap = params.nu_sq() * params.p * (params.p - 1.0) / 2.0 - params.chi;
    if (!(gap > 0.0)) return 0.0;  // Eq-3.9 has no solution for these params
    PotentialSolver solver(domain);
    double q = std::max(params.p, 3.0);  // the gradient bound needs p > 2
    double C = estimate_Cp(solver, kernel, q, default_probe_set(domain));
    return std::sqrt(C * gap / params.chi);
}

namespace {

struct PathTimeSeries {
    std::vector<double> t;
    std::vector<double> v;
};

SeriesStat aggregate(const std::vector<PathTimeSeries>& series) {
    SeriesStat out;
    if (series.empty()) return out;
    std::size_t nt = series.front().t.size();
    for (const auto& s : series) nt = std::min(nt, s.t.size());
    out.t.resize(nt);
    out.mean.assign(nt, 0.0);
    out.variance.assign(nt, 0.0);
    out.ci_half_width.assign(nt, 0.0);
    double n = static_cast<double>(series.size());
    for (std::size_t k = 0; k < nt; ++k) {
        out.t[k] = series.front().t[k];
        double m = 0.0;
        for (const auto& s : series) m += s.v[k];
        m /= n;
        double var = 0.0;
        for (const auto& s : series) var += (s.v[k] - m) * (s.v[k] - m);
        var = series.size() > 1 ? var / (n - 1.0) : 0.0;
        out.mean[k] = m;
        out.variance[k] = var;
        out.ci_half_width[k] = 3.0 * std::sqrt(var / n);
    }
    return out;
}

}  // namespace

GlobalExistenceResult run_global_existence(const ExperimentBase& base, double sigma,
                                           double horizon) {
    GlobalExistenceResult res;
    ModelParams params = base.params;
    params.sigma = sigma;
    params.validate_divergence();

    res.boundary_mass = smallness_boundary_mass(base.domain, params, base.solver.kernel);
    double C = 0.0;
    {
        double gap = params.nu_sq() * params.p * (params.p - 1.0) / 2.0 - params.chi;
        if (res.boundary_mass > 0.0)
            C = res.boundary_mass * res.boundary_mass * params.chi / gap;
    }
    res.empirical_C = C;
    res.applicable = C > 0.0 && smallness_condition(base.ic_mass, params, C);
    if (!res.applicable) return res;

    SolverConfig cfg = base.solver;
    cfg.t_end = horizon;
    NoiseSpec noise = NoiseSpec::divergence(sigma);
    int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    int every = base.effective_record_every();

    struct PathOut {
        double max_ratio = 0.0;
        bool blowup = false;
        PathTimeSeries mass_series;
    };
    std::function<PathOut(int)> job = [&](int i) -> PathOut {
        RngContext ctx{base.seed, static_cast<std::uint64_t>(i)};
        auto engine = ctx.engine();
        BrownianPath path = BrownianPath::sample(2, cfg.dt, total, engine);
        Solver solver(base.domain, params, noise, cfg);
        Field rho0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);
        std::vector<double> norm0;
        for (double p : base.p_list) norm0.push_back(lp_norm(rho0, p));
        PathOut out;
        auto observer = [&](const SolverState& st) {
            out.mass_series.t.push_back(st.t);
            out.mass_series.v.push_back(mass(st.rho));
            for (std::size_t k = 0; k < base.p_list.size(); ++k)
                out.max_ratio =
                    std::max(out.max_ratio, lp_norm(st.rho, base.p_list[k]) / norm0[k]);
        };
        SolverState fin = solver.run(rho0, path, observer, every);
        out.blowup = fin.blown_up || fin.internal_error;
        return out;
    };
    auto outs = parallel_map<PathOut>(base.paths, job, base.threads);

    std::vector<PathTimeSeries> mass_series;
    for (int i = 0; i < base.paths; ++i) {
        res.max_norm_ratio = std::max(res.max_norm_ratio, outs[i].max_ratio);
        if (outs[i].blowup && !res.any_blowup) {
            res.any_blowup = true;
            res.offending_stream = static_cast<std::uint64_t>(i);
        }
        mass_series.push_back(std::move(outs[i].mass_series));
    }
    res.mass_stat = aggregate(mass_series);
    return res;
}

SupercriticalResult run_supercritical(const ExperimentBase& base, const NoiseSpec& noise,
                                      double horizon_factor) {
    SupercriticalResult res;
    ModelParams params = base.params;
    if (noise.regime == NoiseSpec::Regime::DivergenceType) params.validate_divergence();

    Field rho0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);
    double M0 = second_moment(rho0);
    res.threshold_mass =
        4.0 * M_PI * (params.nu_sq() + params.sigma * params.sigma) / params.chi;
    res.t_star = blowup_time_bound(base.ic_mass, M0, params);

    SolverConfig cfg = base.solver;
    cfg.t_end = horizon_factor * res.t_star;
    int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));

    std::function<double(int)> job = [&](int i) -> double {
        RngContext ctx{base.seed, static_cast<std::uint64_t>(i)};
        auto engine = ctx.engine();
        BrownianPath path = BrownianPath::sample(noise.components(), cfg.dt, total, engine);
        Solver solver(base.domain, params, noise, cfg);
        SolverState fin = solver.run(rho0, path);
        if (fin.blown_up && fin.blowup_time) return *fin.blowup_time;
        return std::numeric_limits<double>::infinity();
    };
    res.firing_times = parallel_map<double>(base.paths, job, base.threads);

    int fired = 0;
    std::vector<double> finite;
    for (double t : res.firing_times) {
        if (t <= res.t_star) ++fired;
        if (std::isfinite(t)) finite.push_back(t);
    }
    res.fired_fraction = static_cast<double>(fired) / base.paths;
    if (!finite.empty()) {
        std::sort(finite.begin(), finite.end());
        res.median_firing_time = finite[finite.size() / 2];
    }
    return res;
}

AnyMassBlowupResult run_any_mass_blowup(const ExperimentBase& base, double sigma,
                                        const std::vector<double>& alpha_grid,
                                        const std::vector<double>& beta_grid) {
    AnyMassBlowupResult res;
    ModelParams params = base.params;
    params.sigma = sigma;
    params.validate_common();

    Field rho0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);
    double m0 = mass(rho0);
    double M0 = second_moment(rho0);

    // Sweep the event parameters; keep the pair with the largest floor.
    for (double alpha : alpha_grid) {
        for (double beta : beta_grid) {
            double t2;
            try {
                t2 = t2_min(m0, M0, params, alpha, beta);
            } catch (const std::exception&) {
                continue;
            }
            if (!(t2 > 0.0)) continue;
            BrownianEventSpec ev{alpha, beta, t2};
            double p = brownian_event_probability_closed(ev, sigma);
            if (p > res.p_ab) {
                res.p_ab = p;
                res.best_alpha = alpha;
                res.best_beta = beta;
                res.t2 = t2;
            }
        }
    }
    if (res.p_ab <= 0.0)
        throw std::runtime_error("run_any_mass_blowup: sweep produced no valid (alpha, beta)");
    res.floor_half_p = blowup_probability_lower_bound(res.p_ab);

    SolverConfig cfg = base.solver;
    cfg.t_end = res.t2;
    int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    NoiseSpec noise =
        NoiseSpec::general(make_fourier_basis(base.domain, 1), PhiMap::linear(sigma));

    struct PathOut {
        bool capped = false;
        bool contradiction = false;
    };
    std::function<PathOut(int)> job = [&](int i) -> PathOut {
        RngContext ctx{base.seed, static_cast<std::uint64_t>(i)};
        auto engine = ctx.engine();
        BrownianPath path = BrownianPath::sample(1, cfg.dt, total, engine);
        Solver solver(base.domain, params, noise, cfg);
        SolverState fin = solver.run(rho0, path);
        PathOut out;
        out.capped = fin.blown_up && fin.blowup_time && *fin.blowup_time <= res.t2;
        MomentOracle oracle(m0, M0, params, &path);
        out.contradiction = oracle.first_contradiction_time(res.t2).has_value();
        return out;
    };
    auto outs = parallel_map<PathOut>(base.paths, job, base.threads);

    int hits = 0;
    for (const auto& o : outs) {
        if (o.capped) ++res.blowups;
        if (o.contradiction) ++res.contradictions;
        if (o.capped || o.contradiction) ++hits;
    }
    res.observed_fraction = static_cast<double>(hits) / base.paths;
    res.std_error = std::sqrt(
        std::max(res.observed_fraction * (1.0 - res.observed_fraction), 1e-12) / base.paths);
    return res;
}

SmallPerturbationResult run_small_perturbation(const ExperimentBase& base,
                                               const std::vector<double>& eps_sweep,
                                               double horizon) {
    SmallPerturbationResult res;
    res.eps = eps_sweep;
    ModelParams params = base.params;

    SolverConfig cfg = base.solver;
    cfg.t_end = horizon;
    int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    int every = base.effective_record_every();
    Field rho0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);
    const double p = params.p;

    // Deterministic reference at the output times.
    std::vector<Field> ref;
    {
        ModelParams dp = params;
        dp.sigma = 0.0;
        Solver solver(base.domain, dp, NoiseSpec::divergence(0.0), cfg);
        Trajectory traj = solver.solve_deterministic(rho0, every);
        ref = std::move(traj.fields);
    }

    // gap[e][i]: sup_t ||rho_eps - rho*||_p^p for path i, coupled across eps
    // by reusing the same Brownian path.
    std::vector<std::vector<double>> gap(eps_sweep.size());
    std::function<std::vector<double>(int)> job = [&](int i) -> std::vector<double> {
        RngContext ctx{base.seed, static_cast<std::uint64_t>(i)};
        auto engine = ctx.engine();
        BrownianPath path = BrownianPath::sample(2, cfg.dt, total, engine);
        std::vector<double> out;
        for (double eps : eps_sweep) {
            ModelParams ep = params;
            ep.sigma = eps;
            ep.validate_divergence();
            Solver solver(base.domain, ep, NoiseSpec::divergence(eps), cfg);
            double sup_gap = 0.0;
            std::size_t ref_idx = 0;
            auto observer = [&](const SolverState& st) {
                if (ref_idx < ref.size()) {
                    Field diff = st.rho;
                    diff -= ref[ref_idx];
                    double g = std::pow(lp_norm(diff, p), p);
                    sup_gap = std::max(sup_gap, g);
                    ++ref_idx;
                }
            };
            solver.run(rho0, path, observer, every);
            out.push_back(sup_gap);
        }
        return out;
    };
    auto outs = parallel_map<std::vector<double>>(base.paths, job, base.threads);
    for (std::size_t e = 0; e < eps_sweep.size(); ++e) {
        gap[e].resize(base.paths);
        for (int i = 0; i < base.paths; ++i) gap[e][i] = outs[i][e];
    }

    for (std::size_t e = 0; e < eps_sweep.size(); ++e) {
        double m = 0.0;
        for (double g : gap[e]) m += g;
        m /= base.paths;
        double var = 0.0;
        for (double g : gap[e]) var += (g - m) * (g - m);
        var = base.paths > 1 ? var / (base.paths - 1.0) : 0.0;
        res.gap_mean.push_back(m);
        res.gap_se.push_back(std::sqrt(var / base.paths));
    }
    // Paired decrease z-scores (common paths).
    for (std::size_t e = 0; e + 1 < eps_sweep.size(); ++e) {
        double m = 0.0;
        for (int i = 0; i < base.paths; ++i) m += gap[e][i] - gap[e + 1][i];
        m /= base.paths;
        double var = 0.0;
        for (int i = 0; i < base.paths; ++i) {
            double d = gap[e][i] - gap[e + 1][i] - m;
            var += d * d;
        }
        var = base.paths > 1 ? var / (base.paths - 1.0) : 0.0;
        res.decrease_z.push_back(m / std::sqrt(std::max(var / base.paths, 1e-300)));
    }
    // Log-log slopes of the p-th power gap and of its Lp-metric root.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = static_cast<int>(eps_sweep.size());
        for (int e = 0; e < n; ++e) {
            double lx = std::log(eps_sweep[e]);
            double ly = std::log(std::max(res.gap_mean[e], 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        res.slope_pp = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        res.slope_lp = res.slope_pp / p;
    }
    return res;
}

ContinuousDependenceResult run_continuous_dependence(const ExperimentBase& base,
                                                     double sigma,
                                                     const std::vector<double>& delta_sweep,
                                                     double horizon) {
    ContinuousDependenceResult res;
    res.delta = delta_sweep;
    ModelParams params = base.params;
    params.sigma = sigma;
    params.validate_divergence();

    SolverConfig cfg = base.solver;
    cfg.t_end = horizon;
    int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    int every = base.effective_record_every();
    NoiseSpec noise = NoiseSpec::divergence(sigma);
    const double p = params.p;
    Field rho1_0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);

    for (double delta : delta_sweep) {
        // rho2_0 = (1+delta) rho1_0: the initial Lp gap is delta*||rho1_0||_p.
        Field rho2_0 = rho1_0;
        rho2_0 *= 1.0 + delta;
        double gap0 = std::pow(delta * lp_norm(rho1_0, p), p);

        std::function<double(int)> job = [&](int i) -> double {
            RngContext ctx{base.seed, static_cast<std::uint64_t>(i)};
            auto engine = ctx.engine();
            BrownianPath path = BrownianPath::sample(2, cfg.dt, total, engine);
            Solver s1(base.domain, params, noise, cfg);
            Solver s2(base.domain, params, noise, cfg);
            std::vector<Field> snaps1;
            auto obs1 = [&](const SolverState& st) { snaps1.push_back(st.rho); };
            s1.run(rho1_0, path, obs1, every);
            double sup_gap = 0.0;
            std::size_t idx = 0;
            auto obs2 = [&](const SolverState& st) {
                if (idx < snaps1.size()) {
                    Field diff = st.rho;
                    diff -= snaps1[idx];
                    sup_gap = std::max(sup_gap, std::pow(lp_norm(diff, p), p));
                    ++idx;
                }
            };
            s2.run(rho2_0, path, obs2, every);
            return sup_gap / gap0;
        };
        auto ratios = parallel_map<double>(base.paths, job, base.threads);
        double m = 0.0;
        for (double r : ratios) m += r;
        m /= base.paths;
        double var = 0.0;
        for (double r : ratios) var += (r - m) * (r - m);
        var = base.paths > 1 ? var / (base.paths - 1.0) : 0.0;
        res.ratio_mean.push_back(m);
        res.ratio_se.push_back(std::sqrt(var / base.paths));
    }
    return res;
}

PicardContractionResult run_picard(const ExperimentBase& base, double sigma,
                                   double horizon, int iterations) {
    PicardContractionResult res;
    ModelParams params = base.params;
    params.sigma = sigma;
    if (sigma != 0.0) params.validate_divergence();

    SolverConfig cfg = base.solver;
    cfg.t_end = horizon;
    int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));

    RngContext ctx{base.seed, 0};
    auto engine = ctx.engine();
    BrownianPath path = BrownianPath::sample(2, cfg.dt, total, engine);
    Solver solver(base.domain, params, NoiseSpec::divergence(sigma), cfg);
    Field rho0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);
    auto pr = solver.picard_iterate(rho0, path, iterations);
    res.distances = pr.distances;
    res.ratios = pr.ratios;
    res.diverged = pr.diverged;
    if (!pr.ratios.empty()) {
        double logsum = 0.0;
        for (double r : pr.ratios) logsum += std::log(std::max(r, 1e-300));
        res.z_geometric = std::exp(logsum / pr.ratios.size());
    }
    return res;
}

ParticleChaosResult run_particle_chaos(const ExperimentBase& base, int particle_count,
                                       double bandwidth, double delta, double horizon,
                                       std::uint64_t seed_offset) {
    ParticleChaosResult res;
    ModelParams params = base.params;
    params.sigma = 0.0;

    SolverConfig cfg = base.solver;
    cfg.t_end = horizon;
    int every = base.effective_record_every();

    Field rho0 = make_gaussian_field(base.domain, base.ic_mass, base.ic_width);
    Solver solver(base.domain, params, NoiseSpec::divergence(0.0), cfg);
    Trajectory pde = solver.solve_deterministic(rho0, every);

    ParticleConfig pc;
    pc.domain = base.domain;
    pc.count = particle_count;
    pc.dt = cfg.dt;
    pc.chi = params.chi;
    pc.a = params.a;
    pc.m0 = base.ic_mass;
    pc.delta = delta;
    RngContext ctx{base.seed, 1000000 + seed_offset};
    auto engine = ctx.engine();
    ParticleState st = init_gaussian_cloud(pc, base.ic_width, engine);

    std::vector<Field> kde_fields;
    std::vector<double> kde_moments;
    int total = static_cast<int>(std::llround(horizon / cfg.dt));
    auto snapshot = [&]() {
        Field kde = empirical_density(st, pc, bandwidth);
        kde_moments.push_back(second_moment(kde));
        kde_fields.push_back(std::move(kde));
    };
    snapshot();
    for (int s = 0; s < total; ++s) {
        particle_step(st, pc, engine);
        if ((s + 1) % every == 0 || s == total - 1) snapshot();
    }

    std::size_t nt = std::min(kde_fields.size(), pde.size());
    ChaosGap gap = chaos_gap(
        std::vector<double>(pde.times.begin(), pde.times.begin() + nt),
        std::vector<Field>(kde_fields.begin(), kde_fields.begin() + nt),
        std::vector<Field>(pde.fields.begin(), pde.fields.begin() + nt),
        std::vector<double>(kde_moments.begin(), kde_moments.begin() + nt));
    res.times = gap.times;
    res.l2_distance = gap.l2_distance;
    for (std::size_t i = 0; i < nt; ++i) {
        double mpde = second_moment(pde.fields[i]);
        double rel = gap.second_moment_gap[i] / std::max(mpde, 1e-300);
        res.second_moment_gap_rel.push_back(rel);
        res.max_moment_gap_rel = std::max(res.max_moment_gap_rel, rel);
    }
    return res;
}

}  // namespace sks
