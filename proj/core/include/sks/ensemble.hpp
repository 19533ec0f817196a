#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sks/diagnostics.hpp"
#include "sks/moments.hpp"
#include "sks/noise.hpp"
#include "sks/particles.hpp"
#include "sks/solver.hpp"

namespace sks {

enum class ExperimentKind {
    GlobalExistence,
    SupercriticalDivergence,
    SupercriticalGeneral,
    AnyMassBlowup,
    SmallPerturbation,
    ContinuousDependence,
    PicardContraction,
    ParticleChaos,
};

ExperimentKind experiment_kind_from_string(const std::string& s);
std::string to_string(ExperimentKind k);

/// Shared base configuration for the theorem-level experiments. Every run
/// derives all randomness from (seed, path index).
struct ExperimentBase {
    DomainSpec domain;
    ModelParams params;
    SolverConfig solver;
    std::uint64_t seed = 1;
    int paths = 50;
    double ic_mass = 1.0;
    double ic_width = 1.0;
    int record_every = 0;       // 0 -> ~20 output times
    double cutoff_eps = 0.25;
    double ball_radius = 1.0;
    std::vector<double> p_list = {2.0};
    unsigned threads = 0;       // 0 -> hardware concurrency

    int records_per_path() const;
    int effective_record_every() const;
};

struct SeriesStat {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> ci_half_width;  // 3-sigma Monte Carlo half width
};

/// Theorem 3.3 experiment: all paths must keep ||rho(t)||_p <= ||rho0||_p.
struct GlobalExistenceResult {
    bool applicable = false;     // smallness condition held with empirical C
    double empirical_C = 0.0;
    double boundary_mass = 0.0;  // empirical Eq-3.9 boundary for these params
    double max_norm_ratio = 0.0;
    bool any_blowup = false;
    std::uint64_t offending_stream = 0;
    SeriesStat mass_stat;
    bool passed(double tol = 1e-2) const {
        return applicable && !any_blowup && max_norm_ratio <= 1.0 + tol;
    }
};

GlobalExistenceResult run_global_existence(const ExperimentBase& base, double sigma,
                                           double horizon);

/// Theorem 4.2 / 4.6 experiment: firing times against T*.
struct SupercriticalResult {
    double threshold_mass = 0.0;
    double t_star = 0.0;
    std::vector<double> firing_times;  // one per path; inf if never fired
    double fired_fraction = 0.0;       // fired before T*
    double median_firing_time = 0.0;
};

SupercriticalResult run_supercritical(const ExperimentBase& base, const NoiseSpec& noise,
                                      double horizon_factor = 1.5);

/// Theorem 4.7 experiment: blowup-or-contradiction fraction before t2 versus
/// the 1/2 p_{alpha,beta} floor from the best (alpha, beta) on the grid.
struct AnyMassBlowupResult {
    double best_alpha = 0.0, best_beta = 0.0;
    double t2 = 0.0;
    double p_ab = 0.0;           // closed-form event probability
    double floor_half_p = 0.0;   // p_ab / 2
    int blowups = 0;             // numerical cap before t2
    int contradictions = 0;      // oracle M(t) <= 0 before t2
    double observed_fraction = 0.0;
    double std_error = 0.0;
};

AnyMassBlowupResult run_any_mass_blowup(const ExperimentBase& base, double sigma,
                                        const std::vector<double>& alpha_grid,
                                        const std::vector<double>& beta_grid);

/// Eq. 5.3 experiment: common-path coupled vanishing-noise sweep.
struct SmallPerturbationResult {
    std::vector<double> eps;
    std::vector<double> gap_mean;       // E sup_t ||rho_eps - rho*||_p^p
    std::vector<double> gap_se;
    std::vector<double> decrease_z;     // paired z-scores for successive eps
    double slope_pp = 0.0;              // log-log slope of the p-th power gap
    double slope_lp = 0.0;              // log-log slope of the Lp-metric gap
};

SmallPerturbationResult run_small_perturbation(const ExperimentBase& base,
                                               const std::vector<double>& eps_sweep,
                                               double horizon);

/// Corollary 3.4 experiment: gap ratio across initial-data separations.
struct ContinuousDependenceResult {
    std::vector<double> delta;      // relative initial-data gaps
    std::vector<double> ratio_mean; // E sup ||rho1-rho2||_p^p / ||diff0||_p^p
    std::vector<double> ratio_se;
};

ContinuousDependenceResult run_continuous_dependence(const ExperimentBase& base,
                                                     double sigma,
                                                     const std::vector<double>& delta_sweep,
                                                     double horizon);

/// Picard contraction measurement at two horizons.
struct PicardContractionResult {
    std::vector<double> distances;
    std::vector<double> ratios;
    double z_geometric = 0.0;  // geometric mean of the ratios
    bool diverged = false;
};

PicardContractionResult run_picard(const ExperimentBase& base, double sigma,
                                   double horizon, int iterations);

/// Particle system versus the PDE on one common setup.
struct ParticleChaosResult {
    std::vector<double> times;
    std::vector<double> second_moment_gap_rel;  // |M_N - M_pde| / M_pde
    std::vector<double> l2_distance;
    double max_moment_gap_rel = 0.0;
};

ParticleChaosResult run_particle_chaos(const ExperimentBase& base, int particle_count,
                                       double bandwidth, double delta, double horizon,
                                       std::uint64_t seed_offset = 0);

/// Probe set used to instantiate the empirical C_p: a few Gaussians of
/// different widths plus an offset and a two-bump profile.
std::vector<Field> default_probe_set(const DomainSpec& domain);

/// Empirical Eq-3.9 mass boundary sqrt(C (nu^2 p (p-1)/2 - chi)/chi) for the
/// given params, using probe exponent max(p, 3) for the constant.
double smallness_boundary_mass(const DomainSpec& domain, const ModelParams& params,
                               KernelKind kernel);

}  // namespace sks
