#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sks/domain.hpp"
#include "sks/noise.hpp"
#include "sks/potential.hpp"
#include "sks/spectral.hpp"

namespace sks {

enum class Stepping { SemiImplicitSpectral, Explicit };

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    KernelKind kernel = KernelKind::Newtonian;
    Stepping stepping = Stepping::SemiImplicitSpectral;
    bool dealias = true;

    /// Absolute sup-norm cap; if 0 it is derived as cap_factor * sup(rho0).
    double blowup_cap = 0.0;
    double blowup_cap_factor = 1e4;

    /// Negative values in (-tol_rel*sup, 0) are clipped to zero and logged.
    /// A value below -tol_rel*sup ends the run: as a numerical blowup when the
    /// field has already grown past growth_factor*sup(rho0) (under-resolved
    /// collapse), as an internal error otherwise.
    double positivity_tol_rel = 1e-10;
    double blowup_growth_factor = 10.0;

    /// Milstein correction on the general-regime noise term. The mass
    /// moment-SDE comparisons need strong order 1; plain Euler-Maruyama is
    /// order 1/2 on multiplicative noise.
    bool milstein = true;

    void validate(const DomainSpec& domain, const ModelParams& params) const;
};

struct SolverState {
    double t = 0.0;
    Field rho;
    int step_index = 0;
    bool blown_up = false;
    std::optional<double> blowup_time;
    bool internal_error = false;
    std::string error_message;
    double clipped_mass = 0.0;  // cumulative mass added by clipping
    double sup0 = 0.0;          // sup norm of the initial condition
    double cap = 0.0;           // resolved absolute cap

    bool running() const { return !blown_up && !internal_error; }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;

    std::size_t size() const { return times.size(); }
};

/// Pseudospectral stepper for both noise regimes, the deterministic limit
/// and the frozen-transport linearized equation. The advective flux
/// chi*div(rho grad c) is explicit with 2/3-rule dealiasing.
///
/// Divergence regime: the linear subproblem (nu^2/2 heat + sigma grad rho.dW
/// transport, nu^2 = a^2 - sigma^2) is propagated by its exact one-step
/// factor exp(-nu^2 |k|^2 dt/2 + i sigma k.dW). A truncated Euler-Maruyama
/// factor would shed O((sigma |k| |dW|)^2) dispersive tail undershoots that
/// break the positivity tolerance and leak clipped mass; the exact factor
/// conserves mass identically and keeps the field nonnegative to spectral
/// truncation error.
///
/// General regime: a^2/2 diffusion by integrating factor, the noise term
/// Phi(rho) sum alpha_k e_k dW_k explicit Euler-Maruyama with an optional
/// Milstein correction (strong order 1 on the mass moment).
class Solver {
  public:
    Solver(const DomainSpec& domain, const ModelParams& params,
           const NoiseSpec& noise, const SolverConfig& cfg);

    const DomainSpec& domain() const { return domain_; }
    const SolverConfig& config() const { return cfg_; }
    const ModelParams& params() const { return params_; }
    const NoiseSpec& noise() const { return noise_; }

    SolverState make_state(const Field& rho0) const;

    /// One step with the given increments (noise().components() of them).
    /// No-op if the state is not running.
    void step(SolverState& state, const double* dW);

    /// One step of the linearized equation with frozen transport field
    /// grad(G * xi) in place of grad(G * rho).
    void step_linear(SolverState& state, const Field& xi, const double* dW);

    /// Advances to cfg.t_end along the path (path.dt() must equal cfg.dt).
    /// The observer fires at t=0, every record_every steps (if > 0) and on
    /// the final/halting step.
    SolverState run(const Field& rho0, const BrownianPath& path,
                    const std::function<void(const SolverState&)>& observer = {},
                    int record_every = 0);

    /// All noise amplitudes zero.
    Trajectory solve_deterministic(const Field& rho0, int record_every = 1);

    /// Steps the linear equation against a frozen trajectory xi, which must
    /// carry one field per step of the time grid (record_every 1).
    Trajectory solve_linearized(const Trajectory& xi, const Field& rho0,
                                const BrownianPath& path, int record_every = 1);

    struct PicardResult {
        Trajectory trajectory;          // last iterate
        std::vector<double> distances;  // sup_t Lp distance between iterates
        std::vector<double> ratios;     // successive distance ratios
        bool diverged = false;
    };

    /// Fixed-point iteration xi^{n+1} = rho_{xi^n} from xi^0 == rho0
    /// (constant in time), reusing one Brownian path across iterations.
    PicardResult picard_iterate(const Field& rho0, const BrownianPath& path,
                                int iterations);

  private:
    void step_impl(SolverState& state, const Field* frozen_xi, const double* dW);
    void finish_step(SolverState& state, Field& candidate);

    DomainSpec domain_;
    ModelParams params_;
    NoiseSpec noise_;
    SolverConfig cfg_;
    PotentialSolver potential_;
    SpectralWorkspace::Spectrum rho_hat_, work_hat_, adv_hat_, xi_hat_;
    Field grad_cx_, grad_cy_, flux_, candidate_;
    std::vector<double> efactor_;
};

/// sup_t lp-distance between two trajectories on the same time grid.
double trajectory_distance(const Trajectory& A, const Trajectory& B, double p);

}  // namespace sks
