#pragma once

#include <random>
#include <vector>

#include "sks/domain.hpp"

namespace sks {

/// Microscopic interacting system: N particles in the periodic box with
/// pairwise attraction matched to -chi grad G, idiosyncratic Brownian kicks
/// matched to the a^2/2 heat flow, and an optional common Brownian kick
/// shared by all particles (the transport-noise analogue).
struct ParticleState {
    std::vector<double> x, y;
    double t = 0.0;

    int count() const { return static_cast<int>(x.size()); }
};

struct ParticleConfig {
    DomainSpec domain;
    int count = 1000;
    double dt = 1e-3;
    double chi = 1.0;
    double a = 1.0;            // idiosyncratic amplitude (per-axis kick a sqrt(dt))
    double m0 = 1.0;           // total carried mass; each particle holds m0/N
    double delta = 0.05;       // desingularization radius of the log kernel
    double common_sigma = 0.0; // shared kick amplitude; 0 disables
    bool n_minus_one = true;   // 1/(N-1) pair normalization (1/N otherwise)

    void validate() const;
};

/// Particles drawn from the Gaussian cloud matching make_gaussian_field.
ParticleState init_gaussian_cloud(const ParticleConfig& cfg, double s,
                                  std::mt19937_64& engine);

/// One Euler-Maruyama step. dW_common (2 entries) is consumed only when
/// common_sigma != 0; the shared kick enters as -sigma dW, matching the PDE
/// transport sign convention (rho(x,t) = ... (x + sigma W)).
void particle_step(ParticleState& state, const ParticleConfig& cfg,
                   std::mt19937_64& engine, const double* dW_common = nullptr);

/// Pairwise drift alone (m0/(N-1) sum grad K_delta), exposed for tests.
void particle_drift(const ParticleState& state, const ParticleConfig& cfg,
                    std::vector<double>& fx, std::vector<double>& fy);

/// Gaussian kernel-density estimate on the grid with total mass m0:
/// nearest-node deposit followed by spectral smoothing with
/// exp(-|k|^2 h^2 / 2). Bandwidth should be at least ~2 dx.
Field empirical_density(const ParticleState& state, const ParticleConfig& cfg,
                        double bandwidth);

/// Empirical second moment (m0/N) sum |X_i|^2 about the box center.
double particle_second_moment(const ParticleState& state, const ParticleConfig& cfg);

struct ChaosGap {
    std::vector<double> times;
    std::vector<double> l2_distance;
    std::vector<double> second_moment_gap;  // |M_N - M_pde|
};

/// Time series of the L2 distance between the KDE and the PDE field plus the
/// second-moment difference; both inputs on matching time grids.
ChaosGap chaos_gap(const std::vector<double>& times,
                   const std::vector<Field>& kde_fields,
                   const std::vector<Field>& pde_fields,
                   const std::vector<double>& particle_moments);

}  // namespace sks
