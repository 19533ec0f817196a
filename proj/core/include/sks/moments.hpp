#pragma once

#include <optional>
#include <random>

#include "sks/domain.hpp"
#include "sks/noise.hpp"

namespace sks {

/// Closed-form scalar oracles for the mass and second-moment SDEs driven by
/// one scalar Wiener path (component 0 of the stored path). Pathwise time
/// integrals use trapezoidal quadrature on the path grid.
class MomentOracle {
  public:
    MomentOracle(double m0, double M0, const ModelParams& params,
                 const BrownianPath* path);

    double m0() const { return m0_; }
    double M0() const { return M0_; }

    /// m(t) = m0 exp(-sigma^2 t/2 + sigma W(t)), the Ito solution of
    /// dm = sigma m dW. (The printed solution in the source carries the
    /// opposite sign on the drift; the Ito one is what the comparison
    /// identities require.)
    double exact_mass(double t) const;

    /// M(t) = Psi(t) (M0 + 2 a^2 m0 t - (chi m0^2 / 2pi) int_0^t Psi(s) ds),
    /// Psi(t) = exp(-sigma^2 t/2 + sigma W(t)).
    double exact_second_moment(double t) const;

    /// Same with the + sign on the nonlocal term: the supersolution u+(t).
    double supersolution_u_plus(double t) const;

    /// First path-grid time at which the closed-form M(t) is <= 0, if any,
    /// up to horizon t (the positivity contradiction).
    std::optional<double> first_contradiction_time(double t) const;

  private:
    double psi(double t) const;
    double int_psi(double t) const;  // trapezoid of Psi up to t

    double m0_, M0_;
    ModelParams params_;
    const BrownianPath* path_;
    std::vector<double> int_psi_grid_;  // cumulative trapezoid at grid times
};

struct BrownianEventSpec {
    double alpha = 0.0;
    double beta = 0.0;
    double horizon = 0.0;  // t

    void validate() const;
};

struct EventProbability {
    double mc_estimate = 0.0;
    double mc_std_error = 0.0;
    double closed_form = 0.0;
};

/// Eq-3.9-style smallness test, evaluated literally:
/// C (-nu^2 p (p-1)/2 + chi) m0^{-p/(p-1)} + chi m0^{(p-2)/(p-1)} <= 0.
bool smallness_condition(double m0, const ModelParams& params, double C);

/// chi/(2 pi) m0 > 2 (nu^2 + sigma^2).
bool blowup_mass_condition(double m0, const ModelParams& params);

/// T* = M0 / ((chi/2pi) m0^2 - 2 (nu^2+sigma^2) m0); requires the mass
/// condition, throws otherwise.
double blowup_time_bound(double m0, double M0, const ModelParams& params);

/// Smallest t2 with
/// M0 + 2 a^2 m0 t2 + chi m0^2/(sigma alpha e^{sigma beta} 2 pi)
///   <= (chi m0^2/(sigma alpha 2 pi)) e^{sigma (alpha t2 - beta)},
/// found by bracketing and bisection to 1e-8 relative. Throws if no root
/// below t_max.
double t2_min(double m0, double M0, const ModelParams& params, double alpha,
              double beta, double t_max = 1e4);

/// P(W(s) >= (sigma/2 + alpha) s - beta for all s in [0, t]):
/// Monte Carlo over discretized paths plus the reflection-formula value for
/// a drifted Brownian motion staying above the linear boundary.
EventProbability brownian_event_probability(const BrownianEventSpec& spec, double sigma,
                                            int mc_paths, int mc_steps,
                                            std::mt19937_64& engine);

/// Closed form only (no sampling).
double brownian_event_probability_closed(const BrownianEventSpec& spec, double sigma);

/// P(I u II) >= max{z, p - z}, minimized at z = p/2.
double blowup_probability_lower_bound(double p_ab);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace sks
