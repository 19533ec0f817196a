#pragma once

#include <random>
#include <vector>

#include "sks/domain.hpp"

namespace sks {

/// Scalar Wiener paths on a uniform time grid, stored as increments
/// (variance dt each, independent across steps and components).
class BrownianPath {
  public:
    BrownianPath() = default;

    static BrownianPath sample(int components, double dt, int steps,
                               std::mt19937_64& engine);

    /// Brownian-bridge refinement: halves dt, doubling the step count.
    /// Values at the coarse grid times are preserved exactly.
    BrownianPath refined_half(std::mt19937_64& engine) const;

    int components() const { return components_; }
    int steps() const { return steps_; }
    double dt() const { return dt_; }
    double horizon() const { return dt_ * steps_; }

    /// Increment of component c over [step*dt, (step+1)*dt).
    double increment(int step, int c) const {
        return increments_[static_cast<std::size_t>(step) * components_ + c];
    }
    /// W_c(step*dt); step in [0, steps].
    double value(int step, int c) const {
        return values_[static_cast<std::size_t>(step) * components_ + c];
    }
    /// Linear interpolation of W_c at arbitrary t in [0, horizon].
    double value_at(double t, int c) const;

  private:
    void rebuild_values();

    double dt_ = 0.0;
    int components_ = 0;
    int steps_ = 0;
    std::vector<double> increments_;  // step-major
    std::vector<double> values_;      // (steps+1) x components, W(0)=0
};

/// Lipschitz amplitude map for the general-noise regime.
struct PhiMap {
    enum class Kind { Linear, BoundedLinear, Table };
    Kind kind = Kind::Linear;
    double sigma = 0.0;    // Linear: sigma*rho; BoundedLinear: sigma*rho/(1+rho/cap)
    double rho_cap = 1.0;  // BoundedLinear saturation scale
    std::vector<double> xs, ys;  // Table: piecewise linear, clamped outside

    double operator()(double rho) const;
    double derivative(double rho) const;

    static PhiMap linear(double sigma) { return {Kind::Linear, sigma, 1.0, {}, {}}; }
    static PhiMap bounded_linear(double sigma, double cap) {
        return {Kind::BoundedLinear, sigma, cap, {}, {}};
    }
    static PhiMap table(std::vector<double> xs, std::vector<double> ys);
};

/// Stochastic forcing description for both regimes.
/// DivergenceType: sigma * grad(rho) . dW with a 2-component Wiener process.
/// GeneralType: Phi(rho) * sum_k alpha_k e_k dW_k.
struct NoiseSpec {
    enum class Regime { DivergenceType, GeneralType };

    struct Mode {
        double alpha;
        Field e;  // sup-normalized to ||e||_inf = 1
    };

    Regime regime = Regime::DivergenceType;
    double sigma = 0.0;        // divergence-type amplitude
    std::vector<Mode> modes;   // general-type expansion
    PhiMap phi;

    int components() const {
        return regime == Regime::DivergenceType ? 2 : static_cast<int>(modes.size());
    }
    /// sum of alpha_k^2 (finite mode count stands in for the summability
    /// requirement; the tail mass beyond the truncation is what got dropped).
    double alpha_sq_sum() const;

    static NoiseSpec divergence(double sigma);
    static NoiseSpec general(std::vector<Mode> modes, PhiMap phi);
};

/// First N real Fourier modes on the box, sup-normalized, ordered by
/// increasing frequency; weight alpha_k = alpha0 / k. Mode 1 is constant.
std::vector<NoiseSpec::Mode> make_fourier_basis(const DomainSpec& domain, int N,
                                                double alpha0 = 1.0);

/// One N(0, dt) draw per scalar Wiener component. Rejects dt <= 0.
std::vector<double> sample_increments(const NoiseSpec& spec, double dt,
                                      std::mt19937_64& engine);

/// Evaluates the forcing for the given increments:
/// DivergenceType -> sigma*(grad_x dW1 + grad_y dW2);
/// GeneralType    -> Phi(rho) * sum alpha_k e_k dW_k.
Field noise_term(const NoiseSpec& spec, const Field& rho, const Field& grad_rho_x,
                 const Field& grad_rho_y, const std::vector<double>& dW);

/// General-regime forcing only (no gradients involved).
Field general_noise_term(const NoiseSpec& spec, const Field& rho,
                         const std::vector<double>& dW);

/// Milstein correction for the general regime (commutative multiplicative
/// noise): 0.5 * Phi'(rho) Phi(rho) * [ (sum alpha_k e_k dW_k)^2
///                                      - dt * sum alpha_k^2 e_k^2 ].
/// Zero field for the divergence regime.
Field milstein_correction(const NoiseSpec& spec, const Field& rho,
                          const std::vector<double>& dW, double dt);

}  // namespace sks
