#pragma once

#include <vector>

#include "sks/domain.hpp"
#include "sks/spectral.hpp"

namespace sks {

/// Green kernel for the concentration equation.
/// Newtonian solves -Lap c = rho (symbol 1/|k|^2, zero mode dropped);
/// Bessel solves (I - Lap) c = rho (symbol 1/(1+|k|^2)).
enum class KernelKind { Newtonian, Bessel };

struct PotentialField {
    Field c;
    Field grad_x;
    Field grad_y;
};

/// Computes c = G * rho and grad c by Fourier multiplication.
/// The Newtonian variant drops the k=0 mode of rho before inversion
/// (neutralizing-background convention on the periodic box).
class PotentialSolver {
  public:
    explicit PotentialSolver(const DomainSpec& domain) : ws_(domain) {}

    PotentialField solve(const Field& rho, KernelKind kernel);

    /// Spectral-space variant used by the time stepper: fills grad c from an
    /// already transformed source. rho_hat is the unnormalized r2c spectrum.
    void gradient_from_spectrum(const SpectralWorkspace::Spectrum& rho_hat,
                                KernelKind kernel, Field& grad_x, Field& grad_y);

    SpectralWorkspace& workspace() { return ws_; }

  private:
    SpectralWorkspace ws_;
    SpectralWorkspace::Spectrum rho_hat_, c_hat_, tmp_;
};

/// Empirical lower estimate of C_p in the gradient bound
/// ||grad (G*rho)||_inf <= C_p ||rho||_p, taken as the max ratio over the
/// probe set. Requires p > 2 (the Sobolev embedding behind the bound).
/// Probes with zero norm are skipped; throws if all are skipped.
double estimate_Cp(PotentialSolver& solver, KernelKind kernel, double p,
                   const std::vector<Field>& probes);

}  // namespace sks
