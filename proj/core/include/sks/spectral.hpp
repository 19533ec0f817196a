#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "sks/domain.hpp"

namespace sks {

/// FFT workspace for one grid size: plans, wavenumbers and scratch buffers.
/// Not thread-safe; use one workspace per thread. Creating workspaces from
/// several threads is safe (plan creation is serialized internally).
///
/// Spectral layout is FFTW r2c: ky runs over all n rows (with negative
/// frequencies wrapped), kx over the n/2+1 non-negative columns.
class SpectralWorkspace {
  public:
    using Spectrum = std::vector<std::complex<double>>;

    explicit SpectralWorkspace(const DomainSpec& domain);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const DomainSpec& domain() const { return domain_; }
    int n() const { return domain_.n; }
    int n_kx() const { return domain_.n / 2 + 1; }
    std::size_t spectrum_size() const { return static_cast<std::size_t>(n()) * n_kx(); }

    /// Unnormalized forward transform (FFTW convention).
    void forward(const Field& f, Spectrum& out);
    /// Inverse transform including the 1/n^2 normalization.
    void inverse(const Spectrum& in, Field& out);

    double kx(int j) const { return kx_[j]; }
    double ky(int i) const { return ky_[i]; }
    double k_squared(std::size_t idx) const { return k2_[idx]; }
    const std::vector<double>& k_squared() const { return k2_; }

    /// d/dx and d/dy as spectral multipliers; Nyquist modes are zeroed.
    void derivative_x(const Spectrum& in, Spectrum& out) const;
    void derivative_y(const Spectrum& in, Spectrum& out) const;

    /// Signed wavenumbers with the Nyquist modes zeroed (the derivative and
    /// translation multipliers).
    double deriv_kx(std::size_t idx) const { return deriv_x_[idx]; }
    double deriv_ky(std::size_t idx) const { return deriv_y_[idx]; }

    /// Zeroes modes with |kx| or |ky| above two thirds of the Nyquist
    /// wavenumber (2/3 rule for quadratic nonlinearities).
    void apply_dealias(Spectrum& s) const;

    Spectrum make_spectrum() const { return Spectrum(spectrum_size()); }

  private:
    DomainSpec domain_;
    std::vector<double> kx_, ky_, k2_;
    std::vector<unsigned char> dealias_mask_;
    std::vector<double> deriv_x_, deriv_y_;  // signed k values, Nyquist zeroed

    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sks
