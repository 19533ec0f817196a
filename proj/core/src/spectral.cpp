#include "sks/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace sks {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct SpectralWorkspace::Impl {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    Impl(int n) {
        std::lock_guard<std::mutex> lock(plan_mutex());
        real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
        cplx = fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
        // FFTW_ESTIMATE keeps plans deterministic (no timing-dependent choices),
        // which the byte-identical rerun contract relies on.
        fwd = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
    }
    ~Impl() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
};

SpectralWorkspace::SpectralWorkspace(const DomainSpec& domain)
    : domain_(domain), impl_(std::make_unique<Impl>(domain.n)) {
    domain_.validate();
    const int n = domain_.n;
    const int nkx = n / 2 + 1;
    const double dk = M_PI / domain_.half_width;  // 2*pi / (2L)

    kx_.resize(nkx);
    for (int j = 0; j < nkx; ++j) kx_[j] = dk * j;
    ky_.resize(n);
    for (int i = 0; i < n; ++i) ky_[i] = dk * (i <= n / 2 ? i : i - n);

    k2_.resize(spectrum_size());
    dealias_mask_.resize(spectrum_size());
    deriv_x_.resize(spectrum_size());
    deriv_y_.resize(spectrum_size());
    const double kmax = dk * (n / 2);
    const double kcut = (2.0 / 3.0) * kmax;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < nkx; ++j) {
            std::size_t idx = static_cast<std::size_t>(i) * nkx + j;
            k2_[idx] = kx_[j] * kx_[j] + ky_[i] * ky_[i];
            dealias_mask_[idx] =
                (std::abs(kx_[j]) <= kcut && std::abs(ky_[i]) <= kcut) ? 1 : 0;
            deriv_x_[idx] = (j == n / 2) ? 0.0 : kx_[j];
            deriv_y_[idx] = (i == n / 2) ? 0.0 : ky_[i];
        }
    }
}

SpectralWorkspace::~SpectralWorkspace() = default;

void SpectralWorkspace::forward(const Field& f, Spectrum& out) {
    out.resize(spectrum_size());
    std::memcpy(impl_->real, f.values.data(), f.values.size() * sizeof(double));
    fftw_execute(impl_->fwd);
    std::memcpy(out.data(), impl_->cplx, spectrum_size() * sizeof(fftw_complex));
}

void SpectralWorkspace::inverse(const Spectrum& in, Field& out) {
    if (out.values.size() != domain_.size()) out = Field(domain_);
    std::memcpy(impl_->cplx, in.data(), spectrum_size() * sizeof(fftw_complex));
    fftw_execute(impl_->bwd);
    const double norm = 1.0 / (static_cast<double>(domain_.n) * domain_.n);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = impl_->real[i] * norm;
}

void SpectralWorkspace::derivative_x(const Spectrum& in, Spectrum& out) const {
    out.resize(spectrum_size());
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = std::complex<double>(0.0, deriv_x_[i]) * in[i];
}

void SpectralWorkspace::derivative_y(const Spectrum& in, Spectrum& out) const {
    out.resize(spectrum_size());
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = std::complex<double>(0.0, deriv_y_[i]) * in[i];
}

void SpectralWorkspace::apply_dealias(Spectrum& s) const {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!dealias_mask_[i]) s[i] = 0.0;
}

}  // namespace sks
