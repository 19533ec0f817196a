#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sks {

/// Uniform periodic grid on the square box [-L, L)^2 with n points per axis.
/// n must be a power of two (>= 16) so the spectral transforms are fast.
struct DomainSpec {
    double half_width = 10.0;  // L
    int n = 128;               // grid points per axis

    DomainSpec() = default;
    DomainSpec(double L, int n_) : half_width(L), n(n_) { validate(); }

    void validate() const {
        if (!(half_width > 0.0)) throw std::invalid_argument("DomainSpec: L must be > 0");
        if (n < 16 || (n & (n - 1)) != 0)
            throw std::invalid_argument("DomainSpec: n must be a power of two >= 16");
    }

    double dx() const { return 2.0 * half_width / n; }
    double cell_area() const { return dx() * dx(); }
    /// Node coordinate along either axis, i in [0, n).
    double coord(int i) const { return -half_width + dx() * i; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }

    bool operator==(const DomainSpec& o) const {
        return half_width == o.half_width && n == o.n;
    }
};

/// Scalar density sampled on the grid, row-major with x fastest:
/// values[iy*n + ix] = rho(x_ix, y_iy). Units are mass / area.
struct Field {
    DomainSpec domain;
    std::vector<double> values;

    Field() = default;
    explicit Field(const DomainSpec& d) : domain(d), values(d.size(), 0.0) {}
    Field(const DomainSpec& d, double fill) : domain(d), values(d.size(), fill) {}

    double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * domain.n + ix]; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * domain.n + ix]; }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double c);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);

/// Physical constants of the model. The divergence-form split requires
/// nu^2 = a^2 - sigma^2 > 0; general-noise runs only constrain a > 0.
struct ModelParams {
    double a = 1.0;      // diffusion amplitude, total diffusion is a^2/2
    double sigma = 0.0;  // noise amplitude
    double chi = 1.0;    // chemotactic sensitivity, > 0
    double p = 2.0;      // norm exponent, >= 2

    double nu_sq() const { return a * a - sigma * sigma; }
    double nu() const;

    void validate_common() const;
    /// Additionally enforces nu^2 = a^2 - sigma^2 > 0.
    void validate_divergence() const;
};

/// Seed and stream id; one independent stream per ensemble path.
/// Identical (seed, stream) reproduces bit-identical draws.
struct RngContext {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Deterministic engine for this (seed, stream) pair.
    std::mt19937_64 engine() const;
    /// Sub-engine for a named purpose (e.g. bridge refinement level).
    std::mt19937_64 engine(std::uint64_t salt) const;
};

/// rho0(x) = m0/(2 pi s^2) exp(-|x-c|^2 / (2 s^2)) sampled on the grid.
/// Requires s <= L/6 so the periodic truncation error stays below 1e-8
/// relative in the discrete mass.
Field make_gaussian_field(const DomainSpec& domain, double m0, double s,
                          double cx = 0.0, double cy = 0.0);

/// Discrete integral: sum(values) * dx^2.
double mass(const Field& f);

/// (sum |values|^p * dx^2)^(1/p), p >= 1.
double lp_norm(const Field& f, double p);

double sup_norm(const Field& f);
double min_value(const Field& f);
bool all_finite(const Field& f);

/// Clips values in (-tol, 0) to zero and returns the clipped mass
/// (positive number added to the integral). Values <= -tol are left alone;
/// the caller decides whether that is a hard failure.
double clip_small_negatives(Field& f, double tol);

}  // namespace sks
