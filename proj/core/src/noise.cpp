#include "sks/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sks {

BrownianPath BrownianPath::sample(int components, double dt, int steps,
                                  std::mt19937_64& engine) {
    if (components < 1) throw std::invalid_argument("BrownianPath: components >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("BrownianPath: dt must be > 0");
    BrownianPath p;
    p.dt_ = dt;
    p.components_ = components;
    p.steps_ = steps;
    p.increments_.resize(static_cast<std::size_t>(steps) * components);
    std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
    for (double& v : p.increments_) v = gauss(engine);
    p.rebuild_values();
    return p;
}

BrownianPath BrownianPath::refined_half(std::mt19937_64& engine) const {
    BrownianPath p;
    p.dt_ = dt_ / 2.0;
    p.components_ = components_;
    p.steps_ = steps_ * 2;
    p.increments_.resize(increments_.size() * 2);
    // Midpoint of a bridge over [t, t+dt]: N(dW/2, dt/4).
    std::normal_distribution<double> gauss(0.0, std::sqrt(dt_) / 2.0);
    for (int s = 0; s < steps_; ++s) {
        for (int c = 0; c < components_; ++c) {
            double dw = increment(s, c);
            double first = 0.5 * dw + gauss(engine);
            p.increments_[static_cast<std::size_t>(2 * s) * components_ + c] = first;
            p.increments_[static_cast<std::size_t>(2 * s + 1) * components_ + c] = dw - first;
        }
    }
    p.rebuild_values();
    return p;
}

void BrownianPath::rebuild_values() {
    values_.assign(static_cast<std::size_t>(steps_ + 1) * components_, 0.0);
    for (int s = 0; s < steps_; ++s)
        for (int c = 0; c < components_; ++c)
            values_[static_cast<std::size_t>(s + 1) * components_ + c] =
                values_[static_cast<std::size_t>(s) * components_ + c] + increment(s, c);
}

double BrownianPath::value_at(double t, int c) const {
    if (t <= 0.0) return 0.0;
    double u = t / dt_;
    int s = std::min(static_cast<int>(u), steps_ - 1);
    double frac = u - s;
    if (frac <= 0.0) return value(s, c);
    return value(s, c) + std::min(frac, 1.0) * increment(s, c);
}

double PhiMap::operator()(double rho) const {
    switch (kind) {
        case Kind::Linear: return sigma * rho;
        case Kind::BoundedLinear: return sigma * rho / (1.0 + rho / rho_cap);
        case Kind::Table: {
            if (rho <= xs.front()) return ys.front();
            if (rho >= xs.back()) return ys.back();
            auto it = std::upper_bound(xs.begin(), xs.end(), rho);
            std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
            double t = (rho - xs[i]) / (xs[i + 1] - xs[i]);
            return ys[i] + t * (ys[i + 1] - ys[i]);
        }
    }
    return 0.0;
}

double PhiMap::derivative(double rho) const {
    switch (kind) {
        case Kind::Linear: return sigma;
        case Kind::BoundedLinear: {
            double u = 1.0 + rho / rho_cap;
            return sigma / (u * u);
        }
        case Kind::Table: {
            if (rho <= xs.front() || rho >= xs.back()) return 0.0;
            auto it = std::upper_bound(xs.begin(), xs.end(), rho);
            std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
            return (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
    }
    return 0.0;
}

PhiMap PhiMap::table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("PhiMap::table: need >= 2 matching points");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::invalid_argument("PhiMap::table: xs must be increasing");
    PhiMap m;
    m.kind = Kind::Table;
    m.xs = std::move(xs);
    m.ys = std::move(ys);
    return m;
}

double NoiseSpec::alpha_sq_sum() const {
    double s = 0.0;
    for (const Mode& m : modes) s += m.alpha * m.alpha;
    return s;
}

NoiseSpec NoiseSpec::divergence(double sigma) {
    NoiseSpec s;
    s.regime = Regime::DivergenceType;
    s.sigma = sigma;
    return s;
}

NoiseSpec NoiseSpec::general(std::vector<Mode> modes, PhiMap phi) {
    if (modes.empty()) throw std::invalid_argument("NoiseSpec::general: need >= 1 mode");
    NoiseSpec s;
    s.regime = Regime::GeneralType;
    s.modes = std::move(modes);
    s.phi = phi;
    for (const Mode& m : s.modes)
        if (sup_norm(m.e) > 1.0 + 1e-12)
            throw std::invalid_argument("NoiseSpec::general: modes must have ||e||_inf <= 1");
    return s;
}

std::vector<NoiseSpec::Mode> make_fourier_basis(const DomainSpec& domain, int N,
                                                double alpha0) {
    if (N < 1) throw std::invalid_argument("make_fourier_basis: N >= 1");
    domain.validate();
    const double kappa = M_PI / domain.half_width;  // fundamental wavenumber

    // Enumerate (mx,my,phase) by increasing frequency; phase 0 = cos, 1 = sin.
    struct Entry { int mx, my, px, py; };
    std::vector<Entry> entries;
    entries.push_back({0, 0, 0, 0});  // constant mode
    for (int ring = 1; static_cast<int>(entries.size()) < N && ring <= 64; ++ring) {
        std::vector<Entry> shell;
        for (int mx = 0; mx <= ring; ++mx) {
            for (int my = 0; my <= ring; ++my) {
                if (std::max(mx, my) != ring) continue;
                for (int px = 0; px < 2; ++px) {
                    for (int py = 0; py < 2; ++py) {
                        if (mx == 0 && px == 1) continue;  // sin(0) = 0
                        if (my == 0 && py == 1) continue;
                        if (mx == 0 && my == 0) continue;
                        shell.push_back({mx, my, px, py});
                    }
                }
            }
        }
        std::sort(shell.begin(), shell.end(), [](const Entry& a, const Entry& b) {
            int fa = a.mx * a.mx + a.my * a.my, fb = b.mx * b.mx + b.my * b.my;
            if (fa != fb) return fa < fb;
            return std::tie(a.mx, a.my, a.px, a.py) < std::tie(b.mx, b.my, b.px, b.py);
        });
        for (const Entry& e : shell) entries.push_back(e);
    }
    entries.resize(N);

    std::vector<NoiseSpec::Mode> modes;
    modes.reserve(N);
    for (int k = 0; k < N; ++k) {
        const Entry& e = entries[k];
        Field f(domain);
        for (int iy = 0; iy < domain.n; ++iy) {
            double uy = kappa * e.my * domain.coord(iy);
            double fy = e.py == 0 ? std::cos(uy) : std::sin(uy);
            for (int ix = 0; ix < domain.n; ++ix) {
                double ux = kappa * e.mx * domain.coord(ix);
                double fx = e.px == 0 ? std::cos(ux) : std::sin(ux);
                f.at(ix, iy) = fx * fy;
            }
        }
        modes.push_back({alpha0 / (k + 1), std::move(f)});
    }
    return modes;
}

std::vector<double> sample_increments(const NoiseSpec& spec, double dt,
                                      std::mt19937_64& engine) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increments: dt must be > 0");
    std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
    std::vector<double> dW(spec.components());
    for (double& v : dW) v = gauss(engine);
    return dW;
}

Field noise_term(const NoiseSpec& spec, const Field& rho, const Field& grad_rho_x,
                 const Field& grad_rho_y, const std::vector<double>& dW) {
    if (spec.regime == NoiseSpec::Regime::DivergenceType) {
        if (dW.size() != 2)
            throw std::invalid_argument("noise_term: divergence regime needs 2 increments");
        Field out(rho.domain);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = spec.sigma * (grad_rho_x.values[i] * dW[0] +
                                          grad_rho_y.values[i] * dW[1]);
        return out;
    }
    return general_noise_term(spec, rho, dW);
}

Field general_noise_term(const NoiseSpec& spec, const Field& rho,
                         const std::vector<double>& dW) {
    if (dW.size() != spec.modes.size())
        throw std::invalid_argument("noise_term: increment count != mode count");
    Field out(rho.domain);
    for (std::size_t k = 0; k < spec.modes.size(); ++k) {
        const NoiseSpec::Mode& m = spec.modes[k];
        double w = m.alpha * dW[k];
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += m.e.values[i] * w;
    }
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] *= spec.phi(rho.values[i]);
    return out;
}

Field milstein_correction(const NoiseSpec& spec, const Field& rho,
                          const std::vector<double>& dW, double dt) {
    Field out(rho.domain);
    if (spec.regime == NoiseSpec::Regime::DivergenceType) return out;
    std::vector<double> A(rho.values.size(), 0.0);  // sum alpha_k e_k dW_k
    std::vector<double> B(rho.values.size(), 0.0);  // sum alpha_k^2 e_k^2
    for (std::size_t k = 0; k < spec.modes.size(); ++k) {
        const NoiseSpec::Mode& m = spec.modes[k];
        double w = m.alpha * dW[k];
        double a2 = m.alpha * m.alpha;
        for (std::size_t i = 0; i < A.size(); ++i) {
            A[i] += m.e.values[i] * w;
            B[i] += a2 * m.e.values[i] * m.e.values[i];
        }
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double r = rho.values[i];
        out.values[i] = 0.5 * spec.phi.derivative(r) * spec.phi(r) *
                        (A[i] * A[i] - dt * B[i]);
    }
    return out;
}

}  // namespace sks
