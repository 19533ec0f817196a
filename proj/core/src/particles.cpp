#include "sks/particles.hpp"

#include <cmath>
#include <stdexcept>

#include "sks/diagnostics.hpp"
#include "sks/spectral.hpp"

namespace sks {

void ParticleConfig::validate() const {
    domain.validate();
    if (count < 2) throw std::invalid_argument("ParticleConfig: N >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("ParticleConfig: dt > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("ParticleConfig: delta > 0");
    if (common_sigma != 0.0 && !(a * a - common_sigma * common_sigma > 0.0))
        throw std::invalid_argument("ParticleConfig: common noise needs a^2 - sigma^2 > 0");
}

namespace {
inline double wrap_coord(double v, double L) {
    // into [-L, L)
    double two_l = 2.0 * L;
    v = std::fmod(v + L, two_l);
    if (v < 0.0) v += two_l;
    return v - L;
}
inline double min_image(double d, double L) {
    double two_l = 2.0 * L;
    if (d > L) d -= two_l;
    else if (d < -L) d += two_l;
    return d;
}
}  // namespace

ParticleState init_gaussian_cloud(const ParticleConfig& cfg, double s,
                                  std::mt19937_64& engine) {
    cfg.validate();
    if (!(s > 0.0)) throw std::invalid_argument("init_gaussian_cloud: width > 0");
    ParticleState st;
    st.x.resize(cfg.count);
    st.y.resize(cfg.count);
    std::normal_distribution<double> gauss(0.0, s);
    double L = cfg.domain.half_width;
    for (int i = 0; i < cfg.count; ++i) {
        st.x[i] = wrap_coord(gauss(engine), L);
        st.y[i] = wrap_coord(gauss(engine), L);
    }
    return st;
}

void particle_drift(const ParticleState& state, const ParticleConfig& cfg,
                    std::vector<double>& fx, std::vector<double>& fy) {
    const int N = state.count();
    fx.assign(N, 0.0);
    fy.assign(N, 0.0);
    const double L = cfg.domain.half_width;
    const double d2 = cfg.delta * cfg.delta;
    const double norm = cfg.m0 / (cfg.n_minus_one ? N - 1 : N);
    const double pref = -cfg.chi / (2.0 * M_PI) * norm;
    // Antisymmetric pairwise accumulation: the total drift sums to zero
    // exactly, so the centroid moves only by noise.
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            double dx = min_image(state.x[i] - state.x[j], L);
            double dy = min_image(state.y[i] - state.y[j], L);
            double w = pref / (dx * dx + dy * dy + d2);
            fx[i] += w * dx;
            fy[i] += w * dy;
            fx[j] -= w * dx;
            fy[j] -= w * dy;
        }
    }
}

void particle_step(ParticleState& state, const ParticleConfig& cfg,
                   std::mt19937_64& engine, const double* dW_common) {
    const int N = state.count();
    static thread_local std::vector<double> fx, fy;
    if (cfg.chi != 0.0) {
        particle_drift(state, cfg, fx, fy);
    } else {
        fx.assign(N, 0.0);
        fy.assign(N, 0.0);
    }
    double idio = cfg.common_sigma == 0.0
                      ? cfg.a
                      : std::sqrt(cfg.a * cfg.a - cfg.common_sigma * cfg.common_sigma);
    std::normal_distribution<double> kick(0.0, idio * std::sqrt(cfg.dt));
    double cx = 0.0, cy = 0.0;
    if (cfg.common_sigma != 0.0) {
        if (dW_common == nullptr)
            throw std::invalid_argument("particle_step: common noise needs increments");
        cx = -cfg.common_sigma * dW_common[0];
        cy = -cfg.common_sigma * dW_common[1];
    }
    const double L = cfg.domain.half_width;
    for (int i = 0; i < N; ++i) {
        double nx = state.x[i] + cfg.dt * fx[i] + kick(engine) + cx;
        double ny = state.y[i] + cfg.dt * fy[i] + kick(engine) + cy;
        if (!std::isfinite(nx) || !std::isfinite(ny))
            throw std::runtime_error("particle_step: non-finite position");
        state.x[i] = wrap_coord(nx, L);
        state.y[i] = wrap_coord(ny, L);
    }
    state.t += cfg.dt;
}

Field empirical_density(const ParticleState& state, const ParticleConfig& cfg,
                        double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("empirical_density: bandwidth > 0");
    const DomainSpec& d = cfg.domain;
    Field f(d);
    const double w = cfg.m0 / (state.count() * d.cell_area());
    const double inv_dx = 1.0 / d.dx();
    for (int i = 0; i < state.count(); ++i) {
        int ix = static_cast<int>(std::lround((state.x[i] + d.half_width) * inv_dx)) % d.n;
        int iy = static_cast<int>(std::lround((state.y[i] + d.half_width) * inv_dx)) % d.n;
        f.at(ix, iy) += w;
    }
    SpectralWorkspace ws(d);
    SpectralWorkspace::Spectrum hat;
    ws.forward(f, hat);
    for (std::size_t i = 0; i < hat.size(); ++i)
        hat[i] *= std::exp(-0.5 * ws.k_squared(i) * bandwidth * bandwidth);
    ws.inverse(hat, f);
    return f;
}

double particle_second_moment(const ParticleState& state, const ParticleConfig& cfg) {
    double s = 0.0;
    for (int i = 0; i < state.count(); ++i)
        s += state.x[i] * state.x[i] + state.y[i] * state.y[i];
    return cfg.m0 * s / state.count();
}

ChaosGap chaos_gap(const std::vector<double>& times,
                   const std::vector<Field>& kde_fields,
                   const std::vector<Field>& pde_fields,
                   const std::vector<double>& particle_moments) {
    if (times.size() != kde_fields.size() || times.size() != pde_fields.size() ||
        times.size() != particle_moments.size())
        throw std::invalid_argument("chaos_gap: mismatched time grids");
    ChaosGap g;
    g.times = times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        Field diff = kde_fields[i];
        diff -= pde_fields[i];
        g.l2_distance.push_back(lp_norm(diff, 2.0));
        g.second_moment_gap.push_back(
            std::abs(particle_moments[i] - second_moment(pde_fields[i])));
    }
    return g;
}

}  // namespace sks
