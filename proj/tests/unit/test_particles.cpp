#include "doctest.h"

#include <cmath>
#include <numeric>

#include "sks/diagnostics.hpp"
#include "sks/particles.hpp"

using namespace sks;

namespace {
ParticleConfig base_config(int N) {
    ParticleConfig c;
    c.domain = DomainSpec(10.0, 128);
    c.count = N;
    c.dt = 1e-3;
    c.chi = 0.0;
    c.a = 1.0;
    c.m0 = 1.0;
    c.delta = 0.05;
    return c;
}
}  // namespace

TEST_CASE("pure brownian motion has the 2 a^2 t mean squared displacement") {
    ParticleConfig cfg = base_config(2000);
    RngContext ctx{11, 0};
    auto engine = ctx.engine();
    ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);
    std::vector<double> x0 = st.x, y0 = st.y;
    const double T = 0.1;
    for (int s = 0; s < 100; ++s) particle_step(st, cfg, engine);
    double msd = 0.0;
    for (int i = 0; i < cfg.count; ++i) {
        double dx = st.x[i] - x0[i], dy = st.y[i] - y0[i];
        msd += dx * dx + dy * dy;
    }
    msd /= cfg.count;
    // E|X - X0|^2 = 2 a^2 t in 2D; 3-sigma MC band ~ 2 a^2 t / sqrt(N) * 2.
    CHECK(msd == doctest::Approx(2.0 * T).epsilon(0.05));
}

TEST_CASE("common noise only is a rigid translation") {
    ParticleConfig cfg = base_config(500);
    cfg.a = 0.5;
    cfg.common_sigma = 0.5 * std::sqrt(1.0 - 1e-12);  // idiosyncratic ~ 0
    RngContext ctx{13, 1};
    auto engine = ctx.engine();
    ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);

    auto moment_about_centroid = [&]() {
        double cx = std::accumulate(st.x.begin(), st.x.end(), 0.0) / cfg.count;
        double cy = std::accumulate(st.y.begin(), st.y.end(), 0.0) / cfg.count;
        double m = 0.0;
        for (int i = 0; i < cfg.count; ++i)
            m += (st.x[i] - cx) * (st.x[i] - cx) + (st.y[i] - cy) * (st.y[i] - cy);
        return m / cfg.count;
    };
    double before = moment_about_centroid();
    std::normal_distribution<double> g(0.0, std::sqrt(cfg.dt));
    for (int s = 0; s < 50; ++s) {
        double dW[2] = {g(engine), g(engine)};
        particle_step(st, cfg, engine, dW);
    }
    CHECK(moment_about_centroid() == doctest::Approx(before).epsilon(1e-6));
}

TEST_CASE("pairwise drift is antisymmetric") {
    ParticleConfig cfg = base_config(200);
    cfg.chi = 2.0;
    RngContext ctx{17, 2};
    auto engine = ctx.engine();
    ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);
    std::vector<double> fx, fy;
    particle_drift(st, cfg, fx, fy);
    double sx = std::accumulate(fx.begin(), fx.end(), 0.0);
    double sy = std::accumulate(fy.begin(), fy.end(), 0.0);
    double scale = 0.0;
    for (double v : fx) scale += std::abs(v);
    CHECK(std::abs(sx) <= 1e-13 * std::max(scale, 1.0));
    CHECK(std::abs(sy) <= 1e-13 * std::max(scale, 1.0));
}

TEST_CASE("drift is invariant under particle relabeling") {
    ParticleConfig cfg = base_config(64);
    cfg.chi = 1.5;
    RngContext ctx{19, 3};
    auto engine = ctx.engine();
    ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);
    std::vector<double> fx, fy;
    particle_drift(st, cfg, fx, fy);

    ParticleState rev;
    rev.x.assign(st.x.rbegin(), st.x.rend());
    rev.y.assign(st.y.rbegin(), st.y.rend());
    std::vector<double> gx, gy;
    particle_drift(rev, cfg, gx, gy);
    for (int i = 0; i < cfg.count; ++i) {
        CHECK(gx[cfg.count - 1 - i] == doctest::Approx(fx[i]).epsilon(1e-12));
        CHECK(gy[cfg.count - 1 - i] == doctest::Approx(fy[i]).epsilon(1e-12));
    }
}

TEST_CASE("empirical density") {
    ParticleConfig cfg = base_config(1);
    SUBCASE("single particle at the origin is the kernel itself") {
        ParticleState st;
        st.x = {0.0};
        st.y = {0.0};
        double h = 3.0 * cfg.domain.dx();
        Field kde = empirical_density(st, cfg, h);
        Field want = make_gaussian_field(cfg.domain, 1.0, h);
        double max_rel = 0.0;
        for (std::size_t i = 0; i < kde.values.size(); ++i)
            max_rel = std::max(max_rel, std::abs(kde.values[i] - want.values[i]));
        CHECK(max_rel < 1e-6 * sup_norm(want));
        CHECK(mass(kde) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("KDE mass is exactly the carried mass") {
        cfg.count = 777;
        RngContext ctx{23, 0};
        auto engine = ctx.engine();
        ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);
        Field kde = empirical_density(st, cfg, 0.3);
        CHECK(mass(kde) == doctest::Approx(cfg.m0).epsilon(1e-8));
    }
    SUBCASE("L2 error against the sampled density decreases with N") {
        Field truth = make_gaussian_field(cfg.domain, 1.0, 1.0);
        double prev = 1e300;
        for (int N : {500, 2000, 8000}) {
            cfg.count = N;
            RngContext ctx{29, static_cast<std::uint64_t>(N)};
            auto engine = ctx.engine();
            ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);
            double h = 0.5 * std::pow(N, -1.0 / 6.0);
            Field kde = empirical_density(st, cfg, h);
            Field diff = kde;
            diff -= truth;
            double err = lp_norm(diff, 2.0);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("empirical second moment tracks the virial law") {
    // Subcritical cloud: slope of M_N matches 2 a^2 m0 - (chi/2pi) m0^2.
    ParticleConfig cfg = base_config(4000);
    cfg.chi = M_PI;  // slope = 2 - 0.5 = 1.5
    cfg.delta = 0.02;
    RngContext ctx{31, 0};
    auto engine = ctx.engine();
    ParticleState st = init_gaussian_cloud(cfg, 1.0, engine);
    const double T = 0.3;
    const int steps = static_cast<int>(T / cfg.dt);
    // Least-squares slope over ~30 output times.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int s = 0; s <= steps; ++s) {
        if (s % 10 == 0) {
            double t = s * cfg.dt;
            double M = particle_second_moment(st, cfg);
            sx += t;
            sy += M;
            sxx += t * t;
            sxy += t * M;
            ++count;
        }
        if (s < steps) particle_step(st, cfg, engine);
    }
    double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    CHECK(slope == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("chaos gap requires matching grids") {
    CHECK_THROWS(chaos_gap({0.0, 0.1}, {}, {}, {}));
}

TEST_CASE("config validation") {
    ParticleConfig cfg = base_config(1);
    CHECK_THROWS(cfg.validate());  // N < 2
    cfg.count = 10;
    cfg.dt = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg.dt = 1e-3;
    cfg.delta = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg.delta = 0.1;
    cfg.common_sigma = 2.0;  // exceeds a
    CHECK_THROWS(cfg.validate());
}
