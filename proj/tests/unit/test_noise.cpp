#include "doctest.h"

#include <cmath>

#include "sks/noise.hpp"
#include "sks/spectral.hpp"

using namespace sks;

TEST_CASE("increment sampling statistics") {
    NoiseSpec spec = NoiseSpec::divergence(1.0);
    RngContext ctx{123, 0};
    auto engine = ctx.engine();
    CHECK_THROWS(sample_increments(spec, 0.0, engine));

    const int N = 100000;
    const double dt = 0.01;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N / 2; ++i) {
        auto dW = sample_increments(spec, dt, engine);
        for (double v : dW) {
            sum += v;
            sumsq += v * v;
        }
    }
    double mean = sum / N;
    double var = sumsq / N - mean * mean;
    // CLT 3-sigma band for the mean, chi-square 5% band for the variance.
    CHECK(std::abs(mean) < 3.0 * std::sqrt(dt / N));
    CHECK(var == doctest::Approx(dt).epsilon(0.05));
}

TEST_CASE("brownian path bridge refinement is consistent") {
    RngContext ctx{9, 3};
    auto engine = ctx.engine();
    BrownianPath coarse = BrownianPath::sample(2, 0.01, 50, engine);
    auto refine_engine = ctx.engine(1);
    BrownianPath fine = coarse.refined_half(refine_engine);
    CHECK(fine.steps() == 100);
    CHECK(fine.dt() == doctest::Approx(0.005));
    for (int s = 0; s <= 50; ++s)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(fine.value(2 * s, c) - coarse.value(s, c)) < 1e-12);
    // Refined increments have the right variance scale (sanity, not a CI).
    double var = 0.0;
    for (int s = 0; s < 100; ++s) var += fine.increment(s, 0) * fine.increment(s, 0);
    CHECK(var / 100 == doctest::Approx(0.005).epsilon(0.5));
}

TEST_CASE("noise_term basic identities") {
    DomainSpec d(10.0, 64);
    Field rho = make_gaussian_field(d, 1.0, 1.0);
    Field gx(d), gy(d);

    SUBCASE("zero increments give the zero field") {
        NoiseSpec spec = NoiseSpec::divergence(0.7);
        Field out = noise_term(spec, rho, gx, gy, {0.0, 0.0});
        CHECK(sup_norm(out) == 0.0);
    }
    SUBCASE("divergence noise vanishes on constant fields") {
        NoiseSpec spec = NoiseSpec::divergence(0.7);
        // grad of a constant field is identically zero
        Field out = noise_term(spec, Field(d, 3.0), gx, gy, {0.5, -0.2});
        CHECK(sup_norm(out) == 0.0);
    }
    SUBCASE("single constant mode with linear Phi") {
        auto modes = make_fourier_basis(d, 1);
        NoiseSpec spec = NoiseSpec::general(std::move(modes), PhiMap::linear(0.4));
        double h = 0.3;
        Field out = noise_term(spec, rho, gx, gy, {h});
        for (std::size_t i = 0; i < out.values.size(); ++i)
            CHECK(out.values[i] == doctest::Approx(0.4 * h * rho.values[i]).epsilon(1e-14));
    }
}

TEST_CASE("fourier basis modes") {
    DomainSpec d(10.0, 64);
    auto modes = make_fourier_basis(d, 9, 1.0);
    REQUIRE(modes.size() == 9);

    SUBCASE("first mode is constant") {
        CHECK(sup_norm(modes[0].e) == doctest::Approx(1.0));
        CHECK(min_value(modes[0].e) == doctest::Approx(1.0));
    }
    SUBCASE("sup normalization") {
        for (const auto& m : modes)
            CHECK(sup_norm(m.e) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("weights decay as alpha0/k") {
        for (std::size_t k = 0; k < modes.size(); ++k)
            CHECK(modes[k].alpha == doctest::Approx(1.0 / (k + 1)));
    }
    SUBCASE("pairwise discrete orthogonality") {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            for (std::size_t j = i + 1; j < modes.size(); ++j) {
                double dot = 0.0, nrm = 0.0;
                for (std::size_t k = 0; k < modes[i].e.values.size(); ++k) {
                    dot += modes[i].e.values[k] * modes[j].e.values[k];
                    nrm += modes[i].e.values[k] * modes[i].e.values[k];
                }
                CHECK(std::abs(dot) <= 1e-12 * std::max(nrm, 1.0));
            }
        }
    }
}

TEST_CASE("divergence noise integrates to zero (spectral gradients)") {
    DomainSpec d(10.0, 64);
    SpectralWorkspace ws(d);
    Field rho = make_gaussian_field(d, 1.0, 1.0);
    SpectralWorkspace::Spectrum hat, dx, dy;
    ws.forward(rho, hat);
    ws.derivative_x(hat, dx);
    ws.derivative_y(hat, dy);
    Field gx, gy;
    ws.inverse(dx, gx);
    ws.inverse(dy, gy);
    NoiseSpec spec = NoiseSpec::divergence(0.8);
    Field out = noise_term(spec, rho, gx, gy, {0.37, -0.82});
    CHECK(std::abs(mass(out)) < 1e-13 * sup_norm(out) * 4 * d.half_width * d.half_width);
}

TEST_CASE("general noise mass identity") {
    // integral of Phi(rho) sum alpha_k e_k dW_k equals
    // sum alpha_k dW_k integral e_k Phi(rho).
    DomainSpec d(10.0, 64);
    Field rho = make_gaussian_field(d, 1.0, 1.0);
    auto modes = make_fourier_basis(d, 4, 0.7);
    NoiseSpec spec = NoiseSpec::general(modes, PhiMap::linear(0.5));
    std::vector<double> dW = {0.1, -0.2, 0.05, 0.3};
    Field out = general_noise_term(spec, rho, dW);
    double expected = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        double inner = 0.0;
        for (std::size_t i = 0; i < rho.values.size(); ++i)
            inner += modes[k].e.values[i] * 0.5 * rho.values[i];
        expected += modes[k].alpha * dW[k] * inner * d.cell_area();
    }
    CHECK(mass(out) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("milstein correction") {
    DomainSpec d(10.0, 32);
    Field rho = make_gaussian_field(d, 1.0, 1.0);
    SUBCASE("zero for the divergence regime") {
        NoiseSpec spec = NoiseSpec::divergence(0.5);
        Field out = milstein_correction(spec, rho, {0.1, 0.2}, 1e-3);
        CHECK(sup_norm(out) == 0.0);
    }
    SUBCASE("single constant mode closed form") {
        NoiseSpec spec = NoiseSpec::general(make_fourier_basis(d, 1), PhiMap::linear(0.5));
        double dw = 0.07, dt = 1e-3;
        Field out = milstein_correction(spec, rho, {dw}, dt);
        for (std::size_t i = 0; i < out.values.size(); ++i) {
            double want = 0.5 * 0.5 * 0.5 * rho.values[i] * (dw * dw - dt);
            CHECK(out.values[i] == doctest::Approx(want).epsilon(1e-13));
        }
    }
}

TEST_CASE("phi maps") {
    PhiMap lin = PhiMap::linear(2.0);
    CHECK(lin(3.0) == doctest::Approx(6.0));
    CHECK(lin.derivative(3.0) == doctest::Approx(2.0));

    PhiMap bl = PhiMap::bounded_linear(2.0, 1.0);
    CHECK(bl(1.0) == doctest::Approx(1.0));       // 2*1/(1+1)
    CHECK(bl(1e9) < 2.0 + 1e-6);                  // saturates near sigma*cap
    CHECK(bl.derivative(0.0) == doctest::Approx(2.0));

    PhiMap tab = PhiMap::table({0.0, 1.0, 2.0}, {0.0, 0.5, 0.5});
    CHECK(tab(0.5) == doctest::Approx(0.25));
    CHECK(tab(1.5) == doctest::Approx(0.5));
    CHECK(tab(5.0) == doctest::Approx(0.5));  // clamped
    CHECK(tab.derivative(0.5) == doctest::Approx(0.5));
    CHECK_THROWS(PhiMap::table({1.0}, {1.0}));
    CHECK_THROWS(PhiMap::table({1.0, 0.0}, {1.0, 2.0}));
}

TEST_CASE("pathwise reproducibility of the noise pipeline") {
    DomainSpec d(10.0, 32);
    Field rho = make_gaussian_field(d, 1.0, 1.0);
    auto modes = make_fourier_basis(d, 3);
    NoiseSpec spec = NoiseSpec::general(modes, PhiMap::linear(0.3));
    RngContext ctx{77, 5};
    auto e1 = ctx.engine(), e2 = ctx.engine();
    auto w1 = sample_increments(spec, 1e-3, e1);
    auto w2 = sample_increments(spec, 1e-3, e2);
    Field f1 = general_noise_term(spec, rho, w1);
    Field f2 = general_noise_term(spec, rho, w2);
    for (std::size_t i = 0; i < f1.values.size(); ++i)
        CHECK(f1.values[i] == f2.values[i]);  // bit-exact
}
