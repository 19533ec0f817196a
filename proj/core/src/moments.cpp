#include "sks/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace sks {

MomentOracle::MomentOracle(double m0, double M0, const ModelParams& params,
                           const BrownianPath* path)
    : m0_(m0), M0_(M0), params_(params), path_(path) {
    if (m0 < 0.0 || M0 < 0.0)
        throw std::invalid_argument("MomentOracle: moments must be nonnegative");
    if (path_ == nullptr) throw std::invalid_argument("MomentOracle: null path");
    // Cumulative trapezoid of Psi over the path grid.
    int steps = path_->steps();
    int_psi_grid_.resize(steps + 1);
    int_psi_grid_[0] = 0.0;
    double prev = psi(0.0);
    for (int s = 1; s <= steps; ++s) {
        double cur = std::exp(-0.5 * params_.sigma * params_.sigma * s * path_->dt() +
                              params_.sigma * path_->value(s, 0));
        int_psi_grid_[s] = int_psi_grid_[s - 1] + 0.5 * (prev + cur) * path_->dt();
        prev = cur;
    }
}

double MomentOracle::psi(double t) const {
    return std::exp(-0.5 * params_.sigma * params_.sigma * t +
                    params_.sigma * path_->value_at(t, 0));
}

double MomentOracle::int_psi(double t) const {
    if (t <= 0.0) return 0.0;
    double u = t / path_->dt();
    int s = std::min(static_cast<int>(u), path_->steps());
    double base = int_psi_grid_[s];
    double frac = t - s * path_->dt();
    if (frac > 0.0 && s < path_->steps())
        base += 0.5 * (psi(s * path_->dt()) + psi(t)) * frac;
    return base;
}

double MomentOracle::exact_mass(double t) const {
    if (t < 0.0 || t > path_->horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("exact_mass: t outside path horizon");
    return m0_ * psi(t);
}

double MomentOracle::exact_second_moment(double t) const {
    if (t < 0.0 || t > path_->horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("exact_second_moment: t outside path horizon");
    double nonlocal = params_.chi * m0_ * m0_ / (2.0 * M_PI) * int_psi(t);
    return psi(t) * (M0_ + 2.0 * params_.a * params_.a * m0_ * t - nonlocal);
}

double MomentOracle::supersolution_u_plus(double t) const {
    if (t < 0.0 || t > path_->horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("supersolution_u_plus: t outside path horizon");
    double nonlocal = params_.chi * m0_ * m0_ / (2.0 * M_PI) * int_psi(t);
    return psi(t) * (M0_ + 2.0 * params_.a * params_.a * m0_ * t + nonlocal);
}

std::optional<double> MomentOracle::first_contradiction_time(double t) const {
    int steps = std::min(static_cast<int>(std::llround(t / path_->dt())), path_->steps());
    for (int s = 0; s <= steps; ++s) {
        double ts = s * path_->dt();
        if (exact_second_moment(ts) <= 0.0) return ts;
    }
    return std::nullopt;
}

void BrownianEventSpec::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("BrownianEventSpec: alpha, beta, t must be > 0");
}

bool smallness_condition(double m0, const ModelParams& params, double C) {
    if (!(m0 > 0.0) || !(C > 0.0))
        throw std::invalid_argument("smallness_condition: m0 and C must be > 0");
    double p = params.p;
    double lhs = C * (-params.nu_sq() * p * (p - 1.0) / 2.0 + params.chi) *
                     std::pow(m0, -p / (p - 1.0)) +
                 params.chi * std::pow(m0, (p - 2.0) / (p - 1.0));
    return lhs <= 0.0;
}

bool blowup_mass_condition(double m0, const ModelParams& params) {
    if (m0 < 0.0) throw std::invalid_argument("blowup_mass_condition: m0 >= 0");
    return params.chi / (2.0 * M_PI) * m0 >
           2.0 * (params.nu_sq() + params.sigma * params.sigma);
}

double blowup_time_bound(double m0, double M0, const ModelParams& params) {
    if (!blowup_mass_condition(m0, params))
        throw std::invalid_argument("blowup_time_bound: mass condition not satisfied");
    double denom = params.chi / (2.0 * M_PI) * m0 * m0 -
                   2.0 * (params.nu_sq() + params.sigma * params.sigma) * m0;
    return M0 / denom;
}

double t2_min(double m0, double M0, const ModelParams& params, double alpha,
              double beta, double t_max) {
    if (!(params.sigma > 0.0) || !(alpha > 0.0) || !(beta > 0.0) || !(m0 > 0.0))
        throw std::invalid_argument("t2_min: need sigma, alpha, beta, m0 > 0");
    const double K = params.chi * m0 * m0 / (2.0 * M_PI * params.sigma * alpha);
    const double a2m0 = 2.0 * params.a * params.a * m0;
    auto g = [&](double t) {
        return K * std::exp(params.sigma * (alpha * t - beta)) - M0 - a2m0 * t -
               K * std::exp(-params.sigma * beta);
    };
    if (g(0.0) >= 0.0) return 0.0;
    double hi = 1e-6;
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > t_max)
            throw std::runtime_error("t2_min: no bracket below t_max=" + std::to_string(t_max));
    }
    double lo = hi / 2.0;
    if (g(lo) >= 0.0) lo = 0.0;
    // g is convex with g(0) < 0: the feasible set is [t2, inf).
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) >= 0.0 ? hi : lo) = mid;
        if (hi - lo <= 1e-8 * hi) break;
    }
    return hi;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double brownian_event_probability_closed(const BrownianEventSpec& spec, double sigma) {
    spec.validate();
    const double c = 0.5 * sigma + spec.alpha;
    const double t = spec.horizon, b = spec.beta;
    // P(inf_{s<=t} (W(s) - c s) > -b) by reflection for drifted BM.
    return normal_cdf((b - c * t) / std::sqrt(t)) -
           std::exp(2.0 * c * b) * normal_cdf(-(b + c * t) / std::sqrt(t));
}

EventProbability brownian_event_probability(const BrownianEventSpec& spec, double sigma,
                                            int mc_paths, int mc_steps,
                                            std::mt19937_64& engine) {
    spec.validate();
    if (mc_paths < 1 || mc_steps < 1)
        throw std::invalid_argument("brownian_event_probability: need paths, steps >= 1");
    const double c = 0.5 * sigma + spec.alpha;
    const double dt = spec.horizon / mc_steps;
    const double sdt = std::sqrt(dt);
    std::normal_distribution<double> gauss(0.0, 1.0);
    long hits = 0;
    for (int p = 0; p < mc_paths; ++p) {
        double W = 0.0;
        bool ok = true;
        for (int s = 1; s <= mc_steps; ++s) {
            W += sdt * gauss(engine);
            if (W < c * (s * dt) - spec.beta) {
                ok = false;
                break;
            }
        }
        if (ok) ++hits;
    }
    EventProbability out;
    out.mc_estimate = static_cast<double>(hits) / mc_paths;
    out.mc_std_error =
        std::sqrt(std::max(out.mc_estimate * (1.0 - out.mc_estimate), 1e-12) / mc_paths);
    out.closed_form = brownian_event_probability_closed(spec, sigma);
    return out;
}

double blowup_probability_lower_bound(double p_ab) {
    if (p_ab < 0.0 || p_ab > 1.0)
        throw std::invalid_argument("blowup_probability_lower_bound: p outside [0,1]");
    return 0.5 * p_ab;
}

}  // namespace sks
