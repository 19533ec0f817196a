#include "sks/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace sks {

void SolverConfig::validate(const DomainSpec& domain, const ModelParams& params) const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be >= 0");
    if (blowup_cap < 0.0 || !(blowup_cap_factor > 0.0))
        throw std::invalid_argument("SolverConfig: blowup cap must be positive");
    if (!(positivity_tol_rel > 0.0))
        throw std::invalid_argument("SolverConfig: positivity_tol_rel must be > 0");
    if (stepping == Stepping::Explicit) {
        double limit = domain.dx() * domain.dx() / (2.0 * params.a * params.a);
        if (dt > limit)
            throw std::invalid_argument(
                "SolverConfig: explicit stepping needs dt <= dx^2/(2 a^2)");
    }
}

Solver::Solver(const DomainSpec& domain, const ModelParams& params,
               const NoiseSpec& noise, const SolverConfig& cfg)
    : domain_(domain), params_(params), noise_(noise), cfg_(cfg), potential_(domain) {
    if (noise_.regime == NoiseSpec::Regime::DivergenceType && noise_.sigma != 0.0)
        params_.validate_divergence();
    else
        params_.validate_common();
    cfg_.validate(domain_, params_);

    const auto& ws = potential_.workspace();
    efactor_.resize(ws.spectrum_size());
    // Divergence regime: nu^2/2 heat, the remaining sigma^2/2 lives in the
    // exact transport factor. General regime: the full a^2/2.
    const double diffusion = noise_.regime == NoiseSpec::Regime::DivergenceType
                                 ? 0.5 * params_.nu_sq()
                                 : 0.5 * params_.a * params_.a;
    for (std::size_t i = 0; i < efactor_.size(); ++i) {
        double lam = diffusion * ws.k_squared(i);
        efactor_[i] = cfg_.stepping == Stepping::SemiImplicitSpectral
                          ? std::exp(-lam * cfg_.dt)
                          : 1.0 - lam * cfg_.dt;
    }
    grad_cx_ = Field(domain_);
    grad_cy_ = Field(domain_);
    flux_ = Field(domain_);
    candidate_ = Field(domain_);
}

SolverState Solver::make_state(const Field& rho0) const {
    if (!(rho0.domain == domain_))
        throw std::invalid_argument("Solver: initial condition on wrong grid");
    if (!all_finite(rho0))
        throw std::invalid_argument("Solver: non-finite initial condition");
    SolverState s;
    s.rho = rho0;
    s.sup0 = sup_norm(rho0);
    s.cap = cfg_.blowup_cap > 0.0 ? cfg_.blowup_cap : cfg_.blowup_cap_factor * s.sup0;
    return s;
}

void Solver::step(SolverState& state, const double* dW) {
    step_impl(state, nullptr, dW);
}

void Solver::step_linear(SolverState& state, const Field& xi, const double* dW) {
    step_impl(state, &xi, dW);
}

void Solver::step_impl(SolverState& state, const Field* frozen_xi, const double* dW) {
    if (!state.running()) return;
    auto& ws = potential_.workspace();
    const double dt = cfg_.dt;

    ws.forward(state.rho, rho_hat_);

    // Advective contribution -chi * div(rho grad c).
    if (params_.chi != 0.0) {
        if (frozen_xi) {
            ws.forward(*frozen_xi, xi_hat_);
            potential_.gradient_from_spectrum(xi_hat_, cfg_.kernel, grad_cx_, grad_cy_);
        } else {
            potential_.gradient_from_spectrum(rho_hat_, cfg_.kernel, grad_cx_, grad_cy_);
        }
        adv_hat_.assign(ws.spectrum_size(), std::complex<double>(0.0, 0.0));

        for (std::size_t i = 0; i < flux_.values.size(); ++i)
            flux_.values[i] = state.rho.values[i] * grad_cx_.values[i];
        ws.forward(flux_, work_hat_);
        if (cfg_.dealias) ws.apply_dealias(work_hat_);
        ws.derivative_x(work_hat_, work_hat_);
        for (std::size_t i = 0; i < adv_hat_.size(); ++i)
            adv_hat_[i] -= params_.chi * work_hat_[i];

        for (std::size_t i = 0; i < flux_.values.size(); ++i)
            flux_.values[i] = state.rho.values[i] * grad_cy_.values[i];
        ws.forward(flux_, work_hat_);
        if (cfg_.dealias) ws.apply_dealias(work_hat_);
        ws.derivative_y(work_hat_, work_hat_);
        for (std::size_t i = 0; i < adv_hat_.size(); ++i)
            adv_hat_[i] -= params_.chi * work_hat_[i];

        for (std::size_t i = 0; i < rho_hat_.size(); ++i) rho_hat_[i] += dt * adv_hat_[i];
    }

    // Noise. dW == nullptr runs the deterministic limit.
    bool transport = false;
    if (dW != nullptr) {
        if (noise_.regime == NoiseSpec::Regime::DivergenceType) {
            transport = noise_.sigma != 0.0;
        } else {
            std::vector<double> dWv(dW, dW + noise_.components());
            Field g = general_noise_term(noise_, state.rho, dWv);
            if (cfg_.milstein) g += milstein_correction(noise_, state.rho, dWv, dt);
            ws.forward(g, work_hat_);
            for (std::size_t i = 0; i < rho_hat_.size(); ++i) rho_hat_[i] += work_hat_[i];
        }
    }

    if (transport) {
        // Exact one-step factor of the heat + transport subproblem. The k=0
        // phase is zero, so mass is conserved exactly per step.
        for (std::size_t i = 0; i < rho_hat_.size(); ++i) {
            double theta =
                noise_.sigma * (ws.deriv_kx(i) * dW[0] + ws.deriv_ky(i) * dW[1]);
            rho_hat_[i] *=
                efactor_[i] * std::complex<double>(std::cos(theta), std::sin(theta));
        }
    } else {
        for (std::size_t i = 0; i < rho_hat_.size(); ++i) rho_hat_[i] *= efactor_[i];
    }
    ws.inverse(rho_hat_, candidate_);
    finish_step(state, candidate_);
}

void Solver::finish_step(SolverState& state, Field& candidate) {
    const double t_new = state.t + cfg_.dt;
    state.step_index += 1;

    if (!all_finite(candidate)) {
        if (sup_norm(state.rho) > cfg_.blowup_growth_factor * state.sup0) {
            state.rho.values.swap(candidate.values);
            state.blown_up = true;
            state.blowup_time = t_new;
            state.t = t_new;
        } else {
            state.internal_error = true;
            state.error_message = "non-finite state without cap exceedance";
        }
        return;
    }

    double sup = sup_norm(candidate);
    if (sup > state.cap) {
        state.rho.values.swap(candidate.values);
        state.blown_up = true;
        state.blowup_time = t_new;
        state.t = t_new;
        return;
    }

    double tol = cfg_.positivity_tol_rel * sup;
    if (min_value(candidate) < -tol) {
        // Hard positivity violation: an expected symptom of under-resolved
        // collapse once the field has grown, an anomaly otherwise.
        if (sup > cfg_.blowup_growth_factor * state.sup0) {
            state.rho.values.swap(candidate.values);
            state.blown_up = true;
            state.blowup_time = t_new;
            state.t = t_new;
        } else {
            state.internal_error = true;
            state.error_message = "positivity violation beyond tolerance";
        }
        return;
    }

    state.clipped_mass += clip_small_negatives(candidate, tol);
    state.rho.values.swap(candidate.values);
    state.t = t_new;
}

SolverState Solver::run(const Field& rho0, const BrownianPath& path,
                        const std::function<void(const SolverState&)>& observer,
                        int record_every) {
    const int total = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));
    if (path.components() < noise_.components())
        throw std::invalid_argument("Solver::run: path has too few components");
    if (std::abs(path.dt() - cfg_.dt) > 1e-12 * cfg_.dt)
        throw std::invalid_argument("Solver::run: path dt mismatch");
    if (path.steps() < total)
        throw std::invalid_argument("Solver::run: path shorter than t_end");

    SolverState state = make_state(rho0);
    if (observer) observer(state);
    std::vector<double> dW(noise_.components());
    for (int s = 0; s < total && state.running(); ++s) {
        for (int c = 0; c < noise_.components(); ++c) dW[c] = path.increment(s, c);
        step(state, dW.data());
        bool record = record_every > 0 && state.step_index % record_every == 0;
        if (observer && (record || !state.running() || s == total - 1)) observer(state);
    }
    return state;
}

Trajectory Solver::solve_deterministic(const Field& rho0, int record_every) {
    const int total = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));
    SolverState state = make_state(rho0);
    Trajectory out;
    out.times.push_back(state.t);
    out.fields.push_back(state.rho);
    for (int s = 0; s < total && state.running(); ++s) {
        step_impl(state, nullptr, nullptr);
        if ((record_every > 0 && state.step_index % record_every == 0) ||
            s == total - 1 || !state.running()) {
            out.times.push_back(state.t);
            out.fields.push_back(state.rho);
        }
    }
    return out;
}

Trajectory Solver::solve_linearized(const Trajectory& xi, const Field& rho0,
                                    const BrownianPath& path, int record_every) {
    const int total = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));
    if (static_cast<int>(xi.size()) < total + 1)
        throw std::invalid_argument("solve_linearized: xi not defined on the full time grid");
    if (path.steps() < total || path.components() < noise_.components())
        throw std::invalid_argument("solve_linearized: path too short");

    SolverState state = make_state(rho0);
    Trajectory out;
    out.times.push_back(state.t);
    out.fields.push_back(state.rho);
    std::vector<double> dW(noise_.components());
    for (int s = 0; s < total && state.running(); ++s) {
        for (int c = 0; c < noise_.components(); ++c) dW[c] = path.increment(s, c);
        step_linear(state, xi.fields[s], dW.data());
        if ((record_every > 0 && state.step_index % record_every == 0) ||
            s == total - 1 || !state.running()) {
            out.times.push_back(state.t);
            out.fields.push_back(state.rho);
        }
    }
    return out;
}

Solver::PicardResult Solver::picard_iterate(const Field& rho0, const BrownianPath& path,
                                            int iterations) {
    if (iterations < 2) throw std::invalid_argument("picard_iterate: iterations >= 2");
    const int total = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));

    // xi^0 == rho0, constant in time.
    Trajectory xi;
    xi.times.resize(total + 1);
    xi.fields.assign(total + 1, rho0);
    for (int s = 0; s <= total; ++s) xi.times[s] = s * cfg_.dt;

    PicardResult res;
    int grow_streak = 0;
    for (int it = 0; it < iterations; ++it) {
        Trajectory next = solve_linearized(xi, rho0, path, 1);
        if (next.size() != xi.size()) {
            res.diverged = true;  // linear solve halted early
            break;
        }
        double d = trajectory_distance(next, xi, params_.p);
        if (!res.distances.empty()) {
            res.ratios.push_back(d / res.distances.back());
            grow_streak = d > res.distances.back() ? grow_streak + 1 : 0;
            if (grow_streak >= 3) res.diverged = true;
        }
        res.distances.push_back(d);
        xi = std::move(next);
        if (res.diverged) break;
    }
    res.trajectory = std::move(xi);
    return res;
}

double trajectory_distance(const Trajectory& A, const Trajectory& B, double p) {
    if (A.size() != B.size())
        throw std::invalid_argument("trajectory_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        Field diff = A.fields[i];
        diff -= B.fields[i];
        d = std::max(d, lp_norm(diff, p));
    }
    return d;
}

}  // namespace sks
