#include "sks/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sks {

double CutoffSpec::value(double r) const {
    if (!(eps > 0.0)) throw std::invalid_argument("CutoffSpec: eps must be > 0");
    const double R1 = r_inner();
    if (r <= R1) return r * r;
    if (r >= r_outer()) return 0.0;
    // Quintic Hermite blend u(s) with u(0)=1, u'(0)=2, u''(0)=2 and zero
    // value/slope/curvature at s=1, scaled by R1^2.
    double s = (r - R1) / R1;
    double u = 1.0 + s * (2.0 + s * (1.0 + s * (-25.0 + s * (34.0 - 13.0 * s))));
    return R1 * R1 * u;
}

double second_moment(const Field& f) {
    const DomainSpec& d = f.domain;
    double sum = 0.0;
    for (int iy = 0; iy < d.n; ++iy) {
        double y = d.coord(iy);
        for (int ix = 0; ix < d.n; ++ix) {
            double x = d.coord(ix);
            sum += (x * x + y * y) * f.at(ix, iy);
        }
    }
    return sum * d.cell_area();
}

double cutoff_moment(const Field& f, const CutoffSpec& cut) {
    const DomainSpec& d = f.domain;
    if (cut.r_outer() > d.half_width)
        throw std::invalid_argument("cutoff_moment: cutoff radius 2/eps exceeds the box");
    double sum = 0.0;
    for (int iy = 0; iy < d.n; ++iy) {
        double y = d.coord(iy);
        for (int ix = 0; ix < d.n; ++ix) {
            double x = d.coord(ix);
            sum += cut.value(std::hypot(x, y)) * f.at(ix, iy);
        }
    }
    return sum * d.cell_area();
}

namespace {
/// Parseval sum of |m(k) f_hat(k)|^2 over the r2c spectrum, with conjugate
/// columns double-counted; returns the L^2(box)^2 value.
template <typename Mult>
double spectral_square(const Field& f, SpectralWorkspace& ws, Mult&& m) {
    SpectralWorkspace::Spectrum hat;
    ws.forward(f, hat);
    const int n = ws.n(), nkx = ws.n_kx();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < nkx; ++j) {
            std::size_t idx = static_cast<std::size_t>(i) * nkx + j;
            double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
            sum += w * m(ws.kx(j), ws.ky(i)) * std::norm(hat[idx]);
        }
    }
    // Parseval: integral |f|^2 dx = dx^2/n^2 * sum over full spectrum.
    double n2 = static_cast<double>(n) * n;
    return sum * f.domain.cell_area() / n2;
}
}  // namespace

std::pair<double, double> h1_and_hessian_norms(const Field& f, SpectralWorkspace& ws) {
    double l2sq = spectral_square(f, ws, [](double, double) { return 1.0; });
    double gradsq = spectral_square(f, ws, [](double kx, double ky) { return kx * kx + ky * ky; });
    double hesssq = spectral_square(f, ws, [](double kx, double ky) {
        double a = kx * kx, b = ky * ky;
        return a * a + 2.0 * a * b + b * b;
    });
    return {std::sqrt(l2sq + gradsq), std::sqrt(hesssq)};
}

double sup_norm_on_ball(const Field& f, double R) {
    const DomainSpec& d = f.domain;
    double m = 0.0;
    for (int iy = 0; iy < d.n; ++iy) {
        double y = d.coord(iy);
        for (int ix = 0; ix < d.n; ++ix) {
            double x = d.coord(ix);
            if (x * x + y * y <= R * R) m = std::max(m, std::abs(f.at(ix, iy)));
        }
    }
    return m;
}

DiagnosticsRecord make_record(const Field& f, double t, const std::vector<double>& p_list,
                              const CutoffSpec& cut, double ball_radius,
                              SpectralWorkspace& ws) {
    DiagnosticsRecord r;
    r.t = t;
    r.mass = mass(f);
    r.second_moment = second_moment(f);
    r.cutoff_moment = cut.r_outer() <= f.domain.half_width ? cutoff_moment(f, cut) : 0.0;
    for (double p : p_list) r.lp.push_back(lp_norm(f, p));
    auto [h1, hess] = h1_and_hessian_norms(f, ws);
    r.h1 = h1;
    r.hess_l2 = hess;
    r.sup = sup_norm(f);
    r.sup_ball = sup_norm_on_ball(f, ball_radius);
    return r;
}

BlowupReport detect_blowup(const std::vector<DiagnosticsRecord>& records,
                           const ModelParams& params, const DetectorConfig& cfg) {
    (void)params;
    BlowupReport rep;
    if (records.size() < 2) {
        rep.type = BlowupType::Inconclusive;
        return rep;
    }

    for (const auto& r : records) rep.evidence["t"].push_back(r.t);
    for (const auto& r : records) rep.evidence["M"].push_back(r.second_moment);
    for (const auto& r : records) rep.evidence["h1"].push_back(r.h1);
    for (const auto& r : records) rep.evidence["sup"].push_back(r.sup);

    // Numerical blowup: the solver flagged the trajectory.
    for (const auto& r : records) {
        if (r.blown_up) {
            rep.type = BlowupType::Numerical;
            rep.firing_time = r.t;
            return rep;
        }
    }

    // Type 1 proxy: H^1 and the accumulated Hessian integral diverge with
    // positive growth acceleration.
    {
        double h1_0 = std::max(records.front().h1, 1e-300);
        double hess_int = 0.0;
        double horizon = records.back().t - records.front().t;
        for (std::size_t i = 1; i < records.size(); ++i)
            hess_int += 0.5 * (records[i].hess_l2 + records[i - 1].hess_l2) *
                        (records[i].t - records[i - 1].t);
        std::size_t nrec = records.size();
        bool accel = nrec >= 3 &&
                     records[nrec - 1].h1 - records[nrec - 2].h1 >
                         records[nrec - 2].h1 - records[nrec - 3].h1;
        if (records.back().h1 > cfg.h1_growth_factor * h1_0 &&
            hess_int > cfg.hess_integral_factor * records.front().hess_l2 * horizon &&
            accel) {
            rep.type = BlowupType::Type1;
            for (std::size_t i = 0; i < nrec; ++i) {
                if (records[i].h1 > cfg.h1_growth_factor * h1_0) {
                    rep.firing_time = records[i].t;
                    break;
                }
            }
            return rep;
        }
    }

    // Type 2 proxy: the paper's contradiction route (M forced through zero
    // while the mass stays positive) or runaway growth of M.
    {
        int w = std::min<int>(cfg.fit_window, static_cast<int>(records.size()));
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = static_cast<int>(records.size()) - w; i < static_cast<int>(records.size()); ++i) {
            sx += records[i].t;
            sy += records[i].second_moment;
            sxx += records[i].t * records[i].t;
            sxy += records[i].t * records[i].second_moment;
        }
        double denom = w * sxx - sx * sx;
        if (denom > 0) {
            double slope = (w * sxy - sx * sy) / denom;
            double icept = (sy - slope * sx) / w;
            double t_last = records.back().t;
            double elapsed = t_last - records.front().t;
            if (slope < 0.0) {
                double root = -icept / slope;
                bool mass_ok = records.back().mass > 0.5 * records.front().mass;
                if (mass_ok && root <= t_last + cfg.extrapolation_horizon * elapsed) {
                    rep.type = BlowupType::Type2;
                    rep.firing_time = root;
                    return rep;
                }
            }
        }
        if (records.back().second_moment >
            cfg.m_growth_factor * std::max(records.front().second_moment, 1e-300)) {
            rep.type = BlowupType::Type2;
            rep.firing_time = records.back().t;
            return rep;
        }
    }

    rep.type = BlowupType::None;
    return rep;
}

BlowupReport detect_type3_ensemble(const std::vector<std::vector<DiagnosticsRecord>>& paths,
                                   double sup_ball_threshold) {
    BlowupReport rep;
    if (paths.empty()) {
        rep.type = BlowupType::Inconclusive;
        return rep;
    }
    int cap_hits = 0;
    double mean_sup_ball = 0.0;
    double firing = 0.0;
    for (const auto& recs : paths) {
        if (recs.empty()) continue;
        const DiagnosticsRecord& last = recs.back();
        mean_sup_ball += last.sup_ball;
        if (last.blown_up) {
            cap_hits += 1;
            firing = std::max(firing, last.t);
        }
    }
    mean_sup_ball /= static_cast<double>(paths.size());
    rep.evidence["mean_sup_ball"] = {mean_sup_ball};
    rep.evidence["cap_hit_fraction"] = {static_cast<double>(cap_hits) / paths.size()};
    if (mean_sup_ball > sup_ball_threshold && 2 * cap_hits > static_cast<int>(paths.size())) {
        rep.type = BlowupType::Type3;
        rep.firing_time = firing;
    } else {
        rep.type = BlowupType::None;
    }
    return rep;
}

}  // namespace sks
