#include "sks/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace sks {

namespace {
void apply_green_symbol(const SpectralWorkspace& ws, KernelKind kernel,
                        const SpectralWorkspace::Spectrum& rho_hat,
                        SpectralWorkspace::Spectrum& c_hat) {
    c_hat.resize(rho_hat.size());
    const auto& k2 = ws.k_squared();
    if (kernel == KernelKind::Newtonian) {
        for (std::size_t i = 0; i < rho_hat.size(); ++i)
            c_hat[i] = k2[i] > 0.0 ? rho_hat[i] / k2[i] : 0.0;
    } else {
        for (std::size_t i = 0; i < rho_hat.size(); ++i)
            c_hat[i] = rho_hat[i] / (1.0 + k2[i]);
    }
}
}  // namespace

PotentialField PotentialSolver::solve(const Field& rho, KernelKind kernel) {
    if (!all_finite(rho)) throw std::invalid_argument("solve_potential: non-finite input");
    PotentialField out;
    ws_.forward(rho, rho_hat_);
    apply_green_symbol(ws_, kernel, rho_hat_, c_hat_);
    ws_.inverse(c_hat_, out.c);
    ws_.derivative_x(c_hat_, tmp_);
    ws_.inverse(tmp_, out.grad_x);
    ws_.derivative_y(c_hat_, tmp_);
    ws_.inverse(tmp_, out.grad_y);
    return out;
}

void PotentialSolver::gradient_from_spectrum(const SpectralWorkspace::Spectrum& rho_hat,
                                             KernelKind kernel, Field& grad_x,
                                             Field& grad_y) {
    apply_green_symbol(ws_, kernel, rho_hat, c_hat_);
    ws_.derivative_x(c_hat_, tmp_);
    ws_.inverse(tmp_, grad_x);
    ws_.derivative_y(c_hat_, tmp_);
    ws_.inverse(tmp_, grad_y);
}

double estimate_Cp(PotentialSolver& solver, KernelKind kernel, double p,
                   const std::vector<Field>& probes) {
    if (!(p > 2.0)) throw std::invalid_argument("estimate_Cp: requires p > 2");
    if (probes.empty()) throw std::invalid_argument("estimate_Cp: empty probe set");
    double best = -1.0;
    for (const Field& rho : probes) {
        double np = lp_norm(rho, p);
        if (np == 0.0) continue;  // zero-norm probes carry no information
        PotentialField pf = solver.solve(rho, kernel);
        double grad_inf = 0.0;
        for (std::size_t i = 0; i < pf.grad_x.values.size(); ++i) {
            double g = std::hypot(pf.grad_x.values[i], pf.grad_y.values[i]);
            grad_inf = std::max(grad_inf, g);
        }
        best = std::max(best, grad_inf / np);
    }
    if (best < 0.0) throw std::invalid_argument("estimate_Cp: all probes had zero norm");
    return best;
}

}  // namespace sks
