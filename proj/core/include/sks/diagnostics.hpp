#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sks/domain.hpp"
#include "sks/solver.hpp"

namespace sks {

/// Smooth radial cutoff for |x|^2: phi_eps(x) = |x|^2 for |x| <= 1/eps,
/// 0 for |x| >= 2/eps, blended by a C^2 quintic in between. The quintic
/// cannot meet Definition-4.3-style bounds |Lap phi| <= 4 and Lip(grad) <= 2
/// exactly; the realized bounds are |Lap phi| <= 14.36 and Lip <= 14.10
/// (measured constants, see tests).
struct CutoffSpec {
    double eps = 0.1;

    double r_inner() const { return 1.0 / eps; }
    double r_outer() const { return 2.0 / eps; }
    /// phi_eps as a function of radius.
    double value(double r) const;
    /// Realized bound constants for the blend.
    static constexpr double laplacian_bound = 14.36;
    static constexpr double gradient_lipschitz_bound = 14.10;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double second_moment = 0.0;
    double cutoff_moment = 0.0;
    std::vector<double> lp;     // one entry per configured exponent
    double h1 = 0.0;
    double hess_l2 = 0.0;
    double sup = 0.0;
    double sup_ball = 0.0;
    bool blown_up = false;
};

enum class BlowupType { None, Inconclusive, Numerical, Type1, Type2, Type3 };

struct BlowupReport {
    BlowupType type = BlowupType::None;
    std::optional<double> firing_time;
    std::optional<double> theoretical_bound;
    std::map<std::string, std::vector<double>> evidence;
};

struct DetectorConfig {
    double h1_growth_factor = 100.0;       // Type 1: h1 beyond factor * h1(0)
    double hess_integral_factor = 100.0;   // Type 1: int ||D^2 rho|| beyond factor * hess(0)*T
    double m_growth_factor = 50.0;         // Type 2 growth variant
    double extrapolation_horizon = 1.0;    // Type 2: root within horizon * elapsed past the end
    int fit_window = 5;                    // trailing records used in the M(t) fit
};

/// sum |x|^2 rho dx^2 over the box (x measured from the box center).
double second_moment(const Field& f);

/// sum phi_eps(|x|) rho dx^2. Requires the cutoff support to fit: 2/eps <= L.
double cutoff_moment(const Field& f, const CutoffSpec& cut);

/// Spectral H^1 norm sqrt(||rho||_2^2 + ||grad rho||_2^2) and the Frobenius
/// L^2 norm of the Hessian.
std::pair<double, double> h1_and_hessian_norms(const Field& f, SpectralWorkspace& ws);

double sup_norm_on_ball(const Field& f, double R);

/// Full record at one output time.
DiagnosticsRecord make_record(const Field& f, double t, const std::vector<double>& p_list,
                              const CutoffSpec& cut, double ball_radius,
                              SpectralWorkspace& ws);

/// Classifies one trajectory of records. Numerical (cap/non-finite) takes
/// precedence; Type 1 and Type 2 are threshold proxies for the continuum
/// definitions; Type 3 needs ensemble statistics (see detect_type3_ensemble).
BlowupReport detect_blowup(const std::vector<DiagnosticsRecord>& records,
                           const ModelParams& params, const DetectorConfig& cfg);

/// Ensemble-level Type 3 proxy: mean over paths of sup-norm on B_R exceeds
/// the threshold and more than half of the paths hit the cap.
BlowupReport detect_type3_ensemble(const std::vector<std::vector<DiagnosticsRecord>>& paths,
                                   double sup_ball_threshold);

}  // namespace sks
