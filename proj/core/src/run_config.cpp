#include "sks/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sks {

namespace {
std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

RunConfig::RunConfig() {
    // domain
    add("L", "10", "box half-width; the domain is [-L, L)^2");
    add("n", "128", "grid points per axis (power of two, >= 16)");
    // model
    add("a", "1.0", "diffusion amplitude; total diffusion a^2/2");
    add("sigma", "0.0", "noise amplitude");
    add("chi", "1.0", "chemotactic sensitivity");
    add("p", "2.0", "norm exponent for the analysis quantities");
    add("p_list", "2", "comma list of Lp exponents recorded in diagnostics");
    // noise
    add("regime", "divergence", "noise regime: divergence | general");
    add("phi", "linear", "general-noise amplitude map: linear | bounded_linear");
    add("rho_cap", "1.0", "saturation scale of the bounded_linear map");
    add("modes", "1", "number of Fourier modes in the general-noise expansion");
    add("alpha0", "1.0", "mode weight scale, alpha_k = alpha0/k");
    // solver
    add("dt", "1e-3", "time step");
    add("t_end", "1.0", "simulation horizon");
    add("kernel", "newtonian", "Green kernel: newtonian | bessel");
    add("stepping", "semi_implicit", "time stepping: semi_implicit | explicit");
    add("dealias", "true", "2/3-rule dealiasing of the advective flux");
    add("blowup_cap_factor", "1e4", "numerical blowup cap, times sup(rho0)");
    add("positivity_tol_rel", "1e-10", "negative undershoot tolerance, times sup(rho)");
    add("milstein", "true", "Milstein correction on the general-regime noise");
    // initial condition
    add("ic_mass", "1.0", "Gaussian initial mass m0");
    add("ic_width", "1.0", "Gaussian initial width s");
    add("ic_center_x", "0.0", "initial center x");
    add("ic_center_y", "0.0", "initial center y");
    // run control
    add("seed", "1", "master seed; all randomness derives from it");
    add("paths", "50", "ensemble size");
    add("record_every", "0", "steps between diagnostic records (0 -> ~20 records)");
    add("snapshot_every", "0", "steps between binary snapshots (0 -> none)");
    add("cutoff_eps", "0.25", "epsilon of the cutoff phi_eps");
    add("ball_radius", "1.0", "radius R for the sup-norm-on-ball diagnostic");
    add("threads", "0", "worker threads (0 -> hardware)");
    // experiments
    add("experiment", "global_existence",
        "experiment kind: global_existence | supercritical_divergence | "
        "supercritical_general | any_mass_blowup | small_perturbation | "
        "continuous_dependence | picard_contraction | particle_chaos");
    add("horizon", "1.0", "experiment horizon where applicable");
    add("horizon_factor", "1.5", "supercritical horizon as a multiple of T*");
    add("eps_sweep", "0.2,0.1,0.05,0.025", "epsilon sweep for small_perturbation");
    add("delta_sweep", "0.1,0.05,0.025", "initial-data gap sweep for continuous_dependence");
    add("alpha_grid", "0.6,0.8,1.0,1.2,1.4", "alpha sweep for the blowup event");
    add("beta_grid", "0.3,0.4,0.46,0.5,0.6", "beta sweep for the blowup event");
    add("iterations", "5", "Picard iterations");
    add("particles_n", "2000", "particle count");
    add("bandwidth", "0.1", "KDE bandwidth");
    add("particle_delta", "0.05", "kernel desingularization radius");
}

void RunConfig::add(const std::string& key, const std::string& def,
                    const std::string& desc) {
    entries_[key] = Entry{def, desc, false};
    order_.push_back(key);
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::runtime_error("config: unknown key '" + key + "'");
    it->second.value = value;
    it->second.overridden = true;
}

bool RunConfig::has_default(const std::string& key) const { return !lookup(key).overridden; }

const RunConfig::Entry& RunConfig::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::runtime_error("config: unknown key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string& v = lookup(key).value;
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + v);
    }
}

int RunConfig::get_int(const std::string& key) const {
    double d = get_double(key);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw std::runtime_error("config: key '" + key + "' is not an integer");
    return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::string& v = lookup(key).value;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' is not a u64: " + v);
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = lookup(key).value;
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw std::runtime_error("config: key '" + key + "' is not a bool: " + v);
}

const std::string& RunConfig::get_string(const std::string& key) const {
    return lookup(key).value;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    const std::string& v = lookup(key).value;
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' has a bad list entry: " + tok);
        }
    }
    return out;
}

std::string RunConfig::resolved_text() const {
    std::ostringstream out;
    for (const std::string& k : order_) {
        const Entry& e = entries_.at(k);
        out << "# " << e.description << "\n" << k << " = " << e.value << "\n";
    }
    return out.str();
}

}  // namespace sks
