#include "sks/domain.hpp"

#include <cmath>

namespace sks {

Field& Field::operator+=(const Field& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

Field& Field::operator-=(const Field& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

Field& Field::operator*=(double c) {
    for (double& v : values) v *= c;
    return *this;
}

Field operator+(Field a, const Field& b) { a += b; return a; }
Field operator-(Field a, const Field& b) { a -= b; return a; }
Field operator*(double c, Field a) { a *= c; return a; }

double ModelParams::nu() const {
    double n2 = nu_sq();
    return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

void ModelParams::validate_common() const {
    if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be > 0");
    if (!(chi > 0.0)) throw std::invalid_argument("ModelParams: chi must be > 0");
    if (!(p >= 2.0)) throw std::invalid_argument("ModelParams: p must be >= 2");
}

void ModelParams::validate_divergence() const {
    validate_common();
    if (!(nu_sq() > 0.0))
        throw std::invalid_argument("ModelParams: divergence regime needs a^2 - sigma^2 > 0");
}

std::mt19937_64 RngContext::engine() const { return engine(0); }

std::mt19937_64 RngContext::engine(std::uint64_t salt) const {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
        static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return std::mt19937_64(seq);
}

Field make_gaussian_field(const DomainSpec& domain, double m0, double s,
                          double cx, double cy) {
    domain.validate();
    if (!(s > 0.0)) throw std::invalid_argument("make_gaussian_field: width must be > 0");
    if (m0 < 0.0) throw std::invalid_argument("make_gaussian_field: mass must be >= 0");
    double L = domain.half_width;
    if (std::abs(cx) >= L || std::abs(cy) >= L)
        throw std::invalid_argument("make_gaussian_field: center outside the box");
    if (s > L / 6.0)
        throw std::invalid_argument("make_gaussian_field: width too large for box (s > L/6)");

    Field f(domain);
    if (m0 == 0.0) return f;
    const double amp = m0 / (2.0 * M_PI * s * s);
    const double inv2s2 = 1.0 / (2.0 * s * s);
    for (int iy = 0; iy < domain.n; ++iy) {
        double y = domain.coord(iy) - cy;
        for (int ix = 0; ix < domain.n; ++ix) {
            double x = domain.coord(ix) - cx;
            f.at(ix, iy) = amp * std::exp(-(x * x + y * y) * inv2s2);
        }
    }
    return f;
}

double mass(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.domain.cell_area();
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double s = 0.0;
    if (p == 1.0) {
        for (double v : f.values) s += std::abs(v);
    } else if (p == 2.0) {
        for (double v : f.values) s += v * v;
    } else {
        for (double v : f.values) s += std::pow(std::abs(v), p);
    }
    return std::pow(s * f.domain.cell_area(), 1.0 / p);
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

double clip_small_negatives(Field& f, double tol) {
    double clipped = 0.0;
    for (double& v : f.values) {
        if (v < 0.0 && v > -tol) {
            clipped -= v;
            v = 0.0;
        }
    }
    return clipped * f.domain.cell_area();
}

}  // namespace sks
