#include <npn/taylor.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace npn {

double log2_affine(double constant, const std::vector<double>& coeffs, const std::vector<double>& x)
{
    double sum = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) sum += coeffs[j] * x[j];
    return std::log2(constant) + std::log1p(sum / constant) / std::numbers::ln2;
}

TangentPlane make_tangent(double constant, std::vector<double> coeffs, std::vector<double> point)
{
    if (!(constant > 0.0) || coeffs.size() != point.size()) {
        throw std::invalid_argument("make_tangent: need constant > 0 and matching sizes");
    }
    TangentPlane t;
    t.constant = constant;
    t.value = log2_affine(constant, coeffs, point);
    double sum = constant;
    for (std::size_t j = 0; j < coeffs.size(); ++j) sum += coeffs[j] * point[j];
    t.slope.resize(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) t.slope[j] = coeffs[j] / (std::numbers::ln2 * sum);
    t.coeffs = std::move(coeffs);
    t.point = std::move(point);
    return t;
}

double TangentPlane::log_term(const std::vector<double>& x) const { return log2_affine(constant, coeffs, x); }

double TangentPlane::bound(const std::vector<double>& x) const
{
    double b = value;
    for (std::size_t j = 0; j < slope.size(); ++j) b += slope[j] * (x[j] - point[j]);
    return b;
}

double TangentPlane::intercept() const
{
    double b = value;
    for (std::size_t j = 0; j < slope.size(); ++j) b -= slope[j] * point[j];
    return b;
}

TaylorBounds build_taylor_bounds(const RelaxedSolution& local, const ChannelRealization& ch, const NetworkConfig& cfg)
{
    local.check_dimensions(cfg);
    ch.validate(cfg);
    const auto M = cfg.num_ul_users, L = cfg.num_dl_users, N = cfg.num_subcarriers;
    const double s2 = cfg.noise_power;
    TaylorBounds tb;
    tb.num_subcarriers = N;
    std::vector<double> coeffs, point;
    for (std::size_t n = 0; n < N; ++n) {
        coeffs.assign(M, 0.0);
        point.assign(M, 0.0);
        for (std::size_t k = 0; k < M; ++k) {
            coeffs[k] = ch.f(k, n);
            point[k] = std::max(0.0, local.e_ul(k, n));
        }
        tb.ul_at_bs.push_back(make_tangent(s2, coeffs, point));
    }
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t n = 0; n < N; ++n) {
            coeffs.assign(M, 0.0);
            point.assign(M, 0.0);
            for (std::size_t k = 0; k < M; ++k) {
                coeffs[k] = ch.g(k, l, n);
                point[k] = std::max(0.0, local.e_ul(k, n));
            }
            tb.ul_at_dl_user.push_back(make_tangent(s2, coeffs, point));
        }
    }
    for (std::size_t n = 0; n < N; ++n) {
        coeffs.assign(L, ch.phi[n]);
        point.assign(L, 0.0);
        for (std::size_t l = 0; l < L; ++l) point[l] = std::max(0.0, local.e_dl(l, n));
        tb.dl_at_bs.push_back(make_tangent(s2, coeffs, point));
    }
    return tb;
}

} // namespace npn
