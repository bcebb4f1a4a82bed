#pragma once
#include <cstddef>
#include <vector>

#include <npn/model.hpp>

namespace npn {

/*
 * First-order expansion of log2(constant + coeffs . x) at `point`.
 * The bound is stored in (x - point) form, so it reproduces `value`
 * exactly at the expansion point.
 */
struct TangentPlane
{
    double constant = 1.0;
    std::vector<double> coeffs;
    std::vector<double> point;
    double value = 0.0;
    std::vector<double> slope;

    double log_term(const std::vector<double>& x) const;
    double bound(const std::vector<double>& x) const;
    /// value - slope . point, i.e. the bound at x = 0.
    double intercept() const;
};

TangentPlane make_tangent(double constant, std::vector<double> coeffs, std::vector<double> point);

/// log2(constant + coeffs . x), accurate when the sum is small relative to constant.
double log2_affine(double constant, const std::vector<double>& coeffs, const std::vector<double>& x);

/*
 * Upper bounds on the concave interference terms, in physical units (mW):
 *   ul_at_bs[n]          log2(sum_k e_ul(k,n) f(k,n) + sigma2)      variables e_ul(., n)
 *   ul_at_dl_user[l*N+n] log2(sum_k e_ul(k,n) g(k,l,n) + sigma2)    variables e_ul(., n)
 *   dl_at_bs[n]          log2(sum_l e_dl(l,n) phi[n] + sigma2)      variables e_dl(., n)
 */
struct TaylorBounds
{
    std::size_t num_subcarriers = 0;
    std::vector<TangentPlane> ul_at_bs;
    std::vector<TangentPlane> ul_at_dl_user;
    std::vector<TangentPlane> dl_at_bs;

    const TangentPlane& ul_at_dl(std::size_t l, std::size_t n) const { return ul_at_dl_user[l * num_subcarriers + n]; }
};

TaylorBounds build_taylor_bounds(const RelaxedSolution& local, const ChannelRealization& ch, const NetworkConfig& cfg);

} // namespace npn
