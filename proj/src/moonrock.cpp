#include <algorithm>
#include <cmath>

#include "igw/distributions.hpp"

namespace igw {

namespace {

// d/ds of the log kernel in s = log t.
double dlog_kernel(double alpha, double beta, double s)
{
    const double t = std::exp(s);
    return t * (alpha * (1.0 + log_minus_digamma(t)) - beta) + 1.0;
}

}  // namespace

MoonRock::MoonRock(double alpha, double beta) : alpha_(alpha), beta_(beta)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidHyperparameter("Moon Rock alpha must be >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidHyperparameter("Moon Rock beta must be > 0");

    // The slope of the log kernel is alpha + 1 > 0 near s = -inf; a finite
    // integral needs it to turn negative somewhere on the right.
    double lo = -40.0, hi = 50.0;
    if (dlog_kernel(alpha, beta, hi) >= 0.0)
        throw DivergentIntegral("Moon Rock(" + std::to_string(alpha) + ", " + std::to_string(beta) +
                                ") has a non-integrable upper tail");
    while (dlog_kernel(alpha, beta, lo) <= 0.0) lo -= 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dlog_kernel(alpha, beta, mid) > 0.0 ? lo : hi) = mid;
    }
    const double mode = 0.5 * (lo + hi);
    const double t = std::exp(mode);
    const double f2 = -1.0 + alpha * t * (1.0 - t * trigamma(t));
    const double width = f2 < 0.0 ? std::clamp(1.0 / std::sqrt(-f2), 1e-4, 2.0) : 1.0;
    quad_ = integrate_exp([this](double s) { return log_kernel_s(s); }, mode, width);
}

double MoonRock::log_kernel_s(double s) const
{
    const double t = std::exp(s);
    const double a = alpha_ == 0.0 ? 0.0 : alpha_ * xlogx_minus_lgamma(t);
    return a - beta_ * t + s;
}

double MoonRock::normalizer() const { return std::exp(quad_.log_integral); }

double MoonRock::mean() const
{
    return quad_.expectation([](double s) { return std::exp(s); });
}

double MoonRock::mean_log() const
{
    return quad_.expectation([](double s) { return s; });
}

double MoonRock::log_density(double t) const
{
    if (!(t > 0.0)) throw DomainError("Moon Rock density requires t > 0");
    const double a = alpha_ == 0.0 ? 0.0 : alpha_ * xlogx_minus_lgamma(t);
    return a - beta_ * t - quad_.log_integral;
}

double MoonRock::upper_point(double mass) const
{
    double acc = 0.0;
    for (std::size_t k = quad_.nodes.size(); k-- > 0;) {
        acc += std::exp(quad_.log_terms[k] - quad_.log_integral);
        if (acc >= mass) return std::exp(quad_.nodes[std::min(k + 1, quad_.nodes.size() - 1)]);
    }
    return std::exp(quad_.nodes.front());
}

std::pair<double, double> MoonRock::log_support() const { return {quad_.nodes.front(), quad_.nodes.back()}; }

double moonrock_normalizer(const MoonRockParams& p) { return MoonRock(p).normalizer(); }
double moonrock_mean(const MoonRockParams& p) { return MoonRock(p).mean(); }

MoonRockSampler::MoonRockSampler(const MoonRock& mr, int grid_size)
{
    if (grid_size < 2) throw DomainError("Moon Rock sampler grid needs at least 2 nodes");
    const auto [lo, hi] = mr.log_support();
    s_.resize(grid_size);
    std::vector<double> lf(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        s_[i] = lo + (hi - lo) * i / (grid_size - 1);
        lf[i] = mr.log_kernel_s(s_[i]);
    }
    const double m = *std::max_element(lf.begin(), lf.end());
    cdf_.assign(grid_size, 0.0);
    for (int i = 1; i < grid_size; ++i)
        cdf_[i] = cdf_[i - 1] + 0.5 * (std::exp(lf[i - 1] - m) + std::exp(lf[i] - m)) * (s_[i] - s_[i - 1]);
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
}

double MoonRockSampler::operator()(Rng& rng) const
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double u = u01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return std::exp(s_.back());
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    return std::exp(s_[i - 1] + frac * (s_[i] - s_[i - 1]));
}

}  // namespace igw
