#include "igw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace igw {

double sample_mean(const VectorXd& x)
{
    if (x.size() == 0) throw DimensionMismatch("sample_mean of an empty sample");
    return x.mean();
}

double sample_sd(const VectorXd& x)
{
    if (x.size() < 2) return 0.0;
    const double m = x.mean();
    return std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
}

namespace {

double quantile_sorted(const std::vector<double>& v, double p)
{
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

}  // namespace

double silverman_bandwidth(const VectorXd& x)
{
    if (x.size() < 2) return 0.0;
    std::vector<double> v(x.data(), x.data() + x.size());
    std::sort(v.begin(), v.end());
    const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    const double sd = sample_sd(x);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

std::vector<double> kde(const VectorXd& x, const std::vector<double>& grid, double bandwidth)
{
    if (!(bandwidth > 0.0)) throw DomainError("kde: bandwidth must be positive");
    std::vector<double> out(grid.size(), 0.0);
    std::vector<double> v(x.data(), x.data() + x.size());
    std::sort(v.begin(), v.end());
    const double c = 1.0 / (static_cast<double>(v.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    const double reach = 8.0 * bandwidth;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        auto lo = std::lower_bound(v.begin(), v.end(), grid[g] - reach);
        auto hi = std::upper_bound(v.begin(), v.end(), grid[g] + reach);
        double s = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double z = (grid[g] - *it) / bandwidth;
            s += std::exp(-0.5 * z * z);
        }
        out[g] = c * s;
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f)
{
    if (x.size() != f.size()) throw DimensionMismatch("trapezoid: grid and values differ in length");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

double accuracy_score(const std::vector<double>& grid, const std::vector<double>& f, const std::vector<double>& g)
{
    if (f.size() != grid.size() || g.size() != grid.size())
        throw DimensionMismatch("accuracy_score: densities must share the grid");
    std::vector<double> diff(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = std::abs(f[i] - g[i]);
    return 100.0 * (1.0 - 0.5 * trapezoid(grid, diff));
}

double ks_distance(VectorXd sample, const std::function<double(double)>& cdf)
{
    std::sort(sample.data(), sample.data() + sample.size());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (Index i = 0; i < sample.size(); ++i) {
        const double F = cdf(sample(i));
        d = std::max({d, std::abs((i + 1) / n - F), std::abs(F - i / n)});
    }
    return d;
}

double ks_distance(VectorXd a, VectorXd b)
{
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    Index i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a(i), b(j));
        while (i < a.size() && a(i) <= x) ++i;
        while (j < b.size() && b(j) <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

}  // namespace igw
