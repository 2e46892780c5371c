#pragma once

#include <functional>
#include <vector>

#include "igw/matops.hpp"

namespace igw {

double sample_mean(const VectorXd& x);
double sample_sd(const VectorXd& x);

// 0.9 * min(sd, IQR / 1.34) * n^{-1/5}.
double silverman_bandwidth(const VectorXd& x);

std::vector<double> kde(const VectorXd& x, const std::vector<double>& grid, double bandwidth);
std::vector<double> linspace(double lo, double hi, int n);
double trapezoid(const std::vector<double>& x, const std::vector<double>& f);

// 100 * (1 - 0.5 * int |f - g|) on a shared grid.
double accuracy_score(const std::vector<double>& grid, const std::vector<double>& f, const std::vector<double>& g);

double ks_distance(VectorXd sample, const std::function<double(double)>& cdf);
double ks_distance(VectorXd a, VectorXd b);

}  // namespace igw
