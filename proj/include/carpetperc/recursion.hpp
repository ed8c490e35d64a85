#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace carpetperc {

struct ScalarResult {
  double value = 0.0;
  double residual = 0.0;
};

/// RSW family: f_1 = f_2 = x, f_3 = (1-sqrt(1-x))^3, f_{2k} = x f_{k+1}^2, f_{2k+1} = x f_{k+1} f_{k+2}.
double eval_f(int k, double x);
/// g_2(a,b) = (1-sqrt(1-b))^2 (1-sqrt(1-f_3(a)))^2 (1-sqrt(1-a))^2 f_3(a), g_{k+1} = b g_k g_2.
double eval_g(int k, double a, double b);

double eval_phi(double x);  // 1-(1-x)^2
double eval_psi(double x);  // 1-(1-x^5)^2

struct ThresholdIterates {
  std::vector<double> iterates;  // psi^(k)(1 - theta/25), k = 0..K
  std::vector<double> bounds;    // 1 - theta^(2^k)/25
  bool certified = true;
};
ThresholdIterates iterate_threshold(double theta, int K);

/// Positive solution of t = f(c t), f(t) = 2t - t^2, c = (1-eps)^2.
ScalarResult solve_x_eps(double eps);
/// p with 1-(1-sqrt(p))^4 = (1-eps)^8.
ScalarResult solve_p_eps(double eps);

/// Offspring law Binomial(2, p): extinction probability (smallest fixed point of the pgf).
double gw_extinction(double p);
/// P(extinct by generation n), by n-fold pgf iteration from 0.
double gw_generation_law(double p, int n);

struct GwSimulation {
  double p = 0.0;
  int generations = 0;
  std::uint64_t runs = 0;
  std::vector<std::uint64_t> final_size;  // Z_n per run
  std::uint64_t extinct = 0;              // runs with Z_n = 0

  /// Empirical P(Z_n >= k).
  double survival_at_least(std::uint64_t k) const;
};
GwSimulation gw_simulate(double p, int generations, std::uint64_t runs, std::uint64_t seed);

struct SeriesPoint {
  int n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct DoubleExpFit {
  int beta = 2;
  double C = 0.0;
  double alpha = 0.0;
  bool saturated = false;    // some point has mean 1; no fit attempted
  bool well_posed = false;   // fitted 0 < alpha < 1 and C > 0
  bool bound_holds = false;  // 1 - C alpha^(beta^n) <= mean + 3 stderr at every point
  std::string diagnostic;
};

/// Least squares of log(1 - P_n) = log C + beta^n log alpha.
DoubleExpFit fit_double_exponential(const std::vector<SeriesPoint>& series, int beta);

}  // namespace carpetperc
