#include "carpetperc/recursion.hpp"

#include <cmath>
#include <random>

#include "carpetperc/error.hpp"
#include "carpetperc/percolation.hpp"

namespace carpetperc {

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::Domain, std::string(what) + " = " + std::to_string(x) + " outside [0,1]");
}

double sqrt_trick(double x) { return 1.0 - std::sqrt(1.0 - x); }

}  // namespace

double eval_f(int k, double x) {
  check_unit(x, "x");
  if (k < 1) throw Error(ErrorKind::Domain, "f_k needs k >= 1");
  std::vector<double> f(static_cast<std::size_t>(std::max(k, 3)) + 2, 0.0);
  f[1] = f[2] = x;
  f[3] = std::pow(sqrt_trick(x), 3);
  for (int m = 4; m <= k; ++m) {
    const int h = m / 2;
    f[m] = m % 2 == 0 ? x * f[h + 1] * f[h + 1] : x * f[h + 1] * f[h + 2];
  }
  return f[k];
}

double eval_g(int k, double a, double b) {
  check_unit(a, "a");
  check_unit(b, "b");
  if (k < 2) throw Error(ErrorKind::Domain, "g_k needs k >= 2");
  const double f3 = eval_f(3, a);
  const double g2 = std::pow(sqrt_trick(b), 2) * std::pow(sqrt_trick(f3), 2) * std::pow(sqrt_trick(a), 2) * f3;
  double g = g2;
  for (int m = 3; m <= k; ++m) g = b * g * g2;
  return g;
}

double eval_phi(double x) {
  check_unit(x, "x");
  return 1.0 - (1.0 - x) * (1.0 - x);
}

double eval_psi(double x) {
  check_unit(x, "x");
  const double t = 1.0 - std::pow(x, 5);
  return 1.0 - t * t;
}

ThresholdIterates iterate_threshold(double theta, int K) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorKind::Domain, "theta must lie in (0,1)");
  if (K < 0) throw Error(ErrorKind::Domain, "negative iterate count");
  ThresholdIterates r;
  double x = 1.0 - theta / 25.0;
  for (int k = 0; k <= K; ++k) {
    const double bound = 1.0 - std::pow(theta, std::ldexp(1.0, k)) / 25.0;
    r.iterates.push_back(x);
    r.bounds.push_back(bound);
    r.certified = r.certified && x >= bound;
    x = eval_psi(x);
  }
  return r;
}

ScalarResult solve_x_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorKind::Domain, "epsilon must lie in [0,1)");
  const double c = (1.0 - eps) * (1.0 - eps);
  if (2.0 * c <= 1.0 + 1e-12) throw Error(ErrorKind::Subcritical, "(1-eps)^2 <= 1/2 leaves only the zero solution");
  const double t = (2.0 * c - 1.0) / (c * c);
  const double ct = c * t;
  return {t, std::abs(t - (2.0 * ct - ct * ct))};
}

ScalarResult solve_p_eps(double eps) {
  check_unit(eps, "epsilon");
  const double target = std::pow(1.0 - eps, 8);
  const double root = 1.0 - std::pow(1.0 - target, 0.25);
  const double p = root * root;
  return {p, std::abs(1.0 - std::pow(1.0 - std::sqrt(p), 4) - target)};
}

double gw_extinction(double p) {
  check_unit(p, "p");
  if (p <= 0.5) return 1.0;
  const double r = (1.0 - p) / p;
  return r * r;
}

double gw_generation_law(double p, int n) {
  check_unit(p, "p");
  if (n < 0) throw Error(ErrorKind::Domain, "negative generation");
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (1.0 - p) + p * s;
    s = t * t;
  }
  return s;
}

double GwSimulation::survival_at_least(std::uint64_t k) const {
  if (runs == 0) return 0.0;
  std::uint64_t c = 0;
  for (auto z : final_size) c += z >= k;
  return static_cast<double>(c) / static_cast<double>(runs);
}

GwSimulation gw_simulate(double p, int generations, std::uint64_t runs, std::uint64_t seed) {
  check_unit(p, "p");
  if (generations < 0) throw Error(ErrorKind::Domain, "negative generation count");
  GwSimulation s;
  s.p = p;
  s.generations = generations;
  s.runs = runs;
  s.final_size.reserve(runs);
  for (std::uint64_t r = 0; r < runs; ++r) {
    std::mt19937_64 rng(Stream{seed, StreamTag::Auxiliary, r}.prefix());
    std::uint64_t z = 1;
    for (int g = 0; g < generations && z > 0; ++g) {
      std::binomial_distribution<std::uint64_t> bin(2 * z, p);
      z = bin(rng);
    }
    s.final_size.push_back(z);
    s.extinct += z == 0;
  }
  return s;
}

DoubleExpFit fit_double_exponential(const std::vector<SeriesPoint>& series, int beta) {
  DoubleExpFit fit;
  fit.beta = beta;
  if (beta < 2) throw Error(ErrorKind::Domain, "beta must be at least 2");
  if (series.size() < 3) throw Error(ErrorKind::Argument, "need at least 3 points");
  for (const auto& pt : series)
    if (pt.mean >= 1.0) {
      fit.saturated = true;
      fit.diagnostic = "saturated at n=" + std::to_string(pt.n);
      return fit;
    }
  // y = a + b*x with x = beta^n, y = log(1 - P)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(series.size());
  for (const auto& pt : series) {
    const double x = std::pow(static_cast<double>(beta), pt.n);
    const double y = std::log(1.0 - pt.mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) {
    fit.diagnostic = "degenerate abscissae";
    return fit;
  }
  const double b = (m * sxy - sx * sy) / den;
  const double a = (sy - b * sx) / m;
  fit.C = std::exp(a);
  fit.alpha = std::exp(b);
  fit.well_posed = fit.alpha > 0.0 && fit.alpha < 1.0 - 1e-12 && fit.C > 0.0;
  fit.bound_holds = fit.well_posed;
  for (const auto& pt : series) {
    const double bound = 1.0 - fit.C * std::pow(fit.alpha, std::pow(static_cast<double>(beta), pt.n));
    if (bound > pt.mean + 3.0 * pt.stderr_ + 1e-12) fit.bound_holds = false;
  }
  fit.diagnostic = fit.well_posed ? (fit.bound_holds ? "ok" : "bound violated") : "no double-exponential decay";
  return fit;
}

}  // namespace carpetperc
