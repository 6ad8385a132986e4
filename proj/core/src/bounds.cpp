#include "flg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace flg::bounds {

double harmonic(long long n) {
  if (n < 0) throw std::invalid_argument("harmonic: n must be >= 0");
  // Sum small terms first to limit rounding drift.
  double h = 0.0;
  for (long long i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

double harmonic_diff(long long b, long long a) {
  if (a < 0 || b < a) throw std::invalid_argument("harmonic_diff: need 0 <= a <= b");
  double h = 0.0;
  for (long long i = b; i > a; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

namespace {

constexpr double kGoldenInv = 0.6180339887498949; // 1/phi

// Golden-section refinement of a maximum inside [lo, hi].
std::pair<double, double> golden_refine(const std::function<double(double)>& f, double lo,
                                        double hi, double tolerance) {
  double a = lo, b = hi;
  double c = b - kGoldenInv * (b - a);
  double d = a + kGoldenInv * (b - a);
  double fc = f(c), fd = f(d);
  int guard = 0;
  while (b - a > tolerance && guard++ < 200) {
    if (std::isnan(fc) || std::isnan(fd)) break;
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGoldenInv * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGoldenInv * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

ScalarMaxResult scalar_maximize(const std::function<double(double)>& f, double lo, double hi,
                                double tolerance, int grid_points, int jobs) {
  if (!(hi > lo)) throw std::invalid_argument("scalar_maximize: empty interval");
  if (!(tolerance > 0.0)) throw std::invalid_argument("scalar_maximize: tolerance must be > 0");
  if (grid_points < 2) grid_points = 2;

  ScalarMaxResult res;
  bool have_best = false;
  int best_idx = 0;
  double best_val = 0.0;
  const double step = (hi - lo) / grid_points;

  struct Part {
    bool have = false;
    int idx = 0;
    double val = 0.0;
    long long invalid = 0;
    double first_invalid = 0.0;
  };
  auto scan = [&](int begin, int end, Part& part) {
    for (int i = begin; i < end; ++i) {
      double x = (i == grid_points) ? hi : lo + step * i;
      double v = f(x);
      if (!std::isfinite(v)) {
        if (part.invalid == 0) part.first_invalid = x;
        ++part.invalid;
        continue;
      }
      if (!part.have || v > part.val) {
        part.have = true;
        part.val = v;
        part.idx = i;
      }
    }
  };

  jobs = std::max(1, jobs);
  std::vector<Part> parts(jobs);
  if (jobs == 1) {
    scan(0, grid_points + 1, parts[0]);
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) {
      int begin = static_cast<int>(static_cast<long long>(grid_points + 1) * j / jobs);
      int end = static_cast<int>(static_cast<long long>(grid_points + 1) * (j + 1) / jobs);
      threads.emplace_back([&, begin, end, j] { scan(begin, end, parts[j]); });
    }
    for (auto& t : threads) t.join();
  }
  for (const Part& part : parts) {
    if (part.invalid > 0 && res.invalid_count == 0) res.first_invalid_x = part.first_invalid;
    res.invalid_count += part.invalid;
    if (!part.have) continue;
    if (!have_best || part.val > best_val || (part.val == best_val && part.idx < best_idx)) {
      have_best = true;
      best_val = part.val;
      best_idx = part.idx;
    }
  }
  if (!have_best) throw std::runtime_error("scalar_maximize: no finite values on the grid");

  double bl = lo + step * std::max(0, best_idx - 1);
  double bh = std::min(hi, lo + step * (best_idx + 1));
  auto [x, v] = golden_refine(f, bl, bh, tolerance);
  if (std::isfinite(v) && v >= best_val) {
    res.argmax = x;
    res.max = v;
  } else {
    res.argmax = (best_idx == grid_points) ? hi : lo + step * best_idx;
    res.max = best_val;
  }
  return res;
}

namespace {

BoundCurve make_curve(const std::string& id, const std::string& param,
                      const std::function<double(double)>& f, double lo, double hi, int steps,
                      double tolerance, int jobs) {
  BoundCurve curve;
  curve.function_id = id;
  curve.parameter_name = param;
  curve.tolerance = tolerance;
  if (steps < 2) steps = 2;
  curve.samples.assign(steps + 1, {0.0, 0.0});
  const double step = (hi - lo) / steps;
  auto fill = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      double x = (i == steps) ? hi : lo + step * i;
      curve.samples[i] = {x, f(x)};
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    fill(0, steps + 1);
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) {
      int begin = static_cast<int>(static_cast<long long>(steps + 1) * j / jobs);
      int end = static_cast<int>(static_cast<long long>(steps + 1) * (j + 1) / jobs);
      threads.emplace_back([&, begin, end] { fill(begin, end); });
    }
    for (auto& t : threads) t.join();
  }
  ScalarMaxResult mx = scalar_maximize(f, lo, hi, tolerance, std::max(steps, 10000), jobs);
  curve.argmax = mx.argmax;
  curve.max = mx.max;
  curve.invalid_count = mx.invalid_count;
  curve.first_invalid_x = mx.first_invalid_x;
  return curve;
}

}  // namespace

double pos_ub(double y) {
  return (1.5 + y + std::log(y)) / (0.5 + y - std::log(y));
}

BoundCurve pos_ub_curve(double y_lo, double y_hi, int steps, double tolerance, int jobs) {
  if (y_lo < 1.0) throw std::invalid_argument("pos_ub_curve: y must be >= 1");
  return make_curve("pos-ub", "y", pos_ub, y_lo, y_hi, steps, tolerance, jobs);
}

double pos_lb_asymptotic(double p) {
  double inv = 1.0 / p;
  double lp = std::log(p);
  return (0.25 + 0.5 * (inv - lp)) / (0.75 + 0.5 * (inv + lp));
}

BoundCurve pos_lb_asymptotic_curve(double p_lo, double p_hi, int steps, double tolerance,
                                   int jobs) {
  if (!(p_lo > 0.0 && p_hi < 1.0)) {
    throw std::invalid_argument("pos_lb_asymptotic_curve: need 0 < p < 1");
  }
  return make_curve("pos-lb-asym", "p", pos_lb_asymptotic, p_lo, p_hi, steps, tolerance, jobs);
}

BatchCosts pos_lb_batch_costs(long long k, long long r, long long lambda, double eps) {
  if (k < 2 || r < 1 || r > k - 1) throw std::invalid_argument("pos_lb_batch_costs: need 2 <= r+1 <= k");
  if (lambda < 1) throw std::invalid_argument("pos_lb_batch_costs: lambda must be >= 1");
  const double rd = static_cast<double>(r);
  const double dh_k = harmonic_diff(k, k - r);              // H(k) - H(k-r)
  const double dh_l = harmonic_diff(lambda + r, lambda);    // H(lambda+r) - H(lambda)
  const double inv_rem = 1.0 / static_cast<double>(k - r + 1);
  // x_i* = max{0, (max_j dx_j - dx_i)/2} with max_j dx_j = 1/(k-r+1);
  // the first r increments are dx_i = 1/(k-i+1) - 1/(lambda+i) - eps and the
  // remaining k-r are exactly 1/(k-r+1), contributing zero connection cost.
  const double sum_x = 0.5 * (rd * inv_rem - dh_k + dh_l + rd * eps);
  const double sum_dx_first = dh_k - dh_l - rd * eps;
  BatchCosts bc;
  bc.initial = 1.0 + sum_x;
  bc.migrated = bc.initial - 1.0 + static_cast<double>(k - r) * inv_rem + sum_dx_first;
  return bc;
}

PosLbTableResult pos_lb_table(const PosLbTableQuery& q) {
  if (q.n < 4) throw std::invalid_argument("pos_lb_table: n must be >= 4");
  long long k = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(q.n))));
  if (k * k != q.n) throw std::invalid_argument("pos_lb_table: n must be a perfect square");
  if (q.eps < 0.0) throw std::invalid_argument("pos_lb_table: eps must be >= 0");
  long long lambda = (q.lambda_policy == LambdaPolicy::kN) ? q.n : q.lambda_custom;

  auto ratio_at = [&](long long r) {
    BatchCosts bc = pos_lb_batch_costs(k, r, lambda, q.eps);
    return bc.migrated / (1.0 / static_cast<double>(k) + bc.initial);
  };

  PosLbTableResult res;
  res.k = k;
  if (q.maximize_r) {
    for (long long r = 1; r <= k - 1; ++r) {
      double v = ratio_at(r);
      if (r == 1 || v > res.value) {
        res.value = v;
        res.r = r;
      }
    }
  } else {
    if (!(q.remain_fraction > 0.0 && q.remain_fraction < 1.0)) {
      throw std::invalid_argument("pos_lb_table: remain_fraction must be in (0,1)");
    }
    long long remaining = static_cast<long long>(std::ceil(q.remain_fraction * static_cast<double>(k)));
    remaining = std::max<long long>(1, std::min(remaining, k - 1));
    res.r = k - remaining;
    res.value = ratio_at(res.r);
  }
  return res;
}

double metric_spoa_ub(double y, double alpha, double gamma) {
  double denom = (1.0 / (1.0 + alpha)) * (y - alpha * std::log(y) + alpha * (gamma + std::log(alpha) - 1.0));
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 + 2.0 * alpha + 2.0 * alpha * (1.0 - gamma + std::log(y)) / denom;
}

BoundCurve metric_spoa_ub_curve(double y_lo, double y_hi, double alpha, double gamma, int steps,
                                double tolerance, int jobs) {
  if (y_lo < 1.0) throw std::invalid_argument("metric_spoa_ub_curve: y must be >= 1");
  if (alpha < 1.0) throw std::invalid_argument("metric_spoa_ub_curve: alpha must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("metric_spoa_ub_curve: gamma in (0,1)");
  auto f = [alpha, gamma](double y) { return metric_spoa_ub(y, alpha, gamma); };
  return make_curve("metric-spoa-ub", "y", f, y_lo, y_hi, steps, tolerance, jobs);
}

double metric_spoa_eq15(long long a, long long r, double alpha) {
  if (a < 1 || r < 1 || r > a) throw std::invalid_argument("metric_spoa_eq15: need 1 <= r <= a");
  if (alpha < 1.0) throw std::invalid_argument("metric_spoa_eq15: alpha must be >= 1");
  long long ar = static_cast<long long>(std::ceil(alpha * static_cast<double>(r) - 1e-12));
  double ha = harmonic(a);
  double num = ha - harmonic(r);
  double denom = 1.0 + (1.0 / (1.0 + alpha)) *
                           ((static_cast<double>(a - ar)) / static_cast<double>(r) -
                            alpha * (ha - harmonic(ar)));
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 + 2.0 * alpha + 2.0 * alpha * num / denom;
}

Eq15Max metric_spoa_eq15_max(double alpha, long long max_group) {
  if (max_group < 1) throw std::invalid_argument("metric_spoa_eq15_max: max_group must be >= 1");
  Eq15Max out;
  bool have = false;
  for (long long a = 1; a <= max_group; ++a) {
    for (long long r = 1; r <= a; ++r) {
      double v = metric_spoa_eq15(a, r, alpha);
      if (std::isnan(v)) {
        ++out.invalid_cells;
        continue;
      }
      if (!have || v > out.max) {
        have = true;
        out.max = v;
        out.arg_a = a;
        out.arg_r = r;
      }
    }
  }
  if (!have) throw std::runtime_error("metric_spoa_eq15_max: no valid cells");
  return out;
}

}  // namespace flg::bounds
