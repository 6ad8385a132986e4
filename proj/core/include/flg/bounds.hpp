#ifndef FLG_BOUNDS_HPP
#define FLG_BOUNDS_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace flg::bounds {

// Euler-Mascheroni constant; the paper's proofs only use gamma > 0.5 and
// substitute 0.5, which callers can request explicitly.
inline constexpr double kEulerGamma = 0.5772156649015329;

// H(n) = sum_{i=1..n} 1/i, H(0) = 0. Exact summation (no log relaxation).
double harmonic(long long n);

// H(b) - H(a) for 0 <= a <= b, summed directly over (a, b] so that large
// offsets (e.g. b = 1e8 + r, a = 1e8) stay cheap and accurate.
double harmonic_diff(long long b, long long a);

struct ScalarMaxResult {
  double argmax = 0.0;
  double max = 0.0;
  long long invalid_count = 0; // NaN/inf samples encountered during the scan
  double first_invalid_x = 0.0;
};

// Dense grid scan (>= 10^4 points by default) followed by golden-section
// refinement inside the best grid bracket. Deterministic, also for jobs > 1
// (the grid is partitioned across threads and reduced by value, then index).
// Non-finite values are skipped but reported in the result.
ScalarMaxResult scalar_maximize(const std::function<double(double)>& f, double lo, double hi,
                                double tolerance, int grid_points = 10000, int jobs = 1);

struct BoundCurve {
  std::string function_id;
  std::string parameter_name;
  std::vector<std::pair<double, double>> samples; // (x, f(x)), ascending x
  double argmax = 0.0;
  double max = 0.0;
  double tolerance = 0.0;
  long long invalid_count = 0;
  double first_invalid_x = 0.0;
};

// PoS upper-bound expression: f(y) = (1.5 + y + ln y) / (0.5 + y - ln y).
// Its maximum over y >= 1 is the 2.36 constant (attained near y = 2.47).
double pos_ub(double y);
BoundCurve pos_ub_curve(double y_lo, double y_hi, int steps = 10000, double tolerance = 1e-6,
                        int jobs = 1);

// Asymptotic PoS lower bound over the batch-remainder fraction p:
// g(p) = (1/4 + (1/p - ln p)/2) / (3/4 + (1/p + ln p)/2); max > 1.45 near p = 0.18.
double pos_lb_asymptotic(double p);
BoundCurve pos_lb_asymptotic_curve(double p_lo, double p_hi, int steps = 10000,
                                   double tolerance = 1e-6, int jobs = 1);

// Closed-form costs of one sqrt(n)-batch of the metric lower-bound
// construction: the batch's cost in the initial configuration and the cost
// of the same agents after they migrated to the hub (facility shares at the
// hub excluded, as in the ratio the table was computed from).
//   k      batch size (sqrt(n))
//   r      number of agents with the decreasing-increment form
//   lambda agents already connected to the hub before this batch moves
//   eps    strictness slack subtracted from each of the first r increments
struct BatchCosts {
  double initial = 0.0;  // 1 + sum of x_i*
  double migrated = 0.0; // connection cost after the batch moved to the hub
};
BatchCosts pos_lb_batch_costs(long long k, long long r, long long lambda, double eps);

enum class LambdaPolicy { kN, kCustom };

struct PosLbTableQuery {
  long long n = 0;                  // perfect square
  bool maximize_r = false;          // otherwise remain_fraction is used
  double remain_fraction = 0.27;    // remaining batch = ceil(remain_fraction * k)
  LambdaPolicy lambda_policy = LambdaPolicy::kN;
  long long lambda_custom = 0;
  double eps = 0.0;
};

struct PosLbTableResult {
  double value = 0.0;
  long long r = 0;
  long long k = 0;
};

// Evaluates the exact single-batch PoS ratio of the metric lower-bound
// construction with exact harmonic sums, either at a fixed r or maximized
// over integer r in [1, k-1].
PosLbTableResult pos_lb_table(const PosLbTableQuery& q);

// Metric SPoA upper-bounding curve in y = |A_{s*}(v)| / r:
// h(y) = 1 + 2a + 2a (1 - g + ln y) / ((1/(1+a)) (y - a ln y + a (g + ln a - 1))).
// Non-positive denominators are reported in the curve, not skipped silently.
double metric_spoa_ub(double y, double alpha, double gamma);
BoundCurve metric_spoa_ub_curve(double y_lo, double y_hi, double alpha, double gamma,
                                int steps = 10000, double tolerance = 1e-6, int jobs = 1);

// Exact integer-argument form of the assembled metric SPoA bound, for a
// group of a agents of which r = |I0| + |A_s(v)| are counted as settled:
// 1 + 2a + 2a (H(a) - H(r)) / (1 + (1/(1+a)) ((a - ceil(alpha r))/r
//                                - alpha (H(a) - H(ceil(alpha r))))).
// Returns NaN when the denominator is <= 0.
double metric_spoa_eq15(long long a, long long r, double alpha);

struct Eq15Max {
  double max = 0.0;
  long long arg_a = 0;
  long long arg_r = 0;
  long long invalid_cells = 0; // cells with denominator <= 0
};

// Maximum of metric_spoa_eq15 over 1 <= r <= a <= max_group.
Eq15Max metric_spoa_eq15_max(double alpha, long long max_group);

}  // namespace flg::bounds

#endif
