#include "eiv/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "eiv/error.hpp"

namespace eiv::quad {

namespace {

// Abscissae of the 21-point Kronrod rule; odd indices are the 10-point Gauss
// nodes.
constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067386650, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

}  // namespace

Result gauss_kronrod21(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  Result out;
  out.value = kronrod * half;
  out.abs_error = std::fabs((kronrod - gauss) * half);
  out.evaluations = 21;
  return out;
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  require(std::isfinite(a) && std::isfinite(b), "integration limits must be finite");
  if (a == b) return {};
  if (b < a) {
    Result r = integrate(f, b, a, opts);
    r.value = -r.value;
    return r;
  }

  std::priority_queue<Segment> heap;
  Result total = gauss_kronrod21(f, a, b);
  heap.push({a, b, total.value, total.abs_error});
  std::size_t evaluations = total.evaluations;
  double value = total.value;
  double error = total.abs_error;
  std::size_t subdivisions = 0;

  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(value)); };

  while (error > tolerance()) {
    if (subdivisions >= opts.max_subdivisions) {
      std::ostringstream msg;
      msg << "adaptive quadrature on [" << a << ", " << b << "] reached "
          << opts.max_subdivisions << " subdivisions with error " << error;
      fail(ErrorCode::QuadratureFailure, msg.str());
    }
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      fail(ErrorCode::QuadratureFailure, "adaptive quadrature interval underflow");
    }
    heap.pop();
    const Result left = gauss_kronrod21(f, worst.a, mid);
    const Result right = gauss_kronrod21(f, mid, worst.b);
    evaluations += left.evaluations + right.evaluations;
    value += left.value + right.value - worst.value;
    error += left.abs_error + right.abs_error - worst.error;
    heap.push({worst.a, mid, left.value, left.abs_error});
    heap.push({mid, worst.b, right.value, right.abs_error});
    ++subdivisions;

    // Re-sum occasionally so the running totals do not drift.
    if (subdivisions % 32 == 0) {
      auto copy = heap;
      value = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }

  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  total.value = value;
  total.abs_error = error;
  total.evaluations = evaluations;
  total.subdivisions = subdivisions;
  return total;
}

}  // namespace eiv::quad
