#include "dyadic/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "dyadic/error.hpp"

namespace dyadic {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    int max_intervals) {
  if (a == b) return {0.0, 0.0, 0};
  std::priority_queue<Panel, std::vector<Panel>, ByError> panels;
  Panel first = gauss_kronrod(f, a, b);
  double total = first.value;
  double error = first.error;
  panels.push(first);
  int count = 1;
  while (error > abs_tol) {
    if (count >= max_intervals) throw QuadratureError(total, error);
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum from the panels so the result does not carry the running
  // add/subtract round-off.
  double value = 0.0, err = 0.0;
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const Panel& p : all) {
    value += p.value;
    err += p.error;
  }
  return {value, err, count};
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                         double abs_floor, int max_doublings) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b);
  double odd_sum = f(0.5 * (a + b));
  double even_sum = 0.0;
  int panels = 2;
  double h = 0.5 * (b - a);
  double estimate = h / 3.0 * (fa + fb + 4.0 * odd_sum);
  for (int level = 0; level < max_doublings; ++level) {
    even_sum += odd_sum;
    panels *= 2;
    h *= 0.5;
    odd_sum = 0.0;
    for (int i = 1; i < panels; i += 2) odd_sum += f(a + i * h);
    const double refined = h / 3.0 * (fa + fb + 4.0 * odd_sum + 2.0 * even_sum);
    const bool converged = std::abs(refined - estimate) <= rel_tol * std::abs(refined) + abs_floor;
    estimate = refined;
    if (converged) break;
  }
  return estimate;
}

}  // namespace dyadic
