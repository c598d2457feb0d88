#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

Points from_dense(const lmx::FiniteSpace& dense) {
  Points pts;
  const std::size_t n = dense.cell_count();
  pts.dist.assign(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    pts.weight.push_back(dense.cell(i).weight.to_long_double());
    for (std::size_t j = 0; j < n; ++j) pts.dist[i][j] = dense.distance(i, j);
  }
  return pts;
}

std::vector<long double> maximal(const Points& pts, const std::vector<long double>& f) {
  const std::size_t n = pts.weight.size();
  std::vector<long double> out(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const long double s = pts.dist[x][y];
      long double mass = 0, integral = 0;
      for (std::size_t z = 0; z < n; ++z) {
        if (pts.dist[x][z] <= s) {
          mass += pts.weight[z];
          integral += f[z] * pts.weight[z];
        }
      }
      out[x] = std::max(out[x], integral / mass);
    }
  }
  return out;
}

namespace {

struct Step {
  long double value, from, to;  // f* = value on [from, to)
};

std::vector<Step> rearrangement(const std::vector<long double>& weight, const std::vector<long double>& f) {
  std::vector<std::size_t> idx(f.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
  std::vector<Step> steps;
  long double t = 0;
  for (std::size_t i : idx) {
    if (f[i] <= 0) break;
    steps.push_back({f[i], t, t + weight[i]});
    t += weight[i];
  }
  return steps;
}

long double simpson(const std::function<long double(long double)>& g, long double a, long double b, long double fa,
                    long double fm, long double fb, long double whole, int depth) {
  const long double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const long double flm = g(lm), frm = g(rm);
  const long double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 1e-12L * std::fabs(left + right)) {
    return left + right + (left + right - whole) / 15;
  }
  return simpson(g, a, m, fa, flm, fm, left, depth - 1) + simpson(g, m, b, fm, frm, fb, right, depth - 1);
}

long double integrate(const std::function<long double(long double)>& g, long double a, long double b) {
  const long double fa = g(a), fb = g(b), fm = g((a + b) / 2);
  return simpson(g, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 40);
}

}  // namespace

long double lorentz(const std::vector<long double>& weight, const std::vector<long double>& f, long double p,
                    long double q) {
  const auto steps = rearrangement(weight, f);
  if (std::isinf(q)) {
    long double best = 0;
    for (const auto& s : steps) best = std::max(best, std::pow(s.to, 1 / p) * s.value);
    return best;
  }
  long double total = 0;
  for (const auto& s : steps) {
    // (t^{1/p} v)^q dt/t = v^q e^{(q/p) u} du with u = log t.
    const long double k = q / p;
    const long double hi = std::log(s.to);
    const long double lo = s.from > 0 ? std::log(s.from) : hi - 80 / k;  // tail below e^-80
    total += std::pow(s.value, q) * integrate([k](long double u) { return std::exp(k * u); }, lo, hi);
  }
  return std::pow(total, 1 / q);
}

long double lorentz_exact(const std::vector<long double>& weight, const std::vector<long double>& f, long double p,
                          long double q) {
  const auto steps = rearrangement(weight, f);
  if (std::isinf(q)) return lorentz(weight, f, p, q);
  long double total = 0;
  for (const auto& s : steps) total += std::pow(s.value, q) * (p / q) * (std::pow(s.to, q / p) - std::pow(s.from, q / p));
  return std::pow(total, 1 / q);
}

std::vector<long double> lift(const lmx::FiniteSpace& cellular, const lmx::CellFunction& f) {
  std::vector<long double> out;
  for (std::size_t c = 0; c < cellular.cell_count(); ++c) {
    const auto count = cellular.cell(c).count.convert_to<std::size_t>();
    for (std::size_t k = 0; k < count; ++k) out.push_back(f.values[c].to_long_double());
  }
  return out;
}

lmx::CellFunction random_function(std::size_t cells, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  lmx::CellFunction f;
  bool any = false;
  for (std::size_t c = 0; c < cells; ++c) {
    if (u(rng) < 0.25) {
      f.values.push_back(lmx::ExtReal::zero());
    } else {
      f.values.push_back(lmx::ExtReal::from_log2(-6.0L * u(rng)));
      any = true;
    }
  }
  if (!any) f.values[0] = lmx::ExtReal::one();
  return f;
}

double rel(long double a, long double b) {
  if (a == b) return 0;
  return static_cast<double>(std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace oracle
