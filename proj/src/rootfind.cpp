#include "gafzeros/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gafzeros/errors.hpp"

namespace gafz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFinalResidual = 1e-12;

struct NewtonEval {
  cdouble ratio;  // p / p'
  double residual;
};

// q ascending, degree d = q.size() - 1 >= 1, q[0] and q[d] nonzero; aq holds
// |q_j|. Horner in real arithmetic, reversed for |z| > 1.
NewtonEval newton_eval(const std::vector<cdouble>& q,
                       const std::vector<double>& aq, cdouble z) {
  const std::size_t d = q.size() - 1;
  const double r = std::abs(z);
  if (r <= 1.0) {
    const double zr = z.real();
    const double zi = z.imag();
    double pr = q[d].real(), pi = q[d].imag();
    double dr = 0.0, di = 0.0;
    double a = aq[d];
    for (std::size_t j = d; j-- > 0;) {
      const double ndr = dr * zr - di * zi + pr;
      di = dr * zi + di * zr + pi;
      dr = ndr;
      const double npr = pr * zr - pi * zi + q[j].real();
      pi = pr * zi + pi * zr + q[j].imag();
      pr = npr;
      a = a * r + aq[j];
    }
    const cdouble p(pr, pi);
    const cdouble dp(dr, di);
    const cdouble ratio = dp == 0.0 ? p : p / dp;
    return {ratio, std::abs(p) / a};
  }
  // p(z) = z^d rev(1/z), p'(z) = z^{d-1} (d rev - zeta rev').
  const cdouble zeta = 1.0 / z;
  const double rz = 1.0 / r;
  const double zr = zeta.real();
  const double zi = zeta.imag();
  double sr = q[0].real(), si = q[0].imag();
  double dr = 0.0, di = 0.0;
  double a = aq[0];
  for (std::size_t j = 1; j <= d; ++j) {
    const double ndr = dr * zr - di * zi + sr;
    di = dr * zi + di * zr + si;
    dr = ndr;
    const double nsr = sr * zr - si * zi + q[j].real();
    si = sr * zi + si * zr + q[j].imag();
    sr = nsr;
    a = a * rz + aq[j];
  }
  const cdouble s(sr, si);
  const cdouble ds(dr, di);
  const cdouble denom = static_cast<double>(d) * s - zeta * ds;
  const cdouble ratio = denom == 0.0 ? s : z * s / denom;
  return {ratio, std::abs(s) / a};
}

// Starting points on circles whose radii come from the upper convex hull of
// (j, log|q_j|).
std::vector<cdouble> newton_polygon_start(const std::vector<cdouble>& q) {
  const int d = static_cast<int>(q.size()) - 1;
  std::vector<int> hull;
  for (int j = 0; j <= d; ++j) {
    if (q[static_cast<std::size_t>(j)] == 0.0) continue;
    const double yj = std::log(std::abs(q[static_cast<std::size_t>(j)]));
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      const double ya = std::log(std::abs(q[static_cast<std::size_t>(a)]));
      const double yb = std::log(std::abs(q[static_cast<std::size_t>(b)]));
      // Drop b when it lies on or below the chord from a to j.
      if ((yb - ya) * (j - a) <= (yj - ya) * (b - a)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(j);
  }
  std::vector<cdouble> start;
  start.reserve(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const int i = hull[s];
    const int k = hull[s + 1];
    const int m = k - i;
    const double radius =
        std::exp((std::log(std::abs(q[static_cast<std::size_t>(i)])) -
                  std::log(std::abs(q[static_cast<std::size_t>(k)]))) /
                 m);
    for (int t = 0; t < m; ++t) {
      const double angle = 2.0 * kPi * t / m + 2.0 * kPi * i / d + 0.7;
      start.push_back(std::polar(radius, angle));
    }
  }
  return start;
}

}  // namespace

double polynomial_relative_residual(const std::vector<cdouble>& coefficients,
                                    cdouble z) {
  const auto v = detail::polynomial_scaled(coefficients, z);
  double a = 0.0;
  const double r = std::abs(z);
  if (r <= 1.0) {
    for (std::size_t j = coefficients.size(); j-- > 0;) {
      a = a * r + std::abs(coefficients[j]);
    }
  } else {
    const double rz = 1.0 / r;
    for (const auto& c : coefficients) a = a * rz + std::abs(c);
  }
  if (a == 0.0) return 0.0;
  return std::abs(v.mantissa) / a;
}

std::vector<cdouble> roots_polynomial(const std::vector<cdouble>& coefficients,
                                      const std::vector<cdouble>& initial,
                                      const RootOptions& options,
                                      int* iterations) {
  std::size_t lo = 0;
  std::size_t hi = coefficients.size();
  while (hi > 0 && coefficients[hi - 1] == 0.0) --hi;
  while (lo < hi && coefficients[lo] == 0.0) ++lo;
  if (hi == 0 || hi - 1 < 1) {
    throw std::invalid_argument("polynomial must have degree >= 1");
  }
  for (std::size_t j = lo; j < hi; ++j) {
    if (!std::isfinite(coefficients[j].real()) ||
        !std::isfinite(coefficients[j].imag())) {
      throw std::invalid_argument("polynomial coefficients must be finite");
    }
  }

  std::vector<cdouble> roots(lo, cdouble(0.0));
  if (iterations) *iterations = 0;
  const std::vector<cdouble> q(coefficients.begin() + static_cast<long>(lo),
                               coefficients.begin() + static_cast<long>(hi));
  const std::size_t d = q.size() - 1;
  if (d == 0) return roots;
  std::vector<double> aq(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) aq[j] = std::abs(q[j]);
  if (d == 1) {
    roots.push_back(-q[0] / q[1]);
    return roots;
  }

  std::vector<cdouble> z =
      initial.size() == d ? initial : newton_polygon_start(q);
  const double stop = 2.0 * static_cast<double>(d + 1) * kEps;
  std::vector<char> done(d, 0);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    bool all_done = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      const NewtonEval e = newton_eval(q, aq, z[i]);
      if (e.residual <= stop) {
        done[i] = 1;
        continue;
      }
      all_done = false;
      // sum_{j != i} 1/(z_i - z_j) in real arithmetic; library complex
      // division dominates the run time otherwise.
      const double xr = z[i].real();
      const double xi = z[i].imag();
      double sr = 0.0;
      double si = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        const double dr = xr - z[j].real();
        const double di = xi - z[j].imag();
        const double inv = 1.0 / (dr * dr + di * di);
        sr += dr * inv;
        si -= di * inv;
      }
      const cdouble s(sr, si);
      const cdouble delta = e.ratio / (1.0 - e.ratio * s);
      if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) {
        continue;
      }
      z[i] -= delta;
      if (std::abs(delta) <= 2.0 * kEps * std::abs(z[i])) done[i] = 1;
    }
    if (all_done) break;
  }
  if (iterations) *iterations = it;

  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    NewtonEval e = newton_eval(q, aq, z[i]);
    for (int step = 0; step < options.polish_steps; ++step) {
      const cdouble candidate = z[i] - e.ratio;
      const NewtonEval ec = newton_eval(q, aq, candidate);
      if (!(ec.residual < e.residual)) break;
      z[i] = candidate;
      e = ec;
    }
    worst = std::max(worst, e.residual);
  }
  if (!(worst <= kFinalResidual)) {
    throw RootFindError("Aberth iteration did not converge: worst relative "
                        "residual " + std::to_string(worst) + " after " +
                            std::to_string(it) + " iterations",
                        worst);
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

std::pair<std::vector<cdouble>, std::vector<cdouble>> su2_chart_roots(
    const RandomSection& section) {
  const auto& c = section.scaled;
  const std::vector<cdouble> reversed(c.rbegin(), c.rend());
  const bool has_chart0 =
      std::any_of(c.begin() + 1, c.end(), [](cdouble v) { return v != 0.0; });
  const bool has_chart1 = std::any_of(reversed.begin() + 1, reversed.end(),
                                      [](cdouble v) { return v != 0.0; });
  std::vector<cdouble> chart0;
  if (has_chart0) chart0 = roots_polynomial(c);
  std::vector<cdouble> warm;
  for (const auto& z : chart0) {
    if (z != 0.0) warm.push_back(1.0 / z);
  }
  std::vector<cdouble> chart1;
  if (has_chart1) chart1 = roots_polynomial(reversed, warm);
  return {std::move(chart0), std::move(chart1)};
}

double relative_residual(const RandomSection& section, const SurfacePoint& p) {
  const auto& spec = section.spec;
  switch (spec.model) {
    case Model::SU2: {
      if (p.chart == Chart::Affine0) {
        return polynomial_relative_residual(section.scaled, p.coord);
      }
      const std::vector<cdouble> reversed(section.scaled.rbegin(),
                                          section.scaled.rend());
      return polynomial_relative_residual(reversed, p.coord);
    }
    case Model::TorusTheta: {
      const auto v = detail::theta_section(section.coefficients, spec.degree,
                                           p.coord, false);
      return v.abs_sum == 0.0 ? 0.0 : std::abs(v.value) / v.abs_sum;
    }
    case Model::GEF:
      return polynomial_relative_residual(section.scaled,
                                          p.coord / spec.radius);
  }
  return 0.0;
}

ZeroSet zeros_su2(const RandomSection& section) {
  if (section.spec.model != Model::SU2) {
    throw std::invalid_argument("zeros_su2 needs an SU2 section");
  }
  // One Aberth pass finds all roots: the iteration evaluates the reversed
  // polynomial for |z| > 1, whose relative residual equals the chart 1
  // residual, so no second simultaneous pass in chart 1 is needed.
  const auto& c = section.scaled;
  std::size_t at_infinity = 0;
  while (at_infinity < c.size() && c[c.size() - 1 - at_infinity] == 0.0) {
    ++at_infinity;
  }
  if (at_infinity == c.size()) {
    throw NumericalError("SU2 section is identically zero");
  }
  ZeroSet out;
  out.spec = section.spec;
  if (at_infinity + 1 < c.size()) {
    // Roots outside the unit disk are refined by Newton steps on the
    // reversed polynomial in zeta = 1/z, i.e. computed in chart 1.
    std::vector<cdouble> reversed(c.rbegin(), c.rend());
    std::size_t lead = 0;
    while (reversed[lead] == 0.0) ++lead;
    reversed.erase(reversed.begin(), reversed.begin() + static_cast<long>(lead));
    std::vector<double> ar(reversed.size());
    for (std::size_t j = 0; j < reversed.size(); ++j) ar[j] = std::abs(reversed[j]);
    for (const auto& z : roots_polynomial(c, {}, {}, &out.iterations)) {
      const SurfacePoint p = make_point(section.spec, z);
      if (p.chart == Chart::Affine0 || reversed.size() < 2) {
        out.zeros.push_back(p);
        continue;
      }
      cdouble zeta = p.coord;
      NewtonEval e = newton_eval(reversed, ar, zeta);
      for (int step = 0; step < 2; ++step) {
        const cdouble candidate = zeta - e.ratio;
        const NewtonEval ec = newton_eval(reversed, ar, candidate);
        if (!(ec.residual < e.residual)) break;
        zeta = candidate;
        e = ec;
      }
      out.zeros.push_back(std::abs(zeta) <= 1.0
                              ? SurfacePoint{Chart::Affine1, zeta}
                              : make_point(section.spec, 1.0 / zeta));
    }
  }
  for (std::size_t t = 0; t < at_infinity; ++t) {
    out.zeros.push_back({Chart::Affine1, 0.0});
  }
  if (static_cast<int>(out.zeros.size()) != section.spec.degree) {
    throw NumericalError("SU2 zero count " + std::to_string(out.zeros.size()) +
                         " != n = " + std::to_string(section.spec.degree));
  }
  out.residuals.reserve(out.zeros.size());
  for (const auto& p : out.zeros) {
    out.residuals.push_back(relative_residual(section, p));
  }
  return out;
}

namespace {

struct TorusRetry {};

constexpr int kTorusGrid = 64;
constexpr int kTorusMaxDepth = 24;
constexpr int kTorusMaxJitters = 8;

// Value and logarithmic derivative theta'/theta of the section at z.
struct TorusSample {
  cdouble z;
  cdouble value;
  cdouble log_derivative;
};

// Phase tracking of the weighted section. Increments between samples are
// accepted when the principal phase difference agrees with the trapezoid
// integral of the exact phase rate; otherwise the segment is halved. Along a
// horizontal line the theta terms rotate together at rate -2 pi n y, so that
// drift is removed before taking the principal value.
class TorusField {
 public:
  explicit TorusField(const RandomSection& section)
      : b_(section.coefficients), n_(section.spec.degree) {}

  TorusSample sample(cdouble z) const {
    const auto v = detail::theta_section(b_, n_, z, true, kThetaCutoff, false);
    if (v.value == 0.0) throw TorusRetry{};
    return {z, v.value, v.derivative / v.value};
  }

  double increment(const TorusSample& p, const TorusSample& q,
                   int depth = 0) const {
    if (depth > 40) throw TorusRetry{};
    const cdouble step = q.z - p.z;
    double drift = 0.0;
    if (p.z.imag() == q.z.imag()) {
      drift = -2.0 * kPi * n_ * p.z.imag() * step.real();
    }
    const double d =
        std::arg(q.value / p.value * std::polar(1.0, -drift)) + drift;
    const double trapezoid =
        0.5 * (step * (p.log_derivative + q.log_derivative)).imag();
    if (std::abs(d - drift) < kPi / 2.0 && std::abs(d - trapezoid) < 0.5) {
      return d;
    }
    const TorusSample m = sample(0.5 * (p.z + q.z));
    return increment(p, m, depth + 1) + increment(m, q, depth + 1);
  }

  // Newton on theta(z) e^{2 pi i n y0 z}, y0 = Im(start). The exponential
  // cancels the dominant growth of theta'/theta, which would otherwise shrink
  // the basin of attraction to size ~1/n.
  bool newton(cdouble start, cdouble& root) const {
    cdouble z = start;
    const cdouble shift(0.0, 2.0 * kPi * n_ * start.imag());
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
      const auto v =
          detail::theta_section(b_, n_, z, true, kThetaCutoff, false);
      const cdouble denom = v.derivative + shift * v.value;
      if (denom == 0.0) return false;
      const cdouble delta = v.value / denom;
      const double step = std::abs(delta);
      // Stop at the roundoff floor, where steps stop shrinking.
      if (step < 1e-9 && step >= 0.5 * last) break;
      z -= delta;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
      if (step <= 1e-14) break;
      last = step;
    }
    root = z;
    const auto v = detail::theta_section(b_, n_, z, false);
    return v.abs_sum > 0.0 && std::abs(v.value) <= 1e-12 * v.abs_sum;
  }

  int degree() const { return n_; }

 private:
  const std::vector<cdouble>& b_;
  int n_;
};

int to_winding(double total_phase) {
  const double w = total_phase / (2.0 * kPi);
  const double r = std::round(w);
  if (std::abs(w - r) > 1e-6) throw TorusRetry{};
  return static_cast<int>(r);
}

void resolve_cell(const TorusField& f, cdouble corner, double h, int winding,
                  int depth, std::vector<cdouble>& found) {
  if (winding == 0) return;
  if (winding < 0) throw TorusRetry{};
  if (winding == 1) {
    cdouble root;
    const cdouble center = corner + cdouble(0.5 * h, 0.5 * h);
    if (f.newton(center, root) && root.real() >= corner.real() &&
        root.real() <= corner.real() + h && root.imag() >= corner.imag() &&
        root.imag() <= corner.imag() + h) {
      found.push_back(root);
      return;
    }
  }
  if (depth >= kTorusMaxDepth) throw TorusRetry{};

  const double s = 0.5 * h;
  TorusSample g[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) g[i][k] = f.sample(corner + cdouble(i * s, k * s));
  }
  double horiz[2][3];
  double vert[3][2];
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 3; ++k) horiz[i][k] = f.increment(g[i][k], g[i + 1][k]);
  }
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 2; ++k) vert[i][k] = f.increment(g[i][k], g[i][k + 1]);
  }
  int total = 0;
  int child[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      child[i][k] = to_winding(horiz[i][k] + vert[i + 1][k] -
                               horiz[i][k + 1] - vert[i][k]);
      total += child[i][k];
    }
  }
  if (total != winding) throw TorusRetry{};
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      resolve_cell(f, g[i][k].z, s, child[i][k], depth + 1, found);
    }
  }
}

std::vector<cdouble> torus_attempt(const TorusField& f, cdouble origin) {
  constexpr int m = kTorusGrid;
  const double h = 1.0 / m;
  std::vector<TorusSample> g((m + 1) * (m + 1));
  auto at = [&](int i, int k) -> TorusSample& { return g[i * (m + 1) + k]; };
  for (int i = 0; i <= m; ++i) {
    for (int k = 0; k <= m; ++k) {
      at(i, k) = f.sample(origin + cdouble(i * h, k * h));
    }
  }
  std::vector<double> horiz(m * (m + 1));
  std::vector<double> vert((m + 1) * m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k <= m; ++k) {
      horiz[i * (m + 1) + k] = f.increment(at(i, k), at(i + 1, k));
    }
  }
  for (int i = 0; i <= m; ++i) {
    for (int k = 0; k < m; ++k) {
      vert[i * m + k] = f.increment(at(i, k), at(i, k + 1));
    }
  }
  double outer = 0.0;
  for (int i = 0; i < m; ++i) {
    outer += horiz[i * (m + 1)] - horiz[i * (m + 1) + m];
  }
  for (int k = 0; k < m; ++k) outer += vert[m * m + k] - vert[k];
  if (to_winding(outer) != f.degree()) throw TorusRetry{};

  std::vector<cdouble> found;
  found.reserve(static_cast<std::size_t>(f.degree()));
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      const int w = to_winding(horiz[i * (m + 1) + k] + vert[(i + 1) * m + k] -
                               horiz[i * (m + 1) + k + 1] - vert[i * m + k]);
      resolve_cell(f, at(i, k).z, h, w, 0, found);
    }
  }
  if (static_cast<int>(found.size()) != f.degree()) throw TorusRetry{};
  return found;
}

}  // namespace

int torus_winding(const RandomSection& section, cdouble origin) {
  const TorusField f(section);
  constexpr int m = kTorusGrid;
  const double h = 1.0 / m;
  const cdouble corners[5] = {origin, origin + 1.0, origin + cdouble(1.0, 1.0),
                              origin + cdouble(0.0, 1.0), origin};
  double total = 0.0;
  for (int side = 0; side < 4; ++side) {
    const cdouble a = corners[side];
    const cdouble b = corners[side + 1];
    TorusSample prev = f.sample(a);
    for (int s = 1; s <= m; ++s) {
      // Keep the shared coordinate bit-identical along the side.
      const cdouble q = s == m ? b : a + (b - a) * (static_cast<double>(s) * h);
      const cdouble qq = a.imag() == b.imag() ? cdouble(q.real(), a.imag())
                                              : cdouble(a.real(), q.imag());
      const TorusSample next = f.sample(qq);
      total += f.increment(prev, next);
      prev = next;
    }
  }
  return to_winding(total);
}

ZeroSet zeros_torus(const RandomSection& section) {
  if (section.spec.model != Model::TorusTheta) {
    throw std::invalid_argument("zeros_torus needs a TorusTheta section");
  }
  const TorusField f(section);
  const double h = 1.0 / kTorusGrid;
  ZeroSet out;
  out.spec = section.spec;
  for (int attempt = 0; attempt <= kTorusMaxJitters; ++attempt) {
    // Jittered grid origins follow additive recurrences inside one cell.
    const cdouble origin(h * std::fmod(attempt * 0.6180339887498949, 1.0),
                         h * std::fmod(attempt * 0.4142135623730950, 1.0));
    std::vector<cdouble> found;
    try {
      found = torus_attempt(f, origin);
    } catch (const TorusRetry&) {
      continue;
    }
    out.zeros.clear();
    for (const auto& z : found) out.zeros.push_back(make_point(section.spec, z));
    bool separated = true;
    for (std::size_t i = 0; i < out.zeros.size() && separated; ++i) {
      for (std::size_t j = i + 1; j < out.zeros.size(); ++j) {
        if (dist(section.spec, out.zeros[i], out.zeros[j]) < 1e-12) {
          separated = false;
          break;
        }
      }
    }
    if (!separated) continue;
    out.jitters = attempt;
    out.residuals.reserve(out.zeros.size());
    for (const auto& p : out.zeros) {
      out.residuals.push_back(relative_residual(section, p));
    }
    return out;
  }
  throw NumericalError("torus winding subdivision failed after " +
                       std::to_string(kTorusMaxJitters) + " jittered grids");
}

ZeroSet zeros_gef(const RandomSection& section) {
  if (section.spec.model != Model::GEF) {
    throw std::invalid_argument("zeros_gef needs a GEF section");
  }
  const double radius = section.spec.radius;
  ZeroSet out;
  out.spec = section.spec;
  const auto roots =
      roots_polynomial(section.scaled, {}, {}, &out.iterations);
  for (const auto& t : roots) {
    const cdouble z = radius * t;
    const double r = std::abs(z);
    if (r <= radius) {
      out.zeros.push_back({Chart::Plane, z});
    } else if (r <= radius + 1.0 / radius) {
      out.boundary.push_back({Chart::Plane, z});
    }
  }
  out.residuals.reserve(out.zeros.size());
  for (const auto& p : out.zeros) {
    out.residuals.push_back(relative_residual(section, p));
  }
  return out;
}

ZeroSet find_zeros(const RandomSection& section) {
  switch (section.spec.model) {
    case Model::SU2:
      return zeros_su2(section);
    case Model::TorusTheta:
      return zeros_torus(section);
    case Model::GEF:
      return zeros_gef(section);
  }
  throw std::invalid_argument("unknown model");
}

ZeroDiagnostics verify_zeroset(const RandomSection& section,
                               const ZeroSet& zeros) {
  ZeroDiagnostics d;
  const auto& spec = section.spec;
  d.count = static_cast<int>(zeros.zeros.size());
  if (spec.model != Model::GEF) d.expected_count = spec.degree;
  auto fail = [&](std::string why) {
    if (d.pass) d.failure = std::move(why);
    d.pass = false;
  };
  if (d.expected_count >= 0 && d.count != d.expected_count) {
    fail("zero count " + std::to_string(d.count) + " != " +
         std::to_string(d.expected_count));
  }
  for (int i = 0; i < d.count; ++i) {
    const auto& p = zeros.zeros[static_cast<std::size_t>(i)];
    const double r = relative_residual(section, p);
    if (!(r <= d.worst_residual) || d.worst_index < 0) {
      d.worst_residual = r;
      d.worst_index = i;
    }
    if (spec.model == Model::GEF && std::abs(p.coord) > spec.radius) {
      fail("zero " + std::to_string(i) + " lies outside the disk");
    }
  }
  if (!(d.worst_residual <= kResidualTolerance)) {
    fail("zero " + std::to_string(d.worst_index) + " has relative residual " +
         std::to_string(d.worst_residual));
  }
  for (int i = 0; i < d.count; ++i) {
    for (int j = i + 1; j < d.count; ++j) {
      const auto& a = zeros.zeros[static_cast<std::size_t>(i)];
      const auto& b = zeros.zeros[static_cast<std::size_t>(j)];
      if (a.chart == b.chart && std::abs(a.coord - b.coord) < 1e-12) {
        fail("zeros " + std::to_string(i) + " and " + std::to_string(j) +
             " coincide");
      }
    }
  }
  if (spec.model == Model::TorusTheta) {
    d.winding = -1;
    for (int attempt = 0; attempt <= kTorusMaxJitters && d.winding < 0;
         ++attempt) {
      const double shift = static_cast<double>(attempt) / kTorusGrid;
      try {
        d.winding = torus_winding(section, cdouble(0.37 * shift, 0.61 * shift));
      } catch (const TorusRetry&) {
        d.winding = -1;
      }
    }
    if (d.winding != spec.degree) {
      fail("boundary winding " + std::to_string(d.winding) + " != n");
    }
  }
  return d;
}

}  // namespace gafz
