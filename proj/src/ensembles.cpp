#include "gafzeros/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gafzeros/errors.hpp"

namespace gafz {

namespace {

// log(1 + u) without the rounding of 1 + u; n log(1 + z conj(w)) would
// otherwise carry an absolute error of order n * eps.
cdouble log1p_complex(cdouble u) {
  const double x = u.real();
  const double y = u.imag();
  return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
}

constexpr double kPi = std::numbers::pi;
constexpr double kMaxLog = 709.0;

std::vector<double> log_basis_weights(const EnsembleSpec& spec) {
  std::vector<double> w(static_cast<std::size_t>(spec.coefficient_count()));
  switch (spec.model) {
    case Model::SU2: {
      const double n = spec.degree;
      const double lg_n = std::lgamma(n + 1.0);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double jj = static_cast<double>(j);
        w[j] = 0.5 * (lg_n - std::lgamma(jj + 1.0) - std::lgamma(n - jj + 1.0));
      }
      break;
    }
    case Model::GEF: {
      const double log_r = std::log(spec.radius);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double jj = static_cast<double>(j);
        w[j] = jj * log_r - 0.5 * std::lgamma(jj + 1.0);
      }
      break;
    }
    case Model::TorusTheta:
      std::fill(w.begin(), w.end(), 0.0);
      break;
  }
  return w;
}

cdouble from_log_polar(double log_mag, double phase) {
  if (log_mag > kMaxLog) {
    throw NumericalError("section value overflows double range (log|value| = " +
                         std::to_string(log_mag) + ")");
  }
  return std::polar(std::exp(log_mag), phase);
}

// d(phi)/dz at z.
cdouble potential_dz(Model model, cdouble z) {
  switch (model) {
    case Model::SU2:
      return std::conj(z) / (1.0 + std::norm(z));
    case Model::TorusTheta:
      return {0.0, -2.0 * kPi * z.imag()};
    case Model::GEF:
      return std::conj(z);
  }
  return 0.0;
}

// d(phi)/d(wbar) at w.
cdouble potential_dwbar(Model model, cdouble w) {
  switch (model) {
    case Model::SU2:
      return w / (1.0 + std::norm(w));
    case Model::TorusTheta:
      return {0.0, 2.0 * kPi * w.imag()};
    case Model::GEF:
      return w;
  }
  return 0.0;
}

}  // namespace

std::string_view model_name(Model model) {
  switch (model) {
    case Model::SU2:
      return "su2";
    case Model::TorusTheta:
      return "torus";
    case Model::GEF:
      return "gef";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "su2") return Model::SU2;
  if (name == "torus") return Model::TorusTheta;
  if (name == "gef") return Model::GEF;
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected su2, torus or gef)");
}

EnsembleSpec EnsembleSpec::su2(int n) {
  EnsembleSpec s;
  s.model = Model::SU2;
  s.degree = n;
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::torus(int n) {
  EnsembleSpec s;
  s.model = Model::TorusTheta;
  s.degree = n;
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::gef(double radius, int truncation) {
  EnsembleSpec s;
  s.model = Model::GEF;
  s.degree = 0;
  s.radius = radius;
  s.truncation = truncation > 0 ? truncation : default_gef_truncation(radius);
  s.validate();
  return s;
}

void EnsembleSpec::validate() const {
  switch (model) {
    case Model::SU2:
    case Model::TorusTheta:
      if (degree < 1) {
        throw std::invalid_argument("degree n must be >= 1");
      }
      break;
    case Model::GEF:
      if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("GEF radius R must be positive and finite");
      }
      if (truncation < 1) {
        throw std::invalid_argument("GEF truncation J must be >= 1");
      }
      if (gef_tail_bound(radius, truncation) >= kGefTailLimit) {
        throw std::invalid_argument(
            "GEF truncation J too small: kernel tail exceeds 1e-24");
      }
      break;
  }
}

int EnsembleSpec::coefficient_count() const {
  switch (model) {
    case Model::SU2:
      return degree + 1;
    case Model::TorusTheta:
      return degree;
    case Model::GEF:
      return truncation + 1;
  }
  return 0;
}

double EnsembleSpec::bundle_power() const {
  return model == Model::GEF ? 1.0 : static_cast<double>(degree);
}

double EnsembleSpec::expected_zero_count() const {
  return model == Model::GEF ? radius * radius : static_cast<double>(degree);
}

int default_gef_truncation(double radius) {
  return static_cast<int>(std::ceil(radius * radius + 12.0 * radius + 20.0));
}

double gef_tail_bound(double radius, int truncation) {
  const double lambda = radius * radius;
  const double log_lambda = std::log(lambda);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (int j = truncation + 1;; ++j) {
    const double t = -lambda + j * log_lambda - std::lgamma(j + 1.0);
    const double hi = std::max(log_sum, t);
    log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(t - hi));
    if (j > lambda && t < log_sum - 40.0) break;
  }
  return std::exp(log_sum);
}

RandomSection make_section(const EnsembleSpec& spec, std::vector<cdouble> b,
                           SeedRecord seed) {
  spec.validate();
  const auto count = static_cast<std::size_t>(spec.coefficient_count());
  if (b.size() > count) {
    throw std::invalid_argument("too many coefficients for the ensemble");
  }
  b.resize(count, cdouble(0.0, 0.0));
  for (const auto& v : b) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("coefficients must be finite");
    }
  }

  RandomSection section;
  section.spec = spec;
  section.seed = seed;
  section.coefficients = std::move(b);

  if (spec.model == Model::TorusTheta) {
    section.scaled = section.coefficients;
    section.log_shift = 0.0;
    return section;
  }

  const auto log_w = log_basis_weights(spec);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    const double mag = std::abs(section.coefficients[j]);
    if (mag > 0.0) shift = std::max(shift, log_w[j] + std::log(mag));
  }
  if (!std::isfinite(shift)) shift = 0.0;
  section.log_shift = shift;
  section.scaled.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    section.scaled[j] = section.coefficients[j] * std::exp(log_w[j] - shift);
  }
  return section;
}

RandomSection sample_section(const EnsembleSpec& spec, Stream& stream) {
  std::vector<cdouble> b(static_cast<std::size_t>(spec.coefficient_count()));
  for (auto& v : b) v = stream.complex_gaussian();
  return make_section(spec, std::move(b), stream.seed());
}

namespace detail {

ScaledValue polynomial_scaled(const std::vector<cdouble>& c, cdouble z) {
  const std::size_t d = c.empty() ? 0 : c.size() - 1;
  if (std::abs(z) <= 1.0) {
    cdouble p = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) p = p * z + c[j];
    return {p, 0.0};
  }
  const cdouble zeta = 1.0 / z;
  cdouble r = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) r = r * zeta + c[j];
  const double d_real = static_cast<double>(d);
  return {r * std::polar(1.0, d_real * std::arg(z)),
          d_real * std::log(std::abs(z))};
}

ThetaValue theta_section(const std::vector<cdouble>& b, int n, cdouble z,
                         bool with_derivative, double cutoff,
                         bool with_abs_sum) {
  const double nn = static_cast<double>(n);
  const double x = z.real();
  const double y = z.imag();
  const double half_width = std::sqrt(cutoff / (kPi * nn));
  const auto lo = static_cast<long>(std::ceil(nn * (-y - half_width)));
  const auto hi = static_cast<long>(std::floor(nn * (-y + half_width)));

  const double norm = std::pow(2.0 * nn, 0.25) / std::sqrt(kPi);
  ThetaValue out{};
  if (hi < lo) return out;

  // Terms e^{-pi n (l/n + y)^2} e^{2 pi i l x}, advanced by recurrence in
  // plain real arithmetic.
  const double t0 = static_cast<double>(lo) / nn + y;
  double amp = std::exp(-kPi * nn * t0 * t0);
  double ratio = std::exp(-kPi * (2.0 * t0 + 1.0 / nn));
  const double ratio_step = std::exp(-2.0 * kPi / nn);
  const double theta0 = 2.0 * kPi * std::fmod(static_cast<double>(lo) * x, 1.0);
  double pr = std::cos(theta0);
  double pi = std::sin(theta0);
  const double sr = std::cos(2.0 * kPi * x);
  const double si = std::sin(2.0 * kPi * x);

  double vr = 0.0, vi = 0.0, dr = 0.0, di = 0.0, abs_sum = 0.0;
  long j = ((lo % n) + n) % n;
  for (long l = lo; l <= hi; ++l) {
    const cdouble& bj = b[static_cast<std::size_t>(j)];
    const double ar = amp * pr;
    const double ai = amp * pi;
    const double tr = bj.real() * ar - bj.imag() * ai;
    const double ti = bj.real() * ai + bj.imag() * ar;
    vr += tr;
    vi += ti;
    if (with_derivative) {
      const double f = 2.0 * kPi * static_cast<double>(l);
      dr -= f * ti;
      di += f * tr;
    }
    if (with_abs_sum) abs_sum += std::abs(bj) * amp;
    amp *= ratio;
    ratio *= ratio_step;
    const double npr = pr * sr - pi * si;
    pi = pr * si + pi * sr;
    pr = npr;
    if (++j == n) j = 0;
  }
  out.value = norm * cdouble(vr, vi);
  out.derivative = norm * cdouble(dr, di);
  out.abs_sum = norm * abs_sum;
  return out;
}

void theta_basis(int n, cdouble z, std::vector<cdouble>& values,
                 std::vector<cdouble>& derivatives, double cutoff) {
  const double nn = static_cast<double>(n);
  const double x = z.real();
  const double y = z.imag();
  values.assign(static_cast<std::size_t>(n), cdouble(0.0));
  derivatives.assign(static_cast<std::size_t>(n), cdouble(0.0));
  const double half_width = std::sqrt(cutoff / (kPi * nn));
  const auto lo = static_cast<long>(std::ceil(nn * (-y - half_width)));
  const auto hi = static_cast<long>(std::floor(nn * (-y + half_width)));
  if (hi < lo) return;

  const double norm = std::pow(2.0 * nn, 0.25) / std::sqrt(kPi);
  const double t0 = static_cast<double>(lo) / nn + y;
  double amp = std::exp(-kPi * nn * t0 * t0);
  double ratio = std::exp(-kPi * (2.0 * t0 + 1.0 / nn));
  const double ratio_step = std::exp(-2.0 * kPi / nn);
  cdouble phase =
      std::polar(1.0, 2.0 * kPi * std::fmod(static_cast<double>(lo) * x, 1.0));
  const cdouble step = std::polar(1.0, 2.0 * kPi * x);
  for (long l = lo; l <= hi; ++l) {
    const auto j = static_cast<std::size_t>(((l % n) + n) % n);
    const cdouble term = norm * amp * phase;
    values[j] += term;
    derivatives[j] += term * cdouble(0.0, 2.0 * kPi * static_cast<double>(l));
    amp *= ratio;
    ratio *= ratio_step;
    phase *= step;
  }
}

}  // namespace detail

double potential(Model model, cdouble z) {
  switch (model) {
    case Model::SU2:
      return std::log1p(std::norm(z));
    case Model::TorusTheta:
      return 2.0 * kPi * z.imag() * z.imag();
    case Model::GEF:
      return std::norm(z);
  }
  return 0.0;
}

namespace {

/// log|value| and phase of the raw section value.
std::pair<double, double> raw_log_polar(const RandomSection& section,
                                        cdouble z) {
  const auto& spec = section.spec;
  switch (spec.model) {
    case Model::SU2: {
      const auto v = detail::polynomial_scaled(section.scaled, z);
      const double n = spec.degree;
      const double mag = std::abs(v.mantissa);
      if (mag == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
      return {std::log(mag) + v.log_scale + section.log_shift +
                  0.5 * std::log((n + 1.0) / kPi),
              std::arg(v.mantissa)};
    }
    case Model::GEF: {
      const auto v = detail::polynomial_scaled(section.scaled, z / spec.radius);
      const double mag = std::abs(v.mantissa);
      if (mag == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
      return {std::log(mag) + v.log_scale + section.log_shift,
              std::arg(v.mantissa)};
    }
    case Model::TorusTheta: {
      // Reduce to the fundamental square, then apply
      // theta_j(z + i q) = theta_j(z) e^{-2 pi i n q z + pi n q^2}.
      const double n = spec.degree;
      const double p = std::floor(z.real());
      const double q = std::floor(z.imag());
      const cdouble zr(z.real() - p, z.imag() - q);
      const auto v =
          detail::theta_section(section.coefficients, spec.degree, zr, false);
      const double mag = std::abs(v.value);
      if (mag == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
      const double log_mag = std::log(mag) + kPi * n * zr.imag() * zr.imag() +
                             2.0 * kPi * n * q * zr.imag() + kPi * n * q * q;
      const double phase = std::arg(v.value) - 2.0 * kPi * n * q * zr.real();
      return {log_mag, phase};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

cdouble evaluate_raw(const RandomSection& section, cdouble z) {
  const auto [log_mag, phase] = raw_log_polar(section, z);
  if (!std::isfinite(log_mag)) return 0.0;
  return from_log_polar(log_mag, phase);
}

cdouble evaluate_weighted(const RandomSection& section, cdouble z) {
  const auto& spec = section.spec;
  if (spec.model == Model::TorusTheta) {
    return detail::theta_section(section.coefficients, spec.degree, z, false)
        .value;
  }
  const auto [log_mag, phase] = raw_log_polar(section, z);
  if (!std::isfinite(log_mag)) return 0.0;
  const double weight = -0.5 * spec.bundle_power() * potential(spec.model, z);
  return from_log_polar(log_mag + weight, phase);
}

KernelJet kernel_jet_scaled(const EnsembleSpec& spec, cdouble z, cdouble w) {
  KernelJet jet{};
  jet.weighted = false;
  switch (spec.model) {
    case Model::SU2: {
      const int n = spec.degree;
      const double pref = (n + 1.0) / kPi;
      const cdouble P = 1.0 + z * std::conj(w);
      const double lw =
          -0.5 * n * (std::log1p(std::norm(z)) + std::log1p(std::norm(w)));
      const cdouble logP = (P == 0.0) ? cdouble(0.0) : log1p_complex(z * std::conj(w));
      auto pw = [&](int m) -> cdouble {
        if (m == 0) return std::exp(lw);
        if (P == 0.0) return 0.0;
        return std::exp(static_cast<double>(m) * logP + lw);
      };
      const cdouble p_n = pw(n);
      const cdouble p_n1 = pw(n - 1);
      jet.K = pref * p_n;
      jet.dK_dz = pref * static_cast<double>(n) * std::conj(w) * p_n1;
      jet.dK_dwbar = pref * static_cast<double>(n) * z * p_n1;
      cdouble second = p_n1;
      if (n >= 2) {
        second += static_cast<double>(n - 1) * z * std::conj(w) * pw(n - 2);
      }
      jet.d2K_dz_dwbar = pref * static_cast<double>(n) * second;
      break;
    }
    case Model::GEF: {
      const cdouble e =
          std::exp(z * std::conj(w) - 0.5 * std::norm(z) - 0.5 * std::norm(w)) /
          kPi;
      jet.K = e;
      jet.dK_dz = std::conj(w) * e;
      jet.dK_dwbar = z * e;
      jet.d2K_dz_dwbar = (1.0 + z * std::conj(w)) * e;
      break;
    }
    case Model::TorusTheta: {
      std::vector<cdouble> vz, dz, vw, dw;
      detail::theta_basis(spec.degree, z, vz, dz);
      detail::theta_basis(spec.degree, w, vw, dw);
      cdouble k = 0.0, kz = 0.0, kw = 0.0, kzw = 0.0;
      for (std::size_t j = 0; j < vz.size(); ++j) {
        const cdouble cw = std::conj(vw[j]);
        const cdouble cdw = std::conj(dw[j]);
        k += vz[j] * cw;
        kz += dz[j] * cw;
        kw += vz[j] * cdw;
        kzw += dz[j] * cdw;
      }
      jet.K = k;
      jet.dK_dz = kz;
      jet.dK_dwbar = kw;
      jet.d2K_dz_dwbar = kzw;
      break;
    }
  }
  return jet;
}

KernelJet kernel_jet(const EnsembleSpec& spec, cdouble z, cdouble w,
                     bool weighted) {
  spec.validate();
  const KernelJet s = kernel_jet_scaled(spec, z, w);
  KernelJet out{};
  out.weighted = weighted;
  const double p = spec.bundle_power();
  if (weighted) {
    const cdouble fz = potential_dz(spec.model, z);
    const cdouble fw = potential_dwbar(spec.model, w);
    out.K = s.K;
    out.dK_dz = s.dK_dz - 0.5 * p * fz * s.K;
    out.dK_dwbar = s.dK_dwbar - 0.5 * p * fw * s.K;
    out.d2K_dz_dwbar = s.d2K_dz_dwbar - 0.5 * p * fw * s.dK_dz -
                       0.5 * p * fz * s.dK_dwbar + 0.25 * p * p * fz * fw * s.K;
  } else {
    const double log_unweight =
        0.5 * p * (potential(spec.model, z) + potential(spec.model, w));
    if (log_unweight > kMaxLog) {
      throw NumericalError("unweighted kernel overflows at these points");
    }
    const double f = std::exp(log_unweight);
    out.K = s.K * f;
    out.dK_dz = s.dK_dz * f;
    out.dK_dwbar = s.dK_dwbar * f;
    out.d2K_dz_dwbar = s.d2K_dz_dwbar * f;
  }
  for (const cdouble v : {out.K, out.dK_dz, out.dK_dwbar, out.d2K_dz_dwbar}) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError("kernel jet is not finite");
    }
  }
  return out;
}

}  // namespace gafz
