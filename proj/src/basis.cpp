// SPDX-License-Identifier: Apache-2.0
#include "sphmp/basis.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphmp {
namespace {

constexpr double kPi = std::numbers::pi;

double j0(double x) { return std::sin(x) / x; }
double j1(double x) { return std::sin(x) / (x * x) - std::cos(x) / x; }

// Power series about 0; used only for x < 0.5 where every term shrinks fast.
double bessel_series(int l, double x) {
  double prefactor = 1.0;
  for (int k = 1; k <= l; ++k) prefactor *= x / (2.0 * k + 1.0);
  const double y = -0.5 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= y / (k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return prefactor * sum;
}

// Upward recurrence; stable for x >= l.
double bessel_upward(int l, double x) {
  if (l == 0) return j0(x);
  double prev = j0(x);
  double cur = j1(x);
  for (int k = 1; k < l; ++k) {
    const double next = (2.0 * k + 1.0) / x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Miller's downward recurrence, normalized against the closed forms of j_0 or j_1.
double bessel_downward(int l, double x) {
  const int start = l + 40 + static_cast<int>(x);
  double above = 0.0;
  double cur = 1e-30;
  double at_l = 0.0;
  for (int k = start; k > 0; --k) {
    const double below = (2.0 * k + 1.0) / x * cur - above;
    above = cur;
    cur = below;
    if (k - 1 == l) at_l = cur;
    if (std::abs(cur) > 1e200) {
      cur *= 1e-200;
      above *= 1e-200;
      at_l *= 1e-200;
    }
  }
  // cur = f_0, above = f_1
  const double a = j0(x);
  const double b = j1(x);
  const double scale = std::abs(a) >= std::abs(b) ? a / cur : b / above;
  return at_l * scale;
}

}  // namespace

double spherical_bessel(int l, double x) {
  if (l < 0 || l > kMaxDegree + 1) {
    throw std::out_of_range("spherical_bessel: order " + std::to_string(l) + " outside [0, " +
                            std::to_string(kMaxDegree + 1) + "]");
  }
  if (!(x >= 0.0)) throw std::domain_error("spherical_bessel: argument must be >= 0");
  if (x == 0.0) return l == 0 ? 1.0 : 0.0;
  if (x < 0.5) return bessel_series(l, x);
  if (x >= static_cast<double>(l)) return bessel_upward(l, x);
  return bessel_downward(l, x);
}

std::vector<std::vector<double>> bessel_roots(int l_max, int n_max) {
  if (l_max < 0 || l_max > kMaxDegree || n_max < 1 || n_max > kMaxRootIndex) {
    throw std::out_of_range("bessel_roots: l_max must be in [0, 16] and n_max in [1, 64]");
  }
  // Zeros of j_l interlace with those of j_{l-1}: z_{l-1,n} < z_{l,n} < z_{l-1,n+1}.
  // Order l therefore needs n_max + (l_max - l) roots to seed the next order.
  std::vector<std::vector<double>> all(static_cast<std::size_t>(l_max) + 1);
  const int base_count = n_max + l_max;
  for (int n = 1; n <= base_count; ++n) all[0].push_back(n * kPi);

  for (int l = 1; l <= l_max; ++l) {
    const auto& prev = all[static_cast<std::size_t>(l) - 1];
    auto& cur = all[static_cast<std::size_t>(l)];
    const int count = n_max + (l_max - l);
    for (int n = 0; n < count; ++n) {
      double lo = prev[static_cast<std::size_t>(n)];
      double hi = prev[static_cast<std::size_t>(n) + 1];
      double f_lo = spherical_bessel(l, lo);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = spherical_bessel(l, mid);
        if (f_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((f_mid > 0) == (f_lo > 0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      cur.push_back(std::abs(spherical_bessel(l, lo)) <= std::abs(spherical_bessel(l, hi)) ? lo : hi);
    }
  }
  for (auto& row : all) row.resize(static_cast<std::size_t>(n_max));
  return all;
}

void real_sph_harm_all(int l_max, double theta, double phi, std::span<double> out) {
  if (l_max < 0 || l_max > kMaxDegree) throw std::out_of_range("real_sph_harm_all: l_max outside [0, 16]");
  const auto L = static_cast<std::size_t>(l_max);
  if (out.size() != (L + 1) * (L + 1)) throw std::invalid_argument("real_sph_harm_all: output size mismatch");

  // Q[l][m] = N_l^m P_l^m(cos θ), normalized associated Legendre functions without the (-1)^m phase.
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> q{};
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  q[0][0] = 0.5 / std::sqrt(kPi);
  for (std::size_t m = 1; m <= L; ++m) {
    q[m][m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * q[m - 1][m - 1];
  }
  for (std::size_t m = 0; m < L; ++m) q[m + 1][m] = std::sqrt(2.0 * m + 3.0) * x * q[m][m];
  for (std::size_t m = 0; m <= L; ++m) {
    for (std::size_t l = m + 2; l <= L; ++l) {
      const double ld = static_cast<double>(l);
      const double md = static_cast<double>(m);
      const double a = std::sqrt((4.0 * ld * ld - 1.0) / (ld * ld - md * md));
      const double b = std::sqrt(((ld - 1.0) * (ld - 1.0) - md * md) / (4.0 * (ld - 1.0) * (ld - 1.0) - 1.0));
      q[l][m] = a * (x * q[l - 1][m] - b * q[l - 2][m]);
    }
  }
  for (std::size_t l = 0; l <= L; ++l) {
    const std::size_t centre = l * l + l;
    out[centre] = q[l][0];
    for (std::size_t m = 1; m <= l; ++m) {
      const double md = static_cast<double>(m);
      out[centre + m] = std::numbers::sqrt2 * q[l][m] * std::cos(md * phi);
      out[centre - m] = std::numbers::sqrt2 * q[l][m] * std::sin(md * phi);
    }
  }
}

double real_sph_harm(int l, int m, double theta, double phi) {
  if (l < 0 || l > kMaxDegree) throw std::out_of_range("real_sph_harm: degree outside [0, 16]");
  if (m < -l || m > l) throw std::out_of_range("real_sph_harm: |m| > l");
  std::vector<double> all(static_cast<std::size_t>((l + 1) * (l + 1)));
  real_sph_harm_all(l, theta, phi, all);
  return all[static_cast<std::size_t>(l * l + l + m)];
}

BasisTables::BasisTables(double cutoff, int n_srbf, int n_shbf)
    : cutoff_(cutoff), n_srbf_(n_srbf), n_shbf_(n_shbf) {
  if (!(cutoff > 0)) throw std::invalid_argument("BasisTables: cutoff must be > 0");
  if (n_srbf < 1 || n_srbf > kMaxRootIndex) throw std::out_of_range("BasisTables: n_srbf outside [1, 64]");
  if (n_shbf < 1 || n_shbf > kMaxDegree + 1) throw std::out_of_range("BasisTables: n_shbf outside [1, 17]");
  const auto z = bessel_roots(n_shbf - 1, n_srbf);
  roots_.resize(n_shbf, n_srbf);
  norms_.resize(n_shbf, n_srbf);
  const double c3 = cutoff * cutoff * cutoff;
  for (int l = 0; l < n_shbf; ++l) {
    for (int n = 0; n < n_srbf; ++n) {
      const double root = z[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)];
      const double jn = spherical_bessel(l + 1, root);
      roots_(l, n) = root;
      norms_(l, n) = std::sqrt(2.0 / (c3 * jn * jn));
    }
  }
}

namespace {

void check_distance(double d, double c) {
  if (!(d >= 0.0 && d <= c)) throw std::domain_error("basis: distance outside [0, cutoff]");
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) throw std::domain_error("basis: angle outside [0, π]");
}

void radial_into(double d, const BasisTables& t, double* out) {
  const double scale = d / t.cutoff();
  for (int l = 0; l < t.n_shbf(); ++l) {
    for (int n = 0; n < t.n_srbf(); ++n) {
      *out++ = t.norms()(l, n) * spherical_bessel(l, t.roots()(l, n) * scale);
    }
  }
}

}  // namespace

void rbf_embed(double d, const BasisTables& tables, std::span<double> out) {
  check_distance(d, tables.cutoff());
  if (out.size() != static_cast<std::size_t>(tables.n_srbf())) throw std::invalid_argument("rbf_embed: size mismatch");
  const double c = tables.cutoff();
  const double pref = std::sqrt(2.0 / c);
  for (int n = 1; n <= tables.n_srbf(); ++n) {
    const double k = n * kPi / c;
    out[static_cast<std::size_t>(n) - 1] = d < kRbfSmallDistance ? pref * k : pref * std::sin(k * d) / d;
  }
}

Eigen::VectorXd rbf_embed(double d, const BasisTables& tables) {
  Eigen::VectorXd v(tables.n_srbf());
  rbf_embed(d, tables, std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

Eigen::MatrixXd radial_basis(double d, const BasisTables& tables) {
  check_distance(d, tables.cutoff());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r(tables.n_shbf(), tables.n_srbf());
  radial_into(d, tables, r.data());
  return r;
}

void sbf_embed(double d, double theta, const BasisTables& tables, std::span<double> out) {
  check_distance(d, tables.cutoff());
  check_theta(theta);
  if (out.size() != static_cast<std::size_t>(tables.sbf_size())) throw std::invalid_argument("sbf_embed: size mismatch");
  const int L = tables.n_shbf() - 1;
  std::vector<double> y(static_cast<std::size_t>((L + 1) * (L + 1)));
  real_sph_harm_all(L, theta, 0.0, y);
  radial_into(d, tables, out.data());
  const auto nr = static_cast<std::size_t>(tables.n_srbf());
  for (std::size_t l = 0; l <= static_cast<std::size_t>(L); ++l) {
    for (std::size_t n = 0; n < nr; ++n) out[l * nr + n] *= y[l * l + l];
  }
}

Eigen::MatrixXd sbf_embed(double d, double theta, const BasisTables& tables) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(tables.n_shbf(), tables.n_srbf());
  sbf_embed(d, theta, tables, std::span<double>(m.data(), static_cast<std::size_t>(m.size())));
  return m;
}

void angular_embeds(double d, double theta, double phi, const BasisTables& tables, std::span<double> sbf,
                    std::span<double> tbf) {
  check_distance(d, tables.cutoff());
  check_theta(theta);
  if (!std::isfinite(phi)) throw std::domain_error("basis: torsion must be finite");
  if (sbf.size() != static_cast<std::size_t>(tables.sbf_size()) ||
      tbf.size() != static_cast<std::size_t>(tables.tbf_size())) {
    throw std::invalid_argument("angular_embeds: size mismatch");
  }
  const int L = tables.n_shbf() - 1;
  std::array<double, (kMaxDegree + 1) * (kMaxDegree + 1)> y{};
  real_sph_harm_all(L, theta, phi, std::span<double>(y.data(), static_cast<std::size_t>((L + 1) * (L + 1))));
  std::array<double, (kMaxDegree + 1) * kMaxRootIndex> radial{};
  radial_into(d, tables, radial.data());

  const auto nr = static_cast<std::size_t>(tables.n_srbf());
  std::size_t t = 0;
  for (std::size_t l = 0; l <= static_cast<std::size_t>(L); ++l) {
    const double* r = radial.data() + l * nr;
    for (std::size_t n = 0; n < nr; ++n) sbf[l * nr + n] = r[n] * y[l * l + l];
    for (std::size_t mi = 0; mi < 2 * l + 1; ++mi) {
      const double ylm = y[l * l + mi];
      for (std::size_t n = 0; n < nr; ++n) tbf[t++] = r[n] * ylm;
    }
  }
}

void tbf_embed(double d, double theta, double phi, const BasisTables& tables, std::span<double> out) {
  std::vector<double> sbf(static_cast<std::size_t>(tables.sbf_size()));
  angular_embeds(d, theta, phi, tables, sbf, out);
}

Eigen::VectorXd tbf_embed(double d, double theta, double phi, const BasisTables& tables) {
  Eigen::VectorXd v(tables.tbf_size());
  tbf_embed(d, theta, phi, tables, std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

}  // namespace sphmp
