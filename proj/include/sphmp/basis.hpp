// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace sphmp {

inline constexpr int kMaxDegree = 16;     // highest ℓ for harmonics and Bessel roots
inline constexpr int kMaxRootIndex = 64;  // highest n for Bessel roots
inline constexpr double kRbfSmallDistance = 1e-8;

/// Spherical Bessel function of the first kind j_l(x), x >= 0, l in [0, kMaxDegree + 1].
/// The extra order serves the normalization constant of degree kMaxDegree.
double spherical_bessel(int l, double x);

/// roots[l][n - 1] = n-th positive root of j_l, for l <= l_max, n <= n_max.
std::vector<std::vector<double>> bessel_roots(int l_max, int n_max);

/// Real spherical harmonic, unit-normalized on the sphere, no Condon-Shortley phase.
/// m > 0 uses cos(mφ), m < 0 uses sin(|m|φ).
double real_sph_harm(int l, int m, double theta, double phi);

/// All Y_l^m for l <= l_max; entry l*l + l + m. out.size() must be (l_max + 1)^2.
void real_sph_harm_all(int l_max, double theta, double phi, std::span<double> out);

/// Bessel roots and normalization constants for one (cutoff, N_SRBF, N_SHBF).
/// Immutable after construction.
class BasisTables {
 public:
  BasisTables(double cutoff, int n_srbf, int n_shbf);

  double cutoff() const { return cutoff_; }
  int n_srbf() const { return n_srbf_; }
  int n_shbf() const { return n_shbf_; }
  /// z_{l n}, shape n_shbf x n_srbf (column n - 1).
  const Eigen::MatrixXd& roots() const { return roots_; }
  /// sqrt(2 / (c^3 j_{l+1}(z_{l n})^2)), same shape as roots().
  const Eigen::MatrixXd& norms() const { return norms_; }

  int rbf_size() const { return n_srbf_; }
  int sbf_size() const { return n_srbf_ * n_shbf_; }
  int tbf_size() const { return n_srbf_ * n_shbf_ * n_shbf_; }

 private:
  double cutoff_;
  int n_srbf_;
  int n_shbf_;
  Eigen::MatrixXd roots_;
  Eigen::MatrixXd norms_;
};

/// ẽ_n(d) = sqrt(2/c) sin(nπd/c) / d, n = 1..N_SRBF.
Eigen::VectorXd rbf_embed(double d, const BasisTables& tables);
void rbf_embed(double d, const BasisTables& tables, std::span<double> out);

/// Radial factors R_{l n}(d) = norm_{l n} j_l(z_{l n} d / c), shape n_shbf x n_srbf.
Eigen::MatrixXd radial_basis(double d, const BasisTables& tables);

/// ã_{l n}(d, θ) = R_{l n}(d) Y_l^0(θ), shape n_shbf x n_srbf.
Eigen::MatrixXd sbf_embed(double d, double theta, const BasisTables& tables);
/// Flattened (l, n) row-major.
void sbf_embed(double d, double theta, const BasisTables& tables, std::span<double> out);

/// t̃_{l m n}(d, θ, φ) = R_{l n}(d) Y_l^m(θ, φ), flattened in (l, m, n) lexicographic order
/// with m running from -l to l; length N_SRBF * N_SHBF^2.
Eigen::VectorXd tbf_embed(double d, double theta, double phi, const BasisTables& tables);
void tbf_embed(double d, double theta, double phi, const BasisTables& tables, std::span<double> out);

/// Fills sbf and tbf for the same (d, θ, φ), sharing the radial evaluation.
void angular_embeds(double d, double theta, double phi, const BasisTables& tables, std::span<double> sbf,
                    std::span<double> tbf);

}  // namespace sphmp
