#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tristat/colorspace.hpp"

namespace tristat {

/// Orthonormal right-handed frame with v1 along the anchor's XYZ vector.
struct DirectionBasis {
  Vec3 v1;
  Vec3 v2;
  Vec3 v3;
  Tristimulus anchor;

  /// U = [v1 v2 v3] as columns.
  Mat3 Matrix() const;
};

/// v1 = c/|c|, v2 = (0,-Z,Y)/sqrt(Y^2+Z^2), v3 = v1 x v2 normalized.
/// When Y = Z = 0 the v2 formula is undefined and (0,1,0) is used instead.
DirectionBasis direction_basis(const Tristimulus& anchor);

/// Same frame as direction_basis(anchor) but with a caller-chosen v2, which
/// must be a unit vector perpendicular to v1. Used to check that P does not
/// depend on how the perpendicular plane is spanned.
DirectionBasis direction_basis_with(const Tristimulus& anchor, const Vec3& v2);

enum class Direction { kX, kY, kZ, kV1, kV2, kV3 };

std::string_view to_string(Direction d);

Tristimulus sample_mean(std::span<const Tristimulus> samples);

/// Population standard deviation (divisor m) of the projections v^T(c_i - mu).
double directional_std(std::span<const Tristimulus> samples, const Vec3& v);

struct DirectionalStd {
  double sigma_v1 = 0.0;
  double sigma_v2 = 0.0;
  double sigma_v3 = 0.0;
  double sum_xyz = 0.0;  // X+Y+Z of the sample mean
  std::string color_id;
  std::string panel_id;
  double brightness = 1.0;
  std::size_t sample_count = 0;

  double Sigma(Direction d) const;
};

/// Directional stds of one group of repeats, along the basis anchored at the
/// group's sample mean.
DirectionalStd directional_stds(std::span<const Tristimulus> samples,
                                std::string color_id = {},
                                std::string panel_id = {});

struct KPoint {
  double sum_xyz = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  double k = 0.0;
  Direction direction = Direction::kV1;
  double residual_rms = 0.0;
  std::size_t n = 0;
};

/// Least-squares slope through the origin of sigma against X+Y+Z:
/// k = sum(s_j sigma_j) / sum(s_j^2).
FitResult fit_k(std::span<const KPoint> points, Direction direction = Direction::kV1);

/// Fits k for one direction from a set of per-color directional stds.
FitResult fit_k(std::span<const DirectionalStd> stds, Direction direction);

enum class Provenance { kWithinPanel, kBetweenPanel, kFitted };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Covariance P = a^2 (X+Y+Z)^2 U diag(ratio^2, 1, 1) U^T.
class NoiseModel {
 public:
  static constexpr double kDefaultRatio = 5.0;
  static constexpr double kWithinPanelScale = 1.0 / 2000.0;
  static constexpr double kBetweenPanelScale = 1.0 / 400.0;

  NoiseModel(double a, double ratio, Provenance provenance);

  static NoiseModel WithinPanel() {
    return {kWithinPanelScale, kDefaultRatio, Provenance::kWithinPanel};
  }
  static NoiseModel BetweenPanel() {
    return {kBetweenPanelScale, kDefaultRatio, Provenance::kBetweenPanel};
  }

  double a() const { return a_; }
  double ratio() const { return ratio_; }
  Provenance provenance() const { return provenance_; }

  NoiseModel WithScale(double a) const { return {a, ratio_, provenance_}; }

  /// Per-direction fits behind a fitted model; empty for preset models.
  const std::vector<FitResult>& fits() const { return fits_; }
  void set_fits(std::vector<FitResult> fits) { fits_ = std::move(fits); }

 private:
  double a_;
  double ratio_;
  Provenance provenance_;
  std::vector<FitResult> fits_;
};

Mat3 covariance(const NoiseModel& model, const Tristimulus& c);
Mat3 covariance(const NoiseModel& model, const DirectionBasis& basis);

/// L with L L^T = covariance(model, c): a (X+Y+Z) U diag(ratio, 1, 1).
Mat3 covariance_factor(const NoiseModel& model, const Tristimulus& c);

struct PrincipalAxis {
  Vec3 axis;
  double angle_to_v1_deg = 0.0;
};

/// Leading eigenvector of the sample covariance, oriented so axis . v1 >= 0,
/// with v1 anchored at the sample mean.
PrincipalAxis principal_axis(std::span<const Tristimulus> samples);

/// ratio = k_v1 / mean(k_v2, k_v3), a = k_v1 / ratio.
NoiseModel fit_noise_model(std::span<const DirectionalStd> dataset);

}  // namespace tristat
