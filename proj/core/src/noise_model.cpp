#include "tristat/noise_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tristat/error.hpp"

namespace tristat {
namespace {

double AnchorSum(const Tristimulus& c) {
  const double s = c.Sum();
  if (!(s > 0.0)) {
    throw NumericalError("degenerate anchor: X+Y+Z must be > 0");
  }
  return s;
}

DirectionBasis CompleteFrame(const Tristimulus& anchor, const Vec3& v1, const Vec3& v2) {
  Vec3 v3 = v1.cross(v2);
  v3.normalize();
  DirectionBasis basis{v1, v2, v3, anchor};
  // v1 x v2 already gives det = +1; kept explicit for caller-supplied v2.
  if (basis.Matrix().determinant() < 0.0) basis.v3 = -basis.v3;
  return basis;
}

}  // namespace

Mat3 DirectionBasis::Matrix() const {
  Mat3 u;
  u.col(0) = v1;
  u.col(1) = v2;
  u.col(2) = v3;
  return u;
}

DirectionBasis direction_basis(const Tristimulus& anchor) {
  AnchorSum(anchor);
  const Vec3 v1 = anchor.vec().normalized();
  const double yz = std::hypot(anchor.Y(), anchor.Z());
  const Vec3 v2 = yz > 0.0 ? Vec3(0.0, -anchor.Z() / yz, anchor.Y() / yz)
                           : Vec3(0.0, 1.0, 0.0);
  return CompleteFrame(anchor, v1, v2);
}

DirectionBasis direction_basis_with(const Tristimulus& anchor, const Vec3& v2) {
  AnchorSum(anchor);
  const Vec3 v1 = anchor.vec().normalized();
  if (std::abs(v2.norm() - 1.0) > 1e-9 || std::abs(v1.dot(v2)) > 1e-9) {
    throw ValidationError("v2 must be a unit vector perpendicular to v1");
  }
  return CompleteFrame(anchor, v1, v2);
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kX: return "X";
    case Direction::kY: return "Y";
    case Direction::kZ: return "Z";
    case Direction::kV1: return "v1";
    case Direction::kV2: return "v2";
    case Direction::kV3: return "v3";
  }
  return "?";
}

Tristimulus sample_mean(std::span<const Tristimulus> samples) {
  if (samples.empty()) throw ValidationError("sample_mean of an empty sequence");
  Vec3 acc = Vec3::Zero();
  for (const auto& c : samples) acc += c.vec();
  return Tristimulus::FromVector(acc / static_cast<double>(samples.size()));
}

double directional_std(std::span<const Tristimulus> samples, const Vec3& v) {
  if (samples.size() < 2) {
    throw ValidationError("directional_std needs at least 2 samples");
  }
  if (std::abs(v.norm() - 1.0) > 1e-9) {
    throw ValidationError("directional_std needs a unit direction vector");
  }
  const Vec3 mu = sample_mean(samples).vec();
  double acc = 0.0;
  for (const auto& c : samples) {
    const double p = v.dot(c.vec() - mu);
    acc += p * p;
  }
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double DirectionalStd::Sigma(Direction d) const {
  switch (d) {
    case Direction::kV1: return sigma_v1;
    case Direction::kV2: return sigma_v2;
    case Direction::kV3: return sigma_v3;
    default: break;
  }
  throw ValidationError("DirectionalStd only carries v1/v2/v3 sigmas");
}

DirectionalStd directional_stds(std::span<const Tristimulus> samples,
                                std::string color_id, std::string panel_id) {
  if (samples.size() < 2) {
    throw ValidationError("directional stds need at least 2 samples for color '" +
                          color_id + "'");
  }
  const Tristimulus mean = sample_mean(samples);
  const DirectionBasis basis = direction_basis(mean);
  DirectionalStd out;
  out.sigma_v1 = directional_std(samples, basis.v1);
  out.sigma_v2 = directional_std(samples, basis.v2);
  out.sigma_v3 = directional_std(samples, basis.v3);
  out.sum_xyz = mean.Sum();
  out.color_id = std::move(color_id);
  out.panel_id = std::move(panel_id);
  out.sample_count = samples.size();
  return out;
}

FitResult fit_k(std::span<const KPoint> points, Direction direction) {
  if (points.empty()) throw ValidationError("fit_k of an empty sequence");
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : points) {
    if (!(p.sum_xyz > 0.0)) throw ValidationError("fit_k needs X+Y+Z > 0 for every point");
    num += p.sum_xyz * p.sigma;
    den += p.sum_xyz * p.sum_xyz;
  }
  FitResult r;
  r.k = num / den;
  r.direction = direction;
  r.n = points.size();
  double rss = 0.0;
  for (const auto& p : points) {
    const double e = p.sigma - r.k * p.sum_xyz;
    rss += e * e;
  }
  r.residual_rms = std::sqrt(rss / static_cast<double>(points.size()));
  return r;
}

FitResult fit_k(std::span<const DirectionalStd> stds, Direction direction) {
  std::vector<KPoint> points;
  points.reserve(stds.size());
  for (const auto& s : stds) points.push_back({s.sum_xyz, s.Sigma(direction)});
  return fit_k(points, direction);
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kWithinPanel: return "within_panel";
    case Provenance::kBetweenPanel: return "between_panel";
    case Provenance::kFitted: return "fitted";
  }
  return "?";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "within_panel") return Provenance::kWithinPanel;
  if (s == "between_panel") return Provenance::kBetweenPanel;
  if (s == "fitted") return Provenance::kFitted;
  throw ValidationError("unknown provenance '" + std::string(s) + "'");
}

NoiseModel::NoiseModel(double a, double ratio, Provenance provenance)
    : a_(a), ratio_(ratio), provenance_(provenance) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError("noise model scale a must be positive and finite");
  }
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    throw ValidationError("noise model ratio must be >= 1 and finite");
  }
}

Mat3 covariance(const NoiseModel& model, const DirectionBasis& basis) {
  const double s = AnchorSum(basis.anchor);
  const double scale = model.a() * model.a() * s * s;
  const Mat3 u = basis.Matrix();
  const Eigen::Vector3d diag(model.ratio() * model.ratio(), 1.0, 1.0);
  Mat3 p = scale * (u * diag.asDiagonal() * u.transpose());
  return 0.5 * (p + p.transpose());
}

Mat3 covariance(const NoiseModel& model, const Tristimulus& c) {
  return covariance(model, direction_basis(c));
}

Mat3 covariance_factor(const NoiseModel& model, const Tristimulus& c) {
  const DirectionBasis basis = direction_basis(c);
  const Eigen::Vector3d diag(model.ratio(), 1.0, 1.0);
  return model.a() * c.Sum() * (basis.Matrix() * diag.asDiagonal());
}

PrincipalAxis principal_axis(std::span<const Tristimulus> samples) {
  if (samples.size() < 3) {
    throw ValidationError("principal_axis needs at least 3 samples");
  }
  const Tristimulus mean = sample_mean(samples);
  Mat3 scatter = Mat3::Zero();
  for (const auto& c : samples) {
    const Vec3 d = c.vec() - mean.vec();
    scatter += d * d.transpose();
  }
  scatter /= static_cast<double>(samples.size());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  const double top = eig.eigenvalues()[2];
  if (!(top > 0.0)) throw NumericalError("principal_axis of zero-variance samples");
  Vec3 axis = eig.eigenvectors().col(2).normalized();
  const Vec3 v1 = direction_basis(mean).v1;
  if (axis.dot(v1) < 0.0) axis = -axis;
  const double cosine = std::clamp(axis.dot(v1), -1.0, 1.0);
  return {axis, std::acos(cosine) * 180.0 / std::numbers::pi};
}

NoiseModel fit_noise_model(std::span<const DirectionalStd> dataset) {
  if (dataset.empty()) throw ValidationError("fit_noise_model of an empty dataset");
  const FitResult k1 = fit_k(dataset, Direction::kV1);
  const FitResult k2 = fit_k(dataset, Direction::kV2);
  const FitResult k3 = fit_k(dataset, Direction::kV3);
  const double perpendicular = 0.5 * (k2.k + k3.k);
  if (!(perpendicular > 0.0)) {
    throw NumericalError("fit_noise_model: zero variance perpendicular to v1");
  }
  const double ratio = k1.k / perpendicular;
  if (ratio < 1.0) {
    std::ostringstream os;
    os << "fit_noise_model: fitted ratio " << ratio
       << " < 1 (noise is not dominant along v1)";
    throw NumericalError(os.str());
  }
  NoiseModel model(k1.k / ratio, ratio, Provenance::kFitted);
  model.set_fits({k1, k2, k3});
  return model;
}

}  // namespace tristat
