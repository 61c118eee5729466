#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tristat/colorspace.hpp"
#include "tristat/noise_model.hpp"

namespace tristat {

/// A color measured on the display being calibrated (source) and on the
/// reference display.
struct MeasurementPair {
  Tristimulus source;
  Tristimulus reference;
  std::string color_id;
};

enum class Weighting { kProposed, kUniform };

std::string_view to_string(Weighting w);
Weighting weighting_from_string(std::string_view s);

struct CalibrationMatrix {
  Mat3 M = Mat3::Identity();
  Weighting weighting = Weighting::kProposed;
  std::size_t fit_pairs = 0;
  double condition_number = 1.0;
};

using DesignBlock = Eigen::Matrix<double, 3, 9>;
using ParamVector = Eigen::Matrix<double, 9, 1>;

struct DesignRow {
  DesignBlock H;
  Vec3 target;
};

/// H_i with (X_i, Y_i, Z_i) in each row block, so that H_i * vec(M) = M c_i
/// with vec(M) row-major (m11, m12, ..., m33).
DesignRow build_design_row(const MeasurementPair& pair);

/// Normal equations with a condition number above this are rejected.
inline constexpr double kMaxConditionNumber = 1e12;

/// Weighted least squares m = (H^T W H)^{-1} H^T W c_hat with
/// W = blockdiag((2 P_hat_i)^{-1}) for kProposed and W = I for kUniform.
CalibrationMatrix fit_matrix(std::span<const MeasurementPair> pairs,
                             const NoiseModel& model, Weighting weighting);

Vec3 apply(const CalibrationMatrix& calib, const Tristimulus& c);

/// sum_i (c_hat_i - M c_i)^T (2 P_hat_i)^{-1} (c_hat_i - M c_i)
double weighted_objective(const Mat3& M, std::span<const MeasurementPair> pairs,
                          const NoiseModel& model);

struct PairError {
  std::string color_id;
  double error = 0.0;  // sum of |c_hat - M c| over X, Y, Z
};

struct Evaluation {
  std::vector<PairError> per_pair;
  double mean_error = 0.0;
};

Evaluation evaluate(const CalibrationMatrix& calib,
                    std::span<const MeasurementPair> holdout);

}  // namespace tristat
