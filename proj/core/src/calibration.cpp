#include "tristat/calibration.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <sstream>

#include "tristat/error.hpp"

namespace tristat {
namespace {

void RequireValidPair(const MeasurementPair& pair) {
  if (!(pair.source.Sum() > 0.0) || !(pair.reference.Sum() > 0.0)) {
    throw ValidationError("measurement pair '" + pair.color_id +
                          "' has a zero tristimulus vector");
  }
}

/// Square root of the pair weight: S with S^T S = (2 P_hat)^{-1}.
Mat3 PairWhitening(const MeasurementPair& pair, const NoiseModel& model,
                   Weighting weighting) {
  if (weighting == Weighting::kUniform) return Mat3::Identity();
  // a only rescales W, so it is dropped to keep M bit-identical across a.
  const DirectionBasis basis = direction_basis(pair.reference);
  const Vec3 inv_scale(1.0 / model.ratio(), 1.0, 1.0);
  return inv_scale.asDiagonal() * basis.Matrix().transpose() /
         (std::sqrt(2.0) * pair.reference.Sum());
}

}  // namespace

std::string_view to_string(Weighting w) {
  return w == Weighting::kProposed ? "proposed" : "uniform";
}

Weighting weighting_from_string(std::string_view s) {
  if (s == "proposed") return Weighting::kProposed;
  if (s == "uniform") return Weighting::kUniform;
  throw ValidationError("unknown weighting '" + std::string(s) + "'");
}

DesignRow build_design_row(const MeasurementPair& pair) {
  RequireValidPair(pair);
  DesignRow row;
  row.H.setZero();
  for (int block = 0; block < 3; ++block) {
    row.H.block<1, 3>(block, 3 * block) = pair.source.vec().transpose();
  }
  row.target = pair.reference.vec();
  return row;
}

CalibrationMatrix fit_matrix(std::span<const MeasurementPair> pairs,
                             const NoiseModel& model, Weighting weighting) {
  if (pairs.size() < 3) {
    throw ValidationError("fit_matrix needs at least 3 measurement pairs, got " +
                          std::to_string(pairs.size()));
  }
  Eigen::Matrix<double, 3, Eigen::Dynamic> sources(3, pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    RequireValidPair(pairs[i]);
    sources.col(static_cast<Eigen::Index>(i)) = pairs[i].source.vec();
  }
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 3, Eigen::Dynamic>> qr(sources);
  if (qr.rank() < 3) {
    throw NumericalError("source colors span only " + std::to_string(qr.rank()) +
                         " dimension(s); need 3 linearly independent measurements");
  }

  // Whitened system A m = b with A^T A = H^T W H; QR avoids squaring its conditioning.
  const auto rows = static_cast<Eigen::Index>(3 * pairs.size());
  Eigen::Matrix<double, Eigen::Dynamic, 9> a(rows, 9);
  Eigen::VectorXd b(rows);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const DesignRow row = build_design_row(pairs[i]);
    const Mat3 w = PairWhitening(pairs[i], model, weighting);
    const auto at = static_cast<Eigen::Index>(3 * i);
    a.middleRows<3>(at) = w * row.H;
    b.segment<3>(at) = w * row.target;
  }

  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 9>> svd(a);
  const double hi = svd.singularValues()(0);
  const double lo = svd.singularValues()(8);
  const double cond = lo > 0.0 ? (hi / lo) * (hi / lo) : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream os;
    os << "normal matrix is singular or ill-conditioned (condition number " << cond
       << ", limit " << kMaxConditionNumber << ")";
    throw NumericalError(os.str());
  }
  const ParamVector m = a.householderQr().solve(b);

  CalibrationMatrix out;
  out.M = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(m.data());
  out.weighting = weighting;
  out.fit_pairs = pairs.size();
  out.condition_number = cond;
  return out;
}

Vec3 apply(const CalibrationMatrix& calib, const Tristimulus& c) {
  return calib.M * c.vec();
}

double weighted_objective(const Mat3& M, std::span<const MeasurementPair> pairs,
                          const NoiseModel& model) {
  double total = 0.0;
  for (const auto& pair : pairs) {
    const Vec3 r = pair.reference.vec() - M * pair.source.vec();
    total += r.dot((2.0 * covariance(model, pair.reference)).ldlt().solve(r));
  }
  return total;
}

Evaluation evaluate(const CalibrationMatrix& calib,
                    std::span<const MeasurementPair> holdout) {
  if (holdout.empty()) throw ValidationError("evaluate needs a non-empty holdout set");
  Evaluation out;
  out.per_pair.reserve(holdout.size());
  double total = 0.0;
  for (const auto& pair : holdout) {
    const double e = (pair.reference.vec() - apply(calib, pair.source)).cwiseAbs().sum();
    out.per_pair.push_back({pair.color_id, e});
    total += e;
  }
  out.mean_error = total / static_cast<double>(holdout.size());
  return out;
}

}  // namespace tristat
