#include "tristat/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tristat/error.hpp"

namespace tristat {
namespace {

constexpr double kLabEpsilon = 216.0 / 24389.0;  // (6/29)^3
constexpr double kLabKappa = 24389.0 / 27.0;     // (29/3)^3

double LabForward(double t) {
  return t > kLabEpsilon ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

double LabInverse(double f) {
  const double cube = f * f * f;
  return cube > kLabEpsilon ? cube : (116.0 * f - 16.0) / kLabKappa;
}

void RequireValidComponents(const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) {
      std::ostringstream os;
      os << "tristimulus component " << "XYZ"[i] << " = " << v[i]
         << " is negative or not finite";
      throw ValidationError(os.str());
    }
  }
}

double RequirePositiveSum(const Tristimulus& c) {
  const double s = c.Sum();
  if (!(s > 0.0)) {
    throw NumericalError("degenerate tristimulus: X+Y+Z must be > 0");
  }
  return s;
}

}  // namespace

Tristimulus::Tristimulus(double X, double Y, double Z) : xyz_(X, Y, Z) {
  RequireValidComponents(xyz_);
}

Tristimulus Tristimulus::FromVector(const Vec3& v) {
  return Tristimulus(v[0], v[1], v[2]);
}

Tristimulus Tristimulus::ClampFromVector(const Vec3& v, int* clamped) {
  int n = 0;
  Vec3 out = v;
  for (int i = 0; i < 3; ++i) {
    if (out[i] < 0.0) {
      out[i] = 0.0;
      ++n;
    }
  }
  if (clamped != nullptr) *clamped = n;
  return FromVector(out);
}

Tristimulus Tristimulus::Scaled(double s) const {
  return FromVector(xyz_ * s);
}

Chromaticity chromaticity(const Tristimulus& c) {
  const double s = RequirePositiveSum(c);
  return {c.X() / s, c.Y() / s};
}

bool scale_invariance_check(const Tristimulus& c, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ValidationError("scale factor must be positive and finite");
  }
  const Chromaticity base = chromaticity(c);
  const Chromaticity scaled = chromaticity(c.Scaled(s));
  return std::abs(base.x - scaled.x) <= 1e-12 &&
         std::abs(base.y - scaled.y) <= 1e-12;
}

LabColor xyz_to_lab(const Tristimulus& c, const Tristimulus& white) {
  if (!(white.X() > 0.0 && white.Y() > 0.0 && white.Z() > 0.0)) {
    throw ValidationError("reference white must be strictly positive");
  }
  const double fx = LabForward(c.X() / white.X());
  const double fy = LabForward(c.Y() / white.Y());
  const double fz = LabForward(c.Z() / white.Z());
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz), white};
}

Vec3 lab_to_xyz(const LabColor& lab) {
  const double fy = (lab.L + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  return {LabInverse(fx) * lab.white.X(), LabInverse(fy) * lab.white.Y(),
          LabInverse(fz) * lab.white.Z()};
}

double delta_e76(const LabColor& p, const LabColor& q) {
  const Vec3 wp = p.white.vec();
  const Vec3 wq = q.white.vec();
  const double scale = std::max(wp.cwiseAbs().maxCoeff(), wq.cwiseAbs().maxCoeff());
  if ((wp - wq).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValidationError("delta E between colors with different reference whites");
  }
  const double dl = p.L - q.L;
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

}  // namespace tristat
