#pragma once

#include <Eigen/Core>

namespace tristat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// One CIE 1931 XYZ measurement. Components are finite and non-negative;
/// construction through the public constructor enforces this.
class Tristimulus {
 public:
  Tristimulus() = default;
  Tristimulus(double X, double Y, double Z);

  /// Builds from a vector, throwing ValidationError on negative or
  /// non-finite components.
  static Tristimulus FromVector(const Vec3& v);

  /// Builds from a vector after replacing negative components with zero.
  /// Returns the number of replaced components through `clamped`.
  static Tristimulus ClampFromVector(const Vec3& v, int* clamped = nullptr);

  double X() const { return xyz_[0]; }
  double Y() const { return xyz_[1]; }
  double Z() const { return xyz_[2]; }
  double Sum() const { return xyz_.sum(); }
  const Vec3& vec() const { return xyz_; }

  Tristimulus Scaled(double s) const;

  friend bool operator==(const Tristimulus& a, const Tristimulus& b) {
    return a.xyz_ == b.xyz_;
  }

 private:
  Vec3 xyz_ = Vec3::Zero();
};

struct Chromaticity {
  double x = 0.0;
  double y = 0.0;
};

struct LabColor {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
  Tristimulus white;
};

/// x = X/(X+Y+Z), y = Y/(X+Y+Z). Throws NumericalError when X+Y+Z = 0.
Chromaticity chromaticity(const Tristimulus& c);

/// Chromaticity of s*c equals that of c (within 1e-12). Throws for a
/// degenerate c or non-positive s.
bool scale_invariance_check(const Tristimulus& c, double s);

/// CIE 1976 L*a*b* relative to `white`. Every white component must be > 0.
LabColor xyz_to_lab(const Tristimulus& c, const Tristimulus& white);

/// Inverse of xyz_to_lab. Components that would come out negative are
/// returned as-is in the vector form.
Vec3 lab_to_xyz(const LabColor& lab);

/// CIE76 color difference. Throws ValidationError if the two colors were
/// computed against whites differing by more than 1e-9 relative.
double delta_e76(const LabColor& p, const LabColor& q);

}  // namespace tristat
