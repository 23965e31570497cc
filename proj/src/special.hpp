#pragma once

namespace sw {

/// |S^{dim-1}| = 2 pi^{dim/2} / Gamma(dim/2). Throws Domain for dim < 1.
double sphere_area(int dim);

/// Volume of the unit ball in R^dim. Throws Domain for dim < 1.
double ball_volume(int dim);

/// As ball_volume, but with the convention |B^0| = 1 used by product supports.
double ball_volume0(int dim);

/// |S^{dim-1}| with |S^{-1}| = 1, the counting measure of a zero-dimensional sphere factor.
double sphere_area0(int dim);

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace sw
