#include "special.hpp"

#include "error.hpp"

#include <cmath>

namespace sw {

double sphere_area(int dim) {
  if (dim < 1) fail(ErrorCode::Domain, "sphere_area needs dim >= 1");
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double ball_volume(int dim) { return sphere_area(dim) / dim; }

double ball_volume0(int dim) { return dim == 0 ? 1.0 : ball_volume(dim); }

double sphere_area0(int dim) { return dim == 0 ? 1.0 : sphere_area(dim); }

}  // namespace sw
