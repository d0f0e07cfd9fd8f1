#pragma once

#include "obs/geometry.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace obs::shapes {

/// The simplex spanned by the origin and the canonical basis of R^n.
geometry::Simplex standard(int n);

/// Right isosceles triangle {0 < y < x < pi}: (0,0), (pi,0), (pi,pi).
geometry::Simplex half_square_pi();

geometry::Simplex equilateral(double side);

/// Random simplex with vertices in the unit box, rejected until its
/// radius-ratio quality n*r/R reaches min_quality. Deterministic in seed.
geometry::Simplex random_simplex(int n, std::uint64_t seed, double min_quality = 0.6);

/// n * inradius / circumradius; 1 for the regular simplex.
double radius_ratio(const geometry::Simplex& s);

/// Accepts "standard-2", "standard-3", "half-square-pi", "equilateral:<side>",
/// "random-<n>:<seed>", an inline JSON object {"vertices": [[...], ...]} or
/// "@path" to a JSON file holding such an object. Throws InvalidInput.
geometry::Simplex parse_shape(std::string_view text);

/// {"vertices": [[x, ...], ...]}
std::string to_json(const geometry::Simplex& s);
geometry::Simplex from_json(std::string_view text);

}  // namespace obs::shapes
