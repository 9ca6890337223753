#pragma once
// Gauss-Legendre quadrature rules of arbitrary order, cached per order.

#include <vector>

namespace lorlab {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;  // weights summing to 2
};

// Nodes by Newton iteration on the Legendre polynomial; cached.
const GaussRule& gauss_legendre(int order);

// The same rule affinely mapped to [a, b].
GaussRule gauss_legendre_on(int order, double a, double b);

}  // namespace lorlab
