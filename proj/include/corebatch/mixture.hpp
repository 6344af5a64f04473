#pragma once

#include <cstdint>

#include "corebatch/matrix.hpp"

namespace corebatch {

// Isotropic 2-D Gaussian mixture with equal component weights.
struct GaussianMixtureSpec {
    Matrix centers;  // M x 2
    double sigma = 0.05;

    std::size_t modes() const { return centers.rows; }
};

// Centers on a sqrt(M) x sqrt(M) grid spanning [-4, 4]^2. M must be a perfect
// square; M = 1 degenerates to a single center at the origin.
GaussianMixtureSpec make_grid_mixture(std::size_t modes, double sigma);

// Uniform component choice, then isotropic Gaussian noise.
Matrix sample_mixture(const GaussianMixtureSpec& spec, std::size_t count, std::uint64_t seed);

}  // namespace corebatch
