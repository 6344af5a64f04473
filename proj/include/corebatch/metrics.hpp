#pragma once

#include <vector>

#include "corebatch/matrix.hpp"
#include "corebatch/mixture.hpp"

namespace corebatch {

// Mode assignment statistics for a sample set against a mixture.
// recovered = share of modes with at least one assigned sample;
// high quality = share of samples within 4 sigma of their assigned center.
struct ModeReport {
    double recovered_pct = 0.0;
    double high_quality_pct = 0.0;
    std::vector<std::size_t> per_mode_counts;
};

// Fitted Gaussian: sample mean and unbiased sample covariance.
struct GaussianStats {
    std::vector<double> mean;
    Matrix cov;

    std::size_t dim() const { return mean.size(); }
};

// Nearest center per sample, ties to the lowest center index.
std::vector<std::size_t> assign_to_modes(const Matrix& samples, const GaussianMixtureSpec& spec);

ModeReport mode_report(const Matrix& samples, const GaussianMixtureSpec& spec);

GaussianStats estimate_gaussian(const Matrix& samples);

// Squared Frechet distance between two Gaussians:
//   |m_a - m_b|^2 + tr(C_a + C_b - 2 (C_a C_b)^{1/2}).
// The matrix square root is evaluated through the symmetric product
// C_a^{1/2} C_b C_a^{1/2}, whose trace equals tr((C_a C_b)^{1/2}).
double gaussian_fid(const GaussianStats& a, const GaussianStats& b);

}  // namespace corebatch
