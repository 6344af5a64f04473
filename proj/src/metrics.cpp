#include "corebatch/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace corebatch {

namespace {

constexpr double kEigFloor = -1e-6;  // anything lower means genuinely bad input

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m.at(i, j);
    return out;
}

// Symmetric PSD square root with eigenvalue clipping at zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sym, const char* label) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error(std::string("eigendecomposition failed for ") + label);
    Eigen::VectorXd lam = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < kEigFloor)
            throw std::runtime_error(std::string(label) + " has eigenvalue " +
                                     std::to_string(lam(i)) + " below the PSD floor");
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

std::vector<std::size_t> assign_to_modes(const Matrix& samples, const GaussianMixtureSpec& spec) {
    if (samples.cols != 2) throw std::invalid_argument("samples must be 2-D");
    std::vector<std::size_t> assign(samples.rows);
    for (std::size_t i = 0; i < samples.rows; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_m = 0;
        for (std::size_t m = 0; m < spec.modes(); ++m) {
            const double dx = samples.at(i, 0) - spec.centers.at(m, 0);
            const double dy = samples.at(i, 1) - spec.centers.at(m, 1);
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {  // strict: ties stay with the lower index
                best = d2;
                best_m = m;
            }
        }
        assign[i] = best_m;
    }
    return assign;
}

ModeReport mode_report(const Matrix& samples, const GaussianMixtureSpec& spec) {
    if (samples.rows == 0) throw std::invalid_argument("mode_report needs at least one sample");
    const auto assign = assign_to_modes(samples, spec);

    ModeReport report;
    report.per_mode_counts.assign(spec.modes(), 0);
    const double hq_limit = 4.0 * spec.sigma;
    std::size_t high_quality = 0;
    for (std::size_t i = 0; i < samples.rows; ++i) {
        const std::size_t m = assign[i];
        ++report.per_mode_counts[m];
        const double dx = samples.at(i, 0) - spec.centers.at(m, 0);
        const double dy = samples.at(i, 1) - spec.centers.at(m, 1);
        if (std::sqrt(dx * dx + dy * dy) <= hq_limit) ++high_quality;
    }
    std::size_t recovered = 0;
    for (std::size_t c : report.per_mode_counts)
        if (c > 0) ++recovered;
    report.recovered_pct =
        100.0 * static_cast<double>(recovered) / static_cast<double>(spec.modes());
    report.high_quality_pct =
        100.0 * static_cast<double>(high_quality) / static_cast<double>(samples.rows);
    return report;
}

GaussianStats estimate_gaussian(const Matrix& samples) {
    if (samples.rows < 2)
        throw std::invalid_argument("estimate_gaussian needs at least two samples");
    const std::size_t n = samples.rows, d = samples.cols;

    GaussianStats stats;
    stats.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) stats.mean[j] += samples.at(i, j);
    for (double& v : stats.mean) v /= static_cast<double>(n);

    stats.cov = Matrix(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a) {
            const double da = samples.at(i, a) - stats.mean[a];
            for (std::size_t b = a; b < d; ++b)
                stats.cov.at(a, b) += da * (samples.at(i, b) - stats.mean[b]);
        }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            const double v = stats.cov.at(a, b) / static_cast<double>(n - 1);
            stats.cov.at(a, b) = v;
            stats.cov.at(b, a) = v;  // symmetric by construction
        }
    return stats;
}

double gaussian_fid(const GaussianStats& a, const GaussianStats& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("gaussian_fid: dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) +
                                    ")");
    if (a.cov.rows != a.dim() || a.cov.cols != a.dim() || b.cov.rows != b.dim() ||
        b.cov.cols != b.dim())
        throw std::invalid_argument("gaussian_fid: covariance shape mismatch");

    const Eigen::MatrixXd ca = 0.5 * (to_eigen(a.cov) + to_eigen(a.cov).transpose());
    const Eigen::MatrixXd cb = 0.5 * (to_eigen(b.cov) + to_eigen(b.cov).transpose());

    double mean_term = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const double dm = a.mean[j] - b.mean[j];
        mean_term += dm * dm;
    }

    const Eigen::MatrixXd root_a = psd_sqrt(ca, "first covariance");
    Eigen::MatrixXd inner = root_a * cb * root_a;
    inner = 0.5 * (inner + inner.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed for the product term");
    double trace_root = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double lam = eig.eigenvalues()(i);
        if (lam < kEigFloor)
            throw std::runtime_error("product term has eigenvalue " + std::to_string(lam) +
                                     " below the PSD floor");
        trace_root += std::sqrt(std::max(lam, 0.0));
    }

    const double fid = mean_term + ca.trace() + cb.trace() - 2.0 * trace_root;
    if (fid < kEigFloor)
        throw std::runtime_error("frechet distance came out at " + std::to_string(fid) +
                                 ", below the tolerance floor");
    return std::max(fid, 0.0);
}

}  // namespace corebatch
