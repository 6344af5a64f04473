#include "corebatch/mixture.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace corebatch {

GaussianMixtureSpec make_grid_mixture(std::size_t modes, double sigma) {
    if (modes == 0) throw std::invalid_argument("mixture needs at least one mode");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(modes))));
    if (side * side != modes)
        throw std::invalid_argument("mode count " + std::to_string(modes) +
                                    " is not a perfect square");

    GaussianMixtureSpec spec;
    spec.sigma = sigma;
    spec.centers = Matrix(modes, 2);
    if (side == 1) return spec;  // single center at the origin

    const double span = 8.0;  // grid covers [-4, 4] in both axes
    const double step = span / static_cast<double>(side - 1);
    std::size_t r = 0;
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j, ++r) {
            spec.centers.at(r, 0) = -4.0 + step * static_cast<double>(j);
            spec.centers.at(r, 1) = -4.0 + step * static_cast<double>(i);
        }
    return spec;
}

Matrix sample_mixture(const GaussianMixtureSpec& spec, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("sample count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> mode(0, spec.modes() - 1);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    Matrix out(count, 2);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t m = mode(rng);
        out.at(i, 0) = spec.centers.at(m, 0) + noise(rng);
        out.at(i, 1) = spec.centers.at(m, 1) + noise(rng);
    }
    return out;
}

}  // namespace corebatch
