#include "proxreg/random.hpp"

#include <cmath>

namespace proxreg {

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

Vector gaussian_vector(Engine& rng, Eigen::Index dim, double scale)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = scale * normal(rng);
    }
    return v;
}

Vector uniform_in_ball(Engine& rng, const Vector& center, double radius)
{
    const auto n = center.size();
    Vector direction = gaussian_vector(rng, n);
    double len = direction.norm();
    while (len == 0.0) {
        direction = gaussian_vector(rng, n);
        len = direction.norm();
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    const double r = radius * std::pow(u, 1.0 / static_cast<double>(n));
    return center + (r / len) * direction;
}

} // namespace proxreg
