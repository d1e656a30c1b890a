#pragma once

#include "proxreg/hilbert.hpp"

#include <cstdint>
#include <random>

namespace proxreg {

using Engine = std::mt19937_64;

/// Seed for stream `stream` of a run seeded with `seed`. Streams are
/// independent and reproducible in isolation, so trial t (or sample i) can be
/// regenerated without replaying any other stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Standard Gaussian vector scaled by `scale`.
Vector gaussian_vector(Engine& rng, Eigen::Index dim, double scale = 1.0);

/// Uniform point of the closed ball center + radius * B: normalized Gaussian
/// direction times radius * u^(1/n).
Vector uniform_in_ball(Engine& rng, const Vector& center, double radius);

} // namespace proxreg
