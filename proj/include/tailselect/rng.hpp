#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tailselect {

// All sampling is driven by mt19937_64, whose output sequence is fixed by the
// standard, plus hand-rolled transforms below; results are therefore identical
// across platforms and standard libraries.
using Rng = std::mt19937_64;

// Uniform draw in the open interval (0,1); endpoint values are resampled.
double uniform_open01(Rng& g);

// Standard normal via Box-Muller; consumes exactly two uniforms, no cache.
double standard_normal(Rng& g);

// Gamma(shape, scale=1) via Marsaglia-Tsang, valid for any shape > 0.
double gamma_draw(Rng& g, double shape);

double chi_square_draw(Rng& g, double dof);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

// Per-trial stream seed: a splittable hash of (base_seed, method id, T, trial)
// so any cell of an experiment is reproducible in isolation.
std::uint64_t trial_seed(std::uint64_t base_seed, std::string_view method,
                         long T, long trial);

}  // namespace tailselect
