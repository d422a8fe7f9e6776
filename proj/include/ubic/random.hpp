#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ubic {

/// Generator used for every random draw (noise, subdomain centers,
/// dictionary initialization). Its name is written into field headers.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64";

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed for a named pipeline stage from the
/// root seed: splitmix64(root ^ fnv1a(stage)).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage);

}  // namespace ubic
