#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simmap/dense.hpp"

namespace simmap {

/// Items scattered uniformly over the unit square; each user sits at a
/// random point of the square and lists the `profile_size` items nearest to
/// it. Co-occurrence therefore decays with latent distance and the geodesic
/// structure of the resulting graph is two-dimensional.
struct ManifoldOptions {
    std::size_t items = 2000;
    std::size_t users = 5000;
    std::size_t profile_size = 25;
    std::uint64_t seed = 7;
};

struct SyntheticProfiles {
    std::vector<std::pair<std::string, std::string>> records;  // (user id, item id)
    DenseMatrix item_positions;                                 // items x 2
    std::vector<std::string> item_ids;
};

SyntheticProfiles latent_manifold_profiles(const ManifoldOptions& options);

}  // namespace simmap
