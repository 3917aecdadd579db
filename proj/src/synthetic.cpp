#include "simmap/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "simmap/error.hpp"
#include "simmap/rng.hpp"

namespace simmap {
namespace {

std::string padded(char prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%07zu", prefix, i);
    return buf;
}

}  // namespace

SyntheticProfiles latent_manifold_profiles(const ManifoldOptions& o) {
    if (o.items < 2 || o.profile_size < 2 || o.profile_size > o.items || o.users < 1) {
        throw ContractError("synthetic profiles need items >= profile_size >= 2 and users >= 1");
    }
    Rng rng(o.seed);
    SyntheticProfiles out;
    out.item_positions = DenseMatrix(o.items, 2);
    for (std::size_t i = 0; i < o.items; ++i) {
        out.item_positions(i, 0) = uniform_unit(rng);
        out.item_positions(i, 1) = uniform_unit(rng);
        out.item_ids.push_back(padded('i', i));
    }
    std::vector<std::pair<double, std::size_t>> dist(o.items);
    out.records.reserve(o.users * o.profile_size);
    for (std::size_t u = 0; u < o.users; ++u) {
        const double x = uniform_unit(rng);
        const double y = uniform_unit(rng);
        for (std::size_t i = 0; i < o.items; ++i) {
            const double dx = out.item_positions(i, 0) - x;
            const double dy = out.item_positions(i, 1) - y;
            dist[i] = {dx * dx + dy * dy, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(o.profile_size), dist.end());
        const auto user = padded('u', u);
        for (std::size_t r = 0; r < o.profile_size; ++r) out.records.emplace_back(user, out.item_ids[dist[r].second]);
    }
    return out;
}

}  // namespace simmap
