#ifndef GIGAQBX_TREE_SUPPORT_HPP
#define GIGAQBX_TREE_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "gigaqbx/tree.hpp"

// Randomized particle sets and the verbatim tree invariant checks,
// shared between the unit suite and the acceptance suite.

namespace testsupport {

using namespace gigaqbx;

// Mixed particle soup: clustered sources, centers with varied radii,
// and a few point targets.
inline std::vector<Particle> random_particles(std::mt19937_64& rng, int count,
                                              double center_fraction = 0.3,
                                              double target_fraction = 0.1) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 0.35);
    const int num_clusters = 1 + int(u(rng) * 4);
    std::vector<Complex> cluster_centers;
    for (int i = 0; i < num_clusters; ++i)
        cluster_centers.emplace_back(4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0);

    std::vector<Particle> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Particle p;
        const Complex base = cluster_centers[i % num_clusters];
        p.pos = base + Complex(gauss(rng), gauss(rng));
        const double roll = u(rng);
        if (roll < center_fraction) {
            p.kind = ParticleKind::center;
            // radii spanning several scales, including a few huge disks
            p.radius = std::pow(10.0, -3.0 * u(rng)) * 0.5;
        } else if (roll < center_fraction + target_fraction) {
            p.kind = ParticleKind::point_target;
        } else {
            p.kind = ParticleKind::source;
        }
        p.payload = i;
        out.push_back(p);
    }
    return out;
}

// Verbatim checks of the tree ownership semantics. Returns an empty
// string when everything holds, else a description of the failure.
inline std::string check_tree_invariants(const Tree& tree) {
    const double t_f = tree.t_f;

    // ownership partition
    std::vector<int> seen(tree.particles.size(), 0);
    for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
        const TreeBox& b = tree.boxes[bi];
        for (int pi : b.sources) ++seen[pi];
        for (int pi : b.centers) ++seen[pi];
        for (int pi : b.point_targets) ++seen[pi];
        for (int c : b.children)
            if (c >= 0 && tree.boxes[c].parent != int(bi)) return "broken child link";
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] != 1) return "particle " + std::to_string(i) + " owned " +
                                 std::to_string(seen[i]) + " times";

    for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
        const TreeBox& b = tree.boxes[bi];
        for (int pi : b.centers) {
            const Particle& p = tree.particles[pi];
            // confinement: disk inside TCR of the owner
            if (!disk_fits(p.pos, p.radius, tcr(b, t_f)))
                return "center disk escapes its owner's TCR";
            if (tree.particle_suspended[pi]) {
                // suspended centers are too big for any child TCR
                if (!(p.radius > 0.5 * t_f * b.radius))
                    return "suspended center with radius <= t_f/2 * |b|";
                // the square of radius 8 r_c / t_f covers the owner's
                // 1-near neighborhood
                if (t_f > 0.0) {
                    const double big = 8.0 * p.radius / t_f;
                    if (linf(p.pos - b.center) + 3.0 * b.radius > big * (1 + 1e-12))
                        return "suspended-center square misses the 1-near neighborhood";
                }
            }
        }
    }

    // at most 9 leaf boxes at least as large as b overlap the interior
    // of b's 1-near neighborhood (boundary contact does not count: a
    // box intersecting only the boundary covers no colleague cell)
    for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
        const TreeBox& b = tree.boxes[bi];
        int hits = 0;
        for (std::size_t mj = 0; mj < tree.boxes.size(); ++mj) {
            const TreeBox& m = tree.boxes[mj];
            if (!m.is_leaf || m.radius < b.radius) continue;
            const double tol = 0.25 * b.radius;
            if (linf(m.center - b.center) < 3.0 * b.radius + m.radius - tol) ++hits;
        }
        if (hits > 9) return "more than 9 large leaves in a 1-near neighborhood";
    }

    if (tree.level_restricted) {
        for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
            if (!tree.boxes[bi].is_leaf) continue;
            for (std::size_t mj = 0; mj < tree.boxes.size(); ++mj) {
                if (!tree.boxes[mj].is_leaf) continue;
                if (std::abs(tree.boxes[bi].level - tree.boxes[mj].level) <= 1) continue;
                if (boxes_adjacent(tree.boxes[bi], tree.boxes[mj]))
                    return "adjacent leaves differ by more than one level";
            }
        }
    }
    return {};
}

} // namespace testsupport

#endif
