#ifndef GIGAQBX_TREE_HPP
#define GIGAQBX_TREE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "gigaqbx/types.hpp"

// Adaptive quadtree over sources, QBX centers, and point targets.
// Centers are targets with extent: a box owns a center only if the
// center's disk fits inside the box's target confinement region, the
// box inflated by (1 + t_f). Centers whose disks fit no child TCR stay
// suspended in the parent; sources and point targets always settle in
// leaves.

namespace gigaqbx {

enum class ParticleKind : std::uint8_t { source, center, point_target };

struct Particle {
    ParticleKind kind = ParticleKind::source;
    Complex pos{};
    double radius = 0.0;  // nonzero only for centers
    int payload = -1;     // index into the originating array
};

inline double linf(Complex d) {
    return std::max(std::abs(d.real()), std::abs(d.imag()));
}

// Closed axis-aligned square given by center and half-width.
struct SquareRegion {
    Complex center{};
    double half = 0.0;
};

struct TreeBox {
    Complex center{};
    double radius = 0.0;  // half-width
    int level = 0;
    int parent = -1;
    std::array<int, 4> children{-1, -1, -1, -1};

    std::vector<int> sources;        // particle indices
    std::vector<int> centers;
    std::vector<int> point_targets;

    bool is_leaf = true;
    bool is_source_box = false;        // owns a source
    bool is_target_box = false;        // owns a center or point target
    bool is_target_ancestor = false;   // strict ancestor of a target box
    int subtree_source_count = 0;
    int suspended_center_count = 0;

    int owned_count() const {
        return int(sources.size() + centers.size() + point_targets.size());
    }
};

struct Tree {
    std::vector<TreeBox> boxes;  // breadth-first, so level-ordered
    std::vector<Particle> particles;
    double t_f = 0.9;
    int n_max = 64;
    int max_depth = 40;
    bool level_restricted = false;
    int levels = 0;
    int depth_cap_hits = 0;
    std::vector<char> particle_suspended;   // per particle; centers only
    std::vector<int> owner_of_particle;
    std::vector<std::vector<int>> colleagues2;  // per box: 2-colleagues incl. itself

    const TreeBox& root() const { return boxes.front(); }
};

// Target confinement region of a box.
inline SquareRegion tcr(const TreeBox& b, double t_f) {
    return SquareRegion{b.center, b.radius * (1.0 + t_f)};
}

inline SquareRegion k_near_neighborhood(const TreeBox& b, int k) {
    return SquareRegion{b.center, b.radius * (1.0 + 2.0 * k)};
}

// Adequate-separation relation; all variants compare the l-infinity
// distance of the centers against 3*(size of a) + (size of b), with the
// TCR-bearing operand inflated by (1 + t_f).
inline bool separated_box_box(const TreeBox& a, const TreeBox& b) {
    return linf(a.center - b.center) >= 3.0 * a.radius + b.radius;
}

inline bool separated_box_tcr(const TreeBox& a, const TreeBox& b, double t_f) {
    return linf(a.center - b.center) >= 3.0 * a.radius + b.radius * (1.0 + t_f);
}

inline bool separated_tcr_box(const TreeBox& a, const TreeBox& b, double t_f) {
    return linf(a.center - b.center) >= 3.0 * a.radius * (1.0 + t_f) + b.radius;
}

// Closed boxes at l-infinity distance zero, corner contact included.
// True gaps are quantized by the finer box width, so a small relative
// tolerance absorbs accumulated center roundoff.
inline bool boxes_adjacent(const TreeBox& a, const TreeBox& b) {
    const double tol = 0.25 * std::min(a.radius, b.radius);
    const double reach = a.radius + b.radius + tol;
    return std::abs(a.center.real() - b.center.real()) <= reach &&
           std::abs(a.center.imag() - b.center.imag()) <= reach;
}

// Disk of radius rho at ell-infinity distance d from the region center
// fits iff d + rho <= half-width.
inline bool disk_fits(Complex disk_center, double rho, const SquareRegion& region) {
    return linf(disk_center - region.center) + rho <= region.half;
}

namespace detail {

inline int quadrant_of(Complex p, Complex box_center) {
    return (p.real() >= box_center.real() ? 1 : 0) +
           (p.imag() >= box_center.imag() ? 2 : 0);
}

inline Complex child_center(Complex c, double child_half, int quadrant) {
    const double sx = (quadrant & 1) ? 1.0 : -1.0;
    const double sy = (quadrant & 2) ? 1.0 : -1.0;
    return c + Complex(sx * child_half, sy * child_half);
}

// A center is eligible for the child quadrant holding its position iff
// its disk fits that child's TCR.
inline bool center_child_eligible(const Particle& p, const TreeBox& b, double t_f) {
    const double child_half = 0.5 * b.radius;
    const Complex cc = child_center(b.center, child_half, quadrant_of(p.pos, b.center));
    return disk_fits(p.pos, p.radius, SquareRegion{cc, child_half * (1.0 + t_f)});
}

inline bool particle_child_eligible(const Particle& p, const TreeBox& b, double t_f) {
    if (p.kind != ParticleKind::center) return true;
    return center_child_eligible(p, b, t_f);
}

} // namespace detail

inline Tree build_tree(std::vector<Particle> particles, int n_max, double t_f,
                       bool level_restrict = false, int max_depth = 40) {
    require(n_max >= 1, "build_tree: n_max must be >= 1");
    require(t_f >= 0.0 && t_f < 1.0, "build_tree: need 0 <= t_f < 1");
    require(!particles.empty(), "build_tree: no particles");

    Tree tree;
    tree.t_f = t_f;
    tree.n_max = n_max;
    tree.max_depth = max_depth;
    tree.level_restricted = level_restrict;

    // Root square: bounding square of all particles, center disks
    // included, padded so nothing sits on the closed boundary.
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Particle& p : particles) {
        xmin = std::min(xmin, p.pos.real() - p.radius);
        xmax = std::max(xmax, p.pos.real() + p.radius);
        ymin = std::min(ymin, p.pos.imag() - p.radius);
        ymax = std::max(ymax, p.pos.imag() + p.radius);
    }
    const Complex root_center(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    double half = 0.5 * std::max(xmax - xmin, ymax - ymin) * 1.005;
    if (!(half > 0.0)) half = 1.0;

    TreeBox root;
    root.center = root_center;
    root.radius = half;
    root.level = 0;
    tree.boxes.push_back(root);

    // initial ownership: root owns everything
    std::vector<std::vector<int>> pending(1);
    pending[0].resize(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) pending[0][i] = int(i);

    auto store_particle = [&](TreeBox& b, int pi) {
        switch (particles[pi].kind) {
            case ParticleKind::source: b.sources.push_back(pi); break;
            case ParticleKind::center: b.centers.push_back(pi); break;
            case ParticleKind::point_target: b.point_targets.push_back(pi); break;
        }
    };

    auto split_box = [&](int bi, std::vector<int>&& owned) {
        // partition into suspended (stay) and per-quadrant eligible
        std::array<std::vector<int>, 4> quad;
        for (int pi : owned) {
            if (detail::particle_child_eligible(particles[pi], tree.boxes[bi], t_f))
                quad[detail::quadrant_of(particles[pi].pos, tree.boxes[bi].center)]
                    .push_back(pi);
            else
                store_particle(tree.boxes[bi], pi);
        }
        tree.boxes[bi].is_leaf = false;
        for (int q = 0; q < 4; ++q) {
            if (quad[q].empty()) continue;  // prune empty children
            TreeBox child;
            child.radius = 0.5 * tree.boxes[bi].radius;
            child.center = detail::child_center(tree.boxes[bi].center, child.radius, q);
            child.level = tree.boxes[bi].level + 1;
            child.parent = bi;
            const int ci = int(tree.boxes.size());
            tree.boxes[bi].children[q] = ci;
            tree.boxes.push_back(child);
            pending.push_back(std::move(quad[q]));
        }
    };

    // breadth-first subdivision; pending[i] holds box i's unsettled particles
    for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
        std::vector<int> owned = std::move(pending[bi]);
        int eligible = 0;
        for (int pi : owned)
            eligible += detail::particle_child_eligible(particles[pi], tree.boxes[bi], t_f);
        if (eligible > n_max && tree.boxes[bi].level < max_depth) {
            split_box(int(bi), std::move(owned));
        } else {
            if (eligible > n_max) ++tree.depth_cap_hits;
            for (int pi : owned) store_particle(tree.boxes[bi], pi);
        }
    }

    tree.particles = std::move(particles);

    if (level_restrict) {
        // split any leaf with an adjacent leaf two or more levels deeper;
        // balancing splits keep empty children so the geometry subdivides
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
                if (!tree.boxes[bi].is_leaf) continue;
                bool violated = false;
                for (std::size_t mj = 0; mj < tree.boxes.size() && !violated; ++mj)
                    if (tree.boxes[mj].is_leaf &&
                        tree.boxes[mj].level > tree.boxes[bi].level + 1 &&
                        boxes_adjacent(tree.boxes[bi], tree.boxes[mj]))
                        violated = true;
                if (!violated) continue;
                changed = true;
                // move owned particles aside and split unconditionally
                std::vector<int> owned;
                owned.swap(tree.boxes[bi].sources);
                for (int pi : tree.boxes[bi].centers) owned.push_back(pi);
                tree.boxes[bi].centers.clear();
                for (int pi : tree.boxes[bi].point_targets) owned.push_back(pi);
                tree.boxes[bi].point_targets.clear();

                tree.boxes[bi].is_leaf = false;
                std::array<std::vector<int>, 4> quad;
                for (int pi : owned) {
                    if (detail::particle_child_eligible(tree.particles[pi],
                                                        tree.boxes[bi], t_f))
                        quad[detail::quadrant_of(tree.particles[pi].pos,
                                                 tree.boxes[bi].center)]
                            .push_back(pi);
                    else
                        store_particle(tree.boxes[bi], pi);
                }
                for (int q = 0; q < 4; ++q) {
                    TreeBox child;
                    child.radius = 0.5 * tree.boxes[bi].radius;
                    child.center =
                        detail::child_center(tree.boxes[bi].center, child.radius, q);
                    child.level = tree.boxes[bi].level + 1;
                    child.parent = int(bi);
                    const int ci = int(tree.boxes.size());
                    tree.boxes[bi].children[q] = ci;
                    for (int pi : quad[q]) store_particle(child, pi);
                    tree.boxes.push_back(child);
                }
            }
        }
        // restore breadth-first numbering
        std::vector<int> order;
        order.reserve(tree.boxes.size());
        order.push_back(0);
        for (std::size_t k = 0; k < order.size(); ++k)
            for (int c : tree.boxes[order[k]].children)
                if (c >= 0) order.push_back(c);
        std::vector<int> new_id(tree.boxes.size());
        for (std::size_t k = 0; k < order.size(); ++k) new_id[order[k]] = int(k);
        std::vector<TreeBox> reordered(tree.boxes.size());
        for (std::size_t old = 0; old < tree.boxes.size(); ++old) {
            TreeBox b = std::move(tree.boxes[old]);
            if (b.parent >= 0) b.parent = new_id[b.parent];
            for (int& c : b.children)
                if (c >= 0) c = new_id[c];
            reordered[new_id[old]] = std::move(b);
        }
        tree.boxes = std::move(reordered);
    }

    // --- finalize flags, counts, colleague lists ---
    tree.levels = 0;
    tree.owner_of_particle.assign(tree.particles.size(), -1);
    tree.particle_suspended.assign(tree.particles.size(), 0);
    for (std::size_t bi = 0; bi < tree.boxes.size(); ++bi) {
        TreeBox& b = tree.boxes[bi];
        tree.levels = std::max(tree.levels, b.level + 1);
        b.is_source_box = !b.sources.empty();
        b.is_target_box = !b.centers.empty() || !b.point_targets.empty();
        for (int pi : b.sources) tree.owner_of_particle[pi] = int(bi);
        for (int pi : b.point_targets) tree.owner_of_particle[pi] = int(bi);
        for (int pi : b.centers) {
            tree.owner_of_particle[pi] = int(bi);
            const bool settled =
                b.is_leaf && detail::center_child_eligible(tree.particles[pi], b, t_f);
            if (!settled) {
                tree.particle_suspended[pi] = 1;
                ++b.suspended_center_count;
            }
        }
    }
    for (int bi = int(tree.boxes.size()) - 1; bi >= 0; --bi) {
        TreeBox& b = tree.boxes[bi];
        b.subtree_source_count += int(b.sources.size());
        if (b.parent >= 0) {
            tree.boxes[b.parent].subtree_source_count += b.subtree_source_count;
            if (b.is_target_box || b.is_target_ancestor)
                tree.boxes[b.parent].is_target_ancestor = true;
        }
    }

    // 2-colleague lists (same level, within the 2-near neighborhood),
    // built top-down from the parent's lists
    tree.colleagues2.assign(tree.boxes.size(), {});
    tree.colleagues2[0] = {0};
    for (std::size_t bi = 1; bi < tree.boxes.size(); ++bi) {
        const TreeBox& b = tree.boxes[bi];
        const double reach = 4.0 * b.radius + 0.25 * b.radius;
        for (int pc : tree.colleagues2[b.parent])
            for (int cand : tree.boxes[pc].children) {
                if (cand < 0) continue;
                if (linf(tree.boxes[cand].center - b.center) <= reach)
                    tree.colleagues2[bi].push_back(cand);
            }
    }
    return tree;
}

// Same-level boxes inside the k-near neighborhood, b included.
inline std::vector<int> k_colleagues(const Tree& tree, int bi, int k) {
    require(k == 1 || k == 2, "k_colleagues: k must be 1 or 2");
    const TreeBox& b = tree.boxes[bi];
    if (k == 2) return tree.colleagues2[bi];
    std::vector<int> out;
    const double reach = 2.0 * b.radius + 0.25 * b.radius;
    for (int c : tree.colleagues2[bi])
        if (linf(tree.boxes[c].center - b.center) <= reach) out.push_back(c);
    return out;
}

} // namespace gigaqbx

#endif
