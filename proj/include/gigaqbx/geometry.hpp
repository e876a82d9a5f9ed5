#ifndef GIGAQBX_GEOMETRY_HPP
#define GIGAQBX_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gigaqbx/types.hpp"

// Test-curve generation, panel-wise Gauss-Legendre discretization,
// upsampling, QBX center placement, refinement to QBX admissibility,
// and target-to-center association.

namespace gigaqbx {

// --- curves -----------------------------------------------------------------

// Smooth closed curve on [0,1] with analytic derivative.
struct Curve {
    std::function<Complex(double)> position;
    std::function<Complex(double)> derivative;
    std::string descriptor;
};

// (1 + 0.8 sin(2 pi n t)) (cos 2 pi t, sin 2 pi t)
inline Curve starfish(int arms) {
    require(arms >= 1, "starfish: arm count must be >= 1");
    const double n = arms;
    Curve c;
    c.descriptor = "starfish-" + std::to_string(arms);
    c.position = [n](double t) {
        const double r = 1.0 + 0.8 * std::sin(2.0 * pi * n * t);
        return Complex(r * std::cos(2.0 * pi * t), r * std::sin(2.0 * pi * t));
    };
    c.derivative = [n](double t) {
        const double r = 1.0 + 0.8 * std::sin(2.0 * pi * n * t);
        const double dr = 0.8 * 2.0 * pi * n * std::cos(2.0 * pi * n * t);
        const double ct = std::cos(2.0 * pi * t), st = std::sin(2.0 * pi * t);
        return Complex(dr * ct - r * 2.0 * pi * st, dr * st + r * 2.0 * pi * ct);
    };
    return c;
}

inline Curve circle(double radius = 1.0) {
    Curve c;
    c.descriptor = "circle";
    c.position = [radius](double t) {
        return Complex(radius * std::cos(2.0 * pi * t), radius * std::sin(2.0 * pi * t));
    };
    c.derivative = [radius](double t) {
        return Complex(-radius * 2.0 * pi * std::sin(2.0 * pi * t),
                       radius * 2.0 * pi * std::cos(2.0 * pi * t));
    };
    return c;
}

// --- Gauss-Legendre rule ----------------------------------------------------

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Newton iteration on the Legendre recurrence.
inline QuadratureRule gauss_legendre(int n) {
    require(n >= 1 && n <= 128, "gauss_legendre: node count out of range");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

// --- discretization ---------------------------------------------------------

struct NodeRecord {
    Complex position;
    Complex normal;  // unit, outward
    double weight;   // GL weight x speed x parameter half-width
    double t;
};

struct Panel {
    double t0, t1;
    double length;  // quadrature-approximated arc length
    int first_node, node_count;
};

struct Discretization {
    std::vector<Panel> panels;
    int nodes_per_panel = 0;
    bool upsampled = false;

    // flattened per-node data
    std::vector<double> t;
    std::vector<Complex> pos;
    std::vector<Complex> normal;
    std::vector<double> weight;
    std::vector<int> panel_id;

    std::size_t num_nodes() const { return pos.size(); }
    std::size_t num_panels() const { return panels.size(); }

    NodeRecord node(std::size_t i) const {
        return NodeRecord{pos[i], normal[i], weight[i], t[i]};
    }

    double total_weight() const {
        double s = 0.0;
        for (double w : weight) s += w;
        return s;
    }

    // panels adjacent in parameter (shared endpoint, cyclically)
    bool panels_adjacent(int a, int b) const {
        if (a == b) return true;
        const int np = static_cast<int>(panels.size());
        return (a + 1) % np == b || (b + 1) % np == a;
    }
};

namespace detail {

inline void append_panel_nodes(Discretization& d, const Curve& curve,
                               const QuadratureRule& rule, double t0, double t1) {
    Panel p;
    p.t0 = t0;
    p.t1 = t1;
    p.first_node = static_cast<int>(d.pos.size());
    p.node_count = static_cast<int>(rule.nodes.size());
    const double half = 0.5 * (t1 - t0);
    const int id = static_cast<int>(d.panels.size());
    double length = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = t0 + (rule.nodes[i] + 1.0) * half;
        const Complex dp = curve.derivative(t);
        const double speed = std::abs(dp);
        if (!(speed > 1e-14))
            throw PreconditionError("discretize: degenerate curve derivative");
        d.t.push_back(t);
        d.pos.push_back(curve.position(t));
        d.normal.push_back(Complex(0, -1) * (dp / speed));
        d.weight.push_back(rule.weights[i] * speed * half);
        d.panel_id.push_back(id);
        length += rule.weights[i] * speed * half;
    }
    p.length = length;
    d.panels.push_back(p);
}

} // namespace detail

inline Discretization discretize(const Curve& curve, int num_panels, int nodes_per_panel) {
    require(num_panels >= 1, "discretize: need at least one panel");
    const QuadratureRule rule = gauss_legendre(nodes_per_panel);
    Discretization d;
    d.nodes_per_panel = nodes_per_panel;
    d.panels.reserve(num_panels);
    for (int k = 0; k < num_panels; ++k)
        detail::append_panel_nodes(d, curve, rule, double(k) / num_panels,
                                   double(k + 1) / num_panels);
    return d;
}

// Rebuild the same panel decomposition at a different node count.
inline Discretization resample(const Curve& curve, const Discretization& d, int nodes) {
    const QuadratureRule rule = gauss_legendre(nodes);
    Discretization out;
    out.nodes_per_panel = nodes;
    out.panels.reserve(d.panels.size());
    for (const Panel& p : d.panels)
        detail::append_panel_nodes(out, curve, rule, p.t0, p.t1);
    return out;
}

inline Discretization upsample(const Curve& curve, const Discretization& d, int p_quad) {
    require(p_quad >= d.nodes_per_panel, "upsample: downsampling rejected");
    if (p_quad == d.nodes_per_panel) return d;
    Discretization out = resample(curve, d, p_quad);
    out.upsampled = true;
    return out;
}

// Lagrange interpolation matrix from the n-point to the m-point
// Gauss-Legendre nodes on [-1,1], row-major m x n.
inline std::vector<double> interpolation_matrix(int n_from, int n_to) {
    const auto from = gauss_legendre(n_from).nodes;
    const auto to = gauss_legendre(n_to).nodes;
    // barycentric weights
    std::vector<double> bw(n_from, 1.0);
    for (int j = 0; j < n_from; ++j)
        for (int k = 0; k < n_from; ++k)
            if (k != j) bw[j] /= (from[j] - from[k]);
    std::vector<double> mat(std::size_t(n_to) * n_from, 0.0);
    for (int i = 0; i < n_to; ++i) {
        int exact = -1;
        for (int j = 0; j < n_from; ++j)
            if (to[i] == from[j]) exact = j;
        if (exact >= 0) {
            mat[std::size_t(i) * n_from + exact] = 1.0;
            continue;
        }
        double denom = 0.0;
        for (int j = 0; j < n_from; ++j) denom += bw[j] / (to[i] - from[j]);
        for (int j = 0; j < n_from; ++j)
            mat[std::size_t(i) * n_from + j] = (bw[j] / (to[i] - from[j])) / denom;
    }
    return mat;
}

// Interpolate panel-wise nodal values from one node count to another
// on the same panel decomposition.
inline std::vector<double> interpolate_panelwise(const Discretization& from,
                                                 const Discretization& to,
                                                 const std::vector<double>& values) {
    require(values.size() == from.num_nodes(), "interpolate: value count mismatch");
    require(from.num_panels() == to.num_panels(), "interpolate: panel mismatch");
    const int nf = from.nodes_per_panel, nt = to.nodes_per_panel;
    const std::vector<double> mat = interpolation_matrix(nf, nt);
    std::vector<double> out(to.num_nodes(), 0.0);
    for (std::size_t p = 0; p < from.num_panels(); ++p) {
        const int f0 = from.panels[p].first_node;
        const int t0 = to.panels[p].first_node;
        for (int i = 0; i < nt; ++i) {
            double acc = 0.0;
            for (int j = 0; j < nf; ++j)
                acc += mat[std::size_t(i) * nf + j] * values[f0 + j];
            out[t0 + i] = acc;
        }
    }
    return out;
}

// --- QBX centers ------------------------------------------------------------

enum class Side : int { interior = -1, exterior = +1 };

struct QBXCenter {
    Complex pos;
    double radius = 0.0;
    Side side = Side::exterior;
    int panel = -1;
    int node = -1;  // owning node in the placement discretization
    std::vector<int> target_indices;
};

// Two centers per node at distance h/2 along the normal; radius h/2.
// Centers live at the base (non-upsampled) nodes.
inline std::vector<QBXCenter> place_centers(const Discretization& d) {
    require(d.num_nodes() > 0, "place_centers: empty discretization");
    std::vector<QBXCenter> out;
    out.reserve(2 * d.num_nodes());
    for (std::size_t i = 0; i < d.num_nodes(); ++i) {
        const double r = 0.5 * d.panels[d.panel_id[i]].length;
        QBXCenter in;
        in.pos = d.pos[i] - r * d.normal[i];
        in.radius = r;
        in.side = Side::interior;
        in.panel = d.panel_id[i];
        in.node = static_cast<int>(i);
        out.push_back(in);
        QBXCenter ex = in;
        ex.pos = d.pos[i] + r * d.normal[i];
        ex.side = Side::exterior;
        out.push_back(ex);
    }
    return out;
}

// --- refinement -------------------------------------------------------------

namespace detail {

// Uniform hash grid over points, for disk and radius queries.
struct PointGrid {
    double cell = 1.0;
    std::unordered_map<long long, std::vector<int>> cells;

    static long long key(long long ix, long long iy) { return (ix << 32) ^ (iy & 0xffffffffLL); }

    void build(const std::vector<Complex>& pts, double cell_size) {
        cell = cell_size;
        cells.clear();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const long long ix = (long long)std::floor(pts[i].real() / cell);
            const long long iy = (long long)std::floor(pts[i].imag() / cell);
            cells[key(ix, iy)].push_back(static_cast<int>(i));
        }
    }

    template <class F>
    void for_each_in_box(Complex lo, Complex hi, F&& f) const {
        const long long x0 = (long long)std::floor(lo.real() / cell);
        const long long x1 = (long long)std::floor(hi.real() / cell);
        const long long y0 = (long long)std::floor(lo.imag() / cell);
        const long long y1 = (long long)std::floor(hi.imag() / cell);
        for (long long ix = x0; ix <= x1; ++ix)
            for (long long iy = y0; iy <= y1; ++iy) {
                auto it = cells.find(key(ix, iy));
                if (it == cells.end()) continue;
                for (int i : it->second) f(i);
            }
    }
};

inline double median_panel_length(const Discretization& d) {
    std::vector<double> h;
    h.reserve(d.num_panels());
    for (const auto& p : d.panels) h.push_back(p.length);
    std::nth_element(h.begin(), h.begin() + h.size() / 2, h.end());
    return h[h.size() / 2];
}

} // namespace detail

struct RefineOptions {
    int p_quad = 33;
    int max_iters = 50;
};

struct RefineResult {
    Discretization disc;  // refined, at the base node count
    std::vector<QBXCenter> centers;
    int iterations = 0;
    std::vector<int> violations_per_pass;
};

// Iterate two checks to a fixed point:
//  (i) no upsampled source node from a non-adjacent panel lies inside a
//      QBX disk; offenders bisect the disturbed center's owning panel;
// (ii) no panel is more than twice as long as a panel whose nodes lie
//      within the longer panel's own length; offenders bisect the
//      longer panel.
inline RefineResult refine(const Curve& curve, const Discretization& base,
                           const RefineOptions& opt = {}) {
    Discretization disc = base;
    RefineResult result;
    for (int pass = 0; pass < opt.max_iters; ++pass) {
        const Discretization up = upsample(curve, disc, opt.p_quad);
        const std::vector<QBXCenter> centers = place_centers(disc);

        std::vector<char> bisect(disc.num_panels(), 0);
        int violations = 0;

        detail::PointGrid up_grid;
        up_grid.build(up.pos, 2.0 * detail::median_panel_length(disc));

        // (i) disk intersection
        for (const QBXCenter& c : centers) {
            const Complex lo = c.pos - Complex(c.radius, c.radius);
            const Complex hi = c.pos + Complex(c.radius, c.radius);
            bool disturbed = false;
            up_grid.for_each_in_box(lo, hi, [&](int j) {
                if (disturbed) return;
                if (disc.panels_adjacent(up.panel_id[j], c.panel)) return;
                if (std::abs(up.pos[j] - c.pos) < c.radius) disturbed = true;
            });
            if (disturbed && !bisect[c.panel]) {
                bisect[c.panel] = 1;
                ++violations;
            }
        }

        // (ii) 2:1 local resolution
        detail::PointGrid base_grid;
        base_grid.build(disc.pos, 2.0 * detail::median_panel_length(disc));
        for (std::size_t a = 0; a < disc.num_panels(); ++a) {
            if (bisect[a]) continue;
            const double ha = disc.panels[a].length;
            bool offends = false;
            for (int i = 0; i < disc.panels[a].node_count && !offends; ++i) {
                const Complex pa = disc.pos[disc.panels[a].first_node + i];
                base_grid.for_each_in_box(pa - Complex(ha, ha), pa + Complex(ha, ha),
                                          [&](int j) {
                    if (offends) return;
                    const int b = disc.panel_id[j];
                    if (ha > 2.0 * disc.panels[b].length && std::abs(disc.pos[j] - pa) <= ha)
                        offends = true;
                });
            }
            if (offends) {
                bisect[a] = 1;
                ++violations;
            }
        }

        result.violations_per_pass.push_back(violations);
        if (violations == 0) {
            result.disc = std::move(disc);
            result.centers = centers;
            result.iterations = pass;
            return result;
        }

        // bisect flagged panels in parameter space
        const QuadratureRule rule = gauss_legendre(disc.nodes_per_panel);
        Discretization next;
        next.nodes_per_panel = disc.nodes_per_panel;
        for (std::size_t k = 0; k < disc.num_panels(); ++k) {
            const Panel& p = disc.panels[k];
            if (bisect[k]) {
                const double tm = 0.5 * (p.t0 + p.t1);
                detail::append_panel_nodes(next, curve, rule, p.t0, tm);
                detail::append_panel_nodes(next, curve, rule, tm, p.t1);
            } else {
                detail::append_panel_nodes(next, curve, rule, p.t0, p.t1);
            }
        }
        disc = std::move(next);
    }
    throw PreconditionError("refine: max_iters exhausted with " +
                            std::to_string(result.violations_per_pass.back()) +
                            " violations remaining in the last pass");
}

// --- target association -----------------------------------------------------

struct TargetPoint {
    Complex pos;
    Side side = Side::exterior;  // which one-sided limit is wanted
    int surface_node = -1;       // owning node index for on-surface targets
};

struct TargetAssociation {
    std::vector<int> center_of_target;  // -1 when unassociated
    std::vector<char> needs_close_eval;
};

// Targets needing close evaluation map to the nearest center of the
// matching side within slack * radius; on-surface targets take their own
// node's center directly. Far targets stay unassociated.
inline TargetAssociation associate_targets(const std::vector<TargetPoint>& targets,
                                           std::vector<QBXCenter>& centers,
                                           const Discretization& base, double slack = 1.0) {
    require(slack >= 1.0, "associate_targets: slack must be >= 1");
    TargetAssociation assoc;
    assoc.center_of_target.assign(targets.size(), -1);
    assoc.needs_close_eval.assign(targets.size(), 0);

    // node index -> (interior, exterior) center ids
    std::vector<int> node_center(base.num_nodes() * 2, -1);
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        const QBXCenter& c = centers[ci];
        if (c.node >= 0)
            node_center[2 * c.node + (c.side == Side::exterior ? 1 : 0)] =
                static_cast<int>(ci);
    }

    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        const TargetPoint& tp = targets[ti];

        if (tp.surface_node >= 0) {
            assoc.needs_close_eval[ti] = 1;
            const int ci =
                node_center[2 * tp.surface_node + (tp.side == Side::exterior ? 1 : 0)];
            assoc.center_of_target[ti] = ci;
            if (ci >= 0) centers[ci].target_indices.push_back(static_cast<int>(ti));
            continue;
        }

        // close evaluation is needed within about a panel length of the curve
        bool close = false;
        for (std::size_t j = 0; j < base.num_nodes() && !close; ++j)
            if (std::abs(tp.pos - base.pos[j]) < base.panels[base.panel_id[j]].length)
                close = true;
        assoc.needs_close_eval[ti] = close;
        if (!close) continue;

        int best = -1;
        double best_dist = 0.0;
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            if (centers[ci].side != tp.side) continue;
            const double dist = std::abs(tp.pos - centers[ci].pos);
            if (dist <= slack * centers[ci].radius &&
                (best < 0 || dist < best_dist)) {
                best = static_cast<int>(ci);
                best_dist = dist;
            }
        }
        assoc.center_of_target[ti] = best;
        if (best >= 0) centers[best].target_indices.push_back(static_cast<int>(ti));
    }
    return assoc;
}

// Winding number of the discretized curve about a point (approximately
// 1 inside, 0 outside).
inline double winding_number(const Discretization& d, Complex p) {
    double total = 0.0;
    for (std::size_t i = 0; i < d.num_nodes(); ++i) {
        const Complex a = d.pos[i] - p;
        const Complex b = d.pos[(i + 1) % d.num_nodes()] - p;
        total += std::arg(b / a);
    }
    return total / (2.0 * pi);
}

// --- file formats -----------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// One row per node: panel_id, t, x, y, nx, ny, weight
inline void write_geometry_csv(const Discretization& d, std::ostream& os) {
    os << "panel_id,t,x,y,nx,ny,weight\n";
    using detail::fmt17;
    for (std::size_t i = 0; i < d.num_nodes(); ++i)
        os << d.panel_id[i] << ',' << fmt17(d.t[i]) << ',' << fmt17(d.pos[i].real())
           << ',' << fmt17(d.pos[i].imag()) << ',' << fmt17(d.normal[i].real()) << ','
           << fmt17(d.normal[i].imag()) << ',' << fmt17(d.weight[i]) << '\n';
}

// One row per center: center_id, cx, cy, r, side, panel_id
inline void write_centers_csv(const std::vector<QBXCenter>& centers, std::ostream& os) {
    os << "center_id,cx,cy,r,side,panel_id\n";
    using detail::fmt17;
    for (std::size_t i = 0; i < centers.size(); ++i)
        os << i << ',' << fmt17(centers[i].pos.real()) << ','
           << fmt17(centers[i].pos.imag()) << ',' << fmt17(centers[i].radius) << ','
           << (centers[i].side == Side::exterior ? "exterior" : "interior") << ','
           << centers[i].panel << '\n';
}

} // namespace gigaqbx

#endif
