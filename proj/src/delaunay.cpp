#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <set>

#include "hodge/geometry.hpp"

namespace hodge {

double orient_2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double in_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                 const Eigen::Vector2d& d)
{
    const Eigen::Vector2d ad = a - d, bd = b - d, cd = c - d;
    return ad.squaredNorm() * (bd.x() * cd.y() - cd.x() * bd.y()) +
           bd.squaredNorm() * (cd.x() * ad.y() - ad.x() * cd.y()) +
           cd.squaredNorm() * (ad.x() * bd.y() - bd.x() * ad.y());
}

namespace {

constexpr int kGhost = -1;

// Signs with a relative tie band: 0 when the determinant is within kPredicateBand of its
// magnitude bound.
int orient_sign(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c)
{
    const double l = (b.x() - a.x()) * (c.y() - a.y());
    const double r = (b.y() - a.y()) * (c.x() - a.x());
    const double det = l - r;
    const double bound = std::abs(l) + std::abs(r);
    if (std::abs(det) <= kPredicateBand * bound) return 0;
    return det > 0 ? 1 : -1;
}

int in_circle_sign(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d)
{
    const Eigen::Vector2d ad = a - d, bd = b - d, cd = c - d;
    const double det = in_circle(a, b, c, d);
    const double bound = ad.squaredNorm() * (std::abs(bd.x() * cd.y()) + std::abs(cd.x() * bd.y())) +
                         bd.squaredNorm() * (std::abs(cd.x() * ad.y()) + std::abs(ad.x() * cd.y())) +
                         cd.squaredNorm() * (std::abs(ad.x() * bd.y()) + std::abs(bd.x() * ad.y()));
    if (std::abs(det) <= kPredicateBand * bound) return 0;
    return det > 0 ? 1 : -1;
}

struct Tri {
    std::array<int, 3> v;    // counter-clockwise; a ghost triangle keeps kGhost in v[2]
    std::array<int, 3> nbr;  // nbr[i] lies across the edge opposite v[i]
    bool alive = true;

    bool ghost() const { return v[2] == kGhost; }
};

class Mesh {
public:
    explicit Mesh(const MatrixXd& pts) : pts_(pts) {}

    Eigen::Vector2d p(int i) const { return pts_.row(i).transpose(); }

    void init(int a, int b, int c)
    {
        if (orient_2d(p(a), p(b), p(c)) < 0) std::swap(b, c);
        // 0 = real, 1..3 = ghosts across the edges opposite a, b, c.
        tris_.push_back({{a, b, c}, {1, 2, 3}});
        tris_.push_back({{c, b, kGhost}, {-1, -1, 0}});
        tris_.push_back({{a, c, kGhost}, {-1, -1, 0}});
        tris_.push_back({{b, a, kGhost}, {-1, -1, 0}});
        // Ghost neighbours: ghost (x, y, g) has neighbours opposite x -> ghost sharing edge (y, g).
        link_ghosts();
        last_ = 0;
    }

    void insert(int id)
    {
        const Eigen::Vector2d q = p(id);
        int start = locate(q);
        std::vector<int> cavity{start};
        std::vector<char> in_cavity(tris_.size(), 0);
        in_cavity[static_cast<std::size_t>(start)] = 1;

        for (;;) {
            for (std::size_t head = 0; head < cavity.size(); ++head) {
                const Tri& t = tris_[static_cast<std::size_t>(cavity[head])];
                for (int n : t.nbr) {
                    if (in_cavity[static_cast<std::size_t>(n)]) continue;
                    if (conflicts(n, q)) {
                        in_cavity[static_cast<std::size_t>(n)] = 1;
                        cavity.push_back(n);
                    }
                }
            }
            // Every boundary edge must see q strictly on its left; otherwise absorb the neighbour.
            bool grown = false;
            for (std::size_t ci = 0; ci < cavity.size() && !grown; ++ci) {
                const Tri& t = tris_[static_cast<std::size_t>(cavity[ci])];
                for (int i = 0; i < 3; ++i) {
                    int n = t.nbr[static_cast<std::size_t>(i)];
                    if (in_cavity[static_cast<std::size_t>(n)]) continue;
                    int u = t.v[static_cast<std::size_t>((i + 1) % 3)];
                    int w = t.v[static_cast<std::size_t>((i + 2) % 3)];
                    if (u == kGhost || w == kGhost) continue;
                    if (orient_sign(p(u), p(w), q) <= 0) {
                        in_cavity[static_cast<std::size_t>(n)] = 1;
                        cavity.push_back(n);
                        grown = true;
                        break;
                    }
                }
            }
            if (!grown) break;
        }

        // Boundary edges in cavity order, each producing one new triangle (u, w, q).
        struct Boundary {
            int u, w, outside;
        };
        std::vector<Boundary> boundary;
        for (int c : cavity) {
            const Tri& t = tris_[static_cast<std::size_t>(c)];
            for (int i = 0; i < 3; ++i) {
                int n = t.nbr[static_cast<std::size_t>(i)];
                if (in_cavity[static_cast<std::size_t>(n)]) continue;
                boundary.push_back({t.v[static_cast<std::size_t>((i + 1) % 3)],
                                    t.v[static_cast<std::size_t>((i + 2) % 3)], n});
            }
        }
        for (int c : cavity) tris_[static_cast<std::size_t>(c)].alive = false;

        std::vector<int> created;
        created.reserve(boundary.size());
        for (const auto& b : boundary) {
            Tri t;
            if (b.u == kGhost) {
                t.v = {b.w, id, kGhost};
                t.nbr = {-1, b.outside, -1};
            } else if (b.w == kGhost) {
                t.v = {id, b.u, kGhost};
                t.nbr = {b.outside, -1, -1};
            } else {
                t.v = {b.u, b.w, id};
                t.nbr = {-1, -1, b.outside};
            }
            int idx = static_cast<int>(tris_.size());
            tris_.push_back(t);
            created.push_back(idx);
            replace_neighbor(b.outside, b.u, b.w, idx);
        }
        // Stitch the fan: new triangles share edges through the new vertex.
        for (int a : created) {
            for (int b : created) {
                if (a == b) continue;
                link_if_adjacent(a, b);
            }
        }
        for (int c : created) {
            if (!tris_[static_cast<std::size_t>(c)].ghost()) last_ = c;
        }
    }

    // Lawson flips: remove any residual in-circle violation and resolve cocircular quads to
    // the lexicographically smaller diagonal.
    void settle()
    {
        const std::size_t max_passes = 1000;
        for (std::size_t pass = 0; pass < max_passes; ++pass) {
            bool flipped = false;
            for (std::size_t ti = 0; ti < tris_.size(); ++ti) {
                if (!tris_[ti].alive || tris_[ti].ghost()) continue;
                for (int i = 0; i < 3; ++i) {
                    if (try_flip(static_cast<int>(ti), i)) {
                        flipped = true;
                        break;
                    }
                }
            }
            if (!flipped) return;
        }
        throw DegeneracyError("delaunay: edge flipping did not terminate");
    }

    Triangulation result(Index n) const
    {
        Triangulation out;
        out.num_vertices = n;
        std::set<Simplex> edges;
        std::set<Simplex> triangles;
        for (const auto& t : tris_) {
            if (!t.alive || t.ghost()) continue;
            Simplex s{t.v[0], t.v[1], t.v[2]};
            std::sort(s.begin(), s.end());
            triangles.insert(s);
            edges.insert({s[0], s[1]});
            edges.insert({s[0], s[2]});
            edges.insert({s[1], s[2]});
        }
        out.edges.assign(edges.begin(), edges.end());
        out.triangles.assign(triangles.begin(), triangles.end());
        return out;
    }

private:
    void link_ghosts()
    {
        for (std::size_t i = 1; i < tris_.size(); ++i) {
            for (std::size_t j = 1; j < tris_.size(); ++j) {
                if (i != j) link_if_adjacent(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }

    // If triangles a and b share an edge, record b as a's neighbour across it.
    void link_if_adjacent(int a, int b)
    {
        Tri& ta = tris_[static_cast<std::size_t>(a)];
        const Tri& tb = tris_[static_cast<std::size_t>(b)];
        for (int i = 0; i < 3; ++i) {
            int u = ta.v[static_cast<std::size_t>((i + 1) % 3)];
            int w = ta.v[static_cast<std::size_t>((i + 2) % 3)];
            for (int j = 0; j < 3; ++j) {
                if (tb.v[static_cast<std::size_t>((j + 1) % 3)] == w && tb.v[static_cast<std::size_t>((j + 2) % 3)] == u) {
                    ta.nbr[static_cast<std::size_t>(i)] = b;
                }
            }
        }
    }

    // In triangle `t`, the neighbour across edge {u, w} becomes `to`.
    void replace_neighbor(int t, int u, int w, int to)
    {
        Tri& tri = tris_[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
            int a = tri.v[static_cast<std::size_t>((i + 1) % 3)];
            int b = tri.v[static_cast<std::size_t>((i + 2) % 3)];
            if ((a == u && b == w) || (a == w && b == u)) {
                tri.nbr[static_cast<std::size_t>(i)] = to;
                return;
            }
        }
        throw DegeneracyError("delaunay: inconsistent adjacency");
    }

    bool conflicts(int ti, const Eigen::Vector2d& q) const
    {
        const Tri& t = tris_[static_cast<std::size_t>(ti)];
        if (!t.ghost()) return in_circle_sign(p(t.v[0]), p(t.v[1]), p(t.v[2]), q) > 0;
        const Eigen::Vector2d a = p(t.v[0]), b = p(t.v[1]);
        int o = orient_sign(a, b, q);
        if (o != 0) return o > 0;
        const double s = (q - a).dot(b - a) / (b - a).squaredNorm();
        return s > 0.0 && s < 1.0;
    }

    int locate(const Eigen::Vector2d& q)
    {
        int cur = last_;
        const std::size_t limit = 4 * tris_.size() + 16;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& t = tris_[static_cast<std::size_t>(cur)];
            if (t.ghost()) return cur;
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                int u = t.v[static_cast<std::size_t>((i + 1) % 3)];
                int w = t.v[static_cast<std::size_t>((i + 2) % 3)];
                if (orient_sign(p(u), p(w), q) < 0) {
                    next = t.nbr[static_cast<std::size_t>(i)];
                    break;
                }
            }
            if (next < 0) return cur;
            cur = next;
        }
        // Walk cycled on a degenerate configuration; fall back to a scan.
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (tris_[i].alive && conflicts(static_cast<int>(i), q)) return static_cast<int>(i);
        }
        throw DegeneracyError("delaunay: point location failed");
    }

    bool try_flip(int ti, int i)
    {
        Tri t = tris_[static_cast<std::size_t>(ti)];
        int ui = t.nbr[static_cast<std::size_t>(i)];
        Tri u = tris_[static_cast<std::size_t>(ui)];
        if (u.ghost()) return false;
        const int a = t.v[static_cast<std::size_t>(i)];
        const int b = t.v[static_cast<std::size_t>((i + 1) % 3)];
        const int c = t.v[static_cast<std::size_t>((i + 2) % 3)];
        int j = 0;
        while (u.v[static_cast<std::size_t>(j)] == b || u.v[static_cast<std::size_t>(j)] == c) ++j;
        const int d = u.v[static_cast<std::size_t>(j)];

        int s = in_circle_sign(p(a), p(b), p(c), p(d));
        if (s < 0) return false;
        if (s == 0) {
            Simplex current{std::min(b, c), std::max(b, c)};
            Simplex other{std::min(a, d), std::max(a, d)};
            if (!(other < current)) return false;
        }
        // Diagonal a-d must split the quad into two proper triangles.
        if (orient_sign(p(a), p(b), p(d)) <= 0 || orient_sign(p(a), p(d), p(c)) <= 0) return false;

        const int n_ab = t.nbr[static_cast<std::size_t>((i + 2) % 3)];
        const int n_ca = t.nbr[static_cast<std::size_t>((i + 1) % 3)];
        // In u = rotation of (d, c, b): across (b, d) sits the neighbour opposite c, across (d, c) the one opposite b.
        int n_bd = -1, n_dc = -1;
        for (int k = 0; k < 3; ++k) {
            if (u.v[static_cast<std::size_t>(k)] == c) n_bd = u.nbr[static_cast<std::size_t>(k)];
            if (u.v[static_cast<std::size_t>(k)] == b) n_dc = u.nbr[static_cast<std::size_t>(k)];
        }
        Tri& t2 = tris_[static_cast<std::size_t>(ti)];
        Tri& u2 = tris_[static_cast<std::size_t>(ui)];
        t2.v = {a, b, d};
        t2.nbr = {n_bd, ui, n_ab};
        u2.v = {a, d, c};
        u2.nbr = {n_dc, n_ca, ti};
        replace_neighbor(n_bd, b, d, ti);
        replace_neighbor(n_ca, c, a, ui);
        return true;
    }

    const MatrixXd& pts_;
    std::vector<Tri> tris_;
    int last_ = 0;
};

}  // namespace

Triangulation delaunay_2d(const PointCloud& cloud)
{
    if (cloud.dim() != 2) throw InputError("delaunay_2d: expected a 2D point cloud");
    const Index n = cloud.size();
    if (n < 3) throw DegeneracyError("delaunay_2d: at least 3 points are required");
    check_distinct(cloud);

    Mesh mesh(cloud.points);
    int third = -1;
    for (Index i = 2; i < n; ++i) {
        if (orient_sign(mesh.p(0), mesh.p(1), mesh.p(static_cast<int>(i))) != 0) {
            third = static_cast<int>(i);
            break;
        }
    }
    if (third < 0) throw DegeneracyError("delaunay_2d: all points are collinear");

    mesh.init(0, 1, third);
    for (Index i = 2; i < n; ++i) {
        if (i != third) mesh.insert(static_cast<int>(i));
    }
    mesh.settle();
    return mesh.result(n);
}

}  // namespace hodge
