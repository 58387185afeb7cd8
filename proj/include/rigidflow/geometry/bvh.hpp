#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rigidflow/geometry/mesh.hpp"

namespace rigidflow::geometry {

// Closest point on triangle (a,b,c) to p, region tests after Ericson.
inline Vec3d closest_on_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    Vec3d ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    Vec3d bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
    Vec3d cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    double den = 1.0 / (va + vb + vc);
    return a + ab * (vb * den) + ac * (vc * den);
}

class Bvh {
public:
    explicit Bvh(const TriMesh& mesh) : mesh_(&mesh) {
        std::vector<int> ids(mesh.faces.size());
        std::iota(ids.begin(), ids.end(), 0);
        build(ids, 0, static_cast<int>(ids.size()));
        order_ = std::move(ids);
    }

    struct Hit {
        double dist = std::numeric_limits<double>::infinity();
        Vec3d point = Vec3d::Zero();
        int face = -1;
    };

    Hit closest(const Vec3d& p) const {
        Hit h;
        closest_rec(0, p, h);
        return h;
    }

    // all ray parameters t > 0 where origin + t*dir crosses the surface
    std::vector<double> ray_hits(const Vec3d& origin, const Vec3d& dir) const {
        std::vector<double> ts;
        ray_rec(0, origin, dir, ts);
        std::sort(ts.begin(), ts.end());
        return ts;
    }

private:
    struct Node {
        Vec3d lo, hi;
        int left = -1, right = -1, begin = 0, end = 0;
    };
    const TriMesh* mesh_;
    std::vector<Node> nodes_;
    std::vector<int> order_;

    int build(std::vector<int>& ids, int b, int e) {
        Node n;
        n.lo = Vec3d::Constant(std::numeric_limits<double>::infinity());
        n.hi = -n.lo;
        for (int i = b; i < e; ++i)
            for (int k = 0; k < 3; ++k) {
                n.lo = n.lo.cwiseMin(mesh_->corner(ids[i], k));
                n.hi = n.hi.cwiseMax(mesh_->corner(ids[i], k));
            }
        n.begin = b;
        n.end = e;
        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(n);
        if (e - b > 4) {
            int axis;
            (n.hi - n.lo).maxCoeff(&axis);
            int mid = (b + e) / 2;
            std::nth_element(ids.begin() + b, ids.begin() + mid, ids.begin() + e, [&](int x, int y) {
                return mesh_->face_centroid(x)[axis] < mesh_->face_centroid(y)[axis];
            });
            int l = build(ids, b, mid);
            int r = build(ids, mid, e);
            nodes_[idx].left = l;
            nodes_[idx].right = r;
        }
        return idx;
    }

    static double box_dist2(const Node& n, const Vec3d& p) {
        Vec3d d = (n.lo - p).cwiseMax(p - n.hi).cwiseMax(0.0);
        return d.squaredNorm();
    }

    void closest_rec(int ni, const Vec3d& p, Hit& h) const {
        const Node& n = nodes_[ni];
        if (box_dist2(n, p) >= h.dist * h.dist) return;
        if (n.left < 0) {
            for (int i = n.begin; i < n.end; ++i) {
                int f = order_.empty() ? i : order_[i];
                Vec3d q = closest_on_triangle(p, mesh_->corner(f, 0), mesh_->corner(f, 1), mesh_->corner(f, 2));
                double d = (q - p).norm();
                if (d < h.dist) h = {d, q, f};
            }
            return;
        }
        double dl = box_dist2(nodes_[n.left], p), dr = box_dist2(nodes_[n.right], p);
        if (dl < dr) {
            closest_rec(n.left, p, h);
            closest_rec(n.right, p, h);
        } else {
            closest_rec(n.right, p, h);
            closest_rec(n.left, p, h);
        }
    }

    static bool ray_box(const Node& n, const Vec3d& o, const Vec3d& d) {
        double t0 = 0, t1 = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            if (std::abs(d[k]) < 1e-300) {
                if (o[k] < n.lo[k] || o[k] > n.hi[k]) return false;
                continue;
            }
            double a = (n.lo[k] - o[k]) / d[k], b = (n.hi[k] - o[k]) / d[k];
            if (a > b) std::swap(a, b);
            t0 = std::max(t0, a);
            t1 = std::min(t1, b);
            if (t0 > t1) return false;
        }
        return true;
    }

    void ray_rec(int ni, const Vec3d& o, const Vec3d& d, std::vector<double>& ts) const {
        const Node& n = nodes_[ni];
        if (!ray_box(n, o, d)) return;
        if (n.left < 0) {
            for (int i = n.begin; i < n.end; ++i) {
                int f = order_.empty() ? i : order_[i];
                // Moller-Trumbore
                Vec3d a = mesh_->corner(f, 0), e1 = mesh_->corner(f, 1) - a, e2 = mesh_->corner(f, 2) - a;
                Vec3d pv = d.cross(e2);
                double det = e1.dot(pv);
                if (std::abs(det) < 1e-300) continue;
                double inv = 1.0 / det;
                Vec3d tv = o - a;
                double u = tv.dot(pv) * inv;
                if (u < -1e-12 || u > 1 + 1e-12) continue;
                Vec3d qv = tv.cross(e1);
                double v = d.dot(qv) * inv;
                if (v < -1e-12 || u + v > 1 + 1e-12) continue;
                double t = e2.dot(qv) * inv;
                if (t > 0) ts.push_back(t);
            }
            return;
        }
        ray_rec(n.left, o, d, ts);
        ray_rec(n.right, o, d, ts);
    }
};

}  // namespace rigidflow::geometry
