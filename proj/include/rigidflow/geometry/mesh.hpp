#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rigidflow/core/vec.hpp"

namespace rigidflow::geometry {

struct TriMesh {
    std::vector<Vec3d> vertices;
    std::vector<std::array<int, 3>> faces;

    Vec3d corner(std::size_t f, int k) const { return vertices[faces[f][k]]; }
    // unnormalized: |cross| = 2 * area
    Vec3d face_cross(std::size_t f) const {
        return (corner(f, 1) - corner(f, 0)).cross(corner(f, 2) - corner(f, 0));
    }
    double face_area(std::size_t f) const { return 0.5 * face_cross(f).norm(); }
    Vec3d face_normal(std::size_t f) const { return face_cross(f).normalized(); }
    Vec3d face_centroid(std::size_t f) const {
        return (corner(f, 0) + corner(f, 1) + corner(f, 2)) / 3.0;
    }
    double area() const {
        double a = 0;
        for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(f);
        return a;
    }
    double volume() const {
        double v = 0;
        for (std::size_t f = 0; f < faces.size(); ++f) v += det3(corner(f, 0), corner(f, 1), corner(f, 2));
        return v / 6.0;
    }
    void translate(const Vec3d& t) {
        for (auto& v : vertices) v += t;
    }
};

// Closed, consistently oriented, outward (positive volume), genus 0.
inline void validate(const TriMesh& m) {
    if (m.faces.empty()) throw std::invalid_argument("mesh: no faces");
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : m.faces) {
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (a < 0 || b < 0 || a >= (int)m.vertices.size() || b >= (int)m.vertices.size())
                throw std::invalid_argument("mesh: vertex index out of range");
            if (a == b) throw std::invalid_argument("mesh: degenerate face");
            if (++directed[{a, b}] > 1) throw std::invalid_argument("mesh: inconsistent orientation or non-manifold edge");
        }
    }
    for (const auto& [e, cnt] : directed) {
        if (!directed.count({e.second, e.first})) throw std::invalid_argument("mesh: not closed (boundary edge)");
    }
    for (std::size_t f = 0; f < m.faces.size(); ++f)
        if (m.face_area(f) <= 0.0) throw std::invalid_argument("mesh: zero-area face");
    long V = 0;
    {
        std::vector<char> used(m.vertices.size(), 0);
        for (const auto& f : m.faces)
            for (int k : f) used[k] = 1;
        for (char u : used) V += u;
    }
    long E = static_cast<long>(directed.size()) / 2;
    long F = static_cast<long>(m.faces.size());
    if (V - E + F != 2) throw std::invalid_argument("mesh: not simply connected (Euler characteristic != 2)");
    double vol = m.volume();
    if (!(vol > 0.0)) throw std::invalid_argument("mesh: zero or negative volume (degenerate or inward oriented)");
}

// ASCII triangle soup:
//   vertices N
//   x y z        (N lines)
//   triangles M
//   i j k        (M lines, 0-based, counter-clockwise seen from outside)
// '#' starts a comment.
inline TriMesh read_mesh(std::istream& in) {
    TriMesh m;
    std::string line, key;
    auto next = [&](std::istringstream& ss) {
        while (std::getline(in, line)) {
            auto h = line.find('#');
            if (h != std::string::npos) line.resize(h);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ss = std::istringstream(line);
            return true;
        }
        return false;
    };
    std::istringstream ss;
    if (!next(ss) || !(ss >> key) || key != "vertices") throw std::invalid_argument("mesh: expected 'vertices N'");
    long n = -1;
    ss >> n;
    if (n <= 0) throw std::invalid_argument("mesh: bad vertex count");
    m.vertices.resize(n);
    for (long i = 0; i < n; ++i) {
        if (!next(ss)) throw std::invalid_argument("mesh: truncated vertex list");
        auto& v = m.vertices[i];
        if (!(ss >> v[0] >> v[1] >> v[2])) throw std::invalid_argument("mesh: bad vertex line " + std::to_string(i));
    }
    if (!next(ss) || !(ss >> key) || key != "triangles") throw std::invalid_argument("mesh: expected 'triangles M'");
    ss >> n;
    if (n <= 0) throw std::invalid_argument("mesh: bad triangle count");
    m.faces.resize(n);
    for (long i = 0; i < n; ++i) {
        if (!next(ss)) throw std::invalid_argument("mesh: truncated triangle list");
        auto& f = m.faces[i];
        if (!(ss >> f[0] >> f[1] >> f[2])) throw std::invalid_argument("mesh: bad triangle line " + std::to_string(i));
    }
    return m;
}

inline TriMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("mesh: cannot open " + path);
    return read_mesh(in);
}

inline void write_mesh(std::ostream& out, const TriMesh& m) {
    out.precision(17);
    out << "vertices " << m.vertices.size() << "\n";
    for (const auto& v : m.vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
    out << "triangles " << m.faces.size() << "\n";
    for (const auto& f : m.faces) out << f[0] << " " << f[1] << " " << f[2] << "\n";
}

// Subdivided icosahedron projected to radius a. level 5 gives 20480 faces,
// level 4 gives 5120. With volume_matched the vertices are pushed out
// radially so the polyhedron encloses exactly (4/3) pi a^3.
inline TriMesh icosphere(int level, double a = 1.0, bool volume_matched = false) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.vertices) v.normalize();
    m.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
               {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int lv = 0; lv < level; ++lv) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            int id = static_cast<int>(m.vertices.size());
            m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
            mid[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> nf;
        nf.reserve(m.faces.size() * 4);
        for (const auto& f : m.faces) {
            int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            nf.push_back({f[0], ab, ca});
            nf.push_back({f[1], bc, ab});
            nf.push_back({f[2], ca, bc});
            nf.push_back({ab, bc, ca});
        }
        m.faces = std::move(nf);
    }
    double s = a;
    if (volume_matched) s *= std::cbrt((4.0 / 3.0) * 3.14159265358979323846 / m.volume());
    for (auto& v : m.vertices) v *= s;
    return m;
}

}  // namespace rigidflow::geometry
