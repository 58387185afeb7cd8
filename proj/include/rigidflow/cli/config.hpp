#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidflow/core/vec.hpp"

namespace rigidflow::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, const std::string& what)
        : std::runtime_error("config: " + where + ": " + what) {}
};

// Flat INI: [section] headers, key = value, '#' or ';' comments.
class Ini {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static Ini parse(std::istream& in, const std::string& source = "<config>") {
        Ini ini;
        ini.source_ = source;
        std::string line, section;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            std::string s = trim(strip_comment(line));
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') throw ConfigError(source + ":" + std::to_string(ln), "unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty()) throw ConfigError(source + ":" + std::to_string(ln), "empty section name");
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(ln), "expected key = value");
            std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
            if (key.empty()) throw ConfigError(source + ":" + std::to_string(ln), "empty key");
            if (section.empty()) throw ConfigError(source + ":" + std::to_string(ln), "key '" + key + "' outside a section");
            std::string full = section + "." + key;
            if (ini.values_.count(full))
                throw ConfigError(source + ":" + std::to_string(ln), "duplicate key '" + full + "'");
            ini.values_[full] = {val, ln};
        }
        return ini;
    }
    static Ini parse_string(const std::string& text, const std::string& source = "<string>") {
        std::istringstream in(text);
        return parse(in, source);
    }
    static Ini load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path, "cannot open");
        return parse(in, path);
    }

    // "section.key=value"
    void set(const std::string& assignment) {
        auto eq = assignment.find('=');
        auto dot = assignment.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ConfigError("override '" + assignment + "'", "expected section.key=value");
        values_[trim(assignment.substr(0, eq))] = {trim(assignment.substr(eq + 1)), 0};
    }

    bool has(const std::string& k) const { return values_.count(k) > 0; }
    const std::map<std::string, Entry>& values() const { return values_; }

    std::string where(const std::string& k) const {
        auto it = values_.find(k);
        if (it == values_.end() || it->second.line == 0) return "field '" + k + "'";
        return source_ + ":" + std::to_string(it->second.line) + " field '" + k + "'";
    }

    std::string get(const std::string& k, const std::string& def) const {
        auto it = values_.find(k);
        return it == values_.end() ? def : it->second.value;
    }
    double get(const std::string& k, double def) const {
        if (!has(k)) return def;
        return to_double(values_.at(k).value, k);
    }
    int get(const std::string& k, int def) const {
        if (!has(k)) return def;
        double d = to_double(values_.at(k).value, k);
        if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError(where(k), "expected an integer");
        return static_cast<int>(d);
    }
    std::uint64_t get_u64(const std::string& k, std::uint64_t def) const {
        if (!has(k)) return def;
        const std::string& v = values_.at(k).value;
        std::size_t pos = 0;
        unsigned long long x = 0;
        try {
            x = std::stoull(v, &pos);
        } catch (...) {
            throw ConfigError(where(k), "expected an unsigned integer, got '" + v + "'");
        }
        if (pos != v.size()) throw ConfigError(where(k), "expected an unsigned integer, got '" + v + "'");
        return x;
    }
    bool get(const std::string& k, bool def) const {
        if (!has(k)) return def;
        std::string v = values_.at(k).value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(where(k), "expected true/false, got '" + v + "'");
    }
    std::vector<double> get_list(const std::string& k, std::vector<double> def) const {
        if (!has(k)) return def;
        std::vector<double> out;
        std::stringstream ss(values_.at(k).value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), k));
        return out;
    }
    Vec3d get_vec3(const std::string& k, const Vec3d& def) const {
        if (!has(k)) return def;
        auto v = get_list(k, {});
        if (v.size() != 3) throw ConfigError(where(k), "expected three comma-separated numbers");
        return {v[0], v[1], v[2]};
    }

    // keys present but never read, to catch typos
    std::vector<std::string> unknown(const std::vector<std::string>& known) const {
        std::vector<std::string> u;
        for (const auto& [k, e] : values_) {
            bool found = false;
            for (const auto& q : known) found = found || q == k;
            if (!found) u.push_back(k);
        }
        return u;
    }

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

private:
    static std::string strip_comment(const std::string& s) {
        auto p = s.find_first_of("#;");
        return p == std::string::npos ? s : s.substr(0, p);
    }
    double to_double(const std::string& v, const std::string& k) const {
        std::size_t pos = 0;
        double d = 0;
        try {
            d = std::stod(v, &pos);
        } catch (...) {
            throw ConfigError(where(k), "expected a number, got '" + v + "'");
        }
        if (pos != v.size()) throw ConfigError(where(k), "expected a number, got '" + v + "'");
        return d;
    }

    std::map<std::string, Entry> values_;
    std::string source_;
};

inline std::string fmt17(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

// alpha as a constant or "nu_pow:p" (alpha = nu^p)
struct AlphaRule {
    bool power = false;
    double value = 1.0;  // the constant, or the exponent p

    static AlphaRule parse(const std::string& s, const std::string& where = "alpha") {
        AlphaRule r;
        const std::string tag = "nu_pow:";
        std::string body = s;
        if (s.rfind(tag, 0) == 0) {
            r.power = true;
            body = s.substr(tag.size());
        }
        std::size_t pos = 0;
        try {
            r.value = std::stod(body, &pos);
        } catch (...) {
            throw ConfigError(where, "bad alpha rule '" + s + "' (number or nu_pow:p)");
        }
        if (pos != body.size() || !std::isfinite(r.value))
            throw ConfigError(where, "bad alpha rule '" + s + "' (number or nu_pow:p)");
        if (!r.power && r.value < 0) throw ConfigError(where, "alpha must be >= 0");
        return r;
    }
    double at(double nu) const { return power ? std::pow(nu, value) : value; }
    std::string str() const { return power ? "nu_pow:" + fmt17(value) : fmt17(value); }
    bool operator==(const AlphaRule&) const = default;
};

enum class SolverKind { Viscous, Euler, FixedBody };
enum class StudyKind { Inviscid, InertiaViscous, InertiaEuler };

struct RunConfig {
    // [body]
    std::string shape = "sphere";  // sphere | icosphere | mesh
    double radius = 1.0;
    double density = 1.0;
    int icosphere_level = 4;
    bool volume_matched = true;  // icosphere scaled to the sphere's volume
    std::string mesh_file;
    double inertia_scale = 1.0;
    // [initial]
    Vec3d ell0 = Vec3d::Zero(), rot0 = Vec3d::Zero();
    std::string profile = "random";  // none | random | ring
    double amplitude = 0.3;
    Vec3d ring_centre{0, 0, 2.5}, ring_axis{0, 0, -1};
    double ring_radius = 0.6, ring_core = 0.3, ring_circulation = 1.0, ring_spacing = 0.1, ring_eps_factor = 1.5;
    // [solver]
    SolverKind solver = SolverKind::Viscous;
    double nu = 1e-2;
    AlphaRule alpha;
    double T = 1.0, dt = 1e-2;
    int N = 30;
    int surface_order = 12, radial_order = 12;
    double truncation = 3.0, cutoff_width = 0.25, chi_R = 50.0;
    int image_degree = 20;
    double slack_tolerance = 1e-8;
    int max_halvings = 20;
    // [study]
    StudyKind study = StudyKind::Inviscid;
    std::vector<double> nu_grid{4e-2, 2e-2, 1e-2, 5e-3};
    std::vector<double> alpha_grid{0.5, 1.0, 2.0};
    double friction_power = -0.5;
    std::vector<double> sigma_grid{1, 10, 100, 1000};
    bool plot = true;
    // [output]
    std::string output_dir = "rigidflow-out";
    std::uint64_t seed = 7;

    bool operator==(const RunConfig&) const = default;
};

inline const char* to_string(SolverKind k) {
    switch (k) {
        case SolverKind::Viscous: return "viscous";
        case SolverKind::Euler: return "euler";
        case SolverKind::FixedBody: return "fixed-body";
    }
    return "?";
}
inline const char* to_string(StudyKind k) {
    switch (k) {
        case StudyKind::Inviscid: return "inviscid";
        case StudyKind::InertiaViscous: return "inertia-viscous";
        case StudyKind::InertiaEuler: return "inertia-euler";
    }
    return "?";
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> k{
        "body.shape", "body.radius", "body.density", "body.icosphere_level", "body.volume_matched", "body.mesh_file", "body.inertia_scale",
        "initial.ell", "initial.rot", "initial.profile", "initial.amplitude", "initial.ring_centre", "initial.ring_axis",
        "initial.ring_radius", "initial.ring_core", "initial.ring_circulation", "initial.ring_spacing",
        "initial.ring_eps_factor", "solver.kind", "solver.nu", "solver.alpha", "solver.T", "solver.dt", "solver.N",
        "solver.surface_order", "solver.radial_order", "solver.truncation", "solver.cutoff_width", "solver.chi_R",
        "solver.image_degree", "solver.slack_tolerance", "solver.max_halvings", "study.kind", "study.nu_grid",
        "study.alpha_grid", "study.friction_power", "study.sigma_grid", "study.plot", "output.dir", "output.seed"};
    return k;
}

inline void validate(const RunConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string("field '") + name + "'", "must be > 0");
    };
    if (c.shape != "sphere" && c.shape != "icosphere" && c.shape != "mesh")
        throw ConfigError("field 'body.shape'", "expected sphere, icosphere or mesh");
    if (c.shape == "mesh" && c.mesh_file.empty()) throw ConfigError("field 'body.mesh_file'", "required for shape = mesh");
    positive(c.radius, "body.radius");
    positive(c.density, "body.density");
    positive(c.inertia_scale, "body.inertia_scale");
    if (c.icosphere_level < 0 || c.icosphere_level > 7) throw ConfigError("field 'body.icosphere_level'", "must be in 0..7");
    if (c.profile != "none" && c.profile != "random" && c.profile != "ring")
        throw ConfigError("field 'initial.profile'", "expected none, random or ring");
    if (!(c.amplitude >= 0)) throw ConfigError("field 'initial.amplitude'", "must be >= 0");
    positive(c.ring_radius, "initial.ring_radius");
    positive(c.ring_core, "initial.ring_core");
    positive(c.ring_spacing, "initial.ring_spacing");
    positive(c.ring_eps_factor, "initial.ring_eps_factor");
    if (!(c.ring_axis.norm() > 0)) throw ConfigError("field 'initial.ring_axis'", "must be nonzero");
    positive(c.nu, "solver.nu");
    if (!(c.alpha.at(c.nu) >= 0) || !std::isfinite(c.alpha.at(c.nu))) throw ConfigError("field 'solver.alpha'", "rule gives an invalid value");
    if (!(c.T >= 0)) throw ConfigError("field 'solver.T'", "must be >= 0");
    positive(c.dt, "solver.dt");
    if (c.N < 6) throw ConfigError("field 'solver.N'", "must be >= 6");
    if (c.surface_order < 2 || c.radial_order < 2) throw ConfigError("field 'solver.surface_order'", "orders must be >= 2");
    positive(c.truncation, "solver.truncation");
    positive(c.cutoff_width, "solver.cutoff_width");
    positive(c.chi_R, "solver.chi_R");
    if (c.image_degree < 0) throw ConfigError("field 'solver.image_degree'", "must be >= 0");
    positive(c.slack_tolerance, "solver.slack_tolerance");
    if (c.max_halvings < 0) throw ConfigError("field 'solver.max_halvings'", "must be >= 0");
    auto grid = [&](const std::vector<double>& g, const char* name) {
        if (g.empty()) throw ConfigError(std::string("field '") + name + "'", "grid must be nonempty");
        for (double v : g) positive(v, name);
    };
    grid(c.nu_grid, "study.nu_grid");
    grid(c.alpha_grid, "study.alpha_grid");
    grid(c.sigma_grid, "study.sigma_grid");
    if (c.output_dir.empty()) throw ConfigError("field 'output.dir'", "must be nonempty");
}

inline RunConfig from_ini(const Ini& ini) {
    auto unknown = ini.unknown(known_keys());
    if (!unknown.empty()) throw ConfigError(ini.where(unknown.front()), "unknown key");
    RunConfig c;
    c.shape = ini.get("body.shape", c.shape);
    c.radius = ini.get("body.radius", c.radius);
    c.density = ini.get("body.density", c.density);
    c.icosphere_level = ini.get("body.icosphere_level", c.icosphere_level);
    c.volume_matched = ini.get("body.volume_matched", c.volume_matched);
    c.mesh_file = ini.get("body.mesh_file", c.mesh_file);
    c.inertia_scale = ini.get("body.inertia_scale", c.inertia_scale);
    c.ell0 = ini.get_vec3("initial.ell", c.ell0);
    c.rot0 = ini.get_vec3("initial.rot", c.rot0);
    c.profile = ini.get("initial.profile", c.profile);
    c.amplitude = ini.get("initial.amplitude", c.amplitude);
    c.ring_centre = ini.get_vec3("initial.ring_centre", c.ring_centre);
    c.ring_axis = ini.get_vec3("initial.ring_axis", c.ring_axis);
    c.ring_radius = ini.get("initial.ring_radius", c.ring_radius);
    c.ring_core = ini.get("initial.ring_core", c.ring_core);
    c.ring_circulation = ini.get("initial.ring_circulation", c.ring_circulation);
    c.ring_spacing = ini.get("initial.ring_spacing", c.ring_spacing);
    c.ring_eps_factor = ini.get("initial.ring_eps_factor", c.ring_eps_factor);
    std::string kind = ini.get("solver.kind", std::string("viscous"));
    if (kind == "viscous") c.solver = SolverKind::Viscous;
    else if (kind == "euler") c.solver = SolverKind::Euler;
    else if (kind == "fixed-body") c.solver = SolverKind::FixedBody;
    else throw ConfigError(ini.where("solver.kind"), "expected viscous, euler or fixed-body");
    c.nu = ini.get("solver.nu", c.nu);
    if (ini.has("solver.alpha")) c.alpha = AlphaRule::parse(ini.get("solver.alpha", std::string()), ini.where("solver.alpha"));
    c.T = ini.get("solver.T", c.T);
    c.dt = ini.get("solver.dt", c.dt);
    c.N = ini.get("solver.N", c.N);
    c.surface_order = ini.get("solver.surface_order", c.surface_order);
    c.radial_order = ini.get("solver.radial_order", c.radial_order);
    c.truncation = ini.get("solver.truncation", c.truncation);
    c.cutoff_width = ini.get("solver.cutoff_width", c.cutoff_width);
    c.chi_R = ini.get("solver.chi_R", c.chi_R);
    c.image_degree = ini.get("solver.image_degree", c.image_degree);
    c.slack_tolerance = ini.get("solver.slack_tolerance", c.slack_tolerance);
    c.max_halvings = ini.get("solver.max_halvings", c.max_halvings);
    std::string study = ini.get("study.kind", std::string("inviscid"));
    if (study == "inviscid") c.study = StudyKind::Inviscid;
    else if (study == "inertia-viscous") c.study = StudyKind::InertiaViscous;
    else if (study == "inertia-euler") c.study = StudyKind::InertiaEuler;
    else throw ConfigError(ini.where("study.kind"), "expected inviscid, inertia-viscous or inertia-euler");
    c.nu_grid = ini.get_list("study.nu_grid", c.nu_grid);
    c.alpha_grid = ini.get_list("study.alpha_grid", c.alpha_grid);
    c.friction_power = ini.get("study.friction_power", c.friction_power);
    c.sigma_grid = ini.get_list("study.sigma_grid", c.sigma_grid);
    c.plot = ini.get("study.plot", c.plot);
    c.output_dir = ini.get("output.dir", c.output_dir);
    c.seed = ini.get_u64("output.seed", c.seed);
    validate(c);
    return c;
}

inline std::string to_ini(const RunConfig& c) {
    auto v3 = [](const Vec3d& v) { return fmt17(v[0]) + ", " + fmt17(v[1]) + ", " + fmt17(v[2]); };
    auto list = [](const std::vector<double>& g) {
        std::string s;
        for (std::size_t i = 0; i < g.size(); ++i) s += (i ? ", " : "") + fmt17(g[i]);
        return s;
    };
    std::ostringstream o;
    o << "[body]\n"
      << "shape = " << c.shape << "\n"
      << "radius = " << fmt17(c.radius) << "\n"
      << "density = " << fmt17(c.density) << "\n"
      << "icosphere_level = " << c.icosphere_level << "\n"
      << "volume_matched = " << (c.volume_matched ? "true" : "false") << "\n";
    if (!c.mesh_file.empty()) o << "mesh_file = " << c.mesh_file << "\n";
    o << "inertia_scale = " << fmt17(c.inertia_scale) << "\n\n"
      << "[initial]\n"
      << "ell = " << v3(c.ell0) << "\n"
      << "rot = " << v3(c.rot0) << "\n"
      << "profile = " << c.profile << "\n"
      << "amplitude = " << fmt17(c.amplitude) << "\n"
      << "ring_centre = " << v3(c.ring_centre) << "\n"
      << "ring_axis = " << v3(c.ring_axis) << "\n"
      << "ring_radius = " << fmt17(c.ring_radius) << "\n"
      << "ring_core = " << fmt17(c.ring_core) << "\n"
      << "ring_circulation = " << fmt17(c.ring_circulation) << "\n"
      << "ring_spacing = " << fmt17(c.ring_spacing) << "\n"
      << "ring_eps_factor = " << fmt17(c.ring_eps_factor) << "\n\n"
      << "[solver]\n"
      << "kind = " << to_string(c.solver) << "\n"
      << "nu = " << fmt17(c.nu) << "\n"
      << "alpha = " << c.alpha.str() << "\n"
      << "T = " << fmt17(c.T) << "\n"
      << "dt = " << fmt17(c.dt) << "\n"
      << "N = " << c.N << "\n"
      << "surface_order = " << c.surface_order << "\n"
      << "radial_order = " << c.radial_order << "\n"
      << "truncation = " << fmt17(c.truncation) << "\n"
      << "cutoff_width = " << fmt17(c.cutoff_width) << "\n"
      << "chi_R = " << fmt17(c.chi_R) << "\n"
      << "image_degree = " << c.image_degree << "\n"
      << "slack_tolerance = " << fmt17(c.slack_tolerance) << "\n"
      << "max_halvings = " << c.max_halvings << "\n\n"
      << "[study]\n"
      << "kind = " << to_string(c.study) << "\n"
      << "nu_grid = " << list(c.nu_grid) << "\n"
      << "alpha_grid = " << list(c.alpha_grid) << "\n"
      << "friction_power = " << fmt17(c.friction_power) << "\n"
      << "sigma_grid = " << list(c.sigma_grid) << "\n"
      << "plot = " << (c.plot ? "true" : "false") << "\n\n"
      << "[output]\n"
      << "dir = " << c.output_dir << "\n"
      << "seed = " << c.seed << "\n";
    return o.str();
}

}  // namespace rigidflow::cli
