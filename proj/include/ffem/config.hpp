#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffem/model.hpp"
#include "ffem/solve.hpp"

namespace ffem {

/// Configuration error carrying the offending section/key.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& msg)
        : std::runtime_error("config field '" + f + "': " + msg), field(std::move(f)) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

inline std::vector<double> parse_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(field, item));
    }
    if (out.empty()) throw ConfigError(field, "expected a comma-separated list of numbers");
    return out;
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Study configuration: model parameters, fractional grid, mesh densities,
/// loads, case selection and output options. All quantities in SI base units.
struct StudyConfig {
    // geometry
    double length = 0.0, width = 0.0, thickness = 0.0;
    // patch (optional)
    bool has_patch = false;
    double patch_x0 = 0.0, patch_length = 0.0, patch_thickness = 0.0;
    // materials
    double substrate_modulus = 0.0, piezo_modulus = 0.0, e31 = 0.0, a33 = 0.0;
    // electrodes (optional)
    std::optional<ElectrodeFilms> electrodes;
    // fractional grid
    std::vector<double> alphas;
    std::vector<double> horizons;
    // mesh: explicit element counts, or N_inf targets resolved per horizon
    std::vector<int> elements;
    std::vector<double> n_inf;
    // loads
    Loads loads;
    // case
    Mode mode = Mode::Converse;
    BcTag bc = BcTag::SimplySupported;
    // outputs
    std::string out_dir = "out";
    int samples_per_element = 10;

    SmartBeamModel to_model(double alpha, double h_l) const {
        SmartBeamModel m;
        m.L = length;
        m.b = width;
        m.h = thickness;
        if (has_patch) m.patch = {patch_x0, patch_length, patch_thickness};
        m.materials = {substrate_modulus, piezo_modulus, e31, a33};
        m.electrodes = electrodes;
        m.frac = {alpha, alpha, h_l};
        m.bc = bc;
        return m;
    }

    /// Element counts to run for a given horizon (N_inf targets resolve to
    /// whole meshes, N = round(n_inf * L / h_l)).
    std::vector<int> mesh_densities(double h_l) const {
        if (!elements.empty()) return elements;
        std::vector<int> out;
        for (double ni : n_inf) out.push_back(static_cast<int>(std::lround(ni * length / h_l)));
        return out;
    }

    void validate() const {
        auto require = [](bool ok, const std::string& field, const std::string& msg) {
            if (!ok) throw ConfigError(field, msg);
        };
        require(length > 0.0, "geometry.length", "must be positive");
        require(width > 0.0, "geometry.width", "must be positive");
        require(thickness > 0.0, "geometry.thickness", "must be positive");
        if (has_patch) {
            require(patch_x0 >= 0.0, "patch.x0", "must be non-negative");
            require(patch_x0 + patch_length <= length * (1.0 + 1e-12), "patch.length",
                    "patch must end within the beam");
        }
        require(substrate_modulus > 0.0, "materials.substrate_modulus", "must be positive");
        require(piezo_modulus > 0.0, "materials.piezo_modulus", "must be positive");
        require(a33 > 0.0, "materials.a33", "must be positive");
        require(!alphas.empty(), "fractional.alpha", "missing");
        require(!horizons.empty(), "fractional.horizon", "missing");
        for (double a : alphas) require(a > 0.0 && a <= 1.0, "fractional.alpha", "must be in (0,1]");
        for (double hl : horizons) {
            require(hl > 0.0 && hl <= length, "fractional.horizon", "must be in (0, length]");
            for (int ne : mesh_densities(hl)) {
                require(ne >= 2, "mesh.elements", "need at least 2 elements");
                require(hl * ne / length >= 1.0 - 1e-9, "mesh.elements",
                        "N_inf = h_l/l_e must be at least 1");
            }
        }
        require(!elements.empty() || !n_inf.empty(), "mesh.elements", "missing (or provide mesh.n_inf)");
        if (mode == Mode::Direct)
            require(has_patch && patch_thickness > 0.0, "patch.thickness",
                    "direct mode requires a piezoelectric patch");
        require(samples_per_element >= 1, "outputs.samples_per_element", "must be at least 1");
    }
};

inline StudyConfig parse_config(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno), "malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            sections[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(key, "key outside any [section]");
        sections[section][key] = val;
    }

    auto get = [&](const std::string& sec, const std::string& key) -> std::string {
        auto s = sections.find(sec);
        if (s == sections.end()) throw ConfigError(sec, "missing required section");
        auto k = s->second.find(key);
        if (k == s->second.end()) throw ConfigError(sec + "." + key, "missing required key");
        return k->second;
    };
    auto get_opt = [&](const std::string& sec, const std::string& key,
                       const std::string& dflt) -> std::string {
        auto s = sections.find(sec);
        if (s == sections.end()) return dflt;
        auto k = s->second.find(key);
        return k == s->second.end() ? dflt : k->second;
    };

    StudyConfig c;
    c.length = detail::parse_double("geometry.length", get("geometry", "length"));
    c.width = detail::parse_double("geometry.width", get("geometry", "width"));
    c.thickness = detail::parse_double("geometry.thickness", get("geometry", "thickness"));
    if (sections.count("patch")) {
        c.has_patch = true;
        c.patch_x0 = detail::parse_double("patch.x0", get("patch", "x0"));
        c.patch_length = detail::parse_double("patch.length", get("patch", "length"));
        c.patch_thickness = detail::parse_double("patch.thickness", get("patch", "thickness"));
    }
    c.substrate_modulus =
        detail::parse_double("materials.substrate_modulus", get("materials", "substrate_modulus"));
    c.piezo_modulus =
        detail::parse_double("materials.piezo_modulus", get("materials", "piezo_modulus"));
    c.e31 = detail::parse_double("materials.e31", get("materials", "e31"));
    c.a33 = detail::parse_double("materials.a33", get("materials", "a33"));
    if (sections.count("electrodes")) {
        ElectrodeFilms e;
        e.h_e = detail::parse_double("electrodes.thickness", get("electrodes", "thickness"));
        e.E_e = detail::parse_double("electrodes.modulus", get("electrodes", "modulus"));
        c.electrodes = e;
    }
    c.alphas = detail::parse_list("fractional.alpha", get("fractional", "alpha"));
    c.horizons = detail::parse_list("fractional.horizon", get("fractional", "horizon"));
    if (sections.count("mesh")) {
        auto& mesh_sec = sections["mesh"];
        if (mesh_sec.count("elements"))
            for (double v : detail::parse_list("mesh.elements", mesh_sec["elements"]))
                c.elements.push_back(static_cast<int>(std::lround(v)));
        if (mesh_sec.count("n_inf")) c.n_inf = detail::parse_list("mesh.n_inf", mesh_sec["n_inf"]);
    }
    if (c.elements.empty() && c.n_inf.empty())
        throw ConfigError("mesh.elements", "missing required key");
    c.loads.q0 = detail::parse_double("loads.q0", get_opt("loads", "q0", "0"));
    c.loads.f_a = detail::parse_double("loads.f_a", get_opt("loads", "f_a", "0"));
    c.loads.phi0 = detail::parse_double("loads.phi0", get_opt("loads", "phi0", "0"));
    std::string mode = get("case", "mode");
    if (mode == "converse")
        c.mode = Mode::Converse;
    else if (mode == "direct")
        c.mode = Mode::Direct;
    else
        throw ConfigError("case.mode", "expected 'converse' or 'direct', got '" + mode + "'");
    try {
        c.bc = bc_from_string(get("case", "bc"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("case.bc", e.what());
    }
    c.out_dir = get_opt("outputs", "directory", "out");
    c.samples_per_element = static_cast<int>(detail::parse_double(
        "outputs.samples_per_element", get_opt("outputs", "samples_per_element", "10")));
    c.validate();
    return c;
}

inline StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("file", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string serialize_config(const StudyConfig& c) {
    std::ostringstream out;
    out << "[geometry]\n";
    out << "length = " << detail::fmt17(c.length) << "\n";
    out << "width = " << detail::fmt17(c.width) << "\n";
    out << "thickness = " << detail::fmt17(c.thickness) << "\n";
    if (c.has_patch) {
        out << "\n[patch]\n";
        out << "x0 = " << detail::fmt17(c.patch_x0) << "\n";
        out << "length = " << detail::fmt17(c.patch_length) << "\n";
        out << "thickness = " << detail::fmt17(c.patch_thickness) << "\n";
    }
    out << "\n[materials]\n";
    out << "substrate_modulus = " << detail::fmt17(c.substrate_modulus) << "\n";
    out << "piezo_modulus = " << detail::fmt17(c.piezo_modulus) << "\n";
    out << "e31 = " << detail::fmt17(c.e31) << "\n";
    out << "a33 = " << detail::fmt17(c.a33) << "\n";
    if (c.electrodes) {
        out << "\n[electrodes]\n";
        out << "thickness = " << detail::fmt17(c.electrodes->h_e) << "\n";
        out << "modulus = " << detail::fmt17(c.electrodes->E_e) << "\n";
    }
    out << "\n[fractional]\n";
    out << "alpha = ";
    for (std::size_t i = 0; i < c.alphas.size(); ++i)
        out << (i ? ", " : "") << detail::fmt17(c.alphas[i]);
    out << "\nhorizon = ";
    for (std::size_t i = 0; i < c.horizons.size(); ++i)
        out << (i ? ", " : "") << detail::fmt17(c.horizons[i]);
    out << "\n\n[mesh]\n";
    if (!c.elements.empty()) {
        out << "elements = ";
        for (std::size_t i = 0; i < c.elements.size(); ++i)
            out << (i ? ", " : "") << c.elements[i];
        out << "\n";
    }
    if (!c.n_inf.empty()) {
        out << "n_inf = ";
        for (std::size_t i = 0; i < c.n_inf.size(); ++i)
            out << (i ? ", " : "") << detail::fmt17(c.n_inf[i]);
        out << "\n";
    }
    out << "\n[loads]\n";
    out << "q0 = " << detail::fmt17(c.loads.q0) << "\n";
    out << "f_a = " << detail::fmt17(c.loads.f_a) << "\n";
    out << "phi0 = " << detail::fmt17(c.loads.phi0) << "\n";
    out << "\n[case]\n";
    out << "mode = " << to_string(c.mode) << "\n";
    out << "bc = " << to_string(c.bc) << "\n";
    out << "\n[outputs]\n";
    out << "directory = " << c.out_dir << "\n";
    out << "samples_per_element = " << c.samples_per_element << "\n";
    return out.str();
}

}  // namespace ffem
