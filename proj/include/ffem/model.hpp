#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "ffem/fractional.hpp"

namespace ffem {

struct Materials {
    double E_S = 0.0;  // substrate modulus [Pa]
    double E_P = 0.0;  // piezo modulus [Pa]
    double e31 = 0.0;  // piezoelectric constant [C/m^2]
    double a33 = 0.0;  // dielectric permittivity [F/m]

    void validate() const {
        if (!(E_S > 0.0)) throw std::invalid_argument("materials: E_S must be positive");
        if (!(E_P > 0.0)) throw std::invalid_argument("materials: E_P must be positive");
        if (!(a33 > 0.0)) throw std::invalid_argument("materials: a33 must be positive");
    }
};

struct PatchGeometry {
    double x0 = 0.0;      // patch start [m]
    double length = 0.0;  // L_P [m]
    double h_P = 0.0;     // patch thickness [m]; 0 reduces to a bare elastic beam
};

struct ElectrodeFilms {
    double h_e = 0.0;  // film thickness [m], one film per piezo face
    double E_e = 0.0;  // film modulus [Pa]
};

enum class BcTag { SimplySupported, ClampedClamped, Cantilever };

inline std::string to_string(BcTag t) {
    switch (t) {
        case BcTag::SimplySupported: return "simply-supported";
        case BcTag::ClampedClamped: return "clamped-clamped";
        case BcTag::Cantilever: return "cantilever";
    }
    return "?";
}

inline BcTag bc_from_string(const std::string& s) {
    if (s == "simply-supported") return BcTag::SimplySupported;
    if (s == "clamped-clamped") return BcTag::ClampedClamped;
    if (s == "cantilever") return BcTag::Cantilever;
    throw std::invalid_argument("unknown boundary condition tag: " + s);
}

struct SmartBeamModel {
    double L = 0.0;  // beam length [m]
    double b = 0.0;  // width [m]
    double h = 0.0;  // substrate thickness [m]
    PatchGeometry patch;
    Materials materials;
    std::optional<ElectrodeFilms> electrodes;
    FractionalParams frac;
    BcTag bc = BcTag::SimplySupported;

    bool has_patch() const { return patch.h_P > 0.0 && patch.length > 0.0; }

    void validate() const {
        if (!(L > 0.0 && b > 0.0 && h > 0.0)) throw std::invalid_argument("model: lengths must be positive");
        if (patch.x0 < 0.0 || patch.x0 + patch.length > L * (1.0 + 1e-12))
            throw std::invalid_argument("model: patch must lie within the beam");
        materials.validate();
        frac.validate(L);
    }

    std::uint64_t hash() const {
        auto mix = [](std::uint64_t h, double v) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(v));
            __builtin_memcpy(&bits, &v, sizeof(bits));
            h ^= bits;
            return h * 0x100000001b3ull;  // FNV-1a step
        };
        std::uint64_t h64 = 0xcbf29ce484222325ull;
        for (double v : {L, b, h, patch.x0, patch.length, patch.h_P, materials.E_S, materials.E_P,
                         materials.e31, materials.a33, frac.alpha_m, frac.alpha_e, frac.h_l,
                         electrodes ? electrodes->h_e : 0.0, electrodes ? electrodes->E_e : 0.0,
                         static_cast<double>(bc)})
            h64 = mix(h64, v);
        return h64;
    }
};

/// Layer constants of a film spanning [z0, z1] through the thickness:
/// area, first and second moments about the substrate mid-plane.
struct LayerConstants {
    double A = 0.0;
    double B = 0.0;
    double I = 0.0;
};

inline LayerConstants layer_constants(double b, double z0, double z1) {
    return {b * (z1 - z0), 0.5 * b * (z1 * z1 - z0 * z0), (b / 3.0) * (z1 * z1 * z1 - z0 * z0 * z0)};
}

struct SectionConstants {
    double A = 0.0;    // substrate area
    double I = 0.0;    // substrate second moment
    double A_P = 0.0;  // piezo layer constants about the substrate mid-plane
    double B_P = 0.0;
    double I_P = 0.0;
};

/// Piezo constants follow the layer-moment formulas; when electrode films are
/// present the piezo layer sits h_e above the substrate face.
inline SectionConstants section_constants(const SmartBeamModel& m) {
    SectionConstants s;
    s.A = m.b * m.h;
    s.I = m.b * m.h * m.h * m.h / 12.0;
    double shift = m.electrodes ? m.electrodes->h_e : 0.0;
    double z0 = 0.5 * m.h + shift;
    auto p = layer_constants(m.b, z0, z0 + m.patch.h_P);
    s.A_P = p.A;
    s.B_P = p.B;
    s.I_P = p.I;
    return s;
}

struct ElectrodeConstants {
    double A_e = 0.0;
    double B_e = 0.0;
    double I_e = 0.0;
};

/// Combined constants of the two films sandwiching the piezo layer.
inline ElectrodeConstants electrode_constants(const SmartBeamModel& m) {
    ElectrodeConstants e;
    if (!m.electrodes) return e;
    double he = m.electrodes->h_e;
    double z0 = 0.5 * m.h;
    auto lower = layer_constants(m.b, z0, z0 + he);
    auto upper = layer_constants(m.b, z0 + he + m.patch.h_P, z0 + 2.0 * he + m.patch.h_P);
    e.A_e = lower.A + upper.A;
    e.B_e = lower.B + upper.B;
    e.I_e = lower.I + upper.I;
    return e;
}

namespace presets {

// Geometry and PZT-5H/brass constants used throughout the reference studies.
inline SmartBeamModel base_beam() {
    SmartBeamModel m;
    m.L = 24.53e-3;
    m.b = 6.4e-3;
    m.h = 0.14e-3;
    m.materials = {105e9, 60.6e9, 16.604, 0.26e-7};
    m.frac = {1.0, 1.0, m.L / 5.0};
    return m;
}

/// Piezoelectric layer over the full length, simply supported.
inline SmartBeamModel layer_beam() {
    SmartBeamModel m = base_beam();
    m.patch = {0.0, m.L, 0.05e-3};
    m.bc = BcTag::SimplySupported;
    return m;
}

/// Piezoelectric patch over [0, 0.3 L], cantilever.
inline SmartBeamModel patch_beam() {
    SmartBeamModel m = base_beam();
    m.patch = {0.0, 0.3 * m.L, 0.05e-3};
    m.bc = BcTag::Cantilever;
    return m;
}

/// Thick-layer configuration of the electrode study (h_P = 0.265 mm),
/// optionally with 5 um aluminium films.
inline SmartBeamModel electrode_study_beam(bool with_electrodes) {
    SmartBeamModel m = layer_beam();
    m.patch.h_P = 0.265e-3;
    if (with_electrodes) m.electrodes = ElectrodeFilms{5e-6, 68e9};
    return m;
}

/// Bare elastic beam (h_P = 0) for the clamped-clamped validation.
inline SmartBeamModel validation_beam() {
    SmartBeamModel m = base_beam();
    m.patch = {0.0, m.L, 0.0};
    m.bc = BcTag::ClampedClamped;
    return m;
}

}  // namespace presets

}  // namespace ffem
