#include "spar/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "spar/error.hpp"
#include "spar/rng.hpp"

namespace spar::data {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Wave {
    double fx, fy, fz, phase, amp;
};

// Low-frequency scalar field in [-sum(amp), +sum(amp)], smooth in all axes.
double field_at(const std::vector<Wave>& waves, double xs, double ys, double zs) {
    double v = 0.0;
    for (const auto& w : waves)
        v += w.amp * std::cos(kTwoPi * (w.fx * xs + w.fy * ys + w.fz * zs) + w.phase);
    return v;
}

struct Blob {
    double cx, cy, cz;
    double rx, ry, rz;
    double cos_t, sin_t;         // in-plane rotation of the ellipsoid axes
    std::vector<Wave> boundary;  // perturbation of the implicit surface

    bool contains(int x, int y, int z, int s, int d) const {
        const double dx = x - cx, dy = y - cy, dz = z - cz;
        const double ux = cos_t * dx + sin_t * dy;
        const double uy = -sin_t * dx + cos_t * dy;
        const double q = (ux / rx) * (ux / rx) + (uy / ry) * (uy / ry) + (dz / rz) * (dz / rz);
        const double g = field_at(boundary, static_cast<double>(x) / s, static_cast<double>(y) / s,
                                  static_cast<double>(z) / d);
        return q < 1.0 + g;
    }
};

} // namespace

void CohortSpec::validate() const {
    require(n_patients >= 2, "cohort needs at least 2 patients");
    require(slice_size > 0 && slice_size % 16 == 0, "slice_size must be a positive multiple of 16");
    require(depth >= 2, "depth must be at least 2");
    require(n_structures >= 1, "need at least one structure");
    require(n_structures <= 9, "too many structures for non-overlapping placement");
    require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
    require(bias_field_strength >= 0.0, "bias_field_strength must be non-negative");
}

std::vector<PatientCase> generate_cohort(const CohortSpec& spec) {
    spec.validate();
    const int s = spec.slice_size, d = spec.depth;
    const std::array<double, 3> spacing{0.75, 0.75, 1.5};

    std::vector<PatientCase> cohort(static_cast<size_t>(spec.n_patients));
    bool failed = false;

#pragma omp parallel for schedule(static)
    for (int ci = 0; ci < spec.n_patients; ++ci) {
        Rng rng(mix_seed(spec.seed, "cohort-case", static_cast<std::uint64_t>(ci)));

        PatientCase pc;
        char idbuf[8];
        std::snprintf(idbuf, sizeof idbuf, "%03d", ci);
        pc.case_id = idbuf;
        pc.image = Volume::grayscale(s, s, d, spacing);
        pc.mask = Volume::label_volume(s, s, d, spec.num_classes(), spacing);

        // Per-case intensity model, drawn before the geometry so the draw
        // order stays fixed.
        const double bg_intensity = 0.15 + 0.05 * rng.uniform(-1.0, 1.0);
        std::vector<double> structure_intensity(static_cast<size_t>(spec.n_structures));
        for (int k = 0; k < spec.n_structures; ++k)
            structure_intensity[static_cast<size_t>(k)] =
                0.40 + 0.45 * (k + 1) / spec.n_structures + 0.03 * rng.uniform(-1.0, 1.0);

        std::vector<Wave> bias(2);
        for (auto& w : bias) {
            w.fx = 0.5 + rng.uniform();
            w.fy = 0.5 + rng.uniform();
            w.fz = 0.5 + rng.uniform();
            w.phase = rng.uniform(0.0, kTwoPi);
            w.amp = spec.bias_field_strength / 2.0;
        }

        const std::int64_t min_voxels =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(0.005 * static_cast<double>(pc.mask.voxels())));

        bool case_ok = true;
        for (int k = 0; k < spec.n_structures && case_ok; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
                Blob b;
                // Stacked placement bands keep structures apart, like the
                // bones of a joint seen in one field of view.
                const double band = (k + 0.5) / spec.n_structures;
                b.cy = (band + 0.04 * rng.uniform(-1.0, 1.0)) * s;
                b.cx = (0.5 + 0.08 * rng.uniform(-1.0, 1.0)) * s;
                b.cz = (0.5 + 0.06 * rng.uniform(-1.0, 1.0)) * d;
                b.rx = rng.uniform(0.09, 0.13) * s;
                b.ry = rng.uniform(0.09, 0.13) * s;
                b.rz = rng.uniform(0.28, 0.40) * d;
                const double theta = rng.uniform(0.0, kTwoPi / 2.0);
                b.cos_t = std::cos(theta);
                b.sin_t = std::sin(theta);
                b.boundary.resize(3);
                for (auto& w : b.boundary) {
                    w.fx = static_cast<double>(rng.below(2) + 1);
                    w.fy = static_cast<double>(rng.below(2) + 1);
                    w.fz = static_cast<double>(rng.below(2) + 1);
                    w.phase = rng.uniform(0.0, kTwoPi);
                    w.amp = rng.uniform(0.01, 0.05);
                }

                std::vector<std::int64_t> voxels;
                bool overlap = false;
                for (int z = 0; z < d && !overlap; ++z)
                    for (int y = 0; y < s && !overlap; ++y)
                        for (int x = 0; x < s; ++x) {
                            if (!b.contains(x, y, z, s, d)) continue;
                            const std::int64_t idx = pc.mask.index(x, y, z);
                            if (pc.mask.labels[static_cast<size_t>(idx)] != 0) {
                                overlap = true;
                                break;
                            }
                            voxels.push_back(idx);
                        }
                if (overlap || static_cast<std::int64_t>(voxels.size()) < min_voxels) continue;
                for (auto idx : voxels) pc.mask.labels[static_cast<size_t>(idx)] = static_cast<std::uint8_t>(k + 1);
                placed = true;
            }
            if (!placed) case_ok = false;
        }

        if (!case_ok) {
#pragma omp critical
            failed = true;
            continue;
        }

        // Image: per-structure base intensity + smooth bias field + noise.
        for (int z = 0; z < d; ++z)
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    const std::int64_t idx = pc.image.index(x, y, z);
                    const std::uint8_t lab = pc.mask.labels[static_cast<size_t>(idx)];
                    double v = (lab == 0) ? bg_intensity : structure_intensity[static_cast<size_t>(lab - 1)];
                    v += field_at(bias, static_cast<double>(x) / s, static_cast<double>(y) / s,
                                  static_cast<double>(z) / d);
                    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
                    pc.image.gray[static_cast<size_t>(idx)] =
                        static_cast<float>(std::min(1.0, std::max(0.0, v)));
                }

        cohort[static_cast<size_t>(ci)] = std::move(pc);
    }

    if (failed)
        throw Error("structure placement failed: could not satisfy non-overlap after bounded retries");
    return cohort;
}

} // namespace spar::data
