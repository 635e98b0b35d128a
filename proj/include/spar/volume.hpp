#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spar::data {

enum class VoxelKind { GrayF32, LabelsU8 };

// 3D scalar grid with physical voxel spacing. Carries either a grayscale
// image in [0,1] or a label mask with values < classes. Storage is z-slice
// major, then row major: index = (z*height + y)*width + x.
struct Volume {
    int width = 0, height = 0, depth = 0;
    std::array<double, 3> spacing_mm{1.0, 1.0, 1.0};
    VoxelKind kind = VoxelKind::GrayF32;
    int classes = 0;  // label alphabet size C for masks, 0 for grayscale
    std::vector<float> gray;
    std::vector<std::uint8_t> labels;

    std::int64_t voxels() const {
        return static_cast<std::int64_t>(width) * height * depth;
    }
    std::int64_t index(int x, int y, int z) const {
        return (static_cast<std::int64_t>(z) * height + y) * width + x;
    }

    static Volume grayscale(int w, int h, int d, std::array<double, 3> spacing);
    static Volume label_volume(int w, int h, int d, int classes, std::array<double, 3> spacing);

    bool same_grid(const Volume& o) const {
        return width == o.width && height == o.height && depth == o.depth && spacing_mm == o.spacing_mm;
    }

    // Enforces the type invariants (positive dims/spacing, value ranges,
    // payload length).
    void validate() const;
};

// Volume container: dir/header.json + dir/data.raw (little-endian scalars).
void save_volume(const Volume& v, const std::filesystem::path& dir);
Volume load_volume(const std::filesystem::path& dir);

// One patient examination: grayscale image plus the label mask on an
// identical grid.
struct PatientCase {
    std::string case_id;
    Volume image;
    Volume mask;

    void validate() const;
};

void save_cohort(const std::vector<PatientCase>& cohort, const std::filesystem::path& dir);
std::vector<PatientCase> load_cohort(const std::filesystem::path& dir);

// FNV-1a digest over headers and payloads of every case, as fixed-width hex.
// Used to detect silent train/test mismatches between runs.
std::string cohort_hash(const std::vector<PatientCase>& cohort);

} // namespace spar::data
