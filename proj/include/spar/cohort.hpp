#pragma once

#include <cstdint>
#include <vector>

#include "spar/volume.hpp"

namespace spar::data {

// Parameters of the synthetic multi-structure cohort that stands in for real
// examinations. Every case holds n_structures non-overlapping smooth blobs
// (deformed ellipsoids, coherent across slices) labeled 1..n_structures over
// background 0.
struct CohortSpec {
    int n_patients = 6;
    int slice_size = 64;   // square in-plane size; four exact 2x downsamplings required
    int depth = 32;
    int n_structures = 3;
    double noise_sigma = 0.03;
    double bias_field_strength = 0.08;
    std::uint64_t seed = 0;

    int num_classes() const { return n_structures + 1; }
    void validate() const;
};

// Deterministic: identical spec (including seed) produces a bit-identical
// cohort. Throws if structure placement cannot satisfy non-overlap and the
// minimum size after bounded retries.
std::vector<PatientCase> generate_cohort(const CohortSpec& spec);

} // namespace spar::data
