#include "spar/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spar/error.hpp"

static_assert(std::endian::native == std::endian::little, "little-endian host required for raw volume I/O");

namespace spar::data {

using nlohmann::json;

Volume Volume::grayscale(int w, int h, int d, std::array<double, 3> spacing) {
    Volume v;
    v.width = w;
    v.height = h;
    v.depth = d;
    v.spacing_mm = spacing;
    v.kind = VoxelKind::GrayF32;
    v.gray.assign(static_cast<size_t>(v.voxels()), 0.0f);
    return v;
}

Volume Volume::label_volume(int w, int h, int d, int classes, std::array<double, 3> spacing) {
    Volume v;
    v.width = w;
    v.height = h;
    v.depth = d;
    v.spacing_mm = spacing;
    v.kind = VoxelKind::LabelsU8;
    v.classes = classes;
    v.labels.assign(static_cast<size_t>(v.voxels()), 0);
    return v;
}

void Volume::validate() const {
    require(width > 0 && height > 0 && depth > 0, "volume dimensions must be positive");
    for (double s : spacing_mm) require(s > 0.0, "voxel spacing must be strictly positive");
    if (kind == VoxelKind::GrayF32) {
        require(static_cast<std::int64_t>(gray.size()) == voxels(), "grayscale payload size mismatch");
        require(labels.empty(), "grayscale volume must not carry labels");
        for (float v : gray)
            require(std::isfinite(v) && v >= 0.0f && v <= 1.0f, "grayscale values must lie in [0,1]");
    } else {
        require(classes >= 1, "label volume needs a positive class count");
        require(static_cast<std::int64_t>(labels.size()) == voxels(), "label payload size mismatch");
        require(gray.empty(), "label volume must not carry grayscale data");
        for (std::uint8_t v : labels)
            require(v < classes, "label value exceeds class count");
    }
}

void save_volume(const Volume& v, const std::filesystem::path& dir) {
    v.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create volume directory " + dir.string() + ": " + ec.message());

    json header;
    header["width"] = v.width;
    header["height"] = v.height;
    header["depth"] = v.depth;
    header["spacing_mm"] = {v.spacing_mm[0], v.spacing_mm[1], v.spacing_mm[2]};
    header["dtype"] = (v.kind == VoxelKind::GrayF32) ? "f32" : "u8";
    header["classes"] = v.classes;

    {
        std::ofstream os(dir / "header.json", std::ios::binary);
        if (!os) throw IoError("cannot write " + (dir / "header.json").string());
        os << header.dump(2) << "\n";
    }
    {
        std::ofstream os(dir / "data.raw", std::ios::binary);
        if (!os) throw IoError("cannot write " + (dir / "data.raw").string());
        if (v.kind == VoxelKind::GrayF32) {
            os.write(reinterpret_cast<const char*>(v.gray.data()),
                     static_cast<std::streamsize>(v.gray.size() * sizeof(float)));
        } else {
            os.write(reinterpret_cast<const char*>(v.labels.data()),
                     static_cast<std::streamsize>(v.labels.size()));
        }
        if (!os) throw IoError("short write to " + (dir / "data.raw").string());
    }
}

Volume load_volume(const std::filesystem::path& dir) {
    std::ifstream hs(dir / "header.json", std::ios::binary);
    if (!hs) throw IoError("cannot open " + (dir / "header.json").string());
    json header;
    try {
        hs >> header;
    } catch (const json::exception& e) {
        throw IoError("malformed volume header in " + dir.string() + ": " + e.what());
    }

    Volume v;
    try {
        v.width = header.at("width").get<int>();
        v.height = header.at("height").get<int>();
        v.depth = header.at("depth").get<int>();
        const auto sp = header.at("spacing_mm");
        if (!sp.is_array() || sp.size() != 3) throw IoError("spacing_mm must have 3 entries");
        for (int i = 0; i < 3; ++i) v.spacing_mm[static_cast<size_t>(i)] = sp[static_cast<size_t>(i)].get<double>();
        v.classes = header.at("classes").get<int>();
        const std::string dtype = header.at("dtype").get<std::string>();
        if (dtype == "f32") {
            v.kind = VoxelKind::GrayF32;
        } else if (dtype == "u8") {
            v.kind = VoxelKind::LabelsU8;
        } else {
            throw IoError("unknown dtype \"" + dtype + "\" in " + dir.string());
        }
    } catch (const json::exception& e) {
        throw IoError("malformed volume header in " + dir.string() + ": " + e.what());
    }
    if (v.width <= 0 || v.height <= 0 || v.depth <= 0)
        throw IoError("malformed volume header in " + dir.string() + ": non-positive dimensions");

    std::ifstream ds(dir / "data.raw", std::ios::binary | std::ios::ate);
    if (!ds) throw IoError("cannot open " + (dir / "data.raw").string());
    const auto bytes = static_cast<std::int64_t>(ds.tellg());
    ds.seekg(0);

    const std::int64_t expect =
        v.voxels() * (v.kind == VoxelKind::GrayF32 ? static_cast<std::int64_t>(sizeof(float)) : 1);
    if (bytes != expect) {
        std::ostringstream os;
        os << "volume payload size mismatch in " << dir.string() << ": header implies " << expect
           << " bytes, file has " << bytes;
        throw IoError(os.str());
    }

    if (v.kind == VoxelKind::GrayF32) {
        v.gray.resize(static_cast<size_t>(v.voxels()));
        ds.read(reinterpret_cast<char*>(v.gray.data()), expect);
    } else {
        v.labels.resize(static_cast<size_t>(v.voxels()));
        ds.read(reinterpret_cast<char*>(v.labels.data()), expect);
    }
    if (!ds) throw IoError("short read from " + (dir / "data.raw").string());
    v.validate();
    return v;
}

void PatientCase::validate() const {
    image.validate();
    mask.validate();
    require(image.kind == VoxelKind::GrayF32, "case image must be grayscale");
    require(mask.kind == VoxelKind::LabelsU8, "case mask must hold labels");
    require(image.same_grid(mask), "case image and mask must share dimensions and spacing");
}

void save_cohort(const std::vector<PatientCase>& cohort, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create cohort directory " + dir.string() + ": " + ec.message());
    for (const auto& c : cohort) {
        c.validate();
        const auto base = dir / ("case_" + c.case_id);
        save_volume(c.image, base / "image");
        save_volume(c.mask, base / "mask");
    }
}

std::vector<PatientCase> load_cohort(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("cohort directory not found: " + dir.string());
    std::vector<std::string> ids;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (e.is_directory() && name.rfind("case_", 0) == 0) ids.push_back(name.substr(5));
    }
    std::sort(ids.begin(), ids.end());
    if (ids.empty()) throw IoError("no case_<id> subdirectories in " + dir.string());

    std::vector<PatientCase> cohort;
    cohort.reserve(ids.size());
    for (const auto& id : ids) {
        PatientCase c;
        c.case_id = id;
        c.image = load_volume(dir / ("case_" + id) / "image");
        c.mask = load_volume(dir / ("case_" + id) / "mask");
        c.validate();
        cohort.push_back(std::move(c));
    }
    return cohort;
}

namespace {

void fnv_bytes(std::uint64_t& h, const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
    }
}

void fnv_volume(std::uint64_t& h, const Volume& v) {
    fnv_bytes(h, &v.width, sizeof v.width);
    fnv_bytes(h, &v.height, sizeof v.height);
    fnv_bytes(h, &v.depth, sizeof v.depth);
    fnv_bytes(h, v.spacing_mm.data(), sizeof(double) * 3);
    const int kind = static_cast<int>(v.kind);
    fnv_bytes(h, &kind, sizeof kind);
    fnv_bytes(h, &v.classes, sizeof v.classes);
    if (v.kind == VoxelKind::GrayF32) {
        fnv_bytes(h, v.gray.data(), v.gray.size() * sizeof(float));
    } else {
        fnv_bytes(h, v.labels.data(), v.labels.size());
    }
}

} // namespace

std::string cohort_hash(const std::vector<PatientCase>& cohort) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& c : cohort) {
        fnv_bytes(h, c.case_id.data(), c.case_id.size());
        fnv_volume(h, c.image);
        fnv_volume(h, c.mask);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace spar::data
