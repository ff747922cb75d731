#include "ctoed/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctoed/errors.hpp"
#include "ctoed/io.hpp"
#include "ctoed/rng.hpp"

namespace ctoed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kReferenceGrid = 240;

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

const char* shape_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::Parallelogram: return "parallelogram";
        case ShapeKind::Triangle: return "triangle";
        case ShapeKind::Pentagon: return "pentagon";
    }
    return "unknown";
}

ShapeKind shape_from_name(const std::string& name) {
    if (name == "parallelogram") return ShapeKind::Parallelogram;
    if (name == "triangle") return ShapeKind::Triangle;
    if (name == "pentagon") return ShapeKind::Pentagon;
    throw ConfigTypeError("unknown shape kind: " + name);
}

RadiusRange dataset_radius_range(ShapeKind kind, int grid) {
    double s = static_cast<double>(grid) / kReferenceGrid;
    switch (kind) {
        case ShapeKind::Parallelogram: return {42.0 * s, 51.0 * s};
        case ShapeKind::Triangle:
        case ShapeKind::Pentagon: return {56.0 * s, 89.0 * s};
    }
    return {0.0, 0.0};
}

std::pair<double, double> dataset_center(int grid) {
    double s = static_cast<double>(grid) / kReferenceGrid;
    return {110.0 * s, 130.0 * s};
}

std::vector<std::pair<double, double>> shape_vertices(const ShapeSpec& spec) {
    std::vector<std::pair<double, double>> local;
    const double r = spec.radius;
    switch (spec.kind) {
        case ShapeKind::Parallelogram:
            // 60-degree rhombus: long diagonal 2r, short diagonal 2r/sqrt(3)
            local = {{r, 0.0},
                     {0.0, r / std::sqrt(3.0)},
                     {-r, 0.0},
                     {0.0, -r / std::sqrt(3.0)}};
            break;
        case ShapeKind::Triangle:
            for (int i = 0; i < 3; ++i) {
                double a = deg2rad(90.0 + 120.0 * i);
                local.emplace_back(r * std::cos(a), r * std::sin(a));
            }
            break;
        case ShapeKind::Pentagon:
            for (int i = 0; i < 5; ++i) {
                double a = deg2rad(90.0 + 72.0 * i);
                local.emplace_back(r * std::cos(a), r * std::sin(a));
            }
            break;
    }
    const double c = std::cos(deg2rad(spec.rotation));
    const double s = std::sin(deg2rad(spec.rotation));
    std::vector<std::pair<double, double>> out;
    out.reserve(local.size());
    for (auto [x, y] : local)
        out.emplace_back(spec.cx + c * x - s * y, spec.cy + s * x + c * y);
    return out;
}

Phantom generate_phantom(const ShapeSpec& spec, int grid) {
    auto range = dataset_radius_range(spec.kind, grid);
    const double tol = 1e-9 * grid;
    if (spec.radius < range.lo - tol || spec.radius > range.hi + tol)
        throw SpecOutOfRange("radius " + std::to_string(spec.radius) +
                             " outside dataset range for " +
                             shape_name(spec.kind));
    auto [cx, cy] = dataset_center(grid);
    if (std::abs(spec.cx - cx) > tol || std::abs(spec.cy - cy) > tol)
        throw SpecOutOfRange("center deviates from the dataset table");
    if (spec.rotation < 0.0 || spec.rotation >= 360.0)
        throw SpecOutOfRange("rotation must lie in [0, 360)");

    auto verts = shape_vertices(spec);
    for (auto [x, y] : verts)
        if (x < 0.0 || x > grid - 1 || y < 0.0 || y > grid - 1)
            throw ShapeClipped("polygon vertex outside the image grid");

    Phantom p;
    p.spec = spec;
    p.image = Image(grid);

    // bounding box, then a sign-consistent cross-product test per pixel center
    double xmin = grid, xmax = 0, ymin = grid, ymax = 0;
    for (auto [x, y] : verts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    const int c0 = std::max(0, static_cast<int>(std::floor(xmin)));
    const int c1 = std::min(grid - 1, static_cast<int>(std::ceil(xmax)));
    const int r0 = std::max(0, static_cast<int>(std::floor(ymin)));
    const int r1 = std::min(grid - 1, static_cast<int>(std::ceil(ymax)));
    const int nv = static_cast<int>(verts.size());

    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const double px = c, py = r;
            bool pos = false, neg = false;
            for (int i = 0; i < nv; ++i) {
                auto [ax, ay] = verts[i];
                auto [bx, by] = verts[(i + 1) % nv];
                double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
                if (cross > 0) pos = true;
                if (cross < 0) neg = true;
            }
            if (!(pos && neg)) p.image.at(r, c) = 1.0;
        }
    }
    return p;
}

std::vector<double> integer_rotation_pool() {
    std::vector<double> pool(360);
    for (int i = 0; i < 360; ++i) pool[i] = i;
    return pool;
}

std::vector<double> half_degree_rotation_pool() {
    std::vector<double> pool(360);
    for (int i = 0; i < 360; ++i) pool[i] = i + 0.5;
    return pool;
}

std::vector<Phantom> sample_dataset(uint64_t seed, int n_per_shape, int grid,
                                    const std::vector<double>& rotation_pool) {
    if (rotation_pool.empty())
        throw SpecOutOfRange("rotation pool must be non-empty");
    auto [cx, cy] = dataset_center(grid);
    std::vector<Phantom> out;
    out.reserve(3 * static_cast<size_t>(n_per_shape));
    const std::array<ShapeKind, 3> kinds = {
        ShapeKind::Parallelogram, ShapeKind::Triangle, ShapeKind::Pentagon};
    for (int ki = 0; ki < 3; ++ki) {
        for (int i = 0; i < n_per_shape; ++i) {
            Rng rng(mix_seed(seed, static_cast<uint64_t>(ki),
                             static_cast<uint64_t>(i)));
            ShapeSpec spec;
            spec.kind = kinds[ki];
            auto range = dataset_radius_range(spec.kind, grid);
            spec.radius = rng.uniform(range.lo, range.hi);
            spec.rotation = rotation_pool[rng.uniform_int(
                0, static_cast<int>(rotation_pool.size()) - 1)];
            spec.cx = cx;
            spec.cy = cy;
            Phantom p = generate_phantom(spec, grid);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%s-%04d", shape_name(spec.kind), i);
            p.id = buf;
            out.push_back(std::move(p));
        }
    }
    return out;
}

void write_dataset(const std::filesystem::path& dir,
                   const std::vector<Phantom>& phantoms, uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "images");
    std::ofstream manifest(dir / "manifest.tsv", std::ios::trunc);
    manifest << "id\tkind\tradius\trotation\tcx\tcy\tseed\n";
    char buf[256];
    for (const auto& p : phantoms) {
        std::snprintf(buf, sizeof(buf), "%s\t%s\t%.17g\t%.17g\t%.17g\t%.17g\t%llu\n",
                      p.id.c_str(), shape_name(p.spec.kind), p.spec.radius,
                      p.spec.rotation, p.spec.cx, p.spec.cy,
                      static_cast<unsigned long long>(seed));
        manifest << buf;
        write_image(dir / "images" / p.id, p.image,
                    {{"phantom_id", p.id}, {"kind", shape_name(p.spec.kind)}});
    }
}

std::vector<Phantom> read_dataset(const std::filesystem::path& dir) {
    std::ifstream manifest(dir / "manifest.tsv");
    if (!manifest)
        throw MissingRequired("no manifest.tsv under " + dir.string());
    std::vector<Phantom> out;
    std::string line;
    std::getline(manifest, line);  // header row
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string id, kind, radius, rotation, cx, cy, seed;
        std::getline(row, id, '\t');
        std::getline(row, kind, '\t');
        std::getline(row, radius, '\t');
        std::getline(row, rotation, '\t');
        std::getline(row, cx, '\t');
        std::getline(row, cy, '\t');
        std::getline(row, seed, '\t');
        Phantom p;
        p.id = id;
        p.spec.kind = shape_from_name(kind);
        p.spec.radius = std::stod(radius);
        p.spec.rotation = std::stod(rotation);
        p.spec.cx = std::stod(cx);
        p.spec.cy = std::stod(cy);
        p.image = read_image(dir / "images" / id);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace ctoed
