#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ctoed/grid.hpp"

namespace ctoed {

enum class ShapeKind { Parallelogram, Triangle, Pentagon };

const char* shape_name(ShapeKind k);
ShapeKind shape_from_name(const std::string& name);

/// Convex polygon phantom described by the circumscribed-circle radius,
/// rotation and center.  Reference ranges are given at grid 240 and scale
/// linearly with the grid side.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Triangle;
    double radius = 0.0;        // pixels, circumscribed circle
    double rotation = 0.0;      // degrees in [0, 360)
    double cx = 0.0, cy = 0.0;  // center, pixel coordinates
};

struct RadiusRange {
    double lo = 0.0, hi = 0.0;
};

/// Dataset parameter table, scaled from the reference grid of 240.
RadiusRange dataset_radius_range(ShapeKind kind, int grid);
std::pair<double, double> dataset_center(int grid);

struct Phantom {
    Image image;  // binary {0,1} raster
    ShapeSpec spec;
    std::string id;
};

/// Vertices of the shape in pixel coordinates (rotated, translated).
/// Parallelogram = rhombus with a 60 degree interior angle, long diagonal
/// along the unrotated x axis; triangle and pentagon are regular with one
/// vertex pointing up before rotation.
std::vector<std::pair<double, double>> shape_vertices(const ShapeSpec& spec);

/// Rasterizes the polygon with a pixel-center point-in-polygon test.
/// Throws SpecOutOfRange when radius/center leave the dataset table bounds,
/// ShapeClipped when a vertex falls outside [0, grid-1].
Phantom generate_phantom(const ShapeSpec& spec, int grid);

/// n_per_shape phantoms per kind; radii uniform over the dataset ranges,
/// rotations drawn from the pool.  Reproducible from the seed.
std::vector<Phantom> sample_dataset(uint64_t seed, int n_per_shape, int grid,
                                    const std::vector<double>& rotation_pool);

/// The two pools realizing "rotations unseen during training": integer
/// degrees for training, half-degree offsets for validation.
std::vector<double> integer_rotation_pool();
std::vector<double> half_degree_rotation_pool();

// Dataset persistence: manifest.tsv (id, kind, radius, rotation, cx, cy,
// seed) plus one image container per phantom under images/.
void write_dataset(const std::filesystem::path& dir,
                   const std::vector<Phantom>& phantoms, uint64_t seed);
std::vector<Phantom> read_dataset(const std::filesystem::path& dir);

}  // namespace ctoed
