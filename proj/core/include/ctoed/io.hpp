#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ctoed/grid.hpp"
#include "ctoed/sinogram.hpp"

namespace ctoed {

/// Ordered key = value header, shared by the image/sinogram container,
/// checkpoints and run configs.  Grammar: one `key = value` per line,
/// `#` starts a comment, keys are dotted lowercase identifiers.
using HeaderMap = std::vector<std::pair<std::string, std::string>>;

std::string header_get(const HeaderMap& h, const std::string& key);
std::string header_get_or(const HeaderMap& h, const std::string& key,
                          const std::string& fallback);
bool header_has(const HeaderMap& h, const std::string& key);

HeaderMap parse_header_text(const std::string& text);
std::string format_header_text(const HeaderMap& h);

HeaderMap read_header_file(const std::filesystem::path& path);
void write_header_file(const std::filesystem::path& path, const HeaderMap& h);

// ---------------------------------------------------------------------------
// Image / sinogram container: `<base>.hdr` (text header) plus `<base>.raw`
// (little-endian float32 payload, row-major).  Round-trips are bit-exact.
// ---------------------------------------------------------------------------

void write_image(const std::filesystem::path& base, const Image& img,
                 const HeaderMap& extra = {});
Image read_image(const std::filesystem::path& base, HeaderMap* header = nullptr);

void write_sinogram(const std::filesystem::path& base, const Sinogram& sino,
                    const HeaderMap& extra = {});
Sinogram read_sinogram(const std::filesystem::path& base,
                       HeaderMap* header = nullptr);

/// 3-D float stack used by the experimental-scan adapter
/// (`depth` projections of `rows` x `cols`).
struct FloatStack {
    int depth = 0, rows = 0, cols = 0;
    std::vector<float> data;  // depth * rows * cols
    float at(int d, int r, int c) const {
        return data[(static_cast<size_t>(d) * rows + r) * cols + c];
    }
};

void write_float_stack(const std::filesystem::path& base, const FloatStack& s,
                       const HeaderMap& extra = {});
FloatStack read_float_stack(const std::filesystem::path& base,
                            HeaderMap* header = nullptr);

std::vector<float> read_raw_payload(const std::filesystem::path& raw_path,
                                    size_t expected_count);
void write_raw_payload(const std::filesystem::path& raw_path,
                       const std::vector<float>& data);

}  // namespace ctoed
