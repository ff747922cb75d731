#include "ctoed/io.hpp"

#include <fstream>
#include <sstream>

#include "ctoed/errors.hpp"

namespace ctoed {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string header_get(const HeaderMap& h, const std::string& key) {
    for (const auto& [k, v] : h)
        if (k == key) return v;
    throw MissingRequired("missing header key: " + key);
}

std::string header_get_or(const HeaderMap& h, const std::string& key,
                          const std::string& fallback) {
    for (const auto& [k, v] : h)
        if (k == key) return v;
    return fallback;
}

bool header_has(const HeaderMap& h, const std::string& key) {
    for (const auto& [k, v] : h)
        if (k == key) return true;
    return false;
}

HeaderMap parse_header_text(const std::string& text) {
    HeaderMap out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigTypeError("malformed header line (expected key = value): " + line);
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

std::string format_header_text(const HeaderMap& h) {
    std::string out;
    for (const auto& [k, v] : h) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

HeaderMap read_header_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingRequired("cannot open header file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_header_text(buf.str());
}

void write_header_file(const std::filesystem::path& path, const HeaderMap& h) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw NetworkError("cannot write header file: " + path.string());
    out << format_header_text(h);
}

std::vector<float> read_raw_payload(const std::filesystem::path& raw_path,
                                    size_t expected_count) {
    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw MissingRequired("cannot open payload file: " + raw_path.string());
    std::vector<float> data(expected_count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(expected_count * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != expected_count * sizeof(float))
        throw ShapeMismatch("payload size mismatch in " + raw_path.string());
    return data;
}

void write_raw_payload(const std::filesystem::path& raw_path,
                       const std::vector<float>& data) {
    std::ofstream out(raw_path, std::ios::binary | std::ios::trunc);
    if (!out) throw NetworkError("cannot write payload file: " + raw_path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
}

namespace {

std::filesystem::path hdr_path(const std::filesystem::path& base) {
    auto p = base;
    p += ".hdr";
    return p;
}
std::filesystem::path raw_path_of(const std::filesystem::path& base) {
    auto p = base;
    p += ".raw";
    return p;
}

std::vector<float> to_f32(const std::vector<double>& v) {
    std::vector<float> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
    return out;
}

}  // namespace

void write_image(const std::filesystem::path& base, const Image& img,
                 const HeaderMap& extra) {
    HeaderMap h{{"container", "image"},
                {"dtype", "float32"},
                {"byte_order", "little-endian"},
                {"order", "row-major"},
                {"rows", std::to_string(img.n)},
                {"cols", std::to_string(img.n)}};
    h.insert(h.end(), extra.begin(), extra.end());
    write_header_file(hdr_path(base), h);
    write_raw_payload(raw_path_of(base), to_f32(img.v));
}

Image read_image(const std::filesystem::path& base, HeaderMap* header) {
    HeaderMap h = read_header_file(hdr_path(base));
    if (header_get(h, "container") != "image")
        throw ShapeMismatch("not an image container: " + base.string());
    int rows = std::stoi(header_get(h, "rows"));
    int cols = std::stoi(header_get(h, "cols"));
    if (rows != cols) throw ShapeMismatch("image container is not square");
    auto data = read_raw_payload(raw_path_of(base),
                                 static_cast<size_t>(rows) * cols);
    Image img(rows);
    for (size_t i = 0; i < data.size(); ++i) img.v[i] = data[i];
    if (header) *header = std::move(h);
    return img;
}

void write_sinogram(const std::filesystem::path& base, const Sinogram& sino,
                    const HeaderMap& extra) {
    std::string angle_list;
    for (size_t i = 0; i < sino.angles.size(); ++i) {
        if (i) angle_list += ',';
        angle_list += std::to_string(sino.angles[i]);
    }
    HeaderMap h{{"container", "sinogram"},
                {"dtype", "float32"},
                {"byte_order", "little-endian"},
                {"order", "row-major"},
                {"rows", std::to_string(sino.n_angles())},
                {"cols", std::to_string(sino.n_detector)},
                {"angles", angle_list},
                {"detector_spacing", "1"},
                {"eta", std::to_string(sino.noise_level)},
                {"seed", std::to_string(sino.noise_seed)}};
    h.insert(h.end(), extra.begin(), extra.end());
    write_header_file(hdr_path(base), h);
    write_raw_payload(raw_path_of(base), to_f32(sino.data));
}

Sinogram read_sinogram(const std::filesystem::path& base, HeaderMap* header) {
    HeaderMap h = read_header_file(hdr_path(base));
    if (header_get(h, "container") != "sinogram")
        throw ShapeMismatch("not a sinogram container: " + base.string());
    int rows = std::stoi(header_get(h, "rows"));
    int cols = std::stoi(header_get(h, "cols"));

    std::vector<int> angles;
    std::istringstream alist(header_get(h, "angles"));
    std::string tok;
    while (std::getline(alist, tok, ','))
        if (!tok.empty()) angles.push_back(std::stoi(tok));
    if (static_cast<int>(angles.size()) != rows)
        throw ShapeMismatch("angle list does not match row count");

    Sinogram sino(angles, cols);
    auto data = read_raw_payload(raw_path_of(base),
                                 static_cast<size_t>(rows) * cols);
    for (size_t i = 0; i < data.size(); ++i) sino.data[i] = data[i];
    sino.noise_level = std::stod(header_get_or(h, "eta", "0"));
    sino.noise_seed = std::stoull(header_get_or(h, "seed", "0"));
    if (header) *header = std::move(h);
    return sino;
}

void write_float_stack(const std::filesystem::path& base, const FloatStack& s,
                       const HeaderMap& extra) {
    HeaderMap h{{"container", "stack"},
                {"dtype", "float32"},
                {"byte_order", "little-endian"},
                {"order", "row-major"},
                {"depth", std::to_string(s.depth)},
                {"rows", std::to_string(s.rows)},
                {"cols", std::to_string(s.cols)}};
    h.insert(h.end(), extra.begin(), extra.end());
    write_header_file(hdr_path(base), h);
    write_raw_payload(raw_path_of(base), s.data);
}

FloatStack read_float_stack(const std::filesystem::path& base,
                            HeaderMap* header) {
    HeaderMap h = read_header_file(hdr_path(base));
    if (header_get(h, "container") != "stack")
        throw ShapeMismatch("not a stack container: " + base.string());
    FloatStack s;
    s.depth = std::stoi(header_get(h, "depth"));
    s.rows = std::stoi(header_get(h, "rows"));
    s.cols = std::stoi(header_get(h, "cols"));
    s.data = read_raw_payload(raw_path_of(base), static_cast<size_t>(s.depth) *
                                                     s.rows * s.cols);
    if (header) *header = std::move(h);
    return s;
}

}  // namespace ctoed
