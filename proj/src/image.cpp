#include "topoblend/image.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "topoblend/errors.hpp"

namespace topoblend {

namespace {

// Skip whitespace and '#' comment lines between header tokens.
size_t skip_separators(const std::string& s, size_t pos) {
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    return pos;
}

long read_int(const std::string& s, size_t& pos, const std::string& origin) {
    pos = skip_separators(s, pos);
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start)
        throw std::runtime_error(origin + ": malformed PGM header");
    return std::stol(s.substr(start, pos - start));
}

}  // namespace

GrayImage parse_pgm(const std::string& bytes, const std::string& origin) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw std::runtime_error(origin + ": not a P2/P5 PGM file");
    const bool binary = bytes[1] == '5';
    size_t pos = 2;
    const long w = read_int(bytes, pos, origin);
    const long h = read_int(bytes, pos, origin);
    const long maxval = read_int(bytes, pos, origin);
    if (w <= 0 || h <= 0)
        throw std::domain_error(origin + ": empty image");
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error(origin + ": only 8-bit PGM supported");

    GrayImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(size_t(w) * h);

    if (binary) {
        ++pos;  // single whitespace byte after maxval
        if (bytes.size() - pos < img.pixels.size())
            throw std::runtime_error(origin + ": truncated PGM payload");
        for (size_t i = 0; i < img.pixels.size(); ++i)
            img.pixels[i] = static_cast<std::uint8_t>(bytes[pos + i]);
    } else {
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            const long v = read_int(bytes, pos, origin);
            if (v < 0 || v > maxval)
                throw std::runtime_error(origin + ": pixel value out of range");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pgm(ss.str(), path.string());
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError("short write: " + path.string());
}

}  // namespace topoblend
