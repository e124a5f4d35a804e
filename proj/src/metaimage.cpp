#include "bgreg/metaimage.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace bgreg {

namespace {

// Host is assumed little-endian; payloads are 32-bit floats.
static_assert(std::endian::native == std::endian::little,
              "MetaImage payloads are written little-endian");

void write_header_and_payload(const std::string &path, const GridInfo &g,
                              int channels, const std::vector<double> &data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "ObjectType = Image\n";
    out << "NDims = " << g.ndim() << "\n";
    out << "DimSize =";
    for (int d : g.dims) out << " " << d;
    out << "\n";
    out << "ElementSpacing =";
    for (double s : g.spacing) out << " " << s;
    out << "\n";
    out << "ElementNumberOfChannels = " << channels << "\n";
    out << "ElementType = MET_FLOAT\n";
    out << "ElementDataFile = LOCAL\n";
    std::vector<float> buf(data.size());
    std::transform(data.begin(), data.end(), buf.begin(),
                   [](double v) { return static_cast<float>(v); });
    out.write(reinterpret_cast<const char *>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw IoError("write failed: " + path);
}

struct Header {
    GridInfo grid;
    int channels = 1;
    std::string data_file;  // "LOCAL" or a filename relative to the header
    std::streampos payload_offset = 0;
};

Header parse_header(std::ifstream &in, const std::string &path) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("malformed header line in " + path);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        kv[key] = val;
        if (key == "ElementDataFile") break;
    }
    auto require = [&](const std::string &key) -> const std::string & {
        const auto it = kv.find(key);
        if (it == kv.end()) throw IoError("missing " + key + " in " + path);
        return it->second;
    };

    Header h;
    const int ndims = std::stoi(require("NDims"));
    if (ndims != 2 && ndims != 3) throw IoError("unsupported NDims in " + path);
    std::vector<int> dims;
    {
        std::istringstream ss(require("DimSize"));
        int v;
        while (ss >> v) dims.push_back(v);
    }
    if (static_cast<int>(dims.size()) != ndims)
        throw IoError("DimSize/NDims mismatch in " + path);
    std::vector<double> spacing(ndims, 1.0);
    if (kv.count("ElementSpacing")) {
        std::istringstream ss(kv["ElementSpacing"]);
        for (double &s : spacing)
            if (!(ss >> s)) throw IoError("bad ElementSpacing in " + path);
    }
    try {
        h.grid = make_grid(dims, spacing);
    } catch (const std::invalid_argument &e) {
        throw IoError(std::string(e.what()) + " in " + path);
    }
    if (require("ElementType") != "MET_FLOAT")
        throw IoError("only MET_FLOAT payloads are supported: " + path);
    if (kv.count("ElementNumberOfChannels"))
        h.channels = std::stoi(kv["ElementNumberOfChannels"]);
    h.data_file = require("ElementDataFile");
    h.payload_offset = in.tellg();
    return h;
}

std::vector<double> read_payload(std::ifstream &in, const Header &h,
                                 const std::string &path) {
    const std::size_t count = h.grid.voxel_count() * h.channels;
    std::vector<float> buf(count);
    if (h.data_file == "LOCAL") {
        in.read(reinterpret_cast<char *>(buf.data()),
                static_cast<std::streamsize>(count * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
            throw IoError("truncated payload in " + path);
    } else {
        const auto raw_path =
            std::filesystem::path(path).parent_path() / h.data_file;
        std::ifstream raw(raw_path, std::ios::binary);
        if (!raw) throw IoError("cannot open raw file: " + raw_path.string());
        raw.read(reinterpret_cast<char *>(buf.data()),
                 static_cast<std::streamsize>(count * sizeof(float)));
        if (static_cast<std::size_t>(raw.gcount()) != count * sizeof(float))
            throw IoError("truncated payload in " + raw_path.string());
    }
    std::vector<double> out(count);
    std::transform(buf.begin(), buf.end(), out.begin(),
                   [](float v) { return static_cast<double>(v); });
    return out;
}

Header open_and_parse(std::ifstream &in, const std::string &path) {
    in.open(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return parse_header(in, path);
}

}  // namespace

void write_metaimage(const std::string &path, const ScalarImage &img) {
    write_header_and_payload(path, img.grid, 1, img.data);
}

void write_metaimage(const std::string &path, const VectorField &f) {
    write_header_and_payload(path, f.grid, f.ndim(), f.data);
}

ScalarImage read_scalar_metaimage(const std::string &path) {
    std::ifstream in;
    const Header h = open_and_parse(in, path);
    if (h.channels != 1)
        throw IoError("expected a scalar image (1 channel): " + path);
    ScalarImage img(h.grid);
    img.data = read_payload(in, h, path);
    return img;
}

VectorField read_vector_metaimage(const std::string &path) {
    std::ifstream in;
    const Header h = open_and_parse(in, path);
    if (h.channels != h.grid.ndim())
        throw IoError("expected a vector field (NDims channels): " + path);
    VectorField f(h.grid);
    f.data = read_payload(in, h, path);
    return f;
}

int metaimage_channels(const std::string &path) {
    std::ifstream in;
    return open_and_parse(in, path).channels;
}

}  // namespace bgreg
