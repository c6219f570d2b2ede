#include "rici/descriptor_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "rici/errors.hpp"

namespace rici {

std::string to_string(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::Rici:
            return "rici";
        case DescriptorKind::SpinImage:
            return "spin-image";
        case DescriptorKind::ShapeContext:
            return "shape-context";
    }
    return "unknown";
}

namespace {

struct Header {
    DescriptorKind kind{DescriptorKind::Rici};
    std::map<std::string, std::string> values;

    const std::string& get(const std::string& key) const {
        const auto it = values.find(key);
        if (it == values.end()) {
            throw DataError("descriptor header lacks '" + key + "'");
        }
        return it->second;
    }
    double number(const std::string& key) const {
        const std::string& text = get(key);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw DataError("descriptor header value '" + key + "' is not a number");
        }
        return v;
    }
    int integer(const std::string& key) const {
        const double v = number(key);
        if (v != std::floor(v) || v < 1 || v > 1e6) {
            throw DataError("descriptor header value '" + key + "' is not a positive integer");
        }
        return static_cast<int>(v);
    }
};

Header parse_header(const std::string& line) {
    std::istringstream in(line);
    std::string hash;
    std::string name;
    if (!(in >> hash >> name) || hash != "#") {
        throw DataError("descriptor file must start with '# <method> ...'");
    }
    Header h;
    if (name == "rici") {
        h.kind = DescriptorKind::Rici;
    } else if (name == "spin-image") {
        h.kind = DescriptorKind::SpinImage;
    } else if (name == "shape-context") {
        h.kind = DescriptorKind::ShapeContext;
    } else {
        throw DataError("unknown descriptor method '" + name + "'");
    }
    std::string pair;
    while (in >> pair) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            throw DataError("malformed header field '" + pair + "'");
        }
        h.values[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return h;
}

Header read_header(std::istream& in, DescriptorKind expected) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty descriptor file");
    }
    Header h = parse_header(line);
    if (h.kind != expected) {
        throw DataError("expected a " + to_string(expected) + " descriptor, found " + to_string(h.kind));
    }
    return h;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        auto end = line.find(',', start);
        if (end == std::string::npos) {
            end = line.size();
        }
        std::string_view field(line.data() + start, end - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r' || field.back() == '\t')) field.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
            throw DataError("malformed descriptor value '" + std::string(field) + "'");
        }
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

std::vector<std::vector<double>> read_rows(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r" || line.front() == '#') {
            continue;
        }
        rows.push_back(parse_row(line));
    }
    return rows;
}

template <typename Grid>
void read_grid(std::istream& in, Grid& out, bool integral) {
    const auto rows = read_rows(in);
    const auto n = static_cast<std::size_t>(out.resolution);
    if (rows.size() != n) {
        throw DataError("expected " + std::to_string(n) + " descriptor rows, found " +
                        std::to_string(rows.size()));
    }
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != n) {
            throw DataError("descriptor row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " values, expected " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) {
            const double v = rows[r][c];
            if (v < 0 || (integral && v != std::floor(v))) {
                throw DataError("descriptor bins must be non-negative" +
                                std::string(integral ? " integers" : ""));
            }
            out.bins[r * n + c] = static_cast<typename decltype(out.bins)::value_type>(v);
        }
    }
}

std::string exact(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

void write_gray(std::ostream& out, int n, const std::vector<std::uint8_t>& pixels_bottom_up) {
    out << "P5\n" << n << ' ' << n << "\n255\n";
    for (int row = n - 1; row >= 0; --row) {
        out.write(reinterpret_cast<const char*>(&pixels_bottom_up[static_cast<std::size_t>(row * n)]), n);
    }
}

}  // namespace

DescriptorKind peek_descriptor_kind(std::istream& in) {
    const auto pos = in.tellg();
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty descriptor file");
    }
    const Header h = parse_header(line);
    in.clear();
    in.seekg(pos);
    return h.kind;
}

void write_csv(std::ostream& out, const RiciDescriptor& d) {
    out << "# rici resolution=" << d.resolution << " support_radius=" << exact(d.support_radius) << '\n';
    for (int r = 0; r < d.resolution; ++r) {
        for (int c = 0; c < d.resolution; ++c) {
            out << (c ? "," : "") << d.at(r, c);
        }
        out << '\n';
    }
}

void write_csv(std::ostream& out, const SpinImageDescriptor& d) {
    out << "# spin-image resolution=" << d.resolution << " support_radius=" << exact(d.support_radius)
        << '\n';
    out << std::setprecision(9);
    for (int r = 0; r < d.resolution; ++r) {
        for (int c = 0; c < d.resolution; ++c) {
            out << (c ? "," : "") << d.at(r, c);
        }
        out << '\n';
    }
}

void write_csv(std::ostream& out, const ShapeContextDescriptor& d) {
    const auto& p = d.params;
    out << "# shape-context J=" << p.azimuth_bins << " K=" << p.elevation_bins << " L=" << p.radial_bins
        << " r_min=" << exact(p.r_min) << " r_max=" << exact(p.r_max) << " columns=j,k,l,value\n";
    out << std::setprecision(9);
    for (int j = 0; j < p.azimuth_bins; ++j) {
        for (int k = 0; k < p.elevation_bins; ++k) {
            for (int l = 0; l < p.radial_bins; ++l) {
                out << j << ',' << k << ',' << l << ',' << d.at(j, k, l) << '\n';
            }
        }
    }
}

RiciDescriptor read_rici_csv(std::istream& in) {
    const Header h = read_header(in, DescriptorKind::Rici);
    RiciDescriptor d(h.integer("resolution"), h.number("support_radius"));
    read_grid(in, d, true);
    return d;
}

SpinImageDescriptor read_spin_image_csv(std::istream& in) {
    const Header h = read_header(in, DescriptorKind::SpinImage);
    SpinImageDescriptor d(h.integer("resolution"), h.number("support_radius"));
    read_grid(in, d, false);
    return d;
}

ShapeContextDescriptor read_shape_context_csv(std::istream& in) {
    const Header h = read_header(in, DescriptorKind::ShapeContext);
    ShapeContextParams p;
    p.azimuth_bins = h.integer("J");
    p.elevation_bins = h.integer("K");
    p.radial_bins = h.integer("L");
    p.r_min = h.number("r_min");
    p.r_max = h.number("r_max");
    ShapeContextDescriptor d(p);
    const auto rows = read_rows(in);
    if (rows.size() != p.bin_count()) {
        throw DataError("expected " + std::to_string(p.bin_count()) + " shape context rows, found " +
                        std::to_string(rows.size()));
    }
    for (const auto& row : rows) {
        if (row.size() != 4) {
            throw DataError("shape context rows must be j,k,l,value");
        }
        const int j = static_cast<int>(row[0]);
        const int k = static_cast<int>(row[1]);
        const int l = static_cast<int>(row[2]);
        if (j < 0 || j >= p.azimuth_bins || k < 0 || k >= p.elevation_bins || l < 0 ||
            l >= p.radial_bins || row[3] < 0) {
            throw DataError("shape context row out of range");
        }
        d.bins[d.index(j, k, l)] = static_cast<float>(row[3]);
    }
    return d;
}

void write_pgm(std::ostream& out, const RiciDescriptor& d) {
    std::vector<std::uint8_t> pixels(d.bins.size());
    std::transform(d.bins.begin(), d.bins.end(), pixels.begin(),
                   [](std::uint32_t v) { return static_cast<std::uint8_t>(std::min<std::uint32_t>(v, 255)); });
    write_gray(out, d.resolution, pixels);
}

void write_pgm(std::ostream& out, const SpinImageDescriptor& d) {
    const float max_value = d.bins.empty() ? 0.0f : *std::max_element(d.bins.begin(), d.bins.end());
    std::vector<std::uint8_t> pixels(d.bins.size(), 0);
    if (max_value > 0.0f) {
        std::transform(d.bins.begin(), d.bins.end(), pixels.begin(), [&](float v) {
            return static_cast<std::uint8_t>(std::lround(255.0f * v / max_value));
        });
    }
    write_gray(out, d.resolution, pixels);
}

}  // namespace rici
