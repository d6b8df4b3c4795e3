#include "sharpcontour/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sharpcontour {

MaskGrid MaskGrid::zeros(int width, int height) {
    MaskGrid m;
    m.width = width;
    m.height = height;
    m.values = Eigen::ArrayXXd::Zero(height, width);
    return m;
}

Point2 cell_center(const MaskGrid& m, int row, int col) {
    return Point2(col + 0.5, m.height - row - 0.5);
}

// ---------------------------------------------------------------------------
// Marching squares
// ---------------------------------------------------------------------------

namespace {

// The node lattice is the cell-centre grid padded with one ring of
// background (value 0) so every contour closes. Node (R, C) maps to cell
// (R-1, C-1).
struct NodeGrid {
    const MaskGrid& m;

    double value(int R, int C) const {
        if (R >= 1 && R <= m.height && C >= 1 && C <= m.width) {
            return m.at(R - 1, C - 1);
        }
        return 0.0;
    }
    Point2 position(int R, int C) const {
        return Point2(C - 0.5, m.height - R + 0.5);
    }
};

// Edge between adjacent nodes; bit 0 distinguishes horizontal
// ((R,C)-(R,C+1)) from vertical ((R,C)-(R+1,C)).
int64_t edge_key(int R, int C, int stride, bool vertical) {
    return (static_cast<int64_t>(R) * stride + C) * 2 + (vertical ? 1 : 0);
}

}  // namespace

std::vector<Polygon> mask_to_contours(const MaskGrid& m, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("mask_to_contours: threshold must be in (0,1)");
    }
    std::vector<Polygon> rings;
    if (m.empty()) {
        return rings;
    }

    const NodeGrid nodes{m};
    const int stride = m.width + 2;
    auto inside = [&](int R, int C) { return nodes.value(R, C) > threshold; };

    // One crossing point per crossed node edge, computed once from the
    // canonical node order so both incident squares agree bit-exactly.
    std::map<int64_t, Point2> crossing;
    auto cross_point = [&](int R, int C, bool vertical) {
        const int R2 = vertical ? R + 1 : R;
        const int C2 = vertical ? C : C + 1;
        const double v1 = nodes.value(R, C);
        const double v2 = nodes.value(R2, C2);
        const double t = (threshold - v1) / (v2 - v1);
        const Point2 p1 = nodes.position(R, C);
        const Point2 p2 = nodes.position(R2, C2);
        return Point2(p1 + t * (p2 - p1));
    };

    // Directed connectivity: the contour enters a square through its entry
    // edges and leaves through its exit edges, with the above-threshold
    // region kept on the left (math coordinates). Entry/exit is decided
    // combinatorially from which node of the edge is inside, so shared
    // edges chain consistently even for degenerate crossings.
    std::map<int64_t, int64_t> next;
    auto link = [&](int64_t from, int64_t to) { next.emplace(from, to); };

    for (int R = 0; R <= m.height; ++R) {
        for (int C = 0; C <= m.width; ++C) {
            const bool tl = inside(R, C);
            const bool tr = inside(R, C + 1);
            const bool br = inside(R + 1, C + 1);
            const bool bl = inside(R + 1, C);
            const int code = (tl << 3) | (tr << 2) | (br << 1) | bl;
            if (code == 0 || code == 15) {
                continue;
            }

            const int64_t top = edge_key(R, C, stride, false);
            const int64_t bottom = edge_key(R + 1, C, stride, false);
            const int64_t left = edge_key(R, C, stride, true);
            const int64_t right = edge_key(R, C + 1, stride, true);

            if (tl != tr && !crossing.count(top)) crossing.emplace(top, cross_point(R, C, false));
            if (bl != br && !crossing.count(bottom))
                crossing.emplace(bottom, cross_point(R + 1, C, false));
            if (tl != bl && !crossing.count(left)) crossing.emplace(left, cross_point(R, C, true));
            if (tr != br && !crossing.count(right))
                crossing.emplace(right, cross_point(R, C + 1, true));

            if (code == 0b1010 || code == 0b0101) {
                // Saddle: two segments; the pairing follows the cell-centre
                // average.
                const double centre = (nodes.value(R, C) + nodes.value(R, C + 1) +
                                       nodes.value(R + 1, C + 1) + nodes.value(R + 1, C)) /
                                      4.0;
                const bool centre_inside = centre > threshold;
                if (code == 0b1010) {  // TL and BR inside
                    if (centre_inside) {
                        link(right, top);
                        link(left, bottom);
                    } else {
                        link(left, top);
                        link(right, bottom);
                    }
                } else {  // TR and BL inside
                    if (centre_inside) {
                        link(top, left);
                        link(bottom, right);
                    } else {
                        link(top, right);
                        link(bottom, left);
                    }
                }
                continue;
            }

            // Exactly two crossed sides: entry iff the contour's travel
            // direction through that edge points into this square.
            int64_t entry = -1;
            int64_t exit = -1;
            auto classify = [&](int64_t key, bool is_entry) {
                (is_entry ? entry : exit) = key;
            };
            if (tl != tr) classify(top, tr);        // entry iff right node inside
            if (bl != br) classify(bottom, bl);     // entry iff left node inside
            if (tl != bl) classify(left, tl);       // entry iff upper node inside
            if (tr != br) classify(right, br);      // entry iff lower node inside
            link(entry, exit);
        }
    }

    // Chain directed segments into closed rings; std::map keeps the walk
    // order deterministic.
    while (!next.empty()) {
        const int64_t start = next.begin()->first;
        std::vector<Point2> pts;
        int64_t cur = start;
        do {
            auto it = next.find(cur);
            if (it == next.end()) {
                throw std::logic_error("mask_to_contours: broken contour chain");
            }
            pts.push_back(crossing.at(cur));
            const int64_t to = it->second;
            next.erase(it);
            cur = to;
        } while (cur != start);

        // Drop consecutive duplicates (crossings that collapsed onto nodes).
        std::vector<Point2> dedup;
        for (const Point2& p : pts) {
            if (dedup.empty() || (p - dedup.back()).norm() >= 1e-9) {
                dedup.push_back(p);
            }
        }
        while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() < 1e-9) {
            dedup.pop_back();
        }
        if (dedup.size() < 8) {
            continue;
        }
        Polygon ring;
        ring.vertices.resize(2, static_cast<int>(dedup.size()));
        for (size_t i = 0; i < dedup.size(); ++i) {
            ring.vertices.col(static_cast<int>(i)) = dedup[i];
        }
        if (bbox(ring).diagonal() < 4.0) {
            continue;
        }
        rings.push_back(std::move(ring));
    }
    return rings;
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

MaskGrid rasterize(std::span<const Polygon> rings, int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("rasterize: grid dimensions must be >= 1");
    }
    MaskGrid out = MaskGrid::zeros(width, height);
    std::vector<double> xs;
    for (int r = 0; r < height; ++r) {
        const double y = height - r - 0.5;
        xs.clear();
        for (const Polygon& ring : rings) {
            const int n = ring.size();
            for (int i = 0; i < n; ++i) {
                const Point2 a = ring.vertex(i);
                const Point2 b = ring.vertex((i + 1) % n);
                if ((a.y() > y) != (b.y() > y)) {
                    xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
                }
            }
        }
        std::sort(xs.begin(), xs.end());
        for (size_t i = 0; i + 1 < xs.size(); i += 2) {
            // Cell centres strictly inside the span.
            int c0 = static_cast<int>(std::floor(xs[i] - 0.5)) + 1;
            int c1 = static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1;
            c0 = std::max(c0, 0);
            c1 = std::min(c1, width - 1);
            for (int c = c0; c <= c1; ++c) {
                out.at(r, c) = 1.0;
            }
        }
    }
    return out;
}

MaskGrid rasterize(const Polygon& p, int width, int height) {
    return rasterize(std::span<const Polygon>(&p, 1), width, height);
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void pgm_fail(size_t offset, const std::string& what) {
    throw std::runtime_error("pgm parse error at byte " + std::to_string(offset) + ": " + what);
}

struct PgmReader {
    const std::string& bytes;
    size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }

    void skip_space_and_comments() {
        while (!eof()) {
            const char c = bytes[pos];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else if (c == '#') {
                while (!eof() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const char* what) {
        skip_space_and_comments();
        if (eof() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            pgm_fail(pos, std::string("expected ") + what);
        }
        long value = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > 1 << 30) pgm_fail(pos, std::string(what) + " out of range");
            ++pos;
        }
        return static_cast<int>(value);
    }
};

}  // namespace

MaskGrid parse_pgm(const std::string& bytes) {
    PgmReader r{bytes};
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        pgm_fail(0, "expected P2 or P5 magic");
    }
    const bool binary = bytes[1] == '5';
    r.pos = 2;
    const int width = r.read_int("width");
    const int height = r.read_int("height");
    const int maxval = r.read_int("maxval");
    if (width < 1 || height < 1) {
        pgm_fail(r.pos, "non-positive dimensions");
    }
    if (maxval != 255) {
        pgm_fail(r.pos, "unsupported maxval " + std::to_string(maxval) + " (only 255)");
    }

    MaskGrid m = MaskGrid::zeros(width, height);
    const long total = static_cast<long>(width) * height;
    if (binary) {
        if (r.eof() || !std::isspace(static_cast<unsigned char>(bytes[r.pos]))) {
            pgm_fail(r.pos, "expected single whitespace before raster data");
        }
        ++r.pos;
        const long available = static_cast<long>(bytes.size() - r.pos);
        if (available < total) {
            pgm_fail(bytes.size(), "expected " + std::to_string(total) + " pixel bytes, got " +
                                       std::to_string(available));
        }
        for (int row = 0; row < height; ++row) {
            for (int col = 0; col < width; ++col) {
                m.at(row, col) = static_cast<unsigned char>(bytes[r.pos++]) / 255.0;
            }
        }
    } else {
        for (long i = 0; i < total; ++i) {
            r.skip_space_and_comments();
            if (r.eof()) {
                pgm_fail(bytes.size(), "expected " + std::to_string(total) +
                                           " pixel values, got " + std::to_string(i));
            }
            const int v = r.read_int("pixel value");
            if (v > 255) {
                pgm_fail(r.pos, "pixel value " + std::to_string(v) + " exceeds maxval");
            }
            m.at(static_cast<int>(i / width), static_cast<int>(i % width)) = v / 255.0;
        }
    }
    return m;
}

std::string encode_pgm(const MaskGrid& m, PgmFormat format) {
    if (m.empty()) {
        throw std::invalid_argument("encode_pgm: empty grid");
    }
    auto to_byte = [](double v) {
        return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    };
    std::string out;
    char header[64];
    std::snprintf(header, sizeof(header), "%s\n%d %d\n255\n",
                  format == PgmFormat::Binary ? "P5" : "P2", m.width, m.height);
    out += header;
    if (format == PgmFormat::Binary) {
        out.reserve(out.size() + static_cast<size_t>(m.width) * m.height);
        for (int r = 0; r < m.height; ++r) {
            for (int c = 0; c < m.width; ++c) {
                out.push_back(static_cast<char>(to_byte(m.at(r, c))));
            }
        }
    } else {
        for (int r = 0; r < m.height; ++r) {
            for (int c = 0; c < m.width; ++c) {
                if (c > 0) out.push_back(' ');
                out += std::to_string(to_byte(m.at(r, c)));
            }
            out.push_back('\n');
        }
    }
    return out;
}

MaskGrid read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_pgm(ss.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_pgm(const std::string& path, const MaskGrid& m, PgmFormat format) {
    const std::string bytes = encode_pgm(m, format);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp);
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, path);
}

MaskGrid gaussian_blur(const MaskGrid& m, double sigma) {
    if (sigma <= 0.0 || m.empty()) {
        return m;
    }
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    Eigen::VectorXd kernel(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) {
        kernel(i + radius) = std::exp(-0.5 * i * i / (sigma * sigma));
    }
    kernel /= kernel.sum();

    auto clampi = [](int v, int lo, int hi) { return std::min(std::max(v, lo), hi); };
    MaskGrid tmp = MaskGrid::zeros(m.width, m.height);
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel(k + radius) * m.at(r, clampi(c + k, 0, m.width - 1));
            }
            tmp.at(r, c) = acc;
        }
    }
    MaskGrid out = MaskGrid::zeros(m.width, m.height);
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel(k + radius) * tmp.at(clampi(r + k, 0, m.height - 1), c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

}  // namespace sharpcontour
