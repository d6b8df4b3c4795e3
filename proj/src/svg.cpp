#include "sharpcontour/svg.hpp"

#include <cstdio>

namespace sharpcontour {

std::string render_svg(int width, int height, std::span<const SvgLayer> layers) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const SvgLayer& layer : layers) {
        std::snprintf(buf, sizeof(buf),
                      "<g fill=\"none\" stroke=\"%s\" stroke-width=\"%.3f\" "
                      "stroke-opacity=\"%.3f\"%s%s%s>\n",
                      layer.color.c_str(), layer.stroke_width, layer.opacity,
                      layer.label.empty() ? "" : " data-label=\"",
                      layer.label.c_str(), layer.label.empty() ? "" : "\"");
        out += buf;
        for (const Polygon& ring : layer.rings) {
            out += "<path d=\"";
            for (int i = 0; i < ring.size(); ++i) {
                const double x = ring.vertex(i).x();
                const double y = height - ring.vertex(i).y();  // back to image coords
                std::snprintf(buf, sizeof(buf), "%c%.3f %.3f ", i == 0 ? 'M' : 'L', x, y);
                out += buf;
            }
            out += "Z\"/>\n";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace sharpcontour
