#include "polyzono/svg.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace polyzono {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Viewport {
    double x0, y0, sx, sy;  // world-to-pixel transform (y flipped)
    double px(double x) const { return (x - x0) * sx; }
    double py(double y) const { return (y0 - y) * sy; }
};

Viewport make_viewport(const Box& world, double width, double height) {
    const double margin = 0.05;
    double wx = world.u(0) - world.l(0);
    double wy = world.u(1) - world.l(1);
    if (wx <= 0.0) {
        wx = 1.0;
    }
    if (wy <= 0.0) {
        wy = 1.0;
    }
    Viewport vp;
    vp.x0 = world.l(0) - margin * wx;
    vp.y0 = world.u(1) + margin * wy;
    vp.sx = width / (wx * (1.0 + 2.0 * margin));
    vp.sy = height / (wy * (1.0 + 2.0 * margin));
    return vp;
}

void svg_header(std::ostringstream& out, double width, double height) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width)
        << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height)
        << "\">\n";
}

void svg_rect(std::ostringstream& out, const Viewport& vp, const Box& box, const char* stroke,
              const char* fill, double opacity) {
    const double x = vp.px(box.l(0));
    const double y = vp.py(box.u(1));
    const double w = (box.u(0) - box.l(0)) * vp.sx;
    const double h = (box.u(1) - box.l(1)) * vp.sy;
    out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(h) << "\" stroke=\"" << stroke << "\" fill=\"" << fill
        << "\" fill-opacity=\"" << fmt(opacity) << "\" stroke-width=\"1\"/>\n";
}

}  // namespace

std::string render_pz_svg(const PolyZonotope& pz, const PlotOptions& opts) {
    if (opts.dim_x < 0 || opts.dim_x >= pz.dim() || opts.dim_y < 0 || opts.dim_y >= pz.dim()) {
        throw std::invalid_argument("render_pz_svg: projection dimension out of range");
    }
    Mat P = Mat::Zero(2, pz.dim());
    P(0, opts.dim_x) = 1.0;
    P(1, opts.dim_y) = 1.0;
    const PolyZonotope proj = affine_map(P, pz, Vec::Zero(2));
    const Box hull = interval_enclosure(proj);

    const Eigen::Index p = proj.num_factors();
    const Eigen::Index q = proj.num_independent();
    std::mt19937_64 rng(opts.seed);

    std::ostringstream out;
    svg_header(out, opts.width, opts.height);
    const Viewport vp = make_viewport(hull, opts.width, opts.height);
    svg_rect(out, vp, hull, "#d62728", "none", 0.0);

    FactorAssignment fa;
    fa.alpha.resize(p);
    fa.beta.resize(q);
    const int g = std::max(1, opts.grid);
    out << "<g fill=\"#1f77b4\">\n";
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            for (Eigen::Index k = 0; k < p; ++k) {
                fa.alpha(k) = 2.0 * uniform01(rng) - 1.0;
            }
            if (p > 0) {
                fa.alpha(0) = g == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / (g - 1);
            }
            if (p > 1) {
                fa.alpha(1) = g == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(j) / (g - 1);
            }
            for (Eigen::Index k = 0; k < q; ++k) {
                fa.beta(k) = uniform01(rng) < 0.5 ? -1.0 : 1.0;
            }
            const Vec y = evaluate(proj, fa);
            out << "<rect x=\"" << fmt(vp.px(y(0)) - 0.5) << "\" y=\"" << fmt(vp.py(y(1)) - 0.5)
                << "\" width=\"1\" height=\"1\"/>\n";
        }
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

std::string render_boxes_svg(const std::vector<Box>& boxes, Eigen::Index dim_x, Eigen::Index dim_y,
                             double width, double height) {
    if (boxes.empty()) {
        throw std::invalid_argument("render_boxes_svg: no sets to draw");
    }
    std::vector<Box> projected;
    for (const Box& b : boxes) {
        if (dim_x >= b.dim() || dim_y >= b.dim()) {
            throw std::invalid_argument("render_boxes_svg: projection dimension out of range");
        }
        Vec l(2);
        Vec u(2);
        l << b.l(dim_x), b.l(dim_y);
        u << b.u(dim_x), b.u(dim_y);
        projected.emplace_back(l, u);
    }
    Box world = projected.front();
    for (const Box& b : projected) {
        world = world.join(b);
    }
    std::ostringstream out;
    svg_header(out, width, height);
    const Viewport vp = make_viewport(world, width, height);
    for (const Box& b : projected) {
        svg_rect(out, vp, b, "#1f77b4", "#1f77b4", 0.15);
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace polyzono
