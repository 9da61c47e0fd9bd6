// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "audioinsight/dsp.hpp"
#include "audioinsight/tsne.hpp"

namespace audioinsight {

namespace {

void minmax_normalize(GrayImage& img) {
    float lo = img.pix[0], hi = img.pix[0];
    for (float v : img.pix) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12f) {
        std::fill(img.pix.begin(), img.pix.end(), 0.0f);
        return;
    }
    for (float& v : img.pix) v = (v - lo) / (hi - lo);
}

// Andrew's monotone chain; returns hull in counter-clockwise order.
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int n = static_cast<int>(pts.size());
    if (n <= 2) return pts;
    auto cross = [](const auto& o, const auto& a, const auto& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (int i = n - 2, t = k + 1; i >= 0; --i) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

// Rotation angle of the minimum-area bounding rectangle of the hull.
double min_area_rect_angle(const std::vector<std::pair<double, double>>& hull) {
    if (hull.size() < 3) {
        if (hull.size() == 2)
            return std::atan2(hull[1].second - hull[0].second, hull[1].first - hull[0].first);
        return 0.0;
    }
    double best_area = std::numeric_limits<double>::infinity();
    double best_angle = 0.0;
    for (size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        const double angle = std::atan2(b.second - a.second, b.first - a.first);
        const double ca = std::cos(angle), sa = std::sin(angle);
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (const auto& p : hull) {
            const double x = p.first * ca + p.second * sa;
            const double y = -p.first * sa + p.second * ca;
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
        const double area = (xhi - xlo) * (yhi - ylo);
        if (area < best_area - 1e-15) {
            best_area = area;
            best_angle = angle;
        }
    }
    return best_angle;
}

void put_raw(std::string& out, const void* p, size_t n) {
    out.append(reinterpret_cast<const char*>(p), n);
}
void put_u16(std::string& out, uint16_t v) { put_raw(out, &v, 2); }
void put_u32(std::string& out, uint32_t v) { put_raw(out, &v, 4); }
void put_f64(std::string& out, double v) { put_raw(out, &v, 8); }

struct Reader {
    const uint8_t* p;
    size_t n, off;
    void need(size_t k) const {
        if (off + k > n) throw Error("truncated layout blob");
    }
    uint16_t u16() {
        need(2);
        uint16_t v;
        std::memcpy(&v, p + off, 2);
        off += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v;
        std::memcpy(&v, p + off, 4);
        off += 4;
        return v;
    }
    double f64() {
        need(8);
        double v;
        std::memcpy(&v, p + off, 8);
        off += 8;
        return v;
    }
    std::string str(size_t k) {
        need(k);
        std::string s(reinterpret_cast<const char*>(p + off), k);
        off += k;
        return s;
    }
};

}  // namespace

GrayImage spectrogram_image(const Segment& seg, const FrameParams& fp, int P) {
    if (P < 2) throw Error("image size must be >= 2");
    const StftResult s = stft(seg.samples.data(), seg.samples.size(), fp, seg.sample_rate);
    if (s.n_frames() < 2) throw Error("segment too short for a spectrogram");
    const int n_bins = s.n_bins();
    const int n_frames = s.n_frames();

    // log magnitude, rows = frequency, cols = time
    std::vector<double> logmag(static_cast<size_t>(n_bins) * n_frames);
    for (int t = 0; t < n_frames; ++t)
        for (int b = 0; b < n_bins; ++b)
            logmag[static_cast<size_t>(b) * n_frames + t] =
                std::log10(std::max(std::abs(s.frames[t][b]), 1e-10));

    GrayImage img;
    img.P = P;
    img.kind = ImageKind::Spectrogram;
    img.pix.assign(static_cast<size_t>(P) * P, 0.0f);
    auto sample_at = [&](double r, double c) {
        const int r0 = std::clamp(static_cast<int>(std::floor(r)), 0, n_bins - 1);
        const int r1 = std::min(r0 + 1, n_bins - 1);
        const int c0 = std::clamp(static_cast<int>(std::floor(c)), 0, n_frames - 1);
        const int c1 = std::min(c0 + 1, n_frames - 1);
        const double fr = std::clamp(r - r0, 0.0, 1.0);
        const double fc = std::clamp(c - c0, 0.0, 1.0);
        const double v00 = logmag[static_cast<size_t>(r0) * n_frames + c0];
        const double v01 = logmag[static_cast<size_t>(r0) * n_frames + c1];
        const double v10 = logmag[static_cast<size_t>(r1) * n_frames + c0];
        const double v11 = logmag[static_cast<size_t>(r1) * n_frames + c1];
        return (v00 * (1 - fc) + v01 * fc) * (1 - fr) + (v10 * (1 - fc) + v11 * fc) * fr;
    };
    for (int r = 0; r < P; ++r) {
        const double src_r = (static_cast<double>(r) + 0.5) / P * n_bins - 0.5;
        for (int c = 0; c < P; ++c) {
            const double src_c = (static_cast<double>(c) + 0.5) / P * n_frames - 0.5;
            img.at(r, c) = static_cast<float>(sample_at(src_r, src_c));
        }
    }
    minmax_normalize(img);
    return img;
}

FeatureLayout fit_feature_layout(const std::vector<FeatureVector>& train_vectors, int P,
                                 uint64_t seed, FitProvenance provenance) {
    if (train_vectors.size() < 10) throw Error("layout fitting needs at least 10 vectors");
    const size_t D = train_vectors[0].dimension();
    if (D < 2) throw Error("layout fitting needs at least 2 features");
    const size_t n = train_vectors.size();
    for (const auto& fv : train_vectors)
        if (fv.dimension() != D) throw Error("inconsistent feature dimensions");

    FeatureLayout layout;
    layout.P = P;
    layout.seed = seed;
    layout.provenance = std::move(provenance);
    layout.names = train_vectors[0].names ? *train_vectors[0].names : std::vector<std::string>{};
    if (layout.names.size() != D) throw Error("feature vectors carry no usable name table");

    layout.mean.assign(D, 0.0);
    layout.stddev.assign(D, 0.0);
    for (const auto& fv : train_vectors)
        for (size_t d = 0; d < D; ++d) layout.mean[d] += fv.values[d];
    for (auto& m : layout.mean) m /= static_cast<double>(n);
    for (const auto& fv : train_vectors)
        for (size_t d = 0; d < D; ++d) {
            const double c = fv.values[d] - layout.mean[d];
            layout.stddev[d] += c * c;
        }
    for (auto& s : layout.stddev) s = std::sqrt(s / static_cast<double>(n));

    // points = features; coordinates = standardized values across samples
    Eigen::MatrixXd X(D, n);
    for (size_t d = 0; d < D; ++d) {
        const double sd = layout.stddev[d] > 1e-12 ? layout.stddev[d] : 1.0;
        for (size_t i = 0; i < n; ++i)
            X(static_cast<long>(d), static_cast<long>(i)) =
                (train_vectors[i].values[d] - layout.mean[d]) / sd;
    }

    Eigen::MatrixXd Y;
    if (D < 5) {
        Y = pca_2d(X);
    } else {
        TsneParams tp;
        tp.perplexity = std::min(30.0, (static_cast<double>(D) - 1.0) / 3.0);
        tp.iterations = 500;
        tp.seed = seed;
        try {
            Y = tsne_2d(X, tp);
        } catch (const Error&) {
            Y = pca_2d(X);  // degeneracy fallback
        }
    }

    std::vector<std::pair<double, double>> pts(D);
    for (size_t d = 0; d < D; ++d) pts[d] = {Y(static_cast<long>(d), 0), Y(static_cast<long>(d), 1)};
    const double angle = min_area_rect_angle(convex_hull(pts));
    layout.frame_angle = angle;

    const double ca = std::cos(angle), sa = std::sin(angle);
    std::vector<double> xs(D), ys(D);
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (size_t d = 0; d < D; ++d) {
        xs[d] = pts[d].first * ca + pts[d].second * sa;
        ys[d] = -pts[d].first * sa + pts[d].second * ca;
        xlo = std::min(xlo, xs[d]);
        xhi = std::max(xhi, xs[d]);
        ylo = std::min(ylo, ys[d]);
        yhi = std::max(yhi, ys[d]);
    }
    const double xw = xhi - xlo, yw = yhi - ylo;
    layout.rows.resize(D);
    layout.cols.resize(D);
    for (size_t d = 0; d < D; ++d) {
        const double cx = xw > 1e-12 ? (xs[d] - xlo) / xw : 0.0;
        const double cy = yw > 1e-12 ? (ys[d] - ylo) / yw : 0.0;
        layout.cols[d] = std::clamp(static_cast<int>(std::lround(cx * (P - 1))), 0, P - 1);
        layout.rows[d] = std::clamp(static_cast<int>(std::lround(cy * (P - 1))), 0, P - 1);
    }
    return layout;
}

GrayImage feature_image_raw(const FeatureVector& fv, const FeatureLayout& layout) {
    const size_t D = layout.names.size();
    if (!fv.names) throw Error("feature vector has no name table");
    GrayImage img;
    img.P = layout.P;
    img.kind = ImageKind::FeatureImage;
    img.pix.assign(static_cast<size_t>(layout.P) * layout.P, 0.0f);
    std::vector<float> counts(img.pix.size(), 0.0f);

    // name-keyed lookup so storage order of the vector does not matter
    const bool aligned = fv.names->size() == D && *fv.names == layout.names;
    for (size_t d = 0; d < D; ++d) {
        double v;
        if (aligned) {
            v = fv.values[d];
        } else {
            try {
                v = fv.value_of(layout.names[d]);
            } catch (const Error&) {
                throw Error("feature vector is missing feature '" + layout.names[d] + "'");
            }
        }
        const double sd = layout.stddev[d] > 1e-12 ? layout.stddev[d] : 1.0;
        const double z = (v - layout.mean[d]) / sd;
        const size_t idx = static_cast<size_t>(layout.rows[d]) * layout.P + layout.cols[d];
        img.pix[idx] += static_cast<float>(z);
        counts[idx] += 1.0f;
    }
    for (size_t i = 0; i < img.pix.size(); ++i)
        if (counts[i] > 0.0f) img.pix[i] /= counts[i];
    return img;
}

GrayImage feature_image(const FeatureVector& fv, const FeatureLayout& layout) {
    GrayImage img = feature_image_raw(fv, layout);
    minmax_normalize(img);
    return img;
}

DualChannelImage assemble_dual(GrayImage spec, GrayImage feat, const ContextLabel& label,
                               const std::string& group_id) {
    if (spec.P != feat.P) throw Error("channel size mismatch");
    DualChannelImage d;
    d.spec = std::move(spec);
    d.feat = std::move(feat);
    d.label = label;
    d.group_id = group_id;
    return d;
}

void write_layout_blob(const FeatureLayout& layout, std::string& out) {
    out += "AILM";
    put_u16(out, 1);
    put_u32(out, static_cast<uint32_t>(layout.P));
    put_u32(out, static_cast<uint32_t>(layout.names.size()));
    for (size_t d = 0; d < layout.names.size(); ++d) {
        put_u16(out, static_cast<uint16_t>(layout.names[d].size()));
        put_raw(out, layout.names[d].data(), layout.names[d].size());
        put_u32(out, static_cast<uint32_t>(layout.rows[d]));
        put_u32(out, static_cast<uint32_t>(layout.cols[d]));
        put_f64(out, layout.mean[d]);
        put_f64(out, layout.stddev[d]);
    }
}

FeatureLayout read_layout_blob(const uint8_t* data, size_t size, size_t& off) {
    Reader r{data, size, off};
    if (r.str(4) != "AILM") throw Error("bad layout magic");
    const uint16_t version = r.u16();
    if (version != 1) throw Error("unsupported layout version");
    FeatureLayout layout;
    layout.P = static_cast<int>(r.u32());
    const uint32_t D = r.u32();
    layout.names.resize(D);
    layout.rows.resize(D);
    layout.cols.resize(D);
    layout.mean.resize(D);
    layout.stddev.resize(D);
    for (uint32_t d = 0; d < D; ++d) {
        const uint16_t len = r.u16();
        layout.names[d] = r.str(len);
        layout.rows[d] = static_cast<int>(r.u32());
        layout.cols[d] = static_cast<int>(r.u32());
        layout.mean[d] = r.f64();
        layout.stddev[d] = r.f64();
    }
    off = r.off;
    return layout;
}

void save_layout(const FeatureLayout& layout, const std::string& path) {
    std::string blob;
    write_layout_blob(layout, blob);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write layout: " + path);
    f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

FeatureLayout load_layout(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open layout: " + path);
    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    size_t off = 0;
    return read_layout_blob(reinterpret_cast<const uint8_t*>(blob.data()), blob.size(), off);
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write pgm: " + path);
    f << "P5\n" << img.P << ' ' << img.P << "\n255\n";
    for (float v : img.pix)
        f.put(static_cast<char>(std::clamp(static_cast<int>(std::lround(v * 255.0f)), 0, 255)));
}

}  // namespace audioinsight
