#include "dehnlab/template.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <map>
#include <nlohmann/json.hpp>

#include "dehnlab/shortcuts.hpp"

namespace dehnlab {

namespace {

// 200 decimal digits cover the cusp depth the cone can reach for the word
// lengths this laboratory runs at (spectral range up to ~e^600)
using BF = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;

// cyclic Jacobi on a symmetric matrix, high precision
void jacobi_eigen(std::vector<std::vector<BF>>& a, std::vector<std::vector<BF>>& v) {
    const int p = static_cast<int>(a.size());
    v.assign(static_cast<std::size_t>(p), std::vector<BF>(static_cast<std::size_t>(p), BF(0)));
    for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    const BF eps = boost::multiprecision::pow(BF(10), -120);
    for (int sweep = 0; sweep < 200; ++sweep) {
        BF off(0), scale(0);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                off += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                       a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                scale += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] *
                         a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
            }
        if (off <= eps * eps * (scale + BF(1))) break;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) {
                BF aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (aij == 0) continue;
                BF aii = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
                BF ajj = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
                BF theta = (ajj - aii) / (2 * aij);
                BF t = (theta >= 0 ? BF(1) : BF(-1)) /
                       (boost::multiprecision::abs(theta) +
                        boost::multiprecision::sqrt(theta * theta + BF(1)));
                BF c = 1 / boost::multiprecision::sqrt(t * t + BF(1));
                BF s = t * c;
                for (int k = 0; k < p; ++k) {
                    BF aik = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                    BF ajk = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = c * aik - s * ajk;
                    a[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = s * aik + c * ajk;
                }
                for (int k = 0; k < p; ++k) {
                    BF aki = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
                    BF akj = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                    a[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = c * aki - s * akj;
                    a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = s * aki + c * akj;
                }
                for (int k = 0; k < p; ++k) {
                    BF vki = v[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
                    BF vkj = v[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                    v[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = c * vki - s * vkj;
                    v[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = s * vki + c * vkj;
                }
            }
    }
}

BF bf_of_int(const Int& x) { return BF(x.str()); }

} // namespace

ConeFilling::ConeFilling(std::vector<SymmetricPoint> samples, std::int64_t t) : t_(t) {
    if (samples.empty()) throw Error("cone filling needs at least one sample");
    p_ = samples[0].p;
    columns_.reserve(static_cast<std::size_t>(t) + 1);
    for (std::int64_t x = 0; x <= t; ++x) {
        const SymmetricPoint& sp = x < static_cast<std::int64_t>(samples.size())
                                       ? samples[static_cast<std::size_t>(x)]
                                       : samples.back();
        const int p = sp.p;
        std::vector<std::vector<BF>> a(static_cast<std::size_t>(p), std::vector<BF>(static_cast<std::size_t>(p)));
        BF scale = boost::multiprecision::pow(BF(2), sp.exact.exp2);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    bf_of_int(sp.exact.num[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) * scale;
        std::vector<std::vector<BF>> v;
        jacobi_eigen(a, v);
        Column col;
        col.rot = Eigen::MatrixXd(p, p);
        col.log_lam.resize(static_cast<std::size_t>(p));
        double logdet = 0;
        for (int i = 0; i < p; ++i) {
            BF lam = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
            if (lam <= 0) throw NotPositiveDefinite("cone column not positive definite");
            col.log_lam[static_cast<std::size_t>(i)] =
                static_cast<double>(boost::multiprecision::log(lam));
            logdet += col.log_lam[static_cast<std::size_t>(i)];
            for (int k = 0; k < p; ++k)
                col.rot(k, i) = static_cast<double>(v[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
        }
        // normalize to the unit-determinant representative
        for (int i = 0; i < p; ++i) col.log_lam[static_cast<std::size_t>(i)] -= logdet / p;
        columns_.push_back(std::move(col));
    }
    // sampled speed along the boundary curve
    for (std::size_t x = 0; x + 1 < samples.size(); ++x)
        speed_ = std::max(speed_, dist_E_via_reduction(samples[x], samples[x + 1]));
}

SymmetricPoint ConeFilling::at(std::int64_t x, std::int64_t y) const {
    if (x < 0 || x > t_ || y < 0 || y > t_) throw DimensionMismatch("cone query outside the square");
    const Column& col = columns_[static_cast<std::size_t>(std::min<std::int64_t>(x, t_))];
    const int p = p_;
    double beta = 1.0 - static_cast<double>(y) / static_cast<double>(t_);
    // basis rows R diag(lam^{beta/2}) carry the small directions exactly
    Eigen::MatrixXd basis(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            basis(i, j) = col.rot(i, j) * std::exp(0.5 * beta * col.log_lam[static_cast<std::size_t>(j)]);
    return point_of(basis);
}

Eigen::VectorXd ConeFilling::phi_at(std::int64_t x, std::int64_t y) const {
    return phi_of(at(x, y));
}

Template dyadic_template(const Word& w, int p) {
    if (!w.evaluate(p).is_identity()) throw NotIdentity("dyadic_template: word must represent I");
    std::int64_t n = 1;
    while (n < static_cast<std::int64_t>(w.size())) n <<= 1;
    if (n < 2) n = 2;

    Template tpl;
    tpl.p = p;
    tpl.source = w;
    // vertices: prefixes w(0) .. w(n-1); w(n) = w(0) = I closes up
    IntMatrix acc = IntMatrix::identity(p);
    for (std::int64_t i = 0; i < n; ++i) {
        tpl.positions.push_back({static_cast<double>(i), 0.0});
        tpl.labels.push_back(acc);
        tpl.bottom_vertices.push_back(static_cast<int>(i));
        tpl.bottom_prefix.push_back(static_cast<int>(i));
        if (i < static_cast<std::int64_t>(w.size())) acc = acc * w[static_cast<std::size_t>(i)].eval(p);
    }
    // triangles (i 2^j, (2i+1) 2^{j-1}, (i+1) 2^j) for 1 <= j < k
    for (std::int64_t span = 2; span < n; span <<= 1)
        for (std::int64_t i = 0; i + span <= n; i += span) {
            int a = static_cast<int>(i);
            int m = static_cast<int>(i + span / 2);
            int b = static_cast<int>((i + span) % n);
            tpl.faces.push_back({a, m, b});
            tpl.face_class.push_back(FaceClass::Small);
            tpl.face_cut.push_back(-1);
        }
    tpl.bigons.push_back({0, static_cast<int>(n / 2)});
    return tpl;
}

TemplateStats template_stats(const Template& tpl) {
    TemplateStats st;
    for (FaceClass c : tpl.face_class) switch (c) {
        case FaceClass::Trivial: ++st.trivial; break;
        case FaceClass::Small: ++st.small; break;
        case FaceClass::Parabolic: ++st.parabolic; break;
        case FaceClass::Fallback: ++st.fallback; break;
        }
    return st;
}

namespace {

// lattice-sampled sizing field with bilinear interpolation; the samples are
// pre-scaled so interpolation keeps the declared Lipschitz constant
class SampledField final : public SizingField {
public:
    SampledField(std::int64_t t, std::function<double(std::int64_t, std::int64_t)> sample)
        : t_(t), sample_(std::move(sample)) {}

    double value(double x, double y) const override {
        double cx = std::clamp(x, 0.0, static_cast<double>(t_));
        double cy = std::clamp(y, 0.0, static_cast<double>(t_));
        std::int64_t x0 = static_cast<std::int64_t>(std::floor(cx));
        std::int64_t y0 = static_cast<std::int64_t>(std::floor(cy));
        if (x0 == t_) --x0;
        if (y0 == t_) --y0;
        double fx = cx - static_cast<double>(x0), fy = cy - static_cast<double>(y0);
        double v00 = at(x0, y0), v10 = at(x0 + 1, y0), v01 = at(x0, y0 + 1), v11 = at(x0 + 1, y0 + 1);
        return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 + fx * fy * v11;
    }

    double lower_bound_on(const DyadicSquare& sq) const override {
        // corner samples are exact field values; the field is 1-Lipschitz
        double m = at(sq.x0(), sq.y0());
        m = std::min(m, at(sq.x1(), sq.y0()));
        m = std::min(m, at(sq.x0(), sq.y1()));
        m = std::min(m, at(sq.x1(), sq.y1()));
        return std::max(1.0, m - static_cast<double>(sq.side()) * 0.70710678118654752);
    }

    std::string describe() const override { return "sampled sizing field"; }

private:
    double at(std::int64_t x, std::int64_t y) const {
        auto key = std::make_pair(x, y);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        double v = sample_(x, y);
        cache_.emplace(key, v);
        return v;
    }

    std::int64_t t_;
    std::function<double(std::int64_t, std::int64_t)> sample_;
    mutable std::map<std::pair<std::int64_t, std::int64_t>, double> cache_;
};

IntMatrix embed_block(const IntMatrix& g, int lo, int p) {
    IntMatrix out = IntMatrix::identity(p);
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) out(lo + i, lo + j) = g(i, j);
    return out;
}

IntMatrix extract_block(const IntMatrix& g, int lo, int q) {
    IntMatrix out(q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) out(i, j) = g(lo + i, lo + j);
    return out;
}

double lognorm_proxy(const IntMatrix& z) { return std::max(1.0, z.log2_norm2()); }

} // namespace

Template assemble_template(std::vector<SymmetricPoint> samples, std::vector<int> eta,
                           const std::vector<IntMatrix>& prefixes, Word source, int p, int lo,
                           int q, const BuildOptions& opt) {
    const std::int64_t ell = static_cast<std::int64_t>(samples.size()) - 1;
    std::int64_t t = 1;
    while (t < ell) t <<= 1;
    if (t < 2) t = 2;
    ConeFilling cone(std::move(samples), t);

    const double c_curve = std::max(0.25, cone.sampled_speed());
    const GeometryConstants& gc = opt.geometry;
    const double c_haus = gc.hausdorff_slack;

    auto sizing = [&](std::int64_t x, std::int64_t y) {
        double r0;
        {
            Eigen::VectorXd ph = cone.phi_at(x, y);
            double depth = std::max(0.0, ph.norm() - c_haus);
            r0 = depth / (2.0 * q * q) - 1.0;
        }
        double h = std::max(1.0, r0 / (8.0 * c_curve));
        // force unit resolution along the spell line so every prefix vertex
        // exists; min with a 1-Lipschitz ramp keeps the field admissible
        return std::min(h, 1.0 + static_cast<double>(y));
    };
    SampledField field(t, sizing);

    std::vector<DyadicSquare> cover = whitney_cover(t, field, opt.parallel_labels);
    Mesh mesh = triangulate_cover(cover, t);

    Template tpl;
    tpl.p = p;
    tpl.source = std::move(source);
    tpl.positions.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices)
        tpl.positions.push_back({static_cast<double>(v[0]), static_cast<double>(v[1])});

    // labels: bottom edge spells the prefixes, the rest of the boundary is I,
    // interior vertices reduce through the cone
    tpl.labels.assign(mesh.vertices.size(), IntMatrix::identity(p));
    std::vector<char> is_boundary(mesh.vertices.size(), 0);
    for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
        std::int64_t x = mesh.vertices[vi][0], y = mesh.vertices[vi][1];
        if (x == 0 || y == 0 || x == t || y == t) is_boundary[vi] = 1;
    }
    auto eta_at = [&](std::int64_t x) {
        std::int64_t idx = std::min<std::int64_t>(x, static_cast<std::int64_t>(eta.size()) - 1);
        return eta[static_cast<std::size_t>(idx)];
    };
    std::vector<std::size_t> interior;
    for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
        std::int64_t x = mesh.vertices[vi][0], y = mesh.vertices[vi][1];
        if (y == 0) {
            tpl.labels[vi] = prefixes[static_cast<std::size_t>(eta_at(x))];
        } else if (is_boundary[vi]) {
            // identity
        } else {
            interior.push_back(vi);
        }
    }
    {
        std::string failure;
#ifdef DEHNLAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (opt.parallel_labels)
#endif
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(interior.size()); ++k) {
            std::size_t vi = interior[static_cast<std::size_t>(k)];
            try {
                std::int64_t x = mesh.vertices[vi][0], y = mesh.vertices[vi][1];
                SiegelReduction red = siegel_reduce(cone.at(x, y), gc);
                tpl.labels[vi] = embed_block(red.gamma, lo, p);
            } catch (const Error& e) {
#ifdef DEHNLAB_HAVE_OPENMP
#pragma omp critical
#endif
                failure = e.what();
            }
        }
        if (!failure.empty()) throw ReductionFailed(failure);
    }

    tpl.faces.reserve(mesh.triangles.size());
    for (const auto& tr : mesh.triangles) tpl.faces.push_back({tr[0], tr[1], tr[2]});

    // bottom boundary order
    {
        std::vector<std::pair<std::int64_t, int>> bottom;
        for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi)
            if (mesh.vertices[vi][1] == 0) bottom.push_back({mesh.vertices[vi][0], static_cast<int>(vi)});
        std::sort(bottom.begin(), bottom.end());
        for (const auto& b : bottom) {
            tpl.bottom_vertices.push_back(b.second);
            tpl.bottom_prefix.push_back(eta_at(b.first));
        }
        for (std::size_t vi = 0; vi < mesh.vertices.size(); ++vi)
            if (is_boundary[vi] && mesh.vertices[vi][1] != 0) tpl.other_boundary.push_back(static_cast<int>(vi));
    }

    // classification
    tpl.face_class.resize(tpl.faces.size());
    tpl.face_cut.assign(tpl.faces.size(), -1);
    for (std::size_t fi = 0; fi < tpl.faces.size(); ++fi) {
        const auto& f = tpl.faces[fi];
        const IntMatrix &g1 = tpl.labels[static_cast<std::size_t>(f[0])],
                        &g2 = tpl.labels[static_cast<std::size_t>(f[1])],
                        &g3 = tpl.labels[static_cast<std::size_t>(f[2])];
        if (g1 == g2 && g2 == g3) {
            tpl.face_class[fi] = FaceClass::Trivial;
            continue;
        }
        IntMatrix d12 = g1.inverse() * g2;
        IntMatrix d13 = g1.inverse() * g3;
        IntMatrix d23 = g2.inverse() * g3;
        double prox = std::max({lognorm_proxy(d12), lognorm_proxy(d13), lognorm_proxy(d23)});
        if (prox <= opt.small_threshold) {
            tpl.face_class[fi] = FaceClass::Small;
            continue;
        }
        int found = -1;
        for (int j = 1; j < q; ++j) {
            BlockPartition part = [&] {
                std::vector<int> sizes;
                for (int s = 0; s < lo; ++s) sizes.push_back(1);
                sizes.push_back(j);
                sizes.push_back(q - j);
                for (int s = lo + q; s < p; ++s) sizes.push_back(1);
                return BlockPartition(sizes);
            }();
            if (in_block_group(d12, part) && in_block_group(d13, part) && in_block_group(d23, part)) {
                found = j;
                break;
            }
        }
        bool ok_blocks = found > 0 && found <= p - 2 && (q - found) <= p - 2;
        if (ok_blocks) {
            tpl.face_class[fi] = FaceClass::Parabolic;
            tpl.face_cut[fi] = found;
            continue;
        }
        if (found > 0) {
            tpl.face_class[fi] = FaceClass::Fallback;
            tpl.face_cut[fi] = found;
            continue;
        }
        throw ClassificationFailed("face is neither small nor parabolic");
    }
    return tpl;
}

Template build_template_block(const Word& w, int p, int lo, int q, const BuildOptions& opt) {
    std::vector<IntMatrix> prefixes;
    IntMatrix acc = IntMatrix::identity(p);
    prefixes.push_back(acc);
    for (const Letter& l : w.letters()) {
        acc = acc * l.eval(p);
        prefixes.push_back(acc);
    }
    if (!acc.is_identity()) throw NotIdentity("build_template: word must represent I");

    std::vector<SymmetricPoint> samples;
    std::vector<int> eta;
    samples.reserve(prefixes.size());
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
        samples.push_back(point_of(extract_block(prefixes[i], lo, q)));
        eta.push_back(static_cast<int>(i));
    }
    return assemble_template(std::move(samples), std::move(eta), prefixes, w, p, lo, q, opt);
}

Template build_template(const Word& w, int p, const BuildOptions& opt) {
    return build_template_block(w, p, 0, p, opt);
}

std::string Template::json() const {
    nlohmann::ordered_json root;
    root["p"] = p;
    root["source"] = source.str();
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < positions.size(); ++t) {
        nlohmann::ordered_json v;
        v["xy"] = {positions[t][0], positions[t][1]};
        v["label"] = labels[t].str();
        vs.push_back(v);
    }
    root["vertices"] = vs;
    nlohmann::ordered_json fs = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < faces.size(); ++t) {
        nlohmann::ordered_json f;
        f["v"] = {faces[t][0], faces[t][1], faces[t][2]};
        switch (face_class[t]) {
        case FaceClass::Trivial: f["class"] = "trivial"; break;
        case FaceClass::Small: f["class"] = "small"; break;
        case FaceClass::Parabolic: f["class"] = "parabolic"; break;
        case FaceClass::Fallback: f["class"] = "fallback"; break;
        }
        if (face_cut[t] >= 0) f["cut"] = face_cut[t];
        fs.push_back(f);
    }
    root["faces"] = fs;
    if (!bigons.empty()) {
        nlohmann::ordered_json bs = nlohmann::ordered_json::array();
        for (const auto& b : bigons) bs.push_back({b[0], b[1]});
        root["bigons"] = bs;
    }
    return root.dump(2);
}

} // namespace dehnlab
