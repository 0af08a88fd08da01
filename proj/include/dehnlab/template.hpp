#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dehnlab/certificate.hpp"
#include "dehnlab/cost_model.hpp"
#include "dehnlab/matrix.hpp"
#include "dehnlab/mesh.hpp"
#include "dehnlab/normal_form.hpp"
#include "dehnlab/symspace.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

enum class FaceClass : std::uint8_t {
    Trivial,   // all labels equal, every edge word empty
    Small,     // labels within the small threshold
    Parabolic, // all label differences in U(j, p-j)
    Fallback,  // parabolic at j in {1, p-1}: certified route unavailable
};

// Planar triangulated disc with group labels.  The boundary spells the input
// word's prefixes along the bottom; all other boundary vertices carry I.
struct Template {
    int p = 0;
    Word source{Alphabet::SigmaHat};
    std::vector<std::array<double, 2>> positions;
    std::vector<IntMatrix> labels;
    std::vector<std::array<int, 3>> faces; // oriented counterclockwise
    std::vector<std::array<int, 2>> bigons;
    std::vector<FaceClass> face_class;
    std::vector<int> face_cut;          // parabolic cut j, or -1
    std::vector<int> bottom_vertices;   // boundary vertices left to right
    std::vector<int> bottom_prefix;     // prefix index per bottom vertex
    std::vector<int> other_boundary;    // remaining boundary vertices (label I)

    std::size_t face_count() const { return faces.size(); }
    std::string json() const;
};

struct TemplateStats {
    std::size_t small = 0, parabolic = 0, fallback = 0, trivial = 0;
    double fallback_fraction() const {
        std::size_t nontrivial = small + parabolic + fallback;
        return nontrivial == 0 ? 0.0 : static_cast<double>(fallback) / static_cast<double>(nontrivial);
    }
};

TemplateStats template_stats(const Template& tpl);

// balanced binary template over the word's prefixes (2^k - 2 triangles and
// one bigon after padding with identity letters)
Template dyadic_template(const Word& w, int p);

// Curve sampler for the geodesic cone filling f(x, y) = geodesic from
// alpha(x) to alpha(0) = [I].  Evaluates at lattice points; the spectral
// data per column is computed once in high enough precision to survive the
// cusp depth of the curve.
class ConeFilling {
public:
    struct Column {
        // spectral frame of the column's gram: basis rows R diag(lam^beta/2)
        Eigen::MatrixXd rot;         // orthonormal columns (double is enough)
        std::vector<double> log_lam; // eigenvalue logs, full precision
    };

    ConeFilling(std::vector<SymmetricPoint> samples, std::int64_t t);

    std::int64_t t() const { return t_; }
    // f at the lattice point (x, y); three sides of the square map to [I]
    SymmetricPoint at(std::int64_t x, std::int64_t y) const;
    // log-profile of the Siegel reduction of f(x, y), for the sizing field
    Eigen::VectorXd phi_at(std::int64_t x, std::int64_t y) const;
    double sampled_speed() const { return speed_; }

private:
    std::vector<Column> columns_;
    std::int64_t t_;
    double speed_ = 0.0;
    int p_ = 0;
};

struct BuildOptions {
    GeometryConstants geometry;
    double small_threshold = 12.0; // log-norm proxy bound for Small faces
    bool parallel_labels = false;
    std::uint64_t enum_budget = 10000000;
};

// adaptive template for a null-homotopic word over Sigma
Template build_template(const Word& w, int p, const BuildOptions& opt = {});

// block variant used by the recursive filler: the word lives in the
// [lo, lo+q) block, geometry runs at rank q, labels embed into SL(p;Z)
Template build_template_block(const Word& w, int p, int lo, int q, const BuildOptions& opt = {});

// low-level assembly from a sampled boundary curve: samples[x] must lie in
// prefixes[eta[x]] * S; used by the rank-2 filler's explicit cusp paths
Template assemble_template(std::vector<SymmetricPoint> samples, std::vector<int> eta,
                           const std::vector<IntMatrix>& prefixes, Word source, int p, int lo,
                           int q, const BuildOptions& opt);

struct FillOptions {
    CostModel cost;
    int max_depth = 8;
    std::uint64_t move_budget = TranscriptBuilder::kDefaultMoveBudget;
    int oracle_max_cost = 3;
    std::int64_t oracle_node_budget = 4000;
};

// fills the template: certificate from the source word to the empty word
FillingCertificate fill_template(const Template& tpl, const FillOptions& opt = {});

// rank-2 edge words: word over the {lo, lo+1} block alphabet for an embedded
// SL(2;Z) element
Word rank2_word(const IntMatrix& g2, int lo, int p);

namespace detail {

// shelling-based composition shared by the template fillers: transforms the
// boundary word of the template into the empty word inside tb.  face_fill
// returns a certificate for the face word (given at the rotation requested).
using FaceWordFn = std::function<Word(int u, int v)>; // word for the edge u -> v
using FaceFillFn =
    std::function<FillingCertificate(std::size_t face, const Word& face_word)>;

void fill_by_shelling(TranscriptBuilder& tb, const Template& tpl, const FaceWordFn& edge_word,
                      const FaceFillFn& face_fill);

} // namespace detail

} // namespace dehnlab
