#include "qms/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qms {

uint64_t Rng::next() {
    // splitmix64
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
}

namespace {

QuasiMetricSpace line_space(int n, double exponent) {
    if (n < 2) throw std::invalid_argument("grid needs at least two points");
    QuasiMetricSpace s;
    s.dist = Mat(n);
    s.weight.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        s.labels.push_back(std::to_string(i));
        for (int j = 0; j < n; ++j) {
            double d = std::fabs(static_cast<double>(i - j)) / (n - 1);
            s.dist.at(i, j) = (i == j) ? 0.0 : std::pow(d, exponent);
        }
    }
    return s;
}

void normalize_diameter(QuasiMetricSpace& s, double target) {
    double d = diameter(s);
    if (d <= 0.0 || target <= 0.0) return;
    double f = target / d;
    if (f == 1.0) return;
    for (double& v : s.dist.a) v *= f;
}

std::vector<int> cantor_indices(int level) {
    // indices of the grid 0..3^level - 1 whose base-3 digits avoid 1
    int n = 1;
    for (int i = 0; i < level; ++i) n *= 3;
    std::vector<int> keep;
    for (int i = 0; i < n; ++i) {
        int v = i;
        bool ok = true;
        for (int d = 0; d < level; ++d) {
            if (v % 3 == 1) {
                ok = false;
                break;
            }
            v /= 3;
        }
        if (ok) keep.push_back(i);
    }
    return keep;
}

}  // namespace

QuasiMetricSpace random_quasimetric(int n, uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    QuasiMetricSpace s;
    s.dist = Mat(n);
    s.weight.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        s.labels.push_back(std::to_string(i));
        s.weight[i] = rng.uniform(0.5, 1.5);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s.dist.at(i, j) = rng.uniform(lo, hi);
    return s;
}

QuasiMetricSpace random_metric_points(int n, uint64_t seed, int dim) {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
        for (double& c : p) c = rng.uniform(0.0, 1.0);
    QuasiMetricSpace s;
    s.dist = Mat(n);
    s.weight.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        s.labels.push_back(std::to_string(i));
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int d = 0; d < dim; ++d) acc += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
            s.dist.at(i, j) = std::sqrt(acc);
        }
    }
    // coincident points would break the separation axiom
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && s.dist.at(i, j) == 0.0) s.dist.at(i, j) = 1e-9;
    return s;
}

GeneratedSpace generate(const GeneratorSpec& spec) {
    GeneratedSpace out;
    switch (spec.kind) {
        case SpaceKind::grid:
            out.space = line_space(spec.n, 1.0);
            break;
        case SpaceKind::snowflake_grid: {
            if (!(spec.eps > 0.0)) throw std::invalid_argument("snowflake parameter must be positive");
            out.space = line_space(spec.n, 1.0 / spec.eps);
            break;
        }
        case SpaceKind::ultrametric_tree: {
            if (spec.depth < 1) throw std::invalid_argument("tree depth must be positive");
            int n = 1 << spec.depth;
            QuasiMetricSpace s;
            s.dist = Mat(n);
            s.weight.assign(n, 1.0);
            for (int i = 0; i < n; ++i) {
                s.labels.push_back(std::to_string(i));
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    int x = i ^ j, top = 0;
                    while (x >> (top + 1)) ++top;  // highest differing bit
                    int meet_depth = spec.depth - 1 - top;
                    s.dist.at(i, j) = std::pow(2.0, -meet_depth);
                }
            }
            out.space = s;
            break;
        }
        case SpaceKind::cantor_in_grid: {
            if (spec.level < 1) throw std::invalid_argument("cantor level must be positive");
            int n = 1;
            for (int i = 0; i < spec.level; ++i) n *= 3;
            out.space = line_space(n, 1.0);
            DomainMask m;
            m.indices = cantor_indices(spec.level);
            out.omega = m;
            break;
        }
        case SpaceKind::outward_cusp: {
            if (spec.n < 8) throw std::invalid_argument("cusp grid too small");
            out.space = line_space(spec.n, 1.0);
            DomainMask m;
            m.indices.push_back(0);
            for (int k = 0; k < spec.cusp_terms; ++k) {
                double pos = std::pow(2.0, -std::pow(2.0, k));  // 1/2, 1/4, 1/16, ...
                int idx = static_cast<int>(std::lround(pos * (spec.n - 1)));
                if (idx > 0) m.indices.push_back(idx);
            }
            std::sort(m.indices.begin(), m.indices.end());
            m.indices.erase(std::unique(m.indices.begin(), m.indices.end()), m.indices.end());
            if (m.indices.size() < 2) throw std::invalid_argument("cusp domain collapsed");
            out.omega = m;
            break;
        }
        case SpaceKind::random_quasimetric:
            out.space = random_quasimetric(spec.n, spec.seed);
            break;
    }
    normalize_diameter(out.space, spec.diameter);
    validate(out.space);
    return out;
}

SpaceKind parse_kind(const std::string& name) {
    if (name == "grid") return SpaceKind::grid;
    if (name == "snowflake_grid") return SpaceKind::snowflake_grid;
    if (name == "ultrametric_tree") return SpaceKind::ultrametric_tree;
    if (name == "cantor_in_grid") return SpaceKind::cantor_in_grid;
    if (name == "outward_cusp") return SpaceKind::outward_cusp;
    if (name == "random_quasimetric") return SpaceKind::random_quasimetric;
    throw std::invalid_argument("unknown space kind: " + name);
}

std::string kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::grid: return "grid";
        case SpaceKind::snowflake_grid: return "snowflake_grid";
        case SpaceKind::ultrametric_tree: return "ultrametric_tree";
        case SpaceKind::cantor_in_grid: return "cantor_in_grid";
        case SpaceKind::outward_cusp: return "outward_cusp";
        case SpaceKind::random_quasimetric: return "random_quasimetric";
    }
    return "";
}

}  // namespace qms
