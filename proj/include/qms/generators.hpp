#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qms/space.hpp"

namespace qms {

enum class SpaceKind {
    grid,              // uniform points on a segment, Euclidean distance
    snowflake_grid,    // same points, distance |x-y|^{1/eps}
    ultrametric_tree,  // binary-tree leaves, distance 2^{-meet depth}
    cantor_in_grid,    // grid plus the middle-thirds surviving subset as domain
    outward_cusp,      // grid plus a doubly-exponentially sparse domain
    random_quasimetric // seeded asymmetric matrix with entries in [lo, hi]
};

struct GeneratorSpec {
    SpaceKind kind = SpaceKind::grid;
    int n = 64;          // point count (grid kinds)
    double eps = 0.5;    // snowflake parameter: distance = |x-y|^{1/eps}
    int depth = 4;       // tree depth
    int level = 3;       // cantor construction depth (grid size 3^level)
    int cusp_terms = 3;  // number of sparse domain scales
    uint64_t seed = 1;
    double diameter = 1.0;  // normalization target
};

struct GeneratedSpace {
    QuasiMetricSpace space;
    std::optional<DomainMask> omega;
};

GeneratedSpace generate(const GeneratorSpec& spec);

// Deterministic xorshift-style generator used everywhere randomness is needed.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    uint64_t next();
    double uniform(double lo, double hi);
    int uniform_int(int lo, int hi);  // inclusive bounds
};

// seeded helper spaces used by tests and the experiment runner
QuasiMetricSpace random_quasimetric(int n, uint64_t seed, double lo = 0.2, double hi = 1.0);
QuasiMetricSpace random_metric_points(int n, uint64_t seed, int dim = 2);  // Euclidean cloud

SpaceKind parse_kind(const std::string& name);
std::string kind_name(SpaceKind k);

}  // namespace qms
