#include "qms/runner.hpp"

#include <chrono>
#include <filesystem>
#include <stdexcept>

#include "qms/embeddings.hpp"
#include "qms/extension.hpp"
#include "qms/generators.hpp"
#include "qms/io.hpp"
#include "qms/measure.hpp"
#include "qms/metrize.hpp"
#include "qms/norms.hpp"
#include "qms/whitney.hpp"

namespace qms {

const char* kToolVersion = "0.1.0";

namespace {

using nlohmann::json;

SpaceFile load_space(const json& task, const std::string& base_dir) {
    if (task.contains("space_file")) {
        std::filesystem::path p(task["space_file"].get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return read_space_file(p.string());
    }
    if (task.contains("space")) return space_from_json(task["space"]);
    if (task.contains("generate")) {
        const json& g = task["generate"];
        GeneratorSpec spec;
        spec.kind = parse_kind(g.value("kind", "grid"));
        spec.n = g.value("n", 64);
        spec.eps = g.value("eps", 0.5);
        spec.depth = g.value("depth", 4);
        spec.level = g.value("level", 3);
        spec.cusp_terms = g.value("cusp_terms", 3);
        spec.seed = g.value("seed", 1);
        spec.diameter = g.value("diameter", 1.0);
        GeneratedSpace gs = generate(spec);
        SpaceFile f;
        f.space = gs.space;
        f.omega = gs.omega;
        return f;
    }
    throw std::invalid_argument("task carries no space");
}

DomainMask need_omega(const SpaceFile& f, const json& task) {
    if (task.contains("omega")) {
        DomainMask m;
        m.indices = task["omega"].get<std::vector<int>>();
        std::sort(m.indices.begin(), m.indices.end());
        return m;
    }
    if (f.omega) return *f.omega;
    throw std::invalid_argument("task needs a domain");
}

json run_task(const json& task, const std::string& base_dir) {
    const std::string op = task.at("op").get<std::string>();
    json out;
    out["op"] = op;

    if (op == "generate") {
        SpaceFile f = load_space(task, base_dir);
        out["space"] = space_to_json(f.space, f.omega);
        return out;
    }

    SpaceFile f = load_space(task, base_dir);
    const QuasiMetricSpace& s = f.space;

    if (op == "constants") {
        auto c = compute_constants(s);
        out["c_rho"] = c.c_rho;
        out["c_tilde"] = c.c_tilde;
    } else if (op == "metrize") {
        double alpha = task.value("alpha", 1.0);
        RegularizedMetric r = regularize(s, alpha);
        out["alpha"] = alpha;
        out["distortion"] = r.distortion;
        out["collapse"] = r.collapse;
        json rows = json::array();
        for (int i = 0; i < s.size(); ++i) {
            json row = json::array();
            for (int j = 0; j < s.size(); ++j) row.push_back(r.matrix.at(i, j));
            rows.push_back(std::move(row));
        }
        out["matrix"] = std::move(rows);
    } else if (op == "index") {
        double budget = task.value("budget", 2.0);
        std::vector<double> grid = task.contains("alpha_grid")
                                       ? task["alpha_grid"].get<std::vector<double>>()
                                       : default_alpha_grid();
        IndexEstimate e = estimate_index(s, grid, budget);
        out["lower_bound"] = e.lower_bound;
        out["infinite"] = e.infinite;
        out["budget"] = e.budget;
        out["alpha_grid"] = e.alpha_grid;
        out["distortion_curve"] = e.distortion_curve;
        out["bilipschitz_curve"] = e.bilipschitz_curve;
    } else if (op == "regularity") {
        double r_max = task.value("r_max", 1.0);
        RegularityReport rep = regularity(s, r_max, std::nullopt, task.value("ahlfors", false));
        out["c_doubling"] = rep.c_doubling;
        out["Q"] = rep.q_exponent;
        out["kappa"] = rep.q_kappa;
        if (rep.ahlfors) {
            out["ahlfors"] = {{"Q", rep.ahlfors->Q},
                              {"kappa_low", rep.ahlfors->kappa_low},
                              {"kappa_high", rep.ahlfors->kappa_high}};
        }
    } else if (op == "density") {
        DomainMask omega = need_omega(f, task);
        DensityResult d = measure_density(s, omega, task.value("r_max", 1.0));
        out["c_mu"] = d.c_mu;
        out["witness_center"] = d.witness_center;
        out["witness_radius"] = d.witness_radius;
    } else if (op == "perfectness") {
        DomainMask omega = need_omega(f, task);
        PerfectnessResult p = uniform_perfectness(s, omega, task.value("r_max", 1.0));
        out["absent"] = p.absent;
        if (p.lambda) out["lambda"] = *p.lambda;
        out["vacuous_count"] = p.vacuous_count;
    } else if (op == "norm") {
        std::vector<double> u = task.at("u").get<std::vector<double>>();
        NormFlavor flavor = task.value("flavor", "M") == "N" ? NormFlavor::N : NormFlavor::M;
        double p = task.value("p", 2.0), q = task.value("q", 2.0);
        if (task.value("p_inf", false)) p = kInf;
        if (task.value("q_inf", false)) q = kInf;
        NormResult r = minimal_norm(s, u, task.at("s").get<double>(), p, q, flavor);
        out["value"] = r.value;
        out["status"] = r.status == SolveStatus::exact
                            ? "exact"
                            : (r.status == SolveStatus::upper_bound ? "upper_bound" : "degraded");
        out["solver_tolerance"] = r.solver_tolerance;
        if (r.lower_bound) out["lower_bound"] = *r.lower_bound;
        out["witness"] = gradient_to_json(r.witness);
    } else if (op == "whitney") {
        DomainMask omega = need_omega(f, task);
        std::vector<int> open = complement(s, omega).indices;
        double alpha = task.value("alpha", 1.0);
        RegularizedMetric reg = regularize(s, alpha);
        double c = 0.0;
        {
            QuasiMetricSpace tmp = s;
            tmp.dist = reg.matrix;
            c = compute_constants(tmp).c_rho;
        }
        double theta = task.value("theta", 2.0 * c * c);
        WhitneyCover w = whitney_cover(s, reg, open, theta);
        out["centers"] = w.centers;
        out["radii"] = w.radii;
        out["overlap"] = w.overlap;
        out["lambda"] = w.lambda;
        out["neighbor_ratio"] = w.neighbor_ratio;
        out["inflate_factor"] = w.inflate_factor;
    } else if (op == "extend" || op == "verify_extension") {
        DomainMask omega = need_omega(f, task);
        std::vector<double> u = task.at("u").get<std::vector<double>>();
        ExtensionConfig cfg;
        cfg.s = task.value("s", 0.5);
        cfg.p = task.value("p", 2.0);
        cfg.q = task.value("q", 2.0);
        cfg.mode = task.value("mode", "median") == "average" ? ExtendMode::average
                                                             : ExtendMode::median;
        ExtensionPipeline pipe = build_extension(s, omega, cfg);
        if (op == "extend") {
            ExtensionResult r = extend_with(pipe, u);
            out["u_ext"] = r.u_ext;
            out["u_tilde"] = r.u_tilde;
            out["cutoff"] = r.cutoff;
            out["constant_input"] = r.constant_input;
        } else {
            ExtensionReport r = verify_extension(pipe, u);
            out["restriction_exact"] = r.restriction_exact;
            out["constant_input"] = r.constant_input;
            out["validity_scale"] = r.validity_scale;
            out["lp_ratio"] = r.lp_ratio;
            out["grad_ratio_M"] = r.grad_ratio_M;
            out["grad_ratio_N"] = r.grad_ratio_N;
            out["norm_ratio"] = r.norm_ratio;
        }
    } else if (op == "matrix") {
        DomainMask omega = need_omega(f, task);
        MatrixParams mp;
        mp.s = task.value("s", 0.6);
        mp.p = task.value("p", 2.0);
        mp.q = task.value("q", 2.0);
        mp.u_count = task.value("u_count", 20);
        mp.seed = task.value("seed", 1);
        mp.include_extension = task.value("include_extension", true);
        MatrixReport r = characterization_matrix(s, omega, mp);
        out["c_mu"] = r.c_mu;
        out["Q"] = r.Q;
        out["perfect_absent"] = r.perfect_absent;
        if (r.perfect_lambda) out["perfect_lambda"] = *r.perfect_lambda;
        json cells = json::array();
        for (const auto& c : r.cells)
            cells.push_back({{"name", c.name},
                             {"constant", c.constant},
                             {"finite", c.finite},
                             {"note", c.note}});
        out["cells"] = std::move(cells);
        out["seed"] = r.seed;
    } else {
        throw std::invalid_argument("unknown op: " + op);
    }
    return out;
}

}  // namespace

RunOutcome run_manifest_json(const json& manifest, const std::string& base_dir) {
    RunOutcome out;
    auto start = std::chrono::steady_clock::now();
    out.bundle["tool_version"] = kToolVersion;
    out.bundle["config"] = manifest;
    out.bundle["seed"] = manifest.value("seed", 1);
    json results = json::array();
    try {
        if (manifest.contains("tasks"))
            for (const json& task : manifest["tasks"]) results.push_back(run_task(task, base_dir));
    } catch (const IoError&) {
        out.exit_code = 3;
    } catch (const json::exception&) {
        out.exit_code = 3;
    } catch (const std::exception&) {
        out.exit_code = 2;  // violated precondition or construction invariant
    }
    out.bundle["results"] = std::move(results);
    auto end = std::chrono::steady_clock::now();
    out.bundle["runtime_seconds"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count() / 1000.0;
    return out;
}

RunOutcome run_manifest(const std::string& manifest_path) {
    json manifest;
    try {
        manifest = read_json_file(manifest_path);
    } catch (const std::exception&) {
        RunOutcome bad;
        bad.exit_code = 3;
        return bad;
    }
    std::string dir = std::filesystem::path(manifest_path).parent_path().string();
    return run_manifest_json(manifest, dir.empty() ? "." : dir);
}

}  // namespace qms
