#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qms/embeddings.hpp"
#include "qms/extension.hpp"
#include "qms/generators.hpp"
#include "qms/io.hpp"
#include "qms/measure.hpp"
#include "qms/metrize.hpp"
#include "qms/norms.hpp"
#include "qms/runner.hpp"
#include "qms/whitney.hpp"

using qms::json;

namespace {

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << qms::canonical_dump(j);
    else
        qms::write_json_file(out_path, j);
}

qms::SpaceFile load(const std::string& path) { return qms::read_space_file(path); }

qms::DomainMask resolve_omega(const qms::SpaceFile& f, const std::string& omega_path) {
    if (!omega_path.empty()) return qms::read_mask_file(omega_path, f.space.size());
    if (f.omega) return *f.omega;
    throw std::runtime_error("no domain given: pass --omega or embed one in the space file");
}

// minimal polyline plot: one curve of (x, y) samples
void write_svg(const std::string& path, const std::vector<double>& xs,
               const std::vector<double>& ys, const std::string& title) {
    if (xs.empty() || xs.size() != ys.size()) return;
    double xmin = xs.front(), xmax = xs.front(), ymin = ys.front(), ymax = ys.front();
    for (size_t i = 0; i < xs.size(); ++i) {
        xmin = std::min(xmin, xs[i]);
        xmax = std::max(xmax, xs[i]);
        ymin = std::min(ymin, ys[i]);
        ymax = std::max(ymax, ys[i]);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double W = 640, H = 400, pad = 40;
    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<text x='10' y='20'>" << title << "</text>\n<polyline fill='none' stroke='black' points='";
    for (size_t i = 0; i < xs.size(); ++i) {
        double px = pad + (xs[i] - xmin) / (xmax - xmin) * (W - 2 * pad);
        double py = H - pad - (ys[i] - ymin) / (ymax - ymin) * (H - 2 * pad);
        out << px << "," << py << " ";
    }
    out << "'/>\n</svg>\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-metric measure space workbench"};
    app.require_subcommand(1);
    if (const char* th = std::getenv("QMS_THREADS")) (void)th;  // accepted; execution is deterministic

    std::string space_path, omega_path, u_path, out_path;

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "emit a space (and domain) as JSON");
    std::string kind = "grid";
    qms::GeneratorSpec spec;
    gen->add_option("--kind", kind, "grid|snowflake_grid|ultrametric_tree|cantor_in_grid|outward_cusp|random_quasimetric");
    gen->add_option("--n", spec.n);
    gen->add_option("--eps", spec.eps, "snowflake parameter: distance = |x-y|^{1/eps}");
    gen->add_option("--depth", spec.depth);
    gen->add_option("--level", spec.level);
    gen->add_option("--cusp-terms", spec.cusp_terms);
    gen->add_option("--seed", spec.seed);
    gen->add_option("--diameter", spec.diameter);
    gen->add_option("--out", out_path);
    gen->callback([&] {
        spec.kind = qms::parse_kind(kind);
        qms::GeneratedSpace g = qms::generate(spec);
        emit(qms::space_to_json(g.space, g.omega), out_path);
    });

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "space diagnostics");
    analyze->require_subcommand(1);
    double alpha = 1.0, budget = 2.0, r_max = 1.0;
    bool want_ahlfors = false;

    auto* a_const = analyze->add_subcommand("constants", "quasi-metric constants");
    a_const->add_option("--space", space_path)->required();
    a_const->add_option("--out", out_path);
    a_const->callback([&] {
        auto f = load(space_path);
        auto c = qms::compute_constants(f.space);
        emit(json{{"c_rho", c.c_rho}, {"c_tilde", c.c_tilde}}, out_path);
    });

    auto* a_met = analyze->add_subcommand("metrize", "regularized metric at a fixed exponent");
    a_met->add_option("--space", space_path)->required();
    a_met->add_option("--alpha", alpha);
    a_met->add_option("--out", out_path);
    a_met->callback([&] {
        auto f = load(space_path);
        qms::RegularizedMetric r = qms::regularize(f.space, alpha);
        json rows = json::array();
        for (int i = 0; i < f.space.size(); ++i) {
            json row = json::array();
            for (int j = 0; j < f.space.size(); ++j) row.push_back(r.matrix.at(i, j));
            rows.push_back(std::move(row));
        }
        emit(json{{"alpha", r.alpha},
                  {"distortion", r.distortion},
                  {"collapse", r.collapse},
                  {"matrix", rows}},
             out_path);
    });

    auto* a_idx = analyze->add_subcommand("index", "smoothness index lower bound");
    a_idx->add_option("--space", space_path)->required();
    a_idx->add_option("--budget", budget);
    a_idx->add_option("--out", out_path);
    std::string svg_path;
    a_idx->add_option("--svg", svg_path, "write the distortion curve as SVG");
    a_idx->callback([&] {
        auto f = load(space_path);
        qms::IndexEstimate e = qms::estimate_index(f.space, qms::default_alpha_grid(), budget);
        emit(json{{"lower_bound", e.lower_bound},
                  {"infinite", e.infinite},
                  {"budget", e.budget},
                  {"alpha_grid", e.alpha_grid},
                  {"distortion_curve", e.distortion_curve},
                  {"bilipschitz_curve", e.bilipschitz_curve}},
             out_path);
        if (!svg_path.empty()) write_svg(svg_path, e.alpha_grid, e.distortion_curve, "distortion vs alpha");
    });

    auto* a_reg = analyze->add_subcommand("regularity", "doubling and volume bounds");
    a_reg->add_option("--space", space_path)->required();
    a_reg->add_option("--r-max", r_max);
    a_reg->add_flag("--ahlfors", want_ahlfors);
    a_reg->add_option("--out", out_path);
    a_reg->callback([&] {
        auto f = load(space_path);
        qms::RegularityReport rep = qms::regularity(f.space, r_max, std::nullopt, want_ahlfors);
        json j{{"c_doubling", rep.c_doubling}, {"Q", rep.q_exponent}, {"kappa", rep.q_kappa}};
        if (rep.ahlfors)
            j["ahlfors"] = {{"Q", rep.ahlfors->Q},
                            {"kappa_low", rep.ahlfors->kappa_low},
                            {"kappa_high", rep.ahlfors->kappa_high}};
        emit(j, out_path);
    });

    auto* a_den = analyze->add_subcommand("density", "measure density constant of a domain");
    a_den->add_option("--space", space_path)->required();
    a_den->add_option("--omega", omega_path);
    a_den->add_option("--r-max", r_max);
    a_den->add_option("--out", out_path);
    a_den->callback([&] {
        auto f = load(space_path);
        auto d = qms::measure_density(f.space, resolve_omega(f, omega_path), r_max);
        emit(json{{"c_mu", d.c_mu},
                  {"witness_center", d.witness_center},
                  {"witness_radius", d.witness_radius}},
             out_path);
    });

    auto* a_per = analyze->add_subcommand("perfectness", "annulus population constant");
    a_per->add_option("--space", space_path)->required();
    a_per->add_option("--omega", omega_path);
    a_per->add_option("--r-max", r_max);
    a_per->add_option("--out", out_path);
    a_per->callback([&] {
        auto f = load(space_path);
        auto p = qms::uniform_perfectness(f.space, resolve_omega(f, omega_path), r_max);
        json j{{"absent", p.absent}, {"vacuous_count", p.vacuous_count}};
        if (p.lambda) j["lambda"] = *p.lambda;
        if (p.witness_center >= 0)
            j["witness"] = {{"center", p.witness_center}, {"radius", p.witness_radius}};
        emit(j, out_path);
    });

    // ---- norm ----
    auto* nrm = app.add_subcommand("norm", "minimal mixed norm of a function");
    std::string flavor = "M";
    double s_exp = 0.5, p_exp = 2.0, q_exp = 2.0;
    bool p_inf = false, q_inf = false;
    nrm->add_option("--space", space_path)->required();
    nrm->add_option("--u", u_path)->required();
    nrm->add_option("--flavor", flavor, "M|N");
    nrm->add_option("--s", s_exp)->required();
    nrm->add_option("--p", p_exp);
    nrm->add_option("--q", q_exp);
    nrm->add_flag("--p-inf", p_inf);
    nrm->add_flag("--q-inf", q_inf);
    nrm->add_option("--out", out_path);
    nrm->callback([&] {
        auto f = load(space_path);
        auto u = qms::read_function_file(u_path, f.space.size());
        qms::NormResult r = qms::minimal_norm(
            f.space, u, s_exp, p_inf ? qms::kInf : p_exp, q_inf ? qms::kInf : q_exp,
            flavor == "N" ? qms::NormFlavor::N : qms::NormFlavor::M);
        json j{{"value", r.value},
               {"status", r.status == qms::SolveStatus::exact
                              ? "exact"
                              : (r.status == qms::SolveStatus::upper_bound ? "upper_bound"
                                                                           : "degraded")},
               {"solver_tolerance", r.solver_tolerance},
               {"witness", qms::gradient_to_json(r.witness)}};
        if (r.lower_bound) j["lower_bound"] = *r.lower_bound;
        emit(j, out_path);
    });

    // ---- whitney ----
    auto* wh = app.add_subcommand("whitney", "cover an open set with controlled balls");
    std::string open_path;
    double theta = 0.0;
    wh->add_option("--space", space_path)->required();
    wh->add_option("--open", open_path, "JSON index list of the open set")->required();
    wh->add_option("--theta", theta, "dilation (default 2 c^2)");
    wh->add_option("--alpha", alpha);
    wh->add_option("--out", out_path);
    wh->callback([&] {
        auto f = load(space_path);
        qms::DomainMask open_mask = qms::read_mask_file(open_path, f.space.size());
        qms::RegularizedMetric reg = qms::regularize(f.space, alpha);
        qms::QuasiMetricSpace tmp = f.space;
        tmp.dist = reg.matrix;
        double c = qms::compute_constants(tmp).c_rho;
        double th = theta > 0.0 ? theta : 2.0 * c * c;
        qms::WhitneyCover w = qms::whitney_cover(f.space, reg, open_mask.indices, th);
        double tp = (c + th / c) / 2.0;
        qms::PartitionOfUnity pu = qms::partition_of_unity(f.space, reg, w, alpha, tp);
        json psi = json::array();
        for (const auto& row : pu.psi) psi.push_back(row);
        emit(json{{"centers", w.centers},
                  {"radii", w.radii},
                  {"theta", w.theta},
                  {"lambda", w.lambda},
                  {"overlap", w.overlap},
                  {"neighbor_ratio", w.neighbor_ratio},
                  {"inflate_factor", w.inflate_factor},
                  {"c_star", pu.c_star},
                  {"psi", psi}},
             out_path);
    });

    // ---- extend / verify-extension ----
    for (bool verify : {false, true}) {
        auto* ex = app.add_subcommand(verify ? "verify-extension" : "extend",
                                      verify ? "extension with the control report"
                                             : "Whitney-type extension of a domain function");
        std::string mode = "median";
        ex->add_option("--space", space_path)->required();
        ex->add_option("--omega", omega_path);
        ex->add_option("--u", u_path)->required();
        ex->add_option("--s", s_exp)->required();
        ex->add_option("--p", p_exp);
        ex->add_option("--q", q_exp);
        ex->add_option("--mode", mode, "median|average");
        ex->add_option("--out", out_path);
        ex->callback([&, verify] {
            auto f = load(space_path);
            auto u = qms::read_function_file(u_path, f.space.size());
            qms::ExtensionConfig cfg;
            cfg.s = s_exp;
            cfg.p = p_exp;
            cfg.q = q_exp;
            cfg.mode = mode == "average" ? qms::ExtendMode::average : qms::ExtendMode::median;
            qms::ExtensionPipeline pipe =
                qms::build_extension(f.space, resolve_omega(f, omega_path), cfg);
            if (!verify) {
                qms::ExtensionResult r = qms::extend_with(pipe, u);
                emit(json{{"u_ext", r.u_ext},
                          {"u_tilde", r.u_tilde},
                          {"cutoff", r.cutoff},
                          {"constant_input", r.constant_input}},
                     out_path);
            } else {
                qms::ExtensionReport r = qms::verify_extension(pipe, u);
                emit(json{{"restriction_exact", r.restriction_exact},
                          {"constant_input", r.constant_input},
                          {"validity_scale", r.validity_scale},
                          {"lp_ratio", r.lp_ratio},
                          {"grad_ratio_M", r.grad_ratio_M},
                          {"grad_ratio_N", r.grad_ratio_N},
                          {"norm_ratio", r.norm_ratio}},
                     out_path);
            }
        });
    }

    // ---- check ----
    auto* check = app.add_subcommand("check", "embedding statements");
    check->require_subcommand(1);

    auto* c_emb = check->add_subcommand("embeddings", "ball embedding rows for a function");
    int center = 0;
    double radius = 1.0, eps_b = 0.0;
    int family_count = 0;
    uint64_t family_seed = 1;
    std::string csv_path;
    c_emb->add_option("--space", space_path)->required();
    c_emb->add_option("--u", u_path, "single function (omit with --family)");
    c_emb->add_option("--family", family_count, "run a seeded family instead of one function");
    c_emb->add_option("--family-seed", family_seed);
    c_emb->add_option("--csv", csv_path, "write per-ball rows as CSV");
    c_emb->add_option("--center", center);
    c_emb->add_option("--radius", radius);
    c_emb->add_option("--s", s_exp)->required();
    c_emb->add_option("--p", p_exp);
    c_emb->add_option("--q", q_exp);
    c_emb->add_option("--eps", eps_b, "switch to the Besov-scale variant");
    c_emb->add_option("--out", out_path);
    c_emb->callback([&] {
        auto f = load(space_path);
        if (family_count > 0) {
            qms::EmbeddingReport rep = qms::embedding_report(
                f.space, s_exp, p_exp, q_exp, qms::NormFlavor::M, family_count, family_seed);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                csv << "center,radius,lhs,rhs_core,constant,degenerate\n";
                for (const auto& row : rep.rows)
                    csv << row.center << "," << row.radius << "," << row.lhs << ","
                        << row.rhs_core << "," << row.constant << "," << row.degenerate << "\n";
            }
            emit(json{{"regime", rep.regime == qms::Regime::subcritical
                                     ? "subcritical"
                                     : (rep.regime == qms::Regime::critical ? "critical"
                                                                            : "supercritical")},
                      {"rows", rep.rows.size()},
                      {"max_constant", rep.max_constant},
                      {"median_constant", rep.median_constant},
                      {"family", rep.family}},
                 out_path);
            return;
        }
        if (u_path.empty()) throw std::runtime_error("pass --u or --family");
        auto u = qms::read_function_file(u_path, f.space.size());
        double Q = qms::regularity(f.space, 1.0).q_exponent;
        qms::EmbeddingRow row;
        if (eps_b > 0.0) {
            row = qms::besov_epsilon_check(f.space, u, center, radius, s_exp, eps_b, p_exp, q_exp, Q);
        } else {
            qms::Regime reg = qms::classify_regime(p_exp, Q, s_exp);
            if (reg == qms::Regime::subcritical)
                row = qms::poincare_check(f.space, u, center, radius, s_exp, p_exp, q_exp, Q,
                                          qms::NormFlavor::M);
            else if (reg == qms::Regime::critical)
                row = qms::trudinger_check(f.space, u, center, radius, s_exp, q_exp, Q,
                                           {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2});
            else
                row = qms::holder_check(f.space, u, center, radius, s_exp, p_exp, q_exp, Q);
        }
        emit(json{{"center", row.center},
                  {"radius", row.radius},
                  {"lhs", row.lhs},
                  {"rhs_core", row.rhs_core},
                  {"constant", row.constant},
                  {"regime", row.regime == qms::Regime::subcritical
                                 ? "subcritical"
                                 : (row.regime == qms::Regime::critical ? "critical"
                                                                        : "supercritical")},
                  {"degenerate", row.degenerate},
                  {"note", row.note}},
             out_path);
    });

    auto* c_mat = check->add_subcommand("matrix", "characterization cells for a domain");
    int u_count = 20;
    uint64_t seed = 1;
    std::string matrix_svg;
    c_mat->add_option("--space", space_path)->required();
    c_mat->add_option("--omega", omega_path);
    c_mat->add_option("--s", s_exp);
    c_mat->add_option("--p", p_exp);
    c_mat->add_option("--q", q_exp);
    c_mat->add_option("--u-count", u_count);
    c_mat->add_option("--seed", seed);
    c_mat->add_option("--out", out_path);
    c_mat->add_option("--svg", matrix_svg, "cell constants as a bar-style polyline");
    std::string matrix_csv;
    c_mat->add_option("--csv", matrix_csv, "write cells as CSV rows");
    c_mat->callback([&] {
        auto f = load(space_path);
        qms::MatrixParams mp;
        mp.s = s_exp;
        mp.p = p_exp;
        mp.q = q_exp;
        mp.u_count = u_count;
        mp.seed = seed;
        qms::MatrixReport r =
            qms::characterization_matrix(f.space, resolve_omega(f, omega_path), mp);
        json cells = json::array();
        std::vector<double> xs, ys;
        for (size_t i = 0; i < r.cells.size(); ++i) {
            cells.push_back({{"name", r.cells[i].name},
                             {"constant", r.cells[i].constant},
                             {"finite", r.cells[i].finite},
                             {"note", r.cells[i].note}});
            xs.push_back(static_cast<double>(i));
            ys.push_back(r.cells[i].constant);
        }
        json j{{"c_mu", r.c_mu}, {"Q", r.Q}, {"perfect_absent", r.perfect_absent},
               {"cells", cells}, {"seed", r.seed}};
        if (r.perfect_lambda) j["perfect_lambda"] = *r.perfect_lambda;
        emit(j, out_path);
        if (!matrix_svg.empty()) write_svg(matrix_svg, xs, ys, "matrix cell constants");
        if (!matrix_csv.empty()) {
            std::ofstream csv(matrix_csv);
            csv << "cell,constant,finite\n";
            for (const auto& c : r.cells)
                csv << c.name << "," << c.constant << "," << c.finite << "\n";
        }
    });

    // ---- run ----
    auto* run = app.add_subcommand("run", "execute a task manifest");
    std::string manifest_path;
    run->add_option("manifest", manifest_path)->required();
    run->add_option("--out", out_path);
    run->callback([&] {
        qms::RunOutcome o = qms::run_manifest(manifest_path);
        if (o.exit_code == 0) emit(o.bundle, out_path);
        std::exit(o.exit_code);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const qms::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
