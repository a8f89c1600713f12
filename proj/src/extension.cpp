#include "qms/extension.hpp"

#include "qms/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qms {

namespace {

double chain_const(const Mat& m) {
    double c = 1.0;
    for (int x = 0; x < m.n; ++x)
        for (int y = 0; y < m.n; ++y) {
            if (x == y) continue;
            for (int z = 0; z < m.n; ++z) {
                double den = std::max(m.at(x, z), m.at(z, y));
                if (den > 0.0) c = std::max(c, m.at(x, y) / den);
            }
        }
    return c;
}

int exp_level_up(double v) {
    // smallest k with v < 2^k, i.e. 2^{k-1} <= v < 2^k
    int e;
    double f = std::frexp(v, &e);
    (void)f;
    return e;
}

}  // namespace

double ExtensionConfig::nan_marker() { return std::numeric_limits<double>::quiet_NaN(); }

ExtensionPipeline build_extension(const QuasiMetricSpace& s, const DomainMask& omega,
                                  ExtensionConfig cfg) {
    if (omega.indices.empty()) throw std::invalid_argument("domain must be nonempty");
    ExtensionPipeline pipe;
    pipe.space = &s;
    pipe.omega = omega;
    if (omega.size() == s.size()) {
        pipe.trivial = true;
        pipe.cfg = cfg;
        return pipe;
    }
    if (!(cfg.s > 0.0) || !(cfg.p > 0.0) || !(cfg.q > 0.0))
        throw std::invalid_argument("exponents must be positive");

    if (std::isnan(cfg.alpha)) {
        double cap = 1.0 / std::max(std::log2(compute_constants(s).c_rho), 1e-9);
        cfg.alpha = std::max(cfg.s, std::min(cap, 4.0 * cfg.s));
    }
    if (cfg.alpha < cfg.s) throw std::invalid_argument("alpha must be at least s");
    if (std::isnan(cfg.epsilon)) cfg.epsilon = cfg.s / 2.0;
    if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < cfg.s))
        throw std::invalid_argument("epsilon outside (0, s)");
    if (std::isnan(cfg.delta)) {
        cfg.delta = (cfg.alpha == cfg.s) ? 0.0
                                         : std::min(cfg.alpha - cfg.s, cfg.s - cfg.epsilon) / 2.0;
    }
    if (std::isnan(cfg.t)) {
        double v = std::min({cfg.p, cfg.q, 1.0}) * 0.9;
        cfg.t = (v < std::min(cfg.p, cfg.q)) ? v : std::min(cfg.p, cfg.q) / 2.0;
    }

    pipe.reg = regularize(s, cfg.alpha);
    pipe.c = chain_const(pipe.reg.matrix);
    if (std::isnan(cfg.theta)) cfg.theta = 2.0 * pipe.c * pipe.c;
    if (std::isnan(cfg.theta_prime)) cfg.theta_prime = (pipe.c + cfg.theta / pipe.c) / 2.0;
    pipe.cfg = cfg;

    pipe.diameter_warning = diameter(s) > 4.0 * pipe.c;
    pipe.c_mu = measure_density(s, omega, 1.0).c_mu;
    pipe.density_warning = pipe.c_mu > 100.0;
    if (cfg.mode == ExtendMode::average) {
        double Q = regularity(s, 1.0).q_exponent;
        if (!(cfg.p > Q / (Q + cfg.s)) || !(cfg.q > Q / (Q + cfg.s)))
            throw std::invalid_argument("averaged gluing needs p, q above Q/(Q+s)");
    }

    std::vector<int> open = complement(s, omega).indices;
    pipe.cover = whitney_cover(s, pipe.reg, open, cfg.theta);
    pipe.partition = partition_of_unity(s, pipe.reg, pipe.cover, cfg.alpha, cfg.theta_prime);

    const Mat& m = pipe.reg.matrix;
    for (size_t j = 0; j < pipe.cover.centers.size(); ++j) {
        int cj = pipe.cover.centers[j];
        int best = omega.indices.front();
        for (int w : omega.indices)
            if (m.at(cj, w) < m.at(cj, best)) best = w;
        pipe.star_center.push_back(best);
        std::vector<int> members;  // nonempty: the anchor sits at distance zero
        for (int w : omega.indices)
            if (m.at(best, w) < pipe.cover.radii[j]) members.push_back(w);
        pipe.star_members.push_back(std::move(members));
    }

    pipe.dist_omega.assign(s.size(), 0.0);
    for (int x = 0; x < s.size(); ++x) {
        if (omega.contains(x)) continue;
        double d = std::numeric_limits<double>::infinity();
        for (int w : omega.indices) d = std::min(d, m.at(x, w));
        pipe.dist_omega[x] = d;
    }

    const double t1 = pipe.c, t2 = 2.0 * pipe.c, a = cfg.alpha;
    pipe.cutoff.assign(s.size(), 0.0);
    for (int x = 0; x < s.size(); ++x) {
        double da = std::pow(pipe.dist_omega[x], a);
        pipe.cutoff[x] =
            std::clamp((std::pow(t2, a) - da) / (std::pow(t2, a) - std::pow(t1, a)), 0.0, 1.0);
        if (pipe.dist_omega[x] < t2) pipe.V.push_back(x);
    }

    pipe.active = active_levels_in(m);
    double lam = std::max(pipe.cover.lambda, cfg.theta);
    pipe.k0 = exp_level_up(16.0 * std::pow(pipe.c, 4.0) * lam * lam);
    return pipe;
}

ExtensionResult extend_with(const ExtensionPipeline& pipe, const std::vector<double>& u) {
    const QuasiMetricSpace& s = *pipe.space;
    ExtensionResult res;
    res.u_ext.assign(s.size(), 0.0);

    bool constant = true;
    double first = u[pipe.omega.indices.front()];
    for (int i : pipe.omega.indices)
        if (u[i] != first) constant = false;
    res.constant_input = constant;

    if (pipe.trivial) {
        for (int i = 0; i < s.size(); ++i) res.u_ext[i] = u[i];
        res.cutoff.assign(s.size(), 1.0);
        res.u_tilde = res.u_ext;
        return res;
    }

    for (int i : pipe.omega.indices) res.u_ext[i] = u[i];
    for (size_t j = 0; j < pipe.cover.centers.size(); ++j) {
        double aj;
        if (pipe.cfg.mode == ExtendMode::median) {
            aj = median(s, u, pipe.star_members[j]);
        } else {
            double mass = 0.0, acc = 0.0;
            for (int w : pipe.star_members[j]) {
                mass += s.weight[w];
                acc += s.weight[w] * u[w];
            }
            aj = acc / mass;
        }
        for (int x = 0; x < s.size(); ++x) {
            if (pipe.omega.contains(x)) continue;
            res.u_ext[x] += pipe.partition.psi[j][x] * aj;
        }
    }

    res.cutoff = pipe.cutoff;
    res.u_tilde.assign(s.size(), 0.0);
    for (int x = 0; x < s.size(); ++x) res.u_tilde[x] = res.cutoff[x] * res.u_ext[x];
    // restriction identity must be bit-exact
    for (int i : pipe.omega.indices) res.u_tilde[i] = u[i];
    return res;
}

ExtensionResult extend(const QuasiMetricSpace& s, const DomainMask& omega,
                       const std::vector<double>& u, const ExtensionConfig& cfg) {
    ExtensionPipeline pipe = build_extension(s, omega, cfg);
    ExtensionResult res = extend_with(pipe, u);
    if (!pipe.trivial) res.grad_ext = extension_gradient(pipe, res.u_ext, GradientSequence{});
    return res;
}

GradientSequence extension_gradient(const ExtensionPipeline& pipe, const std::vector<double>& fu,
                                    const GradientSequence& grad_in) {
    const QuasiMetricSpace& s = *pipe.space;
    const int n = s.size();
    const double t = pipe.cfg.t, delta = pipe.cfg.delta, sx = pipe.cfg.s;

    // zero the incoming levels off the domain
    GradientSequence g = grad_in;
    for (auto& lev : g.values)
        for (int x = 0; x < n; ++x)
            if (!pipe.omega.contains(x)) lev[x] = 0.0;

    GradientSequence h;
    for (int k : pipe.active)
        if (k < pipe.k0) {
            auto& v = h.ensure(k, n);
            double f = std::pow(2.0, (k + 1) * sx);
            for (int x = 0; x < n; ++x) v[x] = f * std::fabs(fu[x]);
        }

    const int hi_active = pipe.active.empty() ? pipe.k0 - 1 : pipe.active.back();
    const int full_top = std::max(pipe.k0 - 1, hi_active);
    std::vector<double> integrand(n);
    for (int k = pipe.k0; k <= full_top; ++k) {
        for (int x = 0; x < n; ++x) {
            double m = 0.0;
            for (size_t l = 0; l < g.level_ids.size(); ++l) {
                int j = g.level_ids[l];
                double v = g.values[l][x];
                if (v <= 0.0) continue;
                m = std::max(m, std::pow(2.0, -std::abs(k - j) * delta * t) * std::pow(v, t));
            }
            integrand[x] = m;
        }
        std::vector<double> mx = maximal_function(s, pipe.reg.matrix, integrand);
        auto& v = h.ensure(k, n);
        for (int x = 0; x < n; ++x) v[x] = std::pow(mx[x], 1.0 / t);
    }

    // beyond the covered band all shifts point one way and the sequence
    // decays geometrically: one maximal-function evaluation, scaled
    if (!g.level_ids.empty()) {
        const int k_from = full_top + 1;
        for (int x = 0; x < n; ++x) {
            double m = 0.0;
            for (size_t l = 0; l < g.level_ids.size(); ++l) {
                int j = g.level_ids[l];
                double v = g.values[l][x];
                if (v <= 0.0) continue;
                m = std::max(m, std::pow(2.0, -std::abs(k_from - j) * delta * t) * std::pow(v, t));
            }
            integrand[x] = m;
        }
        std::vector<double> mx = maximal_function(s, pipe.reg.matrix, integrand);
        bool any = false;
        for (double v : mx)
            if (v > 0.0) any = true;
        if (any) {
            int pad = (delta > 0.0)
                          ? std::min(600, static_cast<int>(std::ceil(
                                              50.0 / (delta * std::min({pipe.cfg.p, pipe.cfg.q, 1.0})))))
                          : 2;
            for (int off = 0; off <= pad; ++off) {
                double fac = std::pow(2.0, -off * delta);
                auto& v = h.ensure(k_from + off, n);
                for (int x = 0; x < n; ++x) v[x] = fac * std::pow(mx[x], 1.0 / t);
            }
        }
    }
    return h;
}

ExtensionReport verify_extension(const ExtensionPipeline& pipe, const std::vector<double>& u,
                                 NormFlavor flavor, const SolveOptions& opts) {
    const QuasiMetricSpace& s = *pipe.space;
    ExtensionReport rep;
    ExtensionResult ext = extend_with(pipe, u);
    rep.constant_input = ext.constant_input;

    rep.restriction_exact = true;
    for (int i : pipe.omega.indices)
        if (ext.u_tilde[i] != u[i]) rep.restriction_exact = false;

    if (pipe.trivial || ext.constant_input) return rep;  // ratios stay at the 0 convention

    // minimal sequence for u on the domain, in the regularized metric
    QuasiMetricSpace dom = subspace(s, pipe.omega.indices);
    Mat dom_metric(dom.size());
    for (int a = 0; a < dom.size(); ++a)
        for (int b = 0; b < dom.size(); ++b)
            dom_metric.at(a, b) = pipe.reg.matrix.at(pipe.omega.indices[a], pipe.omega.indices[b]);
    std::vector<double> u_dom(dom.size());
    for (int a = 0; a < dom.size(); ++a) u_dom[a] = u[pipe.omega.indices[a]];
    NormResult base = minimal_norm_in(dom, dom_metric, u_dom, pipe.cfg.s, pipe.cfg.p, pipe.cfg.q,
                                      flavor, opts);

    // lift the witness to the full point set (zero off the domain)
    GradientSequence g_in;
    for (size_t l = 0; l < base.witness.level_ids.size(); ++l) {
        auto& v = g_in.ensure(base.witness.level_ids[l], s.size());
        for (int a = 0; a < dom.size(); ++a)
            v[pipe.omega.indices[a]] = base.witness.values[l][a];
    }

    GradientSequence h = extension_gradient(pipe, ext.u_ext, g_in);

    // gradient validity on the cutoff neighborhood
    double worst = 0.0;
    const Mat& m = pipe.reg.matrix;
    for (size_t ia = 0; ia < pipe.V.size(); ++ia)
        for (size_t ib = 0; ib < pipe.V.size(); ++ib) {
            int x = pipe.V[ia], y = pipe.V[ib];
            if (x == y) continue;
            double diff = std::fabs(ext.u_ext[x] - ext.u_ext[y]);
            if (diff == 0.0) continue;
            double d = m.at(x, y);
            int k = dyadic_level(d);
            double den = std::pow(d, pipe.cfg.s) * (h.at(k, x) + h.at(k, y));
            double ratio = den > 0.0 ? diff / den : std::numeric_limits<double>::infinity();
            worst = std::max(worst, ratio);
        }
    rep.validity_scale = worst;

    double u_lp = lp_norm_on(s, u, pipe.omega.indices, pipe.cfg.p);
    rep.lp_ratio = lp_norm_on(s, ext.u_ext, pipe.V, pipe.cfg.p) / u_lp;

    double gM = sequence_norm_on(s, g_in, pipe.cfg.p, pipe.cfg.q, NormFlavor::M,
                                 pipe.omega.indices);
    double gN = sequence_norm_on(s, g_in, pipe.cfg.p, pipe.cfg.q, NormFlavor::N,
                                 pipe.omega.indices);
    double hM = sequence_norm_on(s, h, pipe.cfg.p, pipe.cfg.q, NormFlavor::M, pipe.V);
    double hN = sequence_norm_on(s, h, pipe.cfg.p, pipe.cfg.q, NormFlavor::N, pipe.V);
    rep.grad_ratio_M = hM / (gM + u_lp);
    rep.grad_ratio_N = hN / (gN + u_lp);

    NormResult whole = minimal_norm(s, ext.u_tilde, pipe.cfg.s, pipe.cfg.p, pipe.cfg.q, flavor,
                                    opts);
    // quotient of the native-metric norms on both sides; the regularized
    // solve above only feeds the constructed level sequence
    NormResult base_native =
        minimal_norm(dom, u_dom, pipe.cfg.s, pipe.cfg.p, pipe.cfg.q, flavor, opts);
    double num = whole.value + lp_norm(s, ext.u_tilde, pipe.cfg.p);
    double den = base_native.value + u_lp;
    rep.norm_ratio = num / den;
    return rep;
}

GradientSequence multiplier_gradient(const QuasiMetricSpace& s, const Mat& metric,
                                     const std::vector<double>& f, const GradientSequence& grad_f,
                                     const std::vector<double>& Psi, double s_exp, double alpha,
                                     const std::vector<int>& V) {
    const int n = s.size();
    std::vector<char> inV(n, 0);
    for (int i : V) inV[i] = 1;
    double sup = 0.0;
    for (int i = 0; i < n; ++i) sup = std::max(sup, std::fabs(Psi[i]));
    double semi = holder_seminorm(metric, Psi, alpha);

    std::vector<int> levels = active_levels_in(metric);
    for (int k : grad_f.level_ids) levels.push_back(k);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    GradientSequence out;
    if (semi <= 0.0) {  // constant cutoff branch
        for (int k : levels) {
            auto& v = out.ensure(k, n);
            for (int x = 0; x < n; ++x) v[x] = sup * grad_f.at(k, x);
        }
        return out;
    }

    int k_psi;
    {
        int e;
        std::frexp(std::pow(semi, 1.0 / alpha), &e);
        k_psi = e;  // 2^{k_psi - 1} <= semi^{1/alpha} < 2^{k_psi}
    }
    for (int k : levels) {
        auto& v = out.ensure(k, n);
        if (k >= k_psi) {
            double fac = std::pow(2.0, -k * (alpha - s_exp)) * semi;
            for (int x = 0; x < n; ++x)
                v[x] = inV[x] ? std::fabs(f[x]) * fac + grad_f.at(k, x) * sup : 0.0;
        } else {
            double fac = std::pow(2.0, k * s_exp + s_exp + 1.0);
            for (int x = 0; x < n; ++x)
                v[x] = inV[x] ? (fac * std::fabs(f[x]) + grad_f.at(k, x)) * sup : 0.0;
        }
    }
    return out;
}

}  // namespace qms
