#include "nlsa/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <vector>

#include <CLI11.hpp>

#include "nlsa/errors.hpp"
#include "nlsa/estimates.hpp"
#include "nlsa/json_io.hpp"
#include "nlsa/oscillatory.hpp"
#include "nlsa/parallel.hpp"
#include "nlsa/picard.hpp"
#include "nlsa/random_fields.hpp"

namespace nlsa::cli {

namespace fs = std::filesystem;
using io::ConfigNode;
using io::format_double;
using io::json;
using io::number;

namespace {

constexpr std::uint64_t kDefaultSeed = 7;

struct RunContext {
    const Options& opt;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit RunContext(const Options& o) : opt(o), threads(resolve_threads(o.threads)) {}

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return opt.out / name;
    }
};

std::uint64_t resolve_seed(const Options& opt, const ConfigNode& root) {
    if (opt.seed) return *opt.seed;
    const int s = root.integer("seed", static_cast<int>(kDefaultSeed), 0);
    return static_cast<std::uint64_t>(s);
}

// The manifest holds only run inputs and outcome, so reruns reproduce it
// byte for byte; wall-clock time lives in timing.json.
int finish(RunContext& ctx, const std::string& status, int code) {
    json m;
    m["command"] = ctx.opt.command;
    m["config_path"] = ctx.opt.config.string();
    m["output_dir"] = ctx.opt.out.string();
    m["seed"] = ctx.seed;
    m["tool_version"] = kToolVersion;
    m["status"] = status;
    m["exit_code"] = code;
    m["outputs"] = ctx.outputs;
    io::write_json(ctx.opt.out / "manifest.json", m);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    io::write_json(ctx.opt.out / "timing.json", json{{"wall_seconds", secs}, {"threads", ctx.threads}});
    return code;
}

void prepare_out(const Options& opt) {
    if (opt.out.empty()) throw ConfigError("--out", "output directory required");
    std::error_code ec;
    fs::create_directories(opt.out, ec);
    if (ec) throw ConfigError("--out", "cannot create " + opt.out.string() + ": " + ec.message());
}

EquationParams parse_equation(const ConfigNode& n) {
    n.allow_only({"preset", "coupling", "a", "b", "c", "d", "e", "m", "s"});
    EquationParams p;
    if (n.has("preset")) {
        try {
            p = reduction_preset(n.string("preset", ""), n.complex("coupling", 1.0));
        } catch (const InvalidParameter& e) {
            throw ConfigError(n.path() + ".preset", e.what());
        }
    }
    p.a = n.number("a", p.a);
    p.b = n.number("b", p.b);
    p.c = n.complex("c", p.c);
    p.d = n.complex("d", p.d);
    p.e = n.complex("e", p.e);
    p.m = n.number("m", p.m);
    p.s = n.number("s", p.s);
    if (!(p.m >= 0.0 && p.m < 1.0)) throw ConfigError(n.path() + ".m", "must lie in [0, 1)");
    if (!(p.s >= 0.0)) throw ConfigError(n.path() + ".s", "must be nonnegative");
    return p;
}

Grid parse_grid(const ConfigNode& n, Grid fallback) {
    n.allow_only({"length", "num_points"});
    const double L = n.positive("length", fallback.length);
    const int N = n.integer("num_points", fallback.num_points, 8);
    if (N % 2) throw ConfigError(n.path() + ".num_points", "must be even");
    return Grid(N, L);
}

ExponentTuple parse_exponents(const ConfigNode& n, ExponentTuple ex) {
    n.allow_only({"p", "q", "p1", "q1", "p2", "q2"});
    ex.p = n.exponent("p", ex.p);
    ex.q = n.exponent("q", ex.q);
    ex.p1 = n.exponent("p1", ex.p1);
    ex.q1 = n.exponent("q1", ex.q1);
    ex.p2 = n.exponent("p2", ex.p2);
    ex.q2 = n.exponent("q2", ex.q2);
    try {
        ex.validate(true);
    } catch (const ExponentMismatch& e) {
        throw ConfigError(n.path(), e.what());
    }
    return ex;
}

void write_histories(const fs::path& path, const std::vector<double>& times, const NormReport& r) {
    io::CsvTable t;
    t.header = {"t", "h_quarter", "weighted"};
    for (std::size_t k = 0; k < times.size(); ++k)
        t.rows.push_back({format_double(times[k]), format_double(r.h_quarter_history[k]),
                          format_double(r.weighted_history[k])});
    t.write(path);
}

// ---- solve ----------------------------------------------------------------

struct SolveSetup {
    EquationParams params;
    Grid grid{1024, 60.0};
    double T = 0.05;
    bool auto_T = false;
    double T_max = 1.0;
    double C = 1.0, theta = 0.25;
    PicardConfig picard;
    int scan_levels = 0;
    std::string kind = "sech";
    std::string soliton = "mKdV";
    double amplitude = 1.0, shift = 0.0, width = 1.0;
    int frame_stride = 1;
};

SolveSetup parse_solve(const ConfigNode& root) {
    root.allow_only({"equation", "grid", "time", "picard", "constants", "initial", "output", "seed"});
    SolveSetup s;
    if (root.has("initial")) {
        const ConfigNode n = root.child("initial");
        n.allow_only({"kind", "soliton", "amplitude", "shift", "width"});
        s.kind = n.string("kind", s.kind);
        static const std::set<std::string> kinds{"sech", "gaussian", "soliton", "zero", "random"};
        if (!kinds.count(s.kind)) throw ConfigError(n.path() + ".kind", "expected sech, gaussian, soliton, zero or random");
        s.soliton = n.string("soliton", s.soliton);
        if (s.soliton != "NLS" && s.soliton != "mKdV") throw ConfigError(n.path() + ".soliton", "expected NLS or mKdV");
        s.amplitude = n.number("amplitude", s.amplitude);
        s.shift = n.number("shift", s.shift);
        s.width = n.positive("width", s.width);
        if (s.kind == "soliton" && !(s.amplitude > 0.0)) throw ConfigError(n.path() + ".amplitude", "must be positive");
    }
    if (root.has("equation")) {
        s.params = parse_equation(root.child("equation"));
    } else if (s.kind == "soliton") {
        s.params = soliton_params(s.soliton);
    } else {
        throw ConfigError("$.equation", "missing required object");
    }
    if (root.has("grid")) s.grid = parse_grid(root.child("grid"), s.grid);
    if (root.has("time")) {
        const ConfigNode n = root.child("time");
        n.allow_only({"T", "K", "T_max"});
        if (n.has("T") && n.raw()["T"].is_string()) {
            if (n.string("T", "") != "auto") throw ConfigError(n.path() + ".T", "expected a positive number or \"auto\"");
            s.auto_T = true;
        } else {
            s.T = n.positive("T", s.T);
        }
        s.T_max = n.positive("T_max", s.T_max);
        s.picard.time_nodes = n.integer("K", s.picard.time_nodes, 2);
    }
    if (root.has("picard")) {
        const ConfigNode n = root.child("picard");
        n.allow_only({"max_iterations", "tolerance", "substeps", "dealias", "full_derivative_mode", "rule", "scan_levels"});
        s.picard.max_iterations = n.integer("max_iterations", s.picard.max_iterations, 1);
        s.picard.xt_tolerance = n.positive("tolerance", s.picard.xt_tolerance);
        s.picard.substeps = n.integer("substeps", s.picard.substeps, 1);
        s.picard.dealias = n.boolean("dealias", s.picard.dealias);
        s.picard.full_derivative_mode = n.boolean("full_derivative_mode", s.picard.full_derivative_mode);
        const std::string rule = n.string("rule", "product");
        if (rule == "product") s.picard.rule = DuhamelRule::Product;
        else if (rule == "trapezoid") s.picard.rule = DuhamelRule::Trapezoid;
        else throw ConfigError(n.path() + ".rule", "expected product or trapezoid");
        s.scan_levels = n.integer("scan_levels", 0, 0);
        if (s.scan_levels == 1) throw ConfigError(n.path() + ".scan_levels", "a fit needs at least 2 levels");
        if (s.picard.full_derivative_mode && !s.params.derivative_terms_combine())
            throw ConfigError(n.path() + ".full_derivative_mode", "requires d = 2e");
    }
    if (root.has("constants")) {
        const ConfigNode n = root.child("constants");
        n.allow_only({"C", "theta"});
        s.C = n.positive("C", s.C);
        s.theta = n.positive("theta", s.theta);
    }
    if (root.has("output")) {
        const ConfigNode n = root.child("output");
        n.allow_only({"frame_stride"});
        s.frame_stride = n.integer("frame_stride", 1, 1);
    }
    return s;
}

GridFunction initial_data(const SolveSetup& s, std::uint64_t seed) {
    const Grid& g = s.grid;
    if (s.kind == "soliton") return soliton_oracle(s.soliton, s.amplitude, s.shift, g, {0.0}).frame(0);
    if (s.kind == "zero") return GridFunction(g);
    if (s.kind == "random") {
        RandomFieldSpec spec;
        spec.amplitude = s.amplitude;
        return random_field(spec, seed, 0, g);
    }
    const double A = s.amplitude, x0 = s.shift, w = s.width;
    if (s.kind == "gaussian")
        return GridFunction::sample(g, [&](double x) { return cplx(A * std::exp(-std::pow((x - x0) / w, 2)), 0.0); });
    return GridFunction::sample(g, [&](double x) { return cplx(A / std::cosh((x - x0) / w), 0.0); });
}

}  // namespace

int cmd_solve(const Options& opt) {
    const json doc = io::read_json(opt.config);
    const ConfigNode root(doc, "$");
    SolveSetup s = parse_solve(root);
    prepare_out(opt);
    RunContext ctx(opt);
    ctx.seed = resolve_seed(opt, root);

    const GridFunction u0 = initial_data(s, ctx.seed);
    const auto [rho, T_auto] = choose_rho_T(u0, s.params, s.C, s.theta, s.auto_T ? s.T_max : s.T);
    const double T = s.auto_T ? T_auto : s.T;

    json summary;
    summary["params"] = io::to_json(s.params);
    summary["grid"] = io::to_json(s.grid);
    summary["T"] = number(T);
    summary["K"] = s.picard.time_nodes;
    try {
        auto [u, rep] = picard_iterate(u0, T, s.params, s.picard);
        rep.rho = rho;
        if (s.scan_levels >= 2) {
            const ContractionScan scan = contraction_scan(u0, T, s.params, s.picard, s.scan_levels);
            rep.theta_fit = scan.theta;
            rep.theta_fitted = scan.theta != 0.0;
            summary["scan"] = json{{"T", scan.Ts}, {"ratio", scan.ratios}};
        }
        const PersistenceReport pers = persistence_report(u, s.params);

        io::CsvTable sol;
        sol.header = {"t", "x", "re", "im"};
        for (int k = 0; k < u.num_times(); k += s.frame_stride)
            for (int j = 0; j < s.grid.num_points; ++j)
                sol.rows.push_back({format_double(u.times[k]), format_double(s.grid.point(j)),
                                    format_double(u.data(j, k).real()), format_double(u.data(j, k).imag())});
        sol.write(ctx.file("solution.csv"));
        write_histories(ctx.file("norm_history.csv"), u.times, pers.norms);
        io::write_json(ctx.file("norms.json"), io::to_json(pers.norms));
        io::write_json(ctx.file("contraction.json"), io::to_json(rep));

        summary["converged"] = rep.converged;
        summary["iterations"] = rep.iterations;
        summary["h_quarter_spread"] = number(pers.h_spread);
        summary["weighted_spread"] = number(pers.weighted_spread);
        if (s.kind == "soliton") {
            const GridFunction ref = soliton_oracle(s.soliton, s.amplitude, s.shift, s.grid, {0.0, T}).frame(1);
            const GridFunction last = u.frame(u.num_times() - 1);
            summary["soliton_relative_l2_error"] = number((last - ref).l2_norm() / ref.l2_norm());
        }
        if (!rep.converged) {
            summary["status"] = "no-convergence";
            io::write_json(ctx.file("summary.json"), summary);
            std::cerr << "solve: Picard iteration did not reach the tolerance in " << rep.iterations
                      << " iterations\n";
            return finish(ctx, "no-convergence", kNonContraction);
        }
        summary["status"] = "converged";
        io::write_json(ctx.file("summary.json"), summary);
        return finish(ctx, "converged", kOk);
    } catch (const NonContraction& e) {
        summary["status"] = "non-contraction";
        summary["diagnostic"] = e.what();
        io::write_json(ctx.file("summary.json"), summary);
        std::cerr << "solve: non-contraction: " << e.what() << "\n";
        return finish(ctx, "non-contraction", kNonContraction);
    }
}

// ---- verify-oscillatory ---------------------------------------------------

namespace {

ProbeParams parse_probe(const ConfigNode& n) {
    n.allow_only({"a", "b", "t", "omega", "m", "xi"});
    ProbeParams p;
    p.a = n.number("a");
    p.b = n.number("b");
    p.t = n.positive("t", 1.0);
    p.omega = n.positive("omega", 1024.0);
    p.m = n.number("m", p.m);
    p.xi = n.number("xi");
    if (p.b == 0.0) throw ConfigError(n.path() + ".b", "must be nonzero");
    if (!(p.m >= 0.0 && p.m < 1.0)) throw ConfigError(n.path() + ".m", "must lie in [0, 1)");
    if (!hypothesis_holds(p))
        throw ConfigError(n.path(), "hypothesis omega / (|b| t) >= max(1, 1e4 (a / 2b)^2) violated");
    return p;
}

std::vector<std::string> osc_row(const ProbeParams& p, RegionLabel label, std::optional<cplx> direct,
                                 std::optional<cplx> contour, double ratio, bool converged) {
    const double nan = std::nan("");
    const cplx d = direct.value_or(cplx(nan, nan)), c = contour.value_or(cplx(nan, nan));
    return {format_double(p.a),    format_double(p.b),     format_double(p.t),    format_double(p.omega),
            format_double(p.m),    format_double(p.xi),    label_name(label),     format_double(d.real()),
            format_double(d.imag()), format_double(c.real()), format_double(c.imag()), format_double(ratio),
            converged ? "true" : "false"};
}

const std::vector<std::string> kOscHeader{"a", "b", "t", "omega", "m", "xi", "label", "re_direct", "im_direct",
                                          "re_contour", "im_contour", "ratio", "converged"};

double probe_ratio(const ProbeParams& p, RegionLabel label, cplx value) {
    return std::abs(value) * bound_scale(label, p.omega, p.m) / (1.0 + p.t);
}

json bound_summary(const BoundCheckResult& r) {
    json j;
    j["probes"] = r.records.size();
    j["skipped_combos"] = r.skipped_combos;
    j["max_near_far"] = number(r.max_near_far);
    j["max_intermediate"] = number(r.max_intermediate);
    j["max_near_far_raw"] = number(r.max_near_far_raw);
    j["max_intermediate_raw"] = number(r.max_intermediate_raw);
    j["within_ceiling"] = r.within_ceiling;
    j["all_converged"] = r.all_converged;
    return j;
}

void bound_rows(io::CsvTable& t, const BoundCheckResult& r) {
    for (const ProbeRecord& rec : r.records)
        t.rows.push_back(osc_row(rec.params, rec.label, rec.has_direct ? std::optional<cplx>(rec.direct) : std::nullopt,
                                 rec.has_contour ? std::optional<cplx>(rec.contour) : std::nullopt, rec.ratio,
                                 rec.converged));
}

}  // namespace

int cmd_verify_oscillatory(const Options& opt) {
    const json doc = io::read_json(opt.config);
    const ConfigNode root(doc, "$");
    root.allow_only({"mode", "epsilon_near", "ceiling_near_far", "ceiling_intermediate", "probes", "sweep", "seed"});
    const std::string mode = root.string("mode", "probes");
    if (mode != "probes" && mode != "sweep" && mode != "cauchy")
        throw ConfigError("$.mode", "expected probes, sweep or cauchy");
    const double eps = root.positive("epsilon_near", 0.1);
    if (eps >= 1.0) throw ConfigError("$.epsilon_near", "must be below 1");
    const double ceil_nf = root.positive("ceiling_near_far", 1.0);
    const double ceil_int = root.positive("ceiling_intermediate", 10.0);

    std::vector<ProbeParams> probes;
    if (root.has("probes"))
        for (const ConfigNode& n : root.items("probes")) probes.push_back(parse_probe(n));
    if (mode == "probes" && probes.empty()) throw ConfigError("$.probes", "probes mode needs at least one probe");

    SweepSpec spec = SweepSpec::prop31_default();
    spec.epsilon_near = eps;
    spec.ceiling_near_far = ceil_nf;
    spec.ceiling_intermediate = ceil_int;
    bool refine = false;
    if (root.has("sweep")) {
        const ConfigNode n = root.child("sweep");
        n.allow_only({"omegas", "ts", "as", "bs", "ms", "near_per_combo", "intermediate_per_combo", "band_intervals",
                      "far_per_combo", "refine"});
        spec.omegas = n.numbers("omegas", spec.omegas);
        spec.ts = n.numbers("ts", spec.ts);
        spec.as = n.numbers("as", spec.as);
        spec.bs = n.numbers("bs", spec.bs);
        spec.ms = n.numbers("ms", spec.ms);
        spec.near_per_combo = n.integer("near_per_combo", spec.near_per_combo, 0);
        spec.intermediate_per_combo = n.integer("intermediate_per_combo", spec.intermediate_per_combo, 0);
        spec.band_intervals = n.integer("band_intervals", spec.band_intervals, 0);
        spec.far_per_combo = n.integer("far_per_combo", spec.far_per_combo, 0);
        refine = n.boolean("refine", false);
        for (std::size_t i = 0; i < spec.bs.size(); ++i)
            if (spec.bs[i] == 0.0) throw ConfigError(n.path() + ".bs[" + std::to_string(i) + "]", "must be nonzero");
        for (std::size_t i = 0; i < spec.omegas.size(); ++i)
            if (!(spec.omegas[i] > 0.0)) throw ConfigError(n.path() + ".omegas[" + std::to_string(i) + "]", "must be positive");
        for (std::size_t i = 0; i < spec.ts.size(); ++i)
            if (!(spec.ts[i] > 0.0)) throw ConfigError(n.path() + ".ts[" + std::to_string(i) + "]", "must be positive");
        for (std::size_t i = 0; i < spec.ms.size(); ++i)
            if (!(spec.ms[i] >= 0.0 && spec.ms[i] < 1.0))
                throw ConfigError(n.path() + ".ms[" + std::to_string(i) + "]", "must lie in [0, 1)");
    }

    prepare_out(opt);
    RunContext ctx(opt);
    ctx.seed = resolve_seed(opt, root);
    io::CsvTable table;
    table.header = kOscHeader;
    json summary;
    summary["mode"] = mode;
    bool ok = true;

    if (mode == "sweep") {
        const BoundCheckResult r = bound_check_prop31(spec, ctx.threads);
        bound_rows(table, r);
        summary["base"] = bound_summary(r);
        ok = r.within_ceiling && r.all_converged;
        if (refine) {
            const BoundCheckResult rr = bound_check_prop31(spec.refined(), ctx.threads);
            io::CsvTable t2;
            t2.header = kOscHeader;
            bound_rows(t2, rr);
            t2.write(ctx.file("oscillatory_refined.csv"));
            summary["refined"] = bound_summary(rr);
            auto drift = [](double a, double b) { return a > 0.0 ? std::abs(b - a) / a : 0.0; };
            summary["drift_near_far"] = number(drift(r.max_near_far, rr.max_near_far));
            summary["drift_intermediate"] = number(drift(r.max_intermediate, rr.max_intermediate));
            ok = ok && rr.within_ceiling && rr.all_converged;
        }
    } else if (mode == "cauchy") {
        if (probes.empty()) probes = cauchy_probe_set();
        CauchyOptions co;
        co.epsilon_near = eps;
        for (std::size_t i = 0; i < probes.size(); ++i)
            if (classify(probes[i]) == RegionLabel::Intermediate)
                throw ConfigError("$.probes[" + std::to_string(i) + "]", "cauchy mode takes Near and Far probes only");
        const CauchyCheckResult r = cauchy_check(probes, co, ctx.threads);
        for (const CauchyRecord& rec : r.records)
            table.rows.push_back(osc_row(rec.params, rec.label, rec.direct, rec.contour,
                                         probe_ratio(rec.params, rec.label, rec.direct), rec.converged && rec.agree));
        summary["probes"] = r.records.size();
        summary["near"] = r.near;
        summary["far"] = r.far;
        summary["agreeing"] = r.agreeing;
        summary["resolved"] = r.resolved;
        summary["pieces_checked"] = r.pieces_checked;
        summary["pieces_agreeing"] = r.pieces_agreeing;
        summary["worst_scaled_difference"] = number(r.worst_scaled_difference);
        summary["all_agree"] = r.all_agree;
        ok = r.all_agree;
    } else {
        std::map<double, PhiProfile> profiles;
        for (const ProbeParams& p : probes) profiles.try_emplace(p.m, p.m);
        std::vector<std::vector<std::string>> rows(probes.size());
        std::vector<char> good(probes.size(), 1);
        double max_nf = 0.0, max_int = 0.0;
        std::vector<double> ratios(probes.size(), 0.0);
        std::vector<RegionLabel> labels(probes.size());
        parallel_for(static_cast<int>(probes.size()), ctx.threads, [&](int i) {
            const ProbeParams& p = probes[i];
            const PhiProfile& profile = profiles.at(p.m);
            const RegionLabel label = classify(p);
            labels[i] = label;
            if (label == RegionLabel::Intermediate) {
                const ProbeRecord rec = evaluate_probe(p, profile, eps);
                ratios[i] = rec.ratio;
                good[i] = rec.converged;
                rows[i] = osc_row(p, label, rec.direct, std::nullopt, rec.ratio, rec.converged);
            } else {
                CauchyOptions co;
                co.epsilon_near = eps;
                const CauchyRecord rec = cauchy_probe(p, profile, co);
                ratios[i] = probe_ratio(p, label, rec.direct);
                good[i] = rec.converged && rec.agree;
                rows[i] = osc_row(p, label, rec.direct, rec.contour, ratios[i], good[i]);
            }
        });
        for (std::size_t i = 0; i < probes.size(); ++i) {
            table.rows.push_back(rows[i]);
            (labels[i] == RegionLabel::Intermediate ? max_int : max_nf) =
                std::max(labels[i] == RegionLabel::Intermediate ? max_int : max_nf, ratios[i]);
            ok = ok && good[i];
        }
        summary["probes"] = probes.size();
        summary["max_near_far"] = number(max_nf);
        summary["max_intermediate"] = number(max_int);
        summary["all_converged"] = ok;
        summary["within_ceiling"] = max_nf <= ceil_nf && max_int <= ceil_int;
        ok = ok && max_nf <= ceil_nf && max_int <= ceil_int;
    }
    summary["ceiling_near_far"] = number(ceil_nf);
    summary["ceiling_intermediate"] = number(ceil_int);
    summary["passed"] = ok;
    table.write(ctx.file("oscillatory.csv"));
    io::write_json(ctx.file("oscillatory_summary.json"), summary);
    if (!ok) {
        std::cerr << "verify-oscillatory: ceiling exceeded, non-convergence or route disagreement\n";
        return finish(ctx, "failed", kVerificationFailed);
    }
    return finish(ctx, "passed", kOk);
}

// ---- verify-estimates -----------------------------------------------------

int cmd_verify_estimates(const Options& opt) {
    const json doc = io::read_json(opt.config);
    const ConfigNode root(doc, "$");
    root.allow_only({"estimates", "samples", "seed", "T", "time_nodes", "grid", "field", "equation", "alpha", "kpv",
                     "chain_exponents", "staffilani_levels", "stability_tolerance"});
    EstimateConfig cfg;
    std::vector<std::string> names = root.strings("estimates", {"all"});
    if (names.size() == 1 && names[0] == "all") names = estimate_names();
    const auto& known = estimate_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (std::find(known.begin(), known.end(), names[i]) == known.end())
            throw ConfigError("$.estimates[" + std::to_string(i) + "]", "unknown estimate '" + names[i] + "'");
    cfg.samples = root.integer("samples", cfg.samples, 1);
    cfg.T = root.positive("T", cfg.T);
    cfg.time_nodes = root.integer("time_nodes", cfg.time_nodes, 2);
    if (root.has("grid")) cfg.grid = parse_grid(root.child("grid"), cfg.grid);
    if (root.has("equation")) cfg.params = parse_equation(root.child("equation"));
    if (cfg.params.b == 0.0 && std::find(names.begin(), names.end(), "smoothing") != names.end())
        throw ConfigError("$.equation.b", "the smoothing estimate needs b != 0");
    cfg.alpha = root.number("alpha", cfg.alpha);
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw ConfigError("$.alpha", "must lie in [0, 1]");
    if (root.has("field")) {
        const ConfigNode n = root.child("field");
        n.allow_only({"modes", "max_wavenumber", "envelope_width", "max_shift", "max_time_frequency", "amplitude"});
        cfg.field.modes = n.integer("modes", cfg.field.modes, 1);
        cfg.field.max_wavenumber = n.positive("max_wavenumber", cfg.field.max_wavenumber);
        cfg.field.envelope_width = n.positive("envelope_width", cfg.field.envelope_width);
        cfg.field.max_shift = n.number("max_shift", cfg.field.max_shift);
        cfg.field.max_time_frequency = n.number("max_time_frequency", cfg.field.max_time_frequency);
        cfg.field.amplitude = n.positive("amplitude", cfg.field.amplitude);
        if (cfg.field.max_wavenumber > cfg.grid.nyquist() / 3.0)
            throw ConfigError(n.path() + ".max_wavenumber", "must not exceed a third of the grid Nyquist frequency");
    }
    if (root.has("kpv")) {
        const ConfigNode n = root.child("kpv");
        n.allow_only({"alpha1", "alpha2", "exponents"});
        cfg.kpv_alpha1 = n.number("alpha1", cfg.kpv_alpha1);
        cfg.kpv_alpha2 = n.number("alpha2", cfg.kpv_alpha2);
        if (cfg.kpv_alpha1 < 0.0) throw ConfigError(n.path() + ".alpha1", "must be nonnegative");
        if (cfg.kpv_alpha2 < 0.0) throw ConfigError(n.path() + ".alpha2", "must be nonnegative");
        if (n.has("exponents")) cfg.kpv_exponents = parse_exponents(n.child("exponents"), cfg.kpv_exponents);
    }
    if (root.has("chain_exponents")) cfg.chain_exponents = parse_exponents(root.child("chain_exponents"), cfg.chain_exponents);
    cfg.staffilani_levels = root.integer("staffilani_levels", cfg.staffilani_levels, 2);
    cfg.stability_tolerance = root.positive("stability_tolerance", cfg.stability_tolerance);

    prepare_out(opt);
    RunContext ctx(opt);
    ctx.seed = resolve_seed(opt, root);
    cfg.seed = ctx.seed;
    cfg.threads = ctx.threads;

    auto csv = [&](const std::string& name, const EstimateRun& run) {
        io::CsvTable t;
        t.header = {"estimate", "seed", "sample_id", "lhs", "rhs", "ratio"};
        for (const EstimateSample& s : run.records)
            t.rows.push_back({name, std::to_string(ctx.seed), std::to_string(s.sample_id), format_double(s.lhs),
                              format_double(s.rhs), s.discarded ? "nan" : format_double(s.ratio)});
        return t;
    };

    json summary = json::array();
    bool stable = true;
    for (const std::string& name : names) {
        const EstimateSweepResult r = run_estimate(name, cfg);
        csv(name, r.base).write(ctx.file(name + ".csv"));
        csv(name, r.refined).write(ctx.file(name + "_refined.csv"));
        io::write_json(ctx.file(name + ".json"), io::to_json(r));
        summary.push_back(json{{"estimate", name}, {"max_ratio", number(r.base.max_ratio)},
                               {"refined_max_ratio", number(r.refined.max_ratio)}, {"drift", number(r.drift)},
                               {"stable", r.stable}});
        if (!r.stable) std::cerr << "verify-estimates: " << name << " is not refinement-stable (drift " << r.drift << ")\n";
        stable = stable && r.stable;
    }
    io::write_json(ctx.file("estimates_summary.json"), json{{"seed", ctx.seed}, {"estimates", summary}, {"stable", stable}});
    return finish(ctx, stable ? "stable" : "unstable", stable ? kOk : kVerificationFailed);
}

// ---- report ---------------------------------------------------------------

int cmd_report(const Options& opt) {
    if (opt.out.empty()) throw ConfigError("--out", "directory to scan required");
    if (!fs::is_directory(opt.out)) throw ConfigError("--out", "not a directory: " + opt.out.string());
    std::vector<fs::path> manifests;
    for (const auto& entry : fs::recursive_directory_iterator(opt.out))
        if (entry.is_regular_file() && entry.path().filename() == "manifest.json" && entry.path().parent_path() != opt.out)
            manifests.push_back(entry.path());
    std::sort(manifests.begin(), manifests.end());

    json runs = json::array();
    io::CsvTable table;
    table.header = {"run", "command", "status", "exit_code", "seed"};
    for (const fs::path& p : manifests) {
        json m;
        try {
            m = io::read_json(p);
        } catch (const ConfigError&) {
            std::cerr << "report: skipping unreadable " << p << "\n";
            continue;
        }
        const std::string rel = fs::relative(p.parent_path(), opt.out).generic_string();
        json entry{{"run", rel}, {"manifest", m}};
        for (const char* name : {"summary.json", "oscillatory_summary.json", "estimates_summary.json"}) {
            const fs::path sp = p.parent_path() / name;
            if (fs::exists(sp)) entry["summary"] = io::read_json(sp);
        }
        runs.push_back(entry);
        table.rows.push_back({rel, m.value("command", ""), m.value("status", ""),
                              std::to_string(m.value("exit_code", -1)), std::to_string(m.value("seed", 0ULL))});
    }
    io::write_json(opt.out / "report.json", json{{"tool_version", kToolVersion}, {"runs", runs}});
    table.write(opt.out / "report.csv");
    for (const auto& row : table.rows) std::cout << row[0] << "  " << row[1] << "  " << row[2] << "\n";
    return kOk;
}

int dispatch(const Options& opt) {
    try {
        if (opt.command == "solve") return cmd_solve(opt);
        if (opt.command == "verify-oscillatory") return cmd_verify_oscillatory(opt);
        if (opt.command == "verify-estimates") return cmd_verify_estimates(opt);
        if (opt.command == "report") return cmd_report(opt);
        std::cerr << "unknown command '" << opt.command << "'\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        std::cerr << opt.command << ": config error at " << e.path() << ": "
                  << std::string(e.what()).substr(e.path().size() + 2) << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << opt.command << ": " << e.what() << "\n";
        return kConfigError;
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Pseudospectral lab for the Schroedinger-Airy equation with cubic and derivative nonlinearities"};
    app.require_subcommand(1);
    Options opt;
    std::string config, out;
    std::uint64_t seed = 0;

    auto add = [&](const std::string& name, const std::string& help, bool needs_config) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* c = sub->add_option("--config", config, "JSON config file");
        if (needs_config) c->required();
        sub->add_option("--out", out, needs_config ? "output directory" : "directory holding run outputs")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", opt.threads, "worker threads (falls back to NLSA_LAB_THREADS)")
            ->check(CLI::NonNegativeNumber);
        return sub;
    };
    add("solve", "Picard solve of the integral equation", true);
    add("verify-oscillatory", "contour and bound checks of the oscillatory integral", true);
    add("verify-estimates", "ratio sweeps of the auxiliary inequalities", true);
    add("report", "aggregate the manifests below --out", false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    for (CLI::App* sub : app.get_subcommands()) {
        opt.command = sub->get_name();
        if (sub->count("--seed")) opt.seed = seed;
    }
    opt.config = config;
    opt.out = out;
    return dispatch(opt);
}

}  // namespace nlsa::cli
