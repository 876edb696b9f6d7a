// wavelab: frequency-domain experiment runner for weakly dissipative wave
// equations. Subcommands sweep the validated pipeline (assumption checks,
// propagator assembly, diagonalization identities, scattering, decay rates,
// Volterra solver) and emit deterministic CSV/JSON artifacts.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "wavelab/config.hpp"
#include "wavelab/diagonalization.hpp"
#include "wavelab/peano.hpp"
#include "wavelab/propagator.hpp"
#include "wavelab/rates.hpp"
#include "wavelab/report.hpp"
#include "wavelab/scattering.hpp"
#include "wavelab/volterra.hpp"
#include "wavelab/zones.hpp"

namespace fs = std::filesystem;
using namespace wavelab;
using nlohmann::json;

namespace {

struct Context {
    Config cfg;
    std::string out_dir = "out";
    int threads = 1;

    CoefficientModel model() const { return cfg.make_model(); }

    DiagonalizationHierarchy hierarchy(int fallback_k = 1) const {
        return DiagonalizationHierarchy(cfg.get_int("zones.k", fallback_k));
    }

    ZoneGeometry geometry(const CoefficientModel& m, const DiagonalizationHierarchy& h) const {
        std::string N = cfg.get_string("zones.N", "auto");
        double safety = cfg.get_number("zones.safety", 0.5);
        if (N == "auto") return choose_zone_constant(m, h, safety);
        ZoneGeometry g;
        g.N = std::stod(N);
        g.k = h.depth();
        return g;
    }

    std::string path(const std::string& name) const {
        fs::create_directories(out_dir);
        return (fs::path(out_dir) / name).string();
    }
};

std::string f(double v) { return format_float(v); }

int run_assumptions(const Context& ctx) {
    auto model = ctx.model();
    std::vector<double> grid{0.0};
    for (double t : log_grid(1e-2, ctx.cfg.get_number("assumptions.t_max", 1e4), 400))
        grid.push_back(t);
    auto rep = check_assumptions(model, grid, model.ell());

    CsvWriter csv({"k", "c_hat_k"});
    for (size_t k = 0; k < rep.c_hat_k.size(); ++k)
        csv.add_row({std::to_string(k), f(rep.c_hat_k[k])});
    csv.write(ctx.path("assumptions_constants.csv"));

    CsvWriter rho({"t", "rho"});
    for (size_t i = 0; i < rep.rho_t.size(); ++i)
        rho.add_row({f(rep.rho_t[i]), f(rep.rho[i])});
    rho.write(ctx.path("assumptions_rho.csv"));

    json j;
    j["family"] = ctx.cfg.get_string("coeff.family", "scale_invariant");
    j["a1"] = rep.a1;
    j["a2"] = rep.a2;
    j["a3"] = rep.a3;
    j["c_hat"] = round_float(rep.c_hat);
    write_json(ctx.path("assumptions.json"), j);
    std::cout << "assumptions: A1=" << rep.a1 << " A2=" << rep.a2 << " A3=" << rep.a3
              << " c_hat=" << f(rep.c_hat) << "\n";
    return rep.a1 && rep.a2 && rep.a3 ? 0 : 1;
}

int run_propagate(const Context& ctx) {
    auto model = ctx.model();
    auto hier = ctx.hierarchy();
    auto geom = ctx.geometry(model, hier);
    double tol = ctx.cfg.get_number("propagate.tol", 1e-11);
    auto ts = log_grid(1.0, ctx.cfg.get_number("propagate.t_max", 1e3), 12);
    auto xis = log_grid(1e-2, 10.0, 12);

    CsvWriter csv({"t", "s", "xi", "re11", "im11", "re12", "im12", "re21", "im21", "re22",
                   "im22", "norm", "det_defect", "rel_err"});
    double worst_rel = 0.0, worst_liou = 0.0, worst_sym = 0.0;
    std::vector<std::vector<Mat2>> oracle_all(xis.size());
    std::vector<std::vector<std::array<double, 4>>> results(xis.size());
    parallel_for(xis.size(), ctx.threads, [&](size_t j) {
        double xi = xis[j];
        auto oracle = oracle_checkpoints(model, geom, ts, 0.0, xi, tol);
        auto assembled = assemble_checkpoints(model, hier, geom, ts, 0.0, xi, tol);
        std::vector<std::array<double, 4>> rows;
        for (size_t i = 0; i < ts.size(); ++i) {
            double rel = (assembled[i] - oracle[i]).norm() / oracle[i].norm();
            cplx pred = liouville_determinant(model, geom, ts[i], 0.0, xi);
            double liou = std::abs(oracle[i].det() - pred) / std::abs(pred);
            double br = xi / std::sqrt(1.0 + xi * xi);
            double sym = std::abs(energy_symbol_from(geom, oracle[i], ts[i], xi).det() -
                                  br / model.lambda_sq(ts[i]));
            rows.push_back({rel, liou, sym, oracle[i].norm()});
        }
        oracle_all[j] = std::move(oracle);
        results[j] = std::move(rows);
    });
    for (size_t j = 0; j < xis.size(); ++j) {
        for (size_t i = 0; i < ts.size(); ++i) {
            const Mat2& E = oracle_all[j][i];
            auto& r = results[j][i];
            csv.add_row({f(ts[i]), f(0.0), f(xis[j]), f(E.a11.real()), f(E.a11.imag()),
                         f(E.a12.real()), f(E.a12.imag()), f(E.a21.real()), f(E.a21.imag()),
                         f(E.a22.real()), f(E.a22.imag()), f(r[3]), f(r[1]), f(r[0])});
            worst_rel = std::max(worst_rel, r[0]);
            worst_liou = std::max(worst_liou, r[1]);
            worst_sym = std::max(worst_sym, r[2]);
        }
    }
    csv.write(ctx.path("propagate.csv"));

    json j;
    j["max_rel_err"] = round_float(worst_rel);
    j["max_liouville_defect"] = round_float(worst_liou);
    j["max_energy_det_defect"] = round_float(worst_sym);
    j["oracle_equivalence_pass"] = worst_rel <= 1e-5;
    j["liouville_pass"] = worst_liou <= 1e-6;
    write_json(ctx.path("propagate.json"), j);
    std::cout << "propagate: max_rel_err=" << f(worst_rel)
              << " liouville=" << f(worst_liou) << "\n";
    return worst_rel <= 1e-5 && worst_liou <= 1e-6 ? 0 : 1;
}

int run_diag_verify(const Context& ctx) {
    auto model = ctx.model();
    auto hier = ctx.hierarchy(2);
    auto geom = ctx.geometry(model, hier);

    CsvWriter csv({"t", "xi", "residual"});
    double worst = 0.0;
    for (double xi : log_grid(1e-2, 10.0, 10)) {
        double t0 = geom.t_xi(xi);
        for (double fct : {1.0, 2.0, 10.0, 100.0}) {
            double t = t0 > 0.0 ? t0 * fct : fct - 1.0;
            double r = hier.conjugation_residual(model, t, xi);
            worst = std::max(worst, r);
            csv.add_row({f(t), f(xi), f(r)});
        }
    }
    csv.write(ctx.path("diag_residual.csv"));

    ZoneSampleSpec spec;
    json stages = json::array();
    for (int j = 1; j <= hier.depth(); ++j) {
        double margin = symbol_class_margin(hier.N_stage(j), -j, j, geom, model, spec);
        stages.push_back({{"stage", j}, {"N_margin", round_float(margin)}});
    }
    json out;
    out["k"] = hier.depth();
    out["N"] = round_float(geom.N);
    out["max_residual"] = round_float(worst);
    out["residual_pass"] = worst <= 1e-12;
    out["stage_margins"] = stages;
    write_json(ctx.path("diag_verify.json"), out);
    std::cout << "diag-verify: k=" << hier.depth() << " max_residual=" << f(worst) << "\n";
    return worst <= 1e-12 ? 0 : 1;
}

int run_scatter(const Context& ctx) {
    auto model = ctx.model();
    auto hier = ctx.hierarchy(2);
    auto geom = ctx.geometry(model, hier);
    double tol = ctx.cfg.get_number("scatter.tol", 1e-9);
    auto xis = log_grid(1e-2, 10.0, ctx.cfg.get_int("scatter.n_xi", 13));

    double slope_xi = ctx.cfg.get_number("scatter.xi", 1.0);
    auto ts = log_grid(std::max(4.0, 4.0 * (1.0 + geom.t_xi(slope_xi))), 1e4, 15);
    auto curve = scattering_convergence(model, hier, geom, slope_xi, ts, tol);
    double slope = fit_decay_exponent(curve.ts, curve.defect, ts.front(), ts.back()).exponent;

    CsvWriter csv({"xi", "re11", "im11", "re12", "im12", "re21", "im21", "re22", "im22",
                   "det_defect", "slope"});
    double worst_det = 0.0;
    std::vector<Mat2> ws(xis.size());
    parallel_for(xis.size(), ctx.threads,
                 [&](size_t i) { ws[i] = w_plus(model, hier, geom, xis[i], tol); });
    for (size_t i = 0; i < xis.size(); ++i) {
        const Mat2& W = ws[i];
        double dd = std::abs(W.det() - cplx(1.0));
        worst_det = std::max(worst_det, dd);
        csv.add_row({f(xis[i]), f(W.a11.real()), f(W.a11.imag()), f(W.a12.real()),
                     f(W.a12.imag()), f(W.a21.real()), f(W.a21.imag()), f(W.a22.real()),
                     f(W.a22.imag()), f(dd), f(slope)});
    }
    csv.write(ctx.path("scatter.csv"));

    json j;
    j["max_det_defect"] = round_float(worst_det);
    j["det_pass"] = worst_det <= 1e-6;
    j["convergence_slope"] = round_float(slope);
    j["slope_pass"] = std::abs(slope + 1.0) <= 0.15;
    write_json(ctx.path("scatter.json"), j);
    std::cout << "scatter: max_det_defect=" << f(worst_det) << " slope=" << f(slope) << "\n";
    return worst_det <= 1e-6 && std::abs(slope + 1.0) <= 0.15 ? 0 : 1;
}

int run_rates(const Context& ctx) {
    auto model = ctx.model();
    auto hier = ctx.hierarchy();
    auto geom = ctx.geometry(model, hier);
    std::string obs_tag = ctx.cfg.get_string("rates.observable", "energy");
    Observable obs = obs_tag == "solution" ? Observable::solution : Observable::energy;
    double t_max = ctx.cfg.get_number("rates.t_max", 1e4);
    auto ts = log_grid(1.0, t_max, 25);
    auto xis = log_grid(ctx.cfg.get_number("rates.xi_min", 1e-3),
                        ctx.cfg.get_number("rates.xi_max", 1e2), 40);
    auto rep = operator_norm_curve(model, hier, geom, obs, ts, xis, 1e-9, ctx.threads, 1e2,
                                   t_max);

    CsvWriter csv({"t", "measured", "predicted", "ratio"});
    for (size_t i = 0; i < rep.ts.size(); ++i)
        csv.add_row({f(rep.ts[i]), f(rep.measured[i]), f(rep.predicted[i]),
                     f(rep.measured[i] / rep.predicted[i])});
    csv.write(ctx.path("rates.csv"));

    json j;
    j["observable"] = rep.observable;
    j["fitted_exponent"] = round_float(rep.fit.exponent);
    j["stderr"] = round_float(rep.fit.stderr_);
    j["ratio_lo"] = round_float(rep.ratio_lo);
    j["ratio_hi"] = round_float(rep.ratio_hi);
    write_json(ctx.path("rates.json"), j);
    std::cout << "rates: observable=" << rep.observable
              << " exponent=" << f(rep.fit.exponent) << "\n";
    return 0;
}

int run_volterra_test(const Context& ctx) {
    // scalar exponential test of the generic solver
    auto sol = solve_volterra(1.0, [](double, double) { return 1.0; }, 1.0, 1e-12);
    double exp_err = std::abs(sol.fs.back() - std::exp(1.0));

    auto model = ctx.model();
    auto hier = ctx.hierarchy();
    auto geom = ctx.geometry(model, hier);
    double xi = ctx.cfg.get_number("volterra.xi", 0.01);
    double t = std::min(ctx.cfg.get_number("volterra.t", 50.0), geom.t_xi(xi));
    Mat2 E = solve_diss_zone(model, geom, t, 0.0, xi);
    Mat2 O = fundamental_solution_oracle(model, geom, t, 0.0, xi, 1e-11);
    double diss_err = (E - O).max_abs();

    double c_bound = 0.0;
    for (double x : log_grid(1e-3, geom.N / 2.0, 8)) {
        double txi = geom.t_xi(x);
        for (double frac : {0.25, 0.5, 1.0}) {
            Mat2 Ez = solve_diss_zone(model, geom, frac * txi, 0.0, x);
            c_bound = std::max(c_bound, Ez.norm() * model.lambda_sq(frac * txi));
        }
    }

    json j;
    j["exp_test_error"] = round_float(exp_err);
    j["exp_test_pass"] = exp_err <= 1e-8;
    j["diss_zone_vs_oracle"] = round_float(diss_err);
    j["diss_zone_pass"] = diss_err <= 1e-6;
    j["lemma_bound_constant"] = round_float(c_bound);
    write_json(ctx.path("volterra_test.json"), j);
    std::cout << "volterra-test: exp_err=" << f(exp_err) << " diss_err=" << f(diss_err)
              << " C=" << f(c_bound) << "\n";
    return exp_err <= 1e-8 && diss_err <= 1e-6 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-domain laboratory for weakly dissipative wave equations"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int threads = 1;
    app.add_option("--config", config_path, "config file path");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (affects speed only)");

    auto* c_assump = app.add_subcommand("assumptions", "verify coefficient assumptions");
    auto* c_prop = app.add_subcommand("propagate", "assembled propagator vs direct oracle");
    auto* c_diag = app.add_subcommand("diag-verify", "diagonalization identities and margins");
    auto* c_scat = app.add_subcommand("scatter", "modified scattering operator sweep");
    auto* c_rates = app.add_subcommand("rates", "decay-rate measurement");
    auto* c_volt = app.add_subcommand("volterra-test", "Volterra solver validation");
    for (auto* sub : {c_assump, c_prop, c_diag, c_scat, c_rates, c_volt}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        Context ctx;
        if (!config_path.empty()) ctx.cfg = Config::load(config_path);
        ctx.out_dir = out_dir;
        ctx.threads = threads;

        if (c_assump->parsed()) return run_assumptions(ctx);
        if (c_prop->parsed()) return run_propagate(ctx);
        if (c_diag->parsed()) return run_diag_verify(ctx);
        if (c_scat->parsed()) return run_scatter(ctx);
        if (c_rates->parsed()) return run_rates(ctx);
        if (c_volt->parsed()) return run_volterra_test(ctx);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
