#include "hypk/harness.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

namespace {

using namespace hypk;

struct Flags {
    std::string config, out;
    std::uint64_t seed = 42;
    int jobs = 1, n = 2;
    double tol = 0;
    CLI::Option *o_out = nullptr, *o_seed = nullptr, *o_jobs = nullptr, *o_n = nullptr, *o_tol = nullptr;

    RunConfig resolve() const
    {
        RunConfig cfg;
        if (!config.empty()) cfg = load_config(config);
        if (o_out->count()) cfg.out_dir = out;
        if (o_seed->count()) cfg.seed = seed;
        if (o_jobs->count()) cfg.jobs = jobs;
        if (o_n->count()) cfg.n = n;
        if (o_tol->count()) cfg.tol = tol;
        cfg.validate();
        return cfg;
    }
};

void print_report(const ExperimentReport& r)
{
    std::printf("%s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.runtime_s);
    for (const auto& [name, value] : r.metrics) {
        std::printf("  %s = %.6g", name.c_str(), value);
        if (auto it = r.tolerance.find(name); it != r.tolerance.end()) std::printf("  (<= %.3g)", it->second);
        if (auto it = r.tolerance.find(name + ":min"); it != r.tolerance.end()) std::printf("  (>= %.3g)", it->second);
        std::printf("\n");
    }
    if (!r.error.empty()) std::printf("  error: %s\n", r.error.c_str());
}

// prints, optionally writes, and converts to an exit code
int finish(const std::vector<ExperimentReport>& reports, const RunConfig& cfg, bool write)
{
    bool ok = !reports.empty();
    for (const auto& r : reports) {
        print_report(r);
        if (write) write_report(cfg.out_dir, r);
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

struct KernelArgs {
    std::string kind = "k_alpha";
    double alpha = 1, beta = 1, zeta = 0, nu = 1, t = 1, rho = 1;
    double rho_min = 1e-3, rho_max = 12;
};

struct KernelSpec {
    std::function<double(double)> fn;
    std::map<std::string, double> params;
    double tail_power;
};

KernelSpec kernel_spec(const KernelArgs& k, int n)
{
    const double dn = n;
    if (k.kind == "k_alpha")
        return {[=](double r) { return bgr_kernel(0, k.alpha, r, n); }, {{"alpha", k.alpha}, {"n", dn}}, k.alpha - 2};
    if (k.kind == "k_zeta_alpha")
        return {[=](double r) { return bgr_kernel(k.zeta, k.alpha, r, n); },
                {{"alpha", k.alpha}, {"zeta", k.zeta}, {"n", dn}},
                k.zeta > 0 ? k.alpha / 2 - 1 : k.alpha - 2};
    if (k.kind == "conv")
        return {[=](double r) { return conv_kernel(k.alpha, k.beta, k.zeta, r, n); },
                {{"alpha", k.alpha}, {"beta", k.beta}, {"zeta", k.zeta}, {"n", dn}},
                k.alpha - 2};
    if (k.kind == "green")
        return {[=](double r) { return green_complex(k.nu, r, n); }, {{"nu", k.nu}, {"n", dn}}, 0.0};
    if (k.kind == "heat")
        return {[=](double r) { return heat_complex(k.t, r, n); }, {{"t", k.t}, {"n", dn}}, 0.0};
    throw parameter_error("unknown kernel kind '" + k.kind + "' (k_alpha, k_zeta_alpha, conv, green, heat)");
}

void add_kernel_params(CLI::App* c, KernelArgs& k)
{
    c->add_option("--kind", k.kind, "k_alpha | k_zeta_alpha | conv | green | heat")->required();
    c->add_option("--alpha", k.alpha, "order alpha");
    c->add_option("--beta", k.beta, "order beta (conv)");
    c->add_option("--zeta", k.zeta, "mass parameter zeta");
    c->add_option("--nu", k.nu, "resolvent parameter (green)");
    c->add_option("--t", k.t, "time (heat)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kernels, operator identities and rearrangement checks on complex hyperbolic space"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags fl;
    app.add_option("--config", fl.config, "flat key=value config file; flags override it")->check(CLI::ExistingFile);
    fl.o_out = app.add_option("--out", fl.out, "output directory for reports and tables");
    fl.o_seed = app.add_option("--seed", fl.seed, "seed for randomized test families");
    fl.o_jobs = app.add_option("--jobs", fl.jobs, "worker threads")->check(CLI::PositiveNumber);
    fl.o_tol = app.add_option("--tol", fl.tol, "override the primary tolerance of a verify run")->check(CLI::NonNegativeNumber);
    fl.o_n = app.add_option("--n", fl.n, "complex dimension")->check(CLI::Range(2, 16));

    std::function<int()> action;

    // kernel eval | table
    auto* kernel = app.add_subcommand("kernel", "evaluate or tabulate radial kernels");
    kernel->require_subcommand(1);
    kernel->fallthrough();
    KernelArgs ka;
    auto* keval = kernel->add_subcommand("eval", "print one kernel value");
    add_kernel_params(keval, ka);
    keval->add_option("--rho", ka.rho, "geodesic distance")->required();
    keval->callback([&] {
        action = [&] {
            const RunConfig cfg = fl.resolve();
            const auto spec = kernel_spec(ka, cfg.n);
            const double v = spec.fn(ka.rho);
            std::printf("%.17g\n", v);
            return std::isfinite(v) ? 0 : 1;
        };
    });
    auto* ktable = kernel->add_subcommand("table", "write a CSV table with a JSON sidecar");
    add_kernel_params(ktable, ka);
    ktable->add_option("--rho-min", ka.rho_min, "smallest node");
    ktable->add_option("--rho-max", ka.rho_max, "largest node");
    ktable->callback([&] {
        action = [&] {
            RunConfig cfg = fl.resolve();
            if (!fl.o_out->count()) cfg.out_dir = "tables";
            if (!(ka.rho_min > 0 && ka.rho_min < 0.5 && ka.rho_max > 1))
                throw parameter_error("table range must satisfy 0 < rho-min < 0.5 < 1 < rho-max");
            const auto spec = kernel_spec(ka, cfg.n);
            const auto nodes = kernel_nodes(ka.rho_min, 0.5, ka.rho_max, 24, static_cast<int>(std::lround((ka.rho_max - 0.5) * 4)));
            const RadialKernel k = tabulate(ka.kind, spec.params, spec.fn, nodes, spec.tail_power, cfg.jobs);
            std::filesystem::create_directories(cfg.out_dir);
            const auto base = std::filesystem::path(cfg.out_dir) / ka.kind;
            k.save(base.string() + ".csv", base.string() + ".json");
            std::printf("%s.csv (%zu nodes)\n", base.string().c_str(), nodes.size());
            return 0;
        };
    });

    // verify <family>
    auto* verify = app.add_subcommand("verify", "run one family of checks");
    verify->require_subcommand(1);
    verify->fallthrough();
    auto family = [&](const std::string& name, const std::string& help, std::function<std::vector<ExperimentReport>(const RunConfig&)> run) {
        auto* c = verify->add_subcommand(name, help);
        c->callback([&, run] {
            action = [&, run] {
                const RunConfig cfg = fl.resolve();
                return finish(run(cfg), cfg, fl.o_out->count() > 0 || !fl.config.empty());
            };
        });
        return c;
    };

    std::string model = "both";
    std::vector<double> fa;
    std::vector<int> fk;
    auto* fac = family("factorization", "conjugated factor products versus shifted Laplacian products", [&](const RunConfig& cfg) {
        std::vector<Model> models;
        if (model == "ball" || model == "both") models.push_back(Model::ball);
        if (model == "siegel" || model == "both") models.push_back(Model::siegel);
        return run_factorization(cfg, models, fa.empty() ? std::vector<double>{0, 0.5, 1} : fa,
                                 fk.empty() ? std::vector<int>{1, 2} : fk);
    });
    fac->add_option("--model", model, "ball | siegel | both")->check(CLI::IsMember({"ball", "siegel", "both"}));
    fac->add_option("--a", fa, "shift parameter(s)");
    fac->add_option("--k", fk, "order(s)")->check(CLI::Range(1, 4));

    family("intertwine", "commutation identities behind the factorization", run_intertwining);
    family("heat", "heat kernel masses, routes and semigroup", run_heat);
    family("green", "Green's function cross-checks", run_green);
    family("funk-hecke", "sphere integrals and bidegree eigenvalues", run_funk_hecke);
    family("rearrange", "rearrangement, Lorentz norms and O'Neil bound", run_rearrange);
    family("spectral-gap", "Rayleigh quotients against n^2", run_spectral_gap);
    family("identity", "cosh 2r substitution identity", run_identity);
    family("asymptotics", "small and large distance laws of the kernels", run_asymptotics);
    family("constants", "sharp constants and the Riesz composition", run_constants);
    family("conv", "convolution kernel bounds", [](const RunConfig& c) {
        return std::vector<ExperimentReport>{conv_bound_check(1, 1, 1, 2, c.jobs)};
    });
    family("l2-tail", "L^2 tail of the rearranged convolution kernel", run_l2_tail);

    std::vector<double> ma;
    std::vector<int> mk;
    auto* mino = family("minorant", "scalar minorant delta", [&](const RunConfig& cfg) {
        std::vector<std::pair<double, int>> cases;
        if (ma.empty() && mk.empty()) cases = {{0.0, 2}, {0.5, 3}};
        else {
            if (ma.size() != mk.size()) throw parameter_error("--a and --k need the same number of values");
            for (std::size_t i = 0; i < ma.size(); ++i) cases.push_back({ma[i], mk[i]});
        }
        return run_minorant(cfg, cases);
    });
    mino->add_option("--a", ma, "shift parameter(s)");
    mino->add_option("--k", mk, "order(s)")->check(CLI::Range(1, 12));

    // report all
    auto* report = app.add_subcommand("report", "run the whole suite");
    report->require_subcommand(1);
    report->fallthrough();
    report->add_subcommand("all", "every family; writes one JSON per experiment and index.json")->callback([&] {
        action = [&] {
            const RunConfig cfg = fl.resolve();
            if (cfg.tol > 0) std::fprintf(stderr, "note: --tol is ignored by report all\n");
            const auto reps = report_all(cfg, [](const ExperimentReport& r) {
                std::printf("%s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.runtime_s);
            });
            std::size_t passed = 0;
            for (const auto& r : reps) passed += r.pass;
            std::printf("%zu/%zu passed; reports in %s\n", passed, reps.size(), cfg.out_dir.c_str());
            return passed == reps.size() ? 0 : 1;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!action) {
        std::cerr << app.help();
        return 2;
    }
    try {
        return action();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
