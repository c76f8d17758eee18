// fracstefan: evaluate the kernel functions, solve the similarity problems
// and run the verification suites. CSV or JSON on stdout or --out.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracstefan/fracstefan.hpp"

namespace fs = fracstefan;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode { ok = 0, verification_failed = 1, usage = 2, convergence = 3, solver = 4 };

// Shortest decimal string that parses back to the same double.
std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

const CLI::Validator Finite{[](std::string& s) -> std::string {
                                std::istringstream in(s);
                                in.imbue(std::locale::classic());
                                double v = 0.0;
                                in >> v;
                                if (in.fail() || !in.eof() || !std::isfinite(v)) return "value must be a finite real: " + s;
                                return {};
                            },
                            "FINITE"};

struct Output {
    std::string path;
    std::string format = "csv";

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw fs::DomainError("cannot open output file " + path);
        f << text;
    }
};

struct Options {
    Output out;
    double alpha = 0.5;
    double m = 1.0;
    double l = 1.0;
    double z = 0.0;
    double tol = 1e-17;
    int max_terms = 10000;
    double zmax = 20.0;
    int points = 101;
    double u0 = 1.0, um = 0.0, g0 = 1.0, gm = 0.0;
    double tmax = 4.0;
    int nx = 11;
    int nt = 4;
    fs::ThermalScales scales{};
    int jobs = 1;
    std::vector<double> alphas;
    std::vector<double> t_samples;
    int x_resolution = 64;

    fs::Truncation truncation() const {
        fs::Truncation tr;
        tr.rel_tol = tol;
        tr.max_terms = max_terms;
        tr.validate();
        return tr;
    }
};

void add_output(CLI::App* c, Options& o) {
    c->add_option("--out", o.out.path, "Output file (default stdout)");
    c->add_option("--format", o.out.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_tol(CLI::App* c, Options& o) {
    c->add_option("--tol", o.tol, "Relative truncation tolerance of the series")->check(Finite)->capture_default_str();
    c->add_option("--max-terms", o.max_terms, "Series term cap")->capture_default_str();
}

void add_scales(CLI::App* c, Options& o) {
    c->add_option("--rho", o.scales.rho, "Density")->check(Finite)->capture_default_str();
    c->add_option("--c", o.scales.c, "Specific heat")->check(Finite)->capture_default_str();
    c->add_option("--k", o.scales.k, "Conductivity")->check(Finite)->capture_default_str();
    c->add_option("--latent", o.scales.latent, "Latent heat")->check(Finite)->capture_default_str();
    c->add_option("--nu", o.scales.nu, "Fractional conductivity factor")->check(Finite)->capture_default_str();
}

void add_grid(CLI::App* c, Options& o) {
    c->add_option("--tmax", o.tmax, "Largest sample time")->check(Finite)->capture_default_str();
    c->add_option("--nt", o.nt, "Number of sample times in (0, tmax]")->check(CLI::Range(1, 100000))->capture_default_str();
    c->add_option("--nx", o.nx, "Points per time on [0, s(t)]")->check(CLI::Range(2, 100000))->capture_default_str();
}

std::string ml_eval_text(const Options& o) {
    const fs::MLParams p{o.alpha, o.m, o.l};
    const fs::MLResult r = fs::ml_eval(p, o.z, o.truncation());
    if (o.out.format == "json") {
        json j{{"alpha", o.alpha}, {"m", o.m}, {"l", o.l}, {"z", o.z}, {"value", r.value},
               {"terms", r.terms}, {"route", fs::to_string(r.route)}};
        return j.dump(2) + "\n";
    }
    return "value,terms,route\n" + num(r.value) + "," + std::to_string(r.terms) + "," + fs::to_string(r.route) + "\n";
}

std::string sigma_text(const Options& o) {
    const double v = fs::sigma_alpha(fs::KernelOrder(o.alpha), o.z, o.truncation());
    if (o.out.format == "json") return json{{"alpha", o.alpha}, {"z", o.z}, {"sigma", v}}.dump(2) + "\n";
    return "z,sigma\n" + num(o.z) + "," + num(v) + "\n";
}

std::string table_text(const Options& o) {
    if (!(o.zmax > 0.0)) throw fs::DomainError("table: --zmax must be positive");
    if (o.points < 2) throw fs::DomainError("table: --points must be >= 2");
    const fs::KernelIntegrals ki(fs::KernelOrder(o.alpha), o.truncation());
    json rows = json::array();
    std::string csv = "z,sigma,f,moment\n";
    for (int i = 0; i < o.points; ++i) {
        const double z = o.zmax * i / (o.points - 1);
        const double s = z > 0.0 ? ki.kernel(z) : std::nan("");
        const double f = ki.f_alpha(z);
        const double mo = ki.moment_alpha(z);
        csv += num(z) + "," + num(s) + "," + num(f) + "," + num(mo) + "\n";
        rows.push_back(json{{"z", z}, {"sigma", z > 0.0 ? json(s) : json(nullptr)}, {"f", f}, {"moment", mo}});
    }
    if (o.out.format == "json") return json{{"alpha", o.alpha}, {"rows", rows}}.dump(2) + "\n";
    return csv;
}

std::string solution_text(const fs::SimilaritySolution& s, const Options& o) {
    if (!(o.tmax > 0.0)) throw fs::DomainError("--tmax must be positive");
    json rows = json::array();
    std::string csv = "# kind=" + std::string(fs::to_string(s.kind())) + ",alpha=" + num(s.alpha()) +
                      ",front_coeff=" + num(s.front_coeff()) + ",A=" + num(s.A()) + ",B=" + num(s.B()) + "\n";
    csv += "t,x,u,s_of_t\n";
    for (int j = 1; j <= o.nt; ++j) {
        const double t = o.tmax * j / o.nt;
        const double front = s.front_position(t);
        for (int i = 0; i < o.nx; ++i) {
            const double x = front * i / (o.nx - 1);
            const double u = s.temperature(x, t);
            csv += num(t) + "," + num(x) + "," + num(u) + "," + num(front) + "\n";
            rows.push_back(json{{"t", t}, {"x", x}, {"u", u}, {"s_of_t", front}});
        }
    }
    if (o.out.format == "json") {
        json j{{"kind", fs::to_string(s.kind())}, {"alpha", s.alpha()}, {"front_coeff", s.front_coeff()},
               {"A", s.A()},                     {"B", s.B()},         {"rows", rows}};
        return j.dump(2) + "\n";
    }
    return csv;
}

fs::VerificationConfig verification_config(const Options& o) {
    fs::VerificationConfig cfg;
    if (!o.alphas.empty()) cfg.alpha_list = o.alphas;
    if (!o.t_samples.empty()) cfg.t_samples = o.t_samples;
    cfg.z_max = o.zmax;
    cfg.x_resolution = o.x_resolution;
    cfg.jobs = o.jobs;
    cfg.validate();
    return cfg;
}

json check(const std::string& name, double value, double tolerance, bool pass) {
    return json{{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}};
}

// Returns the report and sets `pass`.
json verify_suite(const std::string& suite, const Options& o, bool& pass) {
    const fs::VerificationConfig cfg = verification_config(o);
    const fs::Truncation tr = o.truncation();
    json checks = json::array();
    pass = true;

    const auto solutions = [&](double a) {
        std::vector<fs::SimilaritySolution> v;
        v.push_back(fs::build_dirichlet(fs::DirichletProblem{fs::KernelOrder(a), 1.0, 0.0, o.scales}, tr));
        v.push_back(fs::build_neumann(fs::NeumannProblem{fs::KernelOrder(a), 1.0, 0.0, o.scales}, tr));
        return v;
    };

    if (suite == "pde") {
        for (double a : cfg.alpha_list) {
            std::vector<fs::SimilaritySolution> v = solutions(a);
            v.push_back(fs::quasi_stationary(fs::KernelOrder(a), tr));
            for (const auto& s : v) {
                const fs::ResidualReport r = fs::pde_residual(s, cfg);
                json j = r;
                checks.push_back(j);
                pass = pass && r.pass;
            }
        }
    } else if (suite == "stefan") {
        for (double a : cfg.alpha_list) {
            for (const auto& s : solutions(a)) {
                const double r = fs::stefan_residual(s, cfg);
                const bool ok = r <= cfg.tol.stefan;
                checks.push_back(check(fs::describe(s), r, cfg.tol.stefan, ok));
                pass = pass && ok;
            }
        }
    } else if (suite == "nonneg") {
        const fs::KernelScan scan = fs::kernel_nonnegativity_scan(cfg);
        pass = scan.min_value >= cfg.tol.kernel_min;
        json rows = json::array();
        for (std::size_t i = 0; i < scan.row_min.size(); ++i)
            rows.push_back(json{{"alpha", cfg.scan_alphas[i]}, {"min", scan.row_min[i]}});
        checks.push_back(json{{"name", "kernel_min"},
                              {"value", scan.min_value},
                              {"argmin", scan.argmin},
                              {"alpha_at_min", scan.alpha_at_min},
                              {"z_max", cfg.z_max},
                              {"evaluations", scan.evaluations},
                              {"tolerance", cfg.tol.kernel_min},
                              {"pass", pass},
                              {"rows", rows}});
    } else if (suite == "limits") {
        const fs::LimitReport rep = fs::classical_limit_report(cfg);
        pass = rep.pass;
        json rows = json::array();
        auto row = [](const fs::LimitRow& r) {
            return json{{"alpha", r.alpha}, {"f_gap", r.f_gap}, {"xi", r.xi},          {"xi_gap", r.xi_gap},
                        {"eta", r.eta},     {"eta_gap", r.eta_gap}};
        };
        for (const auto& r : rep.rows) rows.push_back(row(r));
        rows.push_back(row(rep.exact));
        checks.push_back(json{{"name", "classical_limit"},
                              {"xi1", rep.classical.xi1},
                              {"eta1", rep.classical.eta1},
                              {"rows", rows},
                              {"f_gap_decreasing", rep.f_gap_decreasing},
                              {"xi_gap_decreasing", rep.xi_gap_decreasing},
                              {"eta_gap_decreasing", rep.eta_gap_decreasing},
                              {"pass", rep.pass}});
    } else {
        for (const fs::IdentityResult& r : fs::identity_checks(cfg)) {
            json j{{"name", r.name}, {"value", r.value}, {"reference", r.reference},
                   {"error", r.error}, {"tolerance", r.tolerance}, {"pass", r.pass}};
            checks.push_back(j);
            pass = pass && r.pass;
        }
    }
    return json{{"schema_version", 1}, {"suite", suite}, {"pass", pass}, {"checks", checks}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-fractional one-phase Stefan problem: kernels, similarity solutions, verification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file (flags override it)")->envname("FRACSTEFAN_CONFIG");

    Options o;

    auto* ml = app.add_subcommand("ml-eval", "Three-parameter Mittag-Leffler function E_{alpha,m,l}(z)");
    ml->add_option("--alpha", o.alpha, "alpha > 0")->required()->check(Finite);
    ml->add_option("--m", o.m, "m > 0")->required()->check(Finite);
    ml->add_option("--l", o.l, "l")->required()->check(Finite);
    ml->add_option("--z", o.z, "argument")->required()->check(Finite);
    add_tol(ml, o);
    add_output(ml, o);

    auto* sg = app.add_subcommand("sigma", "Kernel sigma_alpha(z), z > 0");
    sg->add_option("--alpha", o.alpha, "0 < alpha <= 1")->required()->check(Finite);
    sg->add_option("--z", o.z, "z > 0")->required()->check(Finite);
    add_tol(sg, o);
    add_output(sg, o);

    auto* tb = app.add_subcommand("table", "sigma, f and moment on a uniform z grid over [0, zmax]");
    tb->add_option("--alpha", o.alpha, "0 < alpha <= 1")->required()->check(Finite);
    tb->add_option("--zmax", o.zmax, "Grid end")->check(Finite)->capture_default_str();
    tb->add_option("--points", o.points, "Grid points")->check(CLI::Range(2, 1000000))->capture_default_str();
    add_tol(tb, o);
    add_output(tb, o);

    auto* solve = app.add_subcommand("solve", "Similarity solution of the one-phase problem");
    solve->require_subcommand(1);
    auto* sd = solve->add_subcommand("dirichlet", "Constant temperature u0 at x = 0, melting temperature um");
    sd->add_option("--alpha", o.alpha, "0 < alpha <= 1")->required()->check(Finite);
    sd->add_option("--u0", o.u0, "Boundary temperature")->check(Finite)->capture_default_str();
    sd->add_option("--um", o.um, "Melting temperature")->check(Finite)->capture_default_str();
    auto* sn = solve->add_subcommand("neumann", "Caputo flux -g0 t^(-alpha/(1+alpha)) at x = 0");
    sn->add_option("--alpha", o.alpha, "0 < alpha <= 1")->required()->check(Finite);
    sn->add_option("--g0", o.g0, "Flux coefficient > 0")->check(Finite)->capture_default_str();
    sn->add_option("--gm", o.gm, "Melting temperature")->check(Finite)->capture_default_str();
    for (auto* c : {sd, sn}) {
        add_grid(c, o);
        add_scales(c, o);
        add_tol(c, o);
        add_output(c, o);
    }

    auto* qs = app.add_subcommand("quasi-stationary", "u = 1 - x^alpha/(Gamma(2+alpha) t)^(alpha/(1+alpha))");
    qs->add_option("--alpha", o.alpha, "0 < alpha <= 1")->required()->check(Finite);
    add_grid(qs, o);
    add_output(qs, o);

    auto* verify = app.add_subcommand("verify", "Verification suites; JSON report, exit 1 on failure");
    verify->require_subcommand(1);
    std::string suite;
    for (const char* name : {"pde", "stefan", "nonneg", "limits", "identities"}) {
        auto* v = verify->add_subcommand(name);
        v->add_option("--alpha", o.alphas, "Orders to check (repeatable)")->check(Finite);
        v->add_option("--t", o.t_samples, "Sample times (repeatable)")->check(Finite);
        v->add_option("--zmax", o.zmax, "Scan range of the kernel")->check(Finite)->capture_default_str();
        v->add_option("--xres", o.x_resolution, "Residual points per time")->capture_default_str();
        v->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        v->add_option("--out", o.out.path, "Output file (default stdout)");
        add_tol(v, o);
        v->callback([&suite, name] { suite = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (ml->parsed()) {
            o.out.write(ml_eval_text(o));
        } else if (sg->parsed()) {
            o.out.write(sigma_text(o));
        } else if (tb->parsed()) {
            o.out.write(table_text(o));
        } else if (sd->parsed()) {
            const fs::DirichletProblem p{fs::KernelOrder(o.alpha), o.u0, o.um, o.scales};
            o.out.write(solution_text(fs::build_dirichlet(p, o.truncation()), o));
        } else if (sn->parsed()) {
            const fs::NeumannProblem p{fs::KernelOrder(o.alpha), o.g0, o.gm, o.scales};
            o.out.write(solution_text(fs::build_neumann(p, o.truncation()), o));
        } else if (qs->parsed()) {
            o.out.write(solution_text(fs::quasi_stationary(fs::KernelOrder(o.alpha)), o));
        } else {
            bool pass = false;
            const json report = verify_suite(suite, o, pass);
            o.out.write(report.dump(2) + "\n");
            return pass ? ok : verification_failed;
        }
    } catch (const fs::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const fs::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << " (iterations " << e.iterations() << ")\n";
        return convergence;
    } catch (const fs::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return solver;
    }
    return ok;
}
