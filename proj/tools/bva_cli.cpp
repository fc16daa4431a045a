#include "bva/counterexample.hpp"
#include "bva/domain.hpp"
#include "bva/ellipticity.hpp"
#include "bva/error.hpp"
#include "bva/expression.hpp"
#include "bva/fields.hpp"
#include "bva/integrand.hpp"
#include "bva/nullspace.hpp"
#include "bva/operator.hpp"
#include "bva/projection.hpp"
#include "bva/report.hpp"
#include "bva/solver.hpp"
#include "bva/trace.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace bva;

constexpr int kExitUsage = 2;
constexpr int kExitInconsistent = 3;

std::string join(const Eigen::VectorXd& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
    return s;
}

std::string join(const Eigen::VectorXcd& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_number(v[i].real()) + (v[i].imag() < 0 ? "" : "+") + format_number(v[i].imag()) +
             "i";
    return s;
}

template <class T>
std::string join_list(const std::vector<T>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
}

void emit(const Report& r, const std::string& path) {
    if (path.empty()) {
        std::cout << r.str();
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write report: " + path);
    out << r.str();
}

/// Expression, or a sample file when the argument names an existing file.
DiscreteField field_from(const std::string& source, const Grid& grid, int components) {
    if (std::filesystem::is_regular_file(source)) {
        DiscreteField u = read_field_file(source);
        if (u.components() != components)
            throw DimensionError("field file has " + std::to_string(u.components()) + " components, expected " +
                                 std::to_string(components));
        return u;
    }
    const FieldExpression e = FieldExpression::parse(source, grid.dim());
    if (e.components() != components)
        throw DimensionError("expression has " + std::to_string(e.components()) + " components, expected " +
                             std::to_string(components));
    return DiscreteField::sample(grid, components, e.function());
}

FieldFn function_from(const std::string& source, int dim, int components) {
    const FieldExpression e = FieldExpression::parse(source, dim);
    if (e.components() != components)
        throw DimensionError("expression has " + std::to_string(e.components()) + " components, expected " +
                             std::to_string(components));
    return e.function();
}

struct Common {
    std::uint64_t seed = 1;
    std::string output;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Seed of the run's pseudo-random generator")->capture_default_str();
    sub->add_option("-o,--output", c.output, "Write the report to this file instead of stdout");
}

int run_classify(const std::string& op_src, int density, int samples, const Common& c) {
    const Operator op = load_operator(op_src);
    Report r("classify", c.seed);
    r.config("operator", op_src);
    r.config("grid_density", density);
    r.config("cancelling_samples", samples);
    r.set("n", op.n());
    r.set("N", op.N());
    r.set("K", op.K());
    const EllipticityReport e = classify(op, density, c.seed, samples);
    r.set("r_elliptic", e.r_elliptic);
    r.set("c_elliptic", e.c_elliptic);
    r.set("cancelling", e.cancelling);
    r.set("kappa1", e.kappa1);
    r.set("kappa2", e.kappa2);
    r.set("tolerance", e.tolerance);
    r.set("complex_minimum", e.complex_minimum);
    r.set("cancelling_dimension", e.cancelling_dimension);
    if (!e.cancelling_warning.empty()) r.set("cancelling_warning", e.cancelling_warning);
    if (e.witness_real) {
        r.set("witness_real.xi", join(e.witness_real->xi));
        r.set("witness_real.eta", join(e.witness_real->eta));
        r.set("witness_real.residual", e.witness_real->value);
    }
    if (e.witness_complex) {
        r.set("witness_complex.xi", join(e.witness_complex->xi));
        r.set("witness_complex.eta", join(e.witness_complex->eta));
        r.set("witness_complex.residual", e.witness_complex->value);
    }
    r.set("kernel_probe.stabilized", e.probe.stabilized);
    r.set("kernel_probe.dimension_by_degree", join_list(e.probe.dimension_by_degree));
    emit(r, c.output);
    return 0;
}

int run_kernel(const std::string& op_src, int cutoff, const Common& c) {
    const Operator op = load_operator(op_src);
    if (cutoff < 0) cutoff = default_cutoff(op);
    Report r("kernel", c.seed);
    r.config("operator", op_src);
    r.config("cutoff", std::to_string(cutoff));
    const KernelBasis b = kernel_basis(op, cutoff);
    r.set("dimension", b.dimension());
    r.set("minimal_l", b.minimal_l ? std::to_string(*b.minimal_l) : std::string("none"));
    r.set("finite", b.minimal_l.has_value());
    r.set("max_residual", b.max_residual(op));
    std::vector<std::vector<double>> rows;
    for (std::size_t d = 0; d < b.dimension_by_degree.size(); ++d)
        rows.push_back({static_cast<double>(d), static_cast<double>(b.dimension_by_degree[d])});
    r.table("dimension_by_degree", {"degree", "dimension"}, rows);
    emit(r, c.output);
    return 0;
}

int run_poincare(const std::string& op_src, int fields, const std::vector<double>& radii, int cells, const Common& c) {
    const Operator op = load_operator(op_src);
    Report r("poincare", c.seed);
    r.config("operator", op_src);
    r.config("fields", std::to_string(fields));
    r.config("radii", join_list(radii));
    r.config("cells_per_radius", std::to_string(cells));
    const KernelBasis b = trace_kernel(op);
    const auto family = random_fields(op.n(), op.N(), fields, c.seed);
    std::vector<std::vector<double>> rows;
    for (double rad : radii) {
        const Eigen::VectorXd center = Eigen::VectorXd::Zero(op.n());
        const KernelProjector p(b, center, rad);
        const Grid g = Grid::cube(op.n(), -rad * 1.0625, rad * 1.0625, static_cast<int>(2.125 * cells));
        double worst = 0.0;
        for (const auto& f : family) {
            // Dilate the field with the ball so the ratio compares like with like.
            const DiscreteField u = DiscreteField::sample(g, op.N(), [&](const Point& x, std::span<double> out) {
                const Point y = x / rad;
                f.evaluate(y, out);
            });
            worst = std::max(worst, poincare_ratio(op, p, u).value);
        }
        const double inv = inverse_estimate_constant(p, 50, c.seed);
        rows.push_back({rad, worst, inv});
    }
    r.table("poincare", {"radius", "max_ratio", "inverse_estimate"}, rows);
    emit(r, c.output);
    return 0;
}

int run_trace(const std::string& op_src, const std::string& dom_src, const std::string& field, int grid,
              std::optional<int> jmin, std::optional<int> jmax, double tol, const std::string& values_out,
              const Common& c) {
    const Operator op = load_operator(op_src);
    const Domain dom = load_domain(dom_src);
    const Grid g = solver_grid(dom, grid, 4);
    const DiscreteField u = field_from(field, g, op.N());
    TraceOptions opts;
    opts.j_min = jmin;
    opts.j_max = jmax;
    opts.tolerance = tol;
    Report r("trace", c.seed);
    r.config("operator", op_src);
    r.config("domain", dom_src);
    r.config("field", field);
    r.config("grid", std::to_string(grid));
    r.config("jmin", jmin ? std::to_string(*jmin) : std::string("auto"));
    r.config("jmax", jmax ? std::to_string(*jmax) : std::string("auto"));
    r.config("tolerance", tol);
    const TraceResult t = compute_trace(op, dom, u, opts);
    r.set("levels", join_list(t.levels));
    r.set("trace_l1", t.trace_l1);
    r.set("converged", t.converged);
    r.set("mesh_points", t.mesh.size());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < t.per_level_l1_diffs.size(); ++i)
        rows.push_back({static_cast<double>(t.levels[i]), static_cast<double>(t.levels[i + 1]), t.per_level_l1_diffs[i],
                        t.strip_variation[i]});
    r.table("level_differences", {"j", "j_next", "l1_diff", "strip_variation"}, rows);
    if (!values_out.empty()) {
        std::ofstream out(values_out);
        if (!out) throw ParseError("cannot write " + values_out);
        out.precision(17);
        for (std::size_t m = 0; m < t.mesh.size(); ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            for (Eigen::Index a = 0; a < t.mesh.points.rows(); ++a) out << t.mesh.points(a, mi) << '\t';
            for (Eigen::Index j = 0; j < t.boundary_values.rows(); ++j)
                out << t.boundary_values(j, mi) << (j + 1 < t.boundary_values.rows() ? '\t' : '\n');
        }
        r.set("values_file", values_out);
    }
    emit(r, c.output);
    return t.converged ? 0 : kExitInconsistent;
}

int run_counterexample(const std::string& variant, const std::vector<double>& eps, int grid, double away,
                       const Common& c) {
    const CounterexampleVariant v = parse_variant(variant);
    Report r("counterexample", c.seed);
    r.config("variant", variant_name(v));
    r.config("eps", join_list(eps));
    r.config("grid", std::to_string(grid));
    r.config("away_radius", away);
    const CounterexampleTable t = no_trace_counterexample(v, eps, grid, away);
    r.set("operator", t.op.name());
    r.set("hyperplane_normal", join(Eigen::VectorXd(t.hyperplane_normal)));
    r.set("discrete_A_l1_centered", t.discrete_A_l1_centered);
    r.set("discrete_A_l1_forward", t.discrete_A_l1_forward);
    std::vector<std::vector<double>> rows;
    for (const auto& row : t.rows)
        rows.push_back({row.eps, row.interior_l1, row.interior_A_l1, row.line_l1, row.line_oracle});
    r.table("divergence", {"eps", "interior_l1", "interior_A_l1", "line_l1", "line_oracle"}, rows);
    emit(r, c.output);
    return 0;
}

int run_gauss_green(const std::string& op_src, const std::string& dom_src, const std::string& u_src,
                    const std::string& phi_src, int grid, double trace_tol, const Common& c) {
    const Operator op = load_operator(op_src);
    const Domain dom = load_domain(dom_src);
    const Grid g = solver_grid(dom, grid, 4);
    const DiscreteField u = field_from(u_src, g, op.N());
    const FieldFn phi = function_from(phi_src, op.n(), op.K());
    Report r("gauss-green", c.seed);
    r.config("operator", op_src);
    r.config("domain", dom_src);
    r.config("u", u_src);
    r.config("phi", phi_src);
    r.config("grid", std::to_string(grid));
    r.config("trace_tolerance", trace_tol);
    const GaussGreen gg = gauss_green_residual(op, dom, u, phi, {}, trace_tol);
    r.set("residual", gg.residual);
    r.set("bulk_derivative", gg.bulk_derivative);
    r.set("bulk_adjoint", gg.bulk_adjoint);
    r.set("boundary", gg.boundary);
    r.set("trace_levels", join_list(gg.trace.levels));
    emit(r, c.output);
    return 0;
}

struct MinimizeArgs {
    std::string op, domain, integrand = "tv", u0, trace_out, field_out, boundary = "trace";
    int grid = 64;
    SolverOptions solver;
};

int run_minimize(const MinimizeArgs& a, const Common& c) {
    DirichletProblem dp;
    dp.op = load_operator(a.op);
    dp.domain = load_domain(a.domain);
    dp.integrand = load_integrand(a.integrand);
    dp.options = a.solver;
    dp.options.seed = c.seed;
    dp.grid = solver_grid(dp.domain, a.grid, dp.options.ring);
    if (std::filesystem::is_regular_file(a.u0)) {
        const DiscreteField f = read_field_file(a.u0);
        if (f.components() != dp.op.N()) throw DimensionError("u0 file component count does not match N");
        dp.u0 = [f](const Point& x, std::span<double> out) { f.interpolate(x, out); };
    } else {
        dp.u0 = function_from(a.u0, dp.op.n(), dp.op.N());
    }
    if (a.boundary != "trace" && a.boundary != "ring") throw ParseError("--boundary must be trace or ring");

    Report r("minimize", c.seed);
    r.config("operator", a.op);
    r.config("domain", a.domain);
    r.config("integrand", a.integrand);
    r.config("u0", a.u0);
    r.config("grid", std::to_string(a.grid));
    r.config("ring", std::to_string(dp.options.ring));
    r.config("hard_boundary", dp.options.hard_boundary ? "true" : "false");
    r.config("iters", std::to_string(dp.options.max_iterations));
    r.config("tol", dp.options.tolerance);
    r.config("window", std::to_string(dp.options.window));
    r.config("boundary", a.boundary);

    const MinimizeResult m = minimize(dp);
    r.set("energy", m.energy);
    r.set("iterations", m.iterations);
    r.set("converged", m.converged);
    r.set("operator_norm", m.operator_norm);
    r.set("tau", m.tau);
    r.set("sigma", m.sigma);
    r.set("datum_energy", m.datum_energy);
    r.set("coercivity_constant", m.coercivity_constant);
    const Energy e = energy(dp, m.u, a.boundary == "trace" ? BoundaryMode::Trace : BoundaryMode::Ring);
    r.set("energy.bulk", e.bulk);
    r.set("energy.boundary_ring", e.boundary_ring);
    if (a.boundary == "trace") {
        r.set("energy.boundary_trace", e.boundary_trace);
        r.set("energy.trace_levels", join_list(e.trace_levels));
    }
    r.set("energy.total", e.total);
    if (!a.trace_out.empty()) {
        std::ofstream out(a.trace_out);
        if (!out) throw ParseError("cannot write " + a.trace_out);
        for (double v : m.energy_trace) out << format_number(v) << '\n';
        r.set("energy_trace_file", a.trace_out);
    }
    if (!a.field_out.empty()) {
        std::ofstream out(a.field_out);
        if (!out) throw ParseError("cannot write " + a.field_out);
        write_field(out, m.u);
        r.set("field_file", a.field_out);
    }
    emit(r, c.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functions of bounded A-variation: ellipticity, kernels, traces and relaxed Dirichlet problems"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Common common;
    const std::string op_help = "Operator: builtin:NAME,n[,N] or an operator file";

    std::string op_src;
    int density = 12, samples = 64;
    auto* classify_cmd = app.add_subcommand("classify", "R-/C-ellipticity and cancellation of an operator");
    classify_cmd->add_option("operator", op_src, op_help)->required();
    classify_cmd->add_option("--density", density, "Sphere grid points per angle")->capture_default_str();
    classify_cmd->add_option("--samples", samples, "Frequencies for the cancellation test")->capture_default_str();
    add_common(classify_cmd, common);

    int cutoff = -1;
    auto* kernel_cmd = app.add_subcommand("kernel", "Polynomial nullspace up to a degree cutoff");
    kernel_cmd->add_option("operator", op_src, op_help)->required();
    kernel_cmd->add_option("--cutoff", cutoff, "Degree cutoff (-1: 2(n+N)+2)")->capture_default_str();
    add_common(kernel_cmd, common);

    int fields = 50, cells = 32;
    std::vector<double> radii{1.0, 0.5, 0.25};
    auto* poincare_cmd = app.add_subcommand("poincare", "Poincare ratios over a seeded smooth field family");
    poincare_cmd->add_option("operator", op_src, op_help)->required();
    poincare_cmd->add_option("--fields", fields, "Number of random fields")->capture_default_str();
    poincare_cmd->add_option("--radii", radii, "Ball radii")->delimiter(',')->capture_default_str();
    poincare_cmd->add_option("--cells", cells, "Grid cells per radius")->capture_default_str();
    add_common(poincare_cmd, common);

    std::string dom_src = "disk", field = "x1";
    int grid = 256;
    std::optional<int> jmin, jmax;
    double tol = 1e-3;
    std::string values_out;
    auto* trace_cmd = app.add_subcommand("trace", "Boundary trace by the Whitney-cover construction");
    trace_cmd->add_option("operator", op_src, op_help)->required();
    trace_cmd->add_option("--domain", dom_src, "disk, square, builtin:... or a domain file")->capture_default_str();
    trace_cmd->add_option("--field", field, "Expression (components separated by ';') or sample file")
        ->capture_default_str();
    trace_cmd->add_option("--grid", grid, "Cells across the domain")->capture_default_str();
    trace_cmd->add_option("--jmin", jmin, "Coarsest level (default: domain coarsest level)");
    trace_cmd->add_option("--jmax", jmax, "Finest level (default: finest with 2^-j >= h)");
    trace_cmd->add_option("--tol", tol, "Relative convergence tolerance")->capture_default_str();
    trace_cmd->add_option("--values", values_out, "Write boundary points and trace values (TSV)");
    add_common(trace_cmd, common);

    std::string variant = "r-not-c";
    std::vector<double> eps{1e-1, 1e-2, 1e-3};
    int ce_grid = 512;
    double away = 0.1;
    auto* ce_cmd = app.add_subcommand("counterexample", "No-trace counterexample divergence table");
    ce_cmd->add_option("--variant", variant, "r-not-c or not-r")->capture_default_str();
    ce_cmd->add_option("--eps", eps, "Decreasing cutoffs")->delimiter(',')->capture_default_str();
    ce_cmd->add_option("--grid", ce_grid, "Cells per axis on [-1,1]^2")->capture_default_str();
    ce_cmd->add_option("--away", away, "Radius excluded around the singularity")->capture_default_str();
    add_common(ce_cmd, common);

    std::string u_src = "x1", phi_src;
    int gg_grid = 128;
    double trace_tol = 1e-2;
    auto* gg_cmd = app.add_subcommand("gauss-green", "Gauss-Green residual with the computed trace");
    gg_cmd->add_option("operator", op_src, op_help)->required();
    gg_cmd->add_option("--domain", dom_src, "disk, square, builtin:... or a domain file")->capture_default_str();
    gg_cmd->add_option("--u", u_src, "Expression or sample file for u")->capture_default_str();
    gg_cmd->add_option("--phi", phi_src, "Expression for the K-valued test field")->required();
    gg_cmd->add_option("--grid", gg_grid, "Cells across the domain")->capture_default_str();
    gg_cmd->add_option("--trace-tol", trace_tol, "Relative trace convergence required")->capture_default_str();
    add_common(gg_cmd, common);

    MinimizeArgs ma;
    auto* min_cmd = app.add_subcommand("minimize", "Relaxed linear-growth Dirichlet problem");
    min_cmd->add_option("operator", ma.op, op_help)->required();
    min_cmd->add_option("--domain", ma.domain, "disk, square, builtin:... or a domain file")->required();
    min_cmd->add_option("--integrand", ma.integrand, "tv, area or table:<file>")->capture_default_str();
    min_cmd->add_option("--u0", ma.u0, "Boundary datum: expression or sample file")->required();
    min_cmd->add_option("--grid", ma.grid, "Cells across the domain")->capture_default_str();
    min_cmd->add_flag("--hard-boundary", ma.solver.hard_boundary, "Fix u = u0 on the boundary ring");
    min_cmd->add_option("--iters", ma.solver.max_iterations, "Iteration cap")->capture_default_str();
    min_cmd->add_option("--tol", ma.solver.tolerance, "Relative energy change over the window")
        ->capture_default_str();
    min_cmd->add_option("--window", ma.solver.window, "Stopping window in iterations")->capture_default_str();
    min_cmd->add_option("--ring", ma.solver.ring, "Exterior cells fixed to u0")->capture_default_str();
    min_cmd->add_flag("--start-from-datum", ma.solver.start_from_datum, "Start from u0 instead of 0");
    min_cmd->add_option("--boundary", ma.boundary, "Boundary term evaluation: trace or ring")->capture_default_str();
    min_cmd->add_option("--energy-trace", ma.trace_out, "Write the energy trace, one value per line");
    min_cmd->add_option("--field-out", ma.field_out, "Write the minimiser as a field sample file");
    add_common(min_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*classify_cmd) return run_classify(op_src, density, samples, common);
        if (*kernel_cmd) return run_kernel(op_src, cutoff, common);
        if (*poincare_cmd) return run_poincare(op_src, fields, radii, cells, common);
        if (*trace_cmd) return run_trace(op_src, dom_src, field, grid, jmin, jmax, tol, values_out, common);
        if (*ce_cmd) return run_counterexample(variant, eps, ce_grid, away, common);
        if (*gg_cmd) return run_gauss_green(op_src, dom_src, u_src, phi_src, gg_grid, trace_tol, common);
        if (*min_cmd) return run_minimize(ma, common);
    } catch (const InconsistencyError& e) {
        std::cerr << "inconsistency: " << e.what() << '\n';
        return kExitInconsistent;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
