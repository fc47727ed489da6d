// Command line driver for the polytope smoothing library: mesh generation,
// polynomial integration demo, patch tests, the cantilever/torsion/L-shape
// benchmarks and convergence reporting.

#include "polyls/convergence.hpp"
#include "polyls/mesh_io.hpp"
#include "polyls/problems.hpp"
#include "polyls/vtk.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

using namespace polyls;

namespace {

struct CommonArgs {
    std::vector<std::string> schemes = {"ls1"};
    int levels = 4;
    std::uint64_t seed = 1;
    std::string out_dir;
    int lloyd = 30;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--scheme", args.schemes, "smoothing schemes: cs, ls3n, ls1")
        ->check(CLI::IsMember({"cs", "ls3n", "ls1"}));
    cmd->add_option("--levels", args.levels, "number of refinement levels")->check(CLI::Range(1, 8));
    cmd->add_option("--seed", args.seed, "mesh generator rng seed");
    cmd->add_option("--lloyd", args.lloyd, "Lloyd relaxation sweeps");
    cmd->add_option("--out", args.out_dir, "output directory for CSV/plot data");
}

BenchOptions to_options(const CommonArgs& args, const std::vector<int>& all_sizes,
                        const std::string& vtk_path)
{
    BenchOptions opt;
    opt.schemes.clear();
    for (const auto& s : args.schemes) opt.schemes.push_back(scheme_from_name(s));
    const int levels = std::min<int>(args.levels, static_cast<int>(all_sizes.size()));
    opt.sizes.assign(all_sizes.begin(), all_sizes.begin() + levels);
    opt.rng_seed = args.seed;
    opt.lloyd = args.lloyd;
    opt.vtk_path = vtk_path;
    return opt;
}

void report_and_save(const std::vector<RunRecord>& records, const CommonArgs& args,
                     const std::string& name)
{
    std::cout << std::setw(10) << "scheme" << std::setw(8) << "level" << std::setw(10) << "cells"
              << std::setw(10) << "dofs" << std::setw(13) << "h" << std::setw(13) << "L2"
              << std::setw(13) << "H1" << std::setw(15) << "energy" << std::setw(10) << "points"
              << "\n";
    for (const auto& r : records)
        std::cout << std::setw(10) << r.scheme << std::setw(8) << r.level << std::setw(10)
                  << r.n_elements << std::setw(10) << r.n_dofs << std::setw(13)
                  << std::setprecision(4) << std::scientific << r.h << std::setw(13) << r.l2
                  << std::setw(13) << r.h1 << std::setw(15) << r.energy << std::setw(10)
                  << std::defaultfloat << r.interior_points << "\n";

    bool have_errors = false;
    for (const auto& r : records) have_errors = have_errors || r.l2 > 0.0;
    if (have_errors) {
        bool have_rates = true;
        try {
            for (const auto& rep : convergence_report(records))
                std::cout << rep.benchmark << " " << rep.scheme << ": L2 slope "
                          << std::setprecision(3) << rep.l2_slope << ", H1 slope " << rep.h1_slope
                          << (rep.monotone ? "" : "  [non-monotone]") << "\n";
        } catch (const std::exception&) {
            have_rates = false; // fewer than 3 levels
        }
        if (!have_rates) std::cout << "(need >= 3 levels for convergence rates)\n";
    }

    if (!args.out_dir.empty()) {
        std::filesystem::create_directories(args.out_dir);
        write_csv(records, args.out_dir + "/" + name + ".csv");
        write_plot_data(records, args.out_dir + "/" + name + ".dat");
        std::cout << "wrote " << args.out_dir << "/" << name << ".csv and .dat\n";
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"polytope finite elements with linearly consistent one-point smoothing"};
    app.require_subcommand(1);

    // mesh
    auto* mesh_cmd = app.add_subcommand("mesh", "generate a centroidal Voronoi mesh");
    int mesh_dim = 2, mesh_n = 20, mesh_lloyd = 30;
    std::uint64_t mesh_seed = 1;
    std::string mesh_domain = "box";
    std::vector<double> mesh_lo = {0, 0, 0}, mesh_hi = {1, 1, 1};
    std::string mesh_out = "mesh.json", mesh_vtk;
    mesh_cmd->add_option("--dim", mesh_dim)->check(CLI::IsMember({2, 3}));
    mesh_cmd->add_option("--n", mesh_n, "target element count");
    mesh_cmd->add_option("--lloyd", mesh_lloyd, "Lloyd sweeps");
    mesh_cmd->add_option("--seed", mesh_seed);
    mesh_cmd->add_option("--domain", mesh_domain, "box or lshape")
        ->check(CLI::IsMember({"box", "lshape"}));
    mesh_cmd->add_option("--lo", mesh_lo, "domain lower corner")->expected(2, 3);
    mesh_cmd->add_option("--hi", mesh_hi, "domain upper corner")->expected(2, 3);
    mesh_cmd->add_option("--out", mesh_out, "mesh file to write");
    mesh_cmd->add_option("--vtk", mesh_vtk, "also write a legacy VTK file");

    // integrate
    auto* integrate_cmd = app.add_subcommand("integrate", "polynomial integration demo");
    std::string integrate_out;
    integrate_cmd->add_option("--out", integrate_out, "output directory for the CSV");

    // patch
    auto* patch_cmd = app.add_subcommand("patch", "linear or quadratic patch test");
    CommonArgs patch_args;
    int patch_dim = 2, patch_order = 1;
    std::string patch_mesh_file;
    patch_cmd->add_option("--dim", patch_dim)->check(CLI::IsMember({2, 3}));
    patch_cmd->add_option("--order", patch_order)->check(CLI::IsMember({1, 2}));
    patch_cmd->add_option("--mesh", patch_mesh_file, "solve on this mesh file instead");
    add_common(patch_cmd, patch_args);

    // cantilever / torsion / lshape
    auto* cant_cmd = app.add_subcommand("cantilever", "cantilever under end shear");
    CommonArgs cant_args;
    add_common(cant_cmd, cant_args);
    auto* torsion_cmd = app.add_subcommand("torsion", "prismatic bar under end torsion");
    CommonArgs torsion_args;
    add_common(torsion_cmd, torsion_args);
    auto* lshape_cmd = app.add_subcommand("lshape", "L-shaped block strain energy");
    CommonArgs lshape_args;
    add_common(lshape_cmd, lshape_args);

    // report
    auto* report_cmd = app.add_subcommand("report", "convergence slopes from a results CSV");
    std::string report_in;
    report_cmd->add_option("--in", report_in, "results CSV")->required();

    // optional VTK output of the finest displacement field
    std::string vtk_out;
    for (CLI::App* cmd : {patch_cmd, cant_cmd, torsion_cmd, lshape_cmd})
        cmd->add_option("--vtk", vtk_out, "write the finest-level mesh + displacement");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mesh_cmd) {
            Vec3 lo(mesh_lo[0], mesh_lo[1], mesh_lo.size() > 2 ? mesh_lo[2] : 0.0);
            Vec3 hi(mesh_hi[0], mesh_hi[1], mesh_hi.size() > 2 ? mesh_hi[2] : 0.0);
            Domain dom;
            if (mesh_domain == "box")
                dom = mesh_dim == 2 ? Domain::box_2d(lo, hi) : Domain::box_3d(lo, hi);
            else
                dom = mesh_dim == 2 ? Domain::lshape_2d(lo, hi) : Domain::lshape_prism(lo, hi);
            const PolytopeMesh mesh = generate_cvt_mesh(dom, mesh_n, mesh_lloyd, mesh_seed);
            write_mesh_json(mesh, mesh_out);
            std::cout << "wrote " << mesh_out << " (" << mesh.n_elements() << " elements, "
                      << mesh.n_nodes() << " nodes)\n";
            if (!mesh_vtk.empty()) {
                write_vtk(mesh, mesh_vtk);
                std::cout << "wrote " << mesh_vtk << "\n";
            }
        } else if (*integrate_cmd) {
            const auto rows = run_integration_demo();
            std::cout << std::setw(12) << "shape" << std::setw(16) << "function" << std::setw(22)
                      << "one-point value" << std::setw(22) << "oracle value" << std::setw(12)
                      << "rel.err" << std::setw(8) << "pts" << std::setw(8) << "oracle\n";
            for (const auto& r : rows)
                std::cout << std::setw(12) << r.shape << std::setw(16) << r.function
                          << std::setw(22) << std::setprecision(14) << r.ls1 << std::setw(22)
                          << r.oracle << std::setw(12) << std::setprecision(2) << std::scientific
                          << r.rel_err << std::defaultfloat << std::setw(8) << r.points_ls1
                          << std::setw(8) << r.points_oracle << "\n";
            if (!integrate_out.empty()) {
                std::filesystem::create_directories(integrate_out);
                std::ofstream os(integrate_out + "/integration.csv");
                os << "shape,function,one_point,oracle,rel_err,points,oracle_points\n";
                os << std::setprecision(17);
                for (const auto& r : rows)
                    os << r.shape << "," << r.function << "," << r.ls1 << "," << r.oracle << ","
                       << r.rel_err << "," << r.points_ls1 << "," << r.points_oracle << "\n";
            }
        } else if (*patch_cmd) {
            const std::vector<int> sizes2 = {10, 20, 50, 100, 200, 400};
            const std::vector<int> sizes3 = {9, 25, 100, 300, 500, 800};
            const BenchOptions opt = to_options(patch_args, patch_dim == 2 ? sizes2 : sizes3, vtk_out);
            std::vector<RunRecord> records;
            if (!patch_mesh_file.empty()) {
                const PolytopeMesh mesh = read_mesh_json(patch_mesh_file);
                const Material mat = mesh.dim == 2 ? Material::plane_stress(1.0, 0.3)
                                                   : Material::isotropic_3d(1.0, 0.3);
                const PolyField field = patch_order == 1 ? linear_patch_field(mesh.dim)
                                                         : quadratic_patch_field(mesh.dim);
                for (Scheme s : opt.schemes)
                    records.push_back(solve_patch_level(mesh, mat, s, field, "patch_file", 0,
                                                        s == opt.schemes.back() ? vtk_out
                                                                                : std::string{}));
            } else {
                records = patch_order == 1 ? run_linear_patch(patch_dim, opt)
                                           : run_quadratic_patch(patch_dim, opt);
            }
            report_and_save(records, patch_args,
                            "patch_" + std::to_string(patch_dim) + "d_o" +
                                std::to_string(patch_order));
        } else if (*cant_cmd) {
            const BenchOptions opt = to_options(cant_args, {80, 160, 320, 640, 1280}, vtk_out);
            double tip = 0.0;
            const auto records = run_cantilever(opt, &tip);
            report_and_save(records, cant_args, "cantilever");
            std::cout << "finest-mesh tip deflection " << std::setprecision(8) << tip
                      << " (analytic " << CantileverProblem{}.tip_deflection() << ")\n";
        } else if (*torsion_cmd) {
            TorsionSolution sol;
            if (sol.term_ratio() > 1e-12)
                std::cout << "note: torsion series truncated at N=" << sol.N
                          << " (coefficient ratio " << std::setprecision(2) << std::scientific
                          << sol.term_ratio() << std::defaultfloat << ")\n";
            const BenchOptions opt = to_options(torsion_args, {50, 120, 350, 1000, 2000}, vtk_out);
            report_and_save(run_torsion(opt), torsion_args, "torsion");
        } else if (*lshape_cmd) {
            const BenchOptions opt = to_options(lshape_args, {40, 80, 160, 320, 640}, vtk_out);
            const auto records = run_lshape(opt);
            report_and_save(records, lshape_args, "lshape");
            std::cout << "reference strain energy " << LShapeProblem{}.reference_energy << "\n";
        } else if (*report_cmd) {
            const auto records = read_csv(report_in);
            for (const auto& rep : convergence_report(records))
                std::cout << rep.benchmark << " " << rep.scheme << ": L2 slope "
                          << std::setprecision(3) << rep.l2_slope << ", H1 slope " << rep.h1_slope
                          << (rep.monotone ? "" : "  [non-monotone]") << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
