#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "ffem/config.hpp"
#include "ffem/studies.hpp"

namespace {

int clamp_threads(int t) {
    if (t > 0) return t;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void warn_if_patch_snaps(const ffem::StudyConfig& cfg) {
    if (!cfg.has_patch) return;
    for (double hl : cfg.horizons) {
        int ne = cfg.mesh_densities(hl).front();
        auto mesh = ffem::Mesh1D::build(cfg.length, ne, {{cfg.patch_x0, cfg.patch_length}});
        if (mesh.patch()->snapped)
            std::cerr << "warning: patch bounds snapped to element nodes by "
                      << mesh.patch()->snap_distance << " m (N = " << ne << ")\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"f-FEM solver for nonlocal piezoelectric smart beams"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand too

    std::string out_dir;  // empty: use the config's [outputs] directory
    int threads = 0;
    int quad_order = 4;
    app.add_option("--out", out_dir, "output directory (default: config's outputs.directory)");
    app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--quad-order", quad_order, "Gauss-Legendre points per element")
        ->check(CLI::Range(1, 32))
        ->capture_default_str();

    std::string run_config, converge_config, sweep_config;
    auto* run = app.add_subcommand("run", "solve every grid point of a config, write profiles + metrics");
    run->add_option("config", run_config, "configuration file")->required();
    auto* converge = app.add_subcommand("converge", "mesh-refinement study over the config's density list");
    converge->add_option("config", converge_config, "configuration file")->required();
    int table = 0;
    auto* validate = app.add_subcommand("validate", "reproduce the published tables and report each cell");
    validate->add_option("--table", table, "restrict to one table (1-4)")->check(CLI::Range(0, 4));
    auto* sweep = app.add_subcommand("sweep", "long-format metrics CSV over the (alpha, horizon) grid");
    sweep->add_option("config", sweep_config, "configuration file")->required();

    CLI11_PARSE(app, argc, argv);
    threads = clamp_threads(threads);

    try {
        if (*run) {
            ffem::StudyConfig cfg = ffem::parse_config_file(run_config);
            warn_if_patch_snaps(cfg);
            std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
            int rc = ffem::run_case(cfg, dir, quad_order, threads);
            std::cout << "wrote " << dir << "/metrics.csv\n";
            return rc;
        }
        if (*converge) {
            ffem::StudyConfig cfg = ffem::parse_config_file(converge_config);
            warn_if_patch_snaps(cfg);
            std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
            std::filesystem::create_directories(dir);
            for (double alpha : cfg.alphas) {
                for (double hl : cfg.horizons) {
                    auto res = ffem::convergence_study(cfg, alpha, hl, quad_order);
                    char name[96];
                    std::snprintf(name, sizeof(name), "convergence_a%g_hl%g.csv", alpha, hl);
                    ffem::write_convergence_csv(dir + "/" + std::string(name), res);
                    std::cout << "alpha=" << alpha << " h_l=" << hl << ": ";
                    if (res.converged_n_inf)
                        std::cout << "converged (<1%) at N_inf=" << *res.converged_n_inf << "\n";
                    else
                        std::cout << "no density below 1% change\n";
                }
            }
            return 0;
        }
        if (*validate) {
            auto rep = ffem::validation_suite(table, 500, quad_order, threads);
            std::string text = ffem::format_validation_report(rep);
            std::cout << text;
            std::string dir = out_dir.empty() ? "out" : out_dir;
            std::filesystem::create_directories(dir);
            std::ofstream f(dir + "/validation_report.txt");
            f << text;
            return rep.all_pass ? 0 : 1;
        }
        if (*sweep) {
            ffem::StudyConfig cfg = ffem::parse_config_file(sweep_config);
            warn_if_patch_snaps(cfg);
            std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
            std::filesystem::create_directories(dir);
            auto rows = ffem::parametric_sweep(cfg, quad_order, threads);
            ffem::write_metrics_csv(dir + "/metrics.csv", rows);
            std::cout << "wrote " << dir << "/metrics.csv (" << rows.size() << " rows)\n";
            for (const auto& r : rows)
                if (r.status != "ok") std::cerr << "row failed: " << ffem::metrics_line(r) << "\n";
            return 0;
        }
    } catch (const ffem::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
