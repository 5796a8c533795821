#include <iostream>

#include <CLI11.hpp>

#include "pipescan/commands.hpp"
#include "pipescan/errors.hpp"

// pipescan: simulate stereo IR laser-ring scans of defective pipes, process
// them into RGB-D ring profiles and defect maps, and report accuracy and
// throughput.

namespace {

int exit_code_for(const pipescan::Error& e) {
    switch (e.kind()) {
        case pipescan::ErrorKind::InvalidConfig:
        case pipescan::ErrorKind::InvalidArgument:
            return pipescan::kExitConfig;
        case pipescan::ErrorKind::IoFailure:
            return pipescan::kExitIo;
        default:
            return pipescan::kExitProcessing;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stereo laser-ring pipe profiler"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key-value config file; flags override it");

    pipescan::SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "render a synthetic scan");
    simulate->add_option("--scene", sim.scene_path, "scene file")->required();
    simulate->add_option("--rig", sim.rig_path, "rig file")->required();
    simulate->add_option("--out", sim.out_dir, "output scan directory")->required();
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--noise", sim.noise_scale, "noise scale (0 disables)");
    simulate->add_flag("--serial", sim.serial, "run the serial reference kernels");
    simulate->add_flag("--quiet", sim.quiet, "suppress progress output");

    pipescan::ProcessOptions proc;
    CLI::App* process = app.add_subcommand("process", "reconstruct a scan into map artifacts");
    process->add_option("--scan", proc.scan_dir, "scan directory (simulate output)")->required();
    process->add_option("--out", proc.out_dir, "output directory")->required();
    process->add_option("--rays", proc.rays, "rays per frame")->check(CLI::Range(8, 100000));
    process->add_option("--threshold", proc.threshold, "mask threshold (0 = auto)");
    process->add_option("--hough-rmin", proc.hough_r_min, "Hough radius search floor (px)");
    process->add_option("--hough-rmax", proc.hough_r_max, "Hough radius search ceiling (px)");
    process->add_option("--format", proc.ply_format, "PLY format")
        ->check(CLI::IsMember({"ascii", "binary"}));
    process->add_flag("--export-masks", proc.export_masks, "write per-frame mask PGMs");
    process->add_flag("--serial", proc.serial, "run the serial reference kernels");
    process->add_flag("--quiet", proc.quiet, "suppress progress output");

    pipescan::ReportOptions rep;
    CLI::App* report = app.add_subcommand("report", "accuracy and throughput summaries");
    report->add_option("--processed", rep.processed_dir, "process output directory")->required();
    report->add_option("--scan", rep.scan_dir, "scan directory (for --throughput)");
    report->add_option("--out", rep.out_dir, "output directory (default: processed dir)");
    report->add_flag("--throughput", rep.throughput, "measure pipeline throughput");
    report->add_option("--settings", rep.ray_settings, "points-per-frame settings");
    report->add_flag("--serial", rep.serial, "run the serial reference kernels");
    report->add_flag("--quiet", rep.quiet, "suppress progress output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return pipescan::run_simulate(sim);
        if (process->parsed()) return pipescan::run_process(proc);
        if (report->parsed()) return pipescan::run_report(rep);
    } catch (const pipescan::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pipescan::kExitProcessing;
    }
    return pipescan::kExitConfig;
}
