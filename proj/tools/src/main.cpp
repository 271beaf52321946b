#include <iostream>

#include <CLI11.hpp>

#include "minphase_tools/commands.hpp"

int main(int argc, char** argv) {
    using namespace minphase::tools;

    CLI::App app{"Minimum-phase linear array design"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_overrides = [&cfg](CLI::App* sub) {
        sub->add_option("--q-factor", cfg.q_factor, "Expansion factor Q = K*N")
            ->check(CLI::PositiveNumber);
        sub->add_option("--grid", cfg.grid_points, "Analysis grid points on [0, pi]");
        sub->add_option("--max-n", cfg.max_n, "Largest element count tried");
        sub->add_flag("--newton", cfg.newton_refine, "Newton refinement of the weights");
        sub->add_option("--zero-tol", cfg.zero_tol, "Radius tolerance for the minimum-phase check");
        sub->add_option("--gamma-margin", cfg.gamma_margin, "Initial relative margin on gamma");
    };

    auto* design = app.add_subcommand("design", "Design from a JSON spec file");
    design->add_option("--spec", cfg.spec_path, "Spec file")->required();
    design->add_option("--out", cfg.output_dir, "Output directory")->required();
    add_overrides(design);

    auto* repro = app.add_subcommand("reproduce", "Run a built-in design and check it");
    repro->add_option("design", cfg.builtin, "design1 | design2 | design3 | pencil")->required();
    repro->add_option("--out", cfg.output_dir, "Output directory")->required();
    repro->add_option("--stop-edge", cfg.design3_stop_edge, "Design 3 stop edge (u radians)");
    add_overrides(repro);

    auto* analyze = app.add_subcommand("analyze", "Analyze a weights file");
    analyze->add_option("--weights", cfg.weights_path, "Weights CSV")->required();
    analyze->add_option("--spec", cfg.spec_path, "Spec file to check against");
    analyze->add_option("--out", cfg.output_dir, "Output directory")->required();
    add_overrides(analyze);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    if (*design) return run_design(cfg, std::cout, std::cerr);
    if (*repro) return run_reproduce(cfg, std::cout, std::cerr);
    return run_analyze(cfg, std::cout, std::cerr);
}
