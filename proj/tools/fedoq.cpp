// fedoq: exact deformation quantization of nonsingular Poisson brackets.
// Subcommands: validate, quantize, star, check. JSON in, JSON out.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedoq/driver.hpp"

namespace {

void emit(const fedoq::RunResult& result) { std::cout << result.report.dump(2) << "\n"; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Fedosov-style star products over polynomial and jet base rings"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fedoq::kVersion));

    std::string config_path;
    fedoq::RunOptions opt;
    bool no_stability = false;

    auto add_common = [&](CLI::App* cmd, bool with_stability) {
        cmd->add_option("config", config_path, "job configuration (JSON)")->required();
        cmd->add_flag("--timings", opt.timings, "include wall-clock timings in the report");
        if (with_stability)
            cmd->add_flag("--no-stability", no_stability,
                          "skip the re-run at D_max+2 that guards truncation stability");
    };

    auto* validate = app.add_subcommand("validate", "parse and validate a bracket configuration");
    add_common(validate, false);

    std::string out_path;
    auto* quantize = app.add_subcommand("quantize", "solve the flat connection and serialize it");
    add_common(quantize, true);
    quantize->add_option("--out", out_path, "write the solved connection to this file");
    quantize->add_option("--dump", opt.dumps, "dump intermediate artifacts: r|alpha|beta|tau:<expr>");

    std::string a_expr, b_expr;
    std::optional<int> order;
    auto* star = app.add_subcommand("star", "expand a star product order by order");
    add_common(star, true);
    star->add_option("--a", a_expr, "left factor (polynomial expression)")->required();
    star->add_option("--b", b_expr, "right factor (polynomial expression)")->required();
    star->add_option("--order", order, "override the hbar truncation order");
    star->add_option("--dump", opt.dumps, "dump intermediate artifacts: r|alpha|beta|tau:<expr>");

    std::string suite = "all";
    std::optional<std::uint64_t> seed;
    std::optional<int> fault_order;
    auto* check = app.add_subcommand("check", "run verification suites against a configuration");
    add_common(check, true);
    check->add_option("--suite", suite, "all|assoc|identities|moyal")->capture_default_str();
    check->add_option("--order", order, "check through this hbar order");
    check->add_option("--seed", seed, "override the sampling seed");
    check->add_option("--fault-inject", fault_order,
                      "corrupt F_k at this order (negative control)");

    CLI11_PARSE(app, argc, argv);
    opt.stability = !no_stability;

    fedoq::RunResult result;
    if (validate->parsed())
        result = fedoq::run_validate(config_path, opt);
    else if (quantize->parsed())
        result = fedoq::run_quantize(config_path, out_path, opt);
    else if (star->parsed())
        result = fedoq::run_star(config_path, a_expr, b_expr, order, opt);
    else
        result = fedoq::run_check(config_path, suite, order, seed, fault_order, opt);

    emit(result);
    return result.exit_code;
}
