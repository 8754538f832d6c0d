#include "csl/app.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App cli{"csl: volatility, security, network and forensics models with reproducible reports"};
    cli.require_subcommand(1);

    csl::app::Request req;
    std::string scenario;
    std::uint64_t seed = 0;

    const std::map<std::string, std::string> help{
        {"risk", "volatility, VaR, MVaR and drawdown from a price CSV"},
        {"garch", "fit GARCH(p,q) to a price CSV or to a simulated series"},
        {"security", "double-spend probabilities, attack cost, Monte Carlo attack alpha, security budget"},
        {"netgame", "channel creation game optimum map, star equilibrium check, centralization null model"},
        {"route", "payment routing probe experiment on a channel graph"},
        {"macro", "Fisher price path, congestion fee, velocity, debt burden and DiD"},
        {"forensics", "Benford, size clustering and tail tests on trade tapes"},
        {"tables", "embedded reference tables with recomputed values"},
        {"chart", "render an SVG chart from a CSV of series"},
        {"nakamoto-table", "regenerate the attacker success probability table"},
        {"throughput", "normalize payment throughput figures to tx/s"}};

    for (const auto& name : csl::app::commands()) {
        auto* sub = cli.add_subcommand(name, help.count(name) ? help.at(name) : name);
        sub->add_option("--scenario", scenario, "scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--data", req.data_paths, "input data file(s)");
        sub->add_option("--out", req.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "seed override (u64)");
        sub->add_option("--format", req.format, "stdout format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
        sub->callback([&, sub, name] {
            req.command = name;
            if (!scenario.empty()) req.scenario_path = scenario;
            if (sub->count("--seed")) req.seed = seed;
        });
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : csl::app::kUsage;
    }
    return csl::app::run(req, std::cout, std::cerr);
}
