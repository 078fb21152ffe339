#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "prewet/cli_io.hpp"
#include "prewet/error.hpp"

namespace {

int fail(int code, const std::string& kind, const std::string& error, const std::string& message) {
    nlohmann::json j{{"error", error}, {"kind", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using prewet::RunConfig;
    CLI::App app{"Critical prewetting in the 2d Ising model: simulation and analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", prewet::kToolVersion);

    RunConfig flags;
    std::string config_path;
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"simulate-ising", "Sample the Ising interface in the Lambda_N box"},
        {"simulate-walk", "Sample area-tilted effective-walk bridges"},
        {"fs-reference", "Tabulate the Ferrari-Spohn density and transition kernel"},
        {"analyze", "Rescale a simulation run and compare it with the reference"},
        {"report", "Verify manifests and print the analysis summary"},
    };
    std::vector<CLI::App*> apps;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "Config file or manifest.json");
        sub->add_option("--beta", flags.beta, "Inverse temperature (> critical)");
        sub->add_option("--lambda", flags.lambda, "Field strength lambda >= 0; h = lambda / N");
        sub->add_option("--n", flags.n, "System size N");
        sub->add_option("--sweeps", flags.sweeps, "Production sweeps per replica (sets thinning)");
        sub->add_option("--burnin", flags.burnin, "Burn-in sweeps (default 20 N)");
        sub->add_option("--samples", flags.samples, "Samples per replica");
        sub->add_option("--thin", flags.thin, "Sweeps between samples");
        sub->add_option("--seed", flags.seed, "64-bit master seed");
        sub->add_option("--replicas", flags.replicas, "Independent replicas");
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--in", flags.in, "Input directory for analyze/report (default: --out)");
        sub->add_option("--law", flags.law, "Step-law CSV (theta,zeta,p)");
        sub->add_option("--chi", flags.chi, "Override the diffusivity estimate");
        apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(1, "validation", "usage", e.what());
    }

    CLI::App* sub = nullptr;
    for (auto* a : apps)
        if (a->parsed()) sub = a;

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = prewet::load_config(config_path, cfg);
        // Explicit flags take precedence over the file.
        auto take = [&](const char* flag, auto RunConfig::*member) {
            if (sub->count(flag) > 0) cfg.*member = flags.*member;
        };
        take("--beta", &RunConfig::beta);
        take("--lambda", &RunConfig::lambda);
        take("--n", &RunConfig::n);
        take("--sweeps", &RunConfig::sweeps);
        take("--burnin", &RunConfig::burnin);
        take("--samples", &RunConfig::samples);
        take("--thin", &RunConfig::thin);
        take("--seed", &RunConfig::seed);
        take("--replicas", &RunConfig::replicas);
        take("--out", &RunConfig::out);
        take("--in", &RunConfig::in);
        take("--law", &RunConfig::law);
        take("--chi", &RunConfig::chi);
        cfg.command = sub->get_name();

        if (cfg.command == "simulate-ising") prewet::run_simulate_ising(cfg);
        else if (cfg.command == "simulate-walk") prewet::run_simulate_walk(cfg);
        else if (cfg.command == "fs-reference") prewet::run_fs_reference(cfg);
        else if (cfg.command == "analyze") prewet::run_analyze(cfg);
        else std::cout << prewet::run_report(cfg);
        return 0;
    } catch (const prewet::Error& e) {
        return fail(e.is_validation() ? 1 : 2, e.is_validation() ? "validation" : "runtime", e.code(),
                    e.what());
    } catch (const std::exception& e) {
        return fail(2, "runtime", "internal", e.what());
    }
}
