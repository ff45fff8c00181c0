// qbsg — simulator and security-bounds engine for a two-party quantum
// bit-string generation protocol over a lossy optical channel.
//
// Typical uses:
//   qbsg --print-report                          # bounds at the default point
//   qbsg --alpha2 0.03 --monte-carlo on --n 1000000 --out run.csv
//   qbsg --sweep alpha2:0.005:0.2:20:log --n 300000000 --out sweep.csv
//   qbsg --config experiment.ini

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qbsg/bounds.hpp"
#include "qbsg/experiment.hpp"

namespace {

using qbsg::experiment::ExperimentSpec;
using qbsg::experiment::UsageError;

/// --sweep value: param:start:stop:steps[:log|linear]
void apply_sweep_flag(ExperimentSpec& spec, const std::string& value) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const auto colon = value.find(':', pos);
        if (colon == std::string::npos) {
            parts.push_back(value.substr(pos));
            break;
        }
        parts.push_back(value.substr(pos, colon - pos));
        pos = colon + 1;
    }
    if (parts.size() != 4 && parts.size() != 5) {
        throw UsageError("--sweep expects param:start:stop:steps[:log|linear], got '" + value +
                         "'");
    }
    qbsg::experiment::apply_key(spec, "sweep", "param", parts[0]);
    qbsg::experiment::apply_key(spec, "sweep", "start", parts[1]);
    qbsg::experiment::apply_key(spec, "sweep", "stop", parts[2]);
    qbsg::experiment::apply_key(spec, "sweep", "steps", parts[3]);
    qbsg::experiment::apply_key(spec, "sweep", "scale", parts.size() == 5 ? parts[4] : "linear");
}

int run(int argc, char** argv) {
    CLI::App app{
        "Simulator and security-bounds engine for two-party quantum bit-string generation"};
    app.name("qbsg");

    std::string config_path;
    app.add_option("--config", config_path, "Plain-text config file (key = value sections)");

    // Every override funnels through the same key machinery as the config
    // file, so values, errors and precedence behave identically either way.
    struct FlagKey {
        const char* flag;
        const char* section;
        const char* key;
        const char* help;
    };
    static constexpr FlagKey flag_keys[] = {
        {"--alpha2", "channel", "alpha2", "Mean signal photon number |alpha|^2"},
        {"--n", "protocol", "n", "Number of protocol rounds"},
        {"--kappa", "protocol", "kappa", "Abort threshold in (0,1), or 'auto'"},
        {"--eta", "channel", "eta", "Detector efficiency (linear fraction)"},
        {"--a0t", "channel", "a0t", "Combined path transmission (linear fraction)"},
        {"--a0t-db", "channel", "a0t_db", "Combined path transmission as dB loss"},
        {"--dark", "channel", "dark", "Dark-click probability per gate"},
        {"--visibility", "channel", "visibility", "Interference visibility"},
        {"--att-bob-to-alice", "channel", "att_bob_to_alice",
         "Transmission of the strong-pulse leg (linear fraction)"},
        {"--att-alice", "channel", "att_alice", "Alice's attenuator (0 = derive from alpha2)"},
        {"--n0", "channel", "n0", "Photon number of Bob's outgoing pulse"},
        {"--seed", "protocol", "seed", "Master RNG seed (64-bit)"},
        {"--adversary", "adversary", "adversary", "none | bob_early | alice_straddle"},
        {"--phi", "adversary", "phi", "Straddle state phase in [0, pi]"},
        {"--target", "adversary", "target", "Target bit pattern, e.g. 0110 (cycled)"},
        {"--monte-carlo", "protocol", "monte_carlo", "Run protocol simulation: on | off"},
        {"--trials", "protocol", "trials", "Monte-Carlo executions per sweep point"},
        {"--workers", "protocol", "workers", "Worker limit (execution is deterministic)"},
        {"--out", "output", "csv", "Row CSV path ('-' = stdout, the default)"},
        {"--plot", "output", "plot", "Plot-ready companion CSV path"},
        {"--transcript", "output", "transcript", "Round transcript path (single point only)"},
        {"--intensity", "output", "intensity", "Intensity readings path (single point only)"},
    };

    std::vector<std::string> flag_values(std::size(flag_keys));
    std::vector<CLI::Option*> flag_opts(std::size(flag_keys));
    for (std::size_t i = 0; i < std::size(flag_keys); ++i) {
        flag_opts[i] = app.add_option(flag_keys[i].flag, flag_values[i], flag_keys[i].help);
    }

    std::string sweep_value;
    CLI::Option* sweep_opt =
        app.add_option("--sweep", sweep_value, "param:start:stop:steps[:log|linear]");

    bool print_report = false;
    app.add_flag("--print-report", print_report,
                 "Print the bounds report of the first row as key=value lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit 0; bad usage exits 2
    }

    ExperimentSpec spec;
    if (!config_path.empty()) spec = qbsg::experiment::load_config(config_path);
    for (std::size_t i = 0; i < std::size(flag_keys); ++i) {
        if (flag_opts[i]->count() > 0) {
            qbsg::experiment::apply_key(spec, flag_keys[i].section, flag_keys[i].key,
                                        flag_values[i]);
        }
    }
    if (sweep_opt->count() > 0) apply_sweep_flag(spec, sweep_value);

    const std::vector<qbsg::experiment::SweepRow> rows = qbsg::experiment::run_experiment(spec);

    if (print_report) {
        std::cout << qbsg::bounds::to_key_values(rows.front().report);
        if (rows.front().status != "ok") {
            std::cout << "status=" << rows.front().status << "\n";
        }
    }
    if (!spec.out_csv.empty() || !print_report) {
        qbsg::experiment::emit_csv(rows, spec.out_csv);
    }
    if (!spec.out_plot.empty()) qbsg::experiment::emit_plot_csv(rows, spec.out_plot);

    std::size_t marked = 0;
    for (const auto& row : rows) {
        if (row.status != "ok") ++marked;
    }
    if (marked > 0) {
        std::cerr << "qbsg: " << marked << " of " << rows.size()
                  << " sweep point(s) carry error markers\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "qbsg: usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qbsg: error: " << e.what() << "\n";
        return 3;
    }
}
