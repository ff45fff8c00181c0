#include "qbsg/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "qbsg/format.hpp"
#include "qbsg/stats.hpp"

namespace qbsg::experiment {

namespace {

constexpr std::uint64_t kLaneIntensity = 0x17E5ull;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string>& sweepable_params() {
    static const std::set<std::string> params{"alpha2", "a0t",        "eta", "dark",
                                              "visibility", "kappa", "n"};
    return params;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
        throw UsageError("invalid numeric value for " + key + ": '" + value + "'");
    }
    return v;
}

std::uint64_t parse_count(const std::string& value, const std::string& key) {
    const double v = parse_double(value, key);
    if (!(v >= 1.0) || v > 1.8e19 || v != std::floor(v)) {
        throw UsageError(key + " must be a positive integer, got '" + value + "'");
    }
    return static_cast<std::uint64_t>(v);
}

std::uint64_t parse_seed(const std::string& value, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
        throw UsageError("invalid seed value for " + key + ": '" + value + "'");
    }
    return v;
}

bool parse_switch(const std::string& value, const std::string& key) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw UsageError(key + " must be one of on/off/true/false/1/0, got '" + value + "'");
}

std::vector<protocol::Bit> parse_bits(const std::string& value, const std::string& key) {
    std::vector<protocol::Bit> bits;
    bits.reserve(value.size());
    for (char c : value) {
        if (c != '0' && c != '1') {
            throw UsageError(key + " must be a string of 0s and 1s, got '" + value + "'");
        }
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

/// Error markers live in a comma-separated file; keep them one-field clean.
std::string sanitize_status(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

void apply_sweep_value(protocol::ProtocolConfig& cfg, bool& kappa_auto,
                       const std::string& param, double value) {
    if (param == "alpha2") {
        cfg.channel.alpha2 = value;
    } else if (param == "a0t") {
        cfg.channel.a0t = value;
    } else if (param == "eta") {
        cfg.channel.eta = value;
    } else if (param == "dark") {
        cfg.channel.dark = value;
    } else if (param == "visibility") {
        cfg.channel.visibility = value;
    } else if (param == "kappa") {
        cfg.kappa = value;
        kappa_auto = false;
    } else if (param == "n") {
        if (!(value >= 1.0)) throw std::invalid_argument("swept n must be >= 1");
        cfg.n = static_cast<std::uint64_t>(std::llround(value));
    } else {
        throw UsageError("sweep.param must be one of alpha2/a0t/eta/dark/visibility/kappa/n, got '" +
                         param + "'");
    }
}

double parse_field(const std::string& field, const std::string& path) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
        throw std::runtime_error("malformed numeric field '" + field + "' in " + path);
    }
    return v;
}

void write_rows(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << csv_header() << '\n';
    for (const SweepRow& row : rows) out << to_csv_row(row) << '\n';
}

}  // namespace

void ExperimentSpec::validate() const {
    if (base.n == 0) throw UsageError("protocol.n must be >= 1");
    if (!kappa_auto && !(base.kappa > 0.0 && base.kappa < 1.0)) {
        throw UsageError("protocol.kappa must lie in (0,1), got " + format_g6(base.kappa));
    }
    try {
        base.channel.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (alice.kind == adversary::StrategyKind::EarlyMeasureBob) {
        throw UsageError("adversary: EarlyMeasureBob is a Bob strategy");
    }
    if (bob.kind == adversary::StrategyKind::StraddleAlice) {
        throw UsageError("adversary: StraddleAlice is an Alice strategy");
    }
    if (!alice.honest() && !bob.honest()) {
        throw UsageError("adversary: at most one party may be dishonest");
    }
    if (!(alice.phi >= 0.0 && alice.phi <= std::numbers::pi)) {
        throw UsageError("adversary.phi must lie in [0, pi], got " + format_g6(alice.phi));
    }
    if (monte_carlo && trials == 0) throw UsageError("protocol.trials must be >= 1");
    if (workers == 0) throw UsageError("protocol.workers must be >= 1");
    if (sweep.active) {
        if (sweep.steps == 0) throw UsageError("sweep.steps must be >= 1");
        if (sweepable_params().count(sweep.param) == 0) {
            throw UsageError("sweep.param must be one of alpha2/a0t/eta/dark/visibility/kappa/n, got '" +
                             sweep.param + "'");
        }
        if (sweep.scale == SweepScale::Log && !(sweep.start > 0.0 && sweep.stop > 0.0)) {
            throw UsageError("sweep.start and sweep.stop must be positive for log scale");
        }
    }
    if (!(intensity_coupler > 0.0 && intensity_coupler <= 1.0)) {
        throw UsageError("output.intensity_coupler must lie in (0,1]");
    }
    if (!(intensity_noise >= 0.0)) {
        throw UsageError("output.intensity_noise must be >= 0");
    }
}

void apply_key(ExperimentSpec& spec, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string qualified = section + "." + key;
    if (section == "protocol") {
        if (key == "n") {
            spec.base.n = parse_count(value, qualified);
        } else if (key == "kappa") {
            if (value == "auto") {
                spec.kappa_auto = true;
            } else {
                spec.base.kappa = parse_double(value, qualified);
                spec.kappa_auto = false;
            }
        } else if (key == "seed") {
            spec.base.seed = parse_seed(value, qualified);
        } else if (key == "trials") {
            spec.trials = parse_count(value, qualified);
        } else if (key == "monte_carlo") {
            spec.monte_carlo = parse_switch(value, qualified);
        } else if (key == "workers") {
            spec.workers = parse_count(value, qualified);
        } else {
            throw UsageError("unknown config key: " + qualified);
        }
    } else if (section == "channel") {
        if (key == "alpha2") {
            spec.base.channel.alpha2 = parse_double(value, qualified);
        } else if (key == "a0t") {
            spec.base.channel.a0t = parse_double(value, qualified);
        } else if (key == "a0t_db") {
            spec.base.channel.a0t = std::pow(10.0, -parse_double(value, qualified) / 10.0);
        } else if (key == "eta") {
            spec.base.channel.eta = parse_double(value, qualified);
        } else if (key == "dark") {
            spec.base.channel.dark = parse_double(value, qualified);
        } else if (key == "visibility") {
            spec.base.channel.visibility = parse_double(value, qualified);
        } else if (key == "att_bob_to_alice") {
            spec.base.channel.att_bob_to_alice = parse_double(value, qualified);
        } else if (key == "att_alice") {
            spec.base.channel.att_alice = parse_double(value, qualified);
        } else if (key == "n0") {
            spec.base.channel.n0 = parse_double(value, qualified);
        } else {
            throw UsageError("unknown config key: " + qualified);
        }
    } else if (section == "adversary") {
        if (key == "adversary") {
            spec.alice.kind = adversary::StrategyKind::Honest;
            spec.bob.kind = adversary::StrategyKind::Honest;
            if (value == "none") {
                // both honest
            } else if (value == "bob_early") {
                spec.bob.kind = adversary::StrategyKind::EarlyMeasureBob;
            } else if (value == "alice_straddle") {
                spec.alice.kind = adversary::StrategyKind::StraddleAlice;
            } else {
                throw UsageError(
                    "adversary.adversary must be one of none/bob_early/alice_straddle, got '" +
                    value + "'");
            }
        } else if (key == "phi") {
            const double phi = parse_double(value, qualified);
            spec.alice.phi = phi;
            spec.bob.phi = phi;
        } else if (key == "target") {
            const auto bits = parse_bits(value, qualified);
            spec.alice.target = bits;
            spec.bob.target = bits;
        } else {
            throw UsageError("unknown config key: " + qualified);
        }
    } else if (section == "sweep") {
        spec.sweep.active = true;
        if (key == "param") {
            spec.sweep.param = value;
        } else if (key == "start") {
            spec.sweep.start = parse_double(value, qualified);
        } else if (key == "stop") {
            spec.sweep.stop = parse_double(value, qualified);
        } else if (key == "steps") {
            spec.sweep.steps = parse_count(value, qualified);
        } else if (key == "scale") {
            if (value == "log") {
                spec.sweep.scale = SweepScale::Log;
            } else if (value == "linear" || value == "lin") {
                spec.sweep.scale = SweepScale::Linear;
            } else {
                throw UsageError("sweep.scale must be log or linear, got '" + value + "'");
            }
        } else {
            throw UsageError("unknown config key: " + qualified);
        }
    } else if (section == "output") {
        if (key == "csv") {
            spec.out_csv = value;
        } else if (key == "plot") {
            spec.out_plot = value;
        } else if (key == "transcript") {
            spec.out_transcript = value;
        } else if (key == "intensity") {
            spec.out_intensity = value;
        } else if (key == "intensity_noise") {
            spec.intensity_noise = parse_double(value, qualified);
        } else if (key == "intensity_coupler") {
            spec.intensity_coupler = parse_double(value, qualified);
        } else {
            throw UsageError("unknown config key: " + qualified);
        }
    } else {
        throw UsageError("unknown config section: [" + section + "]");
    }
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    ExperimentSpec spec;
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw UsageError("malformed section header at " + path + ":" +
                                 std::to_string(lineno) + ": " + t);
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError("malformed config line (expected key = value) at " + path + ":" +
                             std::to_string(lineno) + ": " + t);
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty()) {
            throw UsageError("config key outside any section at " + path + ":" +
                             std::to_string(lineno) + ": " + key);
        }
        apply_key(spec, section, key, value);
    }
    return spec;
}

std::vector<double> sweep_points(const SweepDef& def) {
    std::vector<double> points;
    points.reserve(def.steps);
    if (def.steps == 1) {
        points.push_back(def.start);
        return points;
    }
    for (std::uint64_t i = 0; i < def.steps; ++i) {
        if (i == def.steps - 1) {
            points.push_back(def.stop);
        } else if (def.scale == SweepScale::Log) {
            const double frac = static_cast<double>(i) / static_cast<double>(def.steps - 1);
            points.push_back(def.start * std::pow(def.stop / def.start, frac));
        } else {
            const double frac = static_cast<double>(i) / static_cast<double>(def.steps - 1);
            points.push_back(def.start + (def.stop - def.start) * frac);
        }
    }
    return points;
}

std::vector<SweepRow> run_experiment(const ExperimentSpec& spec,
                                     const std::function<void(const SweepRow&)>& on_row) {
    spec.validate();

    std::vector<double> points;
    if (spec.sweep.active) {
        points = sweep_points(spec.sweep);
    } else {
        points.push_back(spec.base.channel.alpha2);
    }

    std::vector<SweepRow> rows;
    rows.reserve(points.size());
    for (double value : points) {
        const auto t0 = std::chrono::steady_clock::now();

        SweepRow row;
        row.param = spec.sweep.active ? spec.sweep.param : "alpha2";
        row.value = value;
        row.mc_bias = kNaN;
        row.mc_bias_err = kNaN;
        row.mc_abort_freq = kNaN;

        protocol::ProtocolConfig cfg = spec.base;
        bool kappa_auto = spec.kappa_auto;
        bool ok = true;
        try {
            if (spec.sweep.active) apply_sweep_value(cfg, kappa_auto, spec.sweep.param, value);
            cfg.channel.validate();
            if (kappa_auto) cfg.kappa = bounds::default_kappa(cfg.channel);
            row.report = bounds::build_report(cfg);
        } catch (const std::exception& e) {
            // Invalid parameter combination at this point only: mark and move on.
            ok = false;
            row.status = sanitize_status(std::string("error: ") + e.what());
            row.report = bounds::SecurityReport{};
            row.report.alpha2 = cfg.channel.alpha2;
            row.report.kappa = cfg.kappa;
            row.report.n = cfg.n;
            row.report.channel = cfg.channel;
            row.report.eps_a = kNaN;
            row.report.eps_b = kNaN;
            row.report.eps_sum = kNaN;
            row.report.delta_n = kNaN;
            row.report.classical_floor = kNaN;
        }

        if (ok && spec.monte_carlo) {
            const adversary::BiasEstimate est =
                adversary::measure_bias(cfg, spec.alice, spec.bob, spec.trials);
            row.mc_bias = est.mean_bias;
            row.mc_bias_err = est.std_error;
            row.mc_abort_freq = est.abort_freq;
        }

        // Side files describe a single operating point; I/O failures here are
        // runtime errors, not row markers.
        if (ok && !spec.sweep.active) {
            if (!spec.out_transcript.empty()) {
                auto alice = adversary::make_alice(spec.alice, cfg.channel);
                auto bob = adversary::make_bob(spec.bob, cfg.channel);
                const auto [outcome, records] = protocol::run_protocol(cfg, *alice, *bob);
                (void)outcome;
                protocol::write_transcript(spec.out_transcript, records);
            }
            if (!spec.out_intensity.empty()) {
                const double mean0 =
                    spec.intensity_coupler * cfg.channel.att_bob_to_alice * cfg.channel.n0;
                const double sigma =
                    spec.intensity_noise > 0.0 ? spec.intensity_noise : 0.05 * mean0;
                RngStream rng = derive_stream(cfg.seed, kLaneIntensity);
                std::vector<double> readings(cfg.n);
                for (double& r : readings) r = std::max(0.0, rng.normal(mean0, sigma));
                stats::write_intensity_csv(spec.out_intensity, readings);
            }
        }

        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_header() {
    return "param,value,alpha2,kappa,eps_a,eps_b,eps_sum,delta_n,classical_floor,advantage,"
           "mc_bias,mc_bias_err,mc_abort_freq,status";
}

std::string to_csv_row(const SweepRow& row) {
    std::string out;
    out += row.param + ",";
    out += format_g6(row.value) + ",";
    out += bounds::to_csv_row(row.report) + ",";
    out += format_g6(row.mc_bias) + ",";
    out += format_g6(row.mc_bias_err) + ",";
    out += format_g6(row.mc_abort_freq) + ",";
    out += sanitize_status(row.status);
    return out;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows to write");
    if (path.empty() || path == "-") {
        write_rows(std::cout, rows);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file for writing: " + path);
    write_rows(out, rows);
    out.flush();
    if (!out) throw std::runtime_error("error while writing output file: " + path);
}

std::vector<SweepRow> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != csv_header()) {
        throw std::runtime_error("unrecognized CSV header in " + path);
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        for (int i = 0; i < 13; ++i) {
            const auto comma = line.find(',', pos);
            if (comma == std::string::npos) {
                throw std::runtime_error("short CSV row in " + path + ": " + line);
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        fields.push_back(line.substr(pos));  // status keeps any residue intact

        SweepRow row;
        row.param = fields[0];
        row.value = parse_field(fields[1], path);
        row.report.alpha2 = parse_field(fields[2], path);
        row.report.kappa = parse_field(fields[3], path);
        row.report.eps_a = parse_field(fields[4], path);
        row.report.eps_b = parse_field(fields[5], path);
        row.report.eps_sum = parse_field(fields[6], path);
        row.report.delta_n = parse_field(fields[7], path);
        row.report.classical_floor = parse_field(fields[8], path);
        if (fields[9] == "true") {
            row.report.advantage = true;
        } else if (fields[9] == "false") {
            row.report.advantage = false;
        } else {
            throw std::runtime_error("malformed advantage field '" + fields[9] + "' in " + path);
        }
        row.mc_bias = parse_field(fields[10], path);
        row.mc_bias_err = parse_field(fields[11], path);
        row.mc_abort_freq = parse_field(fields[12], path);
        row.status = fields[13];
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_plot_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_plot_csv: no rows to write");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open plot file for writing: " + path);
    out << "alpha2,eps_a,eps_b,eps_sum,classical_floor\n";
    for (const SweepRow& row : rows) {
        out << format_g6(row.report.alpha2) << ',' << format_g6(row.report.eps_a) << ','
            << format_g6(row.report.eps_b) << ',' << format_g6(row.report.eps_sum) << ','
            << format_g6(row.report.classical_floor) << '\n';
    }
    if (!out) throw std::runtime_error("error while writing plot file: " + path);
}

}  // namespace qbsg::experiment
