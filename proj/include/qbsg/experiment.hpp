#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbsg/adversary.hpp"
#include "qbsg/bounds.hpp"
#include "qbsg/protocol.hpp"

namespace qbsg::experiment {

/// A broken experiment description (bad key, bad combination).  The CLI maps
/// this to exit code 2; every message names the offending key.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SweepScale { Linear, Log };

/// One swept parameter.  `param` is a channel field name (alpha2, a0t, eta,
/// dark, visibility) or a protocol field (kappa, n).
struct SweepDef {
    bool active = false;
    std::string param = "alpha2";
    double start = 0.0;
    double stop = 0.0;
    std::uint64_t steps = 1;
    SweepScale scale = SweepScale::Linear;
};

/// Full description of a harness run: base protocol configuration, adversary
/// selection, optional sweep and Monte-Carlo settings, output paths.
struct ExperimentSpec {
    protocol::ProtocolConfig base;
    bool kappa_auto = true;  // ignore base.kappa, use bounds::default_kappa per point

    adversary::Strategy alice{adversary::Party::Alice, adversary::StrategyKind::Honest, {}, 1.5707963267948966};
    adversary::Strategy bob{adversary::Party::Bob, adversary::StrategyKind::Honest, {}, 1.5707963267948966};

    bool monte_carlo = false;
    std::uint64_t trials = 1;
    std::uint64_t workers = 1;

    SweepDef sweep;

    std::string out_csv;         // main row output ("-" or empty = stdout)
    std::string out_plot;        // plot-ready companion columns
    std::string out_transcript;  // per-round records of one execution (single point only)
    std::string out_intensity;   // simulated intensity readings (single point only)
    double intensity_noise = 0.0;    // absolute sigma; 0 = 5% of the nominal mean
    double intensity_coupler = 1.0;  // monitor coupler fraction

    /// Throws UsageError naming the offending key.
    void validate() const;
};

/// One output row: the swept value, the bounds report at that point and the
/// Monte-Carlo results (NaN when simulation was off or the point failed).
/// `status` is "ok" or an error marker for points whose parameter
/// combination was invalid; such points never stop the run.
struct SweepRow {
    std::string param = "alpha2";
    double value = 0.0;
    bounds::SecurityReport report;
    double mc_bias = 0.0;
    double mc_bias_err = 0.0;
    double mc_abort_freq = 0.0;
    std::string status = "ok";
    double wall_seconds = 0.0;  // in-memory only, never serialized
};

/// Parses the plain-text config (sections [protocol], [channel], [adversary],
/// [sweep], [output]; `key = value` lines; '#' or ';' comment lines).  Every
/// key is optional; unknown keys are UsageErrors.
ExperimentSpec load_config(const std::string& path);

/// Applies one key from the given section to the spec; shared by the config
/// parser and the CLI override flags.  Throws UsageError on unknown keys or
/// unparseable values.
void apply_key(ExperimentSpec& spec, const std::string& section, const std::string& key,
               const std::string& value);

/// The sweep's parameter values (`steps` of them, linear or geometric).
std::vector<double> sweep_points(const SweepDef& def);

/// Runs the experiment: per sweep point, builds the bounds report, optionally
/// runs Monte-Carlo executions, and (single-point runs only) writes the
/// transcript / intensity side files.  `on_row`, when provided, observes rows
/// in sweep order as they complete.  Invalid per-point parameter combinations
/// become row error markers; the run continues.
std::vector<SweepRow> run_experiment(const ExperimentSpec& spec,
                                     const std::function<void(const SweepRow&)>& on_row = {});

/// Fixed column set of the row CSV.
std::string csv_header();
std::string to_csv_row(const SweepRow& row);

/// Writes header + one line per row; 6 significant digits; byte-deterministic
/// for identical rows.  Throws std::invalid_argument on empty rows (no file
/// is created) and std::runtime_error on I/O failure (message names the
/// path).  path "-" writes to stdout.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Reads back a file written by emit_csv.  Only the serialized columns are
/// recovered; re-emitting the parsed rows reproduces the file byte for byte.
std::vector<SweepRow> parse_csv(const std::string& path);

/// Plot-ready companion: columns alpha2,eps_a,eps_b,eps_sum,classical_floor.
void emit_plot_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace qbsg::experiment
