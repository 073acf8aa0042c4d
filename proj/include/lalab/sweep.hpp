#pragma once

#include "lalab/estimators.hpp"
#include "lalab/model.hpp"
#include "lalab/theory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lalab {

class ConfigFile;

enum class EstimatorKind { MinNorm, LookAlikeTrue, LookAlikeEstimated };

const char* estimator_name(EstimatorKind e);
EstimatorKind estimator_from_name(const std::string& name);

/// A one-axis parameter sweep: the base configuration, the axis field
/// name with its grid, replicate count and requested estimators.
struct SweepSpec {
    ProblemConfig base;
    std::string axis = "n";
    std::vector<double> grid;
    int replicates = 1;
    std::vector<EstimatorKind> estimators;
    std::string out_path;
    int mc_test = 0; // 0: exact closed-form risk; >0: Monte Carlo test draws
    CentersMode centers_mode = CentersMode::TrueCenters;
    int threads = 0;
    int kmeans_restarts = 3;

    void validate() const;
    static SweepSpec from_config(const ConfigFile& cf);
};

/// Applies `axis = value` to a copy of the base configuration.
ProblemConfig apply_axis(const ProblemConfig& base, const std::string& axis, double value);

/// One aggregated CSV row of a sweep.
struct SweepRow {
    double axis_value = 0.0;
    double psi_d = 0.0;
    double psi_p = 0.0;
    EstimatorKind estimator = EstimatorKind::MinNorm;
    double risk_mean = 0.0;
    double risk_stderr = 0.0;
    std::optional<double> risk_theory;
    int replicates = 0;
    std::uint64_t seed = 0;
    std::string warning;
};

extern const char* const kSweepCsvHeader;

std::string sweep_row_to_csv(const SweepRow& row);
SweepRow sweep_row_from_csv(const std::string& line);

/// Runs the sweep and writes the CSV (plus a gnuplot helper script next to
/// it). Grid points whose theory sits inside a pole margin keep their
/// simulated columns and get an empty theory cell plus a warning.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream& csv_out);

/// Theory-only gain map over two TheoryParams axes; rows (axis1, axis2,
/// log_gain). Pole points are skipped with a warning on stderr.
struct GainMapSpec {
    TheoryParams base;
    std::string axis1;
    std::vector<double> grid1;
    std::string axis2;
    std::vector<double> grid2;
    std::string out_path;

    void validate() const;
    static GainMapSpec from_config(const ConfigFile& cf);
};

struct GainMapRow {
    double axis1 = 0.0;
    double axis2 = 0.0;
    double log_gain = 0.0;
};

TheoryParams apply_theory_axis(const TheoryParams& base, const std::string& axis, double value);

std::vector<GainMapRow> run_gain_map(const GainMapSpec& spec);
std::vector<GainMapRow> run_gain_map(const GainMapSpec& spec, std::ostream& csv_out);

/// Label-corruption experiment: sweeps the label flip rate, measuring the
/// cluster-estimation error rate delta_n, the risks of the look-alike fit
/// with true and with corrupted labels, and the pseudoinverse perturbation
/// bound on |theta_hat - theta_tilde| (already scaled by |y|).
struct ClusterExpSpec {
    ProblemConfig base;
    std::vector<double> flip_rates;
    int replicates = 1;
    std::string out_path;
    int threads = 0;

    void validate() const;
    static ClusterExpSpec from_config(const ConfigFile& cf);
};

struct ClusterExpRow {
    double flip_rate = 0.0;
    double delta_n = 0.0;
    double risk_lookalike_true = 0.0;
    double risk_lookalike_estimated = 0.0;
    double bound = 0.0;
    double theta_diff = 0.0; // |theta_hat - theta_tilde| (not in the CSV)
};

std::vector<ClusterExpRow> run_cluster_experiment(const ClusterExpSpec& spec);
std::vector<ClusterExpRow> run_cluster_experiment(const ClusterExpSpec& spec, std::ostream& csv_out);

} // namespace lalab
