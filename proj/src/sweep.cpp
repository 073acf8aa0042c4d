#include "lalab/sweep.hpp"

#include "lalab/clustering.hpp"
#include "lalab/config_file.hpp"
#include "lalab/csv.hpp"
#include "lalab/data.hpp"
#include "lalab/errors.hpp"
#include "lalab/parallel.hpp"
#include "lalab/risk.hpp"
#include "lalab/rng.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lalab {

const char* estimator_name(EstimatorKind e) {
    switch (e) {
        case EstimatorKind::MinNorm: return "min_norm";
        case EstimatorKind::LookAlikeTrue: return "look_alike_true";
        case EstimatorKind::LookAlikeEstimated: return "look_alike_estimated";
    }
    return "?";
}

EstimatorKind estimator_from_name(const std::string& name) {
    if (name == "min_norm") return EstimatorKind::MinNorm;
    if (name == "look_alike_true") return EstimatorKind::LookAlikeTrue;
    if (name == "look_alike_estimated") return EstimatorKind::LookAlikeEstimated;
    throw ConfigError("unknown estimator '" + name +
                      "' (expected min_norm, look_alike_true or look_alike_estimated)");
}

namespace {

bool is_integer_axis(const std::string& axis) {
    return axis == "n" || axis == "d" || axis == "p" || axis == "k";
}

void set_axis(ProblemConfig& cfg, const std::string& axis, double value) {
    if (is_integer_axis(axis)) {
        const long long iv = std::llround(value);
        if (std::abs(value - static_cast<double>(iv)) > 1e-9)
            throw ConfigError("axis '" + axis + "': value " + csv::format_double(value) +
                              " is not an integer");
        if (axis == "n") cfg.n = static_cast<int>(iv);
        else if (axis == "d") cfg.d = static_cast<int>(iv);
        else if (axis == "p") cfg.p = static_cast<int>(iv);
        else cfg.k = static_cast<int>(iv);
        if (axis == "k") cfg.priors = Eigen::VectorXd::Constant(cfg.k, 1.0 / cfg.k);
    } else if (axis == "mu") cfg.mu = value;
    else if (axis == "sigma") cfg.sigma = value;
    else if (axis == "r_s") cfg.r_s = value;
    else if (axis == "r_ns") cfg.r_ns = value;
    else if (axis == "rho") cfg.rho = value;
    else throw ConfigError("axis '" + axis + "' is not a sweepable config field");
}

} // namespace

ProblemConfig apply_axis(const ProblemConfig& base, const std::string& axis, double value) {
    ProblemConfig cfg = base;
    set_axis(cfg, axis, value);
    cfg.validate();
    return cfg;
}

void SweepSpec::validate() const {
    base.validate();
    if (grid.empty()) throw ConfigError("sweep: grid must be non-empty");
    if (replicates < 1) throw ConfigError("sweep: replicates must be >= 1");
    if (estimators.empty()) throw ConfigError("sweep: estimators must be non-empty");
    if (mc_test < 0) throw ConfigError("sweep: mc_test must be >= 0");
    if (mc_test == 1) throw ConfigError("sweep: mc_test must be 0 or >= 2");
    for (double v : grid) apply_axis(base, axis, v); // each grid point must yield a valid config
}

SweepSpec SweepSpec::from_config(const ConfigFile& cf) {
    SweepSpec spec;
    spec.base = ProblemConfig::from_config(cf);
    spec.axis = cf.get_string_or("sweep.axis", "n");
    spec.grid = cf.get_double_list("sweep.grid");
    spec.replicates = static_cast<int>(cf.get_int_or("sweep.replicates", 1));
    if (cf.has("sweep.estimators")) {
        for (const auto& name : cf.get_string_list("sweep.estimators"))
            spec.estimators.push_back(estimator_from_name(name));
    } else {
        spec.estimators = {EstimatorKind::MinNorm, EstimatorKind::LookAlikeTrue};
    }
    spec.out_path = cf.get_string_or("sweep.out", "");
    const std::string format = cf.get_string_or("sweep.format", "csv");
    if (format != "csv")
        throw ConfigError("sweep: unsupported output format '" + format + "' (only csv)");
    spec.mc_test = static_cast<int>(cf.get_int_or("sweep.mc_test", 0));
    const std::string centers = cf.get_string_or("centers", "true");
    if (centers == "true") spec.centers_mode = CentersMode::TrueCenters;
    else if (centers == "empirical") spec.centers_mode = CentersMode::EmpiricalCenters;
    else throw ConfigError("centers must be 'true' or 'empirical'");
    spec.kmeans_restarts = static_cast<int>(cf.get_int_or("sweep.kmeans_restarts", 3));
    spec.validate();
    return spec;
}

const char* const kSweepCsvHeader =
    "axis_value,psi_d,psi_p,estimator,risk_mean,risk_stderr,risk_theory,replicates,seed,warning";

std::string sweep_row_to_csv(const SweepRow& row) {
    return csv::join_row({
        csv::format_double(row.axis_value),
        csv::format_double(row.psi_d),
        csv::format_double(row.psi_p),
        estimator_name(row.estimator),
        csv::format_double(row.risk_mean),
        csv::format_double(row.risk_stderr),
        row.risk_theory ? csv::format_double(*row.risk_theory) : std::string{},
        csv::format_int(row.replicates),
        csv::format_int(static_cast<long long>(row.seed)),
        row.warning,
    });
}

SweepRow sweep_row_from_csv(const std::string& line) {
    const auto cells = csv::split_row(line);
    if (cells.size() != 10) throw ConfigError("sweep row: expected 10 cells");
    SweepRow row;
    row.axis_value = csv::parse_double(cells[0]);
    row.psi_d = csv::parse_double(cells[1]);
    row.psi_p = csv::parse_double(cells[2]);
    row.estimator = estimator_from_name(cells[3]);
    row.risk_mean = csv::parse_double(cells[4]);
    row.risk_stderr = csv::parse_double(cells[5]);
    if (!cells[6].empty()) row.risk_theory = csv::parse_double(cells[6]);
    row.replicates = static_cast<int>(csv::parse_double(cells[7]));
    row.seed = static_cast<std::uint64_t>(csv::parse_double(cells[8]));
    row.warning = cells[9];
    return row;
}

namespace {

// Theory prediction for one estimator at one grid point, or nothing when
// the parameters sit inside a pole margin (or no theory applies).
std::optional<double> theory_for(EstimatorKind est, const ProblemConfig& cfg) {
    if (est == EstimatorKind::LookAlikeEstimated) return std::nullopt;
    TheoryParams tp = TheoryParams::from(cfg);
    const Eigen::VectorXd ut = tp.default_alignment();
    try {
        if (est == EstimatorKind::MinNorm) return minnorm_prediction(tp, ut);
        return lookalike_prediction(tp, ut);
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

double evaluate_risk(const SweepSpec& spec, const Eigen::VectorXd& theta, const GroundTruth& gt,
                     const ProblemConfig& cfg, Rng& rng) {
    if (spec.mc_test > 0) return risk_monte_carlo(theta, gt, cfg, spec.mc_test, rng).mean;
    return risk_closed_form(theta, gt, cfg);
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream& csv_out) {
    spec.validate();

    const std::size_t n_grid = spec.grid.size();
    const std::size_t n_rep = static_cast<std::size_t>(spec.replicates);
    const std::size_t n_est = spec.estimators.size();

    // risks[grid][est][rep]
    std::vector<std::vector<std::vector<double>>> risks(
        n_grid, std::vector<std::vector<double>>(n_est, std::vector<double>(n_rep, 0.0)));

    parallel_for(n_grid * n_rep, [&](std::size_t t) {
        const std::size_t gi = t / n_rep;
        const std::size_t ri = t % n_rep;
        const ProblemConfig cfg = apply_axis(spec.base, spec.axis, spec.grid[gi]);
        Rng rng(derive_seed(spec.base.seed, gi, ri));
        const GroundTruth gt = build_ground_truth(cfg, rng);
        const Dataset ds = sample_dataset(cfg, gt, rng);

        for (std::size_t ei = 0; ei < n_est; ++ei) {
            FittedModel fm;
            switch (spec.estimators[ei]) {
                case EstimatorKind::MinNorm:
                    fm = min_norm_fit(ds.X, ds.y);
                    break;
                case EstimatorKind::LookAlikeTrue:
                    fm = fit_look_alike(ds, gt, spec.centers_mode);
                    break;
                case EstimatorKind::LookAlikeEstimated: {
                    ClusterEstimate est = kmeans_best_of(ds.X.topRows(ds.p), ds.k,
                                                         derive_seed(spec.base.seed, gi, ri) ^ 0x6b,
                                                         spec.kmeans_restarts, 100, 1);
                    // Anonymize with the k-means centroids under the
                    // estimated membership, not the true one.
                    Dataset relabeled = ds;
                    relabeled.labels = est.labels;
                    fm = fit_look_alike(relabeled, est.centers_s, FitKind::LookAlikeEstimated);
                    break;
                }
            }
            risks[gi][ei][ri] = evaluate_risk(spec, fm.theta, gt, cfg, rng);
        }
    }, spec.threads);

    std::vector<SweepRow> rows;
    rows.reserve(n_grid * n_est);
    csv_out << kSweepCsvHeader << "\n";
    for (std::size_t gi = 0; gi < n_grid; ++gi) {
        const ProblemConfig cfg = apply_axis(spec.base, spec.axis, spec.grid[gi]);
        for (std::size_t ei = 0; ei < n_est; ++ei) {
            SweepRow row;
            row.axis_value = spec.grid[gi];
            row.psi_d = static_cast<double>(cfg.d) / cfg.n;
            row.psi_p = static_cast<double>(cfg.p) / cfg.n;
            row.estimator = spec.estimators[ei];
            row.replicates = spec.replicates;
            row.seed = spec.base.seed;

            const auto& r = risks[gi][ei];
            double mean = 0.0;
            for (double v : r) mean += v;
            mean /= static_cast<double>(n_rep);
            double ss = 0.0;
            for (double v : r) ss += (v - mean) * (v - mean);
            row.risk_mean = mean;
            row.risk_stderr = n_rep > 1 ? std::sqrt(ss / (n_rep - 1.0) / n_rep) : 0.0;

            row.risk_theory = theory_for(spec.estimators[ei], cfg);
            if (!row.risk_theory && spec.estimators[ei] != EstimatorKind::LookAlikeEstimated)
                row.warning = "pole";

            csv_out << sweep_row_to_csv(row);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.out_path.empty()) return run_sweep(spec, std::cout);
    std::ofstream out(spec.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + spec.out_path);
    auto rows = run_sweep(spec, out);
    // Column 4 selects the estimator; other rows map to NaN and drop out.
    std::vector<csv::PlotSeries> series;
    for (auto e : spec.estimators) {
        const std::string name = estimator_name(e);
        const std::string pick = "(strcol(4) eq '" + name + "' ? $1 : NaN)";
        series.push_back({name + " (simulated)", pick + ":5:6", "with yerrorbars"});
        series.push_back({name + " (theory)", pick + ":7", "with lines"});
    }
    csv::write_plot_script(spec.out_path, spec.axis, "risk", series);
    return rows;
}

void GainMapSpec::validate() const {
    base.validate();
    if (grid1.empty() || grid2.empty()) throw ConfigError("gain_map: grids must be non-empty");
    for (double v1 : grid1)
        for (double v2 : grid2)
            apply_theory_axis(apply_theory_axis(base, axis1, v1), axis2, v2);
}

TheoryParams apply_theory_axis(const TheoryParams& base, const std::string& axis, double value) {
    TheoryParams tp = base;
    if (axis == "psi_d") tp.psi_d = value;
    else if (axis == "psi_p") tp.psi_p = value;
    else if (axis == "sigma") tp.sigma = value;
    else if (axis == "r_s") tp.r_s = value;
    else if (axis == "snr") tp.r_s = value * tp.sigma; // SNR axis at fixed sigma
    else if (axis == "r_ns") tp.r_ns = value;
    else if (axis == "rho") tp.rho = value;
    else if (axis == "mu") tp.mu = value;
    else throw ConfigError("gain_map axis '" + axis + "' is not a theory parameter");
    tp.validate();
    return tp;
}

GainMapSpec GainMapSpec::from_config(const ConfigFile& cf) {
    GainMapSpec spec;
    spec.base = TheoryParams::from_config(cf);
    spec.axis1 = cf.get_string("gain_map.axis1");
    spec.grid1 = cf.get_double_list("gain_map.grid1");
    spec.axis2 = cf.get_string("gain_map.axis2");
    spec.grid2 = cf.get_double_list("gain_map.grid2");
    spec.out_path = cf.get_string_or("gain_map.out", "");
    spec.validate();
    return spec;
}

std::vector<GainMapRow> run_gain_map(const GainMapSpec& spec, std::ostream& csv_out) {
    spec.validate();
    std::vector<GainMapRow> rows;
    csv_out << "axis1,axis2,log_gain\n";
    for (double v1 : spec.grid1) {
        for (double v2 : spec.grid2) {
            TheoryParams tp = apply_theory_axis(apply_theory_axis(spec.base, spec.axis1, v1),
                                                spec.axis2, v2);
            double lg = 0.0;
            try {
                lg = std::log(gain_theory(tp));
            } catch (const NumericalError& e) {
                std::cerr << "gain-map: skipping (" << spec.axis1 << "=" << csv::format_double(v1)
                          << ", " << spec.axis2 << "=" << csv::format_double(v2)
                          << "): " << e.what() << "\n";
                continue;
            }
            GainMapRow row{v1, v2, lg};
            csv_out << csv::join_row({csv::format_double(row.axis1), csv::format_double(row.axis2),
                                      csv::format_double(row.log_gain)});
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<GainMapRow> run_gain_map(const GainMapSpec& spec) {
    if (spec.out_path.empty()) return run_gain_map(spec, std::cout);
    std::ofstream out(spec.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + spec.out_path);
    auto rows = run_gain_map(spec, out);
    std::vector<csv::PlotSeries> series;
    for (double v1 : spec.grid1)
        series.push_back({spec.axis1 + " = " + csv::format_double(v1),
                          "($1 == " + csv::format_double(v1) + " ? $2 : NaN):3", "with lines"});
    csv::write_plot_script(spec.out_path, spec.axis2, "log gain", series);
    return rows;
}

void ClusterExpSpec::validate() const {
    base.validate();
    if (flip_rates.empty()) throw ConfigError("cluster_exp: flip_rates must be non-empty");
    for (double q : flip_rates)
        if (!(q >= 0.0) || q > 1.0) throw ConfigError("cluster_exp: flip rates must lie in [0, 1]");
    if (replicates < 1) throw ConfigError("cluster_exp: replicates must be >= 1");
    if (base.k < 2) throw ConfigError("cluster_exp: needs k >= 2");
}

ClusterExpSpec ClusterExpSpec::from_config(const ConfigFile& cf) {
    ClusterExpSpec spec;
    spec.base = ProblemConfig::from_config(cf);
    spec.flip_rates = cf.get_double_list("cluster_exp.flip_rates");
    spec.replicates = static_cast<int>(cf.get_int_or("cluster_exp.replicates", 1));
    spec.out_path = cf.get_string_or("cluster_exp.out", "");
    spec.validate();
    return spec;
}

std::vector<ClusterExpRow> run_cluster_experiment(const ClusterExpSpec& spec, std::ostream& csv_out) {
    spec.validate();
    const std::size_t n_grid = spec.flip_rates.size();
    const std::size_t n_rep = static_cast<std::size_t>(spec.replicates);
    std::vector<ClusterExpRow> rows(n_grid * n_rep);

    parallel_for(n_grid * n_rep, [&](std::size_t t) {
        const std::size_t gi = t / n_rep;
        const std::size_t ri = t % n_rep;
        Rng rng(derive_seed(spec.base.seed, gi, ri));
        const GroundTruth gt = build_ground_truth(spec.base, rng);
        const Dataset ds = sample_dataset(spec.base, gt, rng);
        const Eigen::MatrixXd centers = gt.sensitive_centers();

        const int n_flips = static_cast<int>(std::llround(spec.flip_rates[gi] * spec.base.n));
        Dataset corrupted = ds;
        corrupted.labels = flip_labels(ds.labels, ds.k, n_flips, rng);

        const Eigen::MatrixXd prod_true = centers_product(centers, ds.labels);
        const Eigen::MatrixXd prod_est = centers_product(centers, corrupted.labels);

        FittedModel fit_true = fit_look_alike(ds, centers, FitKind::LookAlike);
        FittedModel fit_est = fit_look_alike(corrupted, centers, FitKind::LookAlikeEstimated);

        ClusterExpRow row;
        row.flip_rate = spec.flip_rates[gi];
        row.delta_n = delta_rate(prod_true, prod_est);
        row.risk_lookalike_true = risk_closed_form(fit_true.theta, gt, spec.base);
        row.risk_lookalike_estimated = risk_closed_form(fit_est.theta, gt, spec.base);
        // Spectral norm of the design difference equals delta_n * sqrt(n).
        const double diff_norm = row.delta_n * std::sqrt(static_cast<double>(spec.base.n));
        row.bound = pinv_perturbation_bound(fit_true.sigma_min_kept, fit_est.sigma_min_kept,
                                            diff_norm) *
                    ds.y.norm();
        row.theta_diff = (fit_true.theta - fit_est.theta).norm();
        rows[t] = row;
    }, spec.threads);

    csv_out << "flip_rate,delta_n,risk_lookalike_true,risk_lookalike_estimated,bound\n";
    for (const auto& row : rows)
        csv_out << csv::join_row({csv::format_double(row.flip_rate), csv::format_double(row.delta_n),
                                  csv::format_double(row.risk_lookalike_true),
                                  csv::format_double(row.risk_lookalike_estimated),
                                  csv::format_double(row.bound)});
    return rows;
}

std::vector<ClusterExpRow> run_cluster_experiment(const ClusterExpSpec& spec) {
    if (spec.out_path.empty()) return run_cluster_experiment(spec, std::cout);
    std::ofstream out(spec.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + spec.out_path);
    auto rows = run_cluster_experiment(spec, out);
    csv::write_plot_script(spec.out_path, "delta_n", "risk",
                           {{"anonymized, true labels", "2:3", "with points"},
                            {"anonymized, corrupted labels", "2:4", "with points"}});
    return rows;
}

} // namespace lalab
