// lalab — a simulation and theory-validation lab for look-alike clustering
// in high-dimensional linear regression.
//
// Subcommands:
//   validate     parse a config file and print it with the derived regime
//   theory       closed-form asymptotic risk predictions and gain
//   gain-map     two-axis grid of log-gain values (theory only)
//   simulate     one configuration: fit estimators, report risks
//   sweep        one-axis parameter sweep with replicates, CSV output
//   cluster-exp  label-corruption experiment for estimated clusters
//   glm          binomial-response gain experiment
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "lalab/clustering.hpp"
#include "lalab/config_file.hpp"
#include "lalab/csv.hpp"
#include "lalab/data.hpp"
#include "lalab/errors.hpp"
#include "lalab/estimators.hpp"
#include "lalab/glm.hpp"
#include "lalab/model.hpp"
#include "lalab/risk.hpp"
#include "lalab/rng.hpp"
#include "lalab/sweep.hpp"
#include "lalab/theory.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace lalab;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::optional<int> replicates;
    std::optional<int> mc_test;
    int threads = 0;
};

// Sections belonging to other subcommands are tolerated in a shared
// config file; unknown top-level keys are still typos.
const std::vector<std::string> kSiblingSections = {
    "sweep.", "glm.", "cluster_exp.", "gain_map.", "theory."};

std::vector<std::string> tolerated(std::initializer_list<std::string> extra) {
    std::vector<std::string> out = kSiblingSections;
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    return out;
}

int cmd_validate(const CommonOpts& opt) {
    ConfigFile cf = ConfigFile::parse_file(opt.config_path);
    ProblemConfig cfg = ProblemConfig::from_config(cf);
    cf.ensure_all_used(tolerated({"centers"}));
    if (opt.seed) cfg.seed = *opt.seed;
    AsymptoticRegime ar = derive_regime(cfg);

    std::cout << "n = " << cfg.n << "\n"
              << "d = " << cfg.d << "\n"
              << "p = " << cfg.p << "\n"
              << "k = " << cfg.k << "\n"
              << "mu = " << csv::format_double(cfg.mu) << "\n"
              << "sigma = " << csv::format_double(cfg.sigma) << "\n"
              << "r_s = " << csv::format_double(cfg.r_s) << "\n"
              << "r_ns = " << csv::format_double(cfg.r_ns) << "\n"
              << "rho = " << csv::format_double(cfg.rho) << "\n"
              << "priors = [";
    for (Eigen::Index i = 0; i < cfg.priors.size(); ++i)
        std::cout << (i ? ", " : "") << csv::format_double(cfg.priors[i]);
    std::cout << "]\n"
              << "seed = " << cfg.seed << "\n"
              << "pole_margin = " << csv::format_double(cfg.pole_margin) << "\n"
              << "psi_d = " << csv::format_double(ar.psi_d) << "\n"
              << "psi_p = " << csv::format_double(ar.psi_p) << "\n"
              << "regime_lookalike = " << regime_name(ar.regime_lookalike) << "\n"
              << "regime_minnorm = " << regime_name(ar.regime_minnorm) << "\n";
    return 0;
}

TheoryParams theory_params_from(const CommonOpts& opt, CLI::App* sub,
                                double psi_d, double psi_p, double sigma, double r_s,
                                double r_ns, double rho, double mu, int k,
                                const std::string& priors_csv) {
    TheoryParams tp;
    if (!opt.config_path.empty()) {
        ConfigFile cf = ConfigFile::parse_file(opt.config_path);
        tp = TheoryParams::from_config(cf);
        cf.ensure_all_used(tolerated({"centers", "seed", "n", "d", "p"}));
    } else {
        tp.priors = Eigen::VectorXd::Constant(1, 1.0);
    }
    if (sub->count("--psi-d")) tp.psi_d = psi_d;
    if (sub->count("--psi-p")) tp.psi_p = psi_p;
    if (sub->count("--sigma")) tp.sigma = sigma;
    if (sub->count("--r-s")) tp.r_s = r_s;
    if (sub->count("--r-ns")) tp.r_ns = r_ns;
    if (sub->count("--rho")) tp.rho = rho;
    if (sub->count("--mu")) tp.mu = mu;
    if (sub->count("--k")) tp.priors = Eigen::VectorXd::Constant(k, 1.0 / k);
    if (!priors_csv.empty()) {
        auto cells = csv::split_row(priors_csv);
        tp.priors.resize(static_cast<Eigen::Index>(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) tp.priors[i] = csv::parse_double(cells[i]);
    }
    tp.validate();
    return tp;
}

int cmd_theory(const TheoryParams& tp, const CommonOpts& opt) {
    const Eigen::VectorXd ut = tp.default_alignment();
    const Regime r_la = classify_regime(tp.psi_d - tp.psi_p, tp.pole_margin);
    const Regime r_mn = classify_regime(tp.psi_d, tp.pole_margin);
    const double risk_la = lookalike_prediction(tp, ut);
    const double risk_mn = minnorm_prediction(tp, ut);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!opt.out_path.empty()) {
        file = open_out(opt.out_path);
        os = &file;
    }
    *os << "psi_d,psi_p,risk_lookalike,regime_lookalike,risk_minnorm,regime_minnorm,gain\n";
    *os << csv::join_row({csv::format_double(tp.psi_d), csv::format_double(tp.psi_p),
                          csv::format_double(risk_la), regime_name(r_la),
                          csv::format_double(risk_mn), regime_name(r_mn),
                          csv::format_double(gain(risk_mn, risk_la))});
    return 0;
}

int cmd_simulate(const CommonOpts& opt, const std::string& dump_model_prefix,
                 const std::string& dump_data_path) {
    ConfigFile cf = ConfigFile::parse_file(opt.config_path);
    ProblemConfig cfg = ProblemConfig::from_config(cf);
    const std::string centers = cf.get_string_or("centers", "true");
    CentersMode mode = CentersMode::TrueCenters;
    if (centers == "empirical") mode = CentersMode::EmpiricalCenters;
    else if (centers != "true") throw ConfigError("centers must be 'true' or 'empirical'");
    cf.ensure_all_used(kSiblingSections);
    if (opt.seed) cfg.seed = *opt.seed;

    Rng rng(cfg.seed);
    GroundTruth gt = build_ground_truth(cfg, rng);
    Dataset ds = sample_dataset(cfg, gt, rng);

    if (!dump_data_path.empty()) {
        auto out = open_out(dump_data_path);
        write_dataset_csv(ds, out);
    }

    FittedModel fits[2] = {min_norm_fit(ds.X, ds.y), fit_look_alike(ds, gt, mode)};

    TheoryParams tp = TheoryParams::from(cfg);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!opt.out_path.empty()) {
        file = open_out(opt.out_path);
        os = &file;
    }
    *os << "estimator,risk_closed_form,risk_monte_carlo,mc_std_error,risk_theory,gain_vs_min_norm\n";
    double risk_ref = 0.0;
    for (const FittedModel& fm : fits) {
        RiskReport report;
        report.risk_closed_form = risk_closed_form(fm.theta, gt, cfg);
        if (opt.mc_test && *opt.mc_test > 0) {
            McRisk mc = risk_monte_carlo(fm.theta, gt, cfg, *opt.mc_test, rng);
            report.risk_monte_carlo = mc.mean;
            report.mc_std_error = mc.std_error;
        }
        try {
            report.theory_prediction =
                fm.kind == FitKind::MinNorm ? minnorm_prediction(tp, tp.default_alignment())
                                            : lookalike_prediction(tp, tp.default_alignment());
        } catch (const NumericalError&) {
            // pole-adjacent parameters: leave the prediction cell empty
        }
        if (fm.kind == FitKind::MinNorm) {
            risk_ref = report.risk_closed_form;
        } else {
            report.gain_vs = "min_norm";
            report.gain_value = gain(risk_ref, report.risk_closed_form);
        }
        auto cell = [](const std::optional<double>& v) {
            return v ? csv::format_double(*v) : std::string{};
        };
        *os << csv::join_row({fit_kind_name(fm.kind), csv::format_double(report.risk_closed_form),
                              cell(report.risk_monte_carlo), cell(report.mc_std_error),
                              cell(report.theory_prediction), cell(report.gain_value)});
        if (!dump_model_prefix.empty()) {
            auto mout = open_out(dump_model_prefix + "." + fit_kind_name(fm.kind) + ".csv");
            write_model_csv(fm, mout);
        }
    }
    return 0;
}

int cmd_sweep(const CommonOpts& opt) {
    ConfigFile cf = ConfigFile::parse_file(opt.config_path);
    SweepSpec spec = SweepSpec::from_config(cf);
    cf.ensure_all_used(tolerated({}));
    if (opt.seed) spec.base.seed = *opt.seed;
    if (opt.replicates) spec.replicates = *opt.replicates;
    if (opt.mc_test) spec.mc_test = *opt.mc_test;
    if (!opt.out_path.empty()) spec.out_path = opt.out_path;
    spec.threads = opt.threads;
    spec.validate();
    run_sweep(spec);
    return 0;
}

int cmd_gain_map(const CommonOpts& opt) {
    ConfigFile cf = ConfigFile::parse_file(opt.config_path);
    GainMapSpec spec = GainMapSpec::from_config(cf);
    cf.ensure_all_used(tolerated({"centers", "seed", "n", "d", "p"}));
    if (!opt.out_path.empty()) spec.out_path = opt.out_path;
    run_gain_map(spec);
    return 0;
}

int cmd_cluster_exp(const CommonOpts& opt) {
    ConfigFile cf = ConfigFile::parse_file(opt.config_path);
    ClusterExpSpec spec = ClusterExpSpec::from_config(cf);
    cf.ensure_all_used(tolerated({"centers"}));
    if (opt.seed) spec.base.seed = *opt.seed;
    if (opt.replicates) spec.replicates = *opt.replicates;
    if (!opt.out_path.empty()) spec.out_path = opt.out_path;
    spec.threads = opt.threads;
    run_cluster_experiment(spec);
    return 0;
}

int cmd_glm(const CommonOpts& opt) {
    GlmConfig cfg = default_glm_config();
    std::vector<double> grid = default_glm_r_s_grid();
    int replicates = 50;
    if (!opt.config_path.empty()) {
        ConfigFile cf = ConfigFile::parse_file(opt.config_path);
        cfg = GlmConfig::from_config(cf);
        if (cf.has("glm.r_s_grid")) grid = cf.get_double_list("glm.r_s_grid");
        replicates = static_cast<int>(cf.get_int_or("glm.replicates", 50));
        cf.ensure_all_used(tolerated({"centers"}));
    }
    if (opt.seed) cfg.base.seed = *opt.seed;
    if (opt.replicates) replicates = *opt.replicates;

    auto rows = glm_gain_experiment(cfg, grid, replicates, cfg.base.seed, opt.threads);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!opt.out_path.empty()) {
        file = open_out(opt.out_path);
        os = &file;
    }
    *os << "r_s,mean_log_gain,stderr,replicates,mean_log_gain_prob,stderr_prob\n";
    for (const auto& row : rows)
        *os << csv::join_row({csv::format_double(row.r_s), csv::format_double(row.mean_log_gain),
                              csv::format_double(row.stderr_log_gain),
                              csv::format_int(row.replicates),
                              csv::format_double(row.mean_log_gain_prob),
                              csv::format_double(row.stderr_log_gain_prob)});
    if (!opt.out_path.empty())
        csv::write_plot_script(opt.out_path, "r_s", "mean log gain",
                               {{"response-scale", "1:2:3", "with yerrorbars"},
                                {"probability-scale", "1:5:6", "with yerrorbars"}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"look-alike clustering regression lab"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::uint64_t seed_val = 0;
    int replicates_val = 0, mc_test_val = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opt.config_path, "configuration file (key = value)");
        if (config_required) c->required();
        sub->add_option("--seed", seed_val, "override the master seed");
        sub->add_option("--out", opt.out_path, "output file (default: stdout)");
        sub->add_option("--replicates", replicates_val, "override replicate count");
        sub->add_option("--mc-test", mc_test_val,
                        "Monte Carlo test draws per risk (0 = exact closed form)");
        sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    };

    auto* validate = app.add_subcommand("validate", "parse and echo a configuration");
    add_common(validate, true);

    auto* theory = app.add_subcommand("theory", "closed-form asymptotic predictions");
    add_common(theory, false);
    double psi_d = 0, psi_p = 0, sigma = 0, r_s = 0, r_ns = 0, rho = 0, mu = 0;
    int k_opt = 1;
    std::string priors_csv;
    theory->add_option("--psi-d", psi_d, "d/n ratio");
    theory->add_option("--psi-p", psi_p, "p/n ratio");
    theory->add_option("--sigma", sigma, "response noise");
    theory->add_option("--r-s", r_s, "sensitive model norm");
    theory->add_option("--r-ns", r_ns, "non-sensitive model norm");
    theory->add_option("--rho", rho, "alignment in [0,1]");
    theory->add_option("--mu", mu, "center energy");
    theory->add_option("--k", k_opt, "cluster count (balanced priors)");
    theory->add_option("--priors", priors_csv, "comma-separated priors");

    auto* gain_map = app.add_subcommand("gain-map", "two-axis log-gain grid");
    add_common(gain_map, true);

    auto* simulate = app.add_subcommand("simulate", "single-configuration simulation");
    add_common(simulate, true);
    std::string dump_model_prefix, dump_data_path;
    simulate->add_option("--dump-model", dump_model_prefix,
                         "write fitted coefficients to PREFIX.<estimator>.csv");
    simulate->add_option("--dump-data", dump_data_path, "write the sampled dataset as CSV");

    auto* sweep = app.add_subcommand("sweep", "one-axis sweep with replicates");
    add_common(sweep, true);

    auto* cluster_exp = app.add_subcommand("cluster-exp", "label-corruption experiment");
    add_common(cluster_exp, true);

    auto* glm = app.add_subcommand("glm", "binomial-response gain experiment");
    add_common(glm, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // Flag presence is per parsed subcommand; fold the set ones into opt.
    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--seed")) opt.seed = seed_val;
        if (sub->count("--replicates")) opt.replicates = replicates_val;
        if (sub->count("--mc-test")) opt.mc_test = mc_test_val;
    }

    try {
        if (validate->parsed()) return cmd_validate(opt);
        if (theory->parsed())
            return cmd_theory(theory_params_from(opt, theory, psi_d, psi_p, sigma, r_s, r_ns, rho,
                                                 mu, k_opt, priors_csv),
                              opt);
        if (gain_map->parsed()) return cmd_gain_map(opt);
        if (simulate->parsed()) return cmd_simulate(opt, dump_model_prefix, dump_data_path);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (cluster_exp->parsed()) return cmd_cluster_exp(opt);
        if (glm->parsed()) return cmd_glm(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
