#include "lalab/glm.hpp"

#include "lalab/config_file.hpp"
#include "lalab/data.hpp"
#include "lalab/errors.hpp"
#include "lalab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace lalab {

namespace {

// Numerically stable log(1 + exp(x)).
double softplus(double x) {
    if (x <= -37.0) return std::exp(x);
    if (x <= 18.0) return std::log1p(std::exp(x));
    if (x <= 33.3) return x + std::exp(-x);
    return x;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr double kGramFloor = 1e-10;

} // namespace

void GlmConfig::validate() const {
    base.validate();
    if (trials < 1) throw ConfigError("glm: N (trial count) must be >= 1");
    if (n_test < 1) throw ConfigError("glm: n_test must be >= 1");
}

GlmConfig GlmConfig::from_config(const ConfigFile& cf) {
    GlmConfig cfg;
    cfg.base = ProblemConfig::from_config(cf);
    cfg.trials = static_cast<int>(cf.get_int_or("glm.N", 1000));
    cfg.n_test = static_cast<int>(cf.get_int_or("glm.n_test", 50000));
    cfg.validate();
    return cfg;
}

GlmSample sample_glm(const GlmConfig& cfg, const GroundTruth& gt, Rng& rng, int n_override) {
    cfg.validate();
    if (gt.d() != cfg.base.d || gt.p() != cfg.base.p || gt.k() != cfg.base.k)
        throw ConfigError("sample_glm: config and ground truth dimensions disagree");

    const Eigen::Index n = n_override > 0 ? n_override : cfg.base.n;
    const Eigen::Index d = cfg.base.d;
    GlmSample out;
    out.k = cfg.base.k;
    out.p = cfg.base.p;
    out.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.labels[i] = rng.categorical(cfg.base.priors);

    out.X = rng.gaussian_matrix(d, n);
    for (Eigen::Index i = 0; i < n; ++i) out.X.col(i) += gt.M.col(out.labels[i]);

    const Eigen::VectorXd theta0 = gt.theta0();
    out.p_true.resize(n);
    out.counts.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double eta = out.X.col(i).dot(theta0);
        if (cfg.base.sigma > 0.0) eta -= cfg.base.sigma * rng.normal();
        out.p_true[i] = sigmoid(eta);
        out.counts[i] = rng.binomial(cfg.trials, out.p_true[i]);
    }
    return out;
}

double glm_log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& counts,
                          int trials, const Eigen::VectorXd& theta) {
    const Eigen::VectorXd eta = design.transpose() * theta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += counts[i] * eta[i] - trials * softplus(eta[i]);
    return ll;
}

FittedModel glm_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& counts, int trials,
                    int max_iter, double tol, std::vector<double>* ll_trace) {
    const Eigen::Index n = design.cols(), d = design.rows();
    if (counts.size() != n) throw ConfigError("glm_fit: counts length must equal sample count");
    if (trials < 1) throw ConfigError("glm_fit: trial count must be >= 1");
    for (Eigen::Index i = 0; i < n; ++i)
        if (counts[i] < 0.0 || counts[i] > trials)
            throw ConfigError("glm_fit: counts must lie in [0, N]");
    if (!design.allFinite()) throw NumericalError("glm_fit: non-finite design");

    FittedModel fm;
    fm.kind = FitKind::MinNorm;
    fm.theta = Eigen::VectorXd::Zero(d);

    double ll = glm_log_likelihood(design, counts, trials, fm.theta);
    if (ll_trace) {
        ll_trace->clear();
        ll_trace->push_back(ll);
    }
    const double rcond = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(n, d));

    Eigen::VectorXd p(n), w(n);
    for (int it = 0; it < max_iter; ++it) {
        fm.iterations = it + 1;
        const Eigen::VectorXd eta = design.transpose() * fm.theta;
        for (Eigen::Index i = 0; i < n; ++i) {
            p[i] = sigmoid(eta[i]);
            w[i] = trials * p[i] * (1.0 - p[i]);
        }
        const Eigen::VectorXd grad = design * (counts - double(trials) * p);
        fm.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
        if (fm.grad_inf_norm <= tol) {
            fm.converged = true;
            return fm;
        }

        // Weighted Gram; pseudoinverse solve keeps the step inside the
        // row space of the design, the floor guards near-separation.
        Eigen::MatrixXd gram = design * w.asDiagonal() * design.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success) throw NumericalError("glm_fit: eigendecomposition failed");
        const Eigen::VectorXd& evals = eig.eigenvalues(); // ascending
        const double cutoff = rcond * std::max(evals[evals.size() - 1], 0.0);

        const Eigen::VectorXd proj = eig.eigenvectors().transpose() * grad;
        Eigen::VectorXd scaled = Eigen::VectorXd::Zero(d);
        fm.rank_used = 0;
        fm.sigma_min_kept = 0.0;
        for (Eigen::Index j = d - 1; j >= 0; --j) {
            if (evals[j] > cutoff && evals[j] > 0.0) {
                scaled[j] = proj[j] / (evals[j] + kGramFloor);
                fm.rank_used += 1;
                fm.sigma_min_kept = std::sqrt(evals[j]);
            }
        }
        const Eigen::VectorXd step = eig.eigenvectors() * scaled;

        // Step halving: never accept a likelihood decrease.
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            const Eigen::VectorXd cand = fm.theta + t * step;
            const double cand_ll = glm_log_likelihood(design, counts, trials, cand);
            if (cand_ll >= ll) {
                fm.theta = cand;
                ll = cand_ll;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (ll_trace) ll_trace->push_back(ll);
        if (!accepted) break; // stalled: no ascent direction at this scale
    }

    const Eigen::VectorXd eta = design.transpose() * fm.theta;
    for (Eigen::Index i = 0; i < n; ++i) p[i] = sigmoid(eta[i]);
    fm.grad_inf_norm = (design * (counts - double(trials) * p)).lpNorm<Eigen::Infinity>();
    fm.converged = fm.grad_inf_norm <= tol;
    return fm;
}

GlmConfig default_glm_config() {
    GlmConfig cfg;
    cfg.base.n = 200;
    cfg.base.d = 180;
    cfg.base.p = 30;
    cfg.base.k = 3;
    cfg.base.mu = 5.0;
    cfg.base.sigma = 1.0;
    cfg.base.rho = 0.3;
    cfg.base.r_s = 0.1;
    cfg.base.r_ns = 2.0;
    cfg.base.priors = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    cfg.base.seed = 0;
    cfg.trials = 1000;
    cfg.n_test = 50000;
    return cfg;
}

std::vector<double> default_glm_r_s_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.1 + 0.2 * i);
    return grid;
}

namespace {

struct ReplicateGains {
    double log_gain_resp = 0.0;
    double log_gain_prob = 0.0;
};

ReplicateGains run_glm_replicate(const GlmConfig& cfg, Rng& rng) {
    GroundTruth gt = build_ground_truth(cfg.base, rng);
    GlmSample train = sample_glm(cfg, gt, rng);
    GlmSample test = sample_glm(cfg, gt, rng, cfg.n_test);

    Dataset train_ds;
    train_ds.X = train.X;
    train_ds.y = train.counts;
    train_ds.labels = train.labels;
    train_ds.k = train.k;
    train_ds.p = train.p;
    AnonymizedDataset anon = anonymize(train_ds, gt.sensitive_centers());

    FittedModel raw = glm_fit(train.X, train.counts, cfg.trials);
    FittedModel look = glm_fit(anon.X_L, anon.y, cfg.trials);

    // Both models are deployed on raw (non-anonymized) test features.
    const Eigen::VectorXd eta_raw = test.X.transpose() * raw.theta;
    const Eigen::VectorXd eta_look = test.X.transpose() * look.theta;
    double resp_raw = 0.0, resp_look = 0.0, prob_raw = 0.0, prob_look = 0.0;
    const double N = cfg.trials;
    for (Eigen::Index i = 0; i < test.X.cols(); ++i) {
        const double ph_raw = sigmoid(eta_raw[i]);
        const double ph_look = sigmoid(eta_look[i]);
        const double frac = test.counts[i] / N;
        resp_raw += (frac - ph_raw) * (frac - ph_raw);
        resp_look += (frac - ph_look) * (frac - ph_look);
        prob_raw += (test.p_true[i] - ph_raw) * (test.p_true[i] - ph_raw);
        prob_look += (test.p_true[i] - ph_look) * (test.p_true[i] - ph_look);
    }
    ReplicateGains out;
    out.log_gain_resp = std::log(resp_raw / resp_look);
    out.log_gain_prob = std::log(prob_raw / prob_look);
    return out;
}

void mean_stderr(const std::vector<double>& v, double& mean, double& se) {
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += x;
    mean = s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

} // namespace

std::vector<GlmGainRow> glm_gain_experiment(const GlmConfig& cfg,
                                            const std::vector<double>& r_s_grid, int replicates,
                                            std::uint64_t seed, int threads) {
    if (r_s_grid.empty()) throw ConfigError("glm_gain_experiment: empty r_s grid");
    if (replicates < 1) throw ConfigError("glm_gain_experiment: replicates must be >= 1");

    const std::size_t total = r_s_grid.size() * static_cast<std::size_t>(replicates);
    std::vector<ReplicateGains> gains(total);
    parallel_for(total, [&](std::size_t t) {
        const std::size_t gi = t / replicates;
        const std::size_t ri = t % replicates;
        GlmConfig local = cfg;
        local.base.r_s = r_s_grid[gi];
        local.validate();
        Rng rng(derive_seed(seed, gi, ri));
        gains[t] = run_glm_replicate(local, rng);
    }, threads);

    std::vector<GlmGainRow> rows;
    rows.reserve(r_s_grid.size());
    for (std::size_t gi = 0; gi < r_s_grid.size(); ++gi) {
        std::vector<double> resp(replicates), prob(replicates);
        for (int ri = 0; ri < replicates; ++ri) {
            resp[ri] = gains[gi * replicates + ri].log_gain_resp;
            prob[ri] = gains[gi * replicates + ri].log_gain_prob;
        }
        GlmGainRow row;
        row.r_s = r_s_grid[gi];
        row.replicates = replicates;
        mean_stderr(resp, row.mean_log_gain, row.stderr_log_gain);
        mean_stderr(prob, row.mean_log_gain_prob, row.stderr_log_gain_prob);
        rows.push_back(row);
    }
    return rows;
}

} // namespace lalab
