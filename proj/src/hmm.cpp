#include "cogarq/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cogarq/errors.hpp"
#include "cogarq/parallel.hpp"
#include "cogarq/sim.hpp"

namespace cogarq {

std::string_view to_string(Regime r) noexcept { return r == Regime::Silent ? "silent" : "transmitting"; }

ObservationSequence ObservationSequence::constant(std::vector<Feedback> symbols, Regime regime)
{
    ObservationSequence s;
    s.regimes.assign(symbols.size(), regime);
    s.symbols = std::move(symbols);
    return s;
}

void ObservationSequence::validate() const
{
    if (symbols.empty())
        throw PreconditionError("observation sequence is empty");
    if (regimes.size() != symbols.size())
        throw PreconditionError("every observation needs a regime annotation");
}

HmmSpec HmmSpec::from_model(const ChannelModel& model)
{
    return HmmSpec{model.states(), model.success(), std::nullopt};
}

double HmmSpec::emission(std::size_t state, Regime regime, Feedback fb) const
{
    const double ack = emissions.ack_probability(state, regime == Regime::Transmitting);
    return fb == Feedback::Ack ? ack : 1.0 - ack;
}

void HmmSpec::validate() const
{
    if (n_states < 2)
        throw PreconditionError("hidden chain needs at least two states");
    if (emissions.silent_ack.size() != n_states || emissions.transmit_ack.size() != n_states)
        throw PreconditionError("emission table does not match the number of states");
    for (std::size_t i = 0; i < n_states; ++i)
        for (double v : {emissions.silent_ack[i], emissions.transmit_ack[i]})
            if (!(v >= 0.0 && v <= 1.0))
                throw PreconditionError("emission probabilities must lie in [0, 1]");
    if (initial) {
        if (initial->size() != n_states)
            throw PreconditionError("initial distribution does not match the number of states");
        double sum = 0.0;
        for (double v : *initial) {
            if (!(v >= 0.0))
                throw PreconditionError("initial distribution has a negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw PreconditionError("initial distribution does not sum to 1");
    }
}

namespace {

void check_stochastic(const Matrix& a, std::size_t n)
{
    if (a.size() != n)
        throw PreconditionError("transition matrix does not match the number of states");
    for (const auto& row : a) {
        if (row.size() != n)
            throw PreconditionError("transition matrix is not square");
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0))
                throw PreconditionError("transition probabilities must lie in [0, 1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw PreconditionError("transition rows must sum to 1");
    }
}

std::vector<double> initial_distribution(const HmmSpec& spec, const Matrix& a)
{
    if (spec.initial)
        return *spec.initial;
    return TransitionMatrix(a).stationary();
}

// Scaled forward and backward variables; c[t] are the per-slot normalizers.
struct Pass {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> emit;
    std::vector<double> c;
    double log_likelihood = 0.0;
};

Pass run_pass(const ObservationSequence& obs, const HmmSpec& spec, const Matrix& a, const std::vector<double>& pi)
{
    const std::size_t len = obs.size();
    const std::size_t s = spec.n_states;
    Pass p;
    p.alpha.assign(len * s, 0.0);
    p.beta.assign(len * s, 0.0);
    p.emit.resize(len * s);
    p.c.resize(len);
    for (std::size_t t = 0; t < len; ++t)
        for (std::size_t i = 0; i < s; ++i)
            p.emit[t * s + i] = spec.emission(i, obs.regimes[t], obs.symbols[t]);

    for (std::size_t t = 0; t < len; ++t) {
        double norm = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            double prior = 0.0;
            if (t == 0) {
                prior = pi[j];
            } else {
                for (std::size_t i = 0; i < s; ++i)
                    prior += p.alpha[(t - 1) * s + i] * a[i][j];
            }
            const double v = prior * p.emit[t * s + j];
            p.alpha[t * s + j] = v;
            norm += v;
        }
        if (!(norm > 0.0))
            throw DegenerateObservationError("observation " + std::to_string(t) + " (" +
                                             std::string(to_string(obs.symbols[t])) +
                                             ") has zero probability under the model");
        p.c[t] = norm;
        p.log_likelihood += std::log(norm);
        for (std::size_t j = 0; j < s; ++j)
            p.alpha[t * s + j] /= norm;
    }

    for (std::size_t i = 0; i < s; ++i)
        p.beta[(len - 1) * s + i] = 1.0;
    for (std::size_t t = len - 1; t-- > 0;) {
        for (std::size_t i = 0; i < s; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s; ++j)
                acc += a[i][j] * p.emit[(t + 1) * s + j] * p.beta[(t + 1) * s + j];
            p.beta[t * s + i] = acc / p.c[t + 1];
        }
    }
    return p;
}

// Expected transition counts sum_t P(X_t = i, X_{t+1} = j | obs).
Matrix expected_counts(const Pass& p, const Matrix& a, std::size_t len, std::size_t s)
{
    Matrix counts(s, std::vector<double>(s, 0.0));
    for (std::size_t t = 0; t + 1 < len; ++t)
        for (std::size_t i = 0; i < s; ++i) {
            const double ai = p.alpha[t * s + i];
            if (ai == 0.0)
                continue;
            for (std::size_t j = 0; j < s; ++j)
                counts[i][j] += ai * a[i][j] * p.emit[(t + 1) * s + j] * p.beta[(t + 1) * s + j] / p.c[t + 1];
        }
    return counts;
}

Matrix clamp_rows(Matrix a, double eps)
{
    for (auto& row : a) {
        for (int round = 0; round < 3; ++round) {
            double sum = 0.0;
            for (double& v : row) {
                v = std::clamp(v, eps, 1.0 - eps);
                sum += v;
            }
            for (double& v : row)
                v /= sum;
        }
        // Exact unit row sum after the last division.
        double rest = 1.0;
        for (std::size_t j = 0; j + 1 < row.size(); ++j)
            rest -= row[j];
        row.back() = rest;
    }
    return a;
}

} // namespace

ForwardBackwardResult forward_backward(const ObservationSequence& obs, const HmmSpec& spec, const Matrix& transitions)
{
    obs.validate();
    spec.validate();
    check_stochastic(transitions, spec.n_states);
    const std::size_t len = obs.size();
    const std::size_t s = spec.n_states;
    const Pass p = run_pass(obs, spec, transitions, initial_distribution(spec, transitions));

    ForwardBackwardResult out;
    out.log_likelihood = p.log_likelihood;
    out.posterior.assign(len, std::vector<double>(s));
    for (std::size_t t = 0; t < len; ++t) {
        double norm = 0.0;
        for (std::size_t i = 0; i < s; ++i)
            norm += out.posterior[t][i] = p.alpha[t * s + i] * p.beta[t * s + i];
        for (double& v : out.posterior[t])
            v /= norm;
    }
    out.pairwise.assign(len > 0 ? len - 1 : 0, Matrix(s, std::vector<double>(s)));
    for (std::size_t t = 0; t + 1 < len; ++t)
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                out.pairwise[t][i][j] = p.alpha[t * s + i] * transitions[i][j] * p.emit[(t + 1) * s + j] *
                                        p.beta[(t + 1) * s + j] / p.c[t + 1];
    return out;
}

HmmFit baum_welch(const ObservationSequence& obs, const HmmSpec& spec_in, const Matrix& init, const EmOptions& options)
{
    obs.validate();
    spec_in.validate();
    check_stochastic(init, spec_in.n_states);
    if (!(options.tolerance > 0.0) || options.max_iterations == 0)
        throw PreconditionError("EM needs a positive tolerance and iteration cap");
    const std::size_t s = spec_in.n_states;
    const std::vector<double> pi =
        spec_in.initial ? *spec_in.initial : std::vector<double>(s, 1.0 / static_cast<double>(s));

    HmmFit fit;
    Matrix a = init;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        const Pass p = run_pass(obs, spec_in, a, pi);
        fit.log_likelihood_history.push_back(p.log_likelihood);
        if (it > 0 && p.log_likelihood - prev < options.tolerance) {
            fit.converged = true;
            break;
        }
        prev = p.log_likelihood;
        const Matrix counts = expected_counts(p, a, obs.size(), s);
        for (std::size_t i = 0; i < s; ++i) {
            const double total = std::accumulate(counts[i].begin(), counts[i].end(), 0.0);
            if (!(total > 1e-300))
                continue;
            for (std::size_t j = 0; j < s; ++j)
                a[i][j] = counts[i][j] / total;
        }
        fit.iterations = it + 1;
    }
    fit.transitions = clamp_rows(a, options.clamp);
    fit.log_likelihood = run_pass(obs, spec_in, fit.transitions, pi).log_likelihood;
    return fit;
}

Matrix sticky_start(std::size_t n, RandomStream& rng, double jitter)
{
    Matrix a(n, std::vector<double>(n, 0.2 / static_cast<double>(n - 1)));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = 0.8;
        double sum = 0.0;
        for (double& v : a[i]) {
            v = std::max(v + jitter * (2.0 * rng.uniform() - 1.0), 1e-3);
            sum += v;
        }
        for (double& v : a[i])
            v /= sum;
    }
    return a;
}

HmmFit fit_transitions(const ObservationSequence& obs, const HmmSpec& spec, std::uint64_t seed, std::size_t starts,
                       const EmOptions& options)
{
    if (starts == 0)
        throw PreconditionError("need at least one EM start");
    std::optional<HmmFit> best;
    for (std::size_t k = 0; k < starts; ++k) {
        RandomStream rng = RandomStream::derive(seed, k);
        HmmFit f = baum_welch(obs, spec, sticky_start(spec.n_states, rng), options);
        if (!best || f.log_likelihood > best->log_likelihood)
            best = std::move(f);
    }
    return *best;
}

HmmFit train_three_state_two_phase(const ObservationSequence& silent, const ObservationSequence& transmitting,
                                   const HmmSpec& spec, std::uint64_t seed, std::size_t starts,
                                   const EmOptions& options)
{
    if (silent.symbols.empty())
        throw PreconditionError("silent training sequence is empty");
    if (transmitting.symbols.empty())
        throw PreconditionError("transmitting training sequence is empty");
    const HmmFit phase1 = fit_transitions(silent, spec, seed, starts, options);
    return baum_welch(transmitting, spec, phase1.transitions, options);
}

double aligned_error(const Matrix& estimate, const Matrix& truth, const HmmSpec& spec, const std::vector<Regime>& regimes)
{
    const std::size_t s = spec.n_states;
    check_stochastic(estimate, s);
    check_stochastic(truth, s);
    std::vector<std::size_t> perm(s);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        bool keeps = true;
        for (std::size_t i = 0; i < s && keeps; ++i)
            for (Regime r : regimes)
                if (spec.emissions.ack_probability(i, r == Regime::Transmitting) !=
                    spec.emissions.ack_probability(perm[i], r == Regime::Transmitting))
                    keeps = false;
        if (!keeps)
            continue;
        double err = 0.0;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                err += std::abs(estimate[perm[i]][perm[j]] - truth[i][j]);
        best = std::min(best, err / static_cast<double>(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

ObservationSequence generate_observations(const ChannelModel& model, Regime regime, std::size_t length,
                                          RandomStream& rng)
{
    ObservationSequence out;
    out.symbols.reserve(length);
    out.regimes.assign(length, regime);
    ChannelState state = sample_state(model.transitions().stationary(), rng);
    for (std::size_t t = 0; t < length; ++t) {
        out.symbols.push_back(sample_ack(state, regime == Regime::Transmitting, model.success(), rng));
        state = sample_transition(state, model.transitions(), rng);
    }
    return out;
}

void write_trace(std::ostream& out, const ObservationSequence& obs)
{
    obs.validate();
    const Regime r = obs.regimes.front();
    if (std::any_of(obs.regimes.begin(), obs.regimes.end(), [r](Regime x) { return x != r; }))
        throw PreconditionError("trace files hold a single regime");
    out << "regime: " << to_string(r) << '\n';
    for (Feedback f : obs.symbols)
        out << (f == Feedback::Ack ? 'A' : 'N');
    out << '\n';
}

ObservationSequence read_trace(std::istream& in)
{
    std::string header;
    if (!std::getline(in, header))
        throw PreconditionError("trace is empty");
    const std::string prefix = "regime:";
    if (header.rfind(prefix, 0) != 0)
        throw PreconditionError("trace header must start with 'regime:'");
    std::string name = header.substr(prefix.size());
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t\r") + 1);
    Regime regime;
    if (name == "silent")
        regime = Regime::Silent;
    else if (name == "transmitting")
        regime = Regime::Transmitting;
    else
        throw PreconditionError("unknown regime '" + name + "' in trace header");
    std::string body;
    if (!std::getline(in, body))
        throw PreconditionError("trace has no observation line");
    std::vector<Feedback> symbols;
    for (char ch : body) {
        if (ch == 'A')
            symbols.push_back(Feedback::Ack);
        else if (ch == 'N')
            symbols.push_back(Feedback::Nack);
        else if (ch != '\r')
            throw PreconditionError(std::string("unexpected trace symbol '") + ch + "'");
    }
    ObservationSequence out = ObservationSequence::constant(std::move(symbols), regime);
    out.validate();
    return out;
}

BurstLength policy_from_estimate(const MPolicyParams& est)
{
    if (est.p_ee > est.p_ne)
        return optimal_m(est);
    const double p_e = est.p_ne / (1.0 - est.p_ee + est.p_ne);
    if (est.w * est.r_p * (1.0 - p_e) >= (1.0 - est.w) * est.r_s)
        return BurstLength::finite(0);
    return BurstLength::infinite();
}

DegradationResult degradation_experiment(const ChannelModel& true_model, std::size_t training_length,
                                         const std::vector<double>& w_grid, double r_s,
                                         const DegradationOptions& options)
{
    if (training_length < 2)
        throw PreconditionError("training length must be at least 2");
    if (!true_model.is_erasure())
        throw PreconditionError("degradation experiment needs an erasure channel");
    const HmmSpec spec = HmmSpec::from_model(true_model);
    RandomStream rng = RandomStream::derive(options.seed, 0xdeadbeefULL);
    const ObservationSequence train = generate_observations(true_model, Regime::Silent, training_length, rng);

    DegradationResult out;
    out.fit = fit_transitions(train, spec, options.seed, options.starts, options.em);
    const double p_ee_hat = out.fit.transitions[0][0];
    const double p_ne_hat = out.fit.transitions[1][0];
    const double p_ee = true_model.transitions()(0, 0);
    const double p_ne = true_model.transitions()(1, 0);
    const double r_p = true_model.primary_reward();

    for (std::size_t k = 0; k < w_grid.size(); ++k) {
        const double w = w_grid[k];
        const MPolicyParams truth{p_ee, p_ne, w, r_p, r_s};
        const MPolicyParams est{p_ee_hat, p_ne_hat, w, r_p, r_s};
        DegradationRow row;
        row.w = w;
        row.m_true = optimal_m(truth);
        row.m_estimated = policy_from_estimate(est);
        if (options.evaluation == DegradationEvaluation::Analytic) {
            row.rate_true = weighted_rate(row.m_true, truth);
            row.rate_estimated = weighted_rate(row.m_estimated, truth);
        } else {
            SimConfig cfg;
            cfg.models = {true_model};
            cfg.w = w;
            cfg.r_s = r_s;
            cfg.horizon = options.sim_horizon;
            cfg.replications = 1;
            cfg.seed = options.seed ^ (0x9e3779b97f4a7c15ULL * (k + 1));
            PolicySpec a{PolicyKind::MPolicy, row.m_true, nullptr};
            PolicySpec b{PolicyKind::MPolicy, row.m_estimated, nullptr};
            row.rate_true = simulate(cfg, a).rate;
            row.rate_estimated = simulate(cfg, b).rate;
        }
        row.degradation = row.rate_true - row.rate_estimated;
        out.rows.push_back(row);
    }
    return out;
}

namespace {

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

EstimationSummary estimation_study(const ChannelModel& model, std::size_t length, std::size_t seeds,
                                   std::uint64_t seed, std::size_t starts, const EmOptions& options,
                                   std::size_t transmit_length, std::size_t threads)
{
    if (length < 2 || seeds == 0)
        throw PreconditionError("estimation study needs length >= 2 and at least one seed");
    const HmmSpec spec = HmmSpec::from_model(model);
    const Matrix truth = model.transitions().rows();
    const bool two_phase = model.preset() == Preset::ThreeState;
    const std::size_t tx_len = transmit_length ? transmit_length : length;

    EstimationSummary out;
    out.length = length;
    out.errors.assign(seeds, 0.0);
    parallel_for(seeds, threads, [&](std::size_t k) {
        RandomStream silent_rng = RandomStream::derive(seed, 2 * k);
        const ObservationSequence silent = generate_observations(model, Regime::Silent, length, silent_rng);
        const std::uint64_t fit_seed = RandomStream::derive(seed, 2 * k + 1)();
        HmmFit fit;
        if (two_phase) {
            RandomStream tx_rng = RandomStream::derive(seed ^ 0x7472616e736d6974ULL, k);
            const ObservationSequence tx = generate_observations(model, Regime::Transmitting, tx_len, tx_rng);
            fit = train_three_state_two_phase(silent, tx, spec, fit_seed, starts, options);
        } else {
            fit = fit_transitions(silent, spec, fit_seed, starts, options);
        }
        out.errors[k] = aligned_error(fit.transitions, truth, spec);
    });
    out.median = quantile(out.errors, 0.5);
    out.q25 = quantile(out.errors, 0.25);
    out.q75 = quantile(out.errors, 0.75);
    out.mean = std::accumulate(out.errors.begin(), out.errors.end(), 0.0) / static_cast<double>(seeds);
    return out;
}

std::vector<DegradationSummary> degradation_study(const ChannelModel& true_model, std::size_t training_length,
                                                  const std::vector<double>& w_grid, std::size_t seeds,
                                                  double r_s, const DegradationOptions& options,
                                                  std::size_t threads)
{
    if (seeds == 0)
        throw PreconditionError("degradation study needs at least one seed");
    std::vector<DegradationResult> runs(seeds);
    parallel_for(seeds, threads, [&](std::size_t k) {
        DegradationOptions o = options;
        o.seed = RandomStream::derive(options.seed, k)();
        runs[k] = degradation_experiment(true_model, training_length, w_grid, r_s, o);
    });
    std::vector<DegradationSummary> out;
    const double n = static_cast<double>(seeds);
    for (std::size_t i = 0; i < w_grid.size(); ++i) {
        DegradationSummary row;
        row.length = training_length;
        row.w = w_grid[i];
        row.seeds = seeds;
        double sq = 0.0;
        for (const auto& r : runs) {
            row.mean_degradation += r.rows[i].degradation / n;
            row.mean_rate_true += r.rows[i].rate_true / n;
            row.mean_rate_estimated += r.rows[i].rate_estimated / n;
        }
        for (const auto& r : runs)
            sq += (r.rows[i].degradation - row.mean_degradation) * (r.rows[i].degradation - row.mean_degradation);
        row.stderr_degradation = seeds > 1 ? std::sqrt(sq / (n - 1) / n) : 0.0;
        out.push_back(row);
    }
    return out;
}

} // namespace cogarq
