// Acceptance suite: runs the ten release criteria and prints one pass/fail
// line each. Usage: vrb_acceptance [N ...] (no args = all criteria).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "vrb/errors.hpp"
#include "vrb/finite_diff.hpp"
#include "vrb/gradcheck.hpp"
#include "vrb/trainer.hpp"

using namespace vrb;

namespace {

struct Outcome {
    bool pass = false;
    std::string details;
};

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string acceptance_corpus(int criterion, int sessions = 500) {
    auto env = EnvBundle::toy();
    RngStream rng(1, stream_key(0xacce, criterion));
    const std::vector<Session> corpus =
        generate_corpus(env->schema(), env->db(), env->vocab(), sessions, rng);
    const std::string path =
        "/tmp/vrb_acceptance_corpus_" + std::to_string(criterion) + ".jsonl";
    save_corpus(corpus, env->vocab(), path);
    return path;
}

// ---- 1. analytic gradients vs central finite differences -------------------

Outcome criterion_1() {
    const GradCheckReport rep = run_gradcheck(2029, 25);
    std::ostringstream os;
    os << rep.instances << " instances, max rel err " << rep.max_rel_err;
    return {rep.instances >= 100 && rep.passed(1e-4), os.str()};
}

// ---- 2. shaped reward equals the discriminator log-odds --------------------

Outcome criterion_2() {
    RngStream rng(7, 2);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double f = rng.uniform(-6.0, 6.0);
        const double log_pi = rng.uniform(-6.0, 0.0);
        const double d = discriminator_prob(f, log_pi);
        const double err = std::abs(std::log(d) - std::log(1.0 - d) - shaped_reward(f, log_pi));
        worst = std::max(worst, err);
    }
    std::ostringstream os;
    os << "100000 inputs, max identity error " << worst;
    return {worst <= 1e-9, os.str()};
}

// ---- 3. closed-form KL vs Monte-Carlo integration ---------------------------

Outcome criterion_3() {
    if (kl_std_normal(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}) != 0.0) {
        return {false, "standard normal case is not exactly zero"};
    }
    RngStream rng(11, 3);
    double worst_sigmas = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> mu(2), lv(2);
        for (int d = 0; d < 2; ++d) {
            mu[d] = rng.uniform(-1.5, 1.5);
            lv[d] = rng.uniform(-1.0, 1.0);
        }
        const double exact = kl_std_normal(mu, lv);
        const int n = 1000000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            double ratio = 0.0;
            for (int d = 0; d < 2; ++d) {
                const double eps = rng.normal();
                const double z = mu[d] + std::exp(0.5 * lv[d]) * eps;
                ratio += -0.5 * lv[d] - 0.5 * eps * eps + 0.5 * z * z;
            }
            sum += ratio;
            sq += ratio * ratio;
        }
        const double mc = sum / n;
        const double se = std::sqrt((sq / n - mc * mc) / n);
        worst_sigmas = std::max(worst_sigmas, std::abs(mc - exact) / se);
    }
    std::ostringstream os;
    os << "50 Gaussians x 1e6 samples, worst deviation " << worst_sigmas << " standard errors";
    return {worst_sigmas < 3.0, os.str()};
}

// ---- 4. mutual information never exceeds the mean KL bound ------------------

Outcome criterion_4() {
    RngStream rng(13, 4);
    double worst_excess = -1e300;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> mu(4), lv(4);
        for (int i = 0; i < 4; ++i) {
            mu[i] = rng.uniform(-2.0, 2.0);
            lv[i] = rng.uniform(-2.0, 1.0);
        }
        double bound = 0.0;
        for (int i = 0; i < 4; ++i) {
            bound += 0.25 * kl_std_normal(std::span(&mu[i], 1), std::span(&lv[i], 1));
        }
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 4; ++i) {
            const double s = std::exp(0.5 * lv[i]);
            lo = std::min(lo, mu[i] - 12.0 * s);
            hi = std::max(hi, mu[i] + 12.0 * s);
        }
        const int n = 40001;
        const double dz = (hi - lo) / (n - 1);
        auto integrand = [&](double z) {
            double p_z = 0.0, contrib = 0.0;
            double q[4];
            for (int i = 0; i < 4; ++i) {
                const double s2 = std::exp(lv[i]);
                q[i] = std::exp(-0.5 * (z - mu[i]) * (z - mu[i]) / s2) /
                       std::sqrt(2.0 * 3.14159265358979323846 * s2);
                p_z += 0.25 * q[i];
            }
            for (int i = 0; i < 4; ++i) {
                if (q[i] > 1e-300 && p_z > 1e-300) {
                    contrib += 0.25 * q[i] * (std::log(q[i]) - std::log(p_z));
                }
            }
            return contrib;
        };
        double integral = integrand(lo) + integrand(hi);
        for (int k = 1; k + 1 < n; ++k) {
            integral += integrand(lo + k * dz) * (k % 2 == 1 ? 4.0 : 2.0);
        }
        integral *= dz / 3.0;
        worst_excess = std::max(worst_excess, integral - bound);
    }
    std::ostringstream os;
    os << "50 encoders, worst I(Z,X) - E[KL] = " << worst_excess;
    return {worst_excess <= 1e-6, os.str()};
}

// ---- 5. GAE recursion vs the quadratic-time sum ------------------------------

Outcome criterion_5() {
    RngStream rng(17, 5);
    RngStream vrng(18, 5);
    const ValueParams val = ValueParams::init(4, {6}, vrng);
    double worst = 0.0;
    auto make_episode = [&](int len) {
        RolloutBatch b;
        for (int t = 0; t < len; ++t) {
            StateVector x(4), xn(4);
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            for (double& v : xn) v = rng.uniform(-1.0, 1.0);
            SysAction a;
            a.add(0);
            b.x.push_back(std::move(x));
            b.x_next.push_back(std::move(xn));
            b.action.push_back({1.0});
            b.action_indices.push_back(a);
            b.log_pi_old.push_back(-1.0);
            b.reward.push_back(rng.uniform(-1.0, 1.0));
            b.episode_start.push_back(t == 0 ? 1 : 0);
            b.terminal.push_back(t + 1 == len ? 1 : 0);
        }
        return b;
    };

    PpoConfig cfg; // gamma 0.99, lambda 0.95
    for (int trial = 0; trial < 1000; ++trial) {
        const int len = 1 + static_cast<int>(rng.index(20));
        RolloutBatch b = make_episode(len);
        compute_gae(b, val, cfg);
        for (int t = 0; t < len; ++t) {
            double sum = 0.0, w = 1.0;
            for (int l = 0; t + l < len; ++l) {
                const double v_next =
                    b.terminal[t + l] ? 0.0 : state_value(val, b.x_next[t + l]);
                const double delta =
                    b.reward[t + l] + cfg.gamma * v_next - state_value(val, b.x[t + l]);
                sum += w * delta;
                w *= cfg.gamma * cfg.lambda;
            }
            worst = std::max(worst, std::abs(b.advantage[t] - sum));
        }
    }

    // edge cases must be exact
    bool edges = true;
    {
        RolloutBatch b = make_episode(12);
        PpoConfig c0 = cfg;
        c0.lambda = 0.0;
        compute_gae(b, val, c0);
        for (int t = 0; t < 12; ++t) {
            const double v_next = b.terminal[t] ? 0.0 : state_value(val, b.x_next[t]);
            const double delta = b.reward[t] + c0.gamma * v_next - state_value(val, b.x[t]);
            edges = edges && b.advantage[t] == delta;
        }
        ValueParams zero_val;
        zero_val.spec = MlpSpec{{4, 1}};
        zero_val.params.assign(zero_val.spec.param_count(), 0.0);
        PpoConfig c1 = cfg;
        c1.gamma = 1.0;
        c1.lambda = 1.0;
        compute_gae(b, zero_val, c1);
        for (int t = 0; t < 12; ++t) {
            edges = edges && b.advantage[t] == b.ret[t];
        }
    }
    std::ostringstream os;
    os << "1000 episodes, worst recursion-vs-sum gap " << worst
       << (edges ? ", edge cases exact" : ", EDGE CASES INEXACT");
    return {worst <= 1e-10 && edges, os.str()};
}

// ---- 6. flattened bottleneck config is metric-identical to the ablation ----

Outcome criterion_6() {
    const std::string corpus = acceptance_corpus(6, 200);
    TrainConfig base;
    base.corpus_path = corpus;
    base.iterations = 20;
    base.sessions_per_iteration = 8;
    base.eval_every = 10;
    base.eval_sessions = 40;
    base.bc_epochs = 20;

    for (std::uint64_t seed : {0ull, 1ull}) {
        TrainConfig flat = base;
        flat.seed = seed;
        flat.variant = TrainVariant::vrb;
        flat.vrb.phi = 0.0;
        flat.vrb.encoder_noise = false;
        const TrainResult a = train(flat);

        TrainConfig airl = base;
        airl.seed = seed;
        airl.variant = TrainVariant::airl;
        const TrainResult b = train(airl);

        if (report_csv_text(a.report) != report_csv_text(b.report) ||
            eval_csv_text(a.report) != eval_csv_text(b.report) ||
            a.checkpoint.policy.params != b.checkpoint.policy.params) {
            return {false, "seed " + std::to_string(seed) + " diverged between variants"};
        }
    }
    return {true, "2 seeds, reports and checkpoints byte-identical"};
}

// ---- 7. bottleneck pressure orders the policy KL -----------------------------

Outcome criterion_7() {
    // fixed batch: expert transitions vs random-policy rollouts
    auto env = EnvBundle::toy();
    RngStream crng(19, 7);
    const std::vector<Session> corpus =
        generate_corpus(env->schema(), env->db(), env->vocab(), 16, crng);
    const StateLayout layout(env->vocab());
    RngStream prng(20, 7);
    const PolicyParams random_pol =
        PolicyParams::init(layout.total(), env->vocab().sys_size(), {64, 64}, prng);
    const CollectedRollouts rollouts = collect_training_rollouts(*env, random_pol, 8, 21, 0);

    EstimatorBatch batch;
    const int act_dim = env->vocab().sys_size();
    RngStream pick(22, 7);
    for (int i = 0; i < 32; ++i) {
        const Session& s = corpus[pick.index(corpus.size())];
        const Turn& t = s.turns[pick.index(s.turns.size())];
        batch.expert.x.push_back(t.state_before);
        batch.expert.x_next.push_back(t.state_after);
        std::vector<double> mh(act_dim);
        env->vocab().encode_multihot(t.sys, mh);
        batch.expert.action.push_back(std::move(mh));
        batch.expert.log_pi.push_back(-1.0);

        const std::size_t j = pick.index(rollouts.batch.size());
        batch.policy.x.push_back(rollouts.batch.x[j]);
        batch.policy.x_next.push_back(rollouts.batch.x_next[j]);
        batch.policy.action.push_back(rollouts.batch.action[j]);
        batch.policy.log_pi.push_back(rollouts.batch.log_pi_old[j]);
    }

    const std::vector<double> phis = {0.0, 0.01, 1.0};
    std::vector<double> medians;
    for (double phi : phis) {
        std::vector<double> finals;
        for (int seed = 0; seed < 5; ++seed) {
            RngStream mrng(30 + seed, 7);
            EstimatorModel model;
            model.enc = EncoderParams::init(layout.total(), act_dim, 16, 64, mrng);
            model.heads = RewardHeads::init(16, 32, mrng);
            EstimatorOptimizer opt = EstimatorOptimizer::make(model, 1e-3);
            VrbConfig cfg;
            cfg.phi = phi;
            RngStream noise_rng(40 + seed, 7);
            EstimatorDiagnostics diag;
            for (int step = 0; step < 500; ++step) {
                diag = update_estimator(opt, model, batch, cfg, noise_rng, false,
                                        ExecMode::parallel);
            }
            finals.push_back(diag.mean_policy_kl);
        }
        medians.push_back(median_of(finals));
    }
    std::ostringstream os;
    os << "median policy KL by phi {0, 0.01, 1}: " << medians[0] << ", " << medians[1] << ", "
       << medians[2];
    return {medians[0] >= medians[1] && medians[1] >= medians[2], os.str()};
}

// ---- 8. end-to-end toy learning under the default configuration -------------

Outcome criterion_8() {
    TrainConfig cfg;
    // the defaults must carry the published hyperparameters
    if (cfg.vrb.phi != 0.001 || cfg.vrb.i_c != 0.5 || cfg.ppo.policy_lr != 0.0001 ||
        cfg.estimator_lr != 0.0001 || cfg.ppo.epsilon_clip != 0.02 ||
        cfg.ppo.lambda != 0.95 || cfg.iterations != 300 || cfg.sessions_per_iteration != 16) {
        return {false, "default configuration does not carry the published values"};
    }
    cfg.corpus_path = acceptance_corpus(8);
    cfg.eval_every = 50;
    cfg.eval_sessions = 100;

    const int n_seeds = 10;
    struct Run {
        TrainVariant variant;
        std::uint64_t seed;
        TrainReport report;
    };
    std::vector<Run> runs;
    for (TrainVariant v : {TrainVariant::vrb, TrainVariant::airl}) {
        for (int s = 0; s < n_seeds; ++s) {
            runs.push_back(Run{v, static_cast<std::uint64_t>(s), {}});
        }
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(2);
    for (int w = 0; w < 2; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < runs.size();
                     i = next.fetch_add(1)) {
                    TrainConfig rc = cfg;
                    rc.variant = runs[i].variant;
                    rc.seed = runs[i].seed;
                    runs[i].report = train(rc, nullptr, ExecMode::serial).report;
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : workers) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    // per-snapshot cross-seed medians
    const std::size_t n_snapshots = runs[0].report.evals.size();
    auto snapshot_median = [&](TrainVariant v, std::size_t snap, auto field) {
        std::vector<double> vals;
        for (const Run& r : runs) {
            if (r.variant == v) vals.push_back(field(r.report.evals[snap].metrics));
        }
        return median_of(vals);
    };
    double best_vrb = 0.0, best_airl = 0.0;
    bool reached = false;
    int reached_at = -1;
    for (std::size_t snap = 0; snap < n_snapshots; ++snap) {
        const double succ =
            snapshot_median(TrainVariant::vrb, snap,
                            [](const MetricsReport& m) { return m.success_rate; });
        const double match = snapshot_median(
            TrainVariant::vrb, snap, [](const MetricsReport& m) { return m.match_rate; });
        if (succ >= 0.85 && match >= 0.85 && !reached) {
            reached = true;
            reached_at = runs[0].report.evals[snap].iteration;
        }
        best_vrb = std::max(best_vrb, succ);
        best_airl = std::max(
            best_airl, snapshot_median(TrainVariant::airl, snap,
                                       [](const MetricsReport& m) { return m.success_rate; }));
    }

    // untrained policies stay at chance level
    auto env = EnvBundle::toy();
    const StateLayout layout(env->vocab());
    std::vector<double> untrained;
    for (int s = 0; s < n_seeds; ++s) {
        RngStream prng(cfg.seed + s, stream_key(0x01));
        Checkpoint ckpt;
        ckpt.schema_hash = env->hash();
        ckpt.policy = PolicyParams::init(layout.total(), env->vocab().sys_size(),
                                         cfg.policy_hidden, prng);
        untrained.push_back(
            evaluate_policy(ckpt, *env, 100, RngStream(900 + s, 8), cfg.ppo.act_threshold_max)
                .success_rate);
    }
    const double untrained_median = median_of(untrained);

    std::ostringstream os;
    os << "10-seed medians: best success " << best_vrb << (reached ? " (reached at iteration " :
       " (never reached 0.85; first snapshot ")
       << reached_at << "), airl best " << best_airl << ", untrained " << untrained_median;
    return {reached && best_vrb >= best_airl - 0.05 && untrained_median <= 0.1, os.str()};
}

// ---- 9. expert optimality and the hand-built metric fixtures ----------------

Outcome criterion_9() {
    auto env = EnvBundle::toy();
    RngStream rng(23, 9);
    const std::vector<Session> sessions =
        generate_corpus(env->schema(), env->db(), env->vocab(), 200, rng);
    const MetricsReport m = evaluate_sessions(sessions, env->vocab());
    if (m.success_rate != 1.0 || m.match_rate != 1.0 || m.inform_f1 != 1.0) {
        std::ostringstream os;
        os << "expert self-play success " << m.success_rate << " match " << m.match_rate
           << " f1 " << m.inform_f1;
        return {false, os.str()};
    }

    // hand fixtures on a two-value world
    DomainSchema s;
    DomainDef cafe;
    cafe.name = "cafe";
    cafe.informable = {{"drink", {"tea", "coffee"}}, {"area", {"north", "south"}}};
    cafe.requestable = {{"phone", {"p0", "p1"}}, {"wifi", {"w0", "w1"}}};
    s.domains = {cafe};
    Database db;
    auto add = [&](const char* id, int drink, int area, int phone, int wifi) {
        Entity e;
        e.id = id;
        e.domain = 0;
        e.informable_values = {drink, area};
        e.requestable_values = {phone, wifi};
        db.entities.push_back(e);
    };
    add("c0", 0, 0, 0, 1);
    add("c1", 1, 0, 1, 0);
    add("c2", 0, 1, 1, 1);
    db.index(s);
    const ActVocab vocab(s, db);

    auto session_of = [&](const UserGoal& goal,
                          std::vector<std::pair<std::vector<std::string>,
                                                std::vector<std::string>>> turns,
                          TerminalStatus t_u) {
        Session ses;
        ses.goal = goal;
        for (auto& [user, sys] : turns) {
            Turn t;
            for (const std::string& a : user) t.user.add(vocab.parse_user(a));
            for (const std::string& a : sys) t.sys.add(vocab.parse_sys(a));
            ses.turns.push_back(std::move(t));
        }
        ses.t_u = t_u;
        replay_session_states(vocab, ses);
        return ses;
    };
    UserGoal g1;
    g1.domains.resize(1);
    g1.domains[0].constraints = {{0, 0}};
    g1.domains[0].requests = {0};

    // perfect dialog
    const Session perfect = session_of(
        g1,
        {{{"inform_constraint(cafe,drink,tea)"}, {"book(cafe,c0)"}},
         {{"request(cafe,phone)"}, {"inform(cafe,phone,p0)"}},
         {{"bye"}, {"bye"}}},
        TerminalStatus::success);
    const MetricsReport mp = evaluate_sessions({perfect}, vocab);
    if (mp.success_rate != 1.0 || mp.inform_f1 != 1.0 || mp.match_rate != 1.0) {
        return {false, "perfect-session fixture did not score 1.0 everywhere"};
    }

    // F1 = 0.5: two requested slots, one correctly informed, one wrong token
    UserGoal g2 = g1;
    g2.domains[0].requests = {0, 1};
    const Session half = session_of(
        g2,
        {{{"inform_constraint(cafe,drink,tea)"}, {"book(cafe,c0)"}},
         {{"request(cafe,phone)"}, {"inform(cafe,phone,p0)", "inform(cafe,wifi,w0)"}},
         {{"bye"}, {"bye"}}},
        TerminalStatus::failure);
    const MetricsReport mh = evaluate_sessions({half}, vocab);
    if (mh.inform_precision != 0.5 || mh.inform_recall != 0.5 || mh.inform_f1 != 0.5) {
        std::ostringstream os;
        os << "F1 fixture scored P " << mh.inform_precision << " R " << mh.inform_recall
           << " F1 " << mh.inform_f1;
        return {false, os.str()};
    }

    // booking violates one goal constraint, informs match the booked entity
    UserGoal g3;
    g3.domains.resize(1);
    g3.domains[0].constraints = {{0, 0}, {1, 1}};
    g3.domains[0].requests = {0};
    const Session violated = session_of(
        g3,
        {{{"inform_constraint(cafe,drink,tea)"}, {"book(cafe,c0)"}},
         {{"request(cafe,phone)"}, {"inform(cafe,phone,p0)"}},
         {{"inform_constraint(cafe,area,south)"}, {"request(cafe,area)"}},
         {{"bye"}, {"bye"}}},
        TerminalStatus::failure);
    const MetricsReport mv = evaluate_sessions({violated}, vocab);
    if (mv.success_rate != 0.0 || mv.match_rate != 0.0 || mv.inform_f1 != 1.0) {
        std::ostringstream os;
        os << "booking-violation fixture scored success " << mv.success_rate << " match "
           << mv.match_rate << " f1 " << mv.inform_f1;
        return {false, os.str()};
    }

    return {true, "200-goal expert self-play all 1.0; three fixtures exact"};
}

// ---- 10. determinism and checkpoint resume ----------------------------------

Outcome criterion_10() {
    TrainConfig cfg;
    cfg.corpus_path = acceptance_corpus(10, 120);
    cfg.iterations = 10;
    cfg.sessions_per_iteration = 4;
    cfg.eval_every = 5;
    cfg.eval_sessions = 20;
    cfg.bc_epochs = 10;
    cfg.seed = 3;

    const TrainResult a = train(cfg);
    const TrainResult b = train(cfg);
    if (report_csv_text(a.report) != report_csv_text(b.report) ||
        eval_csv_text(a.report) != eval_csv_text(b.report)) {
        return {false, "identical (config, seed) produced different reports"};
    }

    TrainConfig head_cfg = cfg;
    head_cfg.iterations = 5;
    const TrainResult head = train(head_cfg);
    const TrainResult tail = train(cfg, &head.checkpoint);
    if (tail.checkpoint.policy.params != a.checkpoint.policy.params ||
        tail.checkpoint.value.params != a.checkpoint.value.params ||
        tail.checkpoint.estimator.enc.g_params != a.checkpoint.estimator.enc.g_params ||
        tail.checkpoint.estimator.heads.h_params != a.checkpoint.estimator.heads.h_params) {
        return {false, "resumed training diverged from the uninterrupted run"};
    }
    const std::string full_csv = report_csv_text(a.report);
    const std::string tail_csv = report_csv_text(tail.report);
    const std::string tail_rows = tail_csv.substr(tail_csv.find('\n') + 1);
    if (!full_csv.ends_with(tail_rows)) {
        return {false, "resumed report rows differ from the uninterrupted tail"};
    }
    return {true, "reports byte-identical; resume matches uninterrupted training"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {1, "gradient suite vs finite differences", 60.0, criterion_1},
    {2, "shaped reward / discriminator log-odds identity", 5.0, criterion_2},
    {3, "closed-form KL vs Monte-Carlo integration", 30.0, criterion_3},
    {4, "mutual-information bound", 30.0, criterion_4},
    {5, "advantage recursion vs quadratic-time sum", 10.0, criterion_5},
    {6, "flattened bottleneck equals the ablation variant", 300.0, criterion_6},
    {7, "bottleneck pressure orders the policy KL", 300.0, criterion_7},
    {8, "end-to-end toy learning at default configuration", 1800.0, criterion_8},
    {9, "expert optimality and metric fixtures", 10.0, criterion_9},
    {10, "determinism and checkpoint resume", 120.0, criterion_10},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    if (wanted.empty()) {
        for (const Criterion& c : kCriteria) wanted.push_back(c.id);
    }

    int passed = 0, total = 0;
    for (int id : wanted) {
        const Criterion* crit = nullptr;
        for (const Criterion& c : kCriteria) {
            if (c.id == id) crit = &c;
        }
        if (crit == nullptr) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        ++total;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = crit->run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds <= crit->budget_seconds;
        const bool ok = outcome.pass && in_budget;
        if (ok) ++passed;
        std::printf("[%s] criterion %d: %s: %s (%.1f s%s)\n", ok ? "PASS" : "FAIL", crit->id,
                    crit->name, outcome.details.c_str(), seconds,
                    in_budget ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("ACCEPTANCE: %d/%d criteria passed\n", passed, total);
    return passed == total ? 0 : 1;
}
