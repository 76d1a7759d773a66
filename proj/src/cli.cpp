#include "vrb/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "vrb/errors.hpp"
#include "vrb/gradcheck.hpp"
#include "vrb/log.hpp"
#include "vrb/trainer.hpp"

namespace vrb::cli {

namespace {

constexpr std::uint64_t kKindCorpusGen = 0x21;
constexpr std::uint64_t kKindStandaloneEval = 0x22;

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Flag values gathered before they are folded into a TrainConfig; only flags
// the user actually passed override the config file.
struct CommonFlags {
    std::string config_path, out_dir, corpus_path, schema_path;
    std::uint64_t seed = 0;
    int iterations = 0, sessions = 0, seeds = 10;
    double phi = 0.0, ic = 0.0;
    bool adaptive_phi = false;
    std::string variant;
};

void add_train_flags(CLI::App* cmd, CommonFlags& f, bool with_variant, bool with_seeds) {
    cmd->add_option("--config", f.config_path, "configuration file (key = value lines)");
    cmd->add_option("--seed", f.seed, "experiment seed");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--corpus", f.corpus_path, "expert corpus file");
    cmd->add_option("--schema", f.schema_path, "schema/database file (default: built-in)");
    cmd->add_option("--iterations", f.iterations, "training iterations");
    cmd->add_option("--sessions", f.sessions, "sessions per iteration");
    cmd->add_option("--phi", f.phi, "bottleneck multiplier");
    cmd->add_option("--ic", f.ic, "mutual-information bound");
    cmd->add_option("--adaptive-phi", f.adaptive_phi, "dual-ascent phi updates");
    if (with_variant) {
        cmd->add_option("--variant", f.variant, "objective variant")
            ->check(CLI::IsMember({"vrb", "airl"}));
    }
    if (with_seeds) cmd->add_option("--seeds", f.seeds, "number of seeds");
}

bool flag_given(const CLI::App* cmd, const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

TrainConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
    TrainConfig cfg;
    if (!f.config_path.empty()) cfg = TrainConfig::from_file(f.config_path);
    if (flag_given(cmd, "--seed")) cfg.seed = f.seed;
    if (flag_given(cmd, "--out")) cfg.out_dir = f.out_dir;
    if (flag_given(cmd, "--corpus")) cfg.corpus_path = f.corpus_path;
    if (flag_given(cmd, "--schema")) cfg.schema_path = f.schema_path;
    if (flag_given(cmd, "--iterations")) cfg.iterations = f.iterations;
    if (flag_given(cmd, "--sessions")) cfg.sessions_per_iteration = f.sessions;
    if (flag_given(cmd, "--phi")) cfg.vrb.phi = f.phi;
    if (flag_given(cmd, "--ic")) cfg.vrb.i_c = f.ic;
    if (flag_given(cmd, "--adaptive-phi")) cfg.vrb.adaptive_phi = f.adaptive_phi;
    if (flag_given(cmd, "--variant")) cfg.variant = variant_from_name(f.variant);
    cfg.validate();
    return cfg;
}

int cmd_gen_corpus(const CLI::App* cmd, const CommonFlags& f) {
    if (f.corpus_path.empty()) throw UsageError("gen-corpus needs --corpus OUTPUT_PATH");
    const int n = flag_given(cmd, "--sessions") ? f.sessions : 500;
    if (n < 1) throw UsageError("--sessions must be >= 1");

    std::unique_ptr<EnvBundle> env =
        f.schema_path.empty() ? EnvBundle::toy() : EnvBundle::from_file(f.schema_path);
    RngStream rng(f.seed, stream_key(kKindCorpusGen));
    const std::vector<Session> sessions =
        generate_corpus(env->schema(), env->db(), env->vocab(), n, rng, env->env_config());
    save_corpus(sessions, env->vocab(), f.corpus_path);
    const MetricsReport m = evaluate_sessions(sessions, env->vocab());
    std::printf("cmd=gen-corpus ok=1 corpus=%s sessions=%d avg_turns=%s success=%s\n",
                f.corpus_path.c_str(), n, fmt_real(m.avg_turns).c_str(),
                fmt_real(m.success_rate).c_str());
    return 0;
}

int cmd_train(const CLI::App* cmd, const CommonFlags& f) {
    TrainConfig cfg = build_config(cmd, f);
    if (cfg.out_dir.empty()) throw UsageError("train needs --out DIR (or train.out in the config)");
    if (cfg.corpus_path.empty()) {
        throw UsageError("train needs --corpus PATH (or train.corpus in the config)");
    }
    TrainResult res = train(cfg);
    const MetricsReport* final_metrics = res.report.final_eval();
    std::printf("cmd=train ok=1 out=%s iterations=%d final_success=%s final_match=%s "
                "final_inform_f1=%s final_turns=%s\n",
                cfg.out_dir.c_str(), cfg.iterations,
                fmt_real(final_metrics->success_rate).c_str(),
                fmt_real(final_metrics->match_rate).c_str(),
                fmt_real(final_metrics->inform_f1).c_str(),
                fmt_real(final_metrics->avg_turns).c_str());
    return 0;
}

int cmd_eval(const CLI::App* cmd, const CommonFlags& f) {
    if (f.out_dir.empty()) throw UsageError("eval needs --out DIR (a finished training run)");
    const std::string ckpt_path = f.out_dir + "/checkpoint.vrbc";
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    std::unique_ptr<EnvBundle> env =
        f.schema_path.empty() ? EnvBundle::toy() : EnvBundle::from_file(f.schema_path);
    const int n = flag_given(cmd, "--sessions") ? f.sessions : 100;
    if (n < 1) throw UsageError("--sessions must be >= 1");
    TrainConfig defaults;
    RngStream rng(f.seed, stream_key(kKindStandaloneEval));
    const MetricsReport m =
        evaluate_policy(ckpt, *env, n, rng, defaults.ppo.act_threshold_max);
    std::printf("cmd=eval ok=1 out=%s sessions=%d success=%s match=%s inform_f1=%s "
                "inform_precision=%s inform_recall=%s avg_turns=%s\n",
                f.out_dir.c_str(), n, fmt_real(m.success_rate).c_str(),
                fmt_real(m.match_rate).c_str(), fmt_real(m.inform_f1).c_str(),
                fmt_real(m.inform_precision).c_str(), fmt_real(m.inform_recall).c_str(),
                fmt_real(m.avg_turns).c_str());
    return 0;
}

int cmd_ablate(const CLI::App* cmd, const CommonFlags& f) {
    TrainConfig cfg = build_config(cmd, f);
    if (cfg.out_dir.empty()) throw UsageError("ablate needs --out DIR");
    if (cfg.corpus_path.empty()) throw UsageError("ablate needs --corpus PATH");
    if (f.seeds < 1) throw UsageError("--seeds must be >= 1");
    const std::vector<AblationRow> rows = ablation_compare(cfg, f.seeds);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/ablation.csv";
    write_ablation_csv(rows, path);
    std::printf("cmd=ablate ok=1 out=%s seeds=%d vrb_success=%s airl_success=%s\n",
                path.c_str(), f.seeds, fmt_real(rows[0].success.median).c_str(),
                fmt_real(rows[1].success.median).c_str());
    return 0;
}

int cmd_gradcheck(const CLI::App*, const CommonFlags& f) {
    const GradCheckReport rep = run_gradcheck(f.seed);
    for (const GradCheckFamily& fam : rep.families) {
        std::fprintf(stderr, "%-14s %3d instances  max rel err %g\n", fam.name.c_str(),
                     fam.instances, fam.max_rel_err);
    }
    std::printf("cmd=gradcheck ok=%d instances=%d max_rel_err=%s\n", rep.passed() ? 1 : 0,
                rep.instances, fmt_real(rep.max_rel_err).c_str());
    return rep.passed() ? 0 : 1;
}

// Renders run CSVs into per-metric x/y series files for external plotting.
int cmd_report(const CLI::App*, const CommonFlags& f) {
    if (f.out_dir.empty()) throw UsageError("report needs --out DIR (a finished training run)");
    const std::string plots = f.out_dir + "/plots";
    std::filesystem::create_directories(plots);

    int series_count = 0;
    auto render = [&](const std::string& csv_path, const std::string& prefix) {
        std::ifstream in(csv_path, std::ios::binary);
        if (!in) throw IoError("cannot open " + csv_path + "; run train with --out first");
        std::string header;
        if (!std::getline(in, header)) throw IoError("empty csv: " + csv_path);
        std::vector<std::string> cols;
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        std::vector<std::vector<std::string>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            rows.push_back(std::move(cells));
        }
        for (std::size_t c = 1; c < cols.size(); ++c) {
            std::ofstream out(plots + "/" + prefix + cols[c] + ".csv", std::ios::binary);
            out << cols[0] << ',' << cols[c] << '\n';
            for (const auto& r : rows) {
                if (c < r.size()) out << r[0] << ',' << r[c] << '\n';
            }
            ++series_count;
        }
    };
    render(f.out_dir + "/report.csv", "train_");
    render(f.out_dir + "/eval.csv", "eval_");
    std::printf("cmd=report ok=1 plots=%s series=%d\n", plots.c_str(), series_count);
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& argv) {
    CLI::App app{"variational-bottleneck reward learning for task-oriented dialog", "vrb"};
    app.require_subcommand(1);

    CommonFlags f;
    CLI::App* gen = app.add_subcommand("gen-corpus", "generate an expert dialog corpus");
    gen->add_option("--schema", f.schema_path, "schema/database file (default: built-in)");
    gen->add_option("--corpus", f.corpus_path, "output corpus file");
    gen->add_option("--sessions", f.sessions, "number of sessions (default 500)");
    gen->add_option("--seed", f.seed, "generation seed");

    CLI::App* tr = app.add_subcommand("train", "train a dialog policy with a learned reward");
    add_train_flags(tr, f, /*with_variant=*/true, /*with_seeds=*/false);

    CLI::App* ev = app.add_subcommand("eval", "evaluate a trained checkpoint");
    ev->add_option("--out", f.out_dir, "training run directory (reads checkpoint.vrbc)");
    ev->add_option("--schema", f.schema_path, "schema/database file (default: built-in)");
    ev->add_option("--sessions", f.sessions, "evaluation sessions (default 100)");
    ev->add_option("--seed", f.seed, "evaluation seed");

    CLI::App* ab = app.add_subcommand("ablate", "compare objectives over a seed set");
    add_train_flags(ab, f, /*with_variant=*/false, /*with_seeds=*/true);

    CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    gc->add_option("--seed", f.seed, "audit seed");

    CLI::App* rp = app.add_subcommand("report", "render run CSVs into plot-data series");
    rp->add_option("--out", f.out_dir, "training run directory");

    std::vector<std::string> args(argv.begin() + 1, argv.end());
    std::reverse(args.begin(), args.end()); // CLI11 parses back to front
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        (void)app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_corpus(gen, f);
        if (tr->parsed()) return cmd_train(tr, f);
        if (ev->parsed()) return cmd_eval(ev, f);
        if (ab->parsed()) return cmd_ablate(ab, f);
        if (gc->parsed()) return cmd_gradcheck(gc, f);
        if (rp->parsed()) return cmd_report(rp, f);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace vrb::cli
