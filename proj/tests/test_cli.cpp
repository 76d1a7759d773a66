#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vrb/cli.hpp"
#include "vrb/trainer.hpp"

using namespace vrb;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int run(std::initializer_list<std::string> args) {
    std::vector<std::string> argv = {"vrb"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli::run_command(argv);
}

const std::string& cli_config() {
    static const std::string path = [] {
        const std::string p = "/tmp/vrb_cli.cfg";
        std::ofstream out(p);
        out << "train.iterations = 3\n"
               "train.sessions_per_iteration = 2\n"
               "train.eval_every = 3\n"
               "train.eval_sessions = 4\n"
               "net.policy_hidden = 16,16\n"
               "net.value_hidden = 16,16\n"
               "net.encoder_hidden = 16\n"
               "net.head_hidden = 8\n"
               "net.d_z = 4\nbc.epochs = 2\n";
        return p;
    }();
    return path;
}

} // namespace

TEST_SUITE("cli") {
    TEST_CASE("unknown subcommands and flags exit with usage status 2") {
        CHECK(run({"trian"}) == 2);
        CHECK(run({}) == 2);
        CHECK(run({"train", "--wat", "1"}) == 2);
        CHECK(run({"eval"}) == 2);     // missing --out
        CHECK(run({"gen-corpus"}) == 2); // missing --corpus
    }

    TEST_CASE("gen-corpus is deterministic and eval/train consume it") {
        const std::string c1 = "/tmp/vrb_cli_corpus1.jsonl";
        const std::string c2 = "/tmp/vrb_cli_corpus2.jsonl";
        CHECK(run({"gen-corpus", "--corpus", c1, "--sessions", "25", "--seed", "5"}) == 0);
        CHECK(run({"gen-corpus", "--corpus", c2, "--sessions", "25", "--seed", "5"}) == 0);
        CHECK(slurp(c1) == slurp(c2));

        const std::string out1 = "/tmp/vrb_cli_run1";
        const std::string out2 = "/tmp/vrb_cli_run2";
        std::filesystem::remove_all(out1);
        std::filesystem::remove_all(out2);
        CHECK(run({"train", "--config", cli_config(), "--corpus", c1, "--out", out1,
                   "--seed", "3"}) == 0);
        CHECK(run({"train", "--config", cli_config(), "--corpus", c1, "--out", out2,
                   "--seed", "3"}) == 0);
        CHECK(slurp(out1 + "/report.csv") == slurp(out2 + "/report.csv"));
        CHECK(slurp(out1 + "/eval.csv") == slurp(out2 + "/eval.csv"));
        CHECK(slurp(out1 + "/checkpoint.vrbc") == slurp(out2 + "/checkpoint.vrbc"));

        CHECK(run({"eval", "--out", out1, "--sessions", "6", "--seed", "1"}) == 0);
        CHECK(run({"report", "--out", out1}) == 0);
        CHECK(std::filesystem::exists(out1 + "/plots/eval_success_rate.csv"));
        CHECK(std::filesystem::exists(out1 + "/plots/train_mean_policy_kl.csv"));
        const std::string series = slurp(out1 + "/plots/eval_success_rate.csv");
        CHECK(series.starts_with("iteration,success_rate\n"));
    }

    TEST_CASE("missing files produce runtime errors naming the path") {
        CHECK(run({"train", "--config", cli_config(), "--corpus", "/tmp/nope.jsonl", "--out",
                   "/tmp/vrb_cli_ghost"}) == 1);
        CHECK(run({"eval", "--out", "/tmp/vrb_cli_ghost_dir"}) == 1);
        CHECK(run({"report", "--out", "/tmp/vrb_cli_ghost_dir"}) == 1);
    }

    TEST_CASE("ablate writes the two-variant comparison table") {
        const std::string corpus = "/tmp/vrb_cli_corpus1.jsonl";
        const std::string out = "/tmp/vrb_cli_ablate";
        std::filesystem::remove_all(out);
        CHECK(run({"ablate", "--config", cli_config(), "--corpus", corpus, "--out", out,
                   "--seeds", "2", "--iterations", "2"}) == 0);
        const std::string table = slurp(out + "/ablation.csv");
        CHECK(std::count(table.begin(), table.end(), '\n') == 3);
        CHECK(table.find("vrb,") != std::string::npos);
        CHECK(table.find("airl,") != std::string::npos);
    }

    TEST_CASE("flag overrides beat config file values") {
        const std::string corpus = "/tmp/vrb_cli_corpus1.jsonl";
        const std::string out = "/tmp/vrb_cli_override";
        std::filesystem::remove_all(out);
        CHECK(run({"train", "--config", cli_config(), "--corpus", corpus, "--out", out,
                   "--iterations", "2", "--phi", "0.25"}) == 0);
        const std::string report = slurp(out + "/report.csv");
        // two data rows
        CHECK(std::count(report.begin(), report.end(), '\n') == 3);
        CHECK(report.find(",0.25,") != std::string::npos);
    }
}
