// Drives the installed binary end to end through a shell; each case checks
// exit codes and output files rather than library calls.

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "caspr/trec_run.hpp"

using namespace caspr;

namespace {

std::string fixture(const char* name) {
    return std::string(CASPR_FIXTURE_DIR) + "/" + name;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the binary through the shell, capturing stdout and stderr.
CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    std::string out_path = temp_path("caspr_cli_out_" + std::to_string(counter));
    std::string err_path = temp_path("caspr_cli_err_" + std::to_string(counter));
    ++counter;

    std::string command = env_prefix + (env_prefix.empty() ? "" : " ") + CASPR_CLI_PATH + " " + args + " > " +
                          out_path + " 2> " + err_path;
    int status = std::system(command.c_str());

    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return result;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("help exits zero, usage errors exit two, runtime errors exit one") {
        CHECK(run_cli("--help").exit_code == 0);
        CHECK(run_cli("search --help").exit_code == 0);
        CHECK(run_cli("").exit_code == 2);                      // missing subcommand
        CHECK(run_cli("search").exit_code == 2);                // missing positional
        CHECK(run_cli("eval run.txt --no-such-flag").exit_code == 2);

        CmdResult r = run_cli("eval " + temp_path("caspr_no_such_run.txt") + " -q " + fixture("qrels.txt"));
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("error:") != std::string::npos);
    }

    TEST_CASE("kernels lists the active variant and honors the override") {
        CmdResult r = run_cli("kernels");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("scalar") != std::string::npos);
        CHECK(r.out.find("(active)") != std::string::npos);

        r = run_cli("kernels", "CASPR_KERNEL=scalar");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("scalar (active)") != std::string::npos);
    }

    TEST_CASE("index and search round-trip matches searching the corpus directly") {
        std::string snapshot = temp_path("caspr_cli_index.bin");
        CmdResult r = run_cli("index " + fixture("corpus.tsv") + " -o " + snapshot);
        REQUIRE(r.exit_code == 0);
        CHECK(r.err.find("indexed 50 passages") != std::string::npos);

        CmdResult from_corpus = run_cli("search \"honey bees\" -c " + fixture("corpus.tsv") + " --qid q1");
        CmdResult from_snapshot = run_cli("search \"honey bees\" -i " + snapshot + " --qid q1");
        REQUIRE(from_corpus.exit_code == 0);
        REQUIRE(from_snapshot.exit_code == 0);
        CHECK(from_corpus.out == from_snapshot.out);
        CHECK(from_corpus.out.rfind("q1 Q0 ", 0) == 0);

        std::istringstream run_text(from_corpus.out);
        RunList run = parse_run(run_text);
        CHECK(run.total_entries() > 0);
        std::remove(snapshot.c_str());
    }

    TEST_CASE("search requires exactly one corpus source") {
        CHECK(run_cli("search query").exit_code == 1);  // neither given
        // Both given is rejected while parsing via excludes().
        CHECK(run_cli("search query -c a.tsv -i b.bin").exit_code == 2);
    }

    TEST_CASE("resolve emits qid and text, one turn per line") {
        CmdResult r = run_cli("resolve " + fixture("conversations.json") + " -r null");
        REQUIRE(r.exit_code == 0);
        std::istringstream lines(r.out);
        std::string line;
        REQUIRE(std::getline(lines, line));
        CHECK(line == "11_1\tWhat do honey bees collect from flowers?");
        size_t count = 1;
        while (std::getline(lines, line))
            ++count;
        CHECK(count == 10);

        CHECK(run_cli("resolve " + fixture("conversations.json") + " -r heuristic").exit_code == 1);
        CHECK(run_cli("resolve " + fixture("conversations.json") + " -r heuristic -c " + fixture("corpus.tsv"))
                  .exit_code == 0);
    }

    TEST_CASE("eval scores an ideal run at one across the board") {
        // Rank every judged pid by descending grade: ideal for every metric.
        Qrels qrels = load_qrels(fixture("qrels.txt"));
        RunList ideal;
        for (const std::string& qid : qrels.qids()) {
            std::vector<std::pair<int, std::string>> by_grade;
            for (const auto& [pid, grade] : qrels.for_qid(qid))
                by_grade.emplace_back(-grade, pid);
            std::sort(by_grade.begin(), by_grade.end());
            ideal.qid_order.push_back(qid);
            auto& entries = ideal.by_qid[qid];
            for (size_t i = 0; i < by_grade.size(); ++i)
                entries.push_back({qid, by_grade[i].second, static_cast<uint32_t>(i) + 1,
                                   100.0 - static_cast<double>(i), "", "ideal"});
        }
        std::string run_path = temp_path("caspr_cli_ideal_run.txt");
        save_run(run_path, ideal);

        CmdResult r = run_cli("eval " + run_path + " -q " + fixture("qrels.txt"));
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.find("metric\tqid\tvalue") != std::string::npos);
        CHECK(r.out.find("ndcg@3\tall\t1.000000") != std::string::npos);
        CHECK(r.out.find("map\tall\t1.000000") != std::string::npos);
        CHECK(r.out.find("mrr\tall\t1.000000") != std::string::npos);
        CHECK(r.out.find("recall@100\tall\t1.000000") != std::string::npos);
        std::remove(run_path.c_str());
    }

    TEST_CASE("rerank fuses score files over an initial run") {
        std::string initial_path = temp_path("caspr_cli_initial_run.txt");
        CmdResult setup = run_cli("pipeline -c " + fixture("corpus.tsv") + " -C " + fixture("conversations.json") +
                                  " --quiet -o " + initial_path);
        REQUIRE(setup.exit_code == 0);

        CmdResult r = run_cli("rerank " + initial_path + " --rerank-scores " + fixture("rerank_scores.tsv") +
                              " --rc-scores " + fixture("rc_scores.tsv") + " -w 0.7 -t fused");
        REQUIRE(r.exit_code == 0);
        std::istringstream run_text(r.out);
        RunList fused = parse_run(run_text);
        CHECK(fused.qid_order.size() == 10);
        CHECK(fused.entries("11_1")[0].tag == "fused");

        CHECK(run_cli("rerank " + initial_path + " --rerank-scores " + fixture("rerank_scores.tsv") +
                      " --rc-scores " + fixture("rc_scores.tsv") + " --missing-score bogus")
                  .exit_code == 1);
        std::remove(initial_path.c_str());
    }

    TEST_CASE("tune prints the grid and a final best line") {
        std::string initial_path = temp_path("caspr_cli_tune_run.txt");
        CmdResult setup = run_cli("pipeline -c " + fixture("corpus.tsv") + " -C " + fixture("conversations.json") +
                                  " --quiet -o " + initial_path);
        REQUIRE(setup.exit_code == 0);

        CmdResult r = run_cli("tune " + initial_path + " --rerank-scores " + fixture("rerank_scores.tsv") +
                              " --rc-scores " + fixture("rc_scores.tsv") + " -q " + fixture("qrels.txt") +
                              " -m ndcg@3 --step 0.25");
        REQUIRE(r.exit_code == 0);
        std::istringstream lines(r.out);
        std::string line, last;
        size_t count = 0;
        while (std::getline(lines, line)) {
            ++count;
            last = line;
        }
        CHECK(count == 6);  // 0.00 .. 1.00 plus the best line
        CHECK(last.rfind("best\t", 0) == 0);
        std::remove(initial_path.c_str());
    }

    TEST_CASE("analyze and sweep consume three runs") {
        std::string original = temp_path("caspr_cli_run_original.txt");
        std::string resolved = temp_path("caspr_cli_run_resolved.txt");
        std::string human = temp_path("caspr_cli_run_human.txt");
        std::string base = "pipeline -c " + fixture("corpus.tsv") + " -C " + fixture("conversations.json") +
                           " --quiet -o ";
        REQUIRE(run_cli(base + original + " -r null").exit_code == 0);
        REQUIRE(run_cli(base + resolved + " -r oracle").exit_code == 0);
        REQUIRE(run_cli(base + human + " -r manual").exit_code == 0);

        std::string inputs = original + " " + resolved + " " + human + " -q " + fixture("qrels.txt") +
                             " -m ndcg@3 --missing-as-zero";
        CmdResult r = run_cli("analyze " + inputs + " -t 0.5 --format csv");
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.rfind("threshold,pattern_ooo", 0) == 0);
        CHECK(r.out.find("\n0.5,") != std::string::npos);

        r = run_cli("analyze " + inputs + " -t 0.5 --format table");
        REQUIRE(r.exit_code == 0);
        CHECK(r.out.find("queries)") != std::string::npos);
        CHECK(r.out.find("query_resolution_error") != std::string::npos);

        r = run_cli("sweep " + inputs);
        REQUIRE(r.exit_code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 52);  // header + 51 thresholds

        r = run_cli("sweep " + inputs + " --step 0.5");
        REQUIRE(r.exit_code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);  // header + t in {0, 0.5, 1}
    }

    TEST_CASE("pipeline reads a declarative config file") {
        std::string config_path = temp_path("caspr_cli_pipeline.cfg");
        {
            std::ofstream cfg(config_path, std::ios::binary);
            cfg << "corpus=" << fixture("corpus.tsv") << "\n";
            cfg << "conversations=" << fixture("conversations.json") << "\n";
            cfg << "resolver=oracle\n";
            cfg << "rerank=true\n";
            cfg << "weight=0.7\n";
            cfg << "rerank-scores=" << fixture("rerank_scores.tsv") << "\n";
            cfg << "rc-scores=" << fixture("rc_scores.tsv") << "\n";
            cfg << "tag=cfg\n";
            cfg << "quiet=true\n";
        }

        CmdResult r = run_cli("pipeline --config " + config_path);
        REQUIRE(r.exit_code == 0);
        std::istringstream run_text(r.out);
        RunList run = parse_run(run_text);
        CHECK(run.qid_order.size() == 10);
        CHECK(run.entries("11_1")[0].tag == "cfg");
        std::remove(config_path.c_str());
    }

    TEST_CASE("analyze without missing-as-zero names the absent qids") {
        // A run that skips a judged qid must be called out by qid.
        Qrels qrels = load_qrels(fixture("qrels.txt"));
        RunList partial;
        partial.qid_order.push_back("11_1");
        partial.by_qid["11_1"].push_back({"11_1", "P01", 1, 1.0, "", "t"});
        std::string path = temp_path("caspr_cli_partial_run.txt");
        save_run(path, partial);

        CmdResult r = run_cli("analyze " + path + " " + path + " " + path + " -q " + fixture("qrels.txt") +
                              " -t 0.5 --format csv");
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("missing judged qids") != std::string::npos);
        CHECK(r.err.find("12_1") != std::string::npos);
        std::remove(path.c_str());
    }
}
