#include <doctest.h>

#include <sstream>

#include "caspr/error.hpp"
#include "caspr/trec_run.hpp"

using namespace caspr;

namespace {

RunList parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_run(in);
}

std::string emit_text(const RunList& run, const std::string& tag = "") {
    std::ostringstream out;
    emit_run(out, run, tag);
    return out.str();
}

}  // namespace

TEST_SUITE("trec_run") {
    TEST_CASE("parses a single well-formed line") {
        RunList run = parse_text("31_1 Q0 MARCO_955948 1 11.22 mytag\n");
        REQUIRE(run.qid_order == std::vector<std::string>{"31_1"});
        const RunEntry& e = run.entries("31_1")[0];
        CHECK(e.pid == "MARCO_955948");
        CHECK(e.rank == 1);
        CHECK(e.score == doctest::Approx(11.22));
        CHECK(e.score_text == "11.22");
        CHECK(e.tag == "mytag");
    }

    TEST_CASE("separator-tolerant parse, canonical emit") {
        RunList run = parse_text("q1\t Q0   p1 \t 1   2.5\trun\n");
        CHECK(emit_text(run) == "q1 Q0 p1 1 2.5 run\n");
    }

    TEST_CASE("round-trip preserves score text verbatim") {
        std::string canonical = "q1 Q0 p1 1 11.220000 tag\nq1 Q0 p2 2 3.000000 tag\nq2 Q0 p1 1 0.500000 tag\n";
        RunList run = parse_text(canonical);
        CHECK(emit_text(run) == canonical);
        // Odd spellings survive untouched.
        std::string odd = "q1 Q0 p1 1 1e3 tag\nq1 Q0 p2 2 999.9999999999 tag\n";
        CHECK(emit_text(parse_text(odd)) == odd);
    }

    TEST_CASE("parse-emit-parse is a fixpoint") {
        std::string text = "q2 Q0 a 1 4.25 t\nq1 Q0 b 1 9 t\nq2 Q0 b 2 4.25 t\n";
        RunList first = parse_text(text);
        RunList second = parse_text(emit_text(first));
        CHECK(second.qid_order == first.qid_order);
        CHECK(second.total_entries() == first.total_entries());
        CHECK(emit_text(second) == emit_text(first));
    }

    TEST_CASE("interleaved qids keep per-qid order") {
        RunList run = parse_text("q1 Q0 a 1 3 t\nq2 Q0 x 1 5 t\nq1 Q0 b 2 2 t\n");
        CHECK(run.qid_order == std::vector<std::string>{"q1", "q2"});
        CHECK(run.ranking("q1") == std::vector<std::string>{"a", "b"});
    }

    TEST_CASE("generated entries render scores with 6 decimals") {
        RunList run;
        run.qid_order = {"q1"};
        run.by_qid["q1"] = {{"q1", "p1", 1, 1.5, "", ""}};
        CHECK(emit_text(run, "tag") == "q1 Q0 p1 1 1.500000 tag\n");
    }

    TEST_CASE("empty run emits nothing") {
        CHECK(emit_text(RunList{}) == "");
    }

    TEST_CASE("malformed lines name the line number") {
        CHECK_THROWS_WITH_AS(parse_text("q1 Q0 p1 1 2.5 tag\nq1 Q0 p2 2\n"), doctest::Contains("line 2"),
                             Error);
        CHECK_THROWS_WITH_AS(parse_text("q1 Q0 p1 0 2.5 tag\n"), doctest::Contains("line 1"), Error);
        CHECK_THROWS_WITH_AS(parse_text("q1 Q0 p1 1 abc tag\n"), doctest::Contains("line 1"), Error);
    }

    TEST_CASE("invariant violations are rejected") {
        // Non-contiguous ranks.
        CHECK_THROWS_AS(parse_text("q1 Q0 p1 1 3 t\nq1 Q0 p2 3 2 t\n"), Error);
        // Duplicate pid within a qid.
        CHECK_THROWS_WITH_AS(parse_text("q1 Q0 p1 1 3 t\nq1 Q0 p1 2 2 t\n"), doctest::Contains("p1"), Error);
        // Score increases with rank.
        CHECK_THROWS_AS(parse_text("q1 Q0 p1 1 1 t\nq1 Q0 p2 2 2 t\n"), Error);
    }

    TEST_CASE("validate_run checks constructed lists") {
        RunList run;
        run.qid_order = {"q1"};
        run.by_qid["q1"] = {{"q1", "p1", 1, 2.0, "", "t"}, {"q1", "p2", 2, 1.0, "", "t"}};
        validate_run(run);
        run.by_qid["q1"][1].rank = 5;
        CHECK_THROWS_AS(validate_run(run), Error);
    }

    TEST_CASE("blank lines and CRLF are tolerated") {
        RunList run = parse_text("q1 Q0 p1 1 2.5 tag\r\n\nq1 Q0 p2 2 1.5 tag\r\n");
        CHECK(run.total_entries() == 2);
    }

    TEST_CASE("qrels parse with default grade zero") {
        std::istringstream in("102_5 0 CAR_xyz 2\n11_1 0 P01 1\n11_1 0 P02 0\n");
        Qrels qrels = parse_qrels(in);
        CHECK(qrels.size() == 3);
        CHECK(qrels.grade("102_5", "CAR_xyz") == 2);
        CHECK(qrels.grade("11_1", "P02") == 0);
        CHECK(qrels.grade("102_5", "absent") == 0);
        CHECK(qrels.grade("no_such_qid", "p") == 0);
        CHECK(qrels.qids() == std::vector<std::string>{"102_5", "11_1"});
    }

    TEST_CASE("duplicate qrels pairs warn and the last grade wins") {
        std::istringstream in("q1 0 p1 1\nq1 0 p1 3\n");
        std::vector<std::string> warnings;
        Qrels qrels = parse_qrels(in, [&](const std::string& w) { warnings.push_back(w); });
        CHECK(qrels.grade("q1", "p1") == 3);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("line 2") != std::string::npos);
    }

    TEST_CASE("qrels reject negative grades and short lines") {
        std::istringstream neg("q1 0 p1 -1\n");
        CHECK_THROWS_WITH_AS(parse_qrels(neg), doctest::Contains("line 1"), Error);
        std::istringstream shorty("q1 0 p1\n");
        CHECK_THROWS_AS(parse_qrels(shorty), Error);
    }

    TEST_CASE("fixture qrels load") {
        Qrels qrels = load_qrels(CASPR_FIXTURE_DIR "/qrels.txt");
        CHECK(qrels.size() == 23);
        CHECK(qrels.grade("11_3", "P05") == 2);
        CHECK(qrels.qids().size() == 10);
    }

    TEST_CASE("missing files error with the path") {
        CHECK_THROWS_WITH_AS(load_run("/no/such/run.txt"), doctest::Contains("/no/such/run.txt"), Error);
        CHECK_THROWS_AS(load_qrels("/no/such/qrels.txt"), Error);
    }
}
