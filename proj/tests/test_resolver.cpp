#include <doctest.h>

#include <set>

#include "caspr/error.hpp"
#include "caspr/inverted_index.hpp"
#include "caspr/resolver.hpp"
#include "caspr/tokenizer.hpp"

using namespace caspr;

namespace {

HistoryContext make_history(std::vector<std::vector<std::string>> query_terms,
                            std::vector<std::string> response_terms = {}) {
    HistoryContext ctx;
    for (auto& terms : query_terms)
        ctx.entries.push_back({HistorySource::PreviousQuery, std::move(terms)});
    if (!response_terms.empty())
        ctx.entries.push_back({HistorySource::PreviousResponse, std::move(response_terms)});
    return ctx;
}

Turn make_turn(int number, const std::string& raw) {
    Turn t;
    t.turn_number = number;
    t.raw_query = raw;
    return t;
}

// Marks every history term relevant; exercises the append mechanics alone.
struct AllRelevant final : TermClassifier {
    std::vector<bool> classify(const HistoryContext& history,
                               const std::vector<std::string>&) const override {
        return std::vector<bool>(history.flat_terms().size(), true);
    }
};

}  // namespace

TEST_SUITE("resolver") {
    TEST_CASE("null classifier marks nothing and is the identity") {
        HistoryContext ctx = make_history({{"social", "security"}});
        auto verdicts = NullTermClassifier().classify(ctx, {"how"});
        CHECK(verdicts == std::vector<bool>{false, false});

        Turn turn = make_turn(2, "How much is owed?");
        ResolvedQuery rq = resolve_query(turn, ctx, NullTermClassifier());
        CHECK(rq.appended_terms.empty());
        CHECK(rq.render() == "How much is owed?");
    }

    TEST_CASE("oracle marks history terms in the rewrite but not the query") {
        HistoryContext ctx = make_history({{"tell", "me", "about", "social", "security"}});
        OracleTermClassifier oracle("How much money is owed to social security?");
        auto pairs = classify_terms(ctx, tokenize("How much is owed?"), oracle);
        std::set<std::string> relevant;
        for (const auto& [term, verdict] : pairs)
            if (verdict)
                relevant.insert(term);
        CHECK(relevant == std::set<std::string>{"social", "security"});
        // "owed" is in the rewrite but also in the query: not relevant.
        for (const auto& [term, verdict] : pairs)
            if (term == "owed")
                CHECK_FALSE(verdict);
    }

    TEST_CASE("resolution appends in first-occurrence order, case-folded") {
        Turn turn = make_turn(2, "How much is owed?");
        HistoryContext ctx =
            make_history({{"the", "program"}, {"social", "security", "program"}}, {"social", "benefits"});
        OracleTermClassifier oracle("how much is owed program social security benefits");
        ResolvedQuery rq = resolve_query(turn, ctx, oracle);
        CHECK(rq.appended_terms == std::vector<std::string>{"program", "social", "security", "benefits"});
        CHECK(rq.render() == "How much is owed? program social security benefits");
        CHECK(rq.original_text == "How much is owed?");
    }

    TEST_CASE("distinct surfaces both append") {
        Turn turn = make_turn(3, "When should they be opened?");
        HistoryContext ctx = make_history({{"keeping", "hives"}}, {"the", "hive", "stays", "calm"});
        ResolvedQuery rq = resolve_query(turn, ctx, AllRelevant());
        // No stemming: "hives" and "hive" are different surfaces.
        std::size_t hive = 0, hives = 0;
        for (const auto& t : rq.appended_terms) {
            hive += t == "hive";
            hives += t == "hives";
        }
        CHECK(hive == 1);
        CHECK(hives == 1);
    }

    TEST_CASE("appended terms may duplicate query terms but never each other") {
        Turn turn = make_turn(4, "Any good recipes with almonds?");
        HistoryContext ctx = make_history({{"cooking", "almonds"}, {"roasted", "almonds"}});
        ResolvedQuery rq = resolve_query(turn, ctx, AllRelevant());
        CHECK(rq.appended_terms == std::vector<std::string>{"cooking", "almonds", "roasted"});
        CHECK(rq.render() == "Any good recipes with almonds? cooking almonds roasted");
        // The query already said "almonds"; the append may repeat it once.
        std::vector<std::string> rendered_terms = tokenize(rq.render());
        CHECK(std::count(rendered_terms.begin(), rendered_terms.end(), "almonds") == 2);
    }

    TEST_CASE("original query is a prefix of the rendering") {
        Turn turn = make_turn(2, "What about the wax?");
        HistoryContext ctx = make_history({{"bees", "make", "honey"}});
        NullTermClassifier null;
        AllRelevant all;
        for (const TermClassifier* c : {static_cast<const TermClassifier*>(&null),
                                        static_cast<const TermClassifier*>(&all)}) {
            ResolvedQuery rq = resolve_query(turn, ctx, *c);
            CHECK(rq.render().rfind(turn.raw_query, 0) == 0);
        }
    }

    TEST_CASE("empty history appends nothing") {
        Turn turn = make_turn(1, "What do honey bees collect?");
        ResolvedQuery rq = resolve_query(turn, HistoryContext{}, AllRelevant());
        CHECK(rq.appended_terms.empty());
        CHECK(rq.render() == turn.raw_query);
    }

    TEST_CASE("heuristic verdicts equal an independent re-computation") {
        InvertedIndex index = build_index({
            {"c1", "rare term cluster"},
            {"c2", "common common filler"},
            {"c3", "common words fill space"},
            {"c4", "common text again"},
            {"c5", "more common prose"},
        });
        HeuristicTermClassifier heuristic(index, 0.9);
        std::vector<std::string> query = tokenize("tell me about filler");
        HistoryContext ctx = make_history({{"the", "rare", "cluster", "common", "filler", "what"}});

        auto pairs = classify_terms(ctx, query, heuristic);
        REQUIRE(pairs.size() == 6);
        for (const auto& [term, verdict] : pairs) {
            bool expect = !HeuristicTermClassifier::is_stopword(term) &&
                          std::find(query.begin(), query.end(), term) == query.end() &&
                          index.idf(term) >= 0.9;
            CHECK_MESSAGE(verdict == expect, "term: ", term);
        }
        // Spot checks: "the"/"what" are stopwords, "filler" is in the query,
        // "common" is too frequent, "rare"/"cluster" pass.
        CHECK(pairs[1].second);   // rare
        CHECK(pairs[2].second);   // cluster
        CHECK_FALSE(pairs[0].second);
        CHECK_FALSE(pairs[3].second);
        CHECK_FALSE(pairs[4].second);
        CHECK_FALSE(pairs[5].second);
    }

    TEST_CASE("heuristic default threshold tracks the 10 percent rule") {
        std::vector<Passage> passages;
        for (int i = 0; i < 20; ++i)
            passages.push_back({"d" + std::to_string(i), i < 2 ? "niche filler" : "filler prose"});
        InvertedIndex index = build_index(passages);
        // floor(0.1 * 20) = 2 documents; "niche" sits exactly on the cutoff.
        HeuristicTermClassifier heuristic(index);
        CHECK(heuristic.idf_threshold() == index.idf_for_df(2));
        HistoryContext ctx = make_history({{"niche", "filler"}});
        auto verdicts = heuristic.classify(ctx, {"query"});
        CHECK(verdicts == std::vector<bool>{true, false});
    }

    TEST_CASE("terms absent from the corpus pass the idf test") {
        InvertedIndex index = build_index({{"d1", "alpha"}, {"d2", "beta"}});
        HeuristicTermClassifier heuristic(index);
        HistoryContext ctx = make_history({{"gamma"}});
        CHECK(heuristic.classify(ctx, {}) == std::vector<bool>{true});
    }

    TEST_CASE("stopword list is exposed and applied") {
        CHECK(HeuristicTermClassifier::is_stopword("the"));
        CHECK(HeuristicTermClassifier::is_stopword("which"));
        CHECK_FALSE(HeuristicTermClassifier::is_stopword("lighthouse"));
        CHECK(HeuristicTermClassifier::stopwords().size() == 30);
    }

    TEST_CASE("all_terms is original then appended") {
        Turn turn = make_turn(2, "where is it");
        HistoryContext ctx = make_history({{"reef", "tower"}});
        ResolvedQuery rq = resolve_query(turn, ctx, AllRelevant());
        CHECK(rq.all_terms() == std::vector<std::string>{"where", "is", "it", "reef", "tower"});
    }
}
