#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "plkt/dataio.hpp"
#include "plkt/rng.hpp"

using namespace plkt;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "plkt_test_tmp_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

constexpr const char* kHeader = "student_id,order,question_id,concept_id,response\n";

} // namespace

TEST_CASE("load_dataset basics") {
    SUBCASE("three rows, one student") {
        TempFile f(std::string(kHeader) +
                   "s1,0,q1,c1,1\n"
                   "s1,1,q2,c1,0\n"
                   "s1,2,q1,c1,1\n");
        Dataset ds = load_dataset(f.path);
        REQUIRE(ds.sequences.size() == 1);
        CHECK(ds.sequences[0].valid_length == 3);
        CHECK(ds.ids.num_questions() == 2);
        CHECK(ds.ids.num_concepts() == 1);
        CHECK(ds.sequences[0].interactions[0].question_id == 0);
        CHECK(ds.sequences[0].interactions[1].question_id == 1);
        CHECK(ds.sequences[0].interactions[2].question_id == 0);
        CHECK(ds.sequences[0].interactions[2].response == 1);
    }
    SUBCASE("empty file") {
        TempFile f("");
        Dataset ds = load_dataset(f.path);
        CHECK(ds.sequences.empty());
        CHECK(ds.ids.num_questions() == 0);
        CHECK(ds.ids.num_concepts() == 0);
    }
    SUBCASE("interleaved students are separated and ordered by the order column") {
        TempFile f(std::string(kHeader) +
                   "s1,10,q1,c1,1\n"
                   "s2,0,q2,c2,0\n"
                   "s1,5,q3,c1,0\n"
                   "s2,1,q4,c2,1\n"
                   "s1,20,q5,c1,1\n"
                   "s2,2,q1,c1,0\n");
        Dataset ds = load_dataset(f.path);
        REQUIRE(ds.sequences.size() == 2);
        CHECK(ds.sequences[0].student_id == "s1");
        CHECK(ds.sequences[1].student_id == "s2");
        // s1 sorted by order: q3 (5), q1 (10), q5 (20)
        CHECK(ds.ids.question_raw[ds.sequences[0].interactions[0].question_id] == "q3");
        CHECK(ds.ids.question_raw[ds.sequences[0].interactions[1].question_id] == "q1");
        CHECK(ds.ids.question_raw[ds.sequences[0].interactions[2].question_id] == "q5");
        CHECK(ds.sequences[1].interactions[2].response == 0);
    }
    SUBCASE("malformed rows report the line number") {
        TempFile f(std::string(kHeader) + "s1,0,q1,c1,1\ns1,not_an_int,q2,c1,0\n");
        CHECK_THROWS_WITH_AS(load_dataset(f.path), doctest::Contains("row 3"), std::runtime_error);
    }
    SUBCASE("response outside {0,1} is rejected") {
        TempFile f(std::string(kHeader) + "s1,0,q1,c1,2\n");
        CHECK_THROWS_WITH_AS(load_dataset(f.path), doctest::Contains("response"), std::runtime_error);
    }
    SUBCASE("second concept for a question keeps the first") {
        TempFile f(std::string(kHeader) + "s1,0,q1,c1,1\ns1,1,q1,c2,0\n");
        Dataset ds = load_dataset(f.path);
        CHECK(ds.sequences[0].interactions[0].concept_id ==
              ds.sequences[0].interactions[1].concept_id);
    }
    SUBCASE("fixed id map rejects unknown ids") {
        TempFile f1(std::string(kHeader) + "s1,0,q1,c1,1\ns1,1,q2,c1,0\n");
        Dataset ds1 = load_dataset(f1.path);
        TempFile f2(std::string(kHeader) + "s9,0,q7,c1,1\n");
        CHECK_THROWS_WITH_AS(load_dataset(f2.path, ds1.ids), doctest::Contains("q7"),
                             std::runtime_error);
    }
}

TEST_CASE("id map round-trips through the sidecar file") {
    TempFile f(std::string(kHeader) + "s1,0,q8,c3,1\ns1,1,q2,c1,0\ns1,2,q8,c3,1\n");
    Dataset ds = load_dataset(f.path);
    save_id_map(ds.ids, "plkt_test_idmap.csv");
    IdMap loaded = load_id_map("plkt_test_idmap.csv");
    std::remove("plkt_test_idmap.csv");
    CHECK(loaded.question_raw == ds.ids.question_raw);
    CHECK(loaded.concept_raw == ds.ids.concept_raw);
    CHECK(loaded.question_idx.at("q8") == ds.ids.question_idx.at("q8"));
}

namespace {

StudentSequence make_seq(const std::string& id, int n) {
    StudentSequence s;
    s.student_id = id;
    for (int i = 0; i < n; ++i) {
        s.interactions.push_back({i % 3, i % 2, i % 2});
    }
    s.valid_length = n;
    return s;
}

} // namespace

TEST_CASE("segment_sequences") {
    SUBCASE("length 200 -> chunks 80, 80, 40") {
        auto chunks = segment_sequences({make_seq("s", 200)}, 80);
        REQUIRE(chunks.size() == 3);
        CHECK(chunks[0].valid_length == 80);
        CHECK(chunks[1].valid_length == 80);
        CHECK(chunks[2].valid_length == 40);
        CHECK(chunks[2].interactions.size() == 80); // padded
        CHECK(chunks[2].interactions[79].question_id == 0);
    }
    SUBCASE("length 1 is dropped") {
        CHECK(segment_sequences({make_seq("s", 1)}, 80).empty());
    }
    SUBCASE("length 80 gives one unpadded chunk") {
        auto chunks = segment_sequences({make_seq("s", 80)}, 80);
        REQUIRE(chunks.size() == 1);
        CHECK(chunks[0].valid_length == 80);
    }
    SUBCASE("total interaction count is preserved minus dropped singletons") {
        Rng rng(3);
        std::vector<StudentSequence> seqs;
        int total = 0;
        for (int i = 0; i < 50; ++i) {
            const int n = 1 + static_cast<int>(rng.below(200));
            seqs.push_back(make_seq("s" + std::to_string(i), n));
            total += n;
        }
        int kept = 0, dropped = 0;
        for (const auto& s : seqs) {
            const int rem = s.valid_length % 80;
            (void)rem;
        }
        auto chunks = segment_sequences(seqs, 80);
        for (const auto& c : chunks) kept += c.valid_length;
        for (const auto& s : seqs) {
            const int rem = s.valid_length % 80;
            if (rem == 1) dropped += 1; // final singleton chunk is dropped
        }
        CHECK(kept + dropped == total);
    }
}

TEST_CASE("build_difficulty") {
    StudentSequence s;
    s.student_id = "s";
    // question 0: 10 attempts 7 correct; question 2: 5 attempts 0 correct
    for (int i = 0; i < 10; ++i) s.interactions.push_back({0, 0, i < 7 ? 1 : 0});
    for (int i = 0; i < 5; ++i) s.interactions.push_back({2, 0, 0});
    s.valid_length = static_cast<int>(s.interactions.size());
    DifficultyTable t = build_difficulty({s}, 4);
    CHECK(t.at(0) == doctest::Approx(0.3));
    CHECK(t.at(1) == doctest::Approx(0.5)); // unseen -> neutral prior
    CHECK(t.at(2) == doctest::Approx(1.0));
    CHECK(t.at(3) == doctest::Approx(0.5));

    DifficultyTable t2 = build_difficulty({s}, 4);
    CHECK(t.difficulty == t2.difficulty);
    CHECK(t.attempts == t2.attempts);
}

TEST_CASE("response_offset_index") {
    CHECK(response_offset_index(3, 0, 100) == 3);
    CHECK(response_offset_index(3, 1, 100) == 103);
    CHECK(response_offset_index(99, 1, 100) == 199);
    CHECK_THROWS_AS(response_offset_index(100, 0, 100), std::out_of_range);
    CHECK_THROWS_AS(response_offset_index(-1, 0, 100), std::out_of_range);
}

TEST_CASE("split_dataset") {
    std::vector<StudentSequence> seqs;
    for (int i = 0; i < 100; ++i) seqs.push_back(make_seq("s" + std::to_string(i), 5));

    SUBCASE("100 students -> 70/10/20") {
        DatasetSplit sp = split_dataset(seqs, 42, 0);
        CHECK(sp.train.size() == 70);
        CHECK(sp.validation.size() == 10);
        CHECK(sp.test.size() == 20);
    }
    SUBCASE("same seed gives identical splits") {
        DatasetSplit a = split_dataset(seqs, 7, 2);
        DatasetSplit b = split_dataset(seqs, 7, 2);
        REQUIRE(a.test.size() == b.test.size());
        for (std::size_t i = 0; i < a.test.size(); ++i) {
            CHECK(a.test[i].student_id == b.test[i].student_id);
        }
    }
    SUBCASE("buckets are disjoint by student") {
        DatasetSplit sp = split_dataset(seqs, 13, 1);
        std::set<std::string> seen;
        for (const auto& s : sp.train) CHECK(seen.insert(s.student_id).second);
        for (const auto& s : sp.validation) CHECK(seen.insert(s.student_id).second);
        for (const auto& s : sp.test) CHECK(seen.insert(s.student_id).second);
        CHECK(seen.size() == 100);
    }
    SUBCASE("five folds partition the students across test sets") {
        std::vector<StudentSequence> small;
        for (int i = 0; i < 20; ++i) small.push_back(make_seq("s" + std::to_string(i), 5));
        std::set<std::string> covered;
        std::size_t total = 0;
        for (int fold = 0; fold < 5; ++fold) {
            DatasetSplit sp = split_dataset(small, 99, fold);
            CHECK(sp.test.size() == 4);
            CHECK(sp.validation.size() == 2);
            CHECK(sp.train.size() == 14);
            for (const auto& s : sp.test) covered.insert(s.student_id);
            total += sp.test.size();
        }
        CHECK(covered.size() == 20);
        CHECK(total == 20);
    }
    SUBCASE("fewer than 10 students is an error") {
        std::vector<StudentSequence> tiny(seqs.begin(), seqs.begin() + 9);
        CHECK_THROWS_AS(split_dataset(tiny, 1, 0), std::invalid_argument);
    }
}

TEST_CASE("generate_synthetic") {
    SUBCASE("degenerate parameters give all-correct responses") {
        SynthParams p;
        p.num_students = 5;
        p.num_concepts = 3;
        p.seq_len = 20;
        p.slip = 0.0;
        p.guess = 0.0;
        p.init_mastery = 1.0;
        std::ostringstream out;
        generate_synthetic(p, out);
        TempFile f(out.str());
        Dataset ds = load_dataset(f.path);
        REQUIRE(ds.sequences.size() == 5);
        for (const auto& s : ds.sequences) {
            for (int i = 0; i < s.valid_length; ++i) CHECK(s.interactions[i].response == 1);
        }
    }
    SUBCASE("guess = 1 gives all-correct responses") {
        SynthParams p;
        p.num_students = 5;
        p.num_concepts = 3;
        p.seq_len = 20;
        p.guess = 1.0;
        p.init_mastery = 0.0;
        p.learn_rate = 0.0;
        std::ostringstream out;
        generate_synthetic(p, out);
        TempFile f(out.str());
        Dataset ds = load_dataset(f.path);
        for (const auto& s : ds.sequences) {
            for (int i = 0; i < s.valid_length; ++i) CHECK(s.interactions[i].response == 1);
        }
    }
    SUBCASE("empirical accuracy matches the Monte-Carlo chain oracle") {
        SynthParams p;
        p.num_students = 2000;
        p.num_concepts = 5;
        p.seq_len = 40;
        p.seed = 17;
        p.slip = 0.1;
        p.guess = 0.2;
        p.init_mastery = 0.5;
        p.learn_rate = 0.2;
        std::ostringstream out;
        generate_synthetic(p, out);
        TempFile f(out.str());
        Dataset ds = load_dataset(f.path);

        // per-practice-index counts and empirical accuracy from the file
        std::vector<long long> count_at_index, correct_at_index;
        for (const auto& s : ds.sequences) {
            std::vector<int> practice_count(static_cast<std::size_t>(p.num_concepts), 0);
            for (int i = 0; i < s.valid_length; ++i) {
                const auto& inter = s.interactions[static_cast<std::size_t>(i)];
                const int j = practice_count[static_cast<std::size_t>(inter.concept_id)]++;
                if (static_cast<std::size_t>(j) >= count_at_index.size()) {
                    count_at_index.resize(static_cast<std::size_t>(j) + 1, 0);
                    correct_at_index.resize(static_cast<std::size_t>(j) + 1, 0);
                }
                count_at_index[static_cast<std::size_t>(j)] += 1;
                correct_at_index[static_cast<std::size_t>(j)] += inter.response;
            }
        }
        long long total = 0, correct = 0;
        for (std::size_t j = 0; j < count_at_index.size(); ++j) {
            total += count_at_index[j];
            correct += correct_at_index[j];
        }
        const double empirical = static_cast<double>(correct) / static_cast<double>(total);

        // Monte-Carlo oracle: simulate the single-concept mastery chain and
        // estimate accuracy per practice index, then weight by the observed
        // practice-index distribution. 10^6+ simulated interactions.
        const std::size_t max_j = count_at_index.size();
        const int replications = static_cast<int>(1000000 / max_j) + 1;
        std::vector<double> acc(max_j, 0.0);
        Rng rng(991);
        for (int r = 0; r < replications; ++r) {
            bool m = rng.uniform() < p.init_mastery;
            for (std::size_t j = 0; j < max_j; ++j) {
                const bool ok = rng.uniform() < (m ? 1.0 - p.slip : p.guess);
                acc[j] += ok ? 1.0 : 0.0;
                if (!m && rng.uniform() < p.learn_rate) m = true;
            }
        }
        double expected = 0.0;
        for (std::size_t j = 0; j < max_j; ++j) {
            expected += acc[j] / replications * static_cast<double>(count_at_index[j]);
        }
        expected /= static_cast<double>(total);
        CHECK(std::fabs(empirical - expected) < 0.03);
    }
}
