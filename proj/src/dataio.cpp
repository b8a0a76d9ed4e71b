#include "plkt/dataio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "plkt/rng.hpp"

namespace plkt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("dataset row " + std::to_string(line_no) + ": " + what);
}

struct RawRow {
    std::string student;
    long long order;
    std::string question;
    std::string concept_raw;
    int response;
};

std::vector<RawRow> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (!saw_header) {
            if (f.size() != 5 || f[0] != "student_id" || f[1] != "order" ||
                f[2] != "question_id" || f[3] != "concept_id" || f[4] != "response") {
                row_error(line_no, "expected header student_id,order,question_id,concept_id,response");
            }
            saw_header = true;
            continue;
        }
        if (f.size() != 5) row_error(line_no, "expected 5 fields, got " + std::to_string(f.size()));
        RawRow r;
        r.student = f[0];
        try {
            std::size_t pos = 0;
            r.order = std::stoll(f[1], &pos);
            if (pos != f[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            row_error(line_no, "order is not an integer: '" + f[1] + "'");
        }
        r.question = f[2];
        r.concept_raw = f[3];
        if (f[4] == "0") r.response = 0;
        else if (f[4] == "1") r.response = 1;
        else row_error(line_no, "response must be 0 or 1, got '" + f[4] + "'");
        if (r.student.empty() || r.question.empty() || r.concept_raw.empty()) {
            row_error(line_no, "empty id field");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

Dataset build_dataset(std::vector<RawRow> rows, const IdMap* fixed_ids) {
    Dataset ds;
    if (fixed_ids) ds.ids = *fixed_ids;

    auto question_id = [&](const std::string& raw) {
        auto it = ds.ids.question_idx.find(raw);
        if (it != ds.ids.question_idx.end()) return it->second;
        if (fixed_ids) {
            throw std::runtime_error("question id '" + raw + "' not present in the model's id map");
        }
        int id = ds.ids.num_questions();
        ds.ids.question_idx.emplace(raw, id);
        ds.ids.question_raw.push_back(raw);
        return id;
    };
    auto concept_id = [&](const std::string& raw) {
        auto it = ds.ids.concept_idx.find(raw);
        if (it != ds.ids.concept_idx.end()) return it->second;
        if (fixed_ids) {
            throw std::runtime_error("concept id '" + raw + "' not present in the model's id map");
        }
        int id = ds.ids.num_concepts();
        ds.ids.concept_idx.emplace(raw, id);
        ds.ids.concept_raw.push_back(raw);
        return id;
    };

    // students in first-appearance order; per-student rows sorted by `order`
    std::unordered_map<std::string, std::size_t> student_index;
    std::vector<std::vector<std::size_t>> per_student;
    std::vector<std::string> student_order;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto [it, inserted] = student_index.emplace(rows[i].student, per_student.size());
        if (inserted) {
            per_student.emplace_back();
            student_order.push_back(rows[i].student);
        }
        per_student[it->second].push_back(i);
    }

    // single concept per question, first occurrence wins
    std::unordered_map<int, int> question_concept;
    std::set<int> warned;

    for (std::size_t s = 0; s < per_student.size(); ++s) {
        auto& idxs = per_student[s];
        std::stable_sort(idxs.begin(), idxs.end(), [&rows](std::size_t a, std::size_t b) {
            return rows[a].order < rows[b].order;
        });
        StudentSequence seq;
        seq.student_id = student_order[s];
        seq.interactions.reserve(idxs.size());
        for (std::size_t i : idxs) {
            Interaction inter;
            inter.question_id = question_id(rows[i].question);
            inter.response = rows[i].response;
            int c = concept_id(rows[i].concept_raw);
            auto [it, inserted] = question_concept.emplace(inter.question_id, c);
            if (!inserted && it->second != c) {
                if (warned.insert(inter.question_id).second) {
                    std::cerr << "warning: question '" << rows[i].question
                              << "' tagged with multiple concepts; keeping the first\n";
                }
                c = it->second;
            }
            inter.concept_id = c;
            seq.interactions.push_back(inter);
        }
        seq.valid_length = static_cast<int>(seq.interactions.size());
        ds.sequences.push_back(std::move(seq));
    }
    return ds;
}

} // namespace

Dataset load_dataset(const std::string& path) {
    return build_dataset(read_rows(path), nullptr);
}

Dataset load_dataset(const std::string& path, const IdMap& fixed_ids) {
    return build_dataset(read_rows(path), &fixed_ids);
}

void save_id_map(const IdMap& ids, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write id map: " + path);
    out << "raw_id,dense_id,kind\n";
    for (std::size_t i = 0; i < ids.question_raw.size(); ++i) {
        out << ids.question_raw[i] << ',' << i << ",question\n";
    }
    for (std::size_t i = 0; i < ids.concept_raw.size(); ++i) {
        out << ids.concept_raw[i] << ',' << i << ",concept\n";
    }
}

IdMap load_id_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open id map: " + path);
    IdMap ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (line_no == 1) continue; // header
        if (f.size() != 3) throw std::runtime_error("id map row " + std::to_string(line_no) + ": expected 3 fields");
        const int dense = std::stoi(f[1]);
        if (f[2] == "question") {
            if (dense != static_cast<int>(ids.question_raw.size())) {
                throw std::runtime_error("id map: question dense ids out of order");
            }
            ids.question_idx.emplace(f[0], dense);
            ids.question_raw.push_back(f[0]);
        } else if (f[2] == "concept") {
            if (dense != static_cast<int>(ids.concept_raw.size())) {
                throw std::runtime_error("id map: concept dense ids out of order");
            }
            ids.concept_idx.emplace(f[0], dense);
            ids.concept_raw.push_back(f[0]);
        } else {
            throw std::runtime_error("id map row " + std::to_string(line_no) + ": unknown kind '" + f[2] + "'");
        }
    }
    return ids;
}

std::vector<StudentSequence> segment_sequences(const std::vector<StudentSequence>& seqs,
                                               int max_len) {
    if (max_len < 2) throw std::invalid_argument("segment_sequences: max_len must be >= 2");
    std::vector<StudentSequence> out;
    for (const auto& seq : seqs) {
        const int n = seq.valid_length;
        for (int start = 0; start < n; start += max_len) {
            const int len = std::min(max_len, n - start);
            if (len < 2) continue; // no prediction target exists
            StudentSequence chunk;
            chunk.student_id = seq.student_id;
            chunk.valid_length = len;
            chunk.interactions.assign(seq.interactions.begin() + start,
                                      seq.interactions.begin() + start + len);
            chunk.interactions.resize(static_cast<std::size_t>(max_len)); // zero padding
            out.push_back(std::move(chunk));
        }
    }
    return out;
}

DifficultyTable build_difficulty(const std::vector<StudentSequence>& train_seqs,
                                 int num_questions) {
    DifficultyTable table;
    table.attempts.assign(static_cast<std::size_t>(num_questions), 0);
    table.corrects.assign(static_cast<std::size_t>(num_questions), 0);
    table.difficulty.assign(static_cast<std::size_t>(num_questions), 0.5);
    for (const auto& seq : train_seqs) {
        for (int i = 0; i < seq.valid_length; ++i) {
            const auto& inter = seq.interactions[static_cast<std::size_t>(i)];
            table.attempts.at(static_cast<std::size_t>(inter.question_id)) += 1;
            table.corrects[static_cast<std::size_t>(inter.question_id)] += inter.response;
        }
    }
    for (std::size_t q = 0; q < table.attempts.size(); ++q) {
        if (table.attempts[q] > 0) {
            table.difficulty[q] = 1.0 - static_cast<double>(table.corrects[q]) /
                                            static_cast<double>(table.attempts[q]);
        }
    }
    return table;
}

int response_offset_index(int id, int response, int vocab) {
    if (id < 0 || id >= vocab) {
        throw std::out_of_range("response_offset_index: id " + std::to_string(id) +
                                " outside vocabulary of size " + std::to_string(vocab));
    }
    if (response != 0 && response != 1) {
        throw std::out_of_range("response_offset_index: response must be 0 or 1");
    }
    return id + response * vocab;
}

DatasetSplit split_dataset(const std::vector<StudentSequence>& seqs,
                           std::uint64_t seed, int fold_index) {
    const int n = static_cast<int>(seqs.size());
    if (n < 10) throw std::invalid_argument("split_dataset: need at least 10 students");
    if (fold_index < 0 || fold_index >= 5) {
        throw std::invalid_argument("split_dataset: fold_index must be in [0,5)");
    }
    std::vector<int> order(seqs.size());
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(Rng::mix(seed ^ 0x51BD17ULL));
    rng.shuffle(order);

    // test = fold block (n/5), validation = the next n/10 positions cyclically
    const int test_begin = static_cast<int>(static_cast<std::int64_t>(fold_index) * n / 5);
    const int test_end = static_cast<int>(static_cast<std::int64_t>(fold_index + 1) * n / 5);
    const int val_count = (n + 5) / 10; // round(n/10)

    DatasetSplit split;
    split.fold_index = fold_index;
    std::vector<bool> is_test(order.size(), false), is_val(order.size(), false);
    for (int i = test_begin; i < test_end; ++i) is_test[static_cast<std::size_t>(i)] = true;
    int placed = 0;
    for (int i = test_end; placed < val_count; ++i) {
        const int pos = i % n;
        if (is_test[static_cast<std::size_t>(pos)]) continue;
        is_val[static_cast<std::size_t>(pos)] = true;
        ++placed;
    }
    for (int i = 0; i < n; ++i) {
        const auto& s = seqs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        if (is_test[static_cast<std::size_t>(i)]) split.test.push_back(s);
        else if (is_val[static_cast<std::size_t>(i)]) split.validation.push_back(s);
        else split.train.push_back(s);
    }
    return split;
}

void generate_synthetic(const SynthParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    generate_synthetic(p, out);
}

void generate_synthetic(const SynthParams& p, std::ostream& out) {
    auto check_prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string("generate_synthetic: ") + name +
                                        " must be in [0,1]");
        }
    };
    check_prob(p.learn_rate, "learn_rate");
    check_prob(p.guess, "guess");
    check_prob(p.slip, "slip");
    check_prob(p.init_mastery, "init_mastery");
    check_prob(p.stay_prob, "stay_prob");
    if (p.streak_bonus < 0.0) throw std::invalid_argument("generate_synthetic: streak_bonus must be >= 0");
    if (p.num_students < 1 || p.num_concepts < 1 || p.seq_len < 1 || p.questions_per_concept < 1) {
        throw std::invalid_argument("generate_synthetic: counts must be positive");
    }

    Rng rng(Rng::mix(p.seed ^ 0x53badc0deULL));
    out << "student_id,order,question_id,concept_id,response\n";
    for (int s = 0; s < p.num_students; ++s) {
        std::vector<bool> mastered(static_cast<std::size_t>(p.num_concepts));
        for (int c = 0; c < p.num_concepts; ++c) {
            mastered[static_cast<std::size_t>(c)] = rng.bernoulli(p.init_mastery);
        }
        int prev_concept = -1;
        bool prev_correct = false;
        for (int t = 0; t < p.seq_len; ++t) {
            int cpt;
            if (prev_concept >= 0 && rng.bernoulli(p.stay_prob)) {
                cpt = prev_concept;
            } else {
                cpt = static_cast<int>(rng.below(static_cast<std::uint64_t>(p.num_concepts)));
            }
            const int question = cpt * p.questions_per_concept +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(p.questions_per_concept)));
            const bool m = mastered[static_cast<std::size_t>(cpt)];
            const bool correct = rng.bernoulli(m ? 1.0 - p.slip : p.guess);
            // learning happens after the response; two back-to-back correct
            // answers on the same concept add the streak bonus
            if (!m) {
                double learn = p.learn_rate;
                if (correct && prev_correct && prev_concept == cpt) {
                    learn = std::min(1.0, learn + p.streak_bonus);
                }
                if (rng.bernoulli(learn)) mastered[static_cast<std::size_t>(cpt)] = true;
            }
            out << 's' << s << ',' << t << ",q" << question << ",c" << cpt << ','
                << (correct ? 1 : 0) << '\n';
            prev_concept = cpt;
            prev_correct = correct;
        }
    }
}

} // namespace plkt
