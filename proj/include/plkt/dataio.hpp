#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace plkt {

struct Interaction {
    int question_id = 0;
    int concept_id = 0;
    int response = 0; // 1 = correct
};

struct StudentSequence {
    std::string student_id;
    std::vector<Interaction> interactions; // positions >= valid_length are padding
    int valid_length = 0;
};

// Insertion-ordered dense id maps for questions and concepts.
struct IdMap {
    std::vector<std::string> question_raw; // dense id -> raw id
    std::vector<std::string> concept_raw;
    std::unordered_map<std::string, int> question_idx;
    std::unordered_map<std::string, int> concept_idx;

    int num_questions() const { return static_cast<int>(question_raw.size()); }
    int num_concepts() const { return static_cast<int>(concept_raw.size()); }
};

struct Dataset {
    std::vector<StudentSequence> sequences; // one per student, file order of first appearance
    IdMap ids;
};

struct DifficultyTable {
    std::vector<std::int64_t> attempts; // N_q
    std::vector<std::int64_t> corrects; // M_q
    std::vector<double> difficulty;     // d_q = 1 - M_q/N_q, 0.5 when unseen

    double at(int question_id) const { return difficulty.at(static_cast<std::size_t>(question_id)); }
};

struct DatasetSplit {
    std::vector<StudentSequence> train;
    std::vector<StudentSequence> validation;
    std::vector<StudentSequence> test;
    int fold_index = 0;
};

// Reads the dataset CSV (header: student_id,order,question_id,concept_id,response).
// Rows may be grouped or interleaved; each student's rows are ordered by the
// `order` column. Unknown raw ids are assigned dense ids from 0 in first-seen
// order. A question seen with a second concept keeps its first concept (one
// warning per question on stderr). Malformed rows throw with the line number.
Dataset load_dataset(const std::string& path);

// Same format, but re-encodes with an existing map (e.g. from a checkpoint);
// unknown raw ids are an error.
Dataset load_dataset(const std::string& path, const IdMap& fixed_ids);

// Writes / reads the id-map sidecar CSV: raw_id,dense_id,kind.
void save_id_map(const IdMap& ids, const std::string& path);
IdMap load_id_map(const std::string& path);

// Splits each sequence into consecutive chunks of max_len, zero-padding the
// final chunk; chunks shorter than 2 valid interactions are dropped.
std::vector<StudentSequence> segment_sequences(const std::vector<StudentSequence>& seqs,
                                               int max_len);

// Question difficulty from a training split: d_q = 1 - M_q/N_q, 0.5 for
// questions with no attempts.
DifficultyTable build_difficulty(const std::vector<StudentSequence>& train_seqs,
                                 int num_questions);

// Response-conditioned row index: id + r * vocab. Tables carry 2*vocab rows.
int response_offset_index(int id, int response, int vocab);

// Deterministic 7:1:2 split by student under `seed`; fold_index in [0,5)
// rotates the assignment so the five test sets partition the students.
DatasetSplit split_dataset(const std::vector<StudentSequence>& seqs,
                           std::uint64_t seed, int fold_index = 0);

struct SynthParams {
    int num_students = 100;
    int num_concepts = 5;
    int seq_len = 50;
    std::uint64_t seed = 1;
    double learn_rate = 0.2;
    double guess = 0.2;
    double slip = 0.1;
    double init_mastery = 0.3;
    double streak_bonus = 0.0; // extra learn probability after two consecutive
                               // correct answers on the same concept
    int questions_per_concept = 5;
    double stay_prob = 0.5;    // probability of practicing the same concept again
};

// BKT-style generator: per-concept latent mastery, learn-on-practice with an
// optional streak bonus, responses via slip/guess. Questions map many-to-one
// onto concepts. Writes the dataset CSV to `path`.
void generate_synthetic(const SynthParams& params, const std::string& path);
void generate_synthetic(const SynthParams& params, std::ostream& out);

} // namespace plkt
