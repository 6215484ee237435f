#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forgetlens/dataset.hpp"

namespace forgetlens {
namespace tracker {

// Streaming per-example record. A forgetting event is a correct->incorrect
// transition between consecutive presentations of the same example; the
// first incorrect->correct transition (prev_acc starts at 0) fixes t*.
struct ExampleStats {
    ExampleId id = 0;
    bool prev_acc = false;
    std::int64_t forgetting_count = 0;
    std::optional<std::int64_t> first_learning_presentation;
    std::int64_t presentations_seen = 0;
    double margin_sum_over_forgetting = 0.0;

    bool ever_learnt() const { return first_learning_presentation.has_value(); }
};

// One tracker observation, the unit of the event log.
struct PredictionEvent {
    ExampleId example_id = 0;
    int epoch = 0;
    std::int64_t presentation_index = 0;  // per-example, 1-based
    bool correct = false;
    double margin = 0.0;
    double loss = 0.0;
};

// Ascending-by-count sort key; never-learnt examples sort above every
// finite count.
struct SortKey {
    bool never_learnt = false;
    std::int64_t count = 0;

    double as_double() const;
    bool operator<(const SortKey& other) const;
    bool operator==(const SortKey&) const = default;
};

struct Ordering {
    std::vector<ExampleId> permutation;
    std::vector<SortKey> sort_keys;  // aligned with permutation
    std::uint64_t tie_break_seed = 0;
};

class StatsStore {
  public:
    StatsStore() = default;
    explicit StatsStore(const std::vector<ExampleId>& ids);

    // Assemble a store from already-computed records (offline
    // recomputation, CSV import).
    static StatsStore from_records(std::vector<ExampleStats> records);

    void register_id(ExampleId id);
    bool contains(ExampleId id) const;
    std::size_t size() const { return stats_.size(); }

    // Algorithm-1 update for one presentation; margins accumulate into the
    // forgetting sum only at forgetting events.
    void observe(ExampleId id, bool correct, double margin);

    // observe() for each example of a minibatch; a duplicate id within one
    // batch is an error.
    void observe_batch(const std::vector<ExampleId>& ids, const std::vector<bool>& correct,
                       const std::vector<double>& margins);

    const ExampleStats& stats(ExampleId id) const;
    const std::vector<ExampleStats>& all() const { return stats_; }

    SortKey sort_key(ExampleId id) const;
    std::optional<double> mean_misclassification_margin(ExampleId id) const;
    std::set<ExampleId> unforgettable_set() const;

    // Immutable copy for epoch-stability analysis.
    StatsStore snapshot(const std::string& label) const;
    const std::string& label() const { return label_; }

    bool operator==(const StatsStore& other) const;

  private:
    std::vector<ExampleStats> stats_;
    std::vector<std::pair<ExampleId, std::size_t>> index_;  // sorted id -> slot
    std::string label_;

    std::size_t slot_of(ExampleId id) const;
};

// Independent offline recomputation of the streaming statistics from an
// event log; the ground-truth oracle for StatsStore.
StatsStore recompute_offline(std::vector<PredictionEvent> event_log);

// Ascending by forgetting count, never-learnt last, equal-count blocks
// shuffled by the tie-break seed.
Ordering build_ordering(const StatsStore& store, std::uint64_t tie_break_seed);

// Event log I/O: JSONL with keys exactly
// {example_id, epoch, presentation_index, correct, margin, loss}.
std::string to_json_line(const PredictionEvent& event);
PredictionEvent event_from_json_line(const std::string& line);
std::vector<PredictionEvent> load_event_log(const std::string& path);

class EventLogWriter {
  public:
    explicit EventLogWriter(const std::string& path);
    ~EventLogWriter();
    void append(const PredictionEvent& event);
    void flush();  // called at epoch boundaries

  private:
    struct Impl;
    Impl* impl_;
};

// CSV export with header id,forgetting_count,first_learning_presentation,
// ever_learnt,mean_misclassification_margin,presentations_seen,sort_key;
// never-learnt rows carry "inf" in sort_key.
void export_stats_csv(const StatsStore& store, const std::string& path);
StatsStore import_stats_csv(const std::string& path);

void export_ordering_csv(const Ordering& ordering, const std::string& path);
Ordering import_ordering_csv(const std::string& path);

}  // namespace tracker
}  // namespace forgetlens
