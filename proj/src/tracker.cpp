#include "forgetlens/tracker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "forgetlens/errors.hpp"
#include "forgetlens/random.hpp"

namespace forgetlens {
namespace tracker {

double SortKey::as_double() const {
    return never_learnt ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(count);
}

bool SortKey::operator<(const SortKey& other) const {
    if (never_learnt != other.never_learnt) return !never_learnt;
    return count < other.count;
}

StatsStore::StatsStore(const std::vector<ExampleId>& ids) {
    for (ExampleId id : ids) register_id(id);
}

StatsStore StatsStore::from_records(std::vector<ExampleStats> records) {
    StatsStore store;
    for (const ExampleStats& s : records) store.register_id(s.id);
    for (ExampleStats& s : records) store.stats_[store.slot_of(s.id)] = std::move(s);
    return store;
}

void StatsStore::register_id(ExampleId id) {
    const auto it = std::lower_bound(index_.begin(), index_.end(), std::pair{id, std::size_t{0}});
    if (it != index_.end() && it->first == id) {
        throw InvalidArgument("tracker: id already registered: " + std::to_string(id));
    }
    ExampleStats s;
    s.id = id;
    index_.insert(it, {id, stats_.size()});
    stats_.push_back(s);
}

bool StatsStore::contains(ExampleId id) const {
    const auto it = std::lower_bound(index_.begin(), index_.end(), std::pair{id, std::size_t{0}});
    return it != index_.end() && it->first == id;
}

std::size_t StatsStore::slot_of(ExampleId id) const {
    const auto it = std::lower_bound(index_.begin(), index_.end(), std::pair{id, std::size_t{0}});
    if (it == index_.end() || it->first != id) {
        throw InvalidArgument("tracker: unknown example id " + std::to_string(id));
    }
    return it->second;
}

void StatsStore::observe(ExampleId id, bool correct, double margin) {
    ExampleStats& s = stats_[slot_of(id)];
    if (s.prev_acc && !correct) {
        s.forgetting_count += 1;
        s.margin_sum_over_forgetting += margin;
    }
    if (!s.prev_acc && correct && !s.first_learning_presentation.has_value()) {
        s.first_learning_presentation = s.presentations_seen + 1;
    }
    s.prev_acc = correct;
    s.presentations_seen += 1;
}

void StatsStore::observe_batch(const std::vector<ExampleId>& ids, const std::vector<bool>& correct,
                               const std::vector<double>& margins) {
    if (ids.size() != correct.size() || ids.size() != margins.size()) {
        throw InvalidArgument("tracker: batch arrays differ in length");
    }
    std::unordered_set<ExampleId> seen;
    for (ExampleId id : ids) {
        if (!seen.insert(id).second) {
            throw InvalidArgument("tracker: duplicate id in minibatch: " + std::to_string(id));
        }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) observe(ids[i], correct[i], margins[i]);
}

const ExampleStats& StatsStore::stats(ExampleId id) const { return stats_[slot_of(id)]; }

SortKey StatsStore::sort_key(ExampleId id) const {
    const ExampleStats& s = stats(id);
    if (!s.ever_learnt()) return SortKey{true, 0};
    return SortKey{false, s.forgetting_count};
}

std::optional<double> StatsStore::mean_misclassification_margin(ExampleId id) const {
    const ExampleStats& s = stats(id);
    if (s.forgetting_count == 0) return std::nullopt;
    return s.margin_sum_over_forgetting / static_cast<double>(s.forgetting_count);
}

std::set<ExampleId> StatsStore::unforgettable_set() const {
    std::set<ExampleId> out;
    for (const ExampleStats& s : stats_) {
        if (s.ever_learnt() && s.forgetting_count == 0) out.insert(s.id);
    }
    return out;
}

StatsStore StatsStore::snapshot(const std::string& label) const {
    StatsStore copy = *this;
    copy.label_ = label;
    return copy;
}

bool StatsStore::operator==(const StatsStore& other) const {
    if (stats_.size() != other.stats_.size()) return false;
    for (const ExampleStats& s : stats_) {
        if (!other.contains(s.id)) return false;
        const ExampleStats& o = other.stats(s.id);
        if (s.prev_acc != o.prev_acc || s.forgetting_count != o.forgetting_count ||
            s.first_learning_presentation != o.first_learning_presentation ||
            s.presentations_seen != o.presentations_seen ||
            s.margin_sum_over_forgetting != o.margin_sum_over_forgetting) {
            return false;
        }
    }
    return true;
}

StatsStore recompute_offline(std::vector<PredictionEvent> event_log) {
    std::sort(event_log.begin(), event_log.end(),
              [](const PredictionEvent& a, const PredictionEvent& b) {
                  if (a.example_id != b.example_id) return a.example_id < b.example_id;
                  return a.presentation_index < b.presentation_index;
              });
    std::vector<ExampleStats> records;
    std::size_t i = 0;
    while (i < event_log.size()) {
        const ExampleId id = event_log[i].example_id;
        std::size_t end = i;
        while (end < event_log.size() && event_log[end].example_id == id) ++end;

        ExampleStats s;
        s.id = id;
        for (std::size_t j = i; j < end; ++j) {
            const PredictionEvent& ev = event_log[j];
            const std::int64_t expected = static_cast<std::int64_t>(j - i) + 1;
            if (ev.presentation_index != expected) {
                throw DataIntegrityError("event log: presentation gap for id " + std::to_string(id));
            }
            if (s.prev_acc && !ev.correct) {
                s.forgetting_count += 1;
                s.margin_sum_over_forgetting += ev.margin;
            }
            if (!s.prev_acc && ev.correct && !s.first_learning_presentation.has_value()) {
                s.first_learning_presentation = expected;
            }
            s.prev_acc = ev.correct;
        }
        s.presentations_seen = static_cast<std::int64_t>(end - i);
        records.push_back(s);
        i = end;
    }
    return StatsStore::from_records(std::move(records));
}

Ordering build_ordering(const StatsStore& store, std::uint64_t tie_break_seed) {
    std::vector<std::pair<SortKey, ExampleId>> keyed;
    keyed.reserve(store.size());
    for (const ExampleStats& s : store.all()) keyed.push_back({store.sort_key(s.id), s.id});
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.first == b.first) return a.second < b.second;
        return a.first < b.first;
    });

    RandomSource rng(tie_break_seed);
    Ordering out;
    out.tie_break_seed = tie_break_seed;
    std::size_t i = 0;
    while (i < keyed.size()) {
        std::size_t end = i;
        while (end < keyed.size() && keyed[end].first == keyed[i].first) ++end;
        std::vector<ExampleId> block;
        for (std::size_t j = i; j < end; ++j) block.push_back(keyed[j].second);
        rng.shuffle(block);
        for (ExampleId id : block) {
            out.permutation.push_back(id);
            out.sort_keys.push_back(keyed[i].first);
        }
        i = end;
    }
    return out;
}

namespace {

const char* kEventKeys[] = {"example_id", "epoch", "presentation_index", "correct", "margin",
                            "loss"};

}  // namespace

std::string to_json_line(const PredictionEvent& event) {
    nlohmann::json j;
    j["example_id"] = event.example_id;
    j["epoch"] = event.epoch;
    j["presentation_index"] = event.presentation_index;
    j["correct"] = event.correct;
    j["margin"] = event.margin;
    j["loss"] = event.loss;
    return j.dump();
}

PredictionEvent event_from_json_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataIntegrityError(std::string("event log: bad JSON line: ") + e.what());
    }
    for (const char* key : kEventKeys) {
        if (!j.contains(key)) {
            throw DataIntegrityError(std::string("event log: missing key ") + key);
        }
    }
    if (j.size() != 6) throw DataIntegrityError("event log: unexpected keys in event");
    PredictionEvent ev;
    try {
        ev.example_id = j["example_id"].get<ExampleId>();
        ev.epoch = j["epoch"].get<int>();
        ev.presentation_index = j["presentation_index"].get<std::int64_t>();
        ev.correct = j["correct"].get<bool>();
        ev.margin = j["margin"].get<double>();
        ev.loss = j["loss"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DataIntegrityError(std::string("event log: bad field type: ") + e.what());
    }
    return ev;
}

std::vector<PredictionEvent> load_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open event log: " + path);
    std::vector<PredictionEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        events.push_back(event_from_json_line(line));
    }
    return events;
}

struct EventLogWriter::Impl {
    std::ofstream out;
};

EventLogWriter::EventLogWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::app);
    if (!impl_->out) {
        delete impl_;
        throw IoError("cannot open event log for append: " + path);
    }
}

EventLogWriter::~EventLogWriter() { delete impl_; }

void EventLogWriter::append(const PredictionEvent& event) {
    impl_->out << to_json_line(event) << '\n';
}

void EventLogWriter::flush() { impl_->out.flush(); }

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void export_stats_csv(const StatsStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << "id,forgetting_count,first_learning_presentation,ever_learnt,"
           "mean_misclassification_margin,presentations_seen,sort_key\n";
    for (const ExampleStats& s : store.all()) {
        out << s.id << ',' << s.forgetting_count << ',';
        if (s.first_learning_presentation) out << *s.first_learning_presentation;
        out << ',' << (s.ever_learnt() ? 1 : 0) << ',';
        if (s.forgetting_count > 0) {
            out << format_double(s.margin_sum_over_forgetting /
                                 static_cast<double>(s.forgetting_count));
        }
        out << ',' << s.presentations_seen << ',';
        if (s.ever_learnt()) {
            out << s.forgetting_count;
        } else {
            out << "inf";
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

StatsStore import_stats_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stats csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataIntegrityError("stats csv: empty file: " + path);
    std::vector<ExampleStats> loaded;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 7) throw DataIntegrityError("stats csv: bad column count: " + path);
        ExampleStats s;
        s.id = std::stoll(f[0]);
        s.forgetting_count = std::stoll(f[1]);
        if (!f[2].empty()) s.first_learning_presentation = std::stoll(f[2]);
        if (!f[4].empty()) {
            s.margin_sum_over_forgetting = std::stod(f[4]) * static_cast<double>(s.forgetting_count);
        }
        s.presentations_seen = std::stoll(f[5]);
        const bool ever = f[3] == "1";
        if (ever != s.ever_learnt()) {
            throw DataIntegrityError("stats csv: ever_learnt disagrees with t* column");
        }
        if ((f[6] == "inf") != !ever) {
            throw DataIntegrityError("stats csv: sort_key disagrees with ever_learnt");
        }
        loaded.push_back(s);
    }
    return StatsStore::from_records(std::move(loaded));
}

void export_ordering_csv(const Ordering& ordering, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << "rank,id,sort_key\n";
    for (std::size_t i = 0; i < ordering.permutation.size(); ++i) {
        out << i << ',' << ordering.permutation[i] << ',';
        if (ordering.sort_keys[i].never_learnt) {
            out << "inf";
        } else {
            out << ordering.sort_keys[i].count;
        }
        out << '\n';
    }
}

Ordering import_ordering_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ordering csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataIntegrityError("ordering csv: empty file: " + path);
    Ordering out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 3) throw DataIntegrityError("ordering csv: bad column count: " + path);
        out.permutation.push_back(std::stoll(f[1]));
        if (f[2] == "inf") {
            out.sort_keys.push_back(SortKey{true, 0});
        } else {
            out.sort_keys.push_back(SortKey{false, std::stoll(f[2])});
        }
    }
    return out;
}

}  // namespace tracker
}  // namespace forgetlens
