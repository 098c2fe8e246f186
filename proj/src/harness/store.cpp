#include "robustbench/harness/store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>
#include <map>

#include "robustbench/error.hpp"

namespace robustbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kHeader = "header.json";
constexpr const char* kRecords = "records.jsonl";
constexpr const char* kJournal = "journal.jsonl";
constexpr int kFormatVersion = 1;

[[noreturn]] void corrupt(const fs::path& dir, const std::string& msg) {
  throw Error(ErrorCode::StoreCorrupt, dir.string() + ": " + msg);
}

json key_to_json(const UnitKey& k) {
  json j{{"model_id", k.model_id}, {"sample_id", k.sample_id}};
  if (k.clean()) {
    j["kind"] = nullptr;
  } else {
    j["kind"] = k.kind;
    j["severity_index"] = k.severity_index;
    j["rep"] = k.rep;
  }
  return j;
}

UnitKey key_from_json(const json& j) {
  UnitKey k;
  k.model_id = j.at("model_id").get<std::string>();
  k.sample_id = j.at("sample_id").get<std::string>();
  if (!j.at("kind").is_null()) {
    k.kind = j.at("kind").get<std::string>();
    k.severity_index = j.at("severity_index").get<int>();
    k.rep = j.at("rep").get<int>();
  }
  return k;
}

json journal_to_json(const JournalEntry& e) {
  json j = key_to_json(e.key);
  j["status"] = e.skipped ? "skipped" : "done";
  if (e.skipped) j["error"] = e.error;
  return j;
}

JournalEntry journal_from_json(const json& j) {
  JournalEntry e{key_from_json(j), false, {}};
  const auto status = j.at("status").get<std::string>();
  if (status == "skipped") {
    e.skipped = true;
    e.error = j.value("error", std::string());
  } else if (status != "done") {
    throw std::invalid_argument("unknown journal status '" + status + "'");
  }
  return e;
}

struct Line {
  std::string text;
  std::size_t end_offset = 0;  // byte offset just past the newline
};

// Complete lines of a file plus the size of the file up to the last newline.
std::vector<Line> read_lines(const fs::path& path, std::size_t& complete_size, std::size_t& file_size) {
  std::vector<Line> lines;
  complete_size = file_size = 0;
  std::ifstream in(path, std::ios::binary);
  if (!in) return lines;
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  file_size = data.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] != '\n') continue;
    if (i > start) lines.push_back({data.substr(start, i - start), i + 1});
    start = i + 1;
  }
  complete_size = start;
  return lines;
}

struct ParsedStore {
  std::vector<EvalRecord> records;
  std::vector<std::size_t> record_ends;
  std::vector<JournalEntry> journal;
  std::size_t records_complete = 0, records_size = 0;
  std::size_t journal_complete = 0, journal_size = 0;
};

ParsedStore parse_store_files(const fs::path& dir) {
  ParsedStore p;
  for (const auto& line : read_lines(dir / kRecords, p.records_complete, p.records_size)) {
    try {
      p.records.push_back(record_from_json(json::parse(line.text)));
      p.record_ends.push_back(line.end_offset);
    } catch (const std::exception& e) {
      corrupt(dir, std::string("bad record line: ") + e.what());
    }
  }
  for (const auto& line : read_lines(dir / kJournal, p.journal_complete, p.journal_size)) {
    try {
      p.journal.push_back(journal_from_json(json::parse(line.text)));
    } catch (const std::exception& e) {
      corrupt(dir, std::string("bad journal line: ") + e.what());
    }
  }
  return p;
}

StoreHeader read_header(const fs::path& dir) {
  std::ifstream in(dir / kHeader);
  if (!in) throw Error(ErrorCode::Unreadable, "no run store at " + dir.string());
  try {
    return header_from_json(json::parse(in));
  } catch (const std::exception& e) {
    corrupt(dir, std::string("bad header: ") + e.what());
  }
}

// Journal/record agreement. Returns the number of records that are covered
// by the journal; anything beyond is an uncommitted tail.
std::size_t check_consistency(const fs::path& dir, const ParsedStore& p) {
  std::map<UnitKey, std::size_t> record_pos;
  for (std::size_t i = 0; i < p.records.size(); ++i) {
    if (!record_pos.emplace(p.records[i].key, i).second) corrupt(dir, "duplicate record key");
  }
  std::set<UnitKey> journaled;
  std::size_t covered = 0;
  for (const auto& e : p.journal) {
    if (!journaled.insert(e.key).second) corrupt(dir, "duplicate journal key");
    const auto it = record_pos.find(e.key);
    if (e.skipped) {
      if (it != record_pos.end()) corrupt(dir, "skipped unit has a record");
      continue;
    }
    if (it == record_pos.end()) corrupt(dir, "journal entry without record");
    covered = std::max(covered, it->second + 1);
  }
  for (std::size_t i = 0; i < covered; ++i) {
    if (!journaled.count(p.records[i].key)) corrupt(dir, "record without journal entry");
  }
  return covered;
}

void write_header(const fs::path& dir, const StoreHeader& header) {
  const fs::path tmp = dir / (std::string(kHeader) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << header_to_json(header).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Unreadable, "cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / kHeader);
}

void put_line(std::FILE* f, const json& j, const fs::path& dir) {
  const std::string s = j.dump() + '\n';
  if (std::fwrite(s.data(), 1, s.size(), f) != s.size() || std::fflush(f) != 0) {
    corrupt(dir, "write failed");
  }
}

}  // namespace

json record_to_json(const EvalRecord& r) {
  json j = key_to_json(r.key);
  j["run_id"] = r.run_id;
  j["seed"] = r.seed;
  j["clean_prediction"] = r.clean_prediction;
  j["prediction"] = r.prediction ? json(*r.prediction) : json(nullptr);
  j["truth"] = r.truth ? json(*r.truth) : json(nullptr);
  j["timestamp"] = r.timestamp;
  return j;
}

EvalRecord record_from_json(const json& j) {
  EvalRecord r;
  r.key = key_from_json(j);
  r.run_id = j.at("run_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.clean_prediction = j.at("clean_prediction").get<std::size_t>();
  if (!j.at("prediction").is_null()) r.prediction = j.at("prediction").get<std::size_t>();
  if (!j.at("truth").is_null()) r.truth = j.at("truth").get<std::size_t>();
  r.timestamp = j.value("timestamp", std::string());
  if (r.key.clean() == r.prediction.has_value()) {
    throw std::invalid_argument("clean records carry no corrupted prediction, corrupted records need one");
  }
  return r;
}

json header_to_json(const StoreHeader& h) {
  return {{"format", kFormatVersion},         {"run_id", h.run_id},
          {"config_hash", h.config_hash},     {"dataset_hash", h.dataset_hash},
          {"config", h.config},               {"labels", h.labels},
          {"supervised", h.supervised},       {"n_samples", h.n_samples},
          {"expected_units", h.expected_units}, {"created_at", h.created_at}};
}

StoreHeader header_from_json(const json& j) {
  if (j.at("format").get<int>() != kFormatVersion) throw std::invalid_argument("unsupported store format");
  StoreHeader h;
  h.run_id = j.at("run_id").get<std::string>();
  h.config_hash = j.at("config_hash").get<std::string>();
  h.dataset_hash = j.at("dataset_hash").get<std::string>();
  h.config = j.at("config");
  h.labels = j.at("labels").get<std::vector<std::string>>();
  h.supervised = j.at("supervised").get<bool>();
  h.n_samples = j.at("n_samples").get<std::size_t>();
  h.expected_units = j.at("expected_units").get<std::size_t>();
  h.created_at = j.value("created_at", std::string());
  return h;
}

StoreContents read_store(const fs::path& dir) {
  StoreContents s;
  s.header = read_header(dir);
  ParsedStore p = parse_store_files(dir);
  const std::size_t covered = check_consistency(dir, p);
  p.records.resize(covered);
  s.records = std::move(p.records);
  s.journal = std::move(p.journal);
  return s;
}

RunStore::RunStore(const fs::path& dir, const StoreHeader& header) : dir_(dir) {
  std::error_code ec;
  if (fs::exists(dir / kHeader, ec)) {
    const StoreHeader existing = read_header(dir);
    if (existing.config_hash != header.config_hash) corrupt(dir, "config hash differs from the stored run");
    if (existing.dataset_hash != header.dataset_hash) corrupt(dir, "dataset hash differs from the stored run");
  } else {
    fs::create_directories(dir);
    write_header(dir, header);
  }

  ParsedStore p = parse_store_files(dir);
  const std::size_t covered = check_consistency(dir, p);
  const std::size_t records_keep = covered == 0 ? 0 : p.record_ends[covered - 1];
  if (fs::exists(dir / kRecords) && records_keep != p.records_size) fs::resize_file(dir / kRecords, records_keep);
  if (fs::exists(dir / kJournal) && p.journal_complete != p.journal_size) {
    fs::resize_file(dir / kJournal, p.journal_complete);
  }
  p.records.resize(covered);

  for (const auto& r : p.records) {
    if (r.key.clean()) clean_[{r.key.model_id, r.key.sample_id}] = r.clean_prediction;
  }
  for (const auto& e : p.journal) completed_.insert(e.key);
  n_records_ = p.records.size();

  records_ = std::fopen((dir / kRecords).c_str(), "ab");
  journal_ = std::fopen((dir / kJournal).c_str(), "ab");
  if (!records_ || !journal_) {
    if (records_) std::fclose(records_);
    if (journal_) std::fclose(journal_);
    throw Error(ErrorCode::Unreadable, "cannot open store files in " + dir.string());
  }
}

RunStore::~RunStore() {
  std::fclose(records_);
  std::fclose(journal_);
}

std::optional<std::size_t> RunStore::clean_prediction(const std::string& model_id,
                                                      const std::string& sample_id) const {
  const auto it = clean_.find({model_id, sample_id});
  if (it == clean_.end()) return std::nullopt;
  return it->second;
}

void RunStore::append(const EvalRecord& record) {
  if (completed_.count(record.key)) corrupt(dir_, "unit appended twice");
  put_line(records_, record_to_json(record), dir_);
  put_line(journal_, journal_to_json({record.key, false, {}}), dir_);
  completed_.insert(record.key);
  if (record.key.clean()) clean_[{record.key.model_id, record.key.sample_id}] = record.clean_prediction;
  ++n_records_;
}

void RunStore::append_skipped(const UnitKey& key, const std::string& error) {
  if (completed_.count(key)) corrupt(dir_, "unit appended twice");
  put_line(journal_, journal_to_json({key, true, error}), dir_);
  completed_.insert(key);
}

std::string canonical_store(const fs::path& dir) {
  const StoreContents s = read_store(dir);
  std::vector<std::string> records;
  for (const auto& r : s.records) {
    json j = record_to_json(r);
    j.erase("timestamp");
    records.push_back(j.dump());
  }
  std::vector<std::string> journal;
  for (const auto& e : s.journal) journal.push_back(journal_to_json(e).dump());
  std::sort(records.begin(), records.end());
  std::sort(journal.begin(), journal.end());
  std::string out = "config_hash " + s.header.config_hash + "\ndataset_hash " + s.header.dataset_hash + "\n";
  for (const auto& r : records) out += r + '\n';
  out += "--\n";
  for (const auto& e : journal) out += e + '\n';
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace robustbench
