#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <ctime>
#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "gqm/digest.hpp"
#include "gqm/evidence.hpp"
#include "gqm/period.hpp"

namespace gqm {

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestSummary {
  std::size_t accepted = 0;
  std::vector<std::pair<std::size_t, std::string>> rejected;  // (line number, reason)
  std::vector<std::string> warnings;
};

namespace detail {

// flock-based exclusive lock; released on destruction.
class StoreLock {
 public:
  explicit StoreLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) {
      throw StoreError("cannot open store lock file " + path.string());
    }
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw StoreError("cannot acquire store lock " + path.string());
    }
  }

  ~StoreLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }

  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace detail

// Directory-backed evidence store: one append file per period
// (`<period>.ndjson`, canonical record lines) plus an `index` file mapping
// record ids to periods. The index is rebuilt from the period files on
// open, so the files alone are authoritative. A single writer ingests at a
// time; readers work from the immutable in-memory snapshot taken at open.
class EvidenceStore {
 public:
  static EvidenceStore open(const std::filesystem::path& dir, bool create = false) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir)) {
      if (!create) {
        throw StoreError("store directory does not exist: " + dir.string());
      }
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) {
        throw StoreError("cannot create store directory " + dir.string() + ": " + ec.message());
      }
    } else if (!fs::is_directory(dir)) {
      throw StoreError("store path is not a directory: " + dir.string());
    }
    EvidenceStore store;
    store.dir_ = dir;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".ndjson") {
        continue;
      }
      std::string period = entry.path().stem().string();
      std::ifstream in(entry.path());
      if (!in) {
        throw StoreError("cannot read store file " + entry.path().string());
      }
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
          continue;
        }
        RecordParse parsed = parse_record_line(line);
        if (!parsed.ok()) {
          throw StoreError("corrupt store file " + entry.path().string() + " line " +
                           std::to_string(line_no) + ": " + parsed.error);
        }
        if (!store.ids_.insert(parsed.record->record_id).second) {
          throw StoreError("corrupt store: duplicate record_id " + parsed.record->record_id);
        }
        store.by_period_[period].push_back(std::move(*parsed.record));
      }
    }
    for (auto& [period, records] : store.by_period_) {
      sort_by_id(records);
    }
    store.write_index();
    return store;
  }

  // Validates, partitions and appends records from a newline-delimited JSON
  // stream. Schema violations and duplicate ids reject the line; the rest of
  // the stream still ingests. `now` feeds the future-timestamp warning and
  // defaults to the wall clock.
  IngestSummary ingest(std::istream& lines, const PeriodPolicy& policy,
                       std::optional<std::int64_t> now = std::nullopt) {
    detail::StoreLock lock(dir_ / "lock");
    std::int64_t now_epoch = now.value_or(static_cast<std::int64_t>(::time(nullptr)));
    IngestSummary summary;
    std::map<std::string, std::ofstream> appenders;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.empty()) {
        continue;
      }
      RecordParse parsed = parse_record_line(line);
      if (!parsed.ok()) {
        summary.rejected.emplace_back(line_no, parsed.error);
        continue;
      }
      EvidenceRecord record = std::move(*parsed.record);
      if (ids_.contains(record.record_id)) {
        summary.rejected.emplace_back(line_no, "duplicate record_id " + record.record_id);
        continue;
      }
      if (record.epoch > now_epoch) {
        summary.warnings.push_back("record " + record.record_id +
                                   " has a future timestamp " + record.timestamp);
      }
      std::string period = assign_period(record.epoch, policy);
      std::ofstream& out = appender(appenders, period);
      out << canonical_record_line(record) << '\n';
      if (!out) {
        throw StoreError("cannot append to store file for period " + period);
      }
      ids_.insert(record.record_id);
      by_period_[period].push_back(std::move(record));
      summary.accepted += 1;
    }
    if (lines.bad()) {
      throw StoreError("I/O error while reading evidence stream");
    }
    for (auto& [period, out] : appenders) {
      out.flush();
      if (!out) {
        throw StoreError("cannot flush store file for period " + period);
      }
    }
    for (auto& [period, records] : by_period_) {
      sort_by_id(records);
    }
    write_index();
    return summary;
  }

  // The period's records of that kind satisfying all predicates, sorted by
  // record_id. Unknown periods yield an empty set.
  std::vector<EvidenceRecord> query(std::string_view kind, std::string_view period,
                                    std::span<const Predicate> predicates) const {
    std::vector<EvidenceRecord> out;
    for (const EvidenceRecord& record : period_records(period)) {
      if (record.kind == kind && matches_all(record, predicates)) {
        out.push_back(record);
      }
    }
    return out;
  }

  std::span<const EvidenceRecord> period_records(std::string_view period) const {
    auto it = by_period_.find(std::string(period));
    if (it == by_period_.end()) {
      return {};
    }
    return it->second;
  }

  // FNV-1a 64 over the canonical serialization of the period's records in
  // record_id order; ingestion order does not affect it.
  std::string snapshot_digest(std::string_view period) const {
    Fnv1a64 h;
    for (const EvidenceRecord& record : period_records(period)) {
      h.update(canonical_record_line(record));
      h.update("\n");
    }
    return to_hex16(h.value());
  }

  std::vector<std::string> period_ids() const {
    std::vector<std::string> out;
    for (const auto& [period, records] : by_period_) {
      out.push_back(period);
    }
    return out;
  }

  std::size_t record_count() const { return ids_.size(); }

  const std::filesystem::path& directory() const { return dir_; }

 private:
  static void sort_by_id(std::vector<EvidenceRecord>& records) {
    std::sort(records.begin(), records.end(),
              [](const EvidenceRecord& a, const EvidenceRecord& b) {
                return a.record_id < b.record_id;
              });
  }

  std::ofstream& appender(std::map<std::string, std::ofstream>& appenders,
                          const std::string& period) {
    auto it = appenders.find(period);
    if (it == appenders.end()) {
      std::ofstream out(dir_ / (period + ".ndjson"), std::ios::app);
      if (!out) {
        throw StoreError("cannot open store file for period " + period);
      }
      it = appenders.emplace(period, std::move(out)).first;
    }
    return it->second;
  }

  void write_index() const {
    std::map<std::string, std::string> index;  // record_id -> period, sorted
    for (const auto& [period, records] : by_period_) {
      for (const EvidenceRecord& record : records) {
        index[record.record_id] = period;
      }
    }
    std::ofstream out(dir_ / "index", std::ios::trunc);
    if (!out) {
      throw StoreError("cannot write store index in " + dir_.string());
    }
    for (const auto& [id, period] : index) {
      out << id << '\t' << period << '\n';
    }
  }

  std::filesystem::path dir_;
  std::map<std::string, std::vector<EvidenceRecord>> by_period_;
  std::set<std::string> ids_;
};

}  // namespace gqm
