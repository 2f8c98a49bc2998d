#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtkit/records.h"

namespace mtkit {

enum class CorpusFormat { Jsonl, Tsv, MosesPair };

CorpusFormat corpus_format_from_string(const std::string& s);

// Unrecoverable I/O or framing failure (missing file, misaligned moses pair).
struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A per-line problem: the line is skipped, reported, never silently dropped.
struct LineError {
  size_t line_no = 0;  // 1-based
  std::string message;
};

using LineErrorHandler = std::function<void(const LineError&)>;

// Single-consumer pull streams. Records are immutable values; independent
// readers may run on different threads, one consumer per stream.
class ParallelStream {
 public:
  virtual ~ParallelStream() = default;
  virtual bool next(ParallelRecord& out) = 0;
};

class MonoStream {
 public:
  virtual ~MonoStream() = default;
  virtual bool next(MonoRecord& out) = 0;
};

// In-memory adapters.
class VectorParallelStream : public ParallelStream {
 public:
  explicit VectorParallelStream(std::vector<ParallelRecord> records)
      : records_(std::move(records)) {}
  bool next(ParallelRecord& out) override {
    if (i_ >= records_.size()) return false;
    out = records_[i_++];
    return true;
  }

 private:
  std::vector<ParallelRecord> records_;
  size_t i_ = 0;
};

class VectorMonoStream : public MonoStream {
 public:
  explicit VectorMonoStream(std::vector<MonoRecord> records)
      : records_(std::move(records)) {}
  bool next(MonoRecord& out) override {
    if (i_ >= records_.size()) return false;
    out = records_[i_++];
    return true;
  }

 private:
  std::vector<MonoRecord> records_;
  size_t i_ = 0;
};

// Opens a parallel corpus. For MosesPair, `path` holds the source-side file
// and `second_path` the target-side file; the declared languages are applied
// to every record. Throws CorpusError when the file cannot be opened; for
// MosesPair a line-count mismatch surfaces as CorpusError naming both lengths.
std::unique_ptr<ParallelStream> open_parallel(
    const std::string& path, CorpusFormat format, LineErrorHandler on_error,
    const std::string& second_path = "", const std::string& src_lang = "",
    const std::string& tgt_lang = "");

std::unique_ptr<MonoStream> open_mono(const std::string& path,
                                      CorpusFormat format,
                                      LineErrorHandler on_error);

// Drains a stream into a vector (desk-scale convenience).
std::vector<ParallelRecord> read_all(ParallelStream& in);
std::vector<MonoRecord> read_all(MonoStream& in);

// Canonical JSONL writers. write/read round-trips field-for-field.
void write_parallel_jsonl(const std::string& path,
                          const std::vector<ParallelRecord>& records);
void write_mono_jsonl(const std::string& path,
                      const std::vector<MonoRecord>& records);

std::string parallel_to_json_line(const ParallelRecord& r);
std::string mono_to_json_line(const MonoRecord& r);

}  // namespace mtkit
