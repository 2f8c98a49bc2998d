#include "mtkit/corpus_io.h"

#include <fstream>
#include <nlohmann/json.hpp>

#include "mtkit/util.h"

namespace mtkit {

using nlohmann::json;

CorpusFormat corpus_format_from_string(const std::string& s) {
  if (s == "jsonl") return CorpusFormat::Jsonl;
  if (s == "tsv") return CorpusFormat::Tsv;
  if (s == "moses" || s == "moses-pair") return CorpusFormat::MosesPair;
  throw std::invalid_argument("unknown corpus format: " + s);
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorpusError("cannot open: " + path);
  return f;
}

// Reads the next line, stripping the trailing carriage return so CRLF input
// never leaks '\r' into record texts.
bool next_line(std::istream& in, std::string& line, size_t& line_no) {
  if (!std::getline(in, line)) return false;
  line = strip_trailing_cr(std::move(line));
  ++line_no;
  return true;
}

bool check_utf8(const std::string& text, size_t line_no, const char* field,
                const LineErrorHandler& on_error) {
  if (auto off = find_invalid_utf8(text)) {
    on_error({line_no, std::string("invalid UTF-8 in ") + field +
                           " at byte offset " + std::to_string(*off)});
    return false;
  }
  return true;
}

// Record texts must be non-empty after trimming.
bool check_nonempty(const std::string& text, size_t line_no, const char* field,
                    const LineErrorHandler& on_error) {
  if (trim(text).empty()) {
    on_error({line_no, std::string(field) + " is empty after trimming"});
    return false;
  }
  return true;
}

class JsonlParallelStream : public ParallelStream {
 public:
  JsonlParallelStream(std::string path, LineErrorHandler on_error)
      : in_(open_or_throw(path)), on_error_(std::move(on_error)) {}

  bool next(ParallelRecord& out) override {
    std::string line;
    while (next_line(in_, line, line_no_)) {
      if (trim(line).empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        on_error_({line_no_, "malformed JSON"});
        continue;
      }
      if (!j.contains("src_lang") || !j.contains("tgt_lang") ||
          !j.contains("src_text") || !j.contains("tgt_text")) {
        on_error_({line_no_, "missing required field (src_lang/tgt_lang/src_text/tgt_text)"});
        continue;
      }
      ParallelRecord r;
      try {
        r.src_lang = j.at("src_lang").get<std::string>();
        r.tgt_lang = j.at("tgt_lang").get<std::string>();
        r.src_text = j.at("src_text").get<std::string>();
        r.tgt_text = j.at("tgt_text").get<std::string>();
        if (j.contains("similarity") && !j.at("similarity").is_null())
          r.similarity = j.at("similarity").get<double>();
        if (j.contains("provenance"))
          r.provenance = j.at("provenance").get<std::string>();
      } catch (const json::exception& e) {
        on_error_({line_no_, std::string("bad field type: ") + e.what()});
        continue;
      }
      if (!check_utf8(r.src_text, line_no_, "src_text", on_error_) ||
          !check_utf8(r.tgt_text, line_no_, "tgt_text", on_error_) ||
          !check_nonempty(r.src_text, line_no_, "src_text", on_error_) ||
          !check_nonempty(r.tgt_text, line_no_, "tgt_text", on_error_))
        continue;
      out = std::move(r);
      return true;
    }
    return false;
  }

 private:
  std::ifstream in_;
  LineErrorHandler on_error_;
  size_t line_no_ = 0;
};

class TsvParallelStream : public ParallelStream {
 public:
  TsvParallelStream(std::string path, LineErrorHandler on_error)
      : in_(open_or_throw(path)), on_error_(std::move(on_error)) {}

  bool next(ParallelRecord& out) override {
    std::string line;
    while (next_line(in_, line, line_no_)) {
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 4) {
        on_error_({line_no_, "expected 4 tab-separated columns, got " +
                                 std::to_string(cols.size())});
        continue;
      }
      ParallelRecord r{std::string(cols[0]), std::string(cols[1]),
                       std::string(cols[2]), std::string(cols[3]),
                       std::nullopt, ""};
      if (!check_utf8(r.src_text, line_no_, "src_text", on_error_) ||
          !check_utf8(r.tgt_text, line_no_, "tgt_text", on_error_) ||
          !check_nonempty(r.src_text, line_no_, "src_text", on_error_) ||
          !check_nonempty(r.tgt_text, line_no_, "tgt_text", on_error_))
        continue;
      out = std::move(r);
      return true;
    }
    return false;
  }

 private:
  std::ifstream in_;
  LineErrorHandler on_error_;
  size_t line_no_ = 0;
};

// Two aligned files, one sentence per line. Alignment is forced: a length
// mismatch is a hard error naming both counts.
class MosesPairStream : public ParallelStream {
 public:
  MosesPairStream(std::string src_path, std::string tgt_path,
                  std::string src_lang, std::string tgt_lang,
                  LineErrorHandler on_error)
      : src_in_(open_or_throw(src_path)),
        tgt_in_(open_or_throw(tgt_path)),
        src_path_(std::move(src_path)),
        tgt_path_(std::move(tgt_path)),
        src_lang_(std::move(src_lang)),
        tgt_lang_(std::move(tgt_lang)),
        on_error_(std::move(on_error)) {}

  bool next(ParallelRecord& out) override {
    std::string src_line, tgt_line;
    for (;;) {
      size_t tgt_no = line_no_;
      bool has_src = next_line(src_in_, src_line, line_no_);
      bool has_tgt = next_line(tgt_in_, tgt_line, tgt_no);
      if (has_src != has_tgt) throw mismatch_error(has_src);
      if (!has_src) return false;
      ParallelRecord r{src_lang_, tgt_lang_, src_line, tgt_line, std::nullopt, ""};
      if (!check_utf8(r.src_text, line_no_, "src_text", on_error_) ||
          !check_utf8(r.tgt_text, line_no_, "tgt_text", on_error_) ||
          !check_nonempty(r.src_text, line_no_, "src_text", on_error_) ||
          !check_nonempty(r.tgt_text, line_no_, "tgt_text", on_error_))
        continue;
      out = std::move(r);
      return true;
    }
  }

 private:
  CorpusError mismatch_error(bool src_longer) {
    size_t shorter = line_no_ - (src_longer ? 1 : 0);
    // Count the rest of the longer file so the error names both lengths.
    std::istream& longer = src_longer ? src_in_ : tgt_in_;
    size_t longer_count = shorter + 1;
    std::string sink;
    while (std::getline(longer, sink)) ++longer_count;
    size_t src_n = src_longer ? longer_count : shorter;
    size_t tgt_n = src_longer ? shorter : longer_count;
    return CorpusError("moses pair line counts differ: " + src_path_ + " has " +
                       std::to_string(src_n) + " lines, " + tgt_path_ +
                       " has " + std::to_string(tgt_n));
  }

  std::ifstream src_in_;
  std::ifstream tgt_in_;
  std::string src_path_;
  std::string tgt_path_;
  std::string src_lang_;
  std::string tgt_lang_;
  LineErrorHandler on_error_;
  size_t line_no_ = 0;
};

class JsonlMonoStream : public MonoStream {
 public:
  JsonlMonoStream(std::string path, LineErrorHandler on_error)
      : in_(open_or_throw(path)), on_error_(std::move(on_error)) {}

  bool next(MonoRecord& out) override {
    std::string line;
    while (next_line(in_, line, line_no_)) {
      if (trim(line).empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        on_error_({line_no_, "malformed JSON"});
        continue;
      }
      if (!j.contains("lang") || !j.contains("text")) {
        on_error_({line_no_, "missing required field (lang/text)"});
        continue;
      }
      MonoRecord r;
      try {
        r.lang = j.at("lang").get<std::string>();
        r.text = j.at("text").get<std::string>();
        if (j.contains("token_count")) r.token_count = j.at("token_count").get<int64_t>();
      } catch (const json::exception& e) {
        on_error_({line_no_, std::string("bad field type: ") + e.what()});
        continue;
      }
      if (!check_utf8(r.text, line_no_, "text", on_error_) ||
          !check_nonempty(r.text, line_no_, "text", on_error_))
        continue;
      out = std::move(r);
      return true;
    }
    return false;
  }

 private:
  std::ifstream in_;
  LineErrorHandler on_error_;
  size_t line_no_ = 0;
};

class TsvMonoStream : public MonoStream {
 public:
  TsvMonoStream(std::string path, LineErrorHandler on_error)
      : in_(open_or_throw(path)), on_error_(std::move(on_error)) {}

  bool next(MonoRecord& out) override {
    std::string line;
    while (next_line(in_, line, line_no_)) {
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 2) {
        on_error_({line_no_, "expected 2 tab-separated columns, got " +
                                 std::to_string(cols.size())});
        continue;
      }
      MonoRecord r{std::string(cols[0]), std::string(cols[1]), 0};
      if (!check_utf8(r.text, line_no_, "text", on_error_) ||
          !check_nonempty(r.text, line_no_, "text", on_error_))
        continue;
      out = std::move(r);
      return true;
    }
    return false;
  }

 private:
  std::ifstream in_;
  LineErrorHandler on_error_;
  size_t line_no_ = 0;
};

LineErrorHandler or_noop(LineErrorHandler h) {
  if (h) return h;
  return [](const LineError&) {};
}

}  // namespace

std::unique_ptr<ParallelStream> open_parallel(const std::string& path,
                                              CorpusFormat format,
                                              LineErrorHandler on_error,
                                              const std::string& second_path,
                                              const std::string& src_lang,
                                              const std::string& tgt_lang) {
  auto handler = or_noop(std::move(on_error));
  switch (format) {
    case CorpusFormat::Jsonl:
      return std::make_unique<JsonlParallelStream>(path, handler);
    case CorpusFormat::Tsv:
      return std::make_unique<TsvParallelStream>(path, handler);
    case CorpusFormat::MosesPair:
      if (second_path.empty())
        throw CorpusError("moses-pair format needs two files");
      return std::make_unique<MosesPairStream>(path, second_path, src_lang,
                                               tgt_lang, handler);
  }
  throw CorpusError("unreachable");
}

std::unique_ptr<MonoStream> open_mono(const std::string& path,
                                      CorpusFormat format,
                                      LineErrorHandler on_error) {
  auto handler = or_noop(std::move(on_error));
  switch (format) {
    case CorpusFormat::Jsonl:
      return std::make_unique<JsonlMonoStream>(path, handler);
    case CorpusFormat::Tsv:
      return std::make_unique<TsvMonoStream>(path, handler);
    case CorpusFormat::MosesPair:
      throw CorpusError("moses-pair is a parallel-only format");
  }
  throw CorpusError("unreachable");
}

std::vector<ParallelRecord> read_all(ParallelStream& in) {
  std::vector<ParallelRecord> out;
  ParallelRecord r;
  while (in.next(r)) out.push_back(std::move(r));
  return out;
}

std::vector<MonoRecord> read_all(MonoStream& in) {
  std::vector<MonoRecord> out;
  MonoRecord r;
  while (in.next(r)) out.push_back(std::move(r));
  return out;
}

std::string parallel_to_json_line(const ParallelRecord& r) {
  json j;
  j["src_lang"] = r.src_lang;
  j["tgt_lang"] = r.tgt_lang;
  j["src_text"] = r.src_text;
  j["tgt_text"] = r.tgt_text;
  if (r.similarity) j["similarity"] = *r.similarity;
  if (!r.provenance.empty()) j["provenance"] = r.provenance;
  return j.dump();
}

std::string mono_to_json_line(const MonoRecord& r) {
  json j;
  j["lang"] = r.lang;
  j["text"] = r.text;
  if (r.token_count > 0) j["token_count"] = r.token_count;
  return j.dump();
}

namespace {
std::ofstream open_out_or_throw(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CorpusError("cannot write: " + path);
  return f;
}
}  // namespace

void write_parallel_jsonl(const std::string& path,
                          const std::vector<ParallelRecord>& records) {
  auto f = open_out_or_throw(path);
  for (const auto& r : records) f << parallel_to_json_line(r) << '\n';
}

void write_mono_jsonl(const std::string& path,
                      const std::vector<MonoRecord>& records) {
  auto f = open_out_or_throw(path);
  for (const auto& r : records) f << mono_to_json_line(r) << '\n';
}

}  // namespace mtkit
