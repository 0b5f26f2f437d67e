#include "twcrawl/processor.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "twcrawl/errors.hpp"

namespace twcrawl {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path);
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

ordered_json optional_json(const std::optional<std::string>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

ProcessedTweet process_record(TweetRecord record, const Gazetteer& gazetteer) {
  LocationMatch m = gazetteer.detect(record.location);
  return ProcessedTweet{std::move(record), std::move(m.country), std::move(m.city)};
}

ProcessResult process_lines(std::string_view text, const Gazetteer& gazetteer) {
  ProcessResult result;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    try {
      TweetRecord record = decode_record(line);
      if (record_violation(record)) {
        ++result.skipped;
      } else {
        result.records.push_back(process_record(std::move(record), gazetteer));
      }
    } catch (const FieldCountError&) {
      ++result.skipped;
    }
    start = end + 1;
  }
  return result;
}

ProcessResult process_file(const std::string& in_path, const Gazetteer& gazetteer,
                           const std::string& out_root) {
  auto loc = parse_crawl_file_path(in_path);
  if (!loc) throw Error("not a crawl file path: " + in_path);
  ProcessResult result = process_lines(read_file(in_path), gazetteer);
  loc->kind = FileKind::processed;
  result.output_path = processed_file_path(*loc, out_root);
  write_file(result.output_path, processed_to_json(result.records));
  return result;
}

std::vector<ProcessResult> process_directory(const std::string& in_dir, const Gazetteer& gazetteer,
                                             const std::string& out_root, unsigned workers) {
  if (!fs::is_directory(in_dir)) throw IoError("not a directory: " + in_dir);
  std::vector<std::string> inputs;
  for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string path = entry.path().generic_string();
    if (parse_crawl_file_path(path)) inputs.push_back(path);
  }
  std::sort(inputs.begin(), inputs.end());

  std::vector<ProcessResult> results(inputs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(inputs.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < inputs.size(); i = next++) {
            results[i] = process_file(inputs[i], gazetteer, out_root);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string processed_to_json(const std::vector<ProcessedTweet>& records) {
  if (records.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ProcessedTweet& p = records[i];
    const TweetRecord& r = p.record;
    const ordered_json j = {{"creation_date", r.creation_date},
                            {"id", r.id},
                            {"lang", r.lang},
                            {"location", r.location},
                            {"name", r.name},
                            {"username", r.username},
                            {"text", r.text},
                            {"country", optional_json(p.country)},
                            {"city", optional_json(p.city)}};
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += i + 1 < records.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::vector<ProcessedTweet> processed_from_json(std::string_view json) {
  std::vector<ProcessedTweet> out;
  try {
    const auto doc = nlohmann::json::parse(json);
    if (!doc.is_array()) throw Error("processed file is not a JSON array");
    out.reserve(doc.size());
    for (const auto& j : doc) {
      ProcessedTweet p;
      p.record.creation_date = j.at("creation_date").get<std::string>();
      p.record.id = j.at("id").get<std::string>();
      p.record.lang = j.at("lang").get<std::string>();
      p.record.location = j.at("location").get<std::string>();
      p.record.name = j.at("name").get<std::string>();
      p.record.username = j.at("username").get<std::string>();
      p.record.text = j.at("text").get<std::string>();
      p.country = optional_string(j, "country");
      p.city = optional_string(j, "city");
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed processed JSON: ") + e.what());
  }
  return out;
}

std::vector<ProcessedTweet> load_processed_file(const std::string& path) {
  return processed_from_json(read_file(path));
}

}  // namespace twcrawl
