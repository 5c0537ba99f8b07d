#include "keeper/registry.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <thread>

#include "keeper/errors.hpp"
#include "keeper/http.hpp"

namespace keeper {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

HttpResponse get_with_retry(const std::string& url, const HttpTagSource::Options& options) {
  for (int attempt = 1;; ++attempt) {
    try {
      HttpResponse response = http_get(url);
      if (response.status == 200) return response;
      if (attempt >= options.attempts) {
        throw TransportError("GET '" + url + "' returned status " +
                             std::to_string(response.status) + " after " +
                             std::to_string(attempt) + " attempts");
      }
    } catch (const TransportError&) {
      if (attempt >= options.attempts) throw;
    }
    if (options.sleeper) {
      options.sleeper(options.retry_delay);
    } else {
      std::this_thread::sleep_for(options.retry_delay);
    }
  }
}

}  // namespace

FileTagSource::FileTagSource(std::string path) : path_(std::move(path)) {}

std::vector<std::string> FileTagSource::list_tags(const std::string&) {
  std::ifstream in(path_);
  if (!in) {
    throw IoError("cannot read tag list '" + path_ + "'");
  }
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim_copy(line);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

HttpTagSource::HttpTagSource() : HttpTagSource(Options()) {}

HttpTagSource::HttpTagSource(Options options) : options_(std::move(options)) {}

std::vector<std::string> HttpTagSource::list_tags(const std::string& repo) {
  std::vector<std::string> out;
  std::string url = options_.base_url + "/v2/repositories/" + repo +
                    "/tags?page_size=" + std::to_string(options_.page_size);
  while (!url.empty()) {
    HttpResponse response = get_with_retry(url, options_);
    nlohmann::json page = nlohmann::json::parse(response.body, nullptr, false);
    if (page.is_discarded() || !page.is_object() || !page.contains("results") ||
        !page["results"].is_array()) {
      throw ProtocolError("malformed tag page from '" + url + "'");
    }
    for (const auto& entry : page["results"]) {
      if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
        throw ProtocolError("tag entry without a name from '" + url + "'");
      }
      out.push_back(entry["name"].get<std::string>());
    }
    if (page.contains("next") && page["next"].is_string()) {
      url = page["next"].get<std::string>();
    } else {
      url.clear();
    }
  }
  return out;
}

RemoteTagList fetch_remote_tags(const std::string& repo, TagSource& transport) {
  RemoteTagList out;
  out.repo = repo;
  std::set<std::string> seen;
  for (std::string& tag : transport.list_tags(repo)) {
    if (seen.insert(tag).second) out.tags.push_back(std::move(tag));
  }
  out.fetched_at = std::chrono::system_clock::now();
  return out;
}

std::vector<std::string> compute_obsolete_tags(const std::set<std::string>& expected,
                                               const RemoteTagList& remote,
                                               const std::set<std::string>& protect) {
  std::vector<std::string> out;
  for (const std::string& tag : remote.tags) {
    if (!expected.count(tag) && !protect.count(tag)) out.push_back(tag);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace keeper
