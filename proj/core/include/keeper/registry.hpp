#pragma once

#include <chrono>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace keeper {

struct RemoteTagList {
  std::string repo;
  std::vector<std::string> tags;  // deduplicated, first-seen order
  std::chrono::system_clock::time_point fetched_at;
};

class TagSource {
 public:
  virtual ~TagSource() = default;
  virtual std::vector<std::string> list_tags(const std::string& repo) = 0;
};

// One tag per line; blank lines and #-prefixed comment lines are skipped.
class FileTagSource : public TagSource {
 public:
  explicit FileTagSource(std::string path);
  std::vector<std::string> list_tags(const std::string& repo) override;

 private:
  std::string path_;
};

// Paginated Docker Hub v2 repository-tags endpoint, following `next` links.
class HttpTagSource : public TagSource {
 public:
  struct Options {
    std::string base_url = "https://hub.docker.com";
    int page_size = 100;
    int attempts = 3;
    std::chrono::milliseconds retry_delay{2000};
    // Test seam; defaults to a real sleep.
    std::function<void(std::chrono::milliseconds)> sleeper;
  };

  HttpTagSource();
  explicit HttpTagSource(Options options);
  std::vector<std::string> list_tags(const std::string& repo) override;

 private:
  Options options_;
};

RemoteTagList fetch_remote_tags(const std::string& repo, TagSource& transport);

// remote \ expected \ protect, sorted and duplicate-free.  Report only:
// nothing here ever deletes a remote tag.
std::vector<std::string> compute_obsolete_tags(const std::set<std::string>& expected,
                                               const RemoteTagList& remote,
                                               const std::set<std::string>& protect = {});

}  // namespace keeper
