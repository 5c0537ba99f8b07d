#include "keeper/http.hpp"

#include <httplib.h>

#include "keeper/errors.hpp"

namespace keeper {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("unsupported URL '" + url + "'");
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string url_encode(const std::string& text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    bool plain = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                 c == '-' || c == '_' || c == '.' || c == '~';
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

HttpResponse finish(const std::string& url, const httplib::Result& result) {
  if (!result) {
    throw TransportError("request to '" + url +
                         "' failed: " + httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

}  // namespace

HttpResponse http_get(const std::string& url) {
  SplitUrl split = split_url(url);
  httplib::Client client(split.origin);
  client.set_follow_location(true);
  return finish(url, client.Get(split.target));
}

HttpResponse http_post_form(const std::string& url, const OrderedArgs& fields) {
  SplitUrl split = split_url(url);
  httplib::Client client(split.origin);
  std::string body;
  for (const auto& [key, value] : fields) {
    if (!body.empty()) body += '&';
    body += url_encode(key) + "=" + url_encode(value);
  }
  return finish(url, client.Post(split.target, body, "application/x-www-form-urlencoded"));
}

}  // namespace keeper
