#pragma once

#include <string>

#include "keeper/spec_model.hpp"

namespace keeper {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Plain GET against an absolute http(s) URL.  Connection-level failures
// raise TransportError; HTTP error statuses are returned to the caller.
HttpResponse http_get(const std::string& url);

// POST with an application/x-www-form-urlencoded body, fields in order.
HttpResponse http_post_form(const std::string& url, const OrderedArgs& fields);

}  // namespace keeper
