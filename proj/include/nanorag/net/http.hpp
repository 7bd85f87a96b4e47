// Copyright 2026-present the nanorag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>

namespace nanorag::net {

using Headers = std::multimap<std::string, std::string>;

struct HttpResponse {
    /// 0 means the request never produced an HTTP response (connect failure,
    /// timeout, TLS error ...).
    int status = 0;
    std::string body;
    std::string error;
};

/// Minimal blocking HTTP client seam. Production code uses
/// make_default_transport(); tests substitute capturing mocks.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;

    virtual HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                              const Headers& headers, std::chrono::milliseconds timeout) = 0;

    virtual HttpResponse get(const std::string& url, const Headers& headers, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport. https URLs require an OpenSSL-enabled build.
std::shared_ptr<HttpTransport> make_default_transport();

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/', includes any query string
};

/// Throws InvalidArgument when `url` has no http(s) scheme or no host.
UrlParts split_url(const std::string& url);

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{200};
    /// Sleeps between attempts; tests install a no-op.
    std::function<void(std::chrono::milliseconds)> sleep;

    void pause(std::chrono::milliseconds d) const;
};

/// POSTs JSON, retrying transport failures and 5xx responses with exponential
/// backoff. Any other response is returned as-is. Throws EndpointUnavailable
/// once attempts are exhausted.
HttpResponse post_json_with_retry(HttpTransport& transport, const std::string& url, const std::string& body,
                                  const Headers& headers, std::chrono::milliseconds timeout,
                                  const RetryPolicy& retry);

}  // namespace nanorag::net
