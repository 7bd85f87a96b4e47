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

#include <thread>

#include "httplib.h"
#include "nanorag/errors.hpp"
#include "nanorag/net/http.hpp"

namespace nanorag::net {

namespace {

httplib::Headers to_httplib(const Headers& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
}

void configure(httplib::Client& client, std::chrono::milliseconds timeout) {
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
}

HttpResponse convert(const httplib::Result& res) {
    HttpResponse out;
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                      const Headers& headers, std::chrono::milliseconds timeout) override {
        const auto parts = split_url(url);
        httplib::Client client(parts.origin);
        configure(client, timeout);
        return convert(client.Post(parts.path, to_httplib(headers), body, content_type));
    }

    HttpResponse get(const std::string& url, const Headers& headers, std::chrono::milliseconds timeout) override {
        const auto parts = split_url(url);
        httplib::Client client(parts.origin);
        configure(client, timeout);
        return convert(client.Get(parts.path, to_httplib(headers)));
    }
};

}  // namespace

std::shared_ptr<HttpTransport> make_default_transport() { return std::make_shared<HttplibTransport>(); }

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("URL has no scheme: " + url);
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw InvalidArgument("unsupported URL scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    UrlParts parts;
    parts.origin = url.substr(0, path_start);
    parts.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (parts.origin.size() <= scheme_end + 3) throw InvalidArgument("URL has no host: " + url);
    return parts;
}

void RetryPolicy::pause(std::chrono::milliseconds d) const {
    if (sleep) {
        sleep(d);
    } else if (d.count() > 0) {
        std::this_thread::sleep_for(d);
    }
}

HttpResponse post_json_with_retry(HttpTransport& transport, const std::string& url, const std::string& body,
                                  const Headers& headers, std::chrono::milliseconds timeout,
                                  const RetryPolicy& retry) {
    const int attempts = std::max(1, retry.attempts);
    auto backoff = retry.initial_backoff;
    HttpResponse last;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        last = transport.post(url, body, "application/json", headers, timeout);
        if (last.status != 0 && last.status < 500) return last;
        if (attempt < attempts) {
            retry.pause(backoff);
            backoff *= 2;
        }
    }
    std::string why = last.status == 0 ? last.error : "HTTP " + std::to_string(last.status);
    throw EndpointUnavailable(url + " unavailable after " + std::to_string(attempts) + " attempts: " + why);
}

}  // namespace nanorag::net
