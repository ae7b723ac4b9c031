#include "netfuse/fetch.hpp"

#include <regex>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"

namespace netfuse {

using json = nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_base(const std::string& base) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base, m, re)) throw Error(ErrorCode::InvalidArgument, "malformed API base URL '" + base + "'");
  std::string prefix = m[2].matched ? m[2].str() : std::string{};
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

WorkRecord parse_result(const std::string& journal, const json& r) {
  std::vector<std::string> authors;
  if (r.contains("authorships") && r["authorships"].is_array()) {
    for (const auto& a : r["authorships"]) {
      if (a.contains("author") && a["author"].is_object() && a["author"].contains("id") &&
          a["author"]["id"].is_string())
        authors.push_back(a["author"]["id"].get<std::string>());
    }
  }
  std::vector<std::string> refs;
  if (r.contains("referenced_works") && r["referenced_works"].is_array())
    for (const auto& ref : r["referenced_works"])
      if (ref.is_string()) refs.push_back(ref.get<std::string>());
  std::string id = r.contains("id") && r["id"].is_string() ? r["id"].get<std::string>() : std::string{};
  if (id.empty()) throw Error(ErrorCode::ParseError, "OpenAlex result without an id");
  std::string type = r.contains("type") && r["type"].is_string() ? r["type"].get<std::string>() : std::string{};
  return make_work(std::move(id), journal, std::move(authors), std::move(refs), std::move(type));
}

}  // namespace

bool is_well_formed_issn(const std::string& issn) {
  static const std::regex re(R"(^[0-9]{4}-[0-9]{3}[0-9Xx]$)");
  return std::regex_match(issn, re);
}

WorkRecord work_from_openalex(const std::string& journal, const std::string& result_json) {
  try {
    return parse_result(journal, json::parse(result_json));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("OpenAlex result: ") + e.what());
  }
}

std::vector<WorkRecord> fetch_works(const FetchOptions& options, const PageCallback& on_page) {
  std::vector<WorkRecord> out;
  if (options.issns.empty()) return out;
  const Endpoint ep = split_base(options.api_base);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(60));
  httplib::Headers headers{{"Accept", "application/json"}};
  if (!options.token.empty()) headers.emplace("Authorization", "Bearer " + options.token);

  auto last_request = std::chrono::steady_clock::now() - options.min_interval;
  for (const auto& issn : options.issns) {
    if (!is_well_formed_issn(issn)) {
      spdlog::warn("{}: malformed ISSN '{}', skipped", to_string(ErrorCode::UnknownIssn), issn);
      continue;
    }
    std::string cursor = "*";
    if (auto it = options.resume.find(issn); it != options.resume.end()) {
      if (it->second.empty()) continue;
      cursor = it->second;
    }
    while (!cursor.empty()) {
      httplib::Params params{
          {"filter", "primary_location.source.issn:" + issn + ",publication_year:" + std::to_string(options.year_from) +
                         "-" + std::to_string(options.year_to)},
          {"per-page", std::to_string(options.per_page)},
          {"cursor", cursor},
      };
      const std::string path = httplib::append_query_params(ep.prefix + "/works", params);

      httplib::Result res{nullptr, httplib::Error::Unknown};
      for (int attempt = 0;; ++attempt) {
        const auto wait = last_request + options.min_interval - std::chrono::steady_clock::now();
        if (wait > std::chrono::steady_clock::duration::zero()) std::this_thread::sleep_for(wait);
        last_request = std::chrono::steady_clock::now();
        res = client.Get(path, headers);
        const bool retryable = !res || res->status == 429 || res->status >= 500;
        if (!retryable || attempt >= options.max_retries) break;
        std::this_thread::sleep_for(options.min_interval * (1 << attempt));
      }
      if (!res) throw Error(ErrorCode::HttpError, "GET " + path + " failed: " + httplib::to_string(res.error()));
      if (res->status != 200)
        throw Error(ErrorCode::HttpError, "GET " + path + " returned status " + std::to_string(res->status));

      json body;
      try {
        body = json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "GET " + path + ": " + e.what());
      }
      if (!body.contains("results") || !body["results"].is_array())
        throw Error(ErrorCode::ParseError, "GET " + path + ": response has no 'results' array");

      std::vector<WorkRecord> page;
      for (const auto& r : body["results"]) page.push_back(parse_result(issn, r));
      std::string next;
      if (!page.empty() && body.contains("meta") && body["meta"].contains("next_cursor") &&
          body["meta"]["next_cursor"].is_string())
        next = body["meta"]["next_cursor"].get<std::string>();
      if (on_page) on_page(issn, next, page);
      out.insert(out.end(), std::make_move_iterator(page.begin()), std::make_move_iterator(page.end()));
      cursor = next;
    }
  }
  return out;
}

}  // namespace netfuse
