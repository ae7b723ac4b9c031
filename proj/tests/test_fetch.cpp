#include <atomic>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "netfuse/fetch.hpp"
// after Eigen: the resolver header pulled in here defines _res
#include "httplib.h"

using namespace netfuse;
using json = nlohmann::json;

namespace {

// Two pages of 200 works per ISSN; the second page ends the cursor chain.
class FakeApi {
 public:
  FakeApi() {
    server_.Get("/api/works", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      last_auth = req.get_header_value("Authorization");
      last_filter = req.get_param_value("filter");
      if (fail_next > 0) {
        --fail_next;
        res.status = 503;
        return;
      }
      const std::string cursor = req.get_param_value("cursor");
      const int page = cursor == "*" ? 0 : cursor == "page2" ? 1 : 2;
      json body;
      body["results"] = json::array();
      const int per = std::stoi(req.get_param_value("per-page"));
      if (page < 2)
        for (int i = 0; i < per; ++i) {
          const int id = page * per + i;
          body["results"].push_back({{"id", "W" + std::to_string(id)},
                                     {"type", "article"},
                                     {"authorships", {{{"author", {{"id", "A" + std::to_string(id % 7)}}}}}},
                                     {"referenced_works", {"R1", "R" + std::to_string(id % 3)}}});
        }
      body["meta"]["next_cursor"] = page == 0 ? json("page2") : json(nullptr);
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeApi() {
    server_.stop();
    thread_.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_) + "/api"; }

  std::atomic<int> requests{0};
  std::atomic<int> fail_next{0};
  std::string last_auth;
  std::string last_filter;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

FetchOptions options(const FakeApi& api) {
  FetchOptions o;
  o.api_base = api.base();
  o.year_from = 2006;
  o.year_to = 2006;
  o.min_interval = std::chrono::milliseconds(1);
  return o;
}

}  // namespace

TEST_CASE("issn syntax") {
  CHECK(is_well_formed_issn("0022-3808"));
  CHECK(is_well_formed_issn("1234-567X"));
  CHECK_FALSE(is_well_formed_issn("12345"));
}

TEST_CASE("empty issn list needs no network") {
  FetchOptions o;
  o.api_base = "http://127.0.0.1:1";
  CHECK(fetch_works(o).empty());
}

TEST_CASE("pagination, token and filter") {
  FakeApi api;
  auto o = options(api);
  o.issns = {"0022-3808"};
  o.token = "secret";
  std::vector<std::string> cursors;
  const auto works = fetch_works(o, [&](const std::string&, const std::string& next, const auto&) { cursors.push_back(next); });
  CHECK(works.size() == 400);
  CHECK(works.front().id == "W0");
  CHECK(works.back().id == "W399");
  CHECK(works.front().journal == "0022-3808");
  CHECK(works.front().authors == std::vector<std::string>{"A0"});
  CHECK(works.front().is_research_article);
  CHECK(cursors == std::vector<std::string>{"page2", ""});
  CHECK(api.last_auth == "Bearer secret");
  CHECK(api.last_filter == "primary_location.source.issn:0022-3808,publication_year:2006-2006");
}

TEST_CASE("malformed issn is skipped") {
  FakeApi api;
  auto o = options(api);
  o.issns = {"12345", "0022-3808"};
  CHECK(fetch_works(o).size() == 400);
  CHECK(api.requests == 2);
}

TEST_CASE("resume from a cursor and skip completed issns") {
  FakeApi api;
  auto o = options(api);
  o.issns = {"0022-3808", "1234-567X"};
  o.resume = {{"0022-3808", ""}, {"1234-567X", "page2"}};
  const auto works = fetch_works(o);
  CHECK(works.size() == 200);
  CHECK(works.front().id == "W200");
}

TEST_CASE("server errors are retried, then reported") {
  FakeApi api;
  auto o = options(api);
  o.issns = {"0022-3808"};
  api.fail_next = 2;
  CHECK(fetch_works(o).size() == 400);
  api.fail_next = 100;
  o.max_retries = 1;
  try {
    fetch_works(o);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HttpError);
  }
}

TEST_CASE("openalex result parsing") {
  const auto w = work_from_openalex("J", R"({"id":"W1","type":"editorial","authorships":[],"referenced_works":["R"]})");
  CHECK_FALSE(w.is_research_article);
  CHECK(w.has_references);
  CHECK_THROWS_AS(work_from_openalex("J", R"({"type":"article"})"), Error);
}
