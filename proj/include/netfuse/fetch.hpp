#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netfuse/ingest.hpp"

namespace netfuse {

struct FetchOptions {
  std::string api_base = "https://api.openalex.org";
  std::vector<std::string> issns;
  int year_from = 0;
  int year_to = 0;
  std::string token;  // sent as a bearer token when non-empty
  int per_page = 200;
  std::chrono::milliseconds min_interval{100};
  int max_retries = 3;
  // issn -> cursor to resume from; "" marks an ISSN already completed
  std::map<std::string, std::string> resume;
};

// Called after each page: (issn, next cursor or "" when finished, records of the page).
using PageCallback = std::function<void(const std::string&, const std::string&, const std::vector<WorkRecord>&)>;

bool is_well_formed_issn(const std::string& issn);

// Records come out in (ISSN input order, cursor order). Malformed ISSNs are
// logged as UnknownIssn and skipped.
std::vector<WorkRecord> fetch_works(const FetchOptions& options, const PageCallback& on_page = {});

// One OpenAlex "works" result object -> WorkRecord credited to `journal`.
WorkRecord work_from_openalex(const std::string& journal, const std::string& result_json);

}  // namespace netfuse
