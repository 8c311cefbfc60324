#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "trace_explain/bundle.hpp"
#include "trace_explain/pipeline.hpp"
#include "trace_explain/study.hpp"

namespace httplib {
class Server;
}

namespace trace_explain {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Read side is built once (add_project before serving); sessions and
// verdicts are guarded by their own locks.
class ExplanationService {
 public:
  explicit ExplanationService(VerdictLog& log) : log_(log) {}

  // Throws InvalidArgument when a link id is already served.
  void add_project(ProjectBundle bundle, PipelineResult result);

  ApiResponse handle(const std::string& method, const std::string& path,
                     const std::string& body) const;

  std::vector<StudyLink> study_links() const;

 private:
  struct Served {
    ProjectBundle bundle;
    PipelineResult result;
  };

  ApiResponse list_projects() const;
  ApiResponse list_links(const std::string& project_id) const;
  ApiResponse explanation(const std::string& link_id) const;
  ApiResponse create_session(const nlohmann::json& body) const;
  ApiResponse next_in_session(const std::string& session_id) const;
  ApiResponse post_verdict(const std::string& link_id,
                           const nlohmann::json& body) const;

  const LinkExplanation& find_explanation(const std::string& link_id) const;

  VerdictLog& log_;
  std::vector<std::unique_ptr<Served>> projects_;
  std::map<std::string, const LinkExplanation*> by_link_;
  mutable std::mutex sessions_mutex_;
  mutable std::map<std::string, StudySession> sessions_;
};

nlohmann::json error_body(const std::string& code, const std::string& message);

// Routes every request to service.handle, adds a permissive CORS header and,
// when `static_dir` is non-empty, serves files from it under "/ui".
void bind_routes(httplib::Server& server, const ExplanationService& service,
                 const std::string& static_dir = {});

}  // namespace trace_explain
