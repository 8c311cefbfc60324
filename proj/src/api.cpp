#include "trace_explain/api.hpp"

#include <httplib.h>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::vector<std::string> path_segments(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path.substr(0, path.find('?'))) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

nlohmann::json parse_body(const std::string& body) {
  if (trim(body).empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(body);
    if (!j.is_object()) throw InvalidArgument("request body must be an object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON body: ") + e.what());
  }
}

template <typename T>
T required(const nlohmann::json& j, const char* field) {
  if (!j.contains(field))
    throw InvalidArgument(std::string("missing field '") + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("field '") + field + "' has wrong type");
  }
}

}  // namespace

nlohmann::json error_body(const std::string& code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

void ExplanationService::add_project(ProjectBundle bundle,
                                     PipelineResult result) {
  auto served = std::make_unique<Served>(
      Served{std::move(bundle), std::move(result)});
  for (const auto& e : served->result.explanations)
    if (by_link_.count(e.link_id))
      throw InvalidArgument("link id '" + e.link_id + "' served twice");
  for (const auto& e : served->result.explanations) by_link_[e.link_id] = &e;
  projects_.push_back(std::move(served));
}

std::vector<StudyLink> ExplanationService::study_links() const {
  std::vector<StudyLink> out;
  for (const auto& p : projects_)
    for (const auto& l : p->bundle.project.links)
      out.push_back({l.id, p->bundle.project.id});
  return out;
}

const LinkExplanation& ExplanationService::find_explanation(
    const std::string& link_id) const {
  const auto it = by_link_.find(link_id);
  if (it == by_link_.end())
    throw NotFoundError("unknown link '" + link_id + "'");
  return *it->second;
}

ApiResponse ExplanationService::handle(const std::string& method,
                                       const std::string& path,
                                       const std::string& body) const {
  try {
    const auto seg = path_segments(path);
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (seg.size() == 1 && seg[0] == "projects" && get) return list_projects();
    if (seg.size() == 3 && seg[0] == "projects" && seg[2] == "links" && get)
      return list_links(seg[1]);
    if (seg.size() == 3 && seg[0] == "links" && seg[2] == "explanation" && get)
      return explanation(seg[1]);
    if (seg.size() == 3 && seg[0] == "links" && seg[2] == "verdict" && post)
      return post_verdict(seg[1], parse_body(body));
    if (seg.size() == 1 && seg[0] == "sessions" && post)
      return create_session(parse_body(body));
    if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "next" && get)
      return next_in_session(seg[1]);
    return {404, error_body("not_found", "no route for " + method + " " + path)};
  } catch (const NotFoundError& e) {
    return {404, error_body("not_found", e.what())};
  } catch (const InvalidArgument& e) {
    return {400, error_body("invalid_argument", e.what())};
  } catch (const std::exception& e) {
    return {500, error_body("internal", e.what())};
  }
}

ApiResponse ExplanationService::list_projects() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : projects_)
    out.push_back({{"id", p->bundle.project.id},
                   {"domain_name", p->bundle.project.domain_name},
                   {"artifacts", p->bundle.project.artifacts.size()},
                   {"links", p->bundle.project.links.size()}});
  return {200, out};
}

ApiResponse ExplanationService::list_links(const std::string& project_id) const {
  for (const auto& p : projects_) {
    if (p->bundle.project.id != project_id) continue;
    nlohmann::json out = nlohmann::json::array();
    for (const auto& l : p->bundle.project.links) {
      nlohmann::json j{{"link_id", l.id},
                       {"source_id", l.source_artifact_id},
                       {"target_id", l.target_artifact_id}};
      if (l.gold_label)
        j["gold_label"] =
            *l.gold_label == GoldLabel::correct ? "correct" : "incorrect";
      out.push_back(std::move(j));
    }
    return {200, out};
  }
  throw NotFoundError("unknown project '" + project_id + "'");
}

ApiResponse ExplanationService::explanation(const std::string& link_id) const {
  return {200, to_json(find_explanation(link_id))};
}

ApiResponse ExplanationService::create_session(const nlohmann::json& body) const {
  const auto participant = required<std::string>(body, "participant_id");
  const auto group = required<int>(body, "group");
  const auto seed = required<std::uint64_t>(body, "seed");
  if (trim(participant).empty())
    throw InvalidArgument("participant_id must not be empty");

  std::vector<StudyLink> links;
  if (body.contains("links")) {
    std::map<std::string, std::string> project_of;
    for (const auto& l : study_links()) project_of[l.link_id] = l.project_id;
    for (const auto& id : required<std::vector<std::string>>(body, "links")) {
      const auto it = project_of.find(id);
      if (it == project_of.end()) throw NotFoundError("unknown link '" + id + "'");
      links.push_back({id, it->second});
    }
  } else {
    links = study_links();
  }

  auto session = create_study_session(participant, links, group, seed);
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(session.id);
  if (it != sessions_.end()) {
    const auto& existing = it->second;
    if (existing.group != session.group || existing.order != session.order)
      return {409, error_body("conflict",
                              "session " + session.id +
                                  " already exists with different settings")};
    session = existing;
  } else {
    sessions_.emplace(session.id, session);
  }
  nlohmann::json order = nlohmann::json::array();
  for (const auto& [link, treatment] : session.order)
    order.push_back({{"link_id", link}, {"treatment", to_string(treatment)}});
  return {it == sessions_.end() ? 201 : 200,
          {{"session_id", session.id},
           {"participant_id", session.participant_id},
           {"group", session.group},
           {"seed", session.seed},
           {"links", order}}};
}

ApiResponse ExplanationService::next_in_session(
    const std::string& session_id) const {
  StudySession session;
  {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end())
      throw NotFoundError("unknown session '" + session_id + "'");
    session = it->second;
  }
  std::size_t submitted = 0;
  for (const auto& [link, treatment] : session.order) {
    if (log_.has_verdict(session.participant_id, link)) {
      ++submitted;
      continue;
    }
    const auto& e = find_explanation(link);
    return {200,
            {{"session_id", session.id},
             {"done", false},
             {"position", submitted},
             {"total", session.order.size()},
             {"link_id", link},
             {"treatment", to_string(treatment)},
             {"explanation", treatment == Treatment::with_explanation
                                 ? to_json(e)
                                 : plain_json(e)}}};
  }
  return {200,
          {{"session_id", session.id},
           {"done", true},
           {"submitted", submitted},
           {"total", session.order.size()}}};
}

ApiResponse ExplanationService::post_verdict(const std::string& link_id,
                                             const nlohmann::json& body) const {
  find_explanation(link_id);
  VettingVerdict v;
  v.link_id = link_id;
  v.participant_id = required<std::string>(body, "participant_id");
  v.verdict = verdict_from_string(required<std::string>(body, "verdict"));
  if (body.contains("session_id")) {
    v.session_id = required<std::string>(body, "session_id");
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(v.session_id);
    if (it == sessions_.end())
      throw NotFoundError("unknown session '" + v.session_id + "'");
    const auto treatments = it->second.treatments();
    const auto t = treatments.find(link_id);
    if (t == treatments.end())
      throw InvalidArgument("link '" + link_id + "' is not part of session " +
                            v.session_id);
    if (it->second.participant_id != v.participant_id)
      throw InvalidArgument("participant does not own session " +
                            v.session_id);
    v.treatment = t->second;
  } else if (body.contains("treatment")) {
    v.treatment = treatment_from_string(required<std::string>(body, "treatment"));
  }
  const auto record =
      record_verdict(log_, {link_id}, std::move(v));
  return {201, {{"seq", record.sequence}, {"record", to_json(record)}}};
}

void bind_routes(httplib::Server& server, const ExplanationService& service,
                 const std::string& static_dir) {
  if (!static_dir.empty()) server.set_mount_point("/ui", static_dir);
  auto dispatch = [&service](const httplib::Request& req,
                             httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  server.Get(R"(/(projects|links|sessions).*)", dispatch);
  server.Post(R"(/(links|sessions).*)", dispatch);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

}  // namespace trace_explain
