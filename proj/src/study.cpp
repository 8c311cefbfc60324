#include "trace_explain/study.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <random>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t max = std::mt19937_64::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % bound;
}

}  // namespace

std::string to_string(Treatment treatment) {
  return treatment == Treatment::with_explanation ? "with_explanation"
                                                  : "without_explanation";
}

Treatment treatment_from_string(const std::string& s) {
  if (s == "with_explanation") return Treatment::with_explanation;
  if (s == "without_explanation") return Treatment::without_explanation;
  throw InvalidArgument("unknown treatment '" + s + "'");
}

std::map<std::string, Treatment> StudySession::treatments() const {
  return {order.begin(), order.end()};
}

std::string session_id_for(const std::string& participant_id,
                           std::uint64_t seed) {
  return "sess-" +
         stable_hash(participant_id + '\x1f' + std::to_string(seed));
}

StudySession create_study_session(const std::string& participant_id,
                                  const std::vector<StudyLink>& links,
                                  int group, std::uint64_t seed) {
  if (group != 1 && group != 2)
    throw InvalidArgument("group must be 1 or 2");
  if (links.size() % 2 != 0)
    throw InvalidArgument("study needs an even number of links, got " +
                          std::to_string(links.size()));

  std::map<std::string, std::vector<std::string>> by_project;
  std::set<std::string> ids;
  for (const auto& l : links) {
    if (!ids.insert(l.link_id).second)
      throw InvalidArgument("duplicate link id '" + l.link_id + "'");
    by_project[l.project_id].push_back(l.link_id);
  }

  std::set<std::string> half_a;
  std::vector<std::string> pool;
  for (auto& [project, list] : by_project) {
    std::sort(list.begin(), list.end());
    const std::size_t half = list.size() / 2;
    for (std::size_t i = 0; i < half; ++i) half_a.insert(list[i]);
    if (list.size() % 2) pool.push_back(list.back());
  }
  std::sort(pool.begin(), pool.end());
  for (std::size_t i = 0; i < pool.size() / 2; ++i) half_a.insert(pool[i]);

  std::vector<std::string> order(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(draw_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }

  StudySession s;
  s.id = session_id_for(participant_id, seed);
  s.participant_id = participant_id;
  s.group = group;
  s.seed = seed;
  for (const auto& id : order) {
    const bool in_a = half_a.count(id) > 0;
    const bool with = group == 1 ? in_a : !in_a;
    s.order.emplace_back(id, with ? Treatment::with_explanation
                                  : Treatment::without_explanation);
  }
  return s;
}

std::string to_string(VerdictChoice verdict) {
  switch (verdict) {
    case VerdictChoice::correct: return "correct";
    case VerdictChoice::incorrect: return "incorrect";
    case VerdictChoice::dont_know: return "dont_know";
  }
  return "dont_know";
}

VerdictChoice verdict_from_string(const std::string& s) {
  if (s == "correct") return VerdictChoice::correct;
  if (s == "incorrect") return VerdictChoice::incorrect;
  if (s == "dont_know") return VerdictChoice::dont_know;
  throw InvalidArgument("verdict must be correct, incorrect or dont_know, got '" +
                        s + "'");
}

nlohmann::json to_json(const VerdictRecord& r) {
  nlohmann::json j{{"seq", r.sequence},
                   {"link_id", r.verdict.link_id},
                   {"participant_id", r.verdict.participant_id},
                   {"verdict", to_string(r.verdict.verdict)},
                   {"treatment", to_string(r.verdict.treatment)},
                   {"timestamp", r.verdict.timestamp}};
  if (!r.verdict.session_id.empty()) j["session_id"] = r.verdict.session_id;
  return j;
}

VerdictRecord verdict_record_from_json(const nlohmann::json& j) {
  VerdictRecord r;
  r.sequence = j.at("seq").get<std::uint64_t>();
  r.verdict.link_id = j.at("link_id").get<std::string>();
  r.verdict.participant_id = j.at("participant_id").get<std::string>();
  r.verdict.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.verdict.treatment =
      treatment_from_string(j.at("treatment").get<std::string>());
  r.verdict.timestamp = j.value("timestamp", "");
  r.verdict.session_id = j.value("session_id", "");
  return r;
}

VerdictLog::VerdictLog(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  std::string line;
  std::size_t line_no = 0;
  while (in && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto r = verdict_record_from_json(nlohmann::json::parse(line));
      answered_.emplace(r.verdict.participant_id, r.verdict.link_id);
      records_.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw FormatError("malformed verdict log line " +
                        std::to_string(line_no) + ": " + e.what());
    }
  }
}

VerdictRecord VerdictLog::append(VettingVerdict verdict) {
  std::lock_guard lock(mutex_);
  if (verdict.timestamp.empty()) verdict.timestamp = utc_timestamp();
  VerdictRecord r{records_.empty() ? 1 : records_.back().sequence + 1,
                  std::move(verdict)};
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw Error("cannot append to verdict log " + path_->string());
    out << to_json(r).dump() << '\n';
    out.flush();
  }
  answered_.emplace(r.verdict.participant_id, r.verdict.link_id);
  records_.push_back(r);
  return r;
}

std::vector<VerdictRecord> VerdictLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

bool VerdictLog::has_verdict(const std::string& participant_id,
                             const std::string& link_id) const {
  std::lock_guard lock(mutex_);
  return answered_.count({participant_id, link_id}) > 0;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

VerdictRecord record_verdict(VerdictLog& log,
                             const std::set<std::string>& known_links,
                             VettingVerdict verdict) {
  if (!known_links.count(verdict.link_id))
    throw NotFoundError("unknown link '" + verdict.link_id + "'");
  if (trim(verdict.participant_id).empty())
    throw InvalidArgument("verdict needs a participant_id");
  return log.append(std::move(verdict));
}

}  // namespace trace_explain
