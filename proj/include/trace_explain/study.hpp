#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace trace_explain {

enum class Treatment { with_explanation, without_explanation };

std::string to_string(Treatment treatment);
Treatment treatment_from_string(const std::string& s);

struct StudyLink {
  std::string link_id;
  std::string project_id;
};

struct StudySession {
  std::string id;
  std::string participant_id;
  int group = 1;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, Treatment>> order;

  std::map<std::string, Treatment> treatments() const;
};

// Stable session id for (participant, seed).
std::string session_id_for(const std::string& participant_id,
                           std::uint64_t seed);

// Half-split stratified by project: within each project (links sorted by
// id) the first floor(n/2) go to half A and the next floor(n/2) to half B;
// leftover links of odd-sized projects are pooled, sorted, and split with
// the first half going to A. Group 1 sees explanations on A, group 2 on B.
// The presentation order is a seeded Fisher-Yates shuffle of the links
// sorted by id. Throws InvalidArgument on an odd link count, a bad group or
// duplicate link ids.
StudySession create_study_session(const std::string& participant_id,
                                  const std::vector<StudyLink>& links,
                                  int group, std::uint64_t seed);

enum class VerdictChoice { correct, incorrect, dont_know };

std::string to_string(VerdictChoice verdict);
VerdictChoice verdict_from_string(const std::string& s);

struct VettingVerdict {
  std::string link_id;
  std::string participant_id;
  VerdictChoice verdict = VerdictChoice::dont_know;
  Treatment treatment = Treatment::with_explanation;
  std::string timestamp;  // ISO-8601 UTC; filled in when empty
  std::string session_id;
};

struct VerdictRecord {
  std::uint64_t sequence = 0;
  VettingVerdict verdict;
};

nlohmann::json to_json(const VerdictRecord& record);
VerdictRecord verdict_record_from_json(const nlohmann::json& j);

// Append-only JSON Lines log. Every submission becomes a new row with the
// next sequence number; earlier rows are never rewritten. Without a path
// the log lives in memory only.
class VerdictLog {
 public:
  VerdictLog() = default;
  explicit VerdictLog(std::filesystem::path path);

  VerdictRecord append(VettingVerdict verdict);
  std::vector<VerdictRecord> records() const;
  bool has_verdict(const std::string& participant_id,
                   const std::string& link_id) const;

 private:
  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> path_;
  std::vector<VerdictRecord> records_;
  std::set<std::pair<std::string, std::string>> answered_;
};

std::string utc_timestamp();

// Validates the link id against `known_links` and the participant id, then
// appends. Throws NotFoundError / InvalidArgument.
VerdictRecord record_verdict(VerdictLog& log,
                             const std::set<std::string>& known_links,
                             VettingVerdict verdict);

}  // namespace trace_explain
