#pragma once

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqtab/model.hpp"
#include "seqtab/rewriting.hpp"

namespace httplib {
class Server;
}

namespace seqtab {

// Carries the HTTP status the error maps to.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

enum class EngineKind { kPrimitive, kNeural };
std::string to_string(EngineKind engine);
EngineKind engine_from_string(const std::string& s);

// Every *.csv below dir, keyed by its path relative to dir with '/'
// separators (the corpus table_file convention).
TableMap load_tables_dir(const std::filesystem::path& dir);

struct HistoryEntry {
  std::string question;
  AnswerCoordinates answer;  // original-table frame
  std::optional<AttentionSummary> attention;
};

struct Session {
  std::string id;
  std::string table_id;
  EngineKind engine = EngineKind::kPrimitive;
  RewritePolicy policy = RewritePolicy::kNever;
  std::filesystem::path checkpoint;
  std::vector<HistoryEntry> history;

  // Arrival-order serialization of asks.
  std::mutex mu;
  std::condition_variable cv;
  unsigned long next_ticket = 0;
  unsigned long serving = 0;
};

struct ServiceOptions {
  std::filesystem::path default_checkpoint;  // used by neural sessions that name none
  std::filesystem::path transcript;          // empty: no transcript
};

// Session logic independent of the HTTP layer. Methods return the JSON
// bodies served by the endpoints and throw ServiceError on client errors.
class QaService {
 public:
  QaService(TableMap tables, ServiceOptions options = {});

  nlohmann::json create_session(const std::string& table_id, const std::string& engine, const std::string& policy,
                                const std::string& checkpoint = "");
  nlohmann::json ask(const std::string& session_id, const std::string& question);
  nlohmann::json reset(const std::string& session_id);
  nlohmann::json session_info(const std::string& session_id);
  nlohmann::json list_tables() const;
  nlohmann::json get_table(const std::string& table_id) const;

  // Registers the JSON endpoints; static_dir (if non-empty) is served at /.
  void mount(httplib::Server& server, const std::filesystem::path& static_dir = {});

 private:
  std::shared_ptr<Session> find_session(const std::string& id);
  std::shared_ptr<ModelParams<float>> model_for(const std::filesystem::path& checkpoint);
  nlohmann::json answer_primitive(Session& s, const Table& table, const std::string& question);
  nlohmann::json answer_neural(Session& s, const Table& table, const std::string& question);
  void record(const nlohmann::json& event);

  TableMap tables_;
  ServiceOptions options_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  unsigned long next_session_ = 1;
  std::mutex models_mu_;
  std::map<std::string, std::shared_ptr<ModelParams<float>>> models_;
  std::mutex transcript_mu_;
  std::ofstream transcript_;
};

nlohmann::json coordinates_json(const AnswerCoordinates& coords);
AnswerCoordinates coordinates_from_json(const nlohmann::json& j);

struct ReplayReport {
  size_t n_asks = 0;
  size_t n_mismatches = 0;
  std::vector<std::string> mismatches;
};

// Re-issues a JSON-lines transcript against service and compares each
// answer with the recorded one.
ReplayReport replay_transcript(QaService& service, const std::vector<nlohmann::json>& events);
std::vector<nlohmann::json> read_transcript(const std::filesystem::path& path);

}  // namespace seqtab
