#include "seqtab/service.hpp"

#include <algorithm>
#include <sstream>

#include "httplib.h"
#include "seqtab/text.hpp"

namespace seqtab {

std::string to_string(EngineKind engine) { return engine == EngineKind::kNeural ? "neural" : "primitive"; }

EngineKind engine_from_string(const std::string& s) {
  const std::string k = text::to_lower_ascii(s);
  if (k == "neural") return EngineKind::kNeural;
  if (k == "primitive" || k.empty()) return EngineKind::kPrimitive;
  throw ServiceError(400, "unknown engine '" + s + "' (expected primitive or neural)");
}

TableMap load_tables_dir(const std::filesystem::path& dir) {
  TableMap tables;
  if (!std::filesystem::is_directory(dir)) throw LoadError("tables directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string id = std::filesystem::relative(f, dir).generic_string();
    tables.emplace(id, load_table_csv(f, id));
  }
  return tables;
}

nlohmann::json coordinates_json(const AnswerCoordinates& coords) {
  nlohmann::json out = nlohmann::json::array();
  for (const Coord& c : coords) out.push_back({c.row, c.col});
  return out;
}

AnswerCoordinates coordinates_from_json(const nlohmann::json& j) {
  AnswerCoordinates out;
  for (const auto& c : j) out.insert({c.at(0).get<int>(), c.at(1).get<int>()});
  return out;
}

QaService::QaService(TableMap tables, ServiceOptions options) : tables_(std::move(tables)), options_(std::move(options)) {
  if (!options_.transcript.empty()) {
    transcript_.open(options_.transcript, std::ios::app);
    if (!transcript_) throw LoadError("cannot open transcript " + options_.transcript.string());
  }
}

void QaService::record(const nlohmann::json& event) {
  if (!transcript_.is_open()) return;
  std::lock_guard lock(transcript_mu_);
  transcript_ << event.dump() << "\n" << std::flush;
}

std::shared_ptr<ModelParams<float>> QaService::model_for(const std::filesystem::path& checkpoint) {
  std::lock_guard lock(models_mu_);
  auto it = models_.find(checkpoint.string());
  if (it != models_.end()) return it->second;
  if (!std::filesystem::is_regular_file(checkpoint)) {
    throw ServiceError(404, "checkpoint not found: " + checkpoint.string());
  }
  try {
    auto model = std::make_shared<ModelParams<float>>(ModelParams<float>::load(checkpoint));
    models_.emplace(checkpoint.string(), model);
    return model;
  } catch (const CheckpointError& e) {
    throw ServiceError(422, e.what());
  }
}

nlohmann::json QaService::create_session(const std::string& table_id, const std::string& engine_name,
                                         const std::string& policy_name, const std::string& checkpoint) {
  if (!tables_.count(table_id)) throw ServiceError(404, "unknown table '" + table_id + "'");
  const EngineKind engine = engine_from_string(engine_name);
  RewritePolicy policy;
  try {
    policy = rewrite_policy_from_string(policy_name.empty() ? "never" : policy_name);
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, e.what());
  }
  if (requires_gold(policy)) {
    throw ServiceError(400, "policy " + to_string(policy) +
                                " needs gold answers and is not available for live sessions; use never, always or "
                                "row_subset");
  }
  std::filesystem::path ckpt;
  if (engine == EngineKind::kNeural) {
    ckpt = checkpoint.empty() ? options_.default_checkpoint : std::filesystem::path(checkpoint);
    if (ckpt.empty()) throw ServiceError(404, "neural engine requested but no checkpoint was configured");
    model_for(ckpt);
  }
  auto s = std::make_shared<Session>();
  s->table_id = table_id;
  s->engine = engine;
  s->policy = policy;
  s->checkpoint = ckpt;
  {
    std::lock_guard lock(sessions_mu_);
    s->id = "s" + std::to_string(next_session_++);
    sessions_[s->id] = s;
  }
  nlohmann::json body = {{"session_id", s->id},
                         {"table_id", table_id},
                         {"engine", to_string(engine)},
                         {"policy", to_string(policy)},
                         {"history", nlohmann::json::array()}};
  record({{"op", "create"},
          {"session_id", s->id},
          {"table_id", table_id},
          {"engine", to_string(engine)},
          {"policy", to_string(policy)},
          {"checkpoint", ckpt.string()}});
  return body;
}

std::shared_ptr<Session> QaService::find_session(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
  return it->second;
}

namespace {

// Holds a session's turn from construction to destruction.
class Turn {
 public:
  explicit Turn(Session& s) : s_(s) {
    std::unique_lock lock(s_.mu);
    const unsigned long ticket = s_.next_ticket++;
    s_.cv.wait(lock, [&] { return s_.serving == ticket; });
  }
  ~Turn() {
    {
      std::lock_guard lock(s_.mu);
      ++s_.serving;
    }
    s_.cv.notify_all();
  }
  Turn(const Turn&) = delete;
  Turn& operator=(const Turn&) = delete;

 private:
  Session& s_;
};

AnswerCoordinates to_rewritten_frame(const AnswerCoordinates& coords, const RewrittenTable& rt) {
  AnswerCoordinates out;
  for (const Coord& c : coords) {
    auto it = std::find(rt.row_map.begin(), rt.row_map.end(), c.row);
    if (it != rt.row_map.end()) out.insert({static_cast<int>(it - rt.row_map.begin()), c.col});
  }
  return out;
}

nlohmann::json history_json(const Session& s) {
  nlohmann::json h = nlohmann::json::array();
  for (size_t k = 0; k < s.history.size(); ++k) {
    h.push_back({{"position", k + 1}, {"question", s.history[k].question}, {"answer", coordinates_json(s.history[k].answer)}});
  }
  return h;
}

}  // namespace

nlohmann::json QaService::answer_primitive(Session& s, const Table& table, const std::string& question) {
  const AnswerCoordinates* prev = s.history.empty() ? nullptr : &s.history.back().answer;
  const bool rewrite = prev && policy_rewrites(s.policy, question, nullptr, nullptr, *prev, table);
  nlohmann::json body;
  AnswerCoordinates answer;
  if (rewrite) {
    const RewrittenTable rt = rewrite_table(table, *prev);
    const AnswerCoordinates prev_local = to_rewritten_frame(*prev, rt);
    const ParseResult r = parse(question, rt.table, &prev_local);
    answer = rt.to_original(r.answer);
    body["logical_form"] = to_string(r.form);
    body["rewritten_table_rows"] = rt.row_map;
  } else {
    const ParseResult r = parse(question, table, prev);
    answer = r.answer;
    body["logical_form"] = to_string(r.form);
    body["rewritten_table_rows"] = nullptr;
  }
  body["answer"] = coordinates_json(answer);
  s.history.push_back({question, answer, std::nullopt});
  return body;
}

nlohmann::json QaService::answer_neural(Session& s, const Table& table, const std::string& question) {
  auto model = model_for(s.checkpoint);
  ModelParams<float>& params = *model;
  const AnswerCoordinates* prev = s.history.empty() ? nullptr : &s.history.back().answer;
  const bool rewrite = prev && policy_rewrites(s.policy, question, nullptr, nullptr, *prev, table);

  Graph<float> g;
  ModelVars<float> vars = bind(g, params);
  SequenceState<float> state;
  for (const auto& h : s.history) advance_question(h.question, state, vars, params);
  Var<float> q = advance_question(question, state, vars, params);

  std::optional<RewrittenTable> rt;
  if (rewrite) rt = rewrite_table(table, *prev);
  const Table& used = rt ? rt->table : table;
  Array<float> p1({used.rows(), used.cols()});
  if (prev) p1 = answer_indicators<float>(rt ? to_rewritten_frame(*prev, *rt) : *prev, used.rows(), used.cols());
  EncodedTable<float> base = encode_table(used, vars, params);
  StepNodes<float> nodes = score_question(q, base, p1, vars);
  AnswerCoordinates answer = predict(nodes.scores.value());
  if (rt) answer = rt->to_original(answer);

  AttentionSummary att;
  for (size_t i = 0; i < 3; ++i) att.m_att[i] = nodes.m_att.value()[i];
  for (float v : nodes.modules.m_col.value().values()) att.m_col.push_back(v);
  std::vector<int> order(att.m_col.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return att.m_col[static_cast<size_t>(a)] > att.m_col[static_cast<size_t>(b)]; });
  nlohmann::json top = nlohmann::json::array();
  for (size_t i = 0; i < std::min<size_t>(3, order.size()); ++i) {
    const int c = order[i];
    top.push_back({{"col", c}, {"header", used.header(c)}, {"weight", att.m_col[static_cast<size_t>(c)]}});
  }
  nlohmann::json body;
  body["attention"] = {{"m_att", {{"column", att.m_att[0]}, {"row", att.m_att[1]}, {"cell", att.m_att[2]}}},
                       {"m_col", att.m_col},
                       {"top_columns", top}};
  body["rewritten_table_rows"] = rt ? nlohmann::json(rt->row_map) : nlohmann::json(nullptr);
  body["answer"] = coordinates_json(answer);
  s.history.push_back({question, answer, att});
  return body;
}

nlohmann::json QaService::ask(const std::string& session_id, const std::string& question) {
  auto s = find_session(session_id);
  if (text::normalize_ws(question).empty()) throw ServiceError(400, "question is empty");
  Turn turn(*s);
  const Table& table = tables_.at(s->table_id);
  nlohmann::json body =
      s->engine == EngineKind::kNeural ? answer_neural(*s, table, question) : answer_primitive(*s, table, question);
  const AnswerCoordinates answer = s->history.back().answer;
  body["session_id"] = s->id;
  body["position"] = s->history.size();
  body["question"] = question;
  body["answer_texts"] = cell_texts(table, answer);
  nlohmann::json highlight = nlohmann::json::array();
  for (const Coord& c : answer) highlight.push_back({{"row", c.row}, {"col", c.col}});
  body["highlight"] = highlight;
  record({{"op", "ask"}, {"session_id", s->id}, {"question", question}, {"answer", body["answer"]}});
  return body;
}

nlohmann::json QaService::reset(const std::string& session_id) {
  auto s = find_session(session_id);
  Turn turn(*s);
  s->history.clear();
  record({{"op", "reset"}, {"session_id", s->id}});
  return {{"session_id", s->id}, {"history", nlohmann::json::array()}};
}

nlohmann::json QaService::session_info(const std::string& session_id) {
  auto s = find_session(session_id);
  Turn turn(*s);
  return {{"session_id", s->id},
          {"table_id", s->table_id},
          {"engine", to_string(s->engine)},
          {"policy", to_string(s->policy)},
          {"history", history_json(*s)}};
}

nlohmann::json QaService::list_tables() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [id, t] : tables_) out.push_back({{"id", id}, {"rows", t.rows()}, {"cols", t.cols()}});
  return out;
}

nlohmann::json QaService::get_table(const std::string& table_id) const {
  auto it = tables_.find(table_id);
  if (it == tables_.end()) throw ServiceError(404, "unknown table '" + table_id + "'");
  const Table& t = it->second;
  nlohmann::json kinds = nlohmann::json::array();
  for (ColumnKind k : t.column_kinds()) kinds.push_back(to_string(k));
  return {{"id", t.id()}, {"headers", t.headers()}, {"cells", t.cells()}, {"column_kinds", kinds}};
}

namespace {

template <typename F>
void respond(httplib::Response& res, F&& f, int ok_status = 200) {
  try {
    nlohmann::json body = f();
    res.status = ok_status;
    res.set_content(body.dump(), "application/json");
  } catch (const ServiceError& e) {
    res.status = e.status();
    res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
  } catch (const nlohmann::json::exception& e) {
    res.status = 400;
    res.set_content(nlohmann::json{{"error", std::string("malformed request: ") + e.what()}}.dump(),
                    "application/json");
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
  }
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ServiceError(400, "request body must be a JSON object");
  return j;
}

}  // namespace

void QaService::mount(httplib::Server& server, const std::filesystem::path& static_dir) {
  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    respond(
        res,
        [&] {
          const auto j = parse_body(req);
          return create_session(j.value("table_id", std::string()), j.value("engine", std::string("primitive")),
                                j.value("policy", std::string("never")), j.value("checkpoint", std::string()));
        },
        201);
  });
  server.Post(R"(/sessions/([^/]+)/questions)", [this](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return ask(req.matches[1], parse_body(req).value("question", std::string())); });
  });
  server.Post(R"(/sessions/([^/]+)/reset)", [this](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return reset(req.matches[1]); });
  });
  server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return session_info(req.matches[1]); });
  });
  server.Get("/tables", [this](const httplib::Request&, httplib::Response& res) {
    respond(res, [&] { return list_tables(); });
  });
  server.Get(R"(/tables/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return get_table(req.matches[1]); });
  });
  if (!static_dir.empty()) {
    if (!server.set_mount_point("/", static_dir.string())) {
      throw LoadError("static directory not found: " + static_dir.string());
    }
  }
}

std::vector<nlohmann::json> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open transcript " + path.string());
  std::vector<nlohmann::json> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::normalize_ws(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw LoadError(path.string() + ":" + std::to_string(line_no) + ": not JSON");
    events.push_back(std::move(j));
  }
  return events;
}

ReplayReport replay_transcript(QaService& service, const std::vector<nlohmann::json>& events) {
  ReplayReport report;
  std::map<std::string, std::string> ids;  // recorded -> replayed session id
  for (const auto& ev : events) {
    const std::string op = ev.value("op", std::string());
    const std::string sid = ev.value("session_id", std::string());
    if (op == "create") {
      const auto body = service.create_session(ev.at("table_id").get<std::string>(), ev.value("engine", std::string()),
                                               ev.value("policy", std::string()), ev.value("checkpoint", std::string()));
      ids[sid] = body.at("session_id").get<std::string>();
    } else if (op == "ask") {
      if (!ids.count(sid)) throw LoadError("transcript asks in unknown session " + sid);
      const auto body = service.ask(ids[sid], ev.at("question").get<std::string>());
      ++report.n_asks;
      if (coordinates_from_json(body.at("answer")) != coordinates_from_json(ev.at("answer"))) {
        ++report.n_mismatches;
        report.mismatches.push_back(sid + ": " + ev.at("question").get<std::string>() + " recorded " +
                                    ev.at("answer").dump() + ", replayed " + body.at("answer").dump());
      }
    } else if (op == "reset") {
      if (!ids.count(sid)) throw LoadError("transcript resets unknown session " + sid);
      service.reset(ids[sid]);
    }
  }
  return report;
}

}  // namespace seqtab
