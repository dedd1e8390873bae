#include "gdsl/svc.hpp"

#include <cstdio>
#include <iostream>

#include <httplib.h>

#include "gdsl/error.hpp"
#include "gdsl/infer.hpp"
#include "gdsl/serialize.hpp"

namespace gdsl {

namespace {

constexpr const char* kJson = "application/json";

Json error_body(std::string_view code, const std::string& message, const std::string& field = {},
                std::optional<std::size_t> index = std::nullopt) {
  Json e{{"code", code}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  if (index) e["index"] = *index;
  return Json{{"error", e}};
}

Json error_body(const Error& e) { return error_body(to_string(e.code()), e.detail(), e.field(), e.index()); }

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedInput:
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidDocument:
    case ErrorCode::EmptyInput:
    case ErrorCode::UnsupportedElement:
    case ErrorCode::UnknownSlot:
    case ErrorCode::TypeMismatch:
    case ErrorCode::InvalidTarget:
    case ErrorCode::NonFinite:
    case ErrorCode::BadValue:
      return 400;
    case ErrorCode::Io:
      return 500;
    default:
      return 409;
  }
}

// Failure of one operation inside a batch.
struct BatchFailure {
  std::size_t index;
  Error error;
};

Json parse_body(const httplib::Request& req) {
  Json j = parse_json(req.body);
  return j;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

}  // namespace

std::string document_etag(const GlyphDocument& doc) {
  // FNV-1a over the canonical bytes.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize(doc)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "\"%016llx\"", static_cast<unsigned long long>(h));
  return buf;
}

GlyphDocument uniquify_ids(const GlyphDocument& incoming, const GlyphDocument& existing) {
  std::map<ContainerId, ContainerId> rename;
  auto taken = [&](const ContainerId& id) {
    if (existing.find(id)) return true;
    for (const auto& [from, to] : rename) {
      if (to == id) return true;
    }
    return false;
  };
  for (const auto& [id, c] : incoming.containers) {
    if (!taken(id)) {
      rename[id] = id;
      continue;
    }
    for (int n = 2;; ++n) {
      ContainerId cand(id.str() + "-" + std::to_string(n));
      if (!taken(cand) && !incoming.find(cand)) {
        rename[id] = cand;
        break;
      }
    }
  }
  auto map_id = [&](const ContainerId& id) { return rename.count(id) ? rename.at(id) : id; };

  GlyphDocument out;
  out.rng_seed = incoming.rng_seed;
  out.version = incoming.version;
  if (incoming.root) out.root = map_id(*incoming.root);
  for (const auto& [id, c] : incoming.containers) {
    Container n = c;
    n.id = map_id(id);
    if (auto* r = std::get_if<RepeaterBody>(&n.body)) r->child = map_id(r->child);
    if (auto* comp = std::get_if<CompositorBody>(&n.body)) {
      for (auto& ch : comp->children) ch = map_id(ch);
      for (auto& rel : comp->relations) {
        rel.source = map_id(rel.source);
        rel.target = map_id(rel.target);
      }
    }
    for (auto& b : n.bindings) {
      for (const auto& [from, to] : rename) {
        if (from != to) b.attribute_path = replace_all(b.attribute_path, "instance[" + from.str() + "]", "instance[" + to.str() + "]");
      }
    }
    out.containers.emplace(n.id, std::move(n));
  }
  return out;
}

Service::Service(ServiceConfig cfg, std::unique_ptr<LlmBackend> backend)
    : cfg_(std::move(cfg)),
      backend_(std::move(backend)),
      store_(cfg_.data_dir),
      server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void Service::run() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

void Service::routes() {
  auto& srv = *server_;

  srv.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
    if (cfg_.cors_origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", cfg_.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match");
    res.set_header("Access-Control-Expose-Headers", "ETag");
  });
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  // Shared error handling: unknown sessions are 404, engine errors map by code.
  auto guarded = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const SessionNotFound& e) {
        send(res, 404, error_body("NotFound", e.what()));
      } catch (const BatchFailure& f) {
        send(res, 409, error_body(to_string(f.error.code()), f.error.detail(), f.error.field(), f.index));
      } catch (const Error& e) {
        send(res, status_for(e.code()), error_body(e));
      } catch (const std::exception& e) {
        send(res, 500, error_body("Internal", e.what()));
      }
    };
  };

  srv.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
             GlyphDocument doc;
             if (req.body.find_first_not_of(" \t\r\n") != std::string::npos) {
               try {
                 doc = load_document(req.body);
               } catch (const Error& e) {
                 throw Error(ErrorCode::SchemaViolation, e.detail(), e.field(), e.index());
               }
             }
             const std::string id = store_.create(doc);
             send(res, 201, Json{{"sessionId", id}, {"version", doc.version}});
           }));

  srv.Get(R"(/sessions/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Session s = store_.read(req.matches[1]);
            Json j{{"sessionId", s.id},
                   {"version", s.doc.version},
                   {"createdAt", s.created_at},
                   {"updatedAt", s.updated_at},
                   {"historyLength", s.history.entries.size()}};
            j["pending"] = s.pending ? to_json(*s.pending) : Json(nullptr);
            send(res, 200, j);
          }));

  srv.Post(R"(/sessions/([0-9a-f]+)/ops)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const std::vector<Operation> ops = operations_from_json(parse_body(req));
             std::vector<std::string> warnings;
             std::int64_t version = 0;
             store_.mutate(req.matches[1], [&](Session& s) {
               for (std::size_t i = 0; i < ops.size(); ++i) {
                 try {
                   s.doc = apply_recorded(s.doc, ops[i], s.history, &warnings);
                 } catch (const Error& e) {
                   throw BatchFailure{i, e};
                 }
               }
               version = s.doc.version;
               return !ops.empty();
             });
             send(res, 200, Json{{"version", version}, {"warnings", warnings}});
           }));

  srv.Post(R"(/sessions/([0-9a-f]+)/nl)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const Json body = parse_body(req);
             if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
               throw Error(ErrorCode::SchemaViolation, "expected {\"text\": string}", "/text");
             }
             std::optional<ContainerId> selection;
             if (auto it = body.find("selection"); it != body.end() && !it->is_null()) {
               if (!it->is_string()) throw Error(ErrorCode::SchemaViolation, "selection must be a string", "/selection");
               selection = ContainerId(it->get<std::string>());
             }
             ParseResult result;
             store_.mutate(req.matches[1], [&](Session& s) {
               result = parse_command(body["text"].get<std::string>(), s.doc, selection, backend_.get());
               const bool had = s.pending.has_value();
               s.pending = result.is_proposal() ? std::optional<ParseResult>(result) : std::nullopt;
               return had || s.pending.has_value();
             });
             send(res, 200, to_json(result));
           }));

  srv.Post(R"(/sessions/([0-9a-f]+)/nl/confirm)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             Json overrides = Json::object();
             if (req.body.find_first_not_of(" \t\r\n") != std::string::npos) {
               const Json body = parse_body(req);
               if (!body.is_object()) throw Error(ErrorCode::SchemaViolation, "expected an object", "");
               if (auto it = body.find("slotOverrides"); it != body.end() && !it->is_null()) {
                 if (!it->is_object()) {
                   throw Error(ErrorCode::SchemaViolation, "slotOverrides must be an object", "/slotOverrides");
                 }
                 overrides = *it;
               }
             }
             bool none_pending = false;
             std::int64_t version = 0;
             std::vector<std::string> warnings;
             Json applied;
             store_.mutate(req.matches[1], [&](Session& s) {
               if (!s.pending || !s.pending->is_proposal()) {
                 none_pending = true;
                 return false;
               }
               ParseResult r = *s.pending;
               for (const auto& [slot, value] : overrides.items()) {
                 Scalar v;
                 if (value.is_number()) v = value.get<double>();
                 else if (value.is_string()) v = value.get<std::string>();
                 else throw Error(ErrorCode::TypeMismatch, "slot values are numbers or strings", slot);
                 r = fill_slot(r, slot, v, s.doc);
               }
               try {
                 s.doc = apply_recorded(s.doc, r.proposal->operation, s.history, &warnings);
               } catch (const Error& e) {
                 throw BatchFailure{0, e};
               }
               applied = to_json(r.proposal->operation);
               s.pending.reset();
               version = s.doc.version;
               return true;
             });
             if (none_pending) {
               send(res, 409, error_body("NoPendingProposal", "there is no proposal to confirm"));
               return;
             }
             send(res, 200, Json{{"version", version}, {"operation", applied}, {"warnings", warnings}});
           }));

  srv.Get(R"(/sessions/([0-9a-f]+)/preview\.svg)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Session s = store_.read(req.matches[1]);
            const std::string etag = document_etag(s.doc);
            res.set_header("ETag", etag);
            res.set_header("Cache-Control", "no-cache");
            if (req.get_header_value("If-None-Match") == etag) {
              res.status = 304;
              return;
            }
            LayoutOptions layout;
            layout.seed_override = cfg_.seed;
            res.set_content(render_document(s.doc, cfg_.preview, layout), "image/svg+xml");
          }));

  srv.Post(R"(/sessions/([0-9a-f]+)/infer)", guarded([this](const httplib::Request& req, httplib::Response& res) {
             double tol = cfg_.infer_tolerance;
             if (req.has_param("tol")) {
               try {
                 tol = std::stod(req.get_param_value("tol"));
               } catch (const std::exception&) {
                 throw Error(ErrorCode::BadValue, "tol must be a number", "tol");
               }
             }
             const GlyphDocument inferred = infer_structure(import_svg(req.body), tol);
             std::vector<std::string> added, warnings;
             std::string root;
             std::int64_t version = 0;
             store_.mutate(req.matches[1], [&](Session& s) {
               const GlyphDocument merged = uniquify_ids(inferred, s.doc);
               for (const auto& [id, c] : merged.containers) added.push_back(id.str());
               root = merged.root ? merged.root->str() : "";
               const auto ops = rebuild_script(merged, *merged.root);
               for (std::size_t i = 0; i < ops.size(); ++i) {
                 try {
                   s.doc = apply_recorded(s.doc, ops[i], s.history, &warnings);
                 } catch (const Error& e) {
                   throw BatchFailure{i, e};
                 }
               }
               version = s.doc.version;
               return true;
             });
             send(res, 200, Json{{"addedContainerIds", added}, {"root", root}, {"version", version}, {"warnings", warnings}});
           }));

  srv.Get(R"(/sessions/([0-9a-f]+)/document)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Session s = store_.read(req.matches[1]);
            res.set_header("ETag", document_etag(s.doc));
            res.set_content(serialize(s.doc), kJson);
          }));

  srv.Get(R"(/sessions/([0-9a-f]+)/history)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Session s = store_.read(req.matches[1]);
            res.set_content(canonical_dump(to_json(s.history)), kJson);
          }));

  srv.Get(R"(/sessions/([0-9a-f]+)/export)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const Session s = store_.read(req.matches[1]);
            SvgConfig plain = cfg_.preview;
            plain.annotate = false;
            LayoutOptions layout;
            layout.seed_override = cfg_.seed;
            const std::string svg = render_document(s.doc, plain, layout);
            const std::string gdsl = serialize(s.doc);
            store_.save_export(s.id, svg, gdsl);
            send(res, 200, Json{{"sessionId", s.id}, {"version", s.doc.version}, {"svg", svg}, {"gdsl", parse_json(gdsl)}});
          }));

  srv.Get("/config", [this](const httplib::Request&, httplib::Response& res) {
    Json preview{{"width", cfg_.preview.width},
                 {"height", cfg_.preview.height},
                 {"decimals", cfg_.preview.decimals},
                 {"annotate", cfg_.preview.annotate},
                 {"fit", cfg_.preview.fit}};
    send(res, 200,
         Json{{"apiBase", ""},
              {"pollIntervalMs", 500},
              {"preview", preview},
              {"llmBackend", backend_ ? backend_->name() : "none"},
              {"containerIdAttribute", "data-container-id"}});
  });

  if (!cfg_.ui_dir.empty()) {
    if (!srv.set_mount_point("/ui", cfg_.ui_dir.string())) {
      std::cerr << "ui directory " << cfg_.ui_dir << " not found; /ui/ disabled\n";
    }
    srv.Get("/ui", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });
  }
}

}  // namespace gdsl
