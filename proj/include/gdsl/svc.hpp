#pragma once

// Session HTTP service: documents, operations, NL turns, previews and
// inference, persisted per session on disk.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "gdsl/nlcmd.hpp"
#include "gdsl/ops.hpp"
#include "gdsl/render.hpp"

namespace httplib {
class Server;
}

namespace gdsl {

struct Session {
  std::string id;
  GlyphDocument initial;  // history replays from here
  GlyphDocument doc;
  EditHistory history;
  std::optional<ParseResult> pending;
  std::string created_at;  // ISO 8601, UTC
  std::string updated_at;
};

struct SessionNotFound : std::runtime_error {
  explicit SessionNotFound(const std::string& id) : std::runtime_error("no session '" + id + "'") {}
};

// One directory per session under `root`:
//   initial.gdsl.json  history.json  doc.gdsl.json  meta.json
// Files are replaced by write-then-rename, history before document, so a
// crash between the two leaves a history the document can be replayed from.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  std::string create(const GlyphDocument& initial);

  // Copy of the last committed state. Loads from disk on first access.
  Session read(const std::string& id);

  // Exclusive access to one session. When `fn` returns true the session is
  // persisted before the lock is released; if it throws nothing is written
  // and the in-memory state is left as it was.
  void mutate(const std::string& id, const std::function<bool(Session&)>& fn);

  void save_export(const std::string& id, const std::string& svg, const std::string& gdsl);

  const std::filesystem::path& root() const { return root_; }

  static bool valid_id(const std::string& id);

 private:
  struct Entry {
    std::mutex m;
    Session s;
  };
  std::shared_ptr<Entry> entry(const std::string& id);
  Session load(const std::string& id) const;
  void persist(const Session& s) const;

  std::filesystem::path root_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct ServiceConfig {
  std::filesystem::path data_dir = "gdsl-data";
  std::string cors_origin;         // empty: no CORS headers
  std::filesystem::path ui_dir;    // served under /ui/ when set
  SvgConfig preview = [] {
    SvgConfig c;
    c.annotate = true;
    c.fit = true;
    return c;
  }();
  std::optional<std::uint64_t> seed;
  double infer_tolerance = 1e-3;
};

class Service {
 public:
  Service(ServiceConfig cfg, std::unique_ptr<LlmBackend> backend);
  ~Service();

  // Binds (port 0 picks a free port) and returns the port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void run();
  void stop();

  SessionStore& store() { return store_; }

 private:
  void routes();

  ServiceConfig cfg_;
  std::unique_ptr<LlmBackend> backend_;
  SessionStore store_;
  std::unique_ptr<httplib::Server> server_;
};

// Stable quoted hash of the canonical document bytes.
std::string document_etag(const GlyphDocument& doc);

// Renames containers of `incoming` that clash with ids in `existing`
// (suffix -2, -3, ...), updating every reference.
GlyphDocument uniquify_ids(const GlyphDocument& incoming, const GlyphDocument& existing);

}  // namespace gdsl
