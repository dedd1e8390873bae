#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "gdsl/error.hpp"
#include "gdsl/serialize.hpp"
#include "gdsl/svc.hpp"

namespace gdsl {

namespace fs = std::filesystem;

namespace {

std::string now_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf.data(), static_cast<int>(ms));
  return out;
}

std::string new_id() {
  static std::mutex m;
  static std::mt19937_64 gen = [] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }();
  std::lock_guard lock(m);
  char out[33];
  std::snprintf(out, sizeof out, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                static_cast<unsigned long long>(gen()));
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string(), p.filename().string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, const std::string& bytes) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string(), p.filename().string());
    out << bytes;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string(), p.filename().string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot replace " + p.string() + ": " + ec.message(), p.filename().string());
}

}  // namespace

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

bool SessionStore::valid_id(const std::string& id) {
  if (id.size() != 32) return false;
  for (char c : id) {
    if (!std::isxdigit(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string SessionStore::create(const GlyphDocument& initial) {
  auto e = std::make_shared<Entry>();
  std::string id;
  {
    std::lock_guard lock(mu_);
    do {
      id = new_id();
    } while (sessions_.count(id) || fs::exists(root_ / id));
    sessions_[id] = e;
  }
  std::lock_guard lock(e->m);
  e->s.id = id;
  e->s.initial = initial;
  e->s.doc = initial;
  e->s.created_at = e->s.updated_at = now_iso();
  fs::create_directories(root_ / id);
  write_atomic(root_ / id / "initial.gdsl.json", serialize(initial));
  persist(e->s);
  return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& id) {
  if (!valid_id(id)) throw SessionNotFound(id);
  std::lock_guard lock(mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (!fs::exists(root_ / id / "initial.gdsl.json")) throw SessionNotFound(id);
  auto e = std::make_shared<Entry>();
  e->s = load(id);
  sessions_[id] = e;
  return e;
}

Session SessionStore::load(const std::string& id) const {
  const fs::path dir = root_ / id;
  Session s;
  s.id = id;
  s.initial = deserialize(read_file(dir / "initial.gdsl.json"));
  if (fs::exists(dir / "history.json")) s.history = history_from_json(parse_json(read_file(dir / "history.json")));
  std::optional<GlyphDocument> stored;
  if (fs::exists(dir / "doc.gdsl.json")) stored = deserialize(read_file(dir / "doc.gdsl.json"));
  try {
    s.doc = replay(s.initial, s.history);
    if (stored && serialize(*stored) != serialize(s.doc)) {
      std::cerr << "session " << id << ": document behind history, using the replayed document\n";
    }
  } catch (const Error& e) {
    if (!stored) throw;
    std::cerr << "session " << id << ": " << e.what() << "; using the stored document\n";
    s.doc = *stored;
  }
  if (fs::exists(dir / "meta.json")) {
    const Json meta = parse_json(read_file(dir / "meta.json"));
    s.created_at = meta.value("createdAt", "");
    s.updated_at = meta.value("updatedAt", "");
    if (auto it = meta.find("pending"); it != meta.end() && !it->is_null()) s.pending = parse_result_from_json(*it);
  }
  return s;
}

void SessionStore::persist(const Session& s) const {
  const fs::path dir = root_ / s.id;
  write_atomic(dir / "history.json", canonical_dump(to_json(s.history)));
  write_atomic(dir / "doc.gdsl.json", serialize(s.doc));
  Json meta{{"createdAt", s.created_at}, {"updatedAt", s.updated_at}, {"version", s.doc.version}};
  meta["pending"] = s.pending ? to_json(*s.pending) : Json(nullptr);
  write_atomic(dir / "meta.json", canonical_dump(meta));
}

Session SessionStore::read(const std::string& id) {
  auto e = entry(id);
  std::lock_guard lock(e->m);
  return e->s;
}

void SessionStore::mutate(const std::string& id, const std::function<bool(Session&)>& fn) {
  auto e = entry(id);
  std::lock_guard lock(e->m);
  Session work = e->s;
  if (!fn(work)) return;
  work.updated_at = now_iso();
  persist(work);
  e->s = std::move(work);
}

void SessionStore::save_export(const std::string& id, const std::string& svg, const std::string& gdsl) {
  auto e = entry(id);
  std::lock_guard lock(e->m);
  write_atomic(root_ / id / "export.svg", svg);
  write_atomic(root_ / id / "export.gdsl.json", gdsl);
}

}  // namespace gdsl
