#include <doctest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "gdsl/svc.hpp"
#include "support.hpp"

using namespace gdsl;
namespace fs = std::filesystem;

namespace {

struct Running {
  fs::path dir;
  std::unique_ptr<Service> svc;
  std::thread th;
  int port = -1;

  explicit Running(const std::string& name) {
    dir = fs::temp_directory_path() / ("gdsl_svc_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir / "ui");
    std::ofstream(dir / "ui" / "index.html") << "<html></html>";
    ServiceConfig cfg;
    cfg.data_dir = dir / "data";
    cfg.ui_dir = dir / "ui";
    cfg.cors_origin = "http://localhost:5173";
    svc = std::make_unique<Service>(cfg, nullptr);
    port = svc->bind("127.0.0.1", 0);
    th = std::thread([this] { svc->run(); });
  }
  ~Running() {
    svc->stop();
    th.join();
    fs::remove_all(dir);
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

Json body(const httplib::Result& r) { return Json::parse(r->body); }

std::string base_ops() {
  Json ops = parse_json(test::read_text(test::fixture_path("fixtures/nl_base.ops.json")));
  ops.erase(ops.begin() + 10, ops.end());
  return ops.dump();
}

}  // namespace

TEST_SUITE("svc") {
  TEST_CASE("session lifecycle") {
    Running s("lifecycle");
    REQUIRE(s.port > 0);
    auto c = s.client();
    auto created = c.Post("/sessions", "", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = body(created)["sessionId"];
    CHECK(SessionStore::valid_id(id));

    auto ops = c.Post("/sessions/" + id + "/ops", base_ops(), "application/json");
    CHECK(ops->status == 200);
    CHECK(body(ops)["version"] == 10);

    auto bad = c.Post("/sessions/" + id + "/ops",
                      R"([{"op":"ModifyParams","target":"circle","params":{"primitive.r":5}},
                          {"op":"ModifyParams","target":"ghost","params":{"primitive.r":5}}])",
                      "application/json");
    CHECK(bad->status == 409);
    CHECK(body(bad)["error"]["index"] == 1);
    CHECK(body(c.Get("/sessions/" + id))["version"] == 10);

    auto preview = c.Get("/sessions/" + id + "/preview.svg");
    CHECK(preview->status == 200);
    CHECK(preview->body.find("data-container-id") != std::string::npos);
    const std::string etag = preview->get_header_value("ETag");
    auto cached = c.Get("/sessions/" + id + "/preview.svg", {{"If-None-Match", etag}});
    CHECK(cached->status == 304);

    CHECK(c.Get("/sessions/0123456789abcdef0123456789abcdef")->status == 404);
  }

  TEST_CASE("nl propose and confirm") {
    Running s("nl");
    auto c = s.client();
    const std::string id = body(c.Post("/sessions", "", "application/json"))["sessionId"];
    c.Post("/sessions/" + id + "/ops", base_ops(), "application/json");
    CHECK(c.Post("/sessions/" + id + "/nl/confirm", "", "application/json")->status == 409);

    auto nl = c.Post("/sessions/" + id + "/nl", R"({"text": "make the square red"})", "application/json");
    REQUIRE(nl->status == 200);
    CHECK(body(nl).contains("proposal"));
    auto confirm = c.Post("/sessions/" + id + "/nl/confirm", "{}", "application/json");
    CHECK(confirm->status == 200);
    CHECK(body(confirm)["version"] == 11);
    CHECK(body(c.Get("/sessions/" + id + "/history"))["entries"].size() == 11);
  }

  TEST_CASE("config, ui and cors") {
    Running s("config");
    auto c = s.client();
    auto cfg = c.Get("/config");
    REQUIRE(cfg->status == 200);
    CHECK(body(cfg)["containerIdAttribute"] == "data-container-id");
    CHECK(cfg->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
    auto ui = c.Get("/ui/index.html");
    CHECK(ui->status == 200);
    CHECK(c.Post("/sessions", "{", "application/json")->status == 400);
  }

  TEST_CASE("sessions survive a restart") {
    const fs::path dir = fs::temp_directory_path() / "gdsl_svc_test_restart";
    fs::remove_all(dir);
    std::string id, before;
    {
      SessionStore store(dir);
      id = store.create(GlyphDocument{});
      store.mutate(id, [](Session& s) {
        for (const auto& op : test::load_ops("nl_base.ops.json")) s.doc = apply_recorded(s.doc, op, s.history);
        return true;
      });
      before = serialize(store.read(id).doc);
    }
    SessionStore again(dir);
    const Session s = again.read(id);
    CHECK(serialize(s.doc) == before);
    CHECK(s.history.entries.size() == test::load_ops("nl_base.ops.json").size());
    fs::remove_all(dir);
  }

  TEST_CASE("uniquify_ids renames clashes and references") {
    const GlyphDocument a = test::build("garden.ops.json");
    const GlyphDocument b = uniquify_ids(a, a);
    for (const auto& [id, c] : b.containers) CHECK(a.containers.count(id) == 0);
    CHECK(b.containers.size() == a.containers.size());
  }
}
