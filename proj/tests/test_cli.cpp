#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "gdsl/cli.hpp"
#include "support.hpp"

using namespace gdsl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gdsl_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("compile writes SVG, invalid documents exit 1, missing files 2") {
    const fs::path doc = scratch("garden.gdsl.json");
    write(doc, serialize(test::build("garden.ops.json")));
    const Run ok = cli({"compile", doc.string(), "--fit", "--annotate"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("<svg") != std::string::npos);
    CHECK(ok.out.find("data-container-id") != std::string::npos);

    const fs::path bad = scratch("bad.gdsl.json");
    write(bad, R"({"root": "x", "containers": {}, "rngSeed": 0, "version": 0})");
    CHECK(cli({"compile", bad.string()}).code == 1);
    CHECK(cli({"compile", scratch("missing.json").string()}).code == 2);
    CHECK(cli({"compile", doc.string(), "--viewbox", "1,2,3"}).code == 2);
  }

  TEST_CASE("apply reports the failing operation") {
    const fs::path empty = scratch("empty.gdsl.json");
    write(empty, serialize(GlyphDocument{}));
    const fs::path ops = scratch("ops.json");
    write(ops, R"([{"op":"CreateBasic","id":"a","kind":"circle","params":{"cx":0,"cy":0,"r":2}},
                  {"op":"CreateRepeater","id":"b","target":"ghost","coordKind":"cartesian","count":2}])");
    const Run r = cli({"apply", empty.string(), ops.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("operation 1 failed") != std::string::npos);

    write(ops, "[]");
    const Run same = cli({"apply", empty.string(), ops.string()});
    CHECK(same.code == 0);
    CHECK(same.out == serialize(GlyphDocument{}));
  }

  TEST_CASE("infer and parse-nl") {
    const fs::path svg = scratch("row.svg");
    write(svg, R"(<svg><rect x="0" y="0" width="4" height="4"/><rect x="10" y="0" width="4" height="4"/>
      <rect x="20" y="0" width="4" height="4"/></svg>)");
    const Run inf = cli({"infer", svg.string(), "-v"});
    CHECK(inf.code == 0);
    CHECK(inf.err.find("translation") != std::string::npos);

    const Run nl = cli({"parse-nl", "what", "day", "is", "it"});
    CHECK(nl.code == 3);
    CHECK(nl.out.find("suggestion") != std::string::npos);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
  }
}
