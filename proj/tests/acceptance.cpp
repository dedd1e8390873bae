// One line per acceptance criterion; exit status 1 when any fails.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "gdsl/cli.hpp"
#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/infer.hpp"
#include "gdsl/layout.hpp"
#include "gdsl/nlcmd.hpp"
#include "gdsl/render.hpp"
#include "support.hpp"

using namespace gdsl;
using gdsl::test::build;
using gdsl::test::fixture_path;
using gdsl::test::read_text;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Child groups of a repeater group, with their world matrices.
struct Placed {
  const SceneNode* node;
  AffineMatrix world;
};

void collect(const SceneNode& n, const AffineMatrix& outer, const std::string& name, std::vector<Placed>& out) {
  const AffineMatrix w = compose(outer, n.matrix);
  if (n.name == name) out.push_back({&n, w});
  for (const auto& c : n.children) collect(c, w, name, out);
}

std::vector<Placed> find_nodes(const SceneNode& root, const std::string& name) {
  std::vector<Placed> out;
  collect(root, AffineMatrix::identity(), name, out);
  return out;
}

// Bound of a compositor child in world space. `parent` is the compositor's
// world matrix.
BBox child_bbox(const Placed& parent, std::size_t k) {
  return node_bbox(parent.node->children.at(k), parent.world);
}

// --- criteria ---------------------------------------------------------------------

Outcome garden_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  const GlyphDocument doc = build("garden.ops.json");
  const SceneNode scene = instantiate(doc);
  const double secs = seconds_since(t0);
  std::size_t top_groups = 0;
  for (const auto& c : scene.children) top_groups += c.is_group() ? 1 : 0;
  require(top_groups == 6, "top groups = " + std::to_string(top_groups));
  require(count_leaves(scene) == 30, "leaves = " + std::to_string(count_leaves(scene)));
  double worst = 0;
  std::vector<double> stems;
  for (const auto& inst : find_nodes(scene, "flowerWithStem")) {
    const BBox flower = child_bbox(inst, 0), stem = child_bbox(inst, 1);
    worst = std::max(worst, dist(anchor_point(flower, AnchorName::bottomCenter), anchor_point(stem, AnchorName::topCenter)));
    stems.push_back(stem.height());
  }
  require(stems.size() == 6, "instances = " + std::to_string(stems.size()));
  const std::vector<double> want{60, 90, 48, 72, 120, 36};
  for (std::size_t i = 0; i < 6; ++i) require(std::abs(stems[i] - want[i]) < 1e-9, "stem height " + std::to_string(i));
  require(worst <= 1e-6, "anchor gap " + fmt(worst));
  require(secs < 1.0, "took " + fmt(secs) + " s");
  return {true, "6 groups, 30 leaves, max anchor gap " + fmt(worst) + ", " + fmt(secs * 1000) + " ms"};
}

Outcome operation_corpus() {
  GlyphDocument doc;
  std::size_t applied = 0;
  for (const auto& op : gdsl::test::load_ops("operations.ops.json")) {
    try {
      doc = gdsl::apply(doc, op);
      ++applied;
    } catch (const Error& e) {
      throw Failure{op_echo(op) + ": " + e.what()};
    }
  }
  const auto* rect = std::get_if<BasicBody>(&doc.find(ContainerId("rect1"))->body);
  require(rect && rect->primitive.number("width") == 150 && rect->primitive.string("fill") == "#ff0000",
          "rect1 not modified");
  const auto* flower = std::get_if<RepeaterBody>(&doc.find(ContainerId("flower"))->body);
  require(flower && flower->count == 12 && doc.find(ContainerId("flower"))->coord.kind == CoordKind::polar &&
              flower->arrangement.mode == ArrangementMode::uniform,
          "flower repeater");
  const auto* chart = std::get_if<CompositorBody>(&doc.find(ContainerId("chart"))->body);
  require(chart && chart->children.size() == 2 && chart->relations.empty(), "chart compositor");
  const SceneNode bars = instantiate_container(doc, ContainerId("bars"));
  std::vector<double> heights;
  for (const auto& wl : world_leaves(bars)) heights.push_back(wl.node->primitive.number("height"));
  require(heights == std::vector<double>{10, 45, 30}, "bar heights");
  return {true, std::to_string(applied) + " operations applied, bar heights [10, 45, 30]"};
}

enum class Model { translation, rotation, translationScale };

// Random asymmetric polygon around `at`.
Primitive random_shape(std::mt19937_64& rng, Vec2 at) {
  std::uniform_real_distribution<double> r(3, 10);
  Points pts;
  for (int k = 0; k < 5; ++k) {
    const double a = 2 * M_PI * k / 5 + 0.3 * std::uniform_real_distribution<double>(-1, 1)(rng);
    const double len = r(rng);
    pts.push_back({at.x + len * std::cos(a), at.y + len * std::sin(a)});
  }
  Primitive p;
  p.kind = PrimitiveKind::polygon;
  p.attrs["points"] = pts;
  p.attrs["fill"] = std::string("#336699");
  return p;
}

Outcome inference_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> count_d(2, 12);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_len = 0, worst_angle = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Model model = static_cast<Model>(trial % 3);
    const int n = count_d(rng);
    GlyphDocument doc;
    CreateBasic cb;
    cb.id = ContainerId("shape");
    Vec2 offset{0, 0};
    if (model == Model::rotation) offset = {20 + 40 * u(rng), 10 * u(rng)};
    const Primitive shape = random_shape(rng, offset);
    cb.kind = shape.kind;
    cb.params = shape.attrs;
    doc = gdsl::apply(doc, cb);
    CreateRepeater cr;
    cr.id = ContainerId("rep");
    cr.target = ContainerId("shape");
    cr.count = n;
    Vec2 step, center;
    double delta = 0;
    std::vector<double> scales;
    if (model == Model::rotation) {
      cr.coord_kind = CoordKind::polar;
      delta = 10 + (300.0 / n - 10) * u(rng);
      cr.arrangement.delta_angle_deg = delta;
    } else {
      const double a = 2 * M_PI * u(rng), len = 25 + 30 * u(rng);
      step = {len * std::cos(a), len * std::sin(a)};
      cr.arrangement.step = step;
    }
    doc = gdsl::apply(doc, cr);
    if (model == Model::rotation) {
      center = {200 * u(rng) - 100, 200 * u(rng) - 100};
      ModifyParams m;
      m.target = ContainerId("rep");
      m.params = {{"transform.translate.x", center.x}, {"transform.translate.y", center.y}};
      doc = gdsl::apply(doc, m);
    }
    if (model == Model::translationScale) {
      for (int i = 0; i < n; ++i) scales.push_back(0.5 + 1.5 * u(rng));
      EncodeData e;
      e.target = ContainerId("rep");
      e.path = "instance.scale.sx+sy";
      ValueList vl;
      for (double s : scales) vl.values.emplace_back(s);
      e.data = vl;
      doc = gdsl::apply(doc, e);
    }

    InferReport rep;
    const GlyphDocument inferred = infer_structure(flatten_scene(instantiate(doc)), 1e-3, &rep);
    const std::string tag = "trial " + std::to_string(trial) + ": ";
    require(rep.fits.size() == 1, tag + "groups = " + std::to_string(rep.fits.size()));
    const FitResult& f = rep.fits.front();
    require(f.order.size() == static_cast<std::size_t>(n), tag + "count " + std::to_string(f.order.size()));
    bool found_repeater = false;
    for (const auto& [id, c] : inferred.containers) {
      if (const auto* r = std::get_if<RepeaterBody>(&c.body)) found_repeater = r->count == n;
    }
    require(found_repeater, tag + "no repeater with count " + std::to_string(n));
    const bool reversed = f.order.front() != 0;
    const double scale_len = model == Model::rotation ? f.diameter : std::hypot(step.x, step.y);
    if (model == Model::rotation) {
      require(f.model == FitModel::rotation, tag + "model " + std::string(to_string(f.model)));
      const double dc = dist(f.center, center) / f.diameter;
      const double da = std::abs(std::abs(f.delta_angle_deg) - delta);
      worst_len = std::max(worst_len, dc);
      worst_angle = std::max(worst_angle, da);
      require(dc <= 1e-6, tag + "center off by " + fmt(dc));
      require(da <= 1e-6, tag + "angle off by " + fmt(da));
    } else {
      const FitModel want = model == Model::translation ? FitModel::translation : FitModel::translationScale;
      require(f.model == want, tag + "model " + std::string(to_string(f.model)));
      const Vec2 got = reversed ? Vec2{-f.step.x, -f.step.y} : f.step;
      const double ds = dist(got, step) / scale_len;
      worst_len = std::max(worst_len, ds);
      require(ds <= 1e-6, tag + "step off by " + fmt(ds));
      if (model == Model::translationScale) {
        for (int i = 0; i < n; ++i) {
          const double want_s = reversed ? scales[n - 1 - i] / scales[n - 1] : scales[i] / scales[0];
          const double d = std::abs(f.scales.at(i) - want_s) / want_s;
          worst_len = std::max(worst_len, d);
          require(d <= 1e-6, tag + "scale " + std::to_string(i) + " off by " + fmt(d));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  require(secs < 30, "took " + fmt(secs) + " s");
  return {true, "200 documents, worst relative error " + fmt(worst_len) + ", worst angle error " + fmt(worst_angle) +
                    " deg, " + fmt(secs) + " s"};
}

Outcome translation_first() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 1);
  std::map<std::string, int> models;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 11;
    const Vec2 step{60 * u(rng) - 30, 60 * u(rng) - 30};
    Primitive p;
    switch (trial % 4) {
      case 0: p = random_shape(rng, {0, 0}); break;
      case 1:
        p.kind = PrimitiveKind::circle;
        p.attrs = {{"cx", 0.0}, {"cy", 0.0}, {"r", 3 + 5 * u(rng)}};
        break;
      case 2:
        p.kind = PrimitiveKind::rect;
        p.attrs = {{"x", 0.0}, {"y", 0.0}, {"width", 4 + 10 * u(rng)}, {"height", 4 + 10 * u(rng)}};
        break;
      default:
        p.kind = PrimitiveKind::path;
        p.attrs = {{"d", std::string("M 0 0 C 4 -9 11 -9 15 0 L 9 6 Z")}};
    }
    std::vector<FlatElement> group;
    for (int i = 0; i < n; ++i) {
      group.push_back({p, AffineMatrix::translation({i * step.x + 0.5, i * step.y - 1.5}), std::nullopt});
    }
    std::shuffle(group.begin(), group.end(), rng);
    const FitResult f = fit_transform_chain(group);
    ++models[std::string(to_string(f.model))];
    require(f.model == FitModel::translation, "trial " + std::to_string(trial) + " gave " + std::string(to_string(f.model)));
  }
  return {true, "100/100 groups fitted as translation"};
}

Outcome snowflake() {
  const GlyphDocument doc = build("snowflake.ops.json");
  const SceneNode scene = instantiate(doc);
  require(count_leaves(scene) == 49, "leaves = " + std::to_string(count_leaves(scene)));
  const auto elems = flatten_scene(scene);
  std::vector<FlatElement> spines;
  std::vector<Vec2> pts;
  for (const auto& e : elems) {
    if (e.source_id == "spine") spines.push_back(e);
    if (e.source_id == "hub") continue;
    for (Vec2 q : primitive_outline(e.primitive, 8)) pts.push_back(e.world.apply(q));
  }
  require(spines.size() == 6, "spines = " + std::to_string(spines.size()));
  const FitResult f = fit_transform_chain(spines);
  require(f.model == FitModel::rotation, "spine model " + std::string(to_string(f.model)));
  require(std::abs(std::abs(f.delta_angle_deg) - 60) < 1e-6, "fitted angle " + fmt(f.delta_angle_deg));
  const AffineMatrix r = AffineMatrix::rotation_deg(60, f.center);
  double worst = 0;
  for (Vec2 q : pts) {
    const Vec2 m = r.apply(q);
    double best = INFINITY;
    for (Vec2 o : pts) best = std::min(best, dist(m, o));
    worst = std::max(worst, best);
  }
  require(worst <= 1e-6, "symmetry residual " + fmt(worst));
  return {true, "49 leaves, 60-degree residual " + fmt(worst) + " over " + std::to_string(pts.size()) + " points"};
}

Outcome protein() {
  const GlyphDocument doc = build("protein.ops.json", 42);
  const SceneNode scene = instantiate(doc);
  const auto insts = find_nodes(scene, "diamond above curve");
  require(insts.size() == 8, "instances = " + std::to_string(insts.size()));
  double worst = 0, lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const auto& inst = insts[i];
    const AffineMatrix curve_world = compose(inst.world, inst.node->children.at(1).matrix);
    const double sy = curve_world.d, sx = curve_world.a;
    lo = std::min(lo, sy);
    hi = std::max(hi, sy);
    require(sy >= 0.8 && sy < 1.5, "y-scale " + fmt(sy));
    require(std::abs(sx - (1 + 0.25 * static_cast<double>(i))) < 1e-12, "x-scale " + fmt(sx));
    const BBox diamond = child_bbox(inst, 0), curve = child_bbox(inst, 1);
    worst = std::max(worst, dist(anchor_point(diamond, AnchorName::bottomCenter), anchor_point(curve, AnchorName::topCenter)));
  }
  require(worst <= 1e-6, "anchor gap " + fmt(worst));
  const std::string a = render_document(doc), b = render_document(build("protein.ops.json", 42));
  require(a == b, "seeded renders differ");
  require(render_document(build("protein.ops.json", 43)) != a, "seed has no effect");
  return {true, "y-scales in [" + fmt(lo) + ", " + fmt(hi) + "], anchor gap " + fmt(worst) + ", reproducible bytes"};
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

Outcome nl_corpus() {
  const GlyphDocument doc = build("nl_base.ops.json");
  std::istringstream in(read_text(fixture_path("nl_corpus.txt")));
  std::string line;
  int total = 0;
  std::vector<std::string> failures;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      const auto bar = line.find('|', pos);
      cols.push_back(trim(line.substr(pos, bar - pos)));
      pos = bar == std::string::npos ? line.size() : bar + 1;
    }
    const std::string checks = pos < line.size() ? line.substr(pos) : "";
    ++total;
    const std::string& text = cols[0];
    std::optional<ContainerId> sel;
    if (!cols[1].empty()) sel = ContainerId(cols[1]);
    const ParseResult r = parse_command(text, doc, sel, nullptr);
    auto fail = [&](const std::string& why) { failures.push_back("\"" + text + "\": " + why); };
    if (cols[2] == "suggestion") {
      if (r.is_proposal()) fail("expected a suggestion");
      continue;
    }
    if (!r.is_proposal()) {
      fail("no proposal");
      continue;
    }
    const Operation& op = r.proposal->operation;
    if (op_name(op) != cols[2]) {
      fail("got " + std::string(op_name(op)));
      continue;
    }
    try {
      gdsl::apply(doc, op);
    } catch (const Error& e) {
      fail(std::string("does not apply: ") + e.what());
      continue;
    }
    const Json j = to_json(op);
    std::istringstream cs(checks);
    std::string check;
    while (cs >> check) {
      // Values may contain spaces when quoted with single quotes.
      if (check.find("='") != std::string::npos && check.back() != '\'') {
        std::string more;
        while (cs >> more) {
          check += " " + more;
          if (more.back() == '\'') break;
        }
      }
      const auto eq = check.find('=');
      const std::string ptr = check.substr(0, eq);
      std::string want = check.substr(eq + 1);
      Json expected;
      if (want.size() >= 2 && want.front() == '\'' && want.back() == '\'') {
        expected = want.substr(1, want.size() - 2);
      } else {
        expected = Json::parse(want, nullptr, false);
        if (expected.is_discarded()) expected = want;
      }
      const Json::json_pointer p(ptr);
      if (!j.contains(p)) {
        fail(ptr + " missing in " + j.dump());
      } else if (j.at(p) != expected) {
        fail(ptr + " = " + j.at(p).dump() + ", want " + expected.dump());
      }
    }
  }
  if (!failures.empty()) {
    std::string all;
    for (const auto& f : failures) all += "\n    " + f;
    throw Failure{std::to_string(failures.size()) + " of " + std::to_string(total) + " commands failed:" + all};
  }
  return {true, std::to_string(total) + " commands, 0 failures"};
}

struct FixtureDoc {
  std::string name;
  std::uint64_t seed;
};
const std::vector<FixtureDoc> kFixtures{
    {"garden", 0}, {"operations", 0}, {"snowflake", 0}, {"protein", 42}, {"flower12", 0}};

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

Outcome determinism() {
  int checked = 0;
  for (const auto& f : kFixtures) {
    const std::string doc_path = fixture_path("fixtures/" + f.name + ".gdsl.json");
    const std::string bytes = read_text(doc_path);
    require(!bytes.empty(), f.name + ": missing fixture document");
    require(serialize(build(f.name + ".ops.json", f.seed)) == bytes, f.name + ": fixture document is stale");
    require(serialize(deserialize(bytes)) == bytes, f.name + ": serialization does not round-trip");
    require(deserialize(serialize(deserialize(bytes))) == deserialize(bytes), f.name + ": model round-trip");
    std::string first, second;
    require(cli({"compile", doc_path, "--fit"}, &first) == 0, f.name + ": compile failed");
    require(cli({"compile", doc_path, "--fit"}, &second) == 0, f.name + ": compile failed");
    require(first == second, f.name + ": two compiles differ");
    const std::string golden = read_text(fixture_path("golden/" + f.name + ".svg"));
    require(first == golden, f.name + ": output differs from golden file");
    ++checked;
  }
  return {true, std::to_string(checked) + " fixtures byte-identical to golden files and round-trip"};
}

// Random container tree built through the operations.
struct TreeBuilder {
  std::mt19937_64& rng;
  GlyphDocument doc;
  int next = 0;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  std::string fresh(const char* kind) { return std::string(kind) + "-" + std::to_string(next++); }

  // Returns the id and the analytic number of groups.
  std::pair<std::string, std::size_t> make(int depth) {
    const int choice = depth == 0 ? 0 : pick(0, 2);
    if (choice == 0) {
      CreateBasic cb;
      cb.id = ContainerId(fresh("basic"));
      if (pick(0, 1)) {
        cb.kind = PrimitiveKind::circle;
        cb.params = {{"cx", 0.0}, {"cy", 0.0}, {"r", double(pick(2, 9))}};
      } else {
        cb.kind = PrimitiveKind::rect;
        cb.params = {{"x", 0.0}, {"y", 0.0}, {"width", double(pick(2, 9))}, {"height", double(pick(2, 9))}};
      }
      doc = gdsl::apply(doc, cb);
      return {cb.id.str(), 0};
    }
    if (choice == 1) {
      const auto [child, g] = make(depth - 1);
      CreateRepeater cr;
      cr.id = ContainerId(fresh("rep"));
      cr.target = ContainerId(child);
      cr.count = pick(1, 4);
      if (pick(0, 1)) {
        cr.coord_kind = CoordKind::polar;
        cr.arrangement.delta_angle_deg = 360.0 / cr.count;
      } else {
        cr.arrangement.step = Vec2{double(pick(5, 20)), 0};
      }
      doc = gdsl::apply(doc, cr);
      return {cr.id.str(), 1 + static_cast<std::size_t>(cr.count) * g};
    }
    CreateCompositor cc;
    cc.id = ContainerId(fresh("comp"));
    std::size_t g = 1;
    const int kids = pick(1, 3);
    for (int k = 0; k < kids; ++k) {
      const auto [child, cg] = make(depth - 1);
      cc.children.push_back(ContainerId(child));
      g += cg;
    }
    doc = gdsl::apply(doc, cc);
    return {cc.id.str(), g};
  }
};

Outcome group_count_law() {
  std::mt19937_64 rng(4242);
  static const std::regex g_open(R"(<g[\s>/])");
  std::size_t total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    TreeBuilder b{rng, {}, 0};
    const auto [root, analytic] = b.make(b.pick(1, 4));
    require(b.doc.root && b.doc.root->str() == root, "root mismatch");
    const SceneNode scene = instantiate(b.doc);
    const std::string svg = render_svg(scene);
    const auto tags = static_cast<std::size_t>(
        std::distance(std::sregex_iterator(svg.begin(), svg.end(), g_open), std::sregex_iterator()));
    const std::size_t nodes = count_groups(scene);
    require(tags == nodes && nodes == analytic, "trial " + std::to_string(trial) + ": <g> " + std::to_string(tags) +
                                                   ", groups " + std::to_string(nodes) + ", formula " +
                                                   std::to_string(analytic));
    total += nodes;
  }
  return {true, "50 documents, " + std::to_string(total) + " groups in total, all three counts equal"};
}

// --- service process ----------------------------------------------------------------

struct Server {
  pid_t pid = -1;
  int port = 0;
};

Server start_server(const fs::path& data) {
  int fds[2];
  require(pipe(fds) == 0, "pipe failed");
  const pid_t pid = fork();
  require(pid >= 0, "fork failed");
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    setenv("GDSL_LLM_BACKEND", "none", 1);
    execl(GDSL_BINARY, "gdsl", "serve", "--port", "0", "--data", data.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  std::string line;
  char c;
  while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
  close(fds[0]);
  const auto colon = line.rfind(':');
  require(colon != std::string::npos, "server did not start: '" + line + "'");
  return {pid, std::stoi(line.substr(colon + 1))};
}

void kill_server(Server& s) {
  if (s.pid <= 0) return;
  kill(s.pid, SIGKILL);
  int status = 0;
  waitpid(s.pid, &status, 0);
  s.pid = -1;
}

Outcome service_persistence() {
  const fs::path data = fs::temp_directory_path() / ("gdsl-acceptance-" + std::to_string(getpid()));
  fs::remove_all(data);
  Server srv = start_server(data);
  struct Cleanup {
    Server& s;
    fs::path d;
    ~Cleanup() {
      kill_server(s);
      fs::remove_all(d);
    }
  } cleanup{srv, data};

  auto client = [&] {
    auto c = std::make_unique<httplib::Client>("127.0.0.1", srv.port);
    c->set_read_timeout(10, 0);
    return c;
  };
  auto cli = client();
  auto res = cli->Post("/sessions", "", "application/json");
  require(res && res->status == 201, "create session failed");
  const std::string id = Json::parse(res->body)["sessionId"];

  const auto ops = gdsl::test::load_ops("nl_base.ops.json");
  for (std::size_t i = 0; i < 10; ++i) {
    const Json body = Json::array({to_json(ops[i])});
    res = cli->Post("/sessions/" + id + "/ops", body.dump(), "application/json");
    require(res && res->status == 200, "op " + std::to_string(i) + " rejected");
  }
  res = cli->Get("/sessions/" + id + "/document");
  require(res && res->status == 200, "document fetch failed");
  const std::string doc_before = res->body;
  res = cli->Get("/sessions/" + id + "/history");
  const std::string history_before = res->body;
  require(deserialize(doc_before).version == 10, "version after 10 ops");

  kill_server(srv);
  srv = start_server(data);
  cli = client();
  res = cli->Get("/sessions/" + id + "/document");
  require(res && res->status == 200, "document missing after restart");
  require(res->body == doc_before, "document changed across restart");
  res = cli->Get("/sessions/" + id + "/history");
  require(res && res->body == history_before, "history changed across restart");

  // 20 concurrent edits to one session.
  GlyphDocument base;
  CreateBasic dot;
  dot.id = ContainerId("dot");
  dot.kind = PrimitiveKind::circle;
  dot.params = {{"cx", 0.0}, {"cy", 0.0}, {"r", 1.0}};
  base = gdsl::apply(base, dot);
  base.version = 0;
  res = cli->Post("/sessions", serialize(base), "application/json");
  require(res && res->status == 201, "seeded session failed");
  const std::string sid = Json::parse(res->body)["sessionId"];
  std::vector<std::int64_t> versions(20, -1);
  std::vector<std::thread> threads;
  for (int k = 0; k < 20; ++k) {
    threads.emplace_back([&, k] {
      auto c = client();
      const Json body = Json::array(
          {Json{{"op", "ModifyParams"}, {"target", "dot"}, {"params", {{"primitive.r", 10 + k}}}}});
      auto r = c->Post("/sessions/" + sid + "/ops", body.dump(), "application/json");
      if (r && r->status == 200) versions[static_cast<std::size_t>(k)] = Json::parse(r->body)["version"];
    });
  }
  for (auto& t : threads) t.join();
  std::vector<std::int64_t> sorted = versions;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < 20; ++k) require(sorted[static_cast<std::size_t>(k)] == k + 1, "versions are not 1..20");
  res = cli->Get("/sessions/" + sid + "/history");
  const EditHistory h = history_from_json(Json::parse(res->body));
  require(h.entries.size() == 20, "history has " + std::to_string(h.entries.size()) + " entries");
  for (int k = 0; k < 20; ++k) {
    // The request that saw version v is history entry v-1.
    const auto& e = h.entries[static_cast<std::size_t>(versions[static_cast<std::size_t>(k)] - 1)];
    const auto& m = std::get<ModifyParams>(e.op);
    require(std::get<double>(m.params.at("primitive.r")) == 10 + k, "history order does not match responses");
    require(e.version_after == versions[static_cast<std::size_t>(k)], "entry version");
  }
  res = cli->Get("/sessions/" + sid + "/document");
  require(deserialize(res->body).version == 20, "final version");
  return {true, "10 ops reloaded byte-identically after kill -9; 20 concurrent edits got versions 1..20 in history order"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"flower_garden_pipeline", garden_pipeline},
      {"operation_corpus", operation_corpus},
      {"inference_round_trip", inference_round_trip},
      {"simple_to_complex_ordering", translation_first},
      {"snowflake_symmetry", snowflake},
      {"protein_chart", protein},
      {"nl_corpus", nl_corpus},
      {"determinism_and_golden_files", determinism},
      {"group_count_law", group_count_law},
      {"service_persistence", service_persistence},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const Failure& f) {
      o = {false, f.what};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
