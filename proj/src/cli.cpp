#include "gdsl/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gdsl/core.hpp"
#include "gdsl/error.hpp"
#include "gdsl/infer.hpp"
#include "gdsl/nlcmd.hpp"
#include "gdsl/ops.hpp"
#include "gdsl/render.hpp"
#include "gdsl/serialize.hpp"
#include "gdsl/svc.hpp"

namespace gdsl {

namespace {

struct IoFailure {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure{"cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoFailure{"cannot read " + path};
  return ss.str();
}

// "-" or empty writes to `out`.
void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure{"cannot write " + path};
  f << bytes;
  f.close();
  if (!f) throw IoFailure{"cannot write " + path};
}

std::array<double, 4> parse_viewbox(const std::string& s) {
  std::string t = s;
  for (char& c : t) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(t);
  std::array<double, 4> v{};
  for (double& x : v) {
    if (!(in >> x)) throw CLI::ValidationError("--viewbox", "expected four numbers: min-x,min-y,width,height");
  }
  std::string rest;
  if (in >> rest) throw CLI::ValidationError("--viewbox", "expected four numbers: min-x,min-y,width,height");
  return v;
}

void report(std::ostream& err, const Error& e) { err << "error: " << e.what() << "\n"; }

struct RenderFlags {
  double width = 400;
  double height = 400;
  int decimals = 4;
  bool fit = false;
  bool annotate = false;
  std::string viewbox;
  std::string background;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--width", width, "canvas width")->check(CLI::PositiveNumber);
    app->add_option("--height", height, "canvas height")->check(CLI::PositiveNumber);
    app->add_option("--decimals", decimals, "fractional digits in coordinates")->check(CLI::Range(0, 8));
    app->add_flag("--fit", fit, "viewBox around the drawing");
    app->add_flag("--annotate", annotate, "emit data-container-id attributes");
    app->add_option("--viewbox", viewbox, "explicit viewBox: min-x,min-y,width,height");
    app->add_option("--background", background, "background color");
    app->add_option("--seed", seed, "override the document rngSeed");
  }

  SvgConfig config() const {
    SvgConfig c;
    c.width = width;
    c.height = height;
    c.decimals = decimals;
    c.fit = fit;
    c.annotate = annotate;
    if (!viewbox.empty()) c.view_box = parse_viewbox(viewbox);
    if (!background.empty()) {
      auto col = normalize_color(background);
      if (!col) throw CLI::ValidationError("--background", "not a color: " + background);
      c.background = *col;
    }
    return c;
  }
};

int cmd_compile(const std::string& doc_path, const std::string& out_path, const RenderFlags& flags,
                std::ostream& out, std::ostream& err) {
  const std::string bytes = read_file(doc_path);
  GlyphDocument doc;
  try {
    doc = load_document(bytes);
  } catch (const Error& e) {
    report(err, e);
    return 1;
  }
  std::vector<std::string> warnings;
  std::string svg;
  try {
    LayoutOptions layout;
    layout.seed_override = flags.seed;
    svg = render_document(doc, flags.config(), layout, &warnings);
  } catch (const Error& e) {
    report(err, e);
    return 1;
  }
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  write_output(out_path, svg, out);
  return 0;
}

int cmd_apply(const std::string& doc_path, const std::string& ops_path, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  const std::string doc_bytes = read_file(doc_path);
  const std::string ops_bytes = read_file(ops_path);
  GlyphDocument doc;
  std::vector<Operation> ops;
  try {
    doc = load_document(doc_bytes);
    ops = operations_from_json(parse_json(ops_bytes));
  } catch (const Error& e) {
    report(err, e);
    return 1;
  }
  if (ops.empty()) {
    write_output(out_path, doc_bytes, out);
    return 0;
  }
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    try {
      doc = gdsl::apply(doc, ops[i], &warnings);
    } catch (const Error& e) {
      err << "operation " << i << " failed: " << e.what() << "\n";
      return 1;
    }
  }
  // Each op re-reports standing warnings; print every distinct one once.
  std::set<std::string> seen;
  for (const auto& w : warnings) {
    if (seen.insert(w).second) err << "warning: " << w << "\n";
  }
  write_output(out_path, serialize(doc), out);
  return 0;
}

int cmd_infer(const std::string& svg_path, const std::string& out_path, double tol, bool verbose,
              std::ostream& out, std::ostream& err) {
  const std::string svg = read_file(svg_path);
  GlyphDocument doc;
  InferReport rep;
  try {
    doc = infer_structure(import_svg(svg), tol, &rep);
  } catch (const Error& e) {
    report(err, e);
    return 1;
  }
  if (verbose) {
    for (const auto& f : rep.fits) {
      err << "group of " << f.order.size() << ": " << to_string(f.model) << " residual " << f.residual << "\n";
    }
  }
  write_output(out_path, serialize(doc), out);
  return 0;
}

int cmd_parse_nl(const std::vector<std::string>& words, const std::string& doc_path, const std::string& selection,
                 bool all, std::ostream& out, std::ostream& err) {
  GlyphDocument doc;
  if (!doc_path.empty()) {
    const std::string bytes = read_file(doc_path);
    try {
      doc = load_document(bytes);
    } catch (const Error& e) {
      report(err, e);
      return 2;
    }
  }
  std::string text;
  for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
  std::optional<ContainerId> sel;
  if (!selection.empty()) sel = ContainerId(selection);
  std::unique_ptr<LlmBackend> backend;
  try {
    backend = backend_from_env();
  } catch (const Error& e) {
    report(err, e);
    return 2;
  }
  if (all) {
    const auto results = parse_commands(text, doc, sel, backend.get());
    Json arr = Json::array();
    bool every = !results.empty();
    for (const auto& r : results) {
      arr.push_back(to_json(r));
      every = every && r.is_proposal();
    }
    out << arr.dump(2) << "\n";
    return every ? 0 : 3;
  }
  const ParseResult r = parse_command(text, doc, sel, backend.get());
  out << to_json(r).dump(2) << "\n";
  return r.is_proposal() ? 0 : 3;
}

int cmd_serve(const std::string& host, int port, const ServiceConfig& cfg, std::ostream& out, std::ostream& err) {
  std::unique_ptr<LlmBackend> backend;
  try {
    backend = backend_from_env();
  } catch (const Error& e) {
    report(err, e);
    return 2;
  }
  // Stop cleanly on SIGINT / SIGTERM.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  Service svc(cfg, std::move(backend));
  const int bound = svc.bind(host, port);
  if (bound < 0) {
    err << "error: cannot listen on " << host << ":" << port << "\n";
    return 2;
  }
  out << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    svc.stop();
  });
  svc.run();
  // run() can also return on its own; wake the waiter so it can be joined.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &set, nullptr);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Glyph DSL engine: compile, edit, infer and serve glyph documents", "gdsl"};
  app.require_subcommand(1);

  std::string out_path;
  RenderFlags render;

  auto* compile = app.add_subcommand("compile", "render a .gdsl.json document to SVG");
  std::string doc_path;
  compile->add_option("doc", doc_path, "document")->required();
  compile->add_option("-o,--out", out_path, "output SVG (default: stdout)");
  render.add(compile);

  auto* apply = app.add_subcommand("apply", "apply a JSON array of operations to a document");
  std::string ops_path;
  apply->add_option("doc", doc_path, "document")->required();
  apply->add_option("ops", ops_path, "operations")->required();
  apply->add_option("-o,--out", out_path, "output document (default: stdout)");

  auto* infer = app.add_subcommand("infer", "recover GDSL structure from an SVG");
  std::string svg_path;
  double tol = 1e-3;
  bool verbose = false;
  infer->add_option("svg", svg_path, "input SVG")->required();
  infer->add_option("-o,--out", out_path, "output document (default: stdout)");
  infer->add_option("--tol", tol, "relative fit tolerance")->check(CLI::PositiveNumber);
  infer->add_flag("-v,--verbose", verbose, "print the fitted model of each group");

  auto* nl = app.add_subcommand("parse-nl", "parse a natural-language command");
  std::vector<std::string> words;
  std::string selection;
  bool all = false;
  nl->add_option("text", words, "command text")->required();
  nl->add_option("--doc", doc_path, "document the command refers to");
  nl->add_option("--selection", selection, "selected container id");
  nl->add_flag("--all", all, "parse every sentence and print an array");

  auto* serve = app.add_subcommand("serve", "run the session HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "gdsl-data", cors, ui_dir;
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--data", data_dir, "session directory");
  serve->add_option("--cors-origin", cors, "allowed CORS origin");
  serve->add_option("--ui-dir", ui_dir, "static files served under /ui/");
  serve->add_option("--seed", render.seed, "override document rngSeed in previews");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (compile->parsed()) return cmd_compile(doc_path, out_path, render, out, err);
    if (apply->parsed()) return cmd_apply(doc_path, ops_path, out_path, out, err);
    if (infer->parsed()) return cmd_infer(svg_path, out_path, tol, verbose, out, err);
    if (nl->parsed()) return cmd_parse_nl(words, doc_path, selection, all, out, err);
    if (serve->parsed()) {
      ServiceConfig cfg;
      cfg.data_dir = data_dir;
      cfg.cors_origin = cors;
      cfg.ui_dir = ui_dir;
      cfg.seed = render.seed;
      return cmd_serve(host, port, cfg, out, err);
    }
  } catch (const IoFailure& e) {
    err << "error: " << e.message << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace gdsl
