#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ondiscuss/csv.hpp"
#include "ondiscuss/error.hpp"
#include "ondiscuss/json_io.hpp"
#include "ondiscuss/pipeline.hpp"
#include "ondiscuss/service.hpp"

namespace {

using namespace ondiscuss;
using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
    case ErrorKind::kUpstream:
    case ErrorKind::kAuthFailed:
    case ErrorKind::kRateLimited:
    case ErrorKind::kCourseNotFound:
    case ErrorKind::kNotFound:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  write_file_atomic(path, contents);
}

std::string edge_summary(const EnaModel& model, const Codebook& codebook) {
  std::ostringstream out;
  out << "discussion " << model.discussion_id << ", codebook v" << model.codebook_version
      << ", scope " << to_string(model.scope) << ", " << model.units.size() << " students\n";
  for (std::size_t e = 0; e < kNumEdges; ++e) {
    const auto [i, j] = edge_codes(e);
    char weight[32];
    std::snprintf(weight, sizeof weight, "%.4f", model.group_mean[e]);
    out << "  " << codebook.topics[i].name << " -- " << codebook.topics[j].name << "  " << weight
        << "\n";
  }
  for (std::size_t d = 0; d < 2; ++d) {
    out << "  axis " << d + 1 << ": "
        << (model.dimension_defined[d] ? std::to_string(model.variance_explained[d]) : "undefined")
        << "\n";
  }
  for (const std::string& note : model.notes) out << "  note: " << note << "\n";
  return out.str();
}

std::string render_svg(const EnaModel& model, const Codebook& codebook) {
  double extent = 1e-9;
  for (const Point2& p : model.code_positions) extent = std::max({extent, std::abs(p[0]), std::abs(p[1])});
  for (const UnitResult& u : model.units) {
    extent = std::max({extent, std::abs(u.point[0]), std::abs(u.point[1])});
  }
  const double size = 600;
  const double scale = (size / 2 - 60) / extent;
  auto sx = [&](double x) { return size / 2 + x * scale; };
  auto sy = [&](double y) { return size / 2 - y * scale; };
  double max_w = 0;
  for (double w : model.group_mean) max_w = std::max(max_w, w);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t e = 0; e < kNumEdges; ++e) {
    if (max_w <= 0 || model.group_mean[e] <= 0) continue;
    const auto [i, j] = edge_codes(e);
    const auto& a = model.code_positions[i];
    const auto& b = model.code_positions[j];
    out << "<line x1=\"" << sx(a[0]) << "\" y1=\"" << sy(a[1]) << "\" x2=\"" << sx(b[0])
        << "\" y2=\"" << sy(b[1]) << "\" stroke=\"#3b6ea5\" stroke-opacity=\"0.7\" stroke-width=\""
        << 1 + 9 * model.group_mean[e] / max_w << "\"/>\n";
  }
  for (const UnitResult& u : model.units) {
    out << "<circle cx=\"" << sx(u.point[0]) << "\" cy=\"" << sy(u.point[1])
        << "\" r=\"3\" fill=\"#c0504d\" fill-opacity=\"0.6\"/>\n";
  }
  for (std::size_t k = 0; k < kNumTopics; ++k) {
    const auto& p = model.code_positions[k];
    out << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"7\" fill=\"black\"/>\n";
    std::string name;
    for (char c : codebook.topics[k].name) {
      if (c == '<') name += "&lt;";
      else if (c == '&') name += "&amp;";
      else name += c;
    }
    out << "<text x=\"" << sx(p[0]) + 10 << "\" y=\"" << sy(p[1]) - 10
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

Codebook load_codebook_file(const std::string& path) {
  json j = json::parse(read_file(path));
  if (j.contains("codebook")) j = j["codebook"];
  return j.get<Codebook>();
}

HttpServer* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-based epistemic network analysis of discussion posts"};
  app.require_subcommand(1);

  ServiceConfig config = ServiceConfig::from_env();
  std::string data_dir = config.data_dir.string();
  std::string webui_dir = config.webui_dir.string();
  std::string stopwords = config.stopwords_path.string();
  app.add_option("--data-dir", data_dir, "Data directory")->capture_default_str();
  app.add_option("--canvas-url", config.canvas_base_url, "Canvas base URL");
  app.add_option("--canvas-token", config.canvas_token, "Canvas API token");
  app.add_option("--salt", config.pseudonym_salt, "Secret salt for student pseudonyms");
  app.add_option("--stopwords", stopwords, "Stopword list (one word per line)");

  std::string course, discussion, csv_path, title, out_path, corpus_path, from_csv, codebook_path,
      scope_name = "all", svg_path, edits_path, author = "instructor";
  std::int64_t version = 0, base_version = 0;
  std::uint64_t seed = config.lda_seed;

  auto* ingest = app.add_subcommand("ingest", "Pull a discussion from Canvas or load it from CSV");
  ingest->add_option("--course", course, "Course id");
  ingest->add_option("--discussion", discussion, "Discussion id")->required();
  ingest->add_option("--csv", csv_path, "Read posts from a CSV export instead of Canvas");
  ingest->add_option("--title", title, "Title for CSV imports");

  auto* gen = app.add_subcommand("gen-codebook", "Fit the topic model and print a codebook");
  gen->add_option("--discussion", discussion, "Discussion id")->required();
  gen->add_option("--seed", seed, "Sampler seed")->capture_default_str();
  gen->add_option("--corpus", corpus_path, "CSV of posts to fit on instead of the discussion");
  gen->add_option("--out", out_path, "Output file (default stdout)");

  auto* edit = app.add_subcommand("edit", "Apply a JSON array of codebook edits");
  edit->add_option("--discussion", discussion, "Discussion id")->required();
  edit->add_option("--base", base_version, "Version the edits were made against")->required();
  edit->add_option("--edits", edits_path, "JSON file with the edit array")->required();
  edit->add_option("--author", author, "Author recorded with the new version");

  auto* code = app.add_subcommand("code", "Code every post and write the CSV export");
  code->add_option("--discussion", discussion, "Discussion id");
  code->add_option("--version", version, "Codebook version (default latest)");
  code->add_option("--from-csv", from_csv, "Code posts from this CSV instead of a stored discussion");
  code->add_option("--codebook", codebook_path, "Codebook JSON file (with --from-csv)");
  code->add_option("--out", out_path, "Output file (default stdout)");

  auto* model = app.add_subcommand("model", "Build the network model and summarize it");
  model->add_option("--discussion", discussion, "Discussion id")->required();
  model->add_option("--scope", scope_name, "all | initial_only")->capture_default_str();
  model->add_option("--version", version, "Codebook version (default latest)");
  model->add_option("--svg", svg_path, "Also draw the group network as SVG");

  auto* exp = app.add_subcommand("export", "Write the ENA Web Tool CSV for a stored discussion");
  exp->add_option("--discussion", discussion, "Discussion id")->required();
  exp->add_option("--version", version, "Codebook version (default latest)");
  exp->add_option("--out", out_path, "Output file (default stdout)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", config.host)->capture_default_str();
  serve->add_option("--port", config.port)->capture_default_str();
  serve->add_option("--webui", webui_dir, "Static bundle served at /ui");
  serve->add_option("--instructor-token", config.instructor_token, "Bearer token required by the API");
  serve->add_option("--recompute-limit", config.recompute_limit,
                    "Posts above which models are computed in the background")
      ->capture_default_str();
  serve->add_option("--codebook-corpus", config.codebook_corpus,
                    "\"discussion\" or a CSV of posts used for initial codebooks")
      ->capture_default_str();
  serve->add_option("--seed", config.lda_seed, "Sampler seed for initial codebooks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }
  config.data_dir = data_dir;
  config.webui_dir = webui_dir;
  config.stopwords_path = stopwords;

  try {
    const std::optional<std::int64_t> requested =
        version > 0 ? std::optional<std::int64_t>(version) : std::nullopt;

    if (*ingest) {
      Service service(config);
      DiscussionRecord record;
      if (!csv_path.empty()) {
        record = ingest_csv(read_file(csv_path), discussion, course, title);
      } else {
        if (config.canvas_base_url.empty()) {
          std::cerr << "ingest: --canvas-url (or CANVAS_BASE_URL) is required without --csv\n";
          return kExitValidation;
        }
        if (course.empty()) {
          std::cerr << "ingest: --course is required for Canvas\n";
          return kExitValidation;
        }
        CanvasConfig cc;
        cc.base_url = config.canvas_base_url;
        cc.token = config.canvas_token;
        cc.pseudonym_salt = config.pseudonym_salt;
        CanvasClient client(cc, make_http_transport());
        record = ingest_canvas(client, course, discussion);
      }
      service.store().save_discussion(record);
      std::cout << "ingested " << record.posts.size() << " posts into " << discussion << "\n";
      return 0;
    }

    if (*gen) {
      Service service(config);
      std::vector<Post> corpus;
      if (!corpus_path.empty()) {
        corpus = import_csv(read_file(corpus_path)).posts;
      } else {
        auto record = service.store().load_discussion(discussion);
        if (!record) throw Error(ErrorKind::kNotFound, "discussion " + discussion + " was not ingested");
        corpus = std::move(record->posts);
      }
      const StopwordList list = stopwords.empty() ? StopwordList::bundled() : StopwordList::load(stopwords);
      PipelineOptions options;
      options.stopwords = &list;
      const Codebook codebook = generate_codebook(corpus, discussion, seed, {}, options);
      if (!service.store().latest_codebook(discussion) && service.store().load_discussion(discussion)) {
        service.store().append_codebook(discussion, {codebook, "topic-model", {}});
      }
      write_output(out_path, json(codebook).dump(2) + "\n");
      return 0;
    }

    if (*edit) {
      Service service(config);
      const auto edits = json::parse(read_file(edits_path)).get<std::vector<CodebookEdit>>();
      const CodebookRecord record = service.edit_codebook(discussion, base_version, edits, author);
      std::cout << "codebook " << discussion << " is now version " << record.codebook.version << "\n";
      return 0;
    }

    if (*code) {
      if (!from_csv.empty()) {
        if (codebook_path.empty()) {
          std::cerr << "code: --codebook is required with --from-csv\n";
          return kExitValidation;
        }
        const Codebook codebook = load_codebook_file(codebook_path);
        const ImportedCsv imported = import_csv(read_file(from_csv), discussion);
        const StopwordList list = stopwords.empty() ? StopwordList::bundled() : StopwordList::load(stopwords);
        PipelineOptions options;
        options.stopwords = &list;
        const auto docs = preprocess_corpus(imported.posts, options);
        const auto coded = code_corpus(docs, imported.posts, codebook);
        write_output(out_path, export_csv(imported.posts, coded, codebook));
        return 0;
      }
      if (discussion.empty()) {
        std::cerr << "code: --discussion or --from-csv is required\n";
        return kExitValidation;
      }
    }

    if (*code || *exp) {
      Service service(config);
      Request request{"GET", "/discussions/" + discussion + "/export.csv", {}, {}, {}};
      if (requested) request.query["version"] = std::to_string(*requested);
      Response response = service.handle(request);
      if (response.status != 200) {
        std::cerr << response.body << "\n";
        return response.status >= 500 || response.status == 404 ? kExitIo : kExitValidation;
      }
      write_output(out_path, response.body);
      return 0;
    }

    if (*model) {
      const auto scope = parse_scope(scope_name);
      if (!scope) {
        std::cerr << "model: --scope must be all or initial_only\n";
        return kExitValidation;
      }
      Service service(config);
      const auto entry = service.model(discussion, requested, *scope);
      std::cout << edge_summary(entry->model, entry->codebook);
      std::cout << "wrote "
                << service.store().model_path(discussion, entry->codebook.version, *scope).string()
                << "\n";
      if (!svg_path.empty()) write_file_atomic(svg_path, render_svg(entry->model, entry->codebook));
      return 0;
    }

    if (*serve) {
      Service service(config);
      HttpServer server(service);
      const int port = server.bind();
      g_server = &server;
      std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
      std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
      std::cout << "listening on http://" << config.host << ":" << port << "\n" << std::flush;
      server.listen();
      g_server = nullptr;
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "MalformedPayload: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
