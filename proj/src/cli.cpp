#include "pickmix/cli.hpp"

#include <atomic>
#include <chrono>
#include <thread>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pickmix/errors.hpp"
#include "pickmix/manifold.hpp"
#include "pickmix/retrieval.hpp"
#include "pickmix/service.hpp"

namespace pickmix::cli {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot write " + path.string());
    out << text;
    if (!out) throw IOError("write failed for " + path.string());
}

nlohmann::json parse_json_file(const std::filesystem::path& path, const char* what) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw QueryError(std::string("malformed ") + what + " JSON in " + path.string() + ": " + e.what());
    }
}

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    int l = 0, b = 0;
    try {
        if (x == std::string::npos) throw std::invalid_argument(text);
        std::size_t used = 0;
        l = std::stoi(text.substr(0, x), &used);
        if (used != x) throw std::invalid_argument(text);
        b = std::stoi(text.substr(x + 1), &used);
        if (used != text.size() - x - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ParamError("--grid expects LxB, got '" + text + "'");
    }
    if (l < 2 || b < 2) throw ParamError("--grid needs L >= 2 and B >= 2, got " + text);
    return {l, b};
}

std::vector<EvalCase> random_self_cases(const std::vector<GeneratedShape>& shapes) {
    std::vector<EvalCase> cases;
    for (const auto& s : shapes) {
        EvalCase c;
        for (const auto& label : s.mesh.label_set)
            c.query.picks.push_back({PickSource::shape(s.record.id), label, 1.0});
        c.ground_truth = s.record.id;
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace

void write_corpus(const std::vector<GeneratedShape>& shapes, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "meshes", ec);
    if (ec) throw IOError("cannot create " + (dir / "meshes").string() + ": " + ec.message());
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& s : shapes) {
        const auto file = "meshes/" + s.record.name + ".json";
        save_mesh_json(s.mesh, dir / file);
        entries.push_back({{"id", s.record.id},
                           {"name", s.record.name},
                           {"file", file},
                           {"params", to_json(s.params)}});
    }
    const auto& labels = shapes.empty() ? default_chair_labels() : shapes.front().mesh.label_set;
    write_text(dir / "manifest.json",
               nlohmann::json{{"labels", labels}, {"shapes", entries}}.dump(2) + "\n");
}

std::vector<CorpusEntry> read_corpus(const std::filesystem::path& dir) {
    const auto manifest = parse_json_file(dir / "manifest.json", "manifest");
    std::vector<std::string> labels = default_chair_labels();
    std::vector<CorpusEntry> corpus;
    try {
        if (manifest.contains("labels")) labels = manifest.at("labels").get<std::vector<std::string>>();
        for (const auto& e : manifest.at("shapes")) {
            CorpusEntry c;
            c.record.id = e.at("id").get<std::uint32_t>();
            c.record.name = e.value("name", std::to_string(c.record.id));
            const auto file = e.at("file").get<std::string>();
            c.record.source = file;
            const auto path = dir / file;
            const auto format = path.extension() == ".obj" ? MeshFormat::Obj : MeshFormat::Json;
            c.mesh = load_mesh(path, format, labels);
            corpus.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("manifest " + (dir / "manifest.json").string() + ": " + e.what());
    }
    return corpus;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Part-based 3D shape retrieval", "pickmix"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a procedural chair corpus");
    std::string grid;
    int random_count = 0;
    std::uint64_t seed = 1;
    std::string out_dir;
    auto* grid_opt = gen->add_option("--grid", grid, "LxB leg/backrest variant grid");
    auto* random_opt = gen->add_option("--random", random_count, "Number of random chairs");
    gen->add_option("--seed", seed, "Seed for --random");
    gen->add_option("--out", out_dir, "Output directory")->required();
    grid_opt->excludes(random_opt);

    // build
    auto* build = app.add_subcommand("build", "Build an index from a corpus directory");
    std::string corpus_dir, index_out, hog = "two-level";
    IndexConfig cfg;
    bool force = false;
    build->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    build->add_option("--out", index_out, "Index file")->required();
    build->add_option("--dim", cfg.sammon.dim, "Manifold dimension");
    build->add_option("--resolution", cfg.resolution, "Silhouette resolution");
    build->add_option("--hog", hog, "two-level or original");
    build->add_option("--max-iters", cfg.sammon.max_iters, "Sammon iteration cap");
    build->add_option("--step", cfg.sammon.step_factor, "Sammon step factor");
    build->add_option("--tol", cfg.sammon.rel_tol, "Relative stress tolerance");
    build->add_flag("--force", force, "Overwrite an existing index");

    // query
    auto* query = app.add_subcommand("query", "Run a blend query");
    std::string index_path, query_path, external_path;
    bool explain = false;
    query->add_option("--index", index_path, "Index file")->required();
    query->add_option("--query", query_path, "Query JSON file")->required();
    query->add_option("--external", external_path, "External embeddings JSON");
    query->add_flag("--explain", explain, "Include per-part costs");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate blend queries with ground truth");
    std::string cases_path;
    std::size_t k = 5;
    std::uint64_t shuffle_seed = 0;
    bool verbose = false;
    eval->add_option("--index", index_path, "Index file")->required();
    eval->add_option("--cases", cases_path, "Cases JSON file")->required();
    eval->add_option("--k", k, "Top-k cutoff")->check(CLI::PositiveNumber);
    auto* shuffle_opt = eval->add_option("--shuffle-seed", shuffle_seed, "Permute ground truths");
    eval->add_option("--external", external_path, "External embeddings JSON");
    eval->add_flag("--verbose", verbose, "Print a table to stderr");

    // project
    auto* project = app.add_subcommand("project", "Write a 2D projection of one part manifold");
    std::string part, csv_out;
    project->add_option("--index", index_path, "Index file")->required();
    project->add_option("--part", part, "Part label")->required();
    project->add_option("--out", csv_out, "CSV file")->required();

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    int port = 8080;
    std::string host = "127.0.0.1", static_dir, persist_ext;
    serve->add_option("--index", index_path, "Index file")->required();
    serve->add_option("--port", port, "TCP port (0 picks a free one)");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--static", static_dir, "UI asset directory");
    serve->add_option("--persist-ext", persist_ext, "Keep external embeddings in this file");

    std::vector<std::string> argv_store{"pickmix"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*gen) {
            if (grid.empty() && random_count <= 0)
                throw ParamError("generate needs --grid LxB or --random N");
            std::vector<GeneratedShape> shapes;
            std::vector<EvalCase> cases;
            if (!grid.empty()) {
                const auto [l, b] = parse_grid(grid);
                shapes = generate_grid(default_leg_variants(l), default_back_variants(b));
                cases = grid_cross_cases(l, b);
            } else {
                shapes = generate_random_corpus(random_count, seed);
                cases = random_self_cases(shapes);
            }
            write_corpus(shapes, out_dir);
            write_text(std::filesystem::path(out_dir) / "cases.json", cases_to_json(cases).dump(2) + "\n");
            out << nlohmann::json{{"shapes", shapes.size()}, {"cases", cases.size()}, {"out", out_dir}}.dump()
                << "\n";
        } else if (*build) {
            cfg.hog = parse_hog_variant(hog);
            cfg.validate();
            if (std::filesystem::exists(index_out) && !force)
                throw IOError(index_out + " exists; pass --force to overwrite");
            const auto corpus = read_corpus(corpus_dir);
            if (!corpus.empty()) cfg.label_set = corpus.front().mesh.label_set;
            const auto index = build_index(corpus, cfg);
            save_index(index, index_out);
            nlohmann::json parts = nlohmann::json::array();
            for (const auto& p : index.parts)
                parts.push_back({{"part", p.label},
                                 {"stress", p.manifold.stress},
                                 {"duplicates", p.manifold.duplicate_count()},
                                 {"iterations", p.manifold.iterations},
                                 {"converged", p.manifold.converged}});
            out << nlohmann::json{{"index", index_out},
                                  {"shapes", index.size()},
                                  {"fingerprint", index.fingerprint.to_json()},
                                  {"parts", parts}}
                       .dump()
                << "\n";
        } else if (*query) {
            const auto index = load_index(index_path);
            const auto q = parse_blend_query(parse_json_file(query_path, "query"));
            ExternalTable ext;
            if (!external_path.empty()) ext = ingest_external(index, std::filesystem::path(external_path));
            out << results_to_json(index, blend_retrieve(index, q, &ext), explain).dump() << "\n";
        } else if (*eval) {
            const auto index = load_index(index_path);
            auto cases = cases_from_json(parse_json_file(cases_path, "cases"));
            if (*shuffle_opt) cases = shuffle_ground_truth(std::move(cases), shuffle_seed);
            ExternalTable ext;
            if (!external_path.empty()) ext = ingest_external(index, std::filesystem::path(external_path));
            const auto report = run_blend_eval(index, cases, k, &ext);
            out << report_to_json(report).dump() << "\n";
            if (verbose) err << report_table(report);
        } else if (*project) {
            const auto index = load_index(index_path);
            const auto& table = index.part(part);
            const auto xy = project_2d(table.manifold);
            std::ostringstream csv;
            csv << "id,x,y\n" << std::setprecision(17);
            for (std::size_t r = 0; r < index.size(); ++r)
                csv << index.shapes[r].id << "," << xy(Eigen::Index(r), 0) << ","
                    << xy(Eigen::Index(r), 1) << "\n";
            write_text(csv_out, csv.str());
            out << nlohmann::json{{"part", part}, {"rows", index.size()}, {"out", csv_out}}.dump() << "\n";
        } else if (*serve) {
            auto index = std::make_shared<const ShapeIndex>(load_index(index_path));
            std::optional<std::filesystem::path> persist;
            if (!persist_ext.empty()) persist = persist_ext;
            std::optional<std::filesystem::path> assets;
            if (!static_dir.empty()) assets = static_dir;
            service::Session session(index, persist);
            g_stop.store(false);
            auto previous_int = std::signal(SIGINT, on_signal);
            auto previous_term = std::signal(SIGTERM, on_signal);
            std::atomic<int> bound{0};
            std::thread announce([&] {
                while (bound.load() == 0 && !g_stop.load())
                    std::this_thread::sleep_for(std::chrono::milliseconds(10));
                if (bound.load() > 0) {
                    err << "listening on http://" << host << ":" << bound.load() << "\n";
                    err.flush();
                }
            });
            const bool ok = service::serve(session, host, port, assets, g_stop, &bound);
            g_stop.store(true);
            announce.join();
            std::signal(SIGINT, previous_int);
            std::signal(SIGTERM, previous_term);
            if (!ok) throw IOError("cannot bind " + host + ":" + std::to_string(port));
        }
    } catch (const QueryError& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParamError& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace pickmix::cli
