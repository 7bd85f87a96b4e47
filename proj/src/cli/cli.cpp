// Copyright 2026-present the nanorag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "nanorag/cli.hpp"
#include "nanorag/errors.hpp"
#include "nanorag/harvest.hpp"
#include "nanorag/service.hpp"

namespace nanorag::cli {

namespace {

struct EngineOptions {
    std::string config_path;
    std::string corpus;
    std::string snapshot;
};

struct AnswerOptions {
    std::string question;
    std::optional<std::size_t> k;
    std::optional<double> temperature;
    std::optional<std::size_t> max_tokens;
    bool no_rerank = false;
};

struct HarvestOptions {
    std::vector<std::string> fixtures;
    std::vector<std::string> terms;
    std::optional<int> year_from;
    std::optional<int> year_to;
    bool open_access = false;
    std::size_t max_results = 100;
    std::string out;
};

ServiceConfig load_config(const EngineOptions& o) {
    const auto kv = o.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config_path);
    auto cfg = ServiceConfig::from_config(kv);
    if (!o.corpus.empty()) cfg.corpus_path = o.corpus;
    if (!o.snapshot.empty()) cfg.snapshot_path = o.snapshot;
    return cfg;
}

void apply(const AnswerOptions& a, ServiceConfig& cfg) {
    if (a.k) cfg.retrieval.k = *a.k;
    if (a.temperature) cfg.generation.temperature = *a.temperature;
    if (a.max_tokens) cfg.generation.max_new_tokens = *a.max_tokens;
    if (a.no_rerank) cfg.retrieval.rerank_enabled = false;
    cfg.retrieval.validate();
    cfg.generation.validate();
}

void report_failures(const IngestCounts& c, std::ostream& err) {
    for (const auto& e : c.errors) err << "skipped " << e << '\n';
}

std::shared_ptr<Engine> ready_engine(const ServiceConfig& cfg, std::ostream& err) {
    auto engine = make_engine(cfg);
    report_failures(bootstrap(*engine, cfg), err);
    return engine;
}

int cmd_harvest(const EngineOptions& eo, const HarvestOptions& h, std::ostream& out) {
    const harvest::SearchSpec spec(h.terms, h.year_from, h.year_to, h.open_access, h.max_results);

    std::vector<std::unique_ptr<harvest::SourceAdapter>> adapters;
    std::vector<std::unique_ptr<harvest::RateLimiter>> limiters;
    harvest::SteadyClock clock;
    for (const auto& path : h.fixtures) {
        adapters.push_back(
            std::make_unique<harvest::FixtureReplayAdapter>(harvest::FixtureReplayAdapter::from_file(path)));
        limiters.push_back(std::make_unique<harvest::RateLimiter>(clock, std::chrono::milliseconds(0)));
    }
    if (h.fixtures.empty()) {
        if (eo.config_path.empty()) throw InvalidArgument("harvest needs --fixture or a config with source sections");
        const auto transport = net::make_default_transport();
        for (auto& s : harvest::sources_from_config(KeyValueConfig::load(eo.config_path))) {
            const auto delay = s.delay;
            adapters.push_back(std::make_unique<harvest::HttpSourceAdapter>(std::move(s), transport));
            limiters.push_back(std::make_unique<harvest::RateLimiter>(clock, delay));
        }
        if (adapters.empty()) throw InvalidArgument("config " + eo.config_path + " defines no harvest sources");
    }

    std::vector<harvest::SourceJob> jobs;
    for (std::size_t i = 0; i < adapters.size(); ++i) jobs.push_back({adapters[i].get(), limiters[i].get()});
    const auto report = harvest::run_harvest(jobs, spec, h.out);
    for (const auto& e : report.errors) out << "source failed: " << e << '\n';
    out << "fetched: " << report.fetched << '\n'
        << "unique: " << report.after_dedupe << '\n'
        << "written: " << report.written << '\n';
    return report.failed_sources == jobs.size() ? kExitFailure : kExitOk;
}

int cmd_ingest(const ServiceConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.corpus_path.empty()) throw InvalidArgument("ingest needs --corpus");
    auto engine = make_engine(cfg);
    if (!cfg.snapshot_path.empty() && std::filesystem::exists(cfg.snapshot_path)) engine->load(cfg.snapshot_path);
    const auto counts = engine->ingest_lines(read_lines(cfg.corpus_path));
    report_failures(counts, err);
    if (!cfg.snapshot_path.empty()) engine->save(cfg.snapshot_path);
    out << "ingested: " << counts.ingested << '\n'
        << "skipped_duplicates: " << counts.skipped_duplicates << '\n'
        << "failed: " << counts.failed << '\n';
    return kExitOk;
}

int cmd_snapshot(const ServiceConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.snapshot_path.empty()) throw InvalidArgument("snapshot needs --snapshot");
    if (cfg.corpus_path.empty()) throw InvalidArgument("snapshot needs --corpus");
    auto engine = make_engine(cfg);
    const auto counts = engine->ingest_lines(read_lines(cfg.corpus_path));
    report_failures(counts, err);
    engine->save(cfg.snapshot_path);
    out << "wrote " << cfg.snapshot_path << " (" << engine->index().size() << " chunks)\n";
    return kExitOk;
}

int cmd_stats(const ServiceConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto engine = ready_engine(cfg, err);
    out << "docs: " << engine->documents().document_count() << '\n'
        << "chunks: " << engine->index().size() << '\n'
        << "dim: " << engine->dim() << '\n';
    return kExitOk;
}

int cmd_query(const ServiceConfig& cfg, const std::string& question, std::ostream& out, std::ostream& err) {
    if (normalize_text(question).empty()) throw InvalidArgument("query needs a non-empty --q");
    const auto engine = ready_engine(cfg, err);
    ChatSession session;
    const auto answer = engine->answer_query(question, session, cfg.retrieval, cfg.generation);
    out << render_answer(answer);
    return kExitOk;
}

int cmd_chat(const ServiceConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
    const auto engine = ready_engine(cfg, err);
    ChatSession session;
    session.created_at_ms = now_ms();
    for (std::string line; out << "> " << std::flush, std::getline(in, line);) {
        const auto question = normalize_text(line);
        if (question.empty()) continue;
        if (question == "exit" || question == "quit") break;
        try {
            out << render_answer(engine->answer_query(question, session, cfg.retrieval, cfg.generation)) << '\n';
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
        }
    }
    return kExitOk;
}

int cmd_serve(ServiceConfig cfg, const std::optional<int>& port, const std::optional<std::string>& host,
              std::ostream& out, std::ostream& err) {
    if (port) cfg.port = *port;
    if (host) cfg.host = *host;
    cfg.validate();
    const auto engine = ready_engine(cfg, err);
    Service service(cfg, engine);
    out << "serving on http://" << cfg.host << ":" << cfg.port << " (" << engine->index().size() << " chunks)"
        << std::endl;
    service.run();
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Retrieval-augmented question answering over a scientific corpus", "nanorag"};
    app.require_subcommand(1);

    EngineOptions eo;
    app.add_option("--config", eo.config_path, "Key/value config file")->check(CLI::ExistingFile);

    const auto engine_flags = [&eo](CLI::App* sub) {
        sub->add_option("--corpus", eo.corpus, "Corpus JSONL file");
        sub->add_option("--snapshot", eo.snapshot, "Index snapshot path");
    };
    AnswerOptions ao;
    const auto answer_flags = [&ao](CLI::App* sub) {
        sub->add_option("--k", ao.k, "Number of passages to retrieve")->check(CLI::PositiveNumber);
        sub->add_option("--temperature", ao.temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0));
        sub->add_option("--max-tokens", ao.max_tokens, "Maximum new tokens")->check(CLI::PositiveNumber);
        sub->add_flag("--no-rerank", ao.no_rerank, "Disable MMR reranking");
    };

    HarvestOptions ho;
    auto* harvest_cmd = app.add_subcommand("harvest", "Fetch literature and write a corpus file");
    harvest_cmd->add_option("--fixture", ho.fixtures, "Replay a recorded source fixture (repeatable)")
        ->check(CLI::ExistingFile);
    harvest_cmd->add_option("--terms", ho.terms, "Search terms")->required();
    harvest_cmd->add_option("--year-from", ho.year_from, "First publication year");
    harvest_cmd->add_option("--year-to", ho.year_to, "Last publication year");
    harvest_cmd->add_flag("--oa", ho.open_access, "Open access only");
    harvest_cmd->add_option("--max", ho.max_results, "Maximum results per source")->check(CLI::PositiveNumber);
    harvest_cmd->add_option("--out", ho.out, "Output corpus path")->required();

    auto* ingest_cmd = app.add_subcommand("ingest", "Add a corpus file to the snapshot");
    engine_flags(ingest_cmd);

    auto* snapshot_cmd = app.add_subcommand("snapshot", "Build a snapshot from a corpus file");
    engine_flags(snapshot_cmd);

    auto* stats_cmd = app.add_subcommand("stats", "Print index statistics");
    engine_flags(stats_cmd);

    auto* query_cmd = app.add_subcommand("query", "Answer one question");
    engine_flags(query_cmd);
    answer_flags(query_cmd);
    query_cmd->add_option("--q", ao.question, "Question")->required();

    auto* chat_cmd = app.add_subcommand("chat", "Interactive multi-turn session on stdin");
    engine_flags(chat_cmd);
    answer_flags(chat_cmd);

    std::optional<int> port;
    std::optional<std::string> host;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    engine_flags(serve_cmd);
    serve_cmd->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--host", host, "Listen address");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (harvest_cmd->parsed()) return cmd_harvest(eo, ho, out);
        auto cfg = load_config(eo);
        if (ingest_cmd->parsed()) return cmd_ingest(cfg, out, err);
        if (snapshot_cmd->parsed()) return cmd_snapshot(cfg, out, err);
        if (stats_cmd->parsed()) return cmd_stats(cfg, out, err);
        apply(ao, cfg);
        if (query_cmd->parsed()) return cmd_query(cfg, ao.question, out, err);
        if (chat_cmd->parsed()) return cmd_chat(cfg, in, out, err);
        if (serve_cmd->parsed()) return cmd_serve(cfg, port, host, out, err);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace nanorag::cli
