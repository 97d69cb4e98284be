// symr command-line front end: ingest corpora, encode representations,
// train BPE, generate and audit splits, report sizes, run verification.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "symr/bpe.hpp"
#include "symr/graph.hpp"
#include "symr/midi.hpp"
#include "symr/musicxml.hpp"
#include "symr/net.hpp"
#include "symr/pianoroll.hpp"
#include "symr/piece.hpp"
#include "symr/segment.hpp"
#include "symr/synth.hpp"
#include "symr/tokenizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace symr;

namespace {

struct Global {
    fs::path out = "out";
    json config = json::object();
    uint64_t seed = 0;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    bool keep_going = false;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
}

// Flag > config file > default. `eff` starts as defaults, gets the
// config-file value if present, then the flag value if it was passed.
template <typename T>
void pick(json& eff, const json& file_cfg, const char* key, T& var,
          const CLI::Option* opt) {
    eff[key] = var;
    if (file_cfg.contains(key) && (!opt || opt->count() == 0)) {
        var = file_cfg.at(key).get<T>();
        eff[key] = var;
    }
    if (opt && opt->count() > 0) eff[key] = var;
}

void echo_config(const fs::path& dir, const json& eff) {
    write_file(dir / "effective_config.json", eff.dump(2) + "\n");
}

// Bounded worker pool over [0, n); each slot writes only its own result.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

bool is_midi(const fs::path& p) {
    auto e = p.extension().string();
    return e == ".mid" || e == ".midi";
}

bool is_xml(const fs::path& p) {
    auto e = p.extension().string();
    return e == ".xml" || e == ".musicxml" || e == ".mxl";
}

std::vector<fs::path> collect_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file() && (is_midi(e.path()) || is_xml(e.path())))
                    files.push_back(e.path());
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Global& g, const std::vector<std::string>& inputs) {
    auto files = collect_inputs(inputs);
    if (files.empty()) {
        std::cerr << "ingest: no input files\n";
        return 1;
    }

    // Deterministic, collision-free piece ids from file stems.
    std::vector<std::string> ids(files.size());
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::string stem = files[i].stem().string();
        int n = seen[stem]++;
        ids[i] = n == 0 ? stem : stem + "_" + std::to_string(n);
    }

    const fs::path canon = g.out / "canonical";
    fs::create_directories(canon);
    std::vector<json> rows(files.size());
    parallel_for(files.size(), g.jobs, [&](std::size_t i) {
        json row;
        row["piece_id"] = ids[i];
        row["file"] = files[i].string();
        try {
            std::vector<std::string> warnings;
            PieceDoc doc = is_midi(files[i])
                               ? parse_smf_file(files[i].string(), &warnings)
                               : parse_musicxml_file(files[i].string(), &warnings);
            doc.piece_id = ids[i];
            write_file(canon / (ids[i] + ".json"), to_json(doc) + "\n");
            row["status"] = "ok";
            row["modality"] = to_string(doc.modality);
            row["notes"] = doc.notes.size();
            row["duration"] = doc.length();
            row["warnings"] = warnings;
        } catch (const std::exception& e) {
            row["status"] = "error";
            row["error"] = e.what();
        }
        rows[i] = std::move(row);
    });

    std::sort(rows.begin(), rows.end(), [](const json& a, const json& b) {
        return a.at("piece_id").get<std::string>() <
               b.at("piece_id").get<std::string>();
    });
    int failures = 0;
    for (const auto& r : rows)
        if (r.at("status") != "ok") ++failures;
    json manifest;
    manifest["pieces"] = rows;
    write_file(canon / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "ingested " << rows.size() - failures << "/" << rows.size()
              << " files -> " << canon.string() << "\n";
    if (failures) std::cerr << failures << " file(s) failed\n";
    return failures == 0 || g.keep_going ? 0 : 1;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, fs::path>> manifest_pieces(const Global& g) {
    const fs::path canon = g.out / "canonical";
    auto manifest = json::parse(read_file(canon / "manifest.json"));
    std::vector<std::pair<std::string, fs::path>> out;
    for (const auto& row : manifest.at("pieces"))
        if (row.at("status") == "ok") {
            auto id = row.at("piece_id").get<std::string>();
            out.push_back({id, canon / (id + ".json")});
        }
    return out;
}

json window_json(const Window& w) {
    return {{"start", w.start}, {"length", w.length}, {"index", w.index}};
}

// Notes of one window shifted to the window origin, for the tokenizers.
PieceDoc window_doc(const PieceDoc& doc, const Window& w) {
    PieceDoc d = doc;
    d.notes.clear();
    const double w1 = w.start + w.length;
    const double bar = doc.time_signatures.empty()
                           ? 4.0
                           : doc.time_signatures.front().beats_per_measure();
    const int measure_shift = static_cast<int>(w.start / bar);
    for (const auto& n : doc.notes) {
        if (n.onset < w.start || n.onset >= w1) continue;
        NoteEvent m = n;
        m.onset -= w.start;
        if (m.measure_index)
            m.measure_index = std::max(0, *m.measure_index - measure_shift);
        d.notes.push_back(m);
    }
    d.pedals.clear();
    for (const auto& p : doc.pedals) {
        if (p.offset() <= w.start || p.onset >= w1) continue;
        PedalEvent q = p;
        q.onset = std::max(0.0, p.onset - w.start);
        q.duration = std::min(p.offset() - w.start, w.length) - q.onset;
        d.pedals.push_back(q);
    }
    return d;
}

int cmd_encode(const Global& g, const std::string& rep, json eff) {
    auto pieces = manifest_pieces(g);
    const fs::path dir = g.out / "encoded" / rep;
    fs::create_directories(dir);
    echo_config(dir, eff);

    struct Result {
        std::vector<json> records;  // index entries / token lines
        std::vector<json> failures;
    };
    std::vector<Result> results(pieces.size());

    // Sequence encoding shares one vocabulary per modality, built from
    // the corpus' time signatures up front.
    Scheme scheme = Scheme::MIDILike;
    std::map<Modality, Vocabulary> vocabs;
    std::vector<PieceDoc> docs(pieces.size());
    parallel_for(pieces.size(), g.jobs, [&](std::size_t i) {
        docs[i] = piece_from_json(read_file(pieces[i].second));
    });

    if (rep == "sequence") {
        scheme = scheme_from_string(eff.at("scheme").get<std::string>());
        QuantSpec spec = QuantSpec::defaults();
        std::set<std::pair<int, int>> sigs(spec.time_signatures.begin(),
                                           spec.time_signatures.end());
        for (const auto& d : docs)
            for (const auto& ts : d.time_signatures)
                sigs.insert({ts.numerator, ts.denominator});
        spec.time_signatures.assign(sigs.begin(), sigs.end());
        for (const auto& d : docs)
            if (!vocabs.count(d.modality)) {
                try {
                    vocabs.emplace(d.modality,
                                   build_vocabulary(scheme, d.modality, spec));
                } catch (const UnsupportedCombination&) {
                    // recorded per piece below
                }
            }
        for (const auto& [modality, vocab] : vocabs)
            write_file(dir / ("vocabulary_" + to_string(modality) + ".json"),
                       vocab.to_json() + "\n");
    }

    parallel_for(pieces.size(), g.jobs, [&](std::size_t i) {
        const auto& [id, path] = pieces[i];
        auto& res = results[i];
        try {
            const PieceDoc& doc = docs[i];
            auto windows = segment(doc);
            for (const auto& w : windows) {
                if (rep == "matrix") {
                    MatrixConfig cfg;
                    cfg.resolution = eff.at("resolution").get<int>();
                    cfg.onset_channel = eff.at("onset_channel").get<bool>();
                    cfg.frame_channel = eff.at("frame_channel").get<bool>();
                    cfg.include_pedal_rows =
                        eff.at("pedal_rows").get<bool>() &&
                        doc.modality == Modality::performance;
                    cfg.window_length = w.length;
                    PianoRoll roll = build_roll(doc, w.start, cfg);
                    std::string name = id + "_w" + std::to_string(w.index);
                    write_file(dir / (name + ".roll"), roll_to_bytes(roll));
                    json side = {{"piece_id", id},
                                 {"window", window_json(w)},
                                 {"resolution", cfg.resolution},
                                 {"channels", roll.channels},
                                 {"rows", roll.rows}};
                    write_file(dir / (name + ".json"), side.dump(2) + "\n");
                    res.records.push_back({{"piece_id", id},
                                           {"window", window_json(w)},
                                           {"file", name + ".roll"}});
                } else if (rep == "sequence") {
                    auto vit = vocabs.find(doc.modality);
                    if (vit == vocabs.end())
                        throw UnsupportedCombination(
                            to_string(scheme) + " is undefined for " +
                            to_string(doc.modality) + " input");
                    PieceDoc wd = window_doc(doc, w);
                    std::vector<std::string> warnings;
                    TokenSequence seq = tokenize(wd, scheme, vit->second, &warnings);
                    json rec = {{"piece_id", id},
                                {"window", window_json(w)},
                                {"scheme", to_string(scheme)},
                                {"modality", to_string(doc.modality)}};
                    if (scheme == Scheme::CPWord)
                        rec["tuples"] = seq.tuples;
                    else
                        rec["ids"] = seq.ids;
                    if (!warnings.empty()) rec["warnings"] = warnings;
                    res.records.push_back(std::move(rec));
                } else if (rep == "graph") {
                    GraphConfig cfg;
                    cfg.t_tol = eff.at("t_tol").get<double>();
                    cfg.inverse_edges = eff.at("inverse_edges").get<bool>();
                    cfg.heterogeneous = eff.at("heterogeneous").get<bool>();
                    cfg.include_silence_edges = eff.at("silence_edges").get<bool>();
                    cfg.include_voice_edges = eff.at("voice_edges").get<bool>();
                    cfg.feature_level =
                        eff.at("feature_level") == "advanced" ? FeatureLevel::advanced
                                                              : FeatureLevel::basic;
                    NoteGraph graph = build_graph(doc, w.start, w.length, cfg);
                    std::string name = id + "_w" + std::to_string(w.index);
                    write_file(dir / (name + ".json"),
                               graph_to_json(graph, id, w.start, w.length, cfg) + "\n");
                    res.records.push_back({{"piece_id", id},
                                           {"window", window_json(w)},
                                           {"file", name + ".json"}});
                } else {
                    throw Error("unknown representation: " + rep);
                }
            }
        } catch (const std::exception& e) {
            res.failures.push_back({{"piece_id", id}, {"error", e.what()}});
        }
    });

    // Single-threaded index write, canonical (piece_id, window) order.
    std::vector<json> records, failures;
    for (auto& r : results) {
        for (auto& rec : r.records) records.push_back(std::move(rec));
        for (auto& f : r.failures) failures.push_back(std::move(f));
    }
    auto key = [](const json& r) {
        return std::make_pair(r.at("piece_id").get<std::string>(),
                              r.at("window").at("index").get<int>());
    };
    std::sort(records.begin(), records.end(),
              [&](const json& a, const json& b) { return key(a) < key(b); });

    if (rep == "sequence") {
        std::string lines;
        for (const auto& r : records) lines += r.dump() + "\n";
        write_file(dir / "tokens.jsonl", lines);
    }
    json index;
    index["representation"] = rep;
    index["records"] = json::array();
    for (const auto& r : records) {
        json e = {{"piece_id", r.at("piece_id")}, {"window", r.at("window")}};
        if (r.contains("file")) e["file"] = r.at("file");
        index["records"].push_back(std::move(e));
    }
    index["failures"] = failures;
    write_file(dir / "index.json", index.dump(2) + "\n");

    std::cout << "encoded " << records.size() << " window(s) -> " << dir.string()
              << "\n";
    for (const auto& f : failures)
        std::cerr << "failed: " << f.at("piece_id").get<std::string>() << ": "
                  << f.at("error").get<std::string>() << "\n";
    return failures.empty() || g.keep_going ? 0 : 1;
}

// ---------------------------------------------------------------------------

TokenSequence sequence_from_record(const json& rec) {
    TokenSequence seq;
    seq.scheme = scheme_from_string(rec.at("scheme").get<std::string>());
    seq.modality = modality_from_string(rec.at("modality").get<std::string>());
    if (rec.contains("ids")) seq.ids = rec.at("ids").get<std::vector<int32_t>>();
    if (rec.contains("tuples"))
        for (const auto& t : rec.at("tuples")) {
            CpTuple tup{};
            for (int s = 0; s < kCpArity; ++s) tup[s] = t.at(s).get<int32_t>();
            seq.tuples.push_back(tup);
        }
    return seq;
}

int cmd_bpe_train(const Global& g, int multiplier) {
    const fs::path dir = g.out / "encoded" / "sequence";
    std::istringstream lines(read_file(dir / "tokens.jsonl"));
    std::vector<TokenSequence> corpus;
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        corpus.push_back(sequence_from_record(json::parse(line)));
    }
    if (corpus.empty()) throw Error("bpe-train: no token sequences found");

    int32_t base = 0;
    for (const char* name : {"vocabulary_performance.json", "vocabulary_score.json"})
        if (fs::exists(dir / name)) {
            auto vocab = Vocabulary::from_json(read_file(dir / name));
            base = std::max(base, vocab.size());
        }
    if (base == 0) throw Error("bpe-train: no vocabulary file found");

    BpeModel model = bpe_train(corpus, base, multiplier);
    write_file(dir / "bpe.json", model.to_json() + "\n");

    std::size_t before = 0, after = 0;
    for (const auto& s : corpus) {
        before += s.ids.size();
        after += bpe_apply(s, model).ids.size();
    }
    const double reduction =
        before == 0 ? 0.0 : 100.0 * (1.0 - static_cast<double>(after) / before);
    json report = {{"merges", model.merges.size()},
                   {"base_vocab_size", model.base_vocab_size},
                   {"vocab_size", model.vocab_size()},
                   {"tokens_before", before},
                   {"tokens_after", after},
                   {"length_reduction_percent", reduction}};
    write_file(g.out / "reports" / "bpe.json", report.dump(2) + "\n");
    std::cout << "bpe: " << model.merges.size() << " merges, vocab " << base
              << " -> " << model.vocab_size() << ", length reduction "
              << reduction << "% (reference corpora reported 55-65%)\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_split(const Global& g, int k, double test_frac, const std::string& task,
              bool stratify) {
    auto pieces = manifest_pieces(g);
    std::vector<PieceLabel> labels;
    for (const auto& [id, path] : pieces) {
        PieceDoc doc = piece_from_json(read_file(path));
        auto it = doc.labels.find(task);
        labels.push_back({id, it != doc.labels.end() ? it->second : "unlabeled"});
    }
    std::vector<std::string> warnings;
    SplitPlan plan = make_folds(labels, k, test_frac, g.seed, stratify, &warnings);
    write_file(g.out / "splits" / "splits.json", to_json(plan) + "\n");
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << plan.num_folds << " fold(s) over " << labels.size()
              << " piece(s), seed " << plan.seed << "\n";
    return 0;
}

int cmd_audit(const Global& g) {
    SplitPlan plan =
        split_plan_from_json(read_file(g.out / "splits" / "splits.json"));
    std::vector<std::string> ids;
    for (const auto& [id, path] : manifest_pieces(g)) ids.push_back(id);
    LeakageReport report = leakage_audit(plan, ids);

    json j;
    j["clean"] = report.clean();
    j["leaks"] = json::array();
    for (const auto& [fold, id] : report.leaks)
        j["leaks"].push_back({{"fold", fold}, {"piece_id", id}});
    j["unassigned"] = report.unassigned;
    write_file(g.out / "reports" / "leakage.json", j.dump(2) + "\n");

    if (!report.clean()) {
        std::cerr << "leakage: " << report.leaks.size() << " piece/fold pair(s)\n";
        return 1;
    }
    std::cout << "no piece leakage";
    if (!report.unassigned.empty())
        std::cout << " (" << report.unassigned.size() << " unassigned piece(s))";
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct SizeStats {
    std::vector<double> per_segment_kb;
    std::map<std::string, double> per_piece_kb;

    json summary() const {
        auto mean_sd = [](const std::vector<double>& v) {
            if (v.empty()) return std::pair<double, double>{0.0, 0.0};
            double m = 0.0;
            for (double x : v) m += x;
            m /= v.size();
            double s = 0.0;
            for (double x : v) s += (x - m) * (x - m);
            return std::pair<double, double>{m, std::sqrt(s / v.size())};
        };
        std::vector<double> pieces;
        for (const auto& [id, kb] : per_piece_kb) pieces.push_back(kb);
        auto [sm, ss] = mean_sd(per_segment_kb);
        auto [pm, ps] = mean_sd(pieces);
        return {{"segments", per_segment_kb.size()},
                {"kb_per_segment_mean", sm},
                {"kb_per_segment_sd", ss},
                {"kb_per_piece_mean", pm},
                {"kb_per_piece_sd", ps}};
    }
};

int cmd_stats(const Global& g) {
    std::map<std::string, SizeStats> stats;
    const fs::path enc = g.out / "encoded";

    auto add = [&](const std::string& rep, const std::string& piece, double kb) {
        stats[rep].per_segment_kb.push_back(kb);
        stats[rep].per_piece_kb[piece] += kb;
    };

    if (fs::exists(enc / "matrix" / "index.json")) {
        auto index = json::parse(read_file(enc / "matrix" / "index.json"));
        for (const auto& r : index.at("records")) {
            auto f = enc / "matrix" / r.at("file").get<std::string>();
            // payload only; the 18-byte container header is framing
            add("matrix", r.at("piece_id").get<std::string>(),
                (static_cast<double>(fs::file_size(f)) - 18.0) / 1000.0);
        }
    }
    if (fs::exists(enc / "sequence" / "tokens.jsonl")) {
        std::istringstream lines(read_file(enc / "sequence" / "tokens.jsonl"));
        std::string line;
        while (std::getline(lines, line)) {
            if (line.empty()) continue;
            auto rec = json::parse(line);
            // 2 bytes per token id, the storage model of the size accounting
            std::size_t n = rec.contains("ids")
                                ? rec.at("ids").size()
                                : rec.at("tuples").size() * kCpArity;
            add("sequence", rec.at("piece_id").get<std::string>(),
                2.0 * static_cast<double>(n) / 1000.0);
        }
    }
    if (fs::exists(enc / "graph" / "index.json")) {
        auto index = json::parse(read_file(enc / "graph" / "index.json"));
        for (const auto& r : index.at("records")) {
            auto f = enc / "graph" / r.at("file").get<std::string>();
            add("graph", r.at("piece_id").get<std::string>(),
                static_cast<double>(fs::file_size(f)) / 1000.0);
        }
    }

    json report;
    std::cout << "representation   KB/segment (mean+-sd)   KB/piece (mean+-sd)\n";
    for (const auto& [rep, s] : stats) {
        json sum = s.summary();
        report[rep] = sum;
        std::printf("%-16s %10.1f +- %-10.1f %10.1f +- %-10.1f\n", rep.c_str(),
                    sum["kb_per_segment_mean"].get<double>(),
                    sum["kb_per_segment_sd"].get<double>(),
                    sum["kb_per_piece_mean"].get<double>(),
                    sum["kb_per_piece_sd"].get<double>());
    }
    write_file(g.out / "reports" / "sizes.json", report.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_correlate(const Global& g, const std::string& attn_path,
                  const std::string& adj_path) {
    auto load = [](const std::string& p) {
        auto j = json::parse(read_file(p));
        const int rows = static_cast<int>(j.size());
        const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
        net::Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
        return m;
    };
    double r = net::attention_adjacency_correlation(load(attn_path), load(adj_path));
    json report = {{"pearson_r", r}, {"attn", attn_path}, {"adj", adj_path}};
    write_file(g.out / "reports" / "correlation.json", report.dump(2) + "\n");
    std::cout << "pearson r = " << r << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify: self-contained smoke suites over generated data

struct Suite {
    std::string name;
    bool passed;
    std::string detail;
};

bool edges_equal(const NoteGraph& a, const NoteGraph& b) {
    for (EdgeType t : kAllEdgeTypes) {
        auto ia = a.edges.find(t);
        auto ib = b.edges.find(t);
        const EdgeList ea = ia == a.edges.end() ? EdgeList{} : ia->second;
        const EdgeList eb = ib == b.edges.end() ? EdgeList{} : ib->second;
        if (ea != eb) return false;
    }
    return true;
}

Suite verify_graph_oracle() {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const bool score = i % 2;
        PieceDoc doc = score ? random_score(rng, 60) : random_performance(rng, 60);
        for (double tol : {0.0, 0.015, 0.030, 0.100}) {
            GraphConfig cfg;
            cfg.t_tol = tol;
            cfg.inverse_edges = true;
            cfg.include_silence_edges = true;
            cfg.include_voice_edges = score;
            cfg.feature_level = FeatureLevel::advanced;
            const double len = default_window_length(doc.modality);
            NoteGraph sweep = build_graph(doc, 0.0, len, cfg);
            NoteGraph oracle = build_graph_oracle(doc, 0.0, len, cfg);
            if (!edges_equal(sweep, oracle))
                return {"graph-oracle", false,
                        "edge mismatch on piece " + doc.piece_id};
            NoteGraph hom = to_homogeneous(sweep);
            EdgeList expect;
            for (const auto& [t, list] : sweep.edges)
                expect.insert(expect.end(), list.begin(), list.end());
            std::sort(expect.begin(), expect.end());
            expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
            if (hom.hom_edges != expect)
                return {"graph-oracle", false, "union property violated"};
        }
    }
    return {"graph-oracle", true, "100 pieces x 4 tolerances"};
}

Suite verify_round_trip() {
    std::mt19937_64 rng(11);
    QuantSpec spec = QuantSpec::defaults();
    for (int i = 0; i < 100; ++i) {
        PieceDoc perf = random_performance(rng, 40);
        for (Scheme s : {Scheme::MIDILike, Scheme::REMI}) {
            auto vocab = build_vocabulary(s, Modality::performance, spec);
            std::string why;
            if (!round_trip_matches(perf, detokenize(tokenize(perf, s, vocab), vocab),
                                    0.065, 0.105, 4, &why))
                return {"round-trip", false, to_string(s) + ": " + why};
        }
        PieceDoc score = random_score(rng, 40);
        for (Scheme s : {Scheme::REMI, Scheme::CPWord}) {
            auto vocab = build_vocabulary(s, Modality::score, spec);
            std::string why;
            if (!round_trip_matches(score,
                                    detokenize(tokenize(score, s, vocab), vocab),
                                    1e-6, 1e-6, 0, &why))
                return {"round-trip", false, to_string(s) + ": " + why};
        }
    }
    return {"round-trip", true, "100 pieces x 4 scheme/modality combos"};
}

Suite verify_bpe() {
    std::mt19937_64 rng(13);
    QuantSpec spec = QuantSpec::defaults();
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance, spec);
    std::vector<TokenSequence> corpus;
    for (int i = 0; i < 100; ++i)
        corpus.push_back(
            tokenize(random_performance(rng, 30), Scheme::MIDILike, vocab));
    BpeModel model = bpe_train(corpus, vocab.size(), 2);
    for (const auto& s : corpus) {
        TokenSequence applied = bpe_apply(s, model);
        if (applied.ids.size() > s.ids.size())
            return {"bpe", false, "apply lengthened a sequence"};
        if (bpe_decode(applied, model).ids != s.ids)
            return {"bpe", false, "decode(apply(s)) != s"};
    }
    return {"bpe", true, std::to_string(model.merges.size()) + " merges, identity on 100 sequences"};
}

Suite verify_splits() {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PieceLabel> pieces;
        const int n = 8 + static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i)
            pieces.push_back({"p" + std::to_string(i),
                              "class" + std::to_string(rng() % 5)});
        SplitPlan plan = make_folds(pieces, 8, 0.15, rng());
        std::vector<std::string> ids;
        for (const auto& p : pieces) ids.push_back(p.piece_id);
        if (!leakage_audit(plan, ids).clean())
            return {"split-leakage", false, "leak in trial " + std::to_string(trial)};
        for (const auto& fold : plan.folds) {
            const long want = std::lround(0.15 * n);
            if (std::abs(static_cast<long>(fold.test.size()) - want) > 1)
                return {"split-leakage", false, "test fraction off by > 1 piece"};
        }
    }
    return {"split-leakage", true, "20 random corpora"};
}

Suite verify_grad(bool inject_fault) {
    std::mt19937_64 rng(19);
    net::ModelConfig cfg;
    cfg.num_layers = 2;  // smoke scale; the full shape runs in the test suite
    cfg.hidden_dim = 16;
    cfg.embedding_dim = 64;
    net::Parameters params = net::Parameters::init(cfg, 23);
    std::vector<net::GraphInput> windows;
    for (int w = 0; w < 2; ++w) {
        PieceDoc doc = random_performance(rng, 15);
        GraphConfig gc;
        windows.push_back(
            net::graph_input(build_graph(doc, 0.0, 60.0, gc), false));
    }
    auto report = net::grad_check(windows, 1, params, cfg, 1e-5, 150, 5,
                                  inject_fault ? 0 : -1);
    const bool ok = report.max_rel_err <= 1e-4;
    std::string detail = "max_rel_err " + std::to_string(report.max_rel_err);
    if (inject_fault) detail += " (one gradient entry corrupted by +10%)";
    return {"grad-check", ok, detail};
}

Suite verify_correlation() {
    std::mt19937_64 rng(23);
    net::Matrix adj(6, 6), inv(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            adj(i, j) = (i + j) % 2;
            inv(i, j) = 1.0 - adj(i, j);
        }
    if (std::fabs(net::attention_adjacency_correlation(adj, adj) - 1.0) > 1e-12)
        return {"correlation", false, "identity fixture"};
    if (std::fabs(net::attention_adjacency_correlation(inv, adj) + 1.0) > 1e-12)
        return {"correlation", false, "inverted fixture"};
    try {
        net::Matrix constant(6, 6);
        net::attention_adjacency_correlation(constant, adj);
        return {"correlation", false, "zero variance not rejected"};
    } catch (const ZeroVariance&) {
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        net::Matrix a(8, 8), b(8, 8);
        for (auto& v : a.data) v = u(rng);
        for (auto& v : b.data) v = u(rng);
        // two-pass oracle
        std::vector<double> xs, ys;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                if (i != j) {
                    xs.push_back(a(i, j));
                    ys.push_back(b(i, j));
                }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double sxx = 0, syy = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            syy += (ys[i] - my) * (ys[i] - my);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        const double want = sxy / std::sqrt(sxx * syy);
        if (std::fabs(net::attention_adjacency_correlation(a, b) - want) > 1e-12)
            return {"correlation", false, "oracle mismatch"};
    }
    return {"correlation", true, "fixtures + 20 random matrices"};
}

int cmd_verify(bool inject_grad_fault) {
    std::vector<Suite> suites = {
        verify_graph_oracle(), verify_round_trip(),     verify_bpe(),
        verify_splits(),       verify_grad(inject_grad_fault),
        verify_correlation(),
    };
    int rc = 0;
    for (const auto& s : suites) {
        std::cout << (s.passed ? "PASS  " : "FAIL  ") << s.name << ": " << s.detail
                  << "\n";
        if (!s.passed) rc = 1;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic music representation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Global g;
    std::string config_path;
    auto* config_opt =
        app.add_option("--config", config_path, "JSON config file")->expected(1);
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--jobs", g.jobs, "worker threads");
    app.add_flag("--keep-going", g.keep_going, "record failures, keep exit 0");
    app.add_option("--out", g.out, "output directory");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse inputs to canonical JSON");
    std::vector<std::string> inputs;
    ingest->add_option("inputs", inputs, "files or directories")->required();

    // encode
    auto* encode = app.add_subcommand("encode", "encode ingested pieces");
    std::string rep, scheme = "midilike", feature_level = "basic";
    int resolution = 800;
    bool onset_channel = true, frame_channel = true, pedal_rows = false;
    double t_tol = 0.030;
    bool inverse_edges = false, heterogeneous = true, silence_edges = false,
         voice_edges = false;
    encode->add_option("--rep", rep, "matrix|sequence|graph")->required();
    auto* o_scheme = encode->add_option("--scheme", scheme, "midilike|remi|cpword");
    auto* o_res = encode->add_option("--resolution", resolution, "matrix columns");
    auto* o_on = encode->add_flag("--onset-channel,!--no-onset-channel", onset_channel);
    auto* o_fm = encode->add_flag("--frame-channel,!--no-frame-channel", frame_channel);
    auto* o_ped = encode->add_flag("--pedal-rows", pedal_rows);
    auto* o_tol = encode->add_option("--t-tol", t_tol, "onset tolerance, seconds");
    auto* o_inv = encode->add_flag("--inverse-edges", inverse_edges);
    auto* o_het =
        encode->add_flag("--heterogeneous,!--homogeneous", heterogeneous);
    auto* o_sil = encode->add_flag("--silence-edges", silence_edges);
    auto* o_voi = encode->add_flag("--voice-edges", voice_edges);
    auto* o_fl = encode->add_option("--feature-level", feature_level, "basic|advanced");

    // bpe-train
    auto* bpe = app.add_subcommand("bpe-train", "learn BPE merges over tokens");
    int multiplier = 4;
    auto* o_mult = bpe->add_option("--multiplier", multiplier, "target vocab multiple");

    // split / audit
    auto* split = app.add_subcommand("split", "piece-level holdout folds");
    int folds = 8;
    double test_frac = 0.15;
    std::string task = "composer";
    bool stratify = true;
    auto* o_folds = split->add_option("--folds", folds);
    auto* o_frac = split->add_option("--test-frac", test_frac);
    auto* o_task = split->add_option("--task", task, "label key in piece metadata");
    auto* o_strat = split->add_flag("--stratify,!--no-stratify", stratify);
    app.add_subcommand("audit", "check split plan for piece leakage");

    // stats / verify / correlate
    app.add_subcommand("stats", "representation size report");
    auto* verify = app.add_subcommand("verify", "run internal verification suites");
    bool inject_fault = false;
    verify->add_flag("--inject-grad-fault", inject_fault,
                     "corrupt one gradient entry to prove the check detects it");
    auto* correlate = app.add_subcommand("correlate", "attention/adjacency Pearson r");
    std::string attn_path, adj_path;
    correlate->add_option("--attn", attn_path, "JSON matrix file")->required();
    correlate->add_option("--adj", adj_path, "JSON matrix file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (config_opt->count()) g.config = json::parse(read_file(config_path));
        json eff = json::object();
        pick(eff, g.config, "seed", g.seed, nullptr);
        pick(eff, g.config, "jobs", g.jobs, nullptr);

        if (app.got_subcommand(ingest)) return cmd_ingest(g, inputs);
        if (app.got_subcommand(encode)) {
            pick(eff, g.config, "scheme", scheme, o_scheme);
            pick(eff, g.config, "resolution", resolution, o_res);
            pick(eff, g.config, "onset_channel", onset_channel, o_on);
            pick(eff, g.config, "frame_channel", frame_channel, o_fm);
            pick(eff, g.config, "pedal_rows", pedal_rows, o_ped);
            pick(eff, g.config, "t_tol", t_tol, o_tol);
            pick(eff, g.config, "inverse_edges", inverse_edges, o_inv);
            pick(eff, g.config, "heterogeneous", heterogeneous, o_het);
            pick(eff, g.config, "silence_edges", silence_edges, o_sil);
            pick(eff, g.config, "voice_edges", voice_edges, o_voi);
            pick(eff, g.config, "feature_level", feature_level, o_fl);
            eff["representation"] = rep;
            return cmd_encode(g, rep, eff);
        }
        if (app.got_subcommand(bpe)) {
            pick(eff, g.config, "multiplier", multiplier, o_mult);
            return cmd_bpe_train(g, multiplier);
        }
        if (app.got_subcommand(split)) {
            pick(eff, g.config, "folds", folds, o_folds);
            pick(eff, g.config, "test_frac", test_frac, o_frac);
            pick(eff, g.config, "task", task, o_task);
            pick(eff, g.config, "stratify", stratify, o_strat);
            return cmd_split(g, folds, test_frac, task, stratify);
        }
        if (app.got_subcommand("audit")) return cmd_audit(g);
        if (app.got_subcommand("stats")) return cmd_stats(g);
        if (app.got_subcommand(verify)) return cmd_verify(inject_fault);
        if (app.got_subcommand(correlate)) return cmd_correlate(g, attn_path, adj_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
