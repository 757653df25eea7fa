#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actorgauss/config.hpp"
#include "actorgauss/data_model.hpp"
#include "actorgauss/embedding_store.hpp"
#include "actorgauss/evaluation.hpp"
#include "actorgauss/io.hpp"
#include "actorgauss/synthetic.hpp"
#include "actorgauss/training.hpp"
#include "actorgauss/transe.hpp"

namespace fs = std::filesystem;
using namespace actorgauss;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags shared by the verbs that train or read models.
struct ModelFlags {
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string model;
    std::string persona_mode;
    std::string composition;
    bool spherical = false;
    bool diagonal = false;
    bool pi_schedule = false;
    std::string pretrained;
    std::string log;
};

void add_training_flags(CLI::App* sub, ModelFlags& f, bool model_required) {
    sub->add_option("--config", f.config, "key = value settings file")->check(CLI::ExistingFile);
    sub->add_option("--set", f.overrides, "override a setting, key=value (repeatable)");
    sub->add_option("--seed", f.seed, "training seed");
    auto* m = sub->add_option("--model", f.model, "jge | jge-t | jge-ag | jge-agt | transe")
                  ->check(CLI::IsMember({"jge", "jge-t", "jge-ag", "jge-agt", "transe"}));
    if (model_required) m->required();
    sub->add_option("--persona-mode", f.persona_mode, "none | T | AG | AGT");
    sub->add_option("--composition", f.composition, "sum | concat");
    auto* sph = sub->add_flag("--spherical", f.spherical, "one variance per entity");
    auto* dia = sub->add_flag("--diagonal", f.diagonal, "one variance per dimension");
    sph->excludes(dia);
    sub->add_flag("--pi-schedule", f.pi_schedule, "cosine schedule reaches lr_min at the last step");
    sub->add_option("--pretrained-vectors", f.pretrained, "word vectors for keyword initialisation")
        ->check(CLI::ExistingFile);
    sub->add_option("--log", f.log, "per-epoch training log (TSV)");
}

PersonaMode preset_mode(const std::string& model) {
    if (model == "jge") return PersonaMode::None;
    if (model == "jge-t") return PersonaMode::Topic;
    if (model == "jge-ag") return PersonaMode::AgeGender;
    return PersonaMode::Full;
}

RunConfig build_config(const ModelFlags& f) {
    RunConfig c;
    if (!f.model.empty()) {
        c.model.persona_mode = preset_mode(f.model);
        if (f.model == "jge-ag") c.model.var_max = 25.0;
    }
    if (!f.config.empty()) apply_config_file(c, f.config);
    for (const auto& o : f.overrides) apply_override(c, o);
    if (f.model == "jge" && (!f.persona_mode.empty() || !f.composition.empty()))
        throw UsageError("--model jge ignores personae; --persona-mode and --composition are not allowed");
    if (!f.persona_mode.empty()) apply_setting(c, "persona_mode", f.persona_mode);
    if (!f.composition.empty()) apply_setting(c, "composition", f.composition);
    if (!f.model.empty() && f.model != "transe" && c.model.persona_mode != preset_mode(f.model))
        throw UsageError("persona_mode " + std::string(persona_mode_name(c.model.persona_mode)) +
                         " conflicts with --model " + f.model);
    if (f.spherical) c.model.spherical = true;
    if (f.diagonal) c.model.spherical = false;
    if (f.pi_schedule) c.train.cosine_pi_variant = true;
    if (f.seed) c.train.seed = *f.seed;
    c.model.validate();
    c.train.validate();
    return c;
}

Dataset load_data(const fs::path& dir) {
    auto d = ingest_catalog(dir / "triples.tsv", dir / "pairs.tsv");
    read_splits(d, dir / "splits.tsv");
    return d;
}

void write_log(const std::vector<EpochStats>& history, const std::string& path) {
    if (path.empty()) return;
    std::ostringstream out;
    out << "# epoch\tmean_loss\tlr\n";
    for (const auto& e : history)
        out << e.epoch << '\t' << io::format_double(e.mean_loss) << '\t' << io::format_double(e.lr) << '\n';
    io::write_file_atomic(path, out.str());
}

// A trained model of either family.
struct Model {
    std::optional<ModelParams> gaussian;
    std::optional<TransEParams> transe;

    std::unique_ptr<CastScorer> scorer() const {
        if (gaussian) return std::make_unique<GaussianScorer>(*gaussian);
        return std::make_unique<TransEScorer>(*transe);
    }
};

Model train_model(const Dataset& d, const ModelFlags& f, const RunConfig& c) {
    Model m;
    if (f.model == "transe") {
        TransEConfig tc;
        tc.dim = c.model.dim;
        tc.norm = c.norm;
        tc.persona_mode = c.model.persona_mode;
        auto r = transe_train(d, tc, c.train);
        write_log(r.history, f.log);
        m.transe = std::move(r.params);
        return m;
    }
    std::optional<WordVectors> wv;
    std::optional<PretrainedKeywords> pk;
    if (!f.pretrained.empty()) {
        wv = load_word_vectors(f.pretrained);
        pk.emplace(PretrainedKeywords{*wv, d.keywords.names()});
    }
    auto r = train(d, c.model, c.train, pk);
    write_log(r.history, f.log);
    m.gaussian = std::move(r.params);
    return m;
}

Model load_model(const fs::path& path) {
    Model m;
    if (peek_checkpoint_family(path) == ModelFamily::TransE)
        m.transe = load_transe_checkpoint(path);
    else
        m.gaussian = load_checkpoint(path);
    return m;
}

void check_vocab(const Model& m, const Dataset& d) {
    const std::size_t actors = m.gaussian ? m.gaussian->sizes().actors : m.transe->actors.rows();
    const std::size_t movies = m.gaussian ? m.gaussian->sizes().movies : m.transe->movies.rows();
    if (actors != d.actors.size() || movies != d.movies.size())
        throw std::runtime_error("checkpoint vocabulary does not match the data directory");
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Per-run rows are collected by name; aggregates follow as name.mean / name.sd.
void append_aggregates(std::vector<MetricRow>& rows, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        std::vector<double> v;
        for (const auto& r : rows)
            if (r.name == name) v.push_back(r.value);
        if (v.empty()) continue;
        rows.push_back({name + ".mean", mean_of(v), v.size(), 0});
        rows.push_back({name + ".sd", sd_of(v), v.size(), 0});
    }
}

Split parse_split(const std::string& s) {
    if (s == "test") return Split::Test;
    if (s == "val") return Split::Val;
    if (s == "train") return Split::Train;
    throw UsageError("unknown split '" + s + "'");
}

// ---- verbs ------------------------------------------------------------------

struct IngestArgs {
    std::string triples, pairs, out;
    int min_relations = 10;
    int max_cast_rank = 4;
    std::vector<double> ratios{0.70, 0.15, 0.15};
    std::uint64_t seed = 1;
};

void run_ingest(const IngestArgs& a) {
    const auto raw = ingest_catalog(a.triples, a.pairs);
    const auto kept = filter_entities(raw, a.min_relations, a.max_cast_rank);
    if (a.ratios.size() != 3) throw UsageError("--ratios needs three values");
    const auto d = split_triples(kept, {a.ratios[0], a.ratios[1], a.ratios[2]}, a.seed);
    const fs::path dir = a.out;
    fs::create_directories(dir);
    write_catalog(d, dir / "triples.tsv", dir / "pairs.tsv");
    write_splits(d, dir / "splits.tsv");
    write_report({{"movies", static_cast<double>(d.movies.size()), d.movies.size(), a.seed},
                  {"actors", static_cast<double>(d.actors.size()), d.actors.size(), a.seed},
                  {"keywords", static_cast<double>(d.keywords.size()), d.keywords.size(), a.seed},
                  {"triples_dropped", static_cast<double>(raw.triples.size() - d.triples.size()),
                   raw.triples.size(), a.seed},
                  {"train_triples", static_cast<double>(d.count(Split::Train)), d.triples.size(), a.seed},
                  {"val_triples", static_cast<double>(d.count(Split::Val)), d.triples.size(), a.seed},
                  {"test_triples", static_cast<double>(d.count(Split::Test)), d.triples.size(), a.seed},
                  {"pairs", static_cast<double>(d.pairs.size()), d.pairs.size(), a.seed}},
                 dir / "summary.tsv");
}

struct SynthArgs {
    std::string out;
    std::uint64_t seed = 1;
    std::vector<int> spreads{1};
    int movies = 200, actors = 50, keywords = 20, personae = 5, dim = 10;
};

void run_synth(const SynthArgs& a) {
    WorldConfig c;
    c.seed = a.seed;
    c.versatility_spreads = a.spreads;
    c.n_movies = a.movies;
    c.n_actors = a.actors;
    c.n_keywords = a.keywords;
    c.n_personae = a.personae;
    c.dim = a.dim;
    const auto w = generate_planted(c);
    const fs::path dir = a.out;
    write_world(w, dir);
    const auto truth = oracle_metrics(w, w.truth);
    write_report({{"triples", static_cast<double>(w.dataset.triples.size()), w.dataset.triples.size(), a.seed},
                  {"pairs", static_cast<double>(w.dataset.pairs.size()), w.dataset.pairs.size(), a.seed},
                  {"planted_mean_rank", truth.mean_rank, truth.n_test, a.seed},
                  {"planted_hits_at_10", truth.hits_at_10, truth.n_test, a.seed},
                  {"planted_versatility_pairs", static_cast<double>(truth.n_versatility_pairs),
                   truth.n_versatility_pairs, a.seed}},
                 dir / "summary.tsv");
}

struct TrainArgs {
    std::string data, out;
};

void run_train(const TrainArgs& a, const ModelFlags& f) {
    const auto c = build_config(f);
    const auto d = load_data(a.data);
    const auto m = train_model(d, f, c);
    if (m.gaussian) save_checkpoint(*m.gaussian, a.out);
    else save_transe_checkpoint(*m.transe, a.out);
}

struct EvalCastArgs {
    std::string data, out, checkpoint, ranks, split = "test";
    bool filtered = false;
    int topk = 10;
    int repeats = 1;
};

void run_eval_cast(const EvalCastArgs& a, const ModelFlags& f) {
    if (a.checkpoint.empty() == f.model.empty())
        throw UsageError("give exactly one of --checkpoint or --model");
    const auto d = load_data(a.data);
    const Split split = parse_split(a.split);
    const std::string hits = "hits_at_" + std::to_string(a.topk);
    std::vector<MetricRow> rows;
    std::ostringstream ranks;
    ranks << "# seed\ttriple\tmovie\tactor\trank\n";
    auto evaluate = [&](const Model& m, std::uint64_t seed) {
        const auto scorer = m.scorer();
        const auto r = evaluate_cast(*scorer, d, split, a.filtered, a.topk);
        rows.push_back({"mean_rank", r.summary.mean_rank, r.ranks.size(), seed});
        rows.push_back({hits, r.summary.hits_at_k, r.ranks.size(), seed});
        for (std::size_t i = 0; i < r.ranks.size(); ++i) {
            const auto& t = d.triples[r.triple_ids[i]];
            ranks << seed << '\t' << r.triple_ids[i] << '\t' << d.movies.name(t.movie.index) << '\t'
                  << d.actors.name(t.actor.index) << '\t' << r.ranks[i] << '\n';
        }
    };
    if (!a.checkpoint.empty()) {
        if (a.repeats != 1) throw UsageError("--repeats needs --model");
        const auto m = load_model(a.checkpoint);
        check_vocab(m, d);
        evaluate(m, 0);
    } else {
        auto c = build_config(f);
        const std::uint64_t base = c.train.seed;
        for (int r = 0; r < a.repeats; ++r) {
            c.train.seed = base + static_cast<std::uint64_t>(r);
            evaluate(train_model(d, f, c), c.train.seed);
        }
        append_aggregates(rows, {"mean_rank", hits});
    }
    write_report(rows, a.out);
    if (!a.ranks.empty()) io::write_file_atomic(a.ranks, ranks.str());
}

struct EvalVersArgs {
    std::string data, out, checkpoint, experts, baseline = "variance", genres;
    int sorts = 100;
    int nmf_k = 10;
    int nmf_iters = 200;
    int repeats = 1;
    std::uint64_t split_seed = 1;
};

std::vector<double> baseline_scores(const EvalVersArgs& a, const Dataset& d, std::uint64_t seed) {
    std::vector<std::vector<double>> counts;
    if (a.baseline == "genre") {
        if (a.genres.empty()) throw UsageError("--baseline genre needs --genres");
        std::vector<std::uint32_t> ids;
        for (const auto& line : io::read_lines(a.genres)) {
            const auto name = io::trim(line);
            if (name.empty() || name.front() == '#') continue;
            const auto id = d.keywords.find(name);
            if (!id) throw std::runtime_error("genre '" + std::string(name) + "' is not a keyword");
            ids.push_back(*id);
        }
        counts = keyword_counts(d, ids);
    } else if (a.baseline == "ptg") {
        counts = topic_group_counts(d);
    } else if (a.baseline == "keyword-topics") {
        const auto nmf = nmf_topics(movie_keyword_matrix(d), a.nmf_k, a.nmf_iters, seed);
        counts = keyword_topic_counts(d, nmf.w);
    } else {
        throw UsageError("unknown baseline '" + a.baseline + "'");
    }
    // Actors without any counted role have no distribution; they score as typecast.
    std::vector<double> scores(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (std::any_of(counts[i].begin(), counts[i].end(), [](double x) { return x > 0.0; }))
            scores[i] = entropy(counts[i]);
    return scores;
}

void versatility_rows(const std::vector<double>& scores, const Dataset& d, const VersatilitySplit& vs,
                      int sorts, std::uint64_t seed, std::vector<MetricRow>& rows) {
    auto one = [&](const std::string& prefix, const std::vector<ExpertPair>& named) {
        if (named.empty()) return;
        const auto pairs = resolve_pairs(d.actors, named);
        const auto acyclic = repair_cycles(pairs, &d.actors.names());
        std::vector<std::uint32_t> nodes;
        for (const auto& p : pairs) {
            nodes.push_back(p.winner);
            nodes.push_back(p.loser);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        rows.push_back({prefix + "_pairwise_accuracy", pairwise_accuracy(scores, pairs), pairs.size(), seed});
        rows.push_back({prefix + "_rank_correlation", rank_correlation(scores, nodes, acyclic, sorts, seed),
                        nodes.size(), seed});
    };
    one("val", vs.val_pairs);
    one("test", vs.test_pairs);
}

void run_eval_versatility(const EvalVersArgs& a, const ModelFlags& f) {
    const bool baseline = a.baseline != "variance";
    const int sources = (!a.checkpoint.empty()) + (!f.model.empty()) + baseline;
    if (sources != 1) throw UsageError("give exactly one of --checkpoint, --model or a --baseline");
    const auto d = load_data(a.data);
    const auto experts = read_expert_pairs(a.experts);
    std::vector<std::string> actors;
    for (const auto& p : experts)
        for (const auto* n : {&p.winner, &p.loser})
            if (std::find(actors.begin(), actors.end(), *n) == actors.end()) actors.push_back(*n);
    const auto vs = split_versatility_actors(actors, experts, a.split_seed);
    std::vector<MetricRow> rows;
    if (baseline) {
        const std::uint64_t seed = f.seed.value_or(1);
        versatility_rows(baseline_scores(a, d, seed), d, vs, a.sorts, seed, rows);
    } else if (!a.checkpoint.empty()) {
        if (a.repeats != 1) throw UsageError("--repeats needs --model");
        const auto m = load_model(a.checkpoint);
        if (!m.gaussian) throw UsageError("a TransE checkpoint has no variances");
        check_vocab(m, d);
        versatility_rows(versatility_scores(*m.gaussian), d, vs, a.sorts, f.seed.value_or(1), rows);
    } else {
        if (f.model == "transe") throw UsageError("TransE has no variances");
        auto c = build_config(f);
        const std::uint64_t base = c.train.seed;
        for (int r = 0; r < a.repeats; ++r) {
            c.train.seed = base + static_cast<std::uint64_t>(r);
            const auto m = train_model(d, f, c);
            versatility_rows(versatility_scores(*m.gaussian), d, vs, a.sorts, c.train.seed, rows);
        }
        append_aggregates(rows, {"val_pairwise_accuracy", "val_rank_correlation", "test_pairwise_accuracy",
                                 "test_rank_correlation"});
    }
    write_report(rows, a.out);
}

struct NnArgs {
    std::string data, checkpoint, out, actor, other;
    std::size_t topk = 10;
};

void run_nn(const NnArgs& a) {
    const auto d = load_data(a.data);
    const auto m = load_model(a.checkpoint);
    if (!m.gaussian) throw UsageError("nearest neighbours need a Gaussian checkpoint");
    check_vocab(m, d);
    auto id_of = [&](const std::string& name) {
        const auto id = d.actors.find(name);
        if (!id) throw std::runtime_error("unknown actor '" + name + "'");
        return *id;
    };
    const auto a_id = id_of(a.actor);
    std::vector<MetricRow> rows;
    for (const auto& n : nearest_neighbors(*m.gaussian, a_id, a.topk))
        rows.push_back({d.actors.name(n.actor), n.similarity, n.rank, 0});
    if (!a.other.empty()) {
        const auto b_id = id_of(a.other);
        const auto ab = neighbor_rank(*m.gaussian, a_id, b_id);
        const auto ba = neighbor_rank(*m.gaussian, b_id, a_id);
        rows.push_back({"rank_of_other", static_cast<double>(ab), ab, 0});
        rows.push_back({"rank_in_other", static_cast<double>(ba), ba, 0});
    }
    write_report(rows, a.out);
}

struct SignificanceArgs {
    std::string runs_a, runs_b, out, metric = "mean_rank";
};

void run_significance(const SignificanceArgs& a) {
    auto values = [&](const std::string& path) {
        std::vector<double> v;
        for (const auto& r : read_report(path))
            if (r.name == a.metric) v.push_back(r.value);
        if (v.size() < 2)
            throw std::runtime_error(path + ": need at least two '" + a.metric + "' rows");
        return v;
    };
    const auto va = values(a.runs_a);
    const auto vb = values(a.runs_b);
    const auto w = welch_t_test(va, vb);
    const std::size_t n = va.size() + vb.size();
    write_report({{"mean_a", mean_of(va), va.size(), 0},
                  {"mean_b", mean_of(vb), vb.size(), 0},
                  {"welch_t", w.t, n, 0},
                  {"welch_df", w.df, n, 0},
                  {"p_one_tailed", w.p_one_tailed, n, 0}},
                 a.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint Gaussian embeddings of movies, actors and keywords"};
    app.name("actorgauss");
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "filter and split a raw catalog into a data directory");
    c_ingest->add_option("--triples", ingest.triples, "movie-persona-actor TSV")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--pairs", ingest.pairs, "movie-keyword TSV")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--out", ingest.out, "output directory")->required();
    c_ingest->add_option("--min-relations", ingest.min_relations)->capture_default_str();
    c_ingest->add_option("--max-cast-rank", ingest.max_cast_rank)->capture_default_str();
    c_ingest->add_option("--ratios", ingest.ratios, "train,val,test")->delimiter(',')->expected(3);
    c_ingest->add_option("--seed", ingest.seed, "split seed")->capture_default_str();

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "write a planted world as a data directory");
    c_synth->add_option("--out", synth.out, "output directory")->required();
    c_synth->add_option("--seed", synth.seed)->capture_default_str();
    c_synth->add_option("--spreads", synth.spreads, "versatility spreads, round-robin over actors")
        ->delimiter(',');
    c_synth->add_option("--movies", synth.movies)->capture_default_str();
    c_synth->add_option("--actors", synth.actors)->capture_default_str();
    c_synth->add_option("--keywords", synth.keywords)->capture_default_str();
    c_synth->add_option("--personae", synth.personae)->capture_default_str();
    c_synth->add_option("--dim", synth.dim)->capture_default_str();

    TrainArgs tr;
    ModelFlags tr_flags;
    auto* c_train = app.add_subcommand("train", "train a model and write a checkpoint");
    c_train->add_option("--data", tr.data, "data directory")->required()->check(CLI::ExistingDirectory);
    c_train->add_option("--out", tr.out, "checkpoint path")->required();
    add_training_flags(c_train, tr_flags, true);

    EvalCastArgs ec;
    ModelFlags ec_flags;
    auto* c_ec = app.add_subcommand("eval-cast", "cast prediction: mean rank and hits@k");
    c_ec->add_option("--data", ec.data, "data directory")->required()->check(CLI::ExistingDirectory);
    c_ec->add_option("--out", ec.out, "report path")->required();
    c_ec->add_option("--checkpoint", ec.checkpoint, "evaluate a saved model")->check(CLI::ExistingFile);
    c_ec->add_option("--split", ec.split, "test | val | train")->capture_default_str();
    c_ec->add_flag("--filtered", ec.filtered, "drop other known casts from the candidates");
    c_ec->add_option("--topk", ec.topk, "k for hits@k")->capture_default_str()->check(CLI::PositiveNumber);
    c_ec->add_option("--repeats", ec.repeats, "train and evaluate with seeds seed..seed+n-1")
        ->capture_default_str()->check(CLI::PositiveNumber);
    c_ec->add_option("--ranks", ec.ranks, "per-query ranks file");
    add_training_flags(c_ec, ec_flags, false);

    EvalVersArgs ev;
    ModelFlags ev_flags;
    auto* c_ev = app.add_subcommand("eval-versatility", "agreement of versatility scores with expert pairs");
    c_ev->add_option("--data", ev.data, "data directory")->required()->check(CLI::ExistingDirectory);
    c_ev->add_option("--experts", ev.experts, "expert pairs TSV")->required()->check(CLI::ExistingFile);
    c_ev->add_option("--out", ev.out, "report path")->required();
    c_ev->add_option("--checkpoint", ev.checkpoint, "score a saved model")->check(CLI::ExistingFile);
    c_ev->add_option("--baseline", ev.baseline, "variance | genre | ptg | keyword-topics")
        ->capture_default_str()->check(CLI::IsMember({"variance", "genre", "ptg", "keyword-topics"}));
    c_ev->add_option("--genres", ev.genres, "genre names, one per line")->check(CLI::ExistingFile);
    c_ev->add_option("--sorts", ev.sorts, "random topological sorts")->capture_default_str();
    c_ev->add_option("--nmf-k", ev.nmf_k, "keyword topics")->capture_default_str();
    c_ev->add_option("--nmf-iters", ev.nmf_iters)->capture_default_str();
    c_ev->add_option("--actor-split-seed", ev.split_seed, "seed of the val/test actor split")
        ->capture_default_str();
    c_ev->add_option("--repeats", ev.repeats)->capture_default_str()->check(CLI::PositiveNumber);
    add_training_flags(c_ev, ev_flags, false);

    NnArgs nn;
    auto* c_nn = app.add_subcommand("nn", "nearest-neighbour actors");
    c_nn->add_option("--data", nn.data, "data directory")->required()->check(CLI::ExistingDirectory);
    c_nn->add_option("--checkpoint", nn.checkpoint)->required()->check(CLI::ExistingFile);
    c_nn->add_option("--actor", nn.actor)->required();
    c_nn->add_option("--other", nn.other, "also report mutual neighbour ranks");
    c_nn->add_option("--topk", nn.topk)->capture_default_str();
    c_nn->add_option("--out", nn.out, "report path")->required();

    SignificanceArgs sig;
    auto* c_sig = app.add_subcommand("significance", "one-tailed Welch test, H1: mean(a) > mean(b)");
    c_sig->add_option("--runs-a", sig.runs_a)->required()->check(CLI::ExistingFile);
    c_sig->add_option("--runs-b", sig.runs_b)->required()->check(CLI::ExistingFile);
    c_sig->add_option("--metric", sig.metric)->capture_default_str();
    c_sig->add_option("--out", sig.out, "report path")->required();

    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        std::cerr << "error\tusage\tunknown verb '" << argv[1] << "'\n" << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error\tusage\t" << e.what() << '\n' << app.help();
        return 2;
    }

    try {
        if (*c_ingest) run_ingest(ingest);
        else if (*c_synth) run_synth(synth);
        else if (*c_train) run_train(tr, tr_flags);
        else if (*c_ec) run_eval_cast(ec, ec_flags);
        else if (*c_ev) run_eval_versatility(ev, ev_flags);
        else if (*c_nn) run_nn(nn);
        else if (*c_sig) run_significance(sig);
    } catch (const UsageError& e) {
        std::cerr << "error\tusage\t" << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error\t" << app.get_subcommands().front()->get_name() << '\t' << e.what() << '\n';
        return 1;
    }
    return 0;
}
