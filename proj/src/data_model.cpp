#include "actorgauss/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "actorgauss/io.hpp"

namespace actorgauss {

std::uint32_t Vocabulary::intern(std::string_view name) {
    std::string key(name);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(names_.size());
    names_.push_back(key);
    index_.emplace(std::move(key), idx);
    return idx;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
    if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
    return std::nullopt;
}

std::size_t Dataset::count(Split s) const {
    return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), s));
}

Gender parse_gender(std::string_view token) {
    if (token == "F") return Gender::Female;
    if (token == "M") return Gender::Male;
    if (token == "O") return Gender::Other;
    throw std::invalid_argument("bad gender '" + std::string(token) + "' (expected F, M, O or -)");
}

char gender_code(Gender g) {
    switch (g) {
        case Gender::Female: return 'F';
        case Gender::Male: return 'M';
        case Gender::Other: return 'O';
    }
    return '?';
}

int discretize_age(double age_years) {
    if (!(age_years >= 0.0 && age_years <= kMaxAgeYears))
        throw std::out_of_range("age out of range [0,120]: " + io::format_double(age_years));
    return std::min(static_cast<int>(std::floor(age_years / 5.0)), kAgeBuckets - 1);
}

namespace {

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line_no,
                          const std::string& what) {
    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

bool is_blank(std::string_view line) { return io::trim(line).empty(); }

// Field tuple used for line-level deduplication.
using TripleKey = std::tuple<std::uint32_t, std::uint32_t, int, int, double, int>;

TripleKey key_of(const Triple& t) {
    return {t.movie.index,
            t.actor.index,
            t.cast_rank,
            t.persona.topic_group.value_or(-1),
            t.age_years.value_or(-1.0),
            t.persona.gender ? static_cast<int>(*t.persona.gender) : -1};
}

}  // namespace

Dataset ingest_catalog(const std::filesystem::path& triples_file,
                       const std::filesystem::path& pairs_file) {
    Dataset d;
    const auto triple_lines = io::read_lines(triples_file);
    const auto pair_lines = io::read_lines(pairs_file);

    std::set<TripleKey> seen_triples;
    for (std::size_t i = 0; i < triple_lines.size(); ++i) {
        const std::string_view line = triple_lines[i];
        if (is_blank(line)) continue;
        const auto f = io::split(line, '\t');
        if (f.size() != 6)
            fail_at(triples_file, i + 1,
                    "expected 6 tab-separated fields, got " + std::to_string(f.size()));
        if (f[0].empty() || f[1].empty()) fail_at(triples_file, i + 1, "empty movie or actor name");
        Triple t;
        try {
            t.cast_rank = io::parse_int(f[2], "cast_rank");
            if (t.cast_rank < 1) throw std::invalid_argument("cast_rank must be >= 1");
            if (f[3] != "-") {
                const int topic = io::parse_int(f[3], "topic_group");
                if (topic < 0 || topic >= kTopicGroups)
                    throw std::invalid_argument("topic_group outside [0,50)");
                t.persona.topic_group = topic;
            }
            if (f[4] != "-") {
                const double age = io::parse_double(f[4], "age_years");
                t.persona.age_bucket = discretize_age(age);
                t.age_years = age;
            }
            if (f[5] != "-") t.persona.gender = parse_gender(f[5]);
        } catch (const std::exception& e) {
            fail_at(triples_file, i + 1, e.what());
        }
        t.movie = {EntityKind::Movie, d.movies.intern(f[0])};
        t.actor = {EntityKind::Actor, d.actors.intern(f[1])};
        if (seen_triples.insert(key_of(t)).second) d.triples.push_back(t);
    }

    std::set<std::pair<std::uint32_t, std::uint32_t>> seen_pairs;
    for (std::size_t i = 0; i < pair_lines.size(); ++i) {
        const std::string_view line = pair_lines[i];
        if (is_blank(line)) continue;
        const auto f = io::split(line, '\t');
        if (f.size() != 2)
            fail_at(pairs_file, i + 1,
                    "expected 2 tab-separated fields, got " + std::to_string(f.size()));
        if (f[0].empty() || f[1].empty()) fail_at(pairs_file, i + 1, "empty movie or keyword name");
        Pair p{{EntityKind::Movie, d.movies.intern(f[0])},
               {EntityKind::Keyword, d.keywords.intern(f[1])}};
        if (seen_pairs.emplace(p.movie.index, p.keyword.index).second) d.pairs.push_back(p);
    }

    d.splits.assign(d.triples.size(), Split::Train);
    return d;
}

Dataset filter_entities(const Dataset& d, int min_relations, int max_cast_rank) {
    if (min_relations < 1) throw std::invalid_argument("min_relations must be >= 1");

    std::vector<char> keep_triple(d.triples.size(), 1);
    std::vector<char> keep_pair(d.pairs.size(), 1);
    for (std::size_t i = 0; i < d.triples.size(); ++i)
        if (d.triples[i].cast_rank > max_cast_rank) keep_triple[i] = 0;

    std::vector<int> movie_n, actor_n, keyword_n;
    bool changed = true;
    while (changed) {
        changed = false;
        movie_n.assign(d.movies.size(), 0);
        actor_n.assign(d.actors.size(), 0);
        keyword_n.assign(d.keywords.size(), 0);
        for (std::size_t i = 0; i < d.triples.size(); ++i) {
            if (!keep_triple[i]) continue;
            ++movie_n[d.triples[i].movie.index];
            ++actor_n[d.triples[i].actor.index];
        }
        for (std::size_t i = 0; i < d.pairs.size(); ++i) {
            if (!keep_pair[i]) continue;
            ++movie_n[d.pairs[i].movie.index];
            ++keyword_n[d.pairs[i].keyword.index];
        }
        for (std::size_t i = 0; i < d.triples.size(); ++i) {
            const auto& t = d.triples[i];
            if (keep_triple[i] &&
                (movie_n[t.movie.index] < min_relations || actor_n[t.actor.index] < min_relations)) {
                keep_triple[i] = 0;
                changed = true;
            }
        }
        for (std::size_t i = 0; i < d.pairs.size(); ++i) {
            const auto& p = d.pairs[i];
            if (keep_pair[i] && (movie_n[p.movie.index] < min_relations ||
                                 keyword_n[p.keyword.index] < min_relations)) {
                keep_pair[i] = 0;
                changed = true;
            }
        }
    }

    // Rebuild vocabularies in original id order so survivors keep their relative order.
    std::vector<char> movie_alive(d.movies.size(), 0), actor_alive(d.actors.size(), 0),
        keyword_alive(d.keywords.size(), 0);
    for (std::size_t i = 0; i < d.triples.size(); ++i) {
        if (!keep_triple[i]) continue;
        movie_alive[d.triples[i].movie.index] = 1;
        actor_alive[d.triples[i].actor.index] = 1;
    }
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
        if (!keep_pair[i]) continue;
        movie_alive[d.pairs[i].movie.index] = 1;
        keyword_alive[d.pairs[i].keyword.index] = 1;
    }

    Dataset out;
    auto remap = [](const Vocabulary& from, const std::vector<char>& alive, Vocabulary& to) {
        std::vector<std::uint32_t> map(from.size(), 0);
        for (std::uint32_t i = 0; i < from.size(); ++i)
            if (alive[i]) map[i] = to.intern(from.name(i));
        return map;
    };
    const auto movie_map = remap(d.movies, movie_alive, out.movies);
    const auto actor_map = remap(d.actors, actor_alive, out.actors);
    const auto keyword_map = remap(d.keywords, keyword_alive, out.keywords);

    for (std::size_t i = 0; i < d.triples.size(); ++i) {
        if (!keep_triple[i]) continue;
        Triple t = d.triples[i];
        t.movie.index = movie_map[t.movie.index];
        t.actor.index = actor_map[t.actor.index];
        out.triples.push_back(t);
        out.splits.push_back(i < d.splits.size() ? d.splits[i] : Split::Train);
    }
    for (std::size_t i = 0; i < d.pairs.size(); ++i) {
        if (!keep_pair[i]) continue;
        Pair p = d.pairs[i];
        p.movie.index = movie_map[p.movie.index];
        p.keyword.index = keyword_map[p.keyword.index];
        out.pairs.push_back(p);
    }
    if (out.triples.empty() && out.pairs.empty())
        throw std::runtime_error("dataset is empty after filtering");
    return out;
}

Dataset split_triples(const Dataset& d, std::array<double, 3> ratios, std::uint64_t seed) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9 || ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0)
        throw std::invalid_argument("split ratios must be nonnegative and sum to 1");
    const std::size_t n = d.triples.size();
    if (n < 3) throw std::invalid_argument("need at least 3 triples to split");

    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[0]));
    const auto n_val = std::min(
        n - n_train, static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[1])));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    Dataset out = d;
    out.splits.assign(n, Split::Test);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            out.splits[order[i]] = Split::Train;
        else if (i < n_train + n_val)
            out.splits[order[i]] = Split::Val;
    }
    return out;
}

VersatilitySplit partition_expert_pairs(const std::vector<std::string>& val_actors,
                                        const std::vector<std::string>& test_actors,
                                        const std::vector<ExpertPair>& expert_pairs) {
    if (expert_pairs.empty()) throw std::invalid_argument("no expert pairs");
    const std::unordered_set<std::string> val(val_actors.begin(), val_actors.end());
    const std::unordered_set<std::string> test(test_actors.begin(), test_actors.end());
    VersatilitySplit out{val_actors, test_actors, {}, {}};
    for (const auto& p : expert_pairs) {
        for (const auto* name : {&p.winner, &p.loser})
            if (!val.count(*name) && !test.count(*name))
                throw std::invalid_argument("expert pair names unknown actor '" + *name + "'");
        if (val.count(p.winner) && val.count(p.loser))
            out.val_pairs.push_back(p);
        else
            out.test_pairs.push_back(p);
    }
    return out;
}

VersatilitySplit split_versatility_actors(const std::vector<std::string>& actors,
                                          const std::vector<ExpertPair>& expert_pairs,
                                          std::uint64_t seed) {
    if (expert_pairs.empty()) throw std::invalid_argument("no expert pairs");
    std::vector<std::string> order(actors.begin(), actors.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t half = order.size() / 2;
    std::vector<std::string> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<std::string> test(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
    return partition_expert_pairs(val, test, expert_pairs);
}

std::vector<ExpertPair> read_expert_pairs(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<ExpertPair> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (is_blank(line) || line.front() == '#') continue;
        const auto f = io::split(line, '\t');
        if (f.size() != 3)
            fail_at(path, i + 1, "expected 3 tab-separated fields, got " + std::to_string(f.size()));
        ExpertPair p{std::string(f[0]), std::string(f[1]), 0};
        try {
            p.majority_count = io::parse_int(f[2], "majority_count");
        } catch (const std::exception& e) {
            fail_at(path, i + 1, e.what());
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_expert_pairs(const std::vector<ExpertPair>& pairs, const std::filesystem::path& path) {
    std::ostringstream os;
    for (const auto& p : pairs) os << p.winner << '\t' << p.loser << '\t' << p.majority_count << '\n';
    io::write_file_atomic(path, os.str());
}

void write_catalog(const Dataset& d, const std::filesystem::path& triples_file,
                   const std::filesystem::path& pairs_file) {
    std::ostringstream ts;
    for (const auto& t : d.triples) {
        ts << d.movies.name(t.movie.index) << '\t' << d.actors.name(t.actor.index) << '\t'
           << t.cast_rank << '\t';
        if (t.persona.topic_group)
            ts << *t.persona.topic_group;
        else
            ts << '-';
        ts << '\t';
        if (t.age_years)
            ts << io::format_double(*t.age_years);
        else if (t.persona.age_bucket)
            ts << *t.persona.age_bucket * 5;
        else
            ts << '-';
        ts << '\t';
        if (t.persona.gender)
            ts << gender_code(*t.persona.gender);
        else
            ts << '-';
        ts << '\n';
    }
    io::write_file_atomic(triples_file, ts.str());

    std::ostringstream ps;
    for (const auto& p : d.pairs)
        ps << d.movies.name(p.movie.index) << '\t' << d.keywords.name(p.keyword.index) << '\n';
    io::write_file_atomic(pairs_file, ps.str());
}

std::string_view split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

void write_splits(const Dataset& d, const std::filesystem::path& path) {
    std::ostringstream os;
    for (const auto s : d.splits) os << split_name(s) << '\n';
    io::write_file_atomic(path, os.str());
}

void read_splits(Dataset& d, const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<Split> splits;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tok = io::trim(lines[i]);
        if (tok.empty()) continue;
        if (tok == "train")
            splits.push_back(Split::Train);
        else if (tok == "val")
            splits.push_back(Split::Val);
        else if (tok == "test")
            splits.push_back(Split::Test);
        else
            fail_at(path, i + 1, "unknown split tag '" + std::string(tok) + "'");
    }
    if (splits.size() != d.triples.size())
        throw FormatError(path.string() + ": " + std::to_string(splits.size()) +
                          " split tags for " + std::to_string(d.triples.size()) + " triples");
    d.splits = std::move(splits);
}

}  // namespace actorgauss
