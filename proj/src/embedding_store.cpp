#include "actorgauss/embedding_store.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "actorgauss/io.hpp"
#include "binary_io.hpp"

namespace actorgauss {

void ModelConfig::validate() const {
    if (dim <= 0) throw std::invalid_argument("dim must be positive");
    if (!(var_min > 0.0 && var_min < var_max))
        throw std::invalid_argument("need 0 < var_min < var_max");
    if (composition == Composition::Concat && active_families() > 0 &&
        dim % active_families() != 0)
        throw std::invalid_argument("concat composition needs dim divisible by " +
                                    std::to_string(active_families()));
}

bool ModelConfig::uses_topic() const {
    return persona_mode == PersonaMode::Topic || persona_mode == PersonaMode::Full;
}

bool ModelConfig::uses_age_gender() const {
    return persona_mode == PersonaMode::AgeGender || persona_mode == PersonaMode::Full;
}

int ModelConfig::active_families() const {
    return (uses_topic() ? 1 : 0) + (uses_age_gender() ? 2 : 0);
}

int ModelConfig::descriptor_width() const {
    if (composition == Composition::Sum || active_families() == 0) return dim;
    return dim / active_families();
}

bool is_variance_block(Block b) {
    return b == Block::MovieVar || b == Block::ActorVar || b == Block::KeywordVar;
}

Block mean_block(EntityKind kind) {
    switch (kind) {
        case EntityKind::Movie: return Block::MovieMean;
        case EntityKind::Actor: return Block::ActorMean;
        case EntityKind::Keyword: return Block::KeywordMean;
    }
    return Block::MovieMean;
}

Block var_block(EntityKind kind) {
    switch (kind) {
        case EntityKind::Movie: return Block::MovieVar;
        case EntityKind::Actor: return Block::ActorVar;
        case EntityKind::Keyword: return Block::KeywordVar;
    }
    return Block::MovieVar;
}

VocabSizes vocab_sizes(const Dataset& d) {
    return {d.movies.size(), d.actors.size(), d.keywords.size()};
}

GaussianParam ModelParams::entity(EntityId id) const {
    const auto& means = table(mean_block(id.kind));
    const auto& vars = table(var_block(id.kind));
    if (id.index >= means.rows()) throw std::out_of_range("entity index out of range");
    return {means.row(id.index), vars.row(id.index)};
}

VocabSizes ModelParams::sizes() const {
    return {table(Block::MovieMean).rows(), table(Block::ActorMean).rows(),
            table(Block::KeywordMean).rows()};
}

WordVectors load_word_vectors(const std::filesystem::path& path) {
    WordVectors wv;
    const auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = io::trim(lines[i]);
        if (line.empty()) continue;
        auto f = io::split(line, ' ');
        std::erase_if(f, [](std::string_view s) { return s.empty(); });
        if (f.size() < 2)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": no vector values");
        std::vector<double> v;
        v.reserve(f.size() - 1);
        try {
            for (std::size_t j = 1; j < f.size(); ++j) v.push_back(io::parse_double(f[j], "vector"));
        } catch (const std::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
        if (wv.dim == 0) wv.dim = static_cast<int>(v.size());
        if (static_cast<int>(v.size()) != wv.dim)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(wv.dim) + " values");
        wv.vectors.emplace(std::string(f[0]), std::move(v));
    }
    return wv;
}

namespace {

std::vector<std::string_view> name_tokens(std::string_view name) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= name.size(); ++i) {
        if (i == name.size() || name[i] == '-' || name[i] == '_' || name[i] == ' ') {
            if (i > start) out.push_back(name.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

void apply_pretrained(ModelParams& params, const PretrainedKeywords& pre) {
    const auto dim = static_cast<std::size_t>(params.config.dim);
    for (const auto& [token, vec] : pre.vectors.vectors)
        if (vec.size() != dim)
            throw std::invalid_argument("pretrained vector '" + token + "' has length " +
                                        std::to_string(vec.size()) + ", expected " +
                                        std::to_string(dim));
    auto& means = params.table(Block::KeywordMean);
    if (pre.keyword_names.size() != means.rows())
        throw std::invalid_argument("keyword name count does not match keyword vocabulary");
    for (std::size_t k = 0; k < means.rows(); ++k) {
        const auto& name = pre.keyword_names[k];
        auto row = means.row(k);
        if (auto it = pre.vectors.vectors.find(name); it != pre.vectors.vectors.end()) {
            std::copy(it->second.begin(), it->second.end(), row.begin());
            continue;
        }
        std::vector<double> sum(dim, 0.0);
        bool any = false;
        for (auto tok : name_tokens(name)) {
            auto it = pre.vectors.vectors.find(std::string(tok));
            if (it == pre.vectors.vectors.end()) continue;
            any = true;
            for (std::size_t d = 0; d < dim; ++d) sum[d] += it->second[d];
        }
        if (any) std::copy(sum.begin(), sum.end(), row.begin());
    }
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, const VocabSizes& sizes, std::uint64_t seed,
                        const std::optional<PretrainedKeywords>& pretrained) {
    cfg.validate();
    ModelParams p;
    p.config = cfg;
    const auto dim = static_cast<std::size_t>(cfg.dim);
    const std::size_t var_width = cfg.spherical ? 1 : dim;
    const auto desc_width = static_cast<std::size_t>(cfg.descriptor_width());

    p.table(Block::MovieMean) = Table(sizes.movies, dim);
    p.table(Block::ActorMean) = Table(sizes.actors, dim);
    p.table(Block::KeywordMean) = Table(sizes.keywords, dim);
    p.table(Block::MovieVar) = Table(sizes.movies, var_width, 1.0);
    p.table(Block::ActorVar) = Table(sizes.actors, var_width, 1.0);
    p.table(Block::KeywordVar) = Table(sizes.keywords, var_width, 1.0);
    p.table(Block::Topic) = Table(cfg.uses_topic() ? kTopicGroups : 0, desc_width);
    p.table(Block::Age) = Table(cfg.uses_age_gender() ? kAgeBuckets : 0, desc_width);
    p.table(Block::Gender) = Table(cfg.uses_age_gender() ? kGenders : 0, desc_width);

    std::mt19937_64 rng(seed);
    const double scale = 0.5 / static_cast<double>(cfg.dim);
    std::uniform_real_distribution<double> unif(-scale, scale);
    for (Block b : {Block::MovieMean, Block::ActorMean, Block::KeywordMean, Block::Topic,
                    Block::Age, Block::Gender})
        for (double& x : p.table(b).data()) x = unif(rng);

    if (pretrained) apply_pretrained(p, *pretrained);
    clip_variances(p);
    return p;
}

void clip_variances(ModelParams& params) {
    const double lo = params.config.var_min, hi = params.config.var_max;
    for (Block b : {Block::MovieVar, Block::ActorVar, Block::KeywordVar})
        for (double& v : params.table(b).data()) v = std::clamp(v, lo, hi);
}

void clip_variances(ModelParams& params, std::span<const std::uint32_t> rows, Block block) {
    const double lo = params.config.var_min, hi = params.config.var_max;
    auto& t = params.table(block);
    for (auto r : rows)
        for (double& v : t.row(r)) v = std::clamp(v, lo, hi);
}

std::vector<PersonaSlot> persona_slots(const ModelConfig& cfg, const PersonaDescriptor& desc) {
    std::vector<PersonaSlot> slots;
    const bool concat = cfg.composition == Composition::Concat;
    const auto width = static_cast<std::size_t>(cfg.descriptor_width());
    std::size_t family = 0;
    auto add = [&](bool active, Block block, std::optional<int> value) {
        if (!active) return;
        if (value) {
            slots.push_back({block, static_cast<std::uint32_t>(*value), concat ? family * width : 0});
        }
        ++family;
    };
    add(cfg.uses_topic(), Block::Topic, desc.topic_group);
    add(cfg.uses_age_gender(), Block::Age, desc.age_bucket);
    add(cfg.uses_age_gender(), Block::Gender,
        desc.gender ? std::optional<int>(static_cast<int>(*desc.gender)) : std::nullopt);
    return slots;
}

void compose_persona_vector(const ModelParams& params, const PersonaDescriptor& desc,
                            std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& slot : persona_slots(params.config, desc)) {
        const auto& t = params.table(slot.block);
        if (slot.row >= t.rows()) throw std::out_of_range("persona descriptor value out of range");
        const auto v = t.row(slot.row);
        for (std::size_t i = 0; i < v.size(); ++i) out[slot.offset + i] += v[i];
    }
}

std::vector<double> compose_persona_vector(const ModelParams& params, const PersonaDescriptor& desc) {
    std::vector<double> out(static_cast<std::size_t>(params.config.dim), 0.0);
    compose_persona_vector(params, desc, out);
    return out;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    std::ostringstream buf(std::ios::binary);
    detail::BinaryWriter w(buf);
    const auto& c = params.config;
    detail::write_header(w, ModelFamily::Gaussian, static_cast<std::uint32_t>(c.dim));
    const auto sizes = params.sizes();
    w.put<std::uint64_t>(sizes.movies);
    w.put<std::uint64_t>(sizes.actors);
    w.put<std::uint64_t>(sizes.keywords);
    w.put<std::uint32_t>(c.spherical ? 1 : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.persona_mode));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(c.composition));
    w.put(c.var_min);
    w.put(c.var_max);
    for (const auto& t : params.blocks) w.put_table(t);
    io::write_file_atomic(path, buf.str());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    detail::BinaryReader r(in, path.string());
    const auto [family, dim] = detail::read_header(r);
    if (family != ModelFamily::Gaussian)
        throw std::runtime_error(path.string() + ": checkpoint holds a TransE model");
    ModelParams p;
    p.config.dim = static_cast<int>(dim);
    VocabSizes sizes;
    sizes.movies = r.get<std::uint64_t>();
    sizes.actors = r.get<std::uint64_t>();
    sizes.keywords = r.get<std::uint64_t>();
    p.config.spherical = r.get<std::uint32_t>() != 0;
    const auto mode = r.get<std::uint32_t>();
    const auto comp = r.get<std::uint32_t>();
    if (mode > 3 || comp > 1) throw std::runtime_error(path.string() + ": bad config flags");
    p.config.persona_mode = static_cast<PersonaMode>(mode);
    p.config.composition = static_cast<Composition>(comp);
    p.config.var_min = r.get<double>();
    p.config.var_max = r.get<double>();
    p.config.validate();
    for (auto& t : p.blocks) t = r.get_table();
    if (p.sizes().movies != sizes.movies || p.sizes().actors != sizes.actors ||
        p.sizes().keywords != sizes.keywords)
        throw std::runtime_error(path.string() + ": header sizes disagree with tables");
    return p;
}

ModelFamily peek_checkpoint_family(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    detail::BinaryReader r(in, path.string());
    return detail::read_header(r).first;
}

}  // namespace actorgauss
