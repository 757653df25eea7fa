#include "actorgauss/similarity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace actorgauss {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2π)

double var_at(std::span<const double> v, std::size_t d) { return v.size() == 1 ? v[0] : v[d]; }

void check_shapes(std::span<const double> mu_a, std::span<const double> var_a,
                  std::span<const double> mu_b, std::span<const double> var_b) {
    if (mu_a.size() != mu_b.size()) throw std::invalid_argument("mean lengths differ");
    for (auto v : {var_a, var_b})
        if (v.size() != 1 && v.size() != mu_a.size())
            throw std::invalid_argument("variance length must be 1 or match the mean");
}

void expect_kind(EntityId id, EntityKind kind, const char* role) {
    if (id.kind != kind) throw std::invalid_argument(std::string("wrong entity kind for ") + role);
}

}  // namespace

double log_overlap(std::span<const double> mu_a, std::span<const double> var_a,
                   std::span<const double> mu_b, std::span<const double> var_b) {
    check_shapes(mu_a, var_a, mu_b, var_b);
    double acc = 0.0;
    for (std::size_t d = 0; d < mu_a.size(); ++d) {
        const double s = var_at(var_a, d) + var_at(var_b, d);
        if (!(var_at(var_a, d) > 0.0 && var_at(var_b, d) > 0.0))
            throw std::invalid_argument("variances must be positive");
        const double g = mu_a[d] - mu_b[d];
        acc += kLog2Pi + std::log(s) + g * g / s;
    }
    return -0.5 * acc;
}

double movie_keyword_similarity(const ModelParams& params, EntityId movie, EntityId keyword) {
    expect_kind(movie, EntityKind::Movie, "movie");
    expect_kind(keyword, EntityKind::Keyword, "keyword");
    const auto m = params.entity(movie), k = params.entity(keyword);
    return log_overlap(m.mean, m.var, k.mean, k.var);
}

double persona_free_similarity(const ModelParams& params, EntityId movie, EntityId actor) {
    expect_kind(movie, EntityKind::Movie, "movie");
    expect_kind(actor, EntityKind::Actor, "actor");
    const auto m = params.entity(movie), a = params.entity(actor);
    return log_overlap(m.mean, m.var, a.mean, a.var);
}

double persona_similarity(const ModelParams& params, EntityId movie, const PersonaDescriptor& desc,
                          EntityId actor) {
    expect_kind(movie, EntityKind::Movie, "movie");
    expect_kind(actor, EntityKind::Actor, "actor");
    const auto m = params.entity(movie), a = params.entity(actor);
    auto shifted = compose_persona_vector(params, desc);
    for (std::size_t d = 0; d < shifted.size(); ++d) shifted[d] += m.mean[d];
    return log_overlap(a.mean, a.var, shifted, m.var);
}

SimilarityGradients similarity_gradients(const ModelParams& params, Relation relation,
                                         EntityId movie, EntityId other,
                                         const PersonaDescriptor& desc,
                                         std::span<const double> mask) {
    expect_kind(movie, EntityKind::Movie, "movie");
    const bool with_persona = relation == Relation::MoviePersonaActor;
    expect_kind(other, with_persona ? EntityKind::Actor : EntityKind::Keyword,
                with_persona ? "actor" : "keyword");

    const auto dim = static_cast<std::size_t>(params.config.dim);
    if (!mask.empty() && mask.size() != dim) throw std::invalid_argument("mask length mismatch");
    const auto left = params.entity(movie);
    const auto right = params.entity(other);

    std::vector<double> nu(dim, 0.0);
    const bool persona_used = with_persona && params.config.persona_mode != PersonaMode::None;
    if (persona_used) compose_persona_vector(params, desc, nu);

    SimilarityGradients g;
    g.d_mean_left.assign(dim, 0.0);
    g.d_mean_right.assign(dim, 0.0);
    g.d_var_left.assign(left.var.size(), 0.0);
    g.d_var_right.assign(right.var.size(), 0.0);
    g.d_persona.assign(dim, 0.0);

    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double q = mask.empty() ? 1.0 : mask[d];
        const double vl = left.variance(d), vr = right.variance(d);
        if (!(vl > 0.0 && vr > 0.0)) throw std::invalid_argument("variances must be positive");
        const double s = vl + vr;
        const double gap = q * (left.mean[d] + nu[d] - right.mean[d]);
        acc += kLog2Pi + std::log(s) + gap * gap / s;

        const double d_gap = -gap / s;  // dS/d(gap)
        g.d_mean_left[d] = d_gap * q;
        g.d_mean_right[d] = -d_gap * q;
        if (persona_used) g.d_persona[d] = d_gap * q;
        const double d_s = -0.5 * (1.0 / s - gap * gap / (s * s));
        g.d_var_left[left.var.size() == 1 ? 0 : d] += d_s;
        g.d_var_right[right.var.size() == 1 ? 0 : d] += d_s;
    }
    g.value = -0.5 * acc;
    return g;
}

}  // namespace actorgauss
