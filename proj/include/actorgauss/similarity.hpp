#pragma once
// Log Gaussian-overlap similarities and their gradients.
//
//   log ∫ N(x; a) N(x; b) dx = log N(0; mu_a - mu_b, diag(var_a + var_b))
//                            = -1/2 sum_d [ log(2 pi s_d) + g_d^2 / s_d ]
// with gap g = mu_a - mu_b and s = var_a + var_b. The normalising constant is
// kept, so values are exact log densities.

#include <span>
#include <vector>

#include "actorgauss/data_model.hpp"
#include "actorgauss/embedding_store.hpp"

namespace actorgauss {

// Variance spans of length 1 are broadcast over all mean dimensions.
double log_overlap(std::span<const double> mu_a, std::span<const double> var_a,
                   std::span<const double> mu_b, std::span<const double> var_b);

double movie_keyword_similarity(const ModelParams& params, EntityId movie, EntityId keyword);
double persona_free_similarity(const ModelParams& params, EntityId movie, EntityId actor);
// log N(mu_actor; mu_movie + nu, var_actor + var_movie)
double persona_similarity(const ModelParams& params, EntityId movie, const PersonaDescriptor& desc,
                          EntityId actor);

enum class Relation { MovieKeyword, MoviePersonaActor };

// Left is always the movie; right is the keyword or the actor. Variance
// gradients have the stored width (1 in spherical mode, summed over dims).
struct SimilarityGradients {
    double value = 0.0;
    std::vector<double> d_mean_left;
    std::vector<double> d_mean_right;
    std::vector<double> d_var_left;
    std::vector<double> d_var_right;
    std::vector<double> d_persona;  // w.r.t. the composed translation; zero when unused
};

// `mask` (empty = none) multiplies every mean and the composed persona vector
// before the similarity is taken; gradients are w.r.t. the unmasked values.
SimilarityGradients similarity_gradients(const ModelParams& params, Relation relation,
                                         EntityId movie, EntityId other,
                                         const PersonaDescriptor& desc,
                                         std::span<const double> mask = {});

}  // namespace actorgauss
