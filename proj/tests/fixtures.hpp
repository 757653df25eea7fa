#pragma once
// In-memory catalogs built by name.

#include <optional>
#include <string>

#include "actorgauss/data_model.hpp"

namespace fixtures {

using namespace actorgauss;

struct CatalogBuilder {
    Dataset d;

    CatalogBuilder& triple(const std::string& movie, const std::string& actor,
                           std::optional<int> topic = std::nullopt, Split split = Split::Train) {
        PersonaDescriptor p;
        p.topic_group = topic;
        d.triples.push_back({{EntityKind::Movie, d.movies.intern(movie)},
                             {EntityKind::Actor, d.actors.intern(actor)},
                             p,
                             static_cast<int>(d.triples.size()) + 1,
                             std::nullopt});
        d.splits.push_back(split);
        return *this;
    }

    CatalogBuilder& pair(const std::string& movie, const std::string& keyword) {
        d.pairs.push_back({{EntityKind::Movie, d.movies.intern(movie)},
                           {EntityKind::Keyword, d.keywords.intern(keyword)}});
        return *this;
    }
};

// Ten movies sharing one keyword; actor X plays topic 0 in m0..m4 and actor Y
// plays topic 1 in m5..m9. Two filler actors appear in every movie.
inline Dataset opposite_roles() {
    CatalogBuilder b;
    for (int m = 0; m < 10; ++m) {
        const auto movie = "m" + std::to_string(m);
        b.triple(movie, m < 5 ? "X" : "Y", m < 5 ? 0 : 1);
        b.triple(movie, "F" + std::to_string(m % 2), 2);
        b.pair(movie, "k");
    }
    for (int m = 10; m < 14; ++m) {
        const auto movie = "m" + std::to_string(m);
        b.triple(movie, "Z" + std::to_string(m % 2), 0);
        b.pair(movie, "other");
    }
    return b.d;
}

}  // namespace fixtures
