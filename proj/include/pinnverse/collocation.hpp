#ifndef PINNVERSE_COLLOCATION_HPP
#define PINNVERSE_COLLOCATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinnverse/common.hpp"
#include "pinnverse/refsolver.hpp"

namespace pinnverse {

// Exactly one category per training point. Corner points (t=0 on the
// boundary) are tagged boundary: the weight table lists the boundary branch
// first and the first match wins.
enum class PointTag : std::uint8_t { BoundaryLeft, BoundaryRight, Initial, Collocation };

const char* to_string(PointTag tag);
PointTag point_tag_from_string(const std::string& s);

// Tagged training set. Reference values are attached per point where
// available; in the synthetic-data regime every point carries one.
struct CollocationSet {
    std::vector<double> x, t;
    std::vector<PointTag> tags;
    std::vector<Matrix> reference; // per channel: 1 x M rows, aligned with points
    std::vector<std::uint8_t> has_reference;
    int channels = 1;

    Eigen::Index size() const { return static_cast<Eigen::Index>(x.size()); }
    Eigen::Index count(PointTag tag) const;
    void validate() const; // tag partition + alignment invariants
};

// All sample-grid points enter the set, grid-major (time outer, space
// inner), with tags from the partition rule: x in {0,1} -> boundary,
// else t=0 -> initial, else collocation.
CollocationSet build(const ReferenceField& field);

// Keeps every boundary and initial point; interior points are subsampled
// deterministically by seed. fraction in (0,1].
CollocationSet subsample(const CollocationSet& set, double fraction, std::uint64_t seed);

// CSV import/export: columns x, t, tag, u_ref[, v_ref].
void save_collocation_csv(const std::string& path, const CollocationSet& set);
CollocationSet load_collocation_csv(const std::string& path);

} // namespace pinnverse

#endif
