#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "pinnverse/collocation.hpp"

using namespace pinnverse;

namespace {

ReferenceField small_reference() {
    ModelSpec m;
    const Grid grid{.nx = 100, .nt = 100, .sample_nx = 100, .sample_nt = 100};
    return solve(m, {{"D", 1.0}}, grid);
}

} // namespace

TEST_CASE("tag names round trip") {
    for (const auto tag : {PointTag::BoundaryLeft, PointTag::BoundaryRight, PointTag::Initial,
                           PointTag::Collocation})
        CHECK(point_tag_from_string(to_string(tag)) == tag);
    CHECK_THROWS_AS(point_tag_from_string("corner"), config_error);
}

TEST_CASE("build partitions the 100x100 sample grid") {
    const ReferenceField ref = small_reference();
    const CollocationSet set = build(ref);
    CHECK(set.size() == 10000);
    CHECK(set.count(PointTag::BoundaryLeft) == 100);
    CHECK(set.count(PointTag::BoundaryRight) == 100);
    CHECK(set.count(PointTag::Initial) == 98); // t=0 row minus the two corners
    CHECK(set.count(PointTag::Collocation) == 9702);
    CHECK_NOTHROW(set.validate());

    // corners belong to the boundary, by the first-match rule
    for (Eigen::Index j = 0; j < set.size(); ++j) {
        if (set.x[static_cast<size_t>(j)] == 0.0)
            CHECK(set.tags[static_cast<size_t>(j)] == PointTag::BoundaryLeft);
        else if (set.x[static_cast<size_t>(j)] == 1.0)
            CHECK(set.tags[static_cast<size_t>(j)] == PointTag::BoundaryRight);
        else if (set.t[static_cast<size_t>(j)] == 0.0)
            CHECK(set.tags[static_cast<size_t>(j)] == PointTag::Initial);
        else
            CHECK(set.tags[static_cast<size_t>(j)] == PointTag::Collocation);
    }
}

TEST_CASE("build attaches reference data grid-major") {
    const ReferenceField ref = small_reference();
    const CollocationSet set = build(ref);
    REQUIRE(set.has_reference.size() == 10000);
    CHECK(std::all_of(set.has_reference.begin(), set.has_reference.end(),
                      [](std::uint8_t has) { return has == 1; }));
    // point j = n*100 + i carries u(t_n, x_i)
    for (const auto [n, i] : {std::pair{0, 0}, {0, 57}, {31, 0}, {42, 99}, {99, 99}}) {
        const Eigen::Index j = n * 100 + i;
        CHECK(set.x[static_cast<size_t>(j)] == ref.field.x_of(i));
        CHECK(set.t[static_cast<size_t>(j)] == ref.field.t_of(n));
        CHECK(set.reference[0](0, j) == ref.field.values[0](n, i));
    }
}

TEST_CASE("validate rejects tag rule violations") {
    const ReferenceField ref = small_reference();
    CollocationSet set = build(ref);
    set.tags[5] = PointTag::Collocation; // point 5 sits on the t=0 row
    CHECK_THROWS_AS(set.validate(), contract_violation);
}

TEST_CASE("subsample keeps the boundary and initial data intact") {
    const ReferenceField ref = small_reference();
    const CollocationSet full = build(ref);
    const CollocationSet sub = subsample(full, 0.25, 42);

    CHECK(sub.count(PointTag::BoundaryLeft) == 100);
    CHECK(sub.count(PointTag::BoundaryRight) == 100);
    CHECK(sub.count(PointTag::Initial) == 98);
    const Eigen::Index kept = sub.count(PointTag::Collocation);
    CHECK(kept > 9702 / 5);
    CHECK(kept < 9702 / 3);
    CHECK_NOTHROW(sub.validate());

    // no duplicates, and every kept point still carries its reference value
    std::set<std::pair<double, double>> seen;
    for (size_t j = 0; j < sub.x.size(); ++j) {
        CHECK(seen.emplace(sub.x[j], sub.t[j]).second);
        CHECK(sub.has_reference[j] == 1);
    }

    // deterministic in the seed
    const CollocationSet again = subsample(full, 0.25, 42);
    CHECK(again.x == sub.x);
    const CollocationSet other = subsample(full, 0.25, 43);
    CHECK(other.x != sub.x);

    CHECK(subsample(full, 1.0, 1).size() == full.size());
    CHECK_THROWS_AS(subsample(full, 0.0, 1), config_error);
}

TEST_CASE("collocation CSV round trip") {
    const ReferenceField ref = small_reference();
    const CollocationSet set = subsample(build(ref), 0.1, 7);
    const std::string path =
        (std::filesystem::temp_directory_path() / "pinnverse_colloc_test.csv").string();
    save_collocation_csv(path, set);
    const CollocationSet back = load_collocation_csv(path);
    CHECK(back.size() == set.size());
    CHECK(back.x == set.x);
    CHECK(back.t == set.t);
    CHECK(back.tags == set.tags);
    CHECK(back.channels == set.channels);
    CHECK((back.reference[0] - set.reference[0]).lpNorm<Eigen::Infinity>() == 0.0);
    std::remove(path.c_str());
}
