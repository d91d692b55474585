#include "pinnverse/collocation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pinnverse {

const char* to_string(PointTag tag) {
    switch (tag) {
    case PointTag::BoundaryLeft: return "boundary-left";
    case PointTag::BoundaryRight: return "boundary-right";
    case PointTag::Initial: return "initial";
    case PointTag::Collocation: return "collocation";
    }
    return "?";
}

PointTag point_tag_from_string(const std::string& s) {
    if (s == "boundary-left") return PointTag::BoundaryLeft;
    if (s == "boundary-right") return PointTag::BoundaryRight;
    if (s == "initial") return PointTag::Initial;
    if (s == "collocation") return PointTag::Collocation;
    throw config_error("unknown point tag '" + s + "'");
}

Eigen::Index CollocationSet::count(PointTag tag) const {
    return static_cast<Eigen::Index>(std::count(tags.begin(), tags.end(), tag));
}

void CollocationSet::validate() const {
    const size_t m = x.size();
    if (t.size() != m || tags.size() != m || has_reference.size() != m)
        throw contract_violation("collocation arrays are misaligned");
    if (channels < 1 || reference.size() != static_cast<size_t>(channels))
        throw contract_violation("collocation set needs one reference row per channel");
    for (const Matrix& row : reference)
        if (row.rows() != 1 || row.cols() != static_cast<Eigen::Index>(m))
            throw contract_violation("reference row shape does not match the point count");
    for (size_t i = 0; i < m; ++i) {
        if (!(x[i] >= 0.0 && x[i] <= 1.0))
            throw contract_violation("point " + std::to_string(i) + " leaves the domain");
        const bool on_boundary = x[i] == 0.0 || x[i] == 1.0;
        // the tag partition: boundary wins at corners, then the initial line
        PointTag expected = on_boundary
                                ? (x[i] == 0.0 ? PointTag::BoundaryLeft : PointTag::BoundaryRight)
                                : (t[i] == 0.0 ? PointTag::Initial : PointTag::Collocation);
        if (tags[i] != expected)
            throw contract_violation("point " + std::to_string(i) + " at x=" +
                                     std::to_string(x[i]) + ", t=" + std::to_string(t[i]) +
                                     " is tagged " + to_string(tags[i]) + ", expected " +
                                     to_string(expected));
    }
}

CollocationSet build(const ReferenceField& field) {
    const Field& f = field.field;
    CollocationSet set;
    set.channels = f.channels();
    const Eigen::Index M = static_cast<Eigen::Index>(f.nt) * f.nx;
    set.x.reserve(static_cast<size_t>(M));
    set.t.reserve(static_cast<size_t>(M));
    set.tags.reserve(static_cast<size_t>(M));
    set.has_reference.assign(static_cast<size_t>(M), 1);
    set.reference.assign(static_cast<size_t>(set.channels), Matrix::Zero(1, M));

    Eigen::Index col = 0;
    for (int n = 0; n < f.nt; ++n) {
        for (int i = 0; i < f.nx; ++i, ++col) {
            const double x = f.x_of(i);
            const double t = f.t_of(n);
            set.x.push_back(x);
            set.t.push_back(t);
            if (x == 0.0)
                set.tags.push_back(PointTag::BoundaryLeft);
            else if (x == 1.0)
                set.tags.push_back(PointTag::BoundaryRight);
            else if (t == 0.0)
                set.tags.push_back(PointTag::Initial);
            else
                set.tags.push_back(PointTag::Collocation);
            for (int c = 0; c < set.channels; ++c)
                set.reference[static_cast<size_t>(c)](0, col) = f.values[static_cast<size_t>(c)](n, i);
        }
    }
    return set;
}

CollocationSet subsample(const CollocationSet& set, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw config_error("subsample fraction must lie in (0, 1]");
    set.validate();
    if (fraction == 1.0) return set;

    std::vector<Eigen::Index> interior;
    for (Eigen::Index i = 0; i < set.size(); ++i)
        if (set.tags[static_cast<size_t>(i)] == PointTag::Collocation) interior.push_back(i);

    const auto keep = static_cast<size_t>(fraction * static_cast<double>(interior.size()));
    SplitRng rng(seed);
    // partial Fisher-Yates: the first `keep` entries become the sample
    for (size_t i = 0; i < keep && i + 1 < interior.size(); ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(interior.size() - i));
        std::swap(interior[i], interior[j]);
    }
    interior.resize(keep);
    std::sort(interior.begin(), interior.end());

    std::vector<Eigen::Index> selected;
    size_t next_interior = 0;
    for (Eigen::Index i = 0; i < set.size(); ++i) {
        if (set.tags[static_cast<size_t>(i)] != PointTag::Collocation) {
            selected.push_back(i);
        } else if (next_interior < interior.size() && interior[next_interior] == i) {
            selected.push_back(i);
            ++next_interior;
        }
    }

    CollocationSet out;
    out.channels = set.channels;
    out.reference.assign(static_cast<size_t>(set.channels),
                         Matrix::Zero(1, static_cast<Eigen::Index>(selected.size())));
    Eigen::Index col = 0;
    for (const Eigen::Index i : selected) {
        out.x.push_back(set.x[static_cast<size_t>(i)]);
        out.t.push_back(set.t[static_cast<size_t>(i)]);
        out.tags.push_back(set.tags[static_cast<size_t>(i)]);
        out.has_reference.push_back(set.has_reference[static_cast<size_t>(i)]);
        for (int c = 0; c < set.channels; ++c)
            out.reference[static_cast<size_t>(c)](0, col) =
                set.reference[static_cast<size_t>(c)](0, i);
        ++col;
    }
    return out;
}

void save_collocation_csv(const std::string& path, const CollocationSet& set) {
    set.validate();
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << "x,t,tag,u_ref";
    if (set.channels == 2) out << ",v_ref";
    out << "\n";
    char buf[40];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (Eigen::Index i = 0; i < set.size(); ++i) {
        out << fmt(set.x[static_cast<size_t>(i)]) << "," << fmt(set.t[static_cast<size_t>(i)])
            << "," << to_string(set.tags[static_cast<size_t>(i)]) << ","
            << fmt(set.reference[0](0, i));
        if (set.channels == 2) out << "," << fmt(set.reference[1](0, i));
        out << "\n";
    }
    if (!out) throw config_error("short write: " + path);
}

CollocationSet load_collocation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty collocation CSV: " + path);
    const int channels = line.find("v_ref") != std::string::npos ? 2 : 1;

    std::vector<double> x, t, u, v;
    std::vector<PointTag> tags;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        x.push_back(std::stod(cell));
        std::getline(ss, cell, ',');
        t.push_back(std::stod(cell));
        std::getline(ss, cell, ',');
        tags.push_back(point_tag_from_string(cell));
        std::getline(ss, cell, ',');
        u.push_back(std::stod(cell));
        if (channels == 2) {
            std::getline(ss, cell, ',');
            v.push_back(std::stod(cell));
        }
    }

    CollocationSet set;
    set.channels = channels;
    set.x = std::move(x);
    set.t = std::move(t);
    set.tags = std::move(tags);
    const auto M = static_cast<Eigen::Index>(set.x.size());
    set.has_reference.assign(static_cast<size_t>(M), 1);
    set.reference.assign(static_cast<size_t>(channels), Matrix::Zero(1, M));
    for (Eigen::Index i = 0; i < M; ++i) {
        set.reference[0](0, i) = u[static_cast<size_t>(i)];
        if (channels == 2) set.reference[1](0, i) = v[static_cast<size_t>(i)];
    }
    set.validate();
    return set;
}

} // namespace pinnverse
