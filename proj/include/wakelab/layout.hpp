// Turbine layouts: validation, generators, file I/O and upstream ordering.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wakelab/angles.hpp"

namespace wakelab {

/// Fixed farm geometry: hub positions in meters plus the (shared) rotor
/// diameter.
struct FarmLayout {
    std::vector<Eigen::Vector2d> positions;
    double rotor_diameter = 0.0;

    FarmLayout() = default;
    FarmLayout(std::vector<Eigen::Vector2d> pos, double d)
        : positions(std::move(pos)), rotor_diameter(d) {
        validate();
    }

    int n_turbines() const { return static_cast<int>(positions.size()); }

    void validate() const {
        if (positions.empty()) {
            throw std::invalid_argument("FarmLayout: need at least one turbine");
        }
        if (!(rotor_diameter > 0.0)) {
            throw std::invalid_argument("FarmLayout: rotor diameter must be positive");
        }
        for (std::size_t i = 0; i < positions.size(); ++i) {
            for (std::size_t j = i + 1; j < positions.size(); ++j) {
                if (positions[i] == positions[j]) {
                    throw std::invalid_argument("FarmLayout: duplicate turbine position");
                }
            }
        }
    }

    /// Centroid of the hub positions.
    Eigen::Vector2d centroid() const {
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (const auto& p : positions) c += p;
        return c / static_cast<double>(positions.size());
    }
};

/// Turbine indices sorted from upstream to downstream for the given wind
/// direction (ascending projection onto the flow vector, ties broken by
/// index).
inline std::vector<int> upstream_order(const FarmLayout& layout, double wind_dir_deg) {
    const Eigen::Vector2d flow = flow_vector(wind_dir_deg);
    std::vector<int> idx(layout.positions.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return layout.positions[a].dot(flow) < layout.positions[b].dot(flow);
    });
    return idx;
}

/// 19-turbine diamond: rows of 3/4/5/4/3 turbines, each row centered and
/// offset by half the in-row pitch, with the row pitch chosen so that the
/// nearest neighbors of every turbine sit exactly spacing*d apart.
inline FarmLayout diamond_layout(double spacing_diameters, double rotor_diameter_m) {
    if (!(spacing_diameters > 0.0)) {
        throw std::invalid_argument("diamond_layout: spacing must be positive");
    }
    const double s = spacing_diameters * rotor_diameter_m;  // nearest-neighbor distance
    const double col_pitch = s * std::sqrt(2.0);
    const double row_pitch = s / std::sqrt(2.0);  // => diagonal neighbor distance = s
    const int row_sizes[5] = {3, 4, 5, 4, 3};

    std::vector<Eigen::Vector2d> pos;
    pos.reserve(19);
    for (int r = 0; r < 5; ++r) {
        const double y = (r - 2) * row_pitch;
        const int m = row_sizes[r];
        for (int k = 0; k < m; ++k) {
            const double x = (k - (m - 1) * 0.5) * col_pitch;
            pos.emplace_back(x, y);
        }
    }
    return FarmLayout(std::move(pos), rotor_diameter_m);
}

/// n turbines in a straight line along east-west, spacing*d apart.
inline FarmLayout row_layout(int n, double spacing_diameters, double rotor_diameter_m) {
    if (n < 1) throw std::invalid_argument("row_layout: n must be >= 1");
    std::vector<Eigen::Vector2d> pos;
    pos.reserve(n);
    for (int i = 0; i < n; ++i) {
        pos.emplace_back(i * spacing_diameters * rotor_diameter_m, 0.0);
    }
    return FarmLayout(std::move(pos), rotor_diameter_m);
}

/// 5 turbines: one at the center plus one in each cardinal direction.
inline FarmLayout cross_layout(double spacing_diameters, double rotor_diameter_m) {
    const double s = spacing_diameters * rotor_diameter_m;
    std::vector<Eigen::Vector2d> pos = {
        {0.0, 0.0}, {s, 0.0}, {-s, 0.0}, {0.0, s}, {0.0, -s}};
    return FarmLayout(std::move(pos), rotor_diameter_m);
}

/// Loads a layout file: a header line `d=<meters>` followed by one
/// `x_m y_m` line per turbine. Blank lines and `#` comments are skipped.
inline FarmLayout load_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_layout: cannot open " + path);
    std::string line;
    double d = 0.0;
    bool have_d = false;
    std::vector<Eigen::Vector2d> pos;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!have_d) {
            if (line.compare(first, 2, "d=") != 0) {
                throw std::runtime_error("load_layout: expected header d=<meters>");
            }
            d = std::stod(line.substr(first + 2));
            have_d = true;
            continue;
        }
        std::istringstream ls(line);
        double x = 0.0, y = 0.0;
        if (!(ls >> x >> y)) {
            throw std::runtime_error("load_layout: bad turbine line: " + line);
        }
        pos.emplace_back(x, y);
    }
    if (!have_d) throw std::runtime_error("load_layout: missing d= header");
    return FarmLayout(std::move(pos), d);
}

inline void save_layout(const FarmLayout& layout, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_layout: cannot open " + path);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "d=%.17g\n", layout.rotor_diameter);
    out << buf;
    for (const auto& p : layout.positions) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x(), p.y());
        out << buf;
    }
}

}  // namespace wakelab
